#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "qhyper/babyfock.hpp"

namespace qhyper {

/// Vacuum density D = c * prod_i ((1 - lambda_i) + (2 lambda_i - 1) p_i) with
/// p_i = gamma_i^* gamma_i / (mu_i^2 + mu_i^-2) and lambda_i = 1 / (1 + mu_i^4).
/// The factors commute, so every power has the same product form.
struct DensityFactorization {
  std::vector<double> lambdas;
  std::vector<SparseMatrix> projections;
  SparseMatrix density;
  double normalization = 0.0;

  int n() const { return static_cast<int>(lambdas.size()); }
  /// D^alpha from the product form (no eigendecomposition).
  SparseMatrix power(double alpha) const;
  Matrix dense() const { return Matrix(density); }
  Matrix dense_power(double alpha) const { return Matrix(power(alpha)); }
};

struct DensityReport {
  double projection = 0.0;   ///< max ||p_i^2 - p_i||, ||p_i - p_i^*||
  double trace = 0.0;        ///< |Tr D - 1|
  double commutation = 0.0;  ///< max ||D p_j - p_j D||
  double functional = 0.0;   ///< max over monomials |Tr(D W) - tau(W)|
  double min_eigenvalue = 0.0;
  bool spectral = false;     ///< whether min_eigenvalue was computed

  bool pass(double tolerance = 1e-10) const;
};

/// Builds the product form and verifies it against the vacuum state on the
/// whole monomial basis. Throws ConstructionError on failure.
DensityFactorization density_closed_form(const BabyFock& model);

DensityReport verify_density(const BabyFock& model, const DensityFactorization& density,
                             bool compute_spectrum = false);

/// Tr(A B) for sparse operands.
Complex trace_product(const SparseMatrix& a, const SparseMatrix& b);

using VacuumFunctional = std::function<Complex(const Monomial&)>;

struct DensitySolution {
  Matrix density;
  double min_eigenvalue = 0.0;
  bool positive() const { return min_eigenvalue >= -1e-10; }
};

/// Solves Tr(D W_beta) = functional(W_beta) over the monomial basis with D in
/// the monomial span. An empty functional means the vacuum state.
DensitySolution density_solve(const BabyFock& model, const VacuumFunctional& functional = {});

/// x D^(1/p).
Matrix haagerup_embed(const DensityFactorization& density, const Matrix& x, double p);
/// ||x D^(1/p)||_p under the ambient matrix trace.
double haagerup_norm(const DensityFactorization& density, const Matrix& x, double p);
/// Same norm computed with the trace rescaled by `trace_scale` and D by its inverse.
double haagerup_norm(const DensityFactorization& density, const Matrix& x, double p, double trace_scale);
/// ||x D^(1/2)||_2 = ||x x_0||, without any spectral computation.
double l2_vacuum_norm(const Matrix& x);

struct ModularReport {
  double p = 0.0;
  std::vector<double> residuals;  ///< relative, one per index
  double max_residual() const;
  bool pass(double tolerance = 1e-9) const { return max_residual() <= tolerance; }
};

/// Residuals of D^(1/p) gamma_k - mu_k^(4/p) gamma_k D^(1/p).
ModularReport modular_check(const BabyFock& model, const DensityFactorization& density, double p);

/// Restriction of the algebra to one irreducible subspace K of dimension 2^n.
/// The ambient GNS representation is 2^n copies of it, so ambient traces are
/// 2^n times block traces and Haagerup norms can be computed on 2^n x 2^n
/// matrices.
class IrreducibleBlock {
 public:
  IrreducibleBlock(const BabyFock& model, const DensityFactorization& density);

  int n() const { return n_; }
  Eigen::Index block_dim() const { return basis_.cols(); }
  double multiplicity() const { return static_cast<double>(block_dim()); }
  const Matrix& basis() const { return basis_; }

  const Matrix& monomial(std::size_t code) const { return monomials_[code]; }
  Matrix compress(const Matrix& x) const { return basis_.adjoint() * x * basis_; }
  Matrix compress(const MonomialExpansion& x) const;
  /// Block of D^alpha.
  Matrix density_power(double alpha) const;

  /// (multiplicity * sum sigma^p)^(1/p) for a block matrix y.
  double schatten_ambient(const Matrix& y, double p) const;
  /// Block route to haagerup_norm.
  double haagerup_norm(const Matrix& x_block, double p) const;

 private:
  int n_ = 0;
  Matrix basis_;
  std::vector<Matrix> monomials_;
  RealVector density_eigenvalues_;
  Matrix density_eigenvectors_;
};

/// The subalgebra generated by gamma_1..gamma_{n-1} of an n-index model,
/// together with its own (n-1)-index model for norms. For n = 1 the
/// subalgebra is the scalars and expansions have a single coefficient.
class Subalgebra {
 public:
  /// `model` must outlive this object.
  explicit Subalgebra(const BabyFock& model);

  int k() const { return model_->n() - 1; }
  const BabyFock& model() const { return *model_; }
  /// Model on the first k indices; null when k = 0.
  const BabyFock* lower() const { return lower_.get(); }

  /// Matrix of the element inside the n-index model.
  Matrix lift(const MonomialExpansion& e) const;
  /// ||e D_k^(1/p)||_p computed in the k-index model.
  double haagerup_norm(const MonomialExpansion& e, double p) const;
  /// ||e D_k^(1/2)||_2 from the GNS vector.
  double l2_norm(const MonomialExpansion& e) const;

 private:
  const BabyFock* model_;
  std::unique_ptr<BabyFock> lower_;
  std::unique_ptr<DensityFactorization> lower_density_;
};

}  // namespace qhyper
