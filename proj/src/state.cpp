#include "qhyper/state.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/LU>

#include "qhyper/linalg.hpp"

namespace qhyper {

namespace {

double max_abs(const SparseMatrix& m) {
  double result = 0.0;
  for (int k = 0; k < m.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(m, k); it; ++it) result = std::max(result, std::abs(it.value()));
  return result;
}

SparseMatrix scaled_identity(Eigen::Index dim, Complex value) {
  SparseMatrix id(dim, dim);
  id.setIdentity();
  return id * value;
}

}  // namespace

Complex trace_product(const SparseMatrix& a, const SparseMatrix& b) {
  const SparseMatrix bt = b.transpose();
  return a.cwiseProduct(bt).sum();
}

SparseMatrix DensityFactorization::power(double alpha) const {
  require(!projections.empty(), "density has not been built");
  const Eigen::Index dim = projections.front().rows();
  SparseMatrix result = scaled_identity(dim, std::pow(normalization, alpha));
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    const double low = std::pow(1.0 - lambdas[i], alpha);
    const double high = std::pow(lambdas[i], alpha);
    SparseMatrix factor = scaled_identity(dim, low) + projections[i] * Complex(high - low);
    result = SparseMatrix(result * factor);
  }
  result.prune(Complex(0.0), 1e-300);
  return result;
}

bool DensityReport::pass(double tolerance) const {
  const bool algebraic = projection <= tolerance && commutation <= tolerance && functional <= tolerance &&
                         trace <= std::max(tolerance * 1e-2, 1e-12);
  return algebraic && (!spectral || min_eigenvalue >= -1e-12);
}

DensityFactorization density_closed_form(const BabyFock& model) {
  DensityFactorization result;
  const int n = model.n();
  for (int i = 1; i <= n; ++i) {
    const double mu = model.params().mu_at(i);
    result.lambdas.push_back(1.0 / (1.0 + std::pow(mu, 4)));
    SparseMatrix p = SparseMatrix(model.gamma_star(i) * model.gamma(i)) * Complex(1.0 / (mu * mu + 1.0 / (mu * mu)));
    p.prune(Complex(0.0), 1e-300);
    result.projections.push_back(std::move(p));
  }
  // The unnormalized product has ambient trace 2^n.
  result.normalization = std::ldexp(1.0, -n);
  result.density = result.power(1.0);
  const DensityReport report = verify_density(model, result);
  ensure(report.pass(), "closed-form density fails its defining identities");
  return result;
}

DensityReport verify_density(const BabyFock& model, const DensityFactorization& density, bool compute_spectrum) {
  DensityReport report;
  const SparseMatrix& d = density.density;
  for (const SparseMatrix& p : density.projections) {
    report.projection = std::max(report.projection, max_abs(SparseMatrix(p * p) - p));
    report.projection = std::max(report.projection, max_abs(p - SparseMatrix(p.adjoint())));
    report.commutation = std::max(report.commutation, max_abs(SparseMatrix(d * p) - SparseMatrix(p * d)));
  }
  Complex trace = 0.0;
  for (Eigen::Index k = 0; k < d.rows(); ++k) trace += d.coeff(k, k);
  report.trace = std::abs(trace - 1.0);
  for (std::size_t code = 0; code < model.monomial_count(); ++code) {
    const SparseMatrix w = model.monomial_sparse(Monomial::from_code(code, model.n()));
    report.functional = std::max(report.functional, std::abs(trace_product(d, w) - w.coeff(0, 0)));
  }
  if (compute_spectrum) {
    report.spectral = true;
    report.min_eigenvalue = min_eigenvalue(Matrix(d));
  }
  return report;
}

DensitySolution density_solve(const BabyFock& model, const VacuumFunctional& functional) {
  const int n = model.n();
  const std::size_t count = model.monomial_count();
  std::vector<SparseMatrix> words;
  words.reserve(count);
  for (std::size_t code = 0; code < count; ++code) words.push_back(model.monomial_sparse(Monomial::from_code(code, n)));

  const auto m = static_cast<Eigen::Index>(count);
  Matrix system(m, m);
  Vector rhs(m);
  for (std::size_t b = 0; b < count; ++b) {
    const SparseMatrix wbt = words[b].transpose();
    for (std::size_t a = 0; a <= b; ++a) {
      const Complex value = words[a].cwiseProduct(wbt).sum();
      system(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(a)) = value;
      system(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = value;
    }
    const Monomial w = Monomial::from_code(b, n);
    rhs(static_cast<Eigen::Index>(b)) = functional ? functional(w) : words[b].coeff(0, 0);
  }
  Eigen::FullPivLU<Matrix> lu(system);
  ensure(lu.rank() == m, "density system is singular");
  const Vector coefficients = lu.solve(rhs);

  const Eigen::Index dim = static_cast<Eigen::Index>(model.dim());
  SparseMatrix accumulated(dim, dim);
  for (std::size_t a = 0; a < count; ++a) accumulated += words[a] * coefficients(static_cast<Eigen::Index>(a));
  DensitySolution solution;
  solution.density = Matrix(accumulated);
  const Matrix hermitian = 0.5 * (solution.density + solution.density.adjoint());
  solution.min_eigenvalue = eigenvalues_hermitian(hermitian)(0);
  return solution;
}

Matrix haagerup_embed(const DensityFactorization& density, const Matrix& x, double p) {
  require(p >= 1.0, "Haagerup exponent must be >= 1");
  require(x.rows() == density.density.rows() && x.cols() == density.density.cols(), "element has wrong shape");
  return x * density.power(1.0 / p);
}

double haagerup_norm(const DensityFactorization& density, const Matrix& x, double p) {
  return schatten_norm(haagerup_embed(density, x, p), p);
}

double haagerup_norm(const DensityFactorization& density, const Matrix& x, double p, double trace_scale) {
  require(p >= 1.0, "Haagerup exponent must be >= 1");
  require(trace_scale > 0.0, "trace scale must be positive");
  // Tr' = s Tr makes the density D / s.
  const Matrix embedded = x * density.power(1.0 / p) * Complex(std::pow(trace_scale, -1.0 / p));
  return std::pow(trace_scale * schatten_power_sum(embedded, p), 1.0 / p);
}

double l2_vacuum_norm(const Matrix& x) { return x.col(0).norm(); }

double ModularReport::max_residual() const {
  return residuals.empty() ? 0.0 : *std::max_element(residuals.begin(), residuals.end());
}

ModularReport modular_check(const BabyFock& model, const DensityFactorization& density, double p) {
  require(p >= 1.0, "modular check needs p >= 1");
  ModularReport report;
  report.p = p;
  const SparseMatrix root = density.power(1.0 / p);
  const double root_norm = Matrix(root).norm();
  for (int k = 1; k <= model.n(); ++k) {
    const double weight = std::pow(model.params().mu_at(k), 4.0 / p);
    const SparseMatrix& g = model.gamma(k);
    const SparseMatrix diff = SparseMatrix(root * g) - SparseMatrix(g * root) * Complex(weight);
    const double scale = std::max(1.0, weight) * root_norm * Matrix(g).norm();
    report.residuals.push_back(Matrix(diff).norm() / scale);
  }
  return report;
}

// ---------------------------------------------------------------- block evaluator

IrreducibleBlock::IrreducibleBlock(const BabyFock& model, const DensityFactorization& density) : n_(model.n()) {
  const Eigen::Index dim = static_cast<Eigen::Index>(model.dim());
  const Eigen::Index target = Eigen::Index{1} << n_;

  SparseMatrix minimal = scaled_identity(dim, 1.0);
  for (const SparseMatrix& p : density.projections) minimal = SparseMatrix(minimal * p);
  Eigen::Index column = 0;
  double best = 0.0;
  for (Eigen::Index k = 0; k < minimal.outerSize(); ++k) {
    double sum = 0.0;
    for (SparseMatrix::InnerIterator it(minimal, k); it; ++it) sum += std::norm(it.value());
    if (sum > best) {
      best = sum;
      column = k;
    }
  }
  ensure(best > 1e-6, "minimal projection is zero");
  Vector seed = Vector(minimal.col(column));
  seed.normalize();

  std::vector<SparseMatrix> words;
  words.reserve(model.monomial_count());
  basis_ = Matrix::Zero(dim, target);
  Eigen::Index found = 0;
  for (std::size_t code = 0; code < model.monomial_count(); ++code) {
    words.push_back(model.monomial_sparse(Monomial::from_code(code, n_)));
    if (found == target) continue;
    Vector v = words.back() * seed;
    const double original = v.norm();
    if (original == 0.0) continue;
    for (int pass = 0; pass < 2; ++pass)
      for (Eigen::Index k = 0; k < found; ++k) v -= basis_.col(k) * basis_.col(k).dot(v);
    if (v.norm() > 1e-8 * original) basis_.col(found++) = v.normalized();
  }
  ensure(found == target, "irreducible subspace has unexpected dimension");

  monomials_.reserve(words.size());
  for (const SparseMatrix& w : words) {
    const Matrix image = w * basis_;
    const Matrix block = basis_.adjoint() * image;
    ensure((image - basis_ * block).norm() <= 1e-9 * std::max(1.0, image.norm()),
           "subspace is not invariant under the algebra");
    monomials_.push_back(block);
  }

  const Matrix d_block = basis_.adjoint() * (density.density * basis_);
  ensure(std::abs(multiplicity() * d_block.trace().real() - 1.0) <= 1e-10, "block trace does not match ambient trace");
  Eigen::SelfAdjointEigenSolver<Matrix> solver(0.5 * (d_block + d_block.adjoint()));
  ensure(solver.info() == Eigen::Success, "block density eigensolver failed");
  density_eigenvalues_ = solver.eigenvalues();
  density_eigenvectors_ = solver.eigenvectors();
  ensure(density_eigenvalues_.minCoeff() > 0.0, "block density is not positive");
}

Matrix IrreducibleBlock::compress(const MonomialExpansion& x) const {
  require(x.n() == n_, "expansion size does not match model");
  Matrix result = Matrix::Zero(block_dim(), block_dim());
  for (std::size_t code = 0; code < monomials_.size(); ++code)
    if (x.at_code(code) != Complex(0.0)) result += x.at_code(code) * monomials_[code];
  return result;
}

Matrix IrreducibleBlock::density_power(double alpha) const {
  RealVector powered = density_eigenvalues_.array().pow(alpha);
  return density_eigenvectors_ * powered.cast<Complex>().asDiagonal() * density_eigenvectors_.adjoint();
}

double IrreducibleBlock::schatten_ambient(const Matrix& y, double p) const {
  return std::pow(multiplicity() * schatten_power_sum(y, p), 1.0 / p);
}

double IrreducibleBlock::haagerup_norm(const Matrix& x_block, double p) const {
  require(p >= 1.0, "Haagerup exponent must be >= 1");
  return schatten_ambient(x_block * density_power(1.0 / p), p);
}

// ---------------------------------------------------------------- subalgebra

Subalgebra::Subalgebra(const BabyFock& model) : model_(&model) {
  if (model.n() > 1) {
    lower_ = std::make_unique<BabyFock>(model.params().restrict(model.n() - 1));
    lower_density_ = std::make_unique<DensityFactorization>(density_closed_form(*lower_));
  }
}

Matrix Subalgebra::lift(const MonomialExpansion& e) const {
  require(e.n() == k(), "subalgebra element has the wrong number of indices");
  return model_->assemble(e.embed(model_->n()));
}

double Subalgebra::haagerup_norm(const MonomialExpansion& e, double p) const {
  require(e.n() == k(), "subalgebra element has the wrong number of indices");
  if (!lower_) return std::abs(e.at_code(0));
  return qhyper::haagerup_norm(*lower_density_, lower_->assemble(e), p);
}

double Subalgebra::l2_norm(const MonomialExpansion& e) const {
  require(e.n() == k(), "subalgebra element has the wrong number of indices");
  if (!lower_) return std::abs(e.at_code(0));
  double sum = 0.0;
  for (std::size_t code = 0; code < e.size(); ++code) sum += std::norm(e.at_code(code) * lower_->gns_value(code));
  return std::sqrt(sum);
}

}  // namespace qhyper
