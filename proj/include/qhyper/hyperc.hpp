#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "qhyper/semigroup.hpp"

namespace qhyper {

// ---------------------------------------------------------------- convexity

/// ((||A+B||_p^p + ||A-B||_p^p)/2)^(2/p) - ||A||_p^2 - (p-1)||B||_p^2, 1 < p <= 2.
double bcl_check(const Matrix& a, const Matrix& b, double p);

/// Constant of the asymmetric convexity inequality: mu^-4/3 for p <= 4/3 and
/// mu^(8 - 16/p)/3 above.
double C_of_mu(double p, double mu);

/// (lambda||A+mu^2 B||^p + (1-lambda)||A-mu^-2 B||^p)^(2/p) - ||A||^2 - C(p-1)||B||^2.
double asym_convexity_check(const Matrix& a, const Matrix& b, double p, double mu);

/// ||X||_q^2 + (q-1)/(mu^4 C)||Y||_q^2
///   - (lambda||X+Y||^q + (1-lambda)||X - lambda/(1-lambda) Y||^q)^(2/q),
/// with C = C_of_mu(q/(q-1), mu), q >= 2.
double dual_convexity_check(const Matrix& x, const Matrix& y, double q, double mu);

/// Smallest margin of each inequality for one pair over the given grids
/// (p for BCL and the asymmetric form, q for the dual form). Each singular
/// value decomposition is shared across exponents. Empty grids leave +inf.
struct ConvexityMargins {
  double bcl = std::numeric_limits<double>::infinity();
  double asymmetric = std::numeric_limits<double>::infinity();
  double dual = std::numeric_limits<double>::infinity();
};
ConvexityMargins convexity_margins(const Matrix& a, const Matrix& b, const std::vector<double>& ps,
                                   const std::vector<double>& mus, const std::vector<double>& qs);

// ---------------------------------------------------------------- time bounds

/// e^-2t threshold for a single index:
/// min{(mu^4+1)^(1-2/p)(p-1), sqrt(C(mu)(p-1))}, 1 < p < 2.
double sufficient_time(double p, double mu);
/// Minimum of the per-index thresholds.
double sufficient_time(double p, const ModelParams& params);
/// C_univ alpha^(4 - 8/p) (p-1).
double theorem_bound(double p, double alpha, double c_univ);
/// t with e^-2t = threshold.
double time_for_threshold(double threshold);

struct NecessaryTime {
  double exact = 0.0;          ///< (mu^(4/n)-1)/(mu^4-1), 1/n at mu = 1
  double displayed = 0.0;  ///< (1/n) mu^(-4+4/n)
  bool differs = false;        ///< relative gap above 1e-12
};
/// Dual exponent p' = 2 n_half.
NecessaryTime necessary_time_exact(int n_half, double mu);

// ---------------------------------------------------------------- ratios

enum class Direction { Forward, Dual };

std::string to_string(Direction direction);
Direction direction_from_string(const std::string& text);

/// Dual exponent p/(p-1).
inline double conjugate_exponent(double p) { return p / (p - 1.0); }

/// ||P_t(X) D^(1/2)||_2 / ||X D^(1/p)||_p.
double contraction_ratio(const BabyFock& model, const DensityFactorization& density, const Matrix& x, double t,
                         double p);
/// ||P_t(X) D^(1/p')||_p' / ||X D^(1/2)||_2.
double dual_contraction_ratio(const BabyFock& model, const DensityFactorization& density, const Matrix& x, double t,
                              double p_dual);

/// Ratio evaluator on the irreducible block, for searches.
class RatioEvaluator {
 public:
  /// `p` is in (1, 2); the dual direction uses p' = p/(p-1).
  RatioEvaluator(const BabyFock& model, const IrreducibleBlock& block, double t, double p, Direction direction);

  std::size_t parameter_count() const { return weights_.size(); }
  double ratio(const MonomialExpansion& x) const;

  /// Maps a witness to one for the other direction whose ratio is at least as
  /// large (Hoelder pairing). Forward -> dual is X -> P_t(X); dual -> forward
  /// takes the norming element of P_t(Y) D^(1/p') in L^p.
  MonomialExpansion adjoint_witness(const MonomialExpansion& x) const;

  Direction direction() const { return direction_; }

  /// Internal state for incremental coordinate updates.
  struct State {
    std::vector<Complex> c;
    Matrix image;
    double quadratic = 0.0;
  };
  State make_state(const MonomialExpansion& x) const;
  double evaluate(const State& s) const;
  /// Ratio after c_k += delta, without modifying the state.
  double try_update(const State& s, std::size_t k, Complex delta) const;
  void apply_update(State& s, std::size_t k, Complex delta) const;
  void normalize(State& s) const;
  MonomialExpansion to_expansion(const State& s) const;

 private:
  MonomialExpansion from_block(const Matrix& block) const;

  const BabyFock* model_;
  const IrreducibleBlock* block_;
  double t_;
  double p_;
  double p_dual_;
  Direction direction_;
  double exponent_;                  ///< Schatten exponent of the block side
  std::vector<double> weights_;      ///< |gns_value|^2, times e^-2t deg when forward
  std::vector<Matrix> images_;       ///< block monomials times the density power
  Matrix density_root_p_;            ///< d^(1/p)
  Matrix density_root_p_dual_inv_;   ///< d^(-1/p)
  Matrix density_root_dual_;         ///< d^(1/p')
  Eigen::PartialPivLU<Matrix> basis_lu_;
};

struct ViolationWitness {
  MonomialExpansion element;
  double ratio = 0.0;
  double t = 0.0;
  double p = 0.0;
  Direction direction = Direction::Forward;
  int restart = -1;  ///< restart index that produced it
};

struct SearchOptions {
  int restarts = 64;
  std::uint64_t seed = 0;
  int iterations = 200;
  double initial_step = 0.1;
  /// Alternating adjoint steps applied to the best witness (never lowers it).
  int polish_steps = 20;
};

/// Multistart randomized coordinate ascent over the complex monomial
/// coefficients. Restart 0 is X = 1, the next 2n restarts are 1 + eps gamma_i
/// with eps in {1e-2, 1e-1}, and the rest are random. Deterministic for a
/// fixed (seed, restarts) regardless of thread count.
ViolationWitness violation_search(const BabyFock& model, const DensityFactorization& density, double t, double p,
                                  Direction direction, const SearchOptions& options);

/// Ambient recomputation of a witness ratio.
double witness_ratio(const BabyFock& model, const DensityFactorization& density, const ViolationWitness& witness);

// ---------------------------------------------------------------- structural lemmas

struct DecompositionReport {
  Comparison identity;  ///< ||(a + y_n d) D^(1/p)||^2 vs the two-level mixture
  double margin = 0.0;  ///< mixture - ||a||^2 - C(p-1)||d||^2
};

/// a, d are expansions over the first n-1 indices of `sub`.
DecompositionReport decomposition_identity_check(const Subalgebra& sub, const DensityFactorization& density,
                                                 const MonomialExpansion& a, const MonomialExpansion& d, double p);

struct GammaBoundReport {
  double gamma_margin = 0.0;       ///< ||gamma_n b D^(1/p)|| - lambda^(1/p) sqrt(mu^2+mu^-2) ||b D'^(1/p)||
  double gamma_star_margin = 0.0;  ///< same with gamma_n^* c and (1-lambda)
  double scale = 1.0;
};
GammaBoundReport gamma_lower_bound_check(const Subalgebra& sub, const DensityFactorization& density,
                                         const MonomialExpansion& b, const MonomialExpansion& c, double p);

/// ||(gamma_n b + gamma_n^* c) D^(1/p)||^p vs ||gamma_n b D^(1/p)||^p + ||gamma_n^* c D^(1/p)||^p.
Comparison disjoint_support_check(const Subalgebra& sub, const DensityFactorization& density,
                                  const MonomialExpansion& b, const MonomialExpansion& c, double p);

}  // namespace qhyper
