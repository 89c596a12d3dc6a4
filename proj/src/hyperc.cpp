#include "qhyper/hyperc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "qhyper/linalg.hpp"
#include "qhyper/parallel.hpp"
#include "qhyper/rng.hpp"

namespace qhyper {

namespace {

void require_exponent(double p) { require(p > 1.0 && p <= 2.0, "exponent p must lie in (1, 2]"); }

double lambda_of(double mu) { return 1.0 / (1.0 + std::pow(mu, 4)); }

}  // namespace

// ---------------------------------------------------------------- convexity

namespace {

// Margins from precomputed singular values: s0 for A, s1 for B, plus and
// minus for the two mixed combinations.
double bcl_margin(const RealVector& s0, const RealVector& s1, const RealVector& plus, const RealVector& minus,
                  double p) {
  const double mixed = 0.5 * (power_sum(plus, p) + power_sum(minus, p));
  const double na = std::pow(power_sum(s0, p), 2.0 / p);
  const double nb = std::pow(power_sum(s1, p), 2.0 / p);
  return std::pow(mixed, 2.0 / p) - na - (p - 1.0) * nb;
}

double asym_margin(const RealVector& s0, const RealVector& s1, const RealVector& plus, const RealVector& minus,
                   double p, double mu) {
  const double lambda = lambda_of(mu);
  const double mixed = lambda * power_sum(plus, p) + (1.0 - lambda) * power_sum(minus, p);
  const double na = std::pow(power_sum(s0, p), 2.0 / p);
  const double nb = std::pow(power_sum(s1, p), 2.0 / p);
  return std::pow(mixed, 2.0 / p) - na - C_of_mu(p, mu) * (p - 1.0) * nb;
}

double dual_margin(const RealVector& s0, const RealVector& s1, const RealVector& plus, const RealVector& minus,
                   double q, double mu) {
  const double lambda = lambda_of(mu);
  const double c = C_of_mu(q / (q - 1.0), mu);
  const double mixed = lambda * power_sum(plus, q) + (1.0 - lambda) * power_sum(minus, q);
  const double nx = std::pow(power_sum(s0, q), 2.0 / q);
  const double ny = std::pow(power_sum(s1, q), 2.0 / q);
  return nx + (q - 1.0) / (std::pow(mu, 4) * c) * ny - std::pow(mixed, 2.0 / q);
}

void require_dual_exponent(double q) { require(q >= 2.0 && std::isfinite(q), "dual exponent q must be >= 2"); }

void require_same_shape(const Matrix& a, const Matrix& b) {
  require(a.rows() == b.rows() && a.cols() == b.cols(), "matrices must have the same shape");
}

}  // namespace

double bcl_check(const Matrix& a, const Matrix& b, double p) {
  require_exponent(p);
  require_same_shape(a, b);
  return bcl_margin(singular_values(a), singular_values(b), singular_values(a + b), singular_values(a - b), p);
}

double C_of_mu(double p, double mu) {
  require_exponent(p);
  require(mu >= 1.0, "mu must be >= 1");
  if (p <= 4.0 / 3.0) return std::pow(mu, -4.0) / 3.0;
  return std::pow(mu, 8.0 - 16.0 / p) / 3.0;
}

double asym_convexity_check(const Matrix& a, const Matrix& b, double p, double mu) {
  require_exponent(p);
  require_same_shape(a, b);
  const double mu2 = mu * mu;
  return asym_margin(singular_values(a), singular_values(b), singular_values(a + mu2 * b),
                     singular_values(a - b / mu2), p, mu);
}

double dual_convexity_check(const Matrix& x, const Matrix& y, double q, double mu) {
  require_dual_exponent(q);
  require_same_shape(x, y);
  const double lambda = lambda_of(mu);
  return dual_margin(singular_values(x), singular_values(y), singular_values(x + y),
                     singular_values(x - lambda / (1.0 - lambda) * y), q, mu);
}

ConvexityMargins convexity_margins(const Matrix& a, const Matrix& b, const std::vector<double>& ps,
                                   const std::vector<double>& mus, const std::vector<double>& qs) {
  require_same_shape(a, b);
  for (double p : ps) require_exponent(p);
  for (double q : qs) require_dual_exponent(q);
  for (double mu : mus) require(mu >= 1.0, "mu must be >= 1");
  ConvexityMargins out;
  const RealVector sa = singular_values(a);
  const RealVector sb = singular_values(b);
  const RealVector sum = singular_values(a + b);
  if (!ps.empty()) {
    const RealVector minus = singular_values(a - b);
    for (double p : ps) out.bcl = std::min(out.bcl, bcl_margin(sa, sb, sum, minus, p));
  }
  for (double mu : mus) {
    const double mu2 = mu * mu;
    if (!ps.empty()) {
      const RealVector plus = singular_values(a + mu2 * b);
      const RealVector minus = singular_values(a - b / mu2);
      for (double p : ps) out.asymmetric = std::min(out.asymmetric, asym_margin(sa, sb, plus, minus, p, mu));
    }
    if (!qs.empty()) {
      const double lambda = lambda_of(mu);
      const RealVector minus = singular_values(a - lambda / (1.0 - lambda) * b);
      for (double q : qs) out.dual = std::min(out.dual, dual_margin(sa, sb, sum, minus, q, mu));
    }
  }
  return out;
}

// ---------------------------------------------------------------- time bounds

double sufficient_time(double p, double mu) {
  require(p > 1.0 && p < 2.0, "sufficient time needs 1 < p < 2");
  const double first = std::pow(std::pow(mu, 4) + 1.0, 1.0 - 2.0 / p) * (p - 1.0);
  const double second = std::sqrt(C_of_mu(p, mu) * (p - 1.0));
  return std::min(first, second);
}

double sufficient_time(double p, const ModelParams& params) {
  double result = std::numeric_limits<double>::infinity();
  for (double mu : params.mu) result = std::min(result, sufficient_time(p, mu));
  return result;
}

double theorem_bound(double p, double alpha, double c_univ) {
  require(p > 1.0 && p < 2.0, "theorem bound needs 1 < p < 2");
  require(alpha >= 1.0 && c_univ > 0.0, "alpha must be >= 1 and the constant positive");
  return c_univ * std::pow(alpha, 4.0 - 8.0 / p) * (p - 1.0);
}

double time_for_threshold(double threshold) {
  require(threshold > 0.0, "threshold must be positive");
  return -0.5 * std::log(threshold);
}

NecessaryTime necessary_time_exact(int n_half, double mu) {
  require(n_half >= 2, "necessary time needs n >= 2");
  require(mu >= 1.0 && std::isfinite(mu), "mu must be finite and >= 1");
  const double n = n_half;
  NecessaryTime result;
  // expm1 keeps the mu -> 1 limit 1/n accurate.
  const double log_mu4 = 4.0 * std::log(mu);
  result.exact = log_mu4 == 0.0 ? 1.0 / n : std::expm1(log_mu4 / n) / std::expm1(log_mu4);
  result.displayed = std::pow(mu, -4.0 + 4.0 / n) / n;
  result.differs = std::abs(result.exact - result.displayed) > 1e-12 * result.exact;
  return result;
}

// ---------------------------------------------------------------- ratios

std::string to_string(Direction direction) { return direction == Direction::Forward ? "forward" : "dual"; }

Direction direction_from_string(const std::string& text) {
  if (text == "forward" || text == "lp-l2") return Direction::Forward;
  if (text == "dual" || text == "l2-lp") return Direction::Dual;
  throw InvalidArgument("unknown direction '" + text + "' (expected forward or dual)");
}

double contraction_ratio(const BabyFock& model, const DensityFactorization& density, const Matrix& x, double t,
                         double p) {
  require(p >= 1.0, "exponent must be >= 1");
  require(x.norm() > 0.0, "contraction ratio of the zero element");
  const double numerator = apply_OU_gns(model, model.gns_embed(x), t).norm();
  return numerator / haagerup_norm(density, x, p);
}

double dual_contraction_ratio(const BabyFock& model, const DensityFactorization& density, const Matrix& x, double t,
                              double p_dual) {
  require(p_dual >= 2.0, "dual exponent must be >= 2");
  require(x.norm() > 0.0, "contraction ratio of the zero element");
  const double denominator = l2_vacuum_norm(x);
  require(denominator > 0.0, "element vanishes on the vacuum");
  return haagerup_norm(density, apply_OU(model, x, t), p_dual) / denominator;
}

RatioEvaluator::RatioEvaluator(const BabyFock& model, const IrreducibleBlock& block, double t, double p,
                               Direction direction)
    : model_(&model), block_(&block), t_(t), p_(p), p_dual_(conjugate_exponent(p)), direction_(direction) {
  require(p > 1.0 && p < 2.0, "search exponent must lie in (1, 2)");
  require(t >= 0.0, "time must be >= 0");
  require(block.n() == model.n(), "block does not belong to the model");
  const int n = model.n();
  density_root_p_ = block.density_power(1.0 / p_);
  density_root_p_dual_inv_ = block.density_power(-1.0 / p_);
  density_root_dual_ = block.density_power(1.0 / p_dual_);
  exponent_ = direction == Direction::Forward ? p_ : p_dual_;

  const std::size_t count = model.monomial_count();
  weights_.resize(count);
  images_.resize(count);
  const Eigen::Index b = block.block_dim();
  Matrix basis(b * b, static_cast<Eigen::Index>(count));
  for (std::size_t code = 0; code < count; ++code) {
    const double decay = std::exp(-t * number_degree(Monomial::from_code(code, n)));
    const double v = std::norm(model.gns_value(code));
    const Matrix& m = block.monomial(code);
    basis.col(static_cast<Eigen::Index>(code)) = m.reshaped();
    if (direction == Direction::Forward) {
      weights_[code] = decay * decay * v;
      images_[code] = m * density_root_p_;
    } else {
      weights_[code] = v;
      images_[code] = decay * m * density_root_dual_;
    }
  }
  basis_lu_.compute(basis);
}

RatioEvaluator::State RatioEvaluator::make_state(const MonomialExpansion& x) const {
  require(x.size() == weights_.size(), "expansion size does not match the evaluator");
  State s;
  s.c = x.coefficients();
  const Eigen::Index b = block_->block_dim();
  s.image = Matrix::Zero(b, b);
  for (std::size_t k = 0; k < s.c.size(); ++k) {
    if (s.c[k] == Complex(0.0)) continue;
    s.image += s.c[k] * images_[k];
    s.quadratic += std::norm(s.c[k]) * weights_[k];
  }
  return s;
}

double RatioEvaluator::evaluate(const State& s) const {
  const double block_norm = block_->schatten_ambient(s.image, exponent_);
  const double l2 = std::sqrt(std::max(s.quadratic, 0.0));
  if (direction_ == Direction::Forward) return block_norm > 0.0 ? l2 / block_norm : 0.0;
  return l2 > 0.0 ? block_norm / l2 : 0.0;
}

double RatioEvaluator::try_update(const State& s, std::size_t k, Complex delta) const {
  State trial;
  trial.image = s.image + delta * images_[k];
  trial.quadratic = s.quadratic + (std::norm(s.c[k] + delta) - std::norm(s.c[k])) * weights_[k];
  return evaluate(trial);
}

void RatioEvaluator::apply_update(State& s, std::size_t k, Complex delta) const {
  s.image += delta * images_[k];
  s.quadratic += (std::norm(s.c[k] + delta) - std::norm(s.c[k])) * weights_[k];
  s.c[k] += delta;
}

void RatioEvaluator::normalize(State& s) const {
  double sum = 0.0;
  for (const Complex& c : s.c) sum += std::norm(c);
  if (sum == 0.0) return;
  const double scale = 1.0 / std::sqrt(sum);
  for (Complex& c : s.c) c *= scale;
  s.image *= scale;
  // Recompute rather than rescale to stop drift in the running sum.
  s.quadratic = 0.0;
  for (std::size_t k = 0; k < s.c.size(); ++k) s.quadratic += std::norm(s.c[k]) * weights_[k];
}

MonomialExpansion RatioEvaluator::to_expansion(const State& s) const { return MonomialExpansion(model_->n(), s.c); }

double RatioEvaluator::ratio(const MonomialExpansion& x) const { return evaluate(make_state(x)); }

MonomialExpansion RatioEvaluator::from_block(const Matrix& block) const {
  const Vector c = basis_lu_.solve(Vector(block.reshaped()));
  return MonomialExpansion(model_->n(), std::vector<Complex>(c.data(), c.data() + c.size()));
}

MonomialExpansion RatioEvaluator::adjoint_witness(const MonomialExpansion& x) const {
  if (direction_ == Direction::Forward) return apply_OU(x, t_);
  // Norming element Z = U S^(p'-1) V^* of W = P_t(Y) d^(1/p'), then X = Z d^(-1/p).
  const Matrix w = block_->compress(apply_OU(x, t_)) * density_root_dual_;
  Eigen::JacobiSVD<Matrix> svd(w, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const RealVector s = svd.singularValues().array().pow(p_dual_ - 1.0);
  const Matrix z = svd.matrixU() * s.cast<Complex>().asDiagonal() * svd.matrixV().adjoint();
  return from_block(z * density_root_p_dual_inv_);
}

namespace {

struct RestartResult {
  MonomialExpansion element;
  double ratio = -1.0;
};

MonomialExpansion start_point(int n, std::size_t count, int restart, Rng& rng) {
  MonomialExpansion x(n);
  const Monomial unit = Monomial::unit(n);
  if (restart == 0) {
    x[unit] = 1.0;
    return x;
  }
  if (restart <= 2 * n) {
    const int index = (restart - 1) / 2 + 1;
    const double eps = (restart - 1) % 2 == 0 ? 1e-2 : 1e-1;
    x[unit] = 1.0;
    x[Monomial::single(n, index, Letter::Gen)] = eps;
    return x;
  }
  if (rng.uniform() < 0.5) {
    for (std::size_t k = 0; k < count; ++k) x.at_code(k) = rng.complex_normal();
  } else {
    for (std::size_t k = 0; k < count; ++k) x.at_code(k) = 0.3 * rng.complex_normal();
    x[unit] += 1.0;
  }
  return x;
}

}  // namespace

ViolationWitness violation_search(const BabyFock& model, const DensityFactorization& density, double t, double p,
                                  Direction direction, const SearchOptions& options) {
  require(options.restarts >= 1, "search needs at least one restart");
  require(options.iterations >= 0 && options.initial_step > 0.0, "invalid ascent schedule");
  const IrreducibleBlock block(model, density);
  const RatioEvaluator evaluator(model, block, t, p, direction);
  const int n = model.n();
  const std::size_t count = model.monomial_count();
  const std::size_t parameters = 2 * count;

  std::vector<RestartResult> results(static_cast<std::size_t>(options.restarts));
  parallel_for(results.size(), [&](std::size_t r) {
    Rng rng(derive_seed(options.seed, r));
    MonomialExpansion start = start_point(n, count, static_cast<int>(r), rng);
    RatioEvaluator::State state = evaluator.make_state(start);
    evaluator.normalize(state);
    double current = evaluator.evaluate(state);
    std::vector<double> steps(parameters, options.initial_step);
    for (int it = 0; it < options.iterations; ++it) {
      const auto coordinate = static_cast<std::size_t>(rng.integer(0, static_cast<int>(parameters) - 1));
      const std::size_t k = coordinate / 2;
      const Complex unit_delta = coordinate % 2 == 0 ? Complex(1.0, 0.0) : Complex(0.0, 1.0);
      const Complex up = steps[coordinate] * unit_delta;
      const double plus = evaluator.try_update(state, k, up);
      const double minus = evaluator.try_update(state, k, -up);
      if (plus > current || minus > current) {
        evaluator.apply_update(state, k, plus >= minus ? up : -up);
        evaluator.normalize(state);
        current = evaluator.evaluate(state);
      } else {
        steps[coordinate] *= 0.5;
      }
    }
    results[r] = {evaluator.to_expansion(state), current};
  });

  std::size_t best = 0;
  for (std::size_t r = 1; r < results.size(); ++r)
    if (results[r].ratio > results[best].ratio) best = r;

  ViolationWitness witness;
  witness.element = results[best].element;
  witness.ratio = results[best].ratio;
  witness.t = t;
  witness.p = p;
  witness.direction = direction;
  witness.restart = static_cast<int>(best);

  // Alternating adjoint steps: ratio(adjoint(adjoint(x))) >= ratio(x).
  const Direction other = direction == Direction::Forward ? Direction::Dual : Direction::Forward;
  const RatioEvaluator partner(model, block, t, p, other);
  for (int step = 0; step < options.polish_steps; ++step) {
    MonomialExpansion candidate = partner.adjoint_witness(evaluator.adjoint_witness(witness.element));
    const double norm = candidate.norm();
    if (!(norm > 0.0) || !std::isfinite(norm)) break;
    candidate *= Complex(1.0 / norm);
    const double value = evaluator.ratio(candidate);
    if (!(value > witness.ratio * (1.0 + 1e-15))) break;
    witness.element = std::move(candidate);
    witness.ratio = value;
  }
  return witness;
}

double witness_ratio(const BabyFock& model, const DensityFactorization& density, const ViolationWitness& witness) {
  const Matrix x = model.assemble(witness.element);
  if (witness.direction == Direction::Forward) return contraction_ratio(model, density, x, witness.t, witness.p);
  return dual_contraction_ratio(model, density, x, witness.t, conjugate_exponent(witness.p));
}

// ---------------------------------------------------------------- structural lemmas

DecompositionReport decomposition_identity_check(const Subalgebra& sub, const DensityFactorization& density,
                                                 const MonomialExpansion& a, const MonomialExpansion& d, double p) {
  require_exponent(p);
  const BabyFock& model = sub.model();
  const int n = model.n();
  const double mu = model.params().mu_at(n);
  const double lambda = lambda_of(mu);
  const double mu2 = mu * mu;
  const Matrix x = sub.lift(a) + model.y(n) * sub.lift(d);
  const double full = haagerup_norm(density, x, p);

  const double plus = sub.haagerup_norm(a + Complex(mu2) * d, p);
  const double minus = sub.haagerup_norm(a - Complex(1.0 / mu2) * d, p);
  const double mixture = std::pow(lambda * std::pow(plus, p) + (1.0 - lambda) * std::pow(minus, p), 2.0 / p);
  const double na = sub.haagerup_norm(a, p);
  const double nd = sub.haagerup_norm(d, p);

  DecompositionReport report;
  report.identity = {full * full, mixture};
  report.margin = mixture - na * na - C_of_mu(p, mu) * (p - 1.0) * nd * nd;
  return report;
}

GammaBoundReport gamma_lower_bound_check(const Subalgebra& sub, const DensityFactorization& density,
                                         const MonomialExpansion& b, const MonomialExpansion& c, double p) {
  require_exponent(p);
  const BabyFock& model = sub.model();
  const int n = model.n();
  const double mu = model.params().mu_at(n);
  const double lambda = lambda_of(mu);
  const double amplitude = std::sqrt(mu * mu + 1.0 / (mu * mu));
  const double gb = haagerup_norm(density, model.gamma(n) * sub.lift(b), p);
  const double gc = haagerup_norm(density, model.gamma_star(n) * sub.lift(c), p);
  const double lower_b = std::pow(lambda, 1.0 / p) * amplitude * sub.haagerup_norm(b, p);
  const double lower_c = std::pow(1.0 - lambda, 1.0 / p) * amplitude * sub.haagerup_norm(c, p);
  GammaBoundReport report;
  report.gamma_margin = gb - lower_b;
  report.gamma_star_margin = gc - lower_c;
  report.scale = std::max({1.0, gb, gc});
  return report;
}

Comparison disjoint_support_check(const Subalgebra& sub, const DensityFactorization& density,
                                  const MonomialExpansion& b, const MonomialExpansion& c, double p) {
  require(p >= 1.0, "exponent must be >= 1");
  require(b.norm() > 0.0 || c.norm() > 0.0, "disjoint support check needs a nonzero element");
  const BabyFock& model = sub.model();
  const int n = model.n();
  const Matrix gb = model.gamma(n) * sub.lift(b);
  const Matrix gc = model.gamma_star(n) * sub.lift(c);
  const double whole = std::pow(haagerup_norm(density, gb + gc, p), p);
  const double parts = std::pow(haagerup_norm(density, gb, p), p) + std::pow(haagerup_norm(density, gc, p), p);
  return {whole, parts};
}

}  // namespace qhyper
