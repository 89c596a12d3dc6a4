#include "qhyper/semigroup.hpp"

#include <algorithm>
#include <cmath>

#include "qhyper/linalg.hpp"
#include "qhyper/rng.hpp"

namespace qhyper {

namespace {

int letter_degree(Letter l) {
  switch (l) {
    case Letter::Unit: return 0;
    case Letter::Gen:
    case Letter::GenStar: return 1;
    case Letter::Y: return 2;
  }
  return 0;
}

void require_time(double t) { require(t >= 0.0 && std::isfinite(t), "semigroup time must be finite and >= 0"); }

}  // namespace

int number_degree(const Monomial& w) {
  int degree = 0;
  for (Letter l : w.letters) degree += letter_degree(l);
  return degree;
}

int index_degree(const Monomial& w, int index) {
  require(index >= 1 && index <= w.n(), "index out of range");
  return letter_degree(w.at(index));
}

MonomialExpansion apply_OU(const MonomialExpansion& x, double t) {
  require_time(t);
  MonomialExpansion result = x;
  for (std::size_t code = 0; code < x.size(); ++code)
    result.at_code(code) *= std::exp(-t * number_degree(Monomial::from_code(code, x.n())));
  return result;
}

MonomialExpansion apply_Ti(const MonomialExpansion& x, int index, double t) {
  require_time(t);
  require(index >= 1 && index <= x.n(), "index out of range");
  MonomialExpansion result = x;
  for (std::size_t code = 0; code < x.size(); ++code)
    result.at_code(code) *= std::exp(-t * index_degree(Monomial::from_code(code, x.n()), index));
  return result;
}

Matrix apply_OU(const BabyFock& model, const Matrix& x, double t) {
  return model.assemble(apply_OU(model.monomial_expand(x), t));
}

Matrix apply_Ti(const BabyFock& model, const Matrix& x, int index, double t) {
  return model.assemble(apply_Ti(model.monomial_expand(x), index, t));
}

Vector apply_OU_gns(const BabyFock& model, const Vector& xi, double t) {
  require_time(t);
  require(static_cast<std::size_t>(xi.size()) == model.dim(), "GNS vector has wrong length");
  Vector result = xi;
  for (Eigen::Index a = 0; a < xi.size(); ++a)
    result(a) *= std::exp(-t * IndexSet{static_cast<std::uint32_t>(a)}.size());
  return result;
}

Vector apply_Ti_gns(const BabyFock& model, const Vector& xi, int index, double t) {
  require_time(t);
  require(index >= 1 && index <= model.n(), "index out of range");
  require(static_cast<std::size_t>(xi.size()) == model.dim(), "GNS vector has wrong length");
  const int n = model.n();
  Vector result = xi;
  for (Eigen::Index a = 0; a < xi.size(); ++a) {
    const IndexSet set{static_cast<std::uint32_t>(a)};
    const int count = static_cast<int>(set.contains(index, n)) + static_cast<int>(set.contains(-index, n));
    result(a) *= std::exp(-t * count);
  }
  return result;
}

Matrix apply_OU_via_gns(const BabyFock& model, const Matrix& x, double t) {
  return model.assemble(model.expand_gns(apply_OU_gns(model, model.gns_embed(x), t)));
}

// ---------------------------------------------------------------- Choi matrix

Matrix choi_matrix(double t, double mu) {
  require_time(t);
  require(mu >= 1.0 && std::isfinite(mu), "mu must be finite and >= 1");
  const double lambda = 1.0 / (1.0 + std::pow(mu, 4));
  const double s = std::exp(-2.0 * t);
  Matrix c = Matrix::Zero(4, 4);
  c(0, 0) = lambda * (1.0 + s * std::pow(mu, 4));
  c(1, 1) = lambda * (1.0 - s);
  c(2, 2) = (1.0 - lambda) * (1.0 - s);
  c(3, 3) = (1.0 - lambda) * (1.0 + s * std::pow(mu, -4));
  c(0, 3) = std::exp(-t);
  c(3, 0) = std::exp(-t);
  return c;
}

double choi_min_eigenvalue(double t, double mu) { return min_eigenvalue(choi_matrix(t, mu)); }

bool is_cp(double t, double mu, double tolerance) { return choi_min_eigenvalue(t, mu) >= -tolerance; }

double choi_identity_residual(double t, double mu) {
  const double lambda = 1.0 / (1.0 + std::pow(mu, 4));
  const double s = std::exp(-2.0 * t);
  const double lhs = lambda * (1.0 - lambda) * (1.0 + s * std::pow(mu, 4)) * (1.0 + s * std::pow(mu, -4)) - s;
  const double rhs = lambda * (1.0 - lambda) * (1.0 - s) * (1.0 - s);
  return lhs - rhs;
}

// ---------------------------------------------------------------- randomized CP

CpReport cp_randomized_check(const BabyFock& model, int index, double t, int samples, std::uint64_t seed,
                             int max_block) {
  require_time(t);
  require(index >= 1 && index <= model.n(), "index out of range");
  require(samples >= 1 && max_block >= 1, "need at least one sample and block size");
  const Eigen::Index dim = static_cast<Eigen::Index>(model.dim());
  CpReport report;
  report.samples = samples;
  for (int s = 0; s < samples; ++s) {
    Rng rng(seed, static_cast<std::uint64_t>(s));
    const int k = 1 + s % max_block;
    const Eigen::Index size = k * dim;
    // A single block row keeps Z rank deficient, so positivity is tight.
    Matrix r(dim, size);
    for (int bj = 0; bj < k; ++bj) {
      MonomialExpansion e(model.n());
      for (auto& c : e.coefficients()) c = rng.complex_normal();
      r.block(0, bj * dim, dim, dim) = model.assemble(e);
    }
    const Matrix z = r.adjoint() * r;
    Matrix image(size, size);
    for (int bi = 0; bi < k; ++bi)
      for (int bj = 0; bj < k; ++bj) {
        const Matrix block = z.block(bi * dim, bj * dim, dim, dim);
        const Matrix mapped = apply_Ti(model, block, index, t);
        image.block(bi * dim, bj * dim, dim, dim) = mapped;
        if (bi == bj) report.state_residual = std::max(report.state_residual, std::abs(mapped(0, 0) - block(0, 0)) /
                                                                                   std::max(1.0, std::abs(block(0, 0))));
      }
    const RealVector spectrum = eigenvalues_hermitian(0.5 * (image + image.adjoint()));
    const double scale = eigenvalues_hermitian(z).maxCoeff();
    report.min_eigenvalue = std::min(report.min_eigenvalue, spectrum(0) / scale);
  }
  return report;
}

// ---------------------------------------------------------------- L2 decomposition

Comparison pythagoras_check(const Subalgebra& sub, const MonomialExpansion& a, const MonomialExpansion& b,
                            const MonomialExpansion& c, const MonomialExpansion& d, double t) {
  require_time(t);
  const BabyFock& model = sub.model();
  const int n = model.n();
  const double mu = model.params().mu_at(n);
  const Matrix x = sub.lift(a) + model.gamma(n) * sub.lift(b) + model.gamma_star(n) * sub.lift(c) +
                   model.y(n) * sub.lift(d);
  Comparison report;
  const double lhs = apply_OU_gns(model, model.gns_embed(x), t).norm();
  report.lhs = lhs * lhs;
  auto sq = [&](const MonomialExpansion& e) {
    const double v = sub.l2_norm(apply_OU(e, t));
    return v * v;
  };
  const double s = std::exp(-2.0 * t);
  report.rhs = sq(a) + s * sq(b) / (mu * mu) + s * mu * mu * sq(c) + s * s * sq(d);
  return report;
}

}  // namespace qhyper
