#include "qhyper/clt.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

#include "qhyper/babyfock.hpp"
#include "qhyper/parallel.hpp"
#include "qhyper/qfock.hpp"
#include "qhyper/rng.hpp"

namespace qhyper {

namespace {

constexpr int kMaxCltWord = 6;
constexpr int kMaxM = 64;
constexpr int kSlotBits = 10;
constexpr int kOffset = 512;
constexpr int kSlots = 6;

std::uint64_t pair_key(int i, int j) { return static_cast<std::uint64_t>(i) * 1024U + static_cast<std::uint64_t>(j); }

// sign(P, A) = prod over Q in A with Q < P of epsilon(P, Q).
int ordering_sign(int p, const std::vector<int>& set, const BigSignSample& sample) {
  int sign = 1;
  for (int q : set) {
    if (q >= p) break;
    sign *= sample(p, q);
  }
  return sign;
}

// beta^*_P (create) or beta_P (annihilate) on x_A, accumulated with weight c.
void ladder(int p, bool create, const std::vector<int>& set, Complex c, const BigSignSample& sample,
            SparseVacuumState& out) {
  const auto it = std::lower_bound(set.begin(), set.end(), p);
  const bool present = it != set.end() && *it == p;
  if (create == present) return;
  const int sign = ordering_sign(p, set, sample);
  std::vector<int> next = set;
  if (create)
    next.insert(next.begin() + (it - set.begin()), p);
  else
    next.erase(next.begin() + (it - set.begin()));
  out.add(SparseVacuumState::pack(next), static_cast<double>(sign) * c);
}

void require_sizes(int n, int m) {
  require(n >= 1 && m >= 1, "n and m must be positive");
  require(m <= kMaxM, "m is capped at 64");
  require(n * m < kOffset, "too many pair indices");
}

}  // namespace

int flat_pair_index(int i, int j, int m) { return (i - 1) * m + j; }

BigSignSample::BigSignSample(double q, int n, int m, std::uint64_t seed) : q_(q), n_(n), m_(m), seed_(seed) {
  require(q >= -1.0 && q < 1.0, "q must lie in [-1, 1)");
  require_sizes(n, m);
  const int size = n * m;
  table_.assign(static_cast<std::size_t>(size) * static_cast<std::size_t>(size), 1);
  const double threshold = (1.0 - q) / 2.0;
  for (int i1 = 1; i1 <= n; ++i1)
    for (int j1 = 1; j1 <= m; ++j1)
      for (int i2 = 1; i2 <= n; ++i2)
        for (int j2 = 1; j2 <= m; ++j2) {
          const int a = flat_pair_index(i1, j1, m);
          const int b = flat_pair_index(i2, j2, m);
          if (a >= b) continue;
          const double u = unit_interval(derive_seed(seed, pair_key(i1, j1), pair_key(i2, j2)));
          const std::int8_t s = u < threshold ? -1 : 1;
          table_[static_cast<std::size_t>((a - 1) * size + (b - 1))] = s;
          table_[static_cast<std::size_t>((b - 1) * size + (a - 1))] = s;
        }
}

int BigSignSample::pair(int a, int b) const {
  require(a >= 1 && b >= 1 && a <= size() && b <= size() && a != b, "pair index out of range");
  return table_[static_cast<std::size_t>((a - 1) * size() + (b - 1))];
}

int BigSignSample::operator()(int a, int b) const {
  const int x = std::abs(a);
  const int y = std::abs(b);
  if (x == y) return -1;
  return table_[static_cast<std::size_t>((x - 1) * size() + (y - 1))];
}

BigSignSample sample_signs(double q, int n, int m, std::uint64_t seed) { return BigSignSample(q, n, m, seed); }

SparseVacuumState SparseVacuumState::vacuum() {
  SparseVacuumState s;
  s.entries_[0] = 1.0;
  return s;
}

SparseVacuumState::Key SparseVacuumState::pack(const std::vector<int>& sorted_set) {
  require(sorted_set.size() <= static_cast<std::size_t>(kSlots), "sparse state sets are capped at six elements");
  Key key = 0;
  for (std::size_t s = 0; s < sorted_set.size(); ++s) {
    const int f = sorted_set[s];
    require(f != 0 && std::abs(f) < kOffset, "flat index out of range");
    key |= static_cast<Key>(f + kOffset) << (kSlotBits * s);
  }
  return key;
}

std::vector<int> SparseVacuumState::unpack(Key key) {
  std::vector<int> set;
  while (key != 0) {
    set.push_back(static_cast<int>(key & ((1U << kSlotBits) - 1U)) - kOffset);
    key >>= kSlotBits;
  }
  return set;
}

Complex SparseVacuumState::coefficient(const std::vector<int>& set) const {
  const auto it = entries_.find(pack(set));
  return it == entries_.end() ? Complex(0.0) : it->second;
}

void SparseVacuumState::prune() {
  std::erase_if(entries_, [](const auto& e) { return std::abs(e.second) <= kPruneTolerance; });
}

Complex sparse_inner(const SparseVacuumState& xi, const SparseVacuumState& eta) {
  const auto& small = xi.size() <= eta.size() ? xi.entries() : eta.entries();
  const auto& large = xi.size() <= eta.size() ? eta.entries() : xi.entries();
  Complex total = 0.0;
  for (const auto& [key, c] : small) {
    const auto it = large.find(key);
    if (it == large.end()) continue;
    total += &small == &xi.entries() ? std::conj(c) * it->second : std::conj(it->second) * c;
  }
  return total;
}

namespace {

void gamma_accumulate(int i, int j, bool starred, const SparseVacuumState& state, const BigSignSample& sample,
                      double mu, Complex weight, SparseVacuumState& out) {
  const int f = flat_pair_index(i, j, sample.m());
  for (const auto& [key, c] : state.entries()) {
    const std::vector<int> set = SparseVacuumState::unpack(key);
    if (!starred) {
      ladder(f, true, set, weight * c / mu, sample, out);
      ladder(-f, false, set, weight * c * mu, sample, out);
    } else {
      ladder(f, false, set, weight * c / mu, sample, out);
      ladder(-f, true, set, weight * c * mu, sample, out);
    }
  }
}

void check_mu(int i, const std::vector<double>& mu, const BigSignSample& sample) {
  require(static_cast<int>(mu.size()) == sample.n(), "need one mu per variable");
  require(i >= 1 && i <= sample.n(), "variable index out of range");
}

}  // namespace

SparseVacuumState gamma_apply_sparse(int i, int j, bool starred, const SparseVacuumState& state,
                                     const BigSignSample& sample, const std::vector<double>& mu) {
  check_mu(i, mu, sample);
  require(j >= 1 && j <= sample.m(), "copy index out of range");
  SparseVacuumState out;
  gamma_accumulate(i, j, starred, state, sample, mu[static_cast<std::size_t>(i - 1)], 1.0, out);
  out.prune();
  return out;
}

SparseVacuumState s_apply(int i, bool starred, const SparseVacuumState& state, const BigSignSample& sample,
                          const std::vector<double>& mu) {
  check_mu(i, mu, sample);
  const double weight = 1.0 / std::sqrt(static_cast<double>(sample.m()));
  SparseVacuumState out;
  for (int j = 1; j <= sample.m(); ++j)
    gamma_accumulate(i, j, starred, state, sample, mu[static_cast<std::size_t>(i - 1)], weight, out);
  out.prune();
  return out;
}

namespace {

SparseVacuumState apply_form(const LinearForm& form, const SparseVacuumState& state, const BigSignSample& sample,
                             const std::vector<double>& mu) {
  SparseVacuumState out;
  for (const auto& [c, letter] : form.terms) {
    const SparseVacuumState part = s_apply(letter.index, letter.starred, state, sample, mu);
    for (const auto& [key, v] : part.entries()) out.add(key, c * v);
  }
  out.prune();
  return out;
}

void check_polynomial(const Polynomial& p, const std::vector<double>& mu) {
  require(p.degree() <= static_cast<std::size_t>(kMaxCltWord), "CLT words are capped at length 6");
  require(p.max_index() <= static_cast<int>(mu.size()), "polynomial uses more variables than mu provides");
  for (double m : mu) require(m >= 1.0 && std::isfinite(m), "mu must be finite and >= 1");
}

}  // namespace

Complex clt_sample_moment(const Polynomial& p, const BigSignSample& sample, const std::vector<double>& mu) {
  check_polynomial(p, mu);
  Complex total = 0.0;
  for (const Term& t : p.terms()) {
    const std::size_t k = t.factors.size();
    if (k % 2 == 1) continue;  // parity grading
    const std::size_t h = k / 2;
    SparseVacuumState right = SparseVacuumState::vacuum();
    for (std::size_t f = k; f-- > h;) right = apply_form(t.factors[f], right, sample, mu);
    SparseVacuumState left = SparseVacuumState::vacuum();
    for (std::size_t f = 0; f < h; ++f) left = apply_form(t.factors[f].adjoint(), left, sample, mu);
    total += t.coef * sparse_inner(left, right);
  }
  return total;
}

Complex clt_dense_moment(const Polynomial& p, const BigSignSample& sample, const std::vector<double>& mu) {
  check_polynomial(p, mu);
  const int size = sample.size();
  require(size <= kMaxIndices, "dense CLT evaluation needs n*m <= 6");
  SignTable signs(size);
  for (int a = 1; a <= size; ++a)
    for (int b = a + 1; b <= size; ++b) signs.set_pair(a, b, sample.pair(a, b));
  std::vector<double> flat_mu;
  for (int i = 1; i <= sample.n(); ++i)
    for (int j = 1; j <= sample.m(); ++j) flat_mu.push_back(mu[static_cast<std::size_t>(i - 1)]);
  const BabyFock model(ModelParams(flat_mu, signs));
  const double weight = 1.0 / std::sqrt(static_cast<double>(sample.m()));
  std::vector<Matrix> s(static_cast<std::size_t>(sample.n()));
  for (int i = 1; i <= sample.n(); ++i) {
    Matrix sum = Matrix::Zero(static_cast<Eigen::Index>(model.dim()), static_cast<Eigen::Index>(model.dim()));
    for (int j = 1; j <= sample.m(); ++j) sum += model.dense(model.gamma(flat_pair_index(i, j, sample.m())));
    s[static_cast<std::size_t>(i - 1)] = weight * sum;
  }
  Complex total = 0.0;
  for (const Term& t : p.terms()) {
    Vector v = Vector::Unit(static_cast<Eigen::Index>(model.dim()), 0);
    for (std::size_t f = t.factors.size(); f-- > 0;) {
      Vector next = Vector::Zero(v.size());
      for (const auto& [c, letter] : t.factors[f].terms) {
        const Matrix& op = s[static_cast<std::size_t>(letter.index - 1)];
        next += c * (letter.starred ? Vector(op.adjoint() * v) : Vector(op * v));
      }
      v = std::move(next);
    }
    total += t.coef * v(0);
  }
  return total;
}

CltEstimate clt_estimate(const Polynomial& p, double q, const std::vector<double>& mu, int m, int samples,
                         std::uint64_t seed) {
  require(samples >= 1, "need at least one sample");
  check_polynomial(p, mu);
  const int n = static_cast<int>(mu.size());
  require_sizes(n, m);
  std::vector<Complex> values(static_cast<std::size_t>(samples));
  parallel_for(values.size(), [&](std::size_t k) {
    values[k] = clt_sample_moment(p, sample_signs(q, n, m, derive_seed(seed, k)), mu);
  });
  // Shifted two-pass statistics: identical samples give exactly zero spread.
  const Complex shift = values.front();
  Complex mean_shift = 0.0;
  for (const Complex& v : values) mean_shift += v - shift;
  mean_shift /= static_cast<double>(samples);
  double spread = 0.0;
  for (const Complex& v : values) spread += std::norm(v - shift - mean_shift);
  CltEstimate estimate;
  estimate.samples = samples;
  estimate.mean = shift + mean_shift;
  estimate.standard_error = samples > 1 ? std::sqrt(spread / (samples - 1) / samples) : 0.0;
  return estimate;
}

std::string ConvergenceReport::to_csv() const {
  std::ostringstream out;
  out << std::setprecision(17);
  out << "m,mean_re,mean_im,stderr,oracle_re,oracle_im,abs_err\n";
  for (const ConvergenceRow& r : rows)
    out << r.m << ',' << r.estimate.mean.real() << ',' << r.estimate.mean.imag() << ',' << r.estimate.standard_error << ','
        << r.oracle.real() << ',' << r.oracle.imag() << ',' << r.abs_err << '\n';
  return out.str();
}

ConvergenceReport convergence_report(const Polynomial& p, double q, const std::vector<double>& mu,
                                     const std::vector<int>& m_list, int samples, std::uint64_t seed) {
  require(!m_list.empty(), "need at least one m");
  QParams params;
  params.q = q;
  params.mu = mu;
  params.max_level = static_cast<int>((p.degree() + 1) / 2);
  const Complex oracle = moment_oracle(p, params);
  const int n = static_cast<int>(mu.size());

  ConvergenceReport report;
  for (int m : m_list) {
    ConvergenceRow row;
    row.m = m;
    row.estimate = clt_estimate(p, q, mu, m, samples, seed);
    row.oracle = oracle;
    row.abs_err = std::abs(row.estimate.mean - oracle);
    report.rows.push_back(row);
  }
  for (std::uint64_t s : kTrajectorySeeds) {
    Trajectory tr;
    tr.seed = s;
    for (int m : m_list) tr.values.push_back(clt_sample_moment(p, sample_signs(q, n, m, s), mu));
    report.trajectories.push_back(std::move(tr));
  }
  return report;
}

}  // namespace qhyper
