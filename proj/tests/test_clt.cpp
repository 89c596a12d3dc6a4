#include <cmath>

#include "doctest.h"
#include "qhyper/babyfock.hpp"
#include "qhyper/clt.hpp"
#include "qhyper/qfock.hpp"
#include "support/oracles.hpp"

using namespace qhyper;

namespace {

// Exact expectation of tau(((s + s^*)/sqrt2)^4) at mu = 1 over all sign
// configurations, built from dense baby Fock matrices on m indices.
double exact_normalized_fourth(double q, int m) {
  const int pairs = m * (m - 1) / 2;
  const double p_minus = (1.0 - q) / 2.0;
  double total = 0.0;
  for (int mask = 0; mask < (1 << pairs); ++mask) {
    SignTable signs(m);
    double prob = 1.0;
    int bit = 0;
    for (int k = 1; k <= m; ++k)
      for (int l = k + 1; l <= m; ++l, ++bit) {
        const bool minus = (mask >> bit) & 1;
        signs.set_pair(k, l, minus ? -1 : 1);
        prob *= minus ? p_minus : 1.0 - p_minus;
      }
    const BabyFock model(ModelParams(std::vector<double>(static_cast<std::size_t>(m), 1.0), signs));
    Matrix s = Matrix::Zero(static_cast<Eigen::Index>(model.dim()), static_cast<Eigen::Index>(model.dim()));
    for (int j = 1; j <= m; ++j) s += model.dense(model.gamma(j));
    s /= std::sqrt(static_cast<double>(m));
    const Matrix x = (s + s.adjoint()) / std::sqrt(2.0);
    const Vector v = x * (x * model.gns_embed(model.identity()));  // x is self-adjoint: tau(x^4) = |x^2 x_0|^2
    total += prob * v.squaredNorm();
  }
  return total;
}

}  // namespace

TEST_CASE("flat pair indices follow the lexicographic order") {
  CHECK(flat_pair_index(1, 1, 4) == 1);
  CHECK(flat_pair_index(1, 4, 4) == 4);
  CHECK(flat_pair_index(2, 1, 4) == 5);
  CHECK(flat_pair_index(3, 2, 4) < flat_pair_index(3, 3, 4));
}

TEST_CASE("sign sample frequencies") {
  const double q = 0.5;  // P(-1) = 0.25
  long minus = 0;
  long total = 0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const BigSignSample s(q, 1, 64, 12345 + seed);
    for (int a = 1; a <= s.size(); ++a)
      for (int b = a + 1; b <= s.size(); ++b, ++total) minus += s.pair(a, b) == -1 ? 1 : 0;
  }
  REQUIRE(total >= 100000);
  const double freq = static_cast<double>(minus) / static_cast<double>(total);
  const double sigma = std::sqrt(0.25 * 0.75 / static_cast<double>(total));
  CHECK(std::abs(freq - 0.25) <= 3.0 * sigma);
}

TEST_CASE("sign sample structure and determinism") {
  const BigSignSample s(0.2, 2, 5, 7);
  const BigSignSample t(0.2, 2, 5, 7);
  for (int a = -10; a <= 10; ++a)
    for (int b = -10; b <= 10; ++b) {
      if (a == 0 || b == 0) continue;
      CHECK(s(a, b) == t(a, b));
      CHECK(s(a, b) == s(b, a));
      if (std::abs(a) == std::abs(b)) CHECK(s(a, b) == -1);
      else CHECK(s(a, b) == s(std::abs(a), std::abs(b)));
    }
  const BigSignSample all_minus(-1.0, 2, 6, 3);
  for (int a = 1; a <= 12; ++a)
    for (int b = a + 1; b <= 12; ++b) CHECK(all_minus.pair(a, b) == -1);
  CHECK_THROWS_AS(BigSignSample(1.0, 1, 2, 0), InvalidArgument);
}

TEST_CASE("samples are nested across m") {
  const BigSignSample small(0.3, 2, 5, 99);
  const BigSignSample big(0.3, 2, 9, 99);
  for (int i1 = 1; i1 <= 2; ++i1)
    for (int j1 = 1; j1 <= 5; ++j1)
      for (int i2 = 1; i2 <= 2; ++i2)
        for (int j2 = 1; j2 <= 5; ++j2) {
          const int a = flat_pair_index(i1, j1, 5);
          const int b = flat_pair_index(i2, j2, 5);
          if (a == b) continue;
          CHECK(small(a, b) == big(flat_pair_index(i1, j1, 9), flat_pair_index(i2, j2, 9)));
        }
}

TEST_CASE("sparse keys round trip") {
  for (const std::vector<int>& set : {std::vector<int>{}, {-3, 1, 5}, {-511, -2, 0 + 1, 7, 200, 511}})
    CHECK(SparseVacuumState::unpack(SparseVacuumState::pack(set)) == set);
}

TEST_CASE("s applied to the vacuum") {
  const int m = 7;
  const double mu = 1.6;
  const BigSignSample s(0.1, 1, m, 5);
  const SparseVacuumState v = s_apply(1, false, SparseVacuumState::vacuum(), s, {mu});
  CHECK(v.size() == static_cast<std::size_t>(m));
  for (const auto& [key, c] : v.entries()) CHECK(std::abs(c - 1.0 / (mu * std::sqrt(double(m)))) <= 1e-15);
}

TEST_CASE("second moments are exact and sample independent") {
  for (double q : {-0.5, 0.3})
    for (int m : {3, 17}) {
      const CltEstimate e = clt_estimate(parse_polynomial("s* s"), q, {1.4}, m, 25, 8);
      CHECK(std::abs(e.mean - 1.0 / (1.4 * 1.4)) <= 1e-14);
      CHECK(e.standard_error == 0.0);
    }
  CHECK(std::abs(clt_estimate(parse_polynomial("s s* s"), 0.3, {1.0}, 5, 5, 1).mean) == 0.0);
}

TEST_CASE("sparse and dense evaluators agree on small instances") {
  const auto single = parse_polynomial("(s + s* + 0.5 s s)^2 (s* s + s s*)");
  const auto mixed = parse_polynomial("(s1 + s2* + 0.5 s1 s2)^2 (s1* s2 + s2* s2)");
  for (auto [n, m] : std::vector<std::pair<int, int>>{{1, 1}, {1, 3}, {2, 1}, {3, 1}, {2, 2}, {1, 4}}) {
    const std::vector<double> mu = n == 1 ? std::vector<double>{1.3} : std::vector<double>{1.3, 1.8, 1.1};
    const std::vector<double> used(mu.begin(), mu.begin() + n);
    const auto& w = n == 1 ? single : mixed;
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
      const BigSignSample s(0.2, n, m, seed);
      const Complex sparse = clt_sample_moment(w, s, used);
      CHECK(std::abs(sparse - clt_dense_moment(w, s, used)) <= 1e-12 * std::max(1.0, std::abs(sparse)));
    }
  }
}

TEST_CASE("per-sample hermiticity") {
  const auto w = parse_polynomial("s1 s2* s1* s1 (s2 + 2 s1*)");
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const BigSignSample s(0.4, 2, 6, seed);
    const Complex a = clt_sample_moment(w, s, {1.2, 1.7});
    const Complex b = clt_sample_moment(w.adjoint(), s, {1.2, 1.7});
    CHECK(std::abs(a - std::conj(b)) <= 1e-12 * std::max(1.0, std::abs(a)));
  }
}

TEST_CASE("finite-m expectation of the normalized fourth moment") {
  for (double q : {-0.5, 0.5})
    for (int m : {1, 2, 3, 4})
      CHECK(exact_normalized_fourth(q, m) == doctest::Approx(oracle::clt_normalized_fourth_mean(q, m)).epsilon(1e-12));
}

TEST_CASE("Monte-Carlo mean is consistent with the exact finite-m value") {
  for (double q : {-0.5, 0.5}) {
    const CltEstimate e = clt_estimate(parse_polynomial("0.25(s+s*)^4"), q, {1.0}, 24, 200, 3);
    CHECK(std::abs(e.mean.real() - oracle::clt_normalized_fourth_mean(q, 24)) <= 5.0 * e.standard_error + 1e-12);
    CHECK(std::abs(e.mean.imag()) <= 1e-12);
  }
}

TEST_CASE("error shrinks with m for most seeds") {
  const auto w = parse_polynomial("0.25(s+s*)^4");
  const QParams qp{0.5, {1.0}, 2};
  const double oracle_value = moment_oracle(w, qp).real();
  int improved = 0;
  const int seeds = 20;
  for (int seed = 0; seed < seeds; ++seed) {
    const double e5 = std::abs(clt_estimate(w, 0.5, {1.0}, 5, 20, 1000 + seed).mean.real() - oracle_value);
    const double e40 = std::abs(clt_estimate(w, 0.5, {1.0}, 40, 20, 1000 + seed).mean.real() - oracle_value);
    improved += e40 < e5 ? 1 : 0;
  }
  CHECK(improved >= 19);
}

TEST_CASE("fermionic endpoint second moment") {
  for (int m : {1, 4, 9}) {
    const CltEstimate e = clt_estimate(parse_polynomial("(s+s*)^2"), -1.0, {1.0}, m, 10, 2);
    CHECK(std::abs(e.mean - 2.0) <= 1e-12);
    const CltEstimate half = clt_estimate(parse_polynomial("0.5(s+s*)^2"), -1.0, {1.0}, m, 10, 2);
    CHECK(std::abs(half.mean - 1.0) <= 1e-12);
  }
}

TEST_CASE("convergence report layout") {
  const ConvergenceReport r = convergence_report(parse_polynomial("0.25(s+s*)^4"), 0.5, {1.0}, {2, 4}, 10, 1);
  REQUIRE(r.rows.size() == 2);
  CHECK(r.rows[0].m == 2);
  CHECK(std::abs(r.rows[0].oracle - 2.5) <= 1e-12);
  CHECK(r.trajectories.size() == 3);
  CHECK(r.trajectories[0].values.size() == 2);
  const std::string csv = r.to_csv();
  CHECK(csv.rfind("m,mean_re,mean_im,stderr,oracle_re,oracle_im,abs_err\n", 0) == 0);
}

TEST_CASE("budget limits") {
  CHECK_THROWS_AS(clt_estimate(parse_polynomial("(s+s*)^8"), 0.5, {1.0}, 5, 2, 0), InvalidArgument);
  CHECK_THROWS_AS(clt_estimate(parse_polynomial("s s*"), 0.5, {1.0}, 65, 2, 0), InvalidArgument);
  CHECK_THROWS_AS(clt_dense_moment(parse_polynomial("s s*"), BigSignSample(0.0, 1, 7, 0), {1.0}), InvalidArgument);
}
