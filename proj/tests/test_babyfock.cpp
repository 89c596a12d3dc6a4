#include <cmath>

#include "doctest.h"
#include "qhyper/babyfock.hpp"
#include "qhyper/rng.hpp"

using namespace qhyper;

namespace {

ModelParams random_params(int n, std::uint64_t seed) {
  Rng rng(seed, 7);
  std::vector<double> mu;
  for (int i = 0; i < n; ++i) mu.push_back(rng.uniform(1.0, 4.0));
  return ModelParams(mu, SignTable::random(n, seed));
}

MonomialExpansion random_expansion(int n, Rng& rng) {
  MonomialExpansion e(n);
  for (auto& c : e.coefficients()) c = rng.complex_normal();
  return e;
}

double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("sign table is symmetric and -1 on matching absolute values") {
  const SignTable s = SignTable::random(4, 3);
  for (int i = -4; i <= 4; ++i)
    for (int j = -4; j <= 4; ++j) {
      if (i == 0 || j == 0) continue;
      CHECK(s(i, j) == s(j, i));
      if (std::abs(i) == std::abs(j)) CHECK(s(i, j) == -1);
      else CHECK(s(i, j) == s(std::abs(i), std::abs(j)));
    }
  CHECK(SignTable::random(4, 3) == s);
  CHECK(SignTable::from_json(s.to_json()) == s);
  CHECK(s.restrict(2).pair(1, 2) == s.pair(1, 2));
}

TEST_CASE("sign table rejects bad input") {
  CHECK_THROWS_AS(SignTable(0), InvalidArgument);
  SignTable s(3);
  CHECK_THROWS_AS(s.set_pair(1, 1, 1), InvalidArgument);
  CHECK_THROWS_AS(s.set_pair(1, 2, 0), InvalidArgument);
  CHECK_THROWS_AS(s.pair(1, 4), InvalidArgument);
  CHECK_THROWS_AS(SignTable::from_json("{\"n\": 2, \"pairs\": [[1, 2, 5]]}"), InvalidArgument);
  CHECK_THROWS_AS(SignTable::from_json("not json"), InvalidArgument);
}

TEST_CASE("model parameters are validated") {
  CHECK_THROWS_AS(ModelParams({0.5}, SignTable(1)), InvalidArgument);
  CHECK_THROWS_AS(ModelParams({1.0, 2.0}, SignTable(3)), InvalidArgument);
  CHECK_THROWS_AS(BabyFock(ModelParams(std::vector<double>(kMaxIndices + 1, 1.0), SignTable(kMaxIndices + 1))),
                  InvalidArgument);
}

TEST_CASE("monomial codes round trip") {
  for (int n = 1; n <= 4; ++n)
    for (std::size_t code = 0; code < (std::size_t{1} << (2 * n)); ++code)
      CHECK(Monomial::from_code(code, n).code() == code);
  CHECK(Monomial::single(3, 2, Letter::Y).code() == 3u * 4u);
}

TEST_CASE("relations hold on random models") {
  for (int n = 1; n <= 4; ++n)
    for (std::uint64_t seed = 0; seed < 4; ++seed) {
      const BabyFock model(random_params(n, seed));
      const RelationsReport r = model.verify_relations();
      CHECK(r.pass());
      CHECK(r.max_residual() <= 1e-12);
    }
}

TEST_CASE("relations match a direct dense computation") {
  const BabyFock model(random_params(3, 11));
  const SignTable& s = model.params().signs;
  for (int i = 1; i <= 3; ++i) {
    const Matrix gi = model.dense(model.gamma(i));
    const Matrix gsi = model.dense(model.gamma_star(i));
    CHECK(max_abs(gsi - gi.adjoint()) == doctest::Approx(0.0));
    const double mu = model.params().mu_at(i);
    CHECK(max_abs(gsi * gi + gi * gsi - (mu * mu + 1.0 / (mu * mu)) * model.identity()) <= 1e-12);
    CHECK(max_abs(gi * gi) <= 1e-12);
    for (int j = 1; j <= 3; ++j) {
      if (i == j) continue;
      const Matrix gj = model.dense(model.gamma(j));
      CHECK(max_abs(gi * gj - double(s(i, j)) * gj * gi) <= 1e-12);
      CHECK(max_abs(gsi * gj - double(s(i, j)) * gj * gsi) <= 1e-12);
    }
  }
}

TEST_CASE("relations against a wrong sign table fail") {
  const BabyFock model(ModelParams({1.5, 2.0}, SignTable::constant(2, 1)));
  CHECK_FALSE(model.verify_relations(SignTable::constant(2, -1)).pass());
}

TEST_CASE("generator norm equals sqrt(mu^2 + mu^-2)") {
  const BabyFock model(ModelParams({1.0, 1.7, 3.2}, SignTable::random(3, 5)));
  for (int i = 1; i <= 3; ++i) {
    const double mu = model.params().mu_at(i);
    Eigen::JacobiSVD<Matrix> svd(model.dense(model.gamma(i)));
    CHECK(svd.singularValues()(0) == doctest::Approx(std::sqrt(mu * mu + 1.0 / (mu * mu))).epsilon(1e-12));
    CHECK(operator_norm(model.gamma(i)) == doctest::Approx(svd.singularValues()(0)).epsilon(1e-10));
  }
}

TEST_CASE("vacuum state vanishes on non-unit monomials") {
  const BabyFock model(random_params(3, 2));
  CHECK(std::abs(model.vacuum_state(model.identity()) - 1.0) <= 1e-15);
  for (std::size_t code = 1; code < model.monomial_count(); ++code)
    CHECK(std::abs(model.vacuum_state(model.monomial_matrix(Monomial::from_code(code, 3)))) <= 1e-14);
}

TEST_CASE("y applied to the vacuum is the pair vector") {
  const BabyFock model(random_params(2, 9));
  for (int i = 1; i <= 2; ++i) {
    const Vector v = model.gns_embed(model.dense(model.y(i)));
    const IndexSet pair = make_index_set({-i, i}, 2);
    for (Eigen::Index k = 0; k < v.size(); ++k)
      CHECK(std::abs(v(k) - (static_cast<std::uint32_t>(k) == pair.bits ? 1.0 : 0.0)) <= 1e-14);
  }
}

TEST_CASE("monomial GNS vectors are scaled basis vectors forming a bijection") {
  const BabyFock model(random_params(3, 4));
  std::vector<int> hit(model.dim(), 0);
  for (std::size_t code = 0; code < model.monomial_count(); ++code) {
    const Vector v = model.monomial_gns(Monomial::from_code(code, 3));
    const std::size_t target = model.gns_target(code);
    ++hit[target];
    CHECK(std::abs(v(static_cast<Eigen::Index>(target)) - model.gns_value(code)) <= 1e-14);
    CHECK(v.norm() == doctest::Approx(std::abs(model.gns_value(code))));
  }
  for (int h : hit) CHECK(h == 1);
}

TEST_CASE("expand and assemble are inverse") {
  Rng rng(17);
  for (int n = 1; n <= 3; ++n) {
    const BabyFock model(random_params(n, 20 + n));
    const MonomialExpansion e = random_expansion(n, rng);
    const Matrix x = model.assemble(e);
    const MonomialExpansion back = model.monomial_expand(x);
    CHECK((back - e).norm() <= 1e-10 * e.norm());
    CHECK((model.expand_gns(model.gns_embed(x)) - e).norm() <= 1e-10 * e.norm());
    CHECK(model.algebra_residual(x) <= 1e-12);
  }
}

TEST_CASE("matrices outside the algebra have a positive algebra residual") {
  const BabyFock model(random_params(1, 1));
  Rng rng(3);
  CHECK(model.algebra_residual(rng.complex_matrix(4, 4)) > 1e-3);
}

TEST_CASE("expansion embedding and restriction") {
  Rng rng(5);
  const MonomialExpansion e = random_expansion(2, rng);
  const MonomialExpansion big = e.embed(4);
  CHECK(big.supported_below(2));
  CHECK(!big.supported_below(1));
  CHECK((big.restrict(2) - e).norm() == 0.0);
  CHECK_THROWS_AS(big.restrict(1), InvalidArgument);
}

TEST_CASE("index-set helpers") {
  const IndexSet s = make_index_set({-2, 1}, 2);
  CHECK(s.contains(-2, 2));
  CHECK(s.contains(1, 2));
  CHECK(!s.contains(2, 2));
  CHECK(s.size() == 2);
  CHECK(s.without(1, 2).with(2, 2) == make_index_set({-2, 2}, 2));
  for (int p = 0; p < 6; ++p) CHECK(IndexSet::position(IndexSet::index_at(p, 3), 3) == p);
}
