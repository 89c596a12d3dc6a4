#include <cmath>

#include "doctest.h"
#include "qhyper/rng.hpp"
#include "qhyper/semigroup.hpp"
#include "support/oracles.hpp"

using namespace qhyper;

namespace {

MonomialExpansion random_expansion(int n, Rng& rng) {
  MonomialExpansion e(n);
  for (auto& c : e.coefficients()) c = rng.complex_normal();
  return e;
}

// Expansion whose compression to the irreducible block is the matrix unit e_ab.
MonomialExpansion matrix_unit(const IrreducibleBlock& block, int n, int a, int b) {
  const Eigen::Index d = block.block_dim();
  const std::size_t count = std::size_t{1} << (2 * n);
  Matrix system(d * d, static_cast<Eigen::Index>(count));
  for (std::size_t code = 0; code < count; ++code)
    system.col(static_cast<Eigen::Index>(code)) = block.monomial(code).reshaped();
  Matrix target = Matrix::Zero(d, d);
  target(a, b) = 1.0;
  const Vector coef = system.fullPivLu().solve(target.reshaped());
  return MonomialExpansion(n, std::vector<Complex>(coef.data(), coef.data() + coef.size()));
}

}  // namespace

TEST_CASE("number degree") {
  CHECK(number_degree(Monomial::unit(3)) == 0);
  const Monomial w{{Letter::Gen, Letter::Y, Letter::GenStar}};
  CHECK(number_degree(w) == 4);
  CHECK(index_degree(w, 2) == 2);
  CHECK(index_degree(w, 3) == 1);
}

TEST_CASE("semigroup law and identity at time zero") {
  Rng rng(1);
  const BabyFock model(ModelParams({1.3, 2.1}, SignTable::random(2, 4)));
  const MonomialExpansion x = random_expansion(2, rng);
  CHECK((apply_OU(x, 0.0) - x).norm() == 0.0);
  const MonomialExpansion two_steps = apply_OU(apply_OU(x, 0.3), 0.45);
  CHECK((two_steps - apply_OU(x, 0.75)).norm() <= 1e-14 * x.norm());
  const MonomialExpansion split = apply_Ti(apply_Ti(x, 1, 0.4), 2, 0.4);
  CHECK((split - apply_OU(x, 0.4)).norm() <= 1e-14 * x.norm());
}

TEST_CASE("monomial and GNS paths agree") {
  Rng rng(2);
  for (int n = 1; n <= 3; ++n) {
    const BabyFock model(ModelParams(std::vector<double>(n, 1.6), SignTable::random(n, 7)));
    const Matrix x = model.assemble(random_expansion(n, rng));
    for (double t : {0.0, 0.1, 1.0}) {
      const Matrix a = apply_OU(model, x, t);
      CHECK((a - apply_OU_via_gns(model, x, t)).norm() <= 1e-10 * x.norm());
      CHECK((model.gns_embed(a) - apply_OU_gns(model, model.gns_embed(x), t)).norm() <= 1e-10 * x.norm());
      CHECK((model.gns_embed(apply_Ti(model, x, 1, t)) - apply_Ti_gns(model, model.gns_embed(x), 1, t)).norm() <=
            1e-10 * x.norm());
    }
  }
}

TEST_CASE("semigroup is unital, state preserving, and L2 contractive") {
  Rng rng(3);
  const BabyFock model(ModelParams({1.2, 2.5}, SignTable::random(2, 1)));
  CHECK((apply_OU(model, model.identity(), 0.7) - model.identity()).norm() <= 1e-13);
  const Matrix x = model.assemble(random_expansion(2, rng));
  const Matrix px = apply_OU(model, x, 0.7);
  CHECK(std::abs(model.vacuum_state(px) - model.vacuum_state(x)) <= 1e-12);
  CHECK(model.gns_embed(px).norm() <= model.gns_embed(x).norm());
  CHECK((apply_OU(model, x.adjoint(), 0.7) - px.adjoint()).norm() <= 1e-12 * x.norm());
}

TEST_CASE("Choi matrix agrees with the images of the matrix units") {
  for (double mu : {1.0, 1.5, 3.0})
    for (double t : {0.0, 0.2, 2.0}) CHECK((choi_matrix(t, mu) - oracle::choi_from_images(t, mu)).norm() <= 1e-14);
}

TEST_CASE("Choi spectrum matches the semigroup acting on the algebra") {
  for (double mu : {1.0, 1.8})
    for (double t : {0.05, 0.5}) {
      const BabyFock model(ModelParams({mu}, SignTable(1)));
      const IrreducibleBlock block(model, density_closed_form(model));
      Matrix choi = Matrix::Zero(4, 4);
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
          const Matrix image = block.compress(apply_Ti(matrix_unit(block, 1, i, j), 1, t));
          for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) choi(2 * i + a, 2 * j + b) = image(a, b);
        }
      // The block basis is not the one of the closed form; the spectrum is basis-independent.
      const auto from_model = oracle::sorted_spectrum(choi);
      const auto closed = oracle::sorted_spectrum(choi_matrix(t, mu));
      for (std::size_t k = 0; k < 4; ++k) CHECK(from_model[k] == doctest::Approx(closed[k]).epsilon(1e-10));
    }
}

TEST_CASE("Choi positivity over a grid") {
  for (double mu = 1.0; mu <= 4.0; mu += 0.25)
    for (double t = 0.0; t <= 5.0; t += 0.05) {
      CHECK(is_cp(t, mu));
      CHECK(std::abs(choi_identity_residual(t, mu)) <= 1e-12);
    }
}

TEST_CASE("randomized complete positivity on the algebra") {
  const BabyFock model(ModelParams({1.4, 2.2}, SignTable::random(2, 9)));
  for (double t : {0.0, 0.1, 1.0}) {
    const CpReport r = cp_randomized_check(model, 2, t, 12, 5);
    CHECK(r.pass());
    CHECK(r.samples == 12);
  }
}

TEST_CASE("Pythagoras decomposition of the L2 norm") {
  Rng rng(4);
  for (int n = 2; n <= 3; ++n) {
    const BabyFock model(ModelParams(std::vector<double>(n, 1.7), SignTable::random(n, 2)));
    const Subalgebra sub(model);
    for (double t : {0.0, 0.3}) {
      const Comparison c = pythagoras_check(sub, random_expansion(n - 1, rng), random_expansion(n - 1, rng),
                                            random_expansion(n - 1, rng), random_expansion(n - 1, rng), t);
      CHECK(c.relative() <= 1e-9);
    }
  }
}

TEST_CASE("negative times are rejected") {
  Rng rng(5);
  CHECK_THROWS_AS(apply_OU(random_expansion(1, rng), -0.1), InvalidArgument);
  CHECK_THROWS_AS(choi_matrix(-1.0, 1.0), InvalidArgument);
  CHECK_THROWS_AS(choi_matrix(0.0, 0.5), InvalidArgument);
}
