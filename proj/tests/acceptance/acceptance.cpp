// Acceptance campaign: one PASS/FAIL line per criterion.
//
// Exit status is 0 when every criterion has its expected outcome. Criteria 9
// and 10 compare the unnormalized fourth moment of g + g^* (variance 2) with
// 2 + q, which is the moment of the unit-variance element; the literal check
// is run as stated and is expected to fail. Each of those criteria also gets a
// supplementary line for the unit-variance element, which must pass, and every
// other sub-item of 9 and 10 must pass as well.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iomanip>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "qhyper/babyfock.hpp"
#include "qhyper/clt.hpp"
#include "qhyper/hyperc.hpp"
#include "qhyper/linalg.hpp"
#include "qhyper/polynomial.hpp"
#include "qhyper/qfock.hpp"
#include "qhyper/rng.hpp"
#include "qhyper/semigroup.hpp"
#include "qhyper/state.hpp"
#include "support/oracles.hpp"

using namespace qhyper;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = true;
  std::ostringstream detail;
  // Sub-items that must hold even when the criterion as a whole is a known failure.
  bool side_conditions = true;

  void check(bool ok) { pass = pass && ok; }
  void side(bool ok) {
    side_conditions = side_conditions && ok;
    pass = pass && ok;
  }
};

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

MonomialExpansion random_expansion(int n, Rng& rng) {
  MonomialExpansion e(n);
  for (auto& c : e.coefficients()) c = rng.complex_normal();
  return e;
}

std::vector<double> arange(double lo, double hi, double step) {
  std::vector<double> out;
  const long count = std::lround((hi - lo) / step);
  for (long k = 0; k <= count; ++k) out.push_back(lo + static_cast<double>(k) * step);
  return out;
}

// ---------------------------------------------------------------- 1

void criterion_relations(Outcome& o) {
  const auto start = Clock::now();
  double worst_relation = 0.0;
  double worst_norm = 0.0;
  int models = 0;
  for (int n = 1; n <= 5; ++n)
    for (int table = 0; table < 20; ++table) {
      Rng rng(1000 + static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(table));
      std::vector<double> mu(static_cast<std::size_t>(n));
      for (double& m : mu) m = rng.uniform(1.0, 4.0);
      const BabyFock model(ModelParams(mu, SignTable::random(n, rng.bits())));
      const RelationsReport r = model.verify_relations();
      worst_relation = std::max({worst_relation, r.commutation, r.star_commutation, r.nilpotency, r.anticommutator});
      worst_norm = std::max(worst_norm, r.gamma_norm);
      ++models;
    }
  const double elapsed = seconds_since(start);
  o.check(worst_relation <= 1e-12);
  o.check(worst_norm <= 1e-10);
  o.check(elapsed <= 60.0);
  o.detail << models << " models, max relation residual " << worst_relation << ", max norm error " << worst_norm
           << ", " << elapsed << " s";
}

// ---------------------------------------------------------------- 2

void criterion_density(Outcome& o) {
  const auto start = Clock::now();
  double solve_gap = 0.0;
  double functional = 0.0;
  double second_moment = 0.0;
  double l2 = 0.0;
  for (int n = 1; n <= 4; ++n)
    for (int rep = 0; rep < 2; ++rep) {
      Rng rng(2000 + static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(rep));
      std::vector<double> mu(static_cast<std::size_t>(n));
      for (double& m : mu) m = rng.uniform(1.0, 3.0);
      const BabyFock model(ModelParams(mu, SignTable::random(n, rng.bits())));
      const DensityFactorization density = density_closed_form(model);
      const Matrix d = density.dense();
      const DensitySolution solved = density_solve(model);
      solve_gap = std::max(solve_gap, (solved.density - d).cwiseAbs().maxCoeff());
      functional = std::max(functional, verify_density(model, density).functional);
      const Matrix half = density.dense_power(0.5);
      for (int i = 1; i <= n; ++i) {
        const Matrix g = model.dense(model.gamma(i));
        const double m = model.params().mu_at(i);
        second_moment = std::max(second_moment, std::abs(model.vacuum_state(g.adjoint() * g) - 1.0 / (m * m)));
        l2 = std::max(l2, std::abs(oracle::schatten_norm_svd(g * half, 2.0) - 1.0 / m));
      }
    }
  const double elapsed = seconds_since(start);
  o.check(solve_gap <= 1e-9);
  o.check(functional <= 1e-10);
  o.check(second_moment <= 1e-10);
  o.check(l2 <= 1e-10);
  o.check(elapsed <= 120.0);
  o.detail << "closed vs solve " << solve_gap << ", Tr(DW) vs vacuum " << functional << ", tau(g*g) " << second_moment
           << ", ||gD^1/2||_2 " << l2 << ", " << elapsed << " s";
}

// ---------------------------------------------------------------- 3

void criterion_modular(Outcome& o) {
  double worst = 0.0;
  for (int n = 1; n <= 4; ++n) {
    Rng rng(3000 + static_cast<std::uint64_t>(n));
    std::vector<double> mu(static_cast<std::size_t>(n));
    for (double& m : mu) m = rng.uniform(1.0, 3.0);
    const BabyFock model(ModelParams(mu, SignTable::random(n, rng.bits())));
    const DensityFactorization density = density_closed_form(model);
    for (double p : {1.0, 1.5, 2.0, 3.0}) worst = std::max(worst, modular_check(model, density, p).max_residual());
  }
  o.check(worst <= 1e-9);
  o.detail << "max relative residual " << worst;
}

// ---------------------------------------------------------------- 4

void criterion_choi(Outcome& o) {
  double min_eig = std::numeric_limits<double>::infinity();
  double identity = 0.0;
  int points = 0;
  for (double t : arange(0.0, 5.0, 0.01))
    for (double mu : arange(1.0, 4.0, 0.1)) {
      min_eig = std::min(min_eig, choi_min_eigenvalue(t, mu));
      identity = std::max(identity, std::abs(choi_identity_residual(t, mu)));
      ++points;
    }
  o.check(min_eig >= -1e-12);
  o.check(identity <= 1e-12);
  o.detail << points << " grid points, min eigenvalue " << min_eig << ", max identity residual " << identity;
}

// ---------------------------------------------------------------- 5

void criterion_convexity(Outcome& o) {
  const auto start = Clock::now();
  const std::vector<double> ps = arange(1.1, 2.0, 0.1);
  const std::vector<double> mus{1.0, 1.5, 2.0, 3.0};
  const std::vector<double> qs{2.0, 3.0, 4.0};
  double bcl = std::numeric_limits<double>::infinity();
  double asym = bcl;
  double dual = bcl;
  const int pairs = 10000;
  for (int k = 0; k < pairs; ++k) {
    Rng rng(5000, static_cast<std::uint64_t>(k));
    const int size = rng.integer(2, 16);
    Matrix a = rng.complex_matrix(size, size);
    Matrix b = rng.complex_matrix(size, size);
    a /= a.norm();
    b *= std::pow(10.0, rng.uniform(-2.0, 1.0)) / b.norm();
    const ConvexityMargins m = convexity_margins(a, b, ps, mus, qs);
    bcl = std::min(bcl, m.bcl);
    asym = std::min(asym, m.asymmetric);
    dual = std::min(dual, m.dual);
  }
  const double elapsed = seconds_since(start);
  o.check(bcl >= -1e-10);
  o.check(asym >= -1e-10);
  o.check(dual >= -1e-10);
  o.check(elapsed <= 300.0);
  o.detail << pairs << " pairs, min margins: BCL " << bcl << ", asymmetric " << asym << ", dual " << dual << ", "
           << elapsed << " s";
}

// ---------------------------------------------------------------- 6

void criterion_hypercontractivity(Outcome& o) {
  const auto start = Clock::now();
  const std::vector<std::vector<double>> mu_grid{{1.0}, {1.5}, {2.0}, {2.5}, {1.0, 1.0}, {1.0, 2.5}, {1.5, 2.0},
                                                 {1.0, 1.7, 2.5}, {2.0, 2.0, 2.0}};
  double worst = 0.0;
  double ambient_gap = 0.0;
  int searches = 0;
  for (std::size_t g = 0; g < mu_grid.size(); ++g) {
    const auto& mu = mu_grid[g];
    const int n = static_cast<int>(mu.size());
    const BabyFock model(ModelParams(mu, SignTable::random(n, 600 + g)));
    const DensityFactorization density = density_closed_form(model);
    for (double p : {1.25, 1.5, 1.75}) {
      const double t = time_for_threshold(sufficient_time(p, model.params()));
      for (Direction dir : {Direction::Forward, Direction::Dual}) {
        SearchOptions opts;
        opts.restarts = 1000;
        opts.seed = 6000 + g;
        const ViolationWitness w = violation_search(model, density, t, p, dir, opts);
        worst = std::max(worst, w.ratio);
        ambient_gap = std::max(ambient_gap, std::abs(witness_ratio(model, density, w) - w.ratio));
        ++searches;
      }
    }
  }
  const double elapsed = seconds_since(start);
  o.check(worst <= 1.0 + 1e-9);
  o.check(ambient_gap <= 1e-9);
  o.check(elapsed <= 900.0);
  o.detail << searches << " searches x 1000 restarts, max ratio 1" << (worst >= 1.0 ? "+" : "-")
           << std::abs(worst - 1.0) << ", block vs ambient " << ambient_gap << ", " << elapsed << " s";
}

// ---------------------------------------------------------------- 7

void criterion_optimality(Outcome& o) {
  std::ostringstream rows;
  for (int p_dual : {4, 6}) {
    const int n_half = p_dual / 2;
    for (double mu : {1.0, 1.3, 2.0}) {
      const BabyFock model(ModelParams({mu}, SignTable(1)));
      const DensityFactorization density = density_closed_form(model);
      const NecessaryTime nt = necessary_time_exact(n_half, mu);
      const Matrix x = model.identity() + 1e-2 * model.dense(model.gamma(1));
      const double above = dual_contraction_ratio(model, density, x, time_for_threshold(1.05 * nt.exact), p_dual);
      const double below = dual_contraction_ratio(model, density, x, time_for_threshold(0.95 * nt.exact), p_dual);
      o.check(above > 1.0 && below < 1.0);
      rows << " [p'=" << p_dual << " mu=" << mu << ": exact " << nt.exact << ", displayed " << nt.displayed
           << (nt.differs ? " (differs)" : "") << ", ratios " << std::setprecision(10) << above << " / " << below
           << std::setprecision(6) << "]";
    }
  }
  o.detail << "threshold and ratio at 1.05x / 0.95x:" << rows.str();
}

// ---------------------------------------------------------------- 8

void criterion_perturbation(Outcome& o) {
  double fd_rel = 0.0;
  double spec_rel = 0.0;
  double traces = 0.0;
  for (double p : {3.0, 4.0, 6.0})
    for (double mu : {1.2, 1.5, 2.0})
      for (int n : {1, 2}) {
        std::vector<double> mus(static_cast<std::size_t>(n), 1.3);
        mus.back() = mu;
        const BabyFock model(ModelParams(mus, SignTable::constant(n, -1)));
        const DensityFactorization density = density_closed_form(model);
        const Matrix d = density.dense_power(1.0 / p);
        const Matrix g = model.dense(model.gamma(n));
        const Matrix one = model.identity();
        const double frechet = expansion_coefficients_frechet(d, g, p).second;
        const double fd = oracle::second_coefficient(
            [&](double e) { return oracle::schatten_power_sum_svd((one + e * g) * d, p); }, 1e-2);
        const double specialized = p / (2.0 * mu * mu) * (std::pow(mu, 4) - 1.0) / (std::pow(mu, 8.0 / p) - 1.0);
        fd_rel = std::max(fd_rel, std::abs(frechet - fd) / std::abs(fd));
        spec_rel = std::max(spec_rel, std::abs(frechet - specialized) / std::abs(specialized));
        const Matrix dp = density.dense();
        traces = std::max(traces, std::abs((dp * g.adjoint() * g).trace().real() - 1.0 / (mu * mu)));
        traces = std::max(traces, std::abs((dp * g * g.adjoint()).trace().real() - mu * mu));
      }
  o.check(fd_rel <= 1e-4);
  o.check(spec_rel <= 1e-6);
  o.check(traces <= 1e-10);
  o.detail << "Frechet vs Richardson " << fd_rel << ", vs specialized " << spec_rel << ", traces " << traces;
}

// ---------------------------------------------------------------- 9

void criterion_qfock(Outcome& o, Outcome& normalized) {
  double gram = 0.0;
  for (double q : {-0.9, -0.3, 0.0, 0.4, 0.9}) {
    const RealMatrix gm = gram_matrix({{1, 2}, {2, 1}}, q);
    gram = std::max({gram, std::abs(gm(0, 0) - 1.0), std::abs(gm(1, 1) - 1.0), std::abs(gm(0, 1) - q),
                     std::abs(gm(1, 0) - q)});
  }
  o.side(gram == 0.0);

  double min_eig = std::numeric_limits<double>::infinity();
  for (double q : {-0.9, -0.5, 0.0, 0.5, 0.9})
    for (int k = 0; k <= 4; ++k) min_eig = std::min(min_eig, positivity_check(k, q, all_words(k, 2)));
  o.side(min_eig >= -1e-12);

  double literal = 0.0;
  double scaled = 0.0;
  const Polynomial fourth = parse_polynomial("(g+g*)^4");
  const Polynomial fourth_unit = parse_polynomial("0.25(g+g*)^4");
  std::ostringstream values;
  for (double q : {-0.5, 0.0, 0.5}) {
    const QParams qp{q, {1.0}, 4};
    const Complex m = moment(fourth, qp);
    literal = std::max(literal, std::abs(m - (2.0 + q)));
    scaled = std::max(scaled, std::abs(moment(fourth_unit, qp) - (2.0 + q)));
    values << " q=" << q << ":" << m.real();
  }
  o.check(literal <= 1e-12);

  double paths = 0.0;
  int words = 0;
  for (double q : {-0.9, -0.5, 0.0, 0.5, 0.9})
    for (int n = 1; n <= 2; ++n) {
      const QParams qp{q, n == 1 ? std::vector<double>{1.7} : std::vector<double>{1.3, 2.2}, 6};
      for (int len = 0; len <= 6; ++len) {
        const int letters = 2 * n;
        long total = 1;
        for (int k = 0; k < len; ++k) total *= letters;
        for (long code = 0; code < total; ++code) {
          FockWord w;
          long c = code;
          for (int k = 0; k < len; ++k, c /= letters) {
            const int l = static_cast<int>(c % letters);
            w.push_back({l / 2 + 1, (l % 2) == 1});
          }
          const Complex a = moment(w, qp);
          paths = std::max(paths, std::abs(a - pair_partition_moment(w, qp)) / std::max(1.0, std::abs(a)));
          ++words;
        }
      }
    }
  o.side(paths <= 1e-12);

  // <l^*(e) u, v> = <u, l(e) v> on random level-2 and level-3 vectors.
  double adjoint = 0.0;
  Rng rng(9000);
  for (double q : {-0.7, 0.0, 0.6})
    for (int label : {1, -1, 2})
      for (int rep = 0; rep < 5; ++rep) {
        TruncatedFockVector u(5);
        TruncatedFockVector v(5);
        for (const auto& w : all_words(3, 2)) u.add(w, rng.complex_normal());
        for (const auto& w : all_words(2, 2)) v.add(w, rng.complex_normal());
        const Complex lhs = q_inner(annihilate_apply(label, u, q), v, q);
        const Complex rhs = q_inner(u, create_apply(label, v), q);
        adjoint = std::max(adjoint, std::abs(lhs - rhs) / std::max(1.0, std::abs(lhs)));
      }
  o.side(adjoint <= 1e-12);

  o.detail << "Gram error " << gram << ", min Gram eigenvalue (level<=4) " << min_eig << ", (g+g*)^4 at mu=1"
           << values.str() << " (max gap to 2+q " << literal << "), operator vs pair partitions on " << words
           << " words " << paths << ", adjointness " << adjoint;
  normalized.check(scaled <= 1e-12 && o.side_conditions);
  normalized.detail << "0.25(g+g*)^4 vs 2+q: max gap " << scaled;
}

// ---------------------------------------------------------------- 10

struct CltCampaign {
  int improved = 0;
  double worst_at_40 = 0.0;
  double mean_at_40 = 0.0;
  double mean_at_5 = 0.0;
};

CltCampaign clt_campaign(const Polynomial& word, double q) {
  const double target = 2.0 + q;
  CltCampaign c;
  const int seeds = 20;
  for (int seed = 0; seed < seeds; ++seed) {
    const std::uint64_t s = 10000 + static_cast<std::uint64_t>(seed);
    const double e5 = clt_estimate(word, q, {1.0}, 5, 200, s).mean.real();
    const double e40 = clt_estimate(word, q, {1.0}, 40, 200, s).mean.real();
    c.improved += std::abs(e40 - target) < std::abs(e5 - target) ? 1 : 0;
    c.worst_at_40 = std::max(c.worst_at_40, std::abs(e40 - target));
    c.mean_at_40 += e40 / seeds;
    c.mean_at_5 += e5 / seeds;
  }
  return c;
}

void criterion_clt(Outcome& o, Outcome& normalized) {
  const auto start = Clock::now();
  double second = 0.0;
  double spread = 0.0;
  for (double q : {-0.5, 0.0, 0.5})
    for (int m : {1, 5, 20, 40}) {
      const CltEstimate e = clt_estimate(parse_polynomial("s* s"), q, {1.3}, m, 20, 77);
      second = std::max(second, std::abs(e.mean - 1.0 / (1.3 * 1.3)));
      spread = std::max(spread, e.standard_error);
    }
  o.side(second <= 1e-12 && spread == 0.0);

  std::ostringstream lit;
  std::ostringstream norm;
  bool literal_ok = true;
  bool normalized_ok = true;
  for (double q : {0.5, -0.5}) {
    const CltCampaign a = clt_campaign(parse_polynomial("(s+s*)^4"), q);
    literal_ok = literal_ok && a.improved >= 19 && a.worst_at_40 <= 0.05;
    lit << " [q=" << q << ": improved " << a.improved << "/20, mean m=5 " << a.mean_at_5 << ", m=40 " << a.mean_at_40
        << ", worst |err| at 40 " << a.worst_at_40 << "]";
    const CltCampaign b = clt_campaign(parse_polynomial("0.25(s+s*)^4"), q);
    normalized_ok = normalized_ok && b.improved >= 19 && b.worst_at_40 <= 0.05;
    norm << " [q=" << q << ": improved " << b.improved << "/20, mean m=40 " << b.mean_at_40 << ", worst |err| "
         << b.worst_at_40 << "]";
  }
  const double elapsed = seconds_since(start);
  o.check(literal_ok);
  o.side(elapsed <= 600.0);
  o.detail << "s*s error " << second << " stderr " << spread << "; (s+s*)^4 vs 2+q:" << lit.str() << "; " << elapsed
           << " s";
  normalized.check(normalized_ok && o.side_conditions);
  normalized.detail << "0.25(s+s*)^4 vs 2+q:" << norm.str();
}

// ---------------------------------------------------------------- 11

void criterion_lp_growth(Outcome& o) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  double closed = 0.0;
  for (double mu : {2.0, 4.0, 8.0}) {
    const BabyFock model(ModelParams({mu}, SignTable(1)));
    const DensityFactorization density = density_closed_form(model);
    const Matrix g = model.dense(model.gamma(1));
    for (double p : {2.0, 3.0, 4.0, 6.0}) {
      const double norm = haagerup_norm(density, g, p);
      const double ratio = norm / std::pow(mu, 1.0 - 4.0 / p);
      lo = std::min(lo, ratio);
      hi = std::max(hi, ratio);
      const double exact = std::sqrt(mu * mu + 1.0 / (mu * mu)) * std::pow(1.0 + std::pow(mu, 4), -1.0 / p);
      closed = std::max(closed, std::abs(norm - exact));
    }
  }
  o.check(lo >= 0.7 && hi <= 1.5);
  o.check(closed <= 1e-10);
  o.detail << "ratio range [" << lo << ", " << hi << "], closed-form error " << closed;
}

// ---------------------------------------------------------------- 12

void criterion_structural(Outcome& o) {
  const auto start = Clock::now();
  double identity = 0.0;
  double decomposition_margin = std::numeric_limits<double>::infinity();
  double gamma_margin = std::numeric_limits<double>::infinity();
  double disjoint = 0.0;
  double pythagoras = 0.0;
  const std::vector<double> ps{1.1, 1.25, 1.5, 1.75, 2.0};
  int samples = 0;
  for (int n = 2; n <= 3; ++n) {
    Rng rng(12000 + static_cast<std::uint64_t>(n));
    std::vector<double> mu(static_cast<std::size_t>(n));
    for (double& m : mu) m = rng.uniform(1.0, 2.5);
    const BabyFock model(ModelParams(mu, SignTable::random(n, rng.bits())));
    const DensityFactorization density = density_closed_form(model);
    const Subalgebra sub(model);
    for (int k = 0; k < 1000; ++k, ++samples) {
      const double p = ps[static_cast<std::size_t>(k) % ps.size()];
      const MonomialExpansion a = random_expansion(n - 1, rng);
      const MonomialExpansion b = random_expansion(n - 1, rng);
      const MonomialExpansion c = random_expansion(n - 1, rng);
      const MonomialExpansion d = random_expansion(n - 1, rng);
      const DecompositionReport dec = decomposition_identity_check(sub, density, a, d, p);
      identity = std::max(identity, dec.identity.relative());
      decomposition_margin = std::min(decomposition_margin, dec.margin / std::max(1.0, dec.identity.lhs));
      const GammaBoundReport gb = gamma_lower_bound_check(sub, density, b, c, p);
      gamma_margin = std::min({gamma_margin, gb.gamma_margin / gb.scale, gb.gamma_star_margin / gb.scale});
      disjoint = std::max(disjoint, disjoint_support_check(sub, density, b, c, p).relative());
      pythagoras = std::max(pythagoras, pythagoras_check(sub, a, b, c, d, rng.uniform(0.0, 2.0)).relative());
    }
  }
  o.check(identity <= 1e-9);
  o.check(decomposition_margin >= -1e-10);
  o.check(gamma_margin >= -1e-10);
  o.check(disjoint <= 1e-9);
  o.check(pythagoras <= 1e-9);
  o.detail << samples << " samples, decomposition identity " << identity << " margin " << decomposition_margin
           << ", gamma bound margin " << gamma_margin << ", disjoint support " << disjoint << ", Pythagoras "
           << pythagoras << ", " << seconds_since(start) << " s";
}

}  // namespace

int main() {
  struct Line {
    std::string label;
    std::string title;
    const Outcome* outcome;
    bool expect_pass;
  };
  Outcome c[13];
  Outcome c9_unit;
  Outcome c10_unit;
  const std::vector<std::pair<std::string, std::function<void()>>> runs{
      {"1", [&] { criterion_relations(c[1]); }},
      {"2", [&] { criterion_density(c[2]); }},
      {"3", [&] { criterion_modular(c[3]); }},
      {"4", [&] { criterion_choi(c[4]); }},
      {"5", [&] { criterion_convexity(c[5]); }},
      {"6", [&] { criterion_hypercontractivity(c[6]); }},
      {"7", [&] { criterion_optimality(c[7]); }},
      {"8", [&] { criterion_perturbation(c[8]); }},
      {"9", [&] { criterion_qfock(c[9], c9_unit); }},
      {"10", [&] { criterion_clt(c[10], c10_unit); }},
      {"11", [&] { criterion_lp_growth(c[11]); }},
      {"12", [&] { criterion_structural(c[12]); }},
  };
  const std::vector<Line> lines{
      {"1", "relations", &c[1], true},
      {"2", "density", &c[2], true},
      {"3", "modular", &c[3], true},
      {"4", "Choi", &c[4], true},
      {"5", "convexity", &c[5], true},
      {"6", "hypercontractivity at the sufficient time", &c[6], true},
      {"7", "optimality of the necessary time", &c[7], true},
      {"8", "perturbation coefficient", &c[8], true},
      {"9", "q-Fock", &c[9], false},
      {"9-normalized", "q-Fock with the unit-variance fourth moment", &c9_unit, true},
      {"10", "CLT", &c[10], false},
      {"10-normalized", "CLT with the unit-variance fourth moment", &c10_unit, true},
      {"11", "Lp growth", &c[11], true},
      {"12", "structural lemmas", &c[12], true},
  };

  for (const auto& [label, fn] : runs) {
    try {
      fn();
    } catch (const std::exception& e) {
      Outcome& o = c[std::stoi(label)];
      o.pass = false;
      o.side_conditions = false;
      o.detail << " exception: " << e.what();
    }
    for (const Line& line : lines) {
      if (line.label != label && line.label != label + "-normalized") continue;
      std::printf("%s criterion %s (%s): %s\n", line.outcome->pass ? "PASS" : "FAIL", line.label.c_str(),
                  line.title.c_str(), line.outcome->detail.str().c_str());
      std::fflush(stdout);
    }
  }

  std::vector<std::string> expected_failures;
  std::vector<std::string> unexpected;
  for (const Line& line : lines) {
    if (line.outcome->pass == line.expect_pass && line.outcome->side_conditions) {
      if (!line.expect_pass) expected_failures.push_back(line.label);
      continue;
    }
    unexpected.push_back(line.label);
  }
  auto join = [](const std::vector<std::string>& v) {
    std::string s;
    for (const auto& x : v) s += (s.empty() ? "" : ", ") + x;
    return s.empty() ? std::string("none") : s;
  };
  std::printf("known failures (unit-variance normalization of (g+g*)^4): %s\n", join(expected_failures).c_str());
  std::printf("unexpected outcomes: %s\n", join(unexpected).c_str());
  return unexpected.empty() ? 0 : 1;
}
