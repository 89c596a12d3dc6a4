#include "qhyper/qfock.hpp"

#include <cmath>
#include <functional>

#include "qhyper/linalg.hpp"

namespace qhyper {

namespace {

constexpr int kMaxWordLength = 10;
constexpr int kMaxGramLevel = 8;

int label_of(const FockLetter& l) { return l.index; }

void require_operator_q(double q) {
  require(q > -1.0 && q < 1.0, "the operator path needs -1 < q < 1");
}

}  // namespace

void QParams::validate(bool allow_minus_one) const {
  if (allow_minus_one)
    require(q >= -1.0 && q < 1.0, "q must lie in [-1, 1)");
  else
    require_operator_q(q);
  require(!mu.empty(), "at least one variable is needed");
  for (double m : mu) require(m >= 1.0 && std::isfinite(m), "mu must be finite and >= 1");
  require(max_level >= 0, "truncation level must be >= 0");
}

TruncatedFockVector::TruncatedFockVector(int max_level) {
  require(max_level >= 0, "truncation level must be >= 0");
  levels_.resize(static_cast<std::size_t>(max_level) + 1);
}

TruncatedFockVector TruncatedFockVector::vacuum(int max_level) {
  TruncatedFockVector v(max_level);
  v.add({}, 1.0);
  return v;
}

TruncatedFockVector TruncatedFockVector::basis(const FockBasisWord& word, int max_level) {
  TruncatedFockVector v(max_level);
  v.add(word, 1.0);
  return v;
}

Complex TruncatedFockVector::omega() const {
  const auto it = levels_[0].find({});
  return it == levels_[0].end() ? Complex(0.0) : it->second;
}

void TruncatedFockVector::add(const FockBasisWord& word, Complex c) {
  require(static_cast<int>(word.size()) <= max_level(), "truncation overflow: word longer than the maximal level");
  for (int label : word) require(label != 0, "labels must be nonzero");
  levels_[word.size()][word] += c;
}

TruncatedFockVector& TruncatedFockVector::operator+=(const TruncatedFockVector& other) {
  require(other.max_level() <= max_level(), "truncation overflow in addition");
  for (std::size_t k = 0; k < other.levels_.size(); ++k)
    for (const auto& [w, c] : other.levels_[k]) levels_[k][w] += c;
  return *this;
}

TruncatedFockVector& TruncatedFockVector::operator*=(Complex c) {
  for (Level& level : levels_)
    for (auto& entry : level) entry.second *= c;
  return *this;
}

void TruncatedFockVector::prune(double tolerance, int keep_levels) {
  for (std::size_t k = 0; k < levels_.size(); ++k) {
    if (static_cast<int>(k) > keep_levels) {
      levels_[k].clear();
      continue;
    }
    std::erase_if(levels_[k], [&](const auto& entry) { return std::abs(entry.second) <= tolerance; });
  }
}

std::size_t TruncatedFockVector::support_size() const {
  std::size_t s = 0;
  for (const Level& level : levels_) s += level.size();
  return s;
}

TruncatedFockVector create_apply(int label, const TruncatedFockVector& v) {
  require(label != 0, "labels must be nonzero");
  TruncatedFockVector out(v.max_level());
  for (int k = 0; k <= v.max_level(); ++k)
    for (const auto& [w, c] : v.level(k)) {
      if (c == Complex(0.0)) continue;
      FockBasisWord longer;
      longer.reserve(w.size() + 1);
      longer.push_back(label);
      longer.insert(longer.end(), w.begin(), w.end());
      out.add(longer, c);  // throws on overflow
    }
  return out;
}

TruncatedFockVector annihilate_apply(int label, const TruncatedFockVector& v, double q) {
  require(label != 0, "labels must be nonzero");
  TruncatedFockVector out(v.max_level());
  for (int k = 1; k <= v.max_level(); ++k)
    for (const auto& [w, c] : v.level(k)) {
      double weight = 1.0;
      for (std::size_t m = 0; m < w.size(); ++m, weight *= q) {
        if (w[m] != label) continue;
        FockBasisWord shorter = w;
        shorter.erase(shorter.begin() + static_cast<std::ptrdiff_t>(m));
        out.add(shorter, weight * c);
      }
    }
  return out;
}

double gram_entry(const FockBasisWord& u, const FockBasisWord& v, double q) {
  require(u.size() == v.size(), "Gram entries need words of the same level");
  const std::size_t k = u.size();
  require(k <= static_cast<std::size_t>(kMaxGramLevel), "Gram level above 8");
  std::vector<bool> used(k, false);
  double total = 0.0;
  // Assign pi(a) for a = 0, 1, ... ; each used slot to the right of the new
  // choice was taken by an earlier position and forms one inversion.
  std::function<void(std::size_t, int)> dfs = [&](std::size_t a, int inversions) {
    if (a == k) {
      total += std::pow(q, inversions);
      return;
    }
    for (std::size_t b = 0; b < k; ++b) {
      if (used[b] || v[b] != u[a]) continue;
      int added = 0;
      for (std::size_t c = b + 1; c < k; ++c) added += used[c] ? 1 : 0;
      used[b] = true;
      dfs(a + 1, inversions + added);
      used[b] = false;
    }
  };
  dfs(0, 0);
  return total;
}

RealMatrix gram_matrix(const std::vector<FockBasisWord>& words, double q) {
  const auto size = static_cast<Eigen::Index>(words.size());
  RealMatrix g(size, size);
  for (Eigen::Index a = 0; a < size; ++a) {
    require(words[a].size() == words.front().size(), "Gram matrix words must share one level");
    for (Eigen::Index b = a; b < size; ++b) {
      g(a, b) = gram_entry(words[a], words[b], q);
      g(b, a) = g(a, b);
    }
  }
  return g;
}

Complex q_inner(const TruncatedFockVector& xi, const TruncatedFockVector& eta, double q) {
  Complex total = 0.0;
  const int levels = std::min(xi.max_level(), eta.max_level());
  for (int k = 0; k <= levels; ++k)
    for (const auto& [u, a] : xi.level(k))
      for (const auto& [v, b] : eta.level(k)) total += std::conj(a) * b * gram_entry(u, v, q);
  return total;
}

std::vector<FockBasisWord> all_words(int k, int n) {
  require(k >= 0 && n >= 1, "invalid word enumeration");
  std::vector<int> labels;
  for (int i = -n; i <= n; ++i)
    if (i != 0) labels.push_back(i);
  std::vector<FockBasisWord> out{{}};
  for (int level = 0; level < k; ++level) {
    std::vector<FockBasisWord> next;
    for (const auto& w : out)
      for (int l : labels) {
        FockBasisWord e = w;
        e.push_back(l);
        next.push_back(std::move(e));
      }
    out = std::move(next);
  }
  return out;
}

double positivity_check(int k, double q, const std::vector<FockBasisWord>& words) {
  require_operator_q(q);
  require(k >= 0 && k <= 6, "positivity check needs level <= 6");
  require(!words.empty(), "positivity check needs words");
  for (std::size_t a = 0; a < words.size(); ++a) {
    require(static_cast<int>(words[a].size()) == k, "word level differs from k");
    for (std::size_t b = 0; b < a; ++b) require(words[a] != words[b], "positivity check words must be distinct");
  }
  return eigenvalues_hermitian(gram_matrix(words, q).cast<Complex>())(0);
}

TruncatedFockVector apply_letter(const FockLetter& letter, const TruncatedFockVector& v, const QParams& params,
                                 int result_cap) {
  require(letter.index >= 1 && letter.index <= params.n(), "variable index out of range");
  const double mu = params.mu_at(letter.index);
  const int i = label_of(letter);
  TruncatedFockVector source = v;
  if (result_cap >= 0) source.prune(-1.0, result_cap - 1);
  TruncatedFockVector out(v.max_level());
  if (!letter.starred) {
    TruncatedFockVector created = create_apply(i, source);
    created *= 1.0 / mu;
    TruncatedFockVector killed = annihilate_apply(-i, v, params.q);
    killed *= mu;
    out += created;
    out += killed;
  } else {
    TruncatedFockVector killed = annihilate_apply(i, v, params.q);
    killed *= 1.0 / mu;
    TruncatedFockVector created = create_apply(-i, source);
    created *= mu;
    out += killed;
    out += created;
  }
  return out;
}

Complex moment(const FockWord& w, const QParams& params) { return moment(Polynomial::word(w), params); }

Complex moment(const Polynomial& p, const QParams& params) {
  params.validate();
  require(p.degree() <= static_cast<std::size_t>(kMaxWordLength), "words are capped at length 10");
  require(p.max_index() <= params.n(), "polynomial uses more variables than the model has");
  Complex total = 0.0;
  for (const Term& t : p.terms()) {
    const int length = static_cast<int>(t.factors.size());
    if (length % 2 == 1) continue;  // parity grading
    require(2 * params.max_level >= length, "truncation level below half the word length");
    TruncatedFockVector v = TruncatedFockVector::vacuum(params.max_level);
    for (int f = length - 1; f >= 0; --f) {
      TruncatedFockVector next(params.max_level);
      for (const auto& [c, letter] : t.factors[static_cast<std::size_t>(f)].terms) {
        TruncatedFockVector part = apply_letter(letter, v, params, f);
        part *= c;
        next += part;
      }
      // Components above the remaining letter count cannot return to Omega.
      next.prune(-1.0, f);
      v = std::move(next);
    }
    total += t.coef * v.omega();
  }
  return total;
}

Complex pair_partition_moment(const FockWord& w, const QParams& params) {
  params.validate(true);
  require(w.size() <= static_cast<std::size_t>(kMaxWordLength), "words are capped at length 10");
  require(max_index(w) <= params.n(), "word uses more variables than the model has");
  const std::size_t k = w.size();
  if (k % 2 == 1) return 0.0;
  // cov(a, b) for a < b: w_a acts as annihilator, w_b as creator.
  auto cov = [&](const FockLetter& a, const FockLetter& b) -> double {
    if (a.index != b.index || a.starred == b.starred) return 0.0;
    const double mu = params.mu_at(a.index);
    return a.starred ? 1.0 / (mu * mu) : mu * mu;
  };
  std::vector<int> partner(k, -1);
  double total = 0.0;
  std::function<void(double)> dfs = [&](double weight) {
    std::size_t a = 0;
    while (a < k && partner[a] >= 0) ++a;
    if (a == k) {
      int crossings = 0;
      for (std::size_t x = 0; x < k; ++x) {
        const auto y = static_cast<std::size_t>(partner[x]);
        if (y < x) continue;
        for (std::size_t u = x + 1; u < y; ++u)
          if (static_cast<std::size_t>(partner[u]) > y) ++crossings;
      }
      total += weight * std::pow(params.q, crossings);
      return;
    }
    for (std::size_t b = a + 1; b < k; ++b) {
      if (partner[b] >= 0) continue;
      const double c = cov(w[a], w[b]);
      if (c == 0.0) continue;
      partner[a] = static_cast<int>(b);
      partner[b] = static_cast<int>(a);
      dfs(weight * c);
      partner[a] = partner[b] = -1;
    }
  };
  dfs(1.0);
  return total;
}

Complex pair_partition_moment(const Polynomial& p, const QParams& params) {
  Complex total = 0.0;
  for (const auto& [c, w] : p.words()) total += c * pair_partition_moment(w, params);
  return total;
}

Complex moment_oracle(const Polynomial& p, const QParams& params) {
  if (params.q == -1.0) return pair_partition_moment(p, params);
  return moment(p, params);
}

TruncatedFockVector second_quantize_OU(const TruncatedFockVector& v, double t) {
  require(t >= 0.0 && std::isfinite(t), "time must be finite and >= 0");
  TruncatedFockVector out = v;
  for (int k = 1; k <= out.max_level(); ++k) {
    const double scale = std::exp(-t * k);
    for (auto& entry : out.level(k)) entry.second *= scale;
  }
  return out;
}

}  // namespace qhyper
