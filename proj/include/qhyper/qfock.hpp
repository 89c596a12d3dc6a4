#pragma once

#include <map>
#include <vector>

#include "qhyper/polynomial.hpp"

namespace qhyper {

/// Parameters of the q-deformed Fock model with labels +-1..+-n.
struct QParams {
  double q = 0.0;
  std::vector<double> mu;  ///< mu_i >= 1, one per variable
  int max_level = 5;       ///< truncation L

  int n() const { return static_cast<int>(mu.size()); }
  double mu_at(int index) const { return mu[static_cast<std::size_t>(index - 1)]; }
  /// Checks -1 <= q < 1 (strictly above -1 unless `allow_minus_one`), mu_i >= 1, L >= 0.
  void validate(bool allow_minus_one = false) const;
};

/// Elementary tensor e_{j_1} (x) ... (x) e_{j_k}; labels are nonzero integers.
using FockBasisWord = std::vector<int>;

/// Finite linear combination of elementary tensors, graded by level.
class TruncatedFockVector {
 public:
  using Level = std::map<FockBasisWord, Complex>;

  explicit TruncatedFockVector(int max_level);
  static TruncatedFockVector vacuum(int max_level);
  static TruncatedFockVector basis(const FockBasisWord& word, int max_level);

  int max_level() const { return static_cast<int>(levels_.size()) - 1; }
  const Level& level(int k) const { return levels_.at(static_cast<std::size_t>(k)); }
  Level& level(int k) { return levels_.at(static_cast<std::size_t>(k)); }
  /// Coefficient of the vacuum.
  Complex omega() const;

  void add(const FockBasisWord& word, Complex c);
  TruncatedFockVector& operator+=(const TruncatedFockVector& other);
  TruncatedFockVector& operator*=(Complex c);
  /// Drops entries with |c| <= tolerance and every level above `keep_levels`.
  void prune(double tolerance, int keep_levels);
  std::size_t support_size() const;

 private:
  std::vector<Level> levels_;
};

/// l(e_label): prepends the label. Throws InvalidArgument on level overflow.
TruncatedFockVector create_apply(int label, const TruncatedFockVector& v);
/// l^*(e_label): (j_1..j_k) -> sum over m with j_m = label of q^(m-1) (j without position m).
TruncatedFockVector annihilate_apply(int label, const TruncatedFockVector& v, double q);

/// sum over permutations pi with v o pi = u of q^inv(pi).
double gram_entry(const FockBasisWord& u, const FockBasisWord& v, double q);
/// Gram matrix of same-level words (level <= 8).
RealMatrix gram_matrix(const std::vector<FockBasisWord>& words, double q);
/// <xi, eta>_q, antilinear in xi.
Complex q_inner(const TruncatedFockVector& xi, const TruncatedFockVector& eta, double q);

/// All words of length k over labels +-1..+-n.
std::vector<FockBasisWord> all_words(int k, int n);
/// Minimum eigenvalue of the Gram matrix of the given distinct level-k words.
double positivity_check(int k, double q, const std::vector<FockBasisWord>& words);

/// g_i = mu_i^-1 l(e_i) + mu_i l^*(e_-i) and g_i^* = mu_i^-1 l^*(e_i) + mu_i l(e_-i).
/// Components that would land above `result_cap` (when >= 0) are dropped.
TruncatedFockVector apply_letter(const FockLetter& letter, const TruncatedFockVector& v, const QParams& params,
                                 int result_cap = -1);

/// <Omega, w Omega>_q by applying the letters right to left (-1 < q < 1).
Complex moment(const FockWord& w, const QParams& params);
/// Same for a polynomial, applying each linear form once.
Complex moment(const Polynomial& p, const QParams& params);

/// q-Wick sum over pair partitions weighted by q^crossings with covariances
/// cov(g_i, g_i^*) = mu_i^2 and cov(g_i^*, g_i) = mu_i^-2. Admits q = -1.
Complex pair_partition_moment(const FockWord& w, const QParams& params);
Complex pair_partition_moment(const Polynomial& p, const QParams& params);

/// Operator path for -1 < q < 1, pair partitions at q = -1.
Complex moment_oracle(const Polynomial& p, const QParams& params);

/// Scales level k by e^(-k t).
TruncatedFockVector second_quantize_OU(const TruncatedFockVector& v, double t);

}  // namespace qhyper
