#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <tuple>
#include <vector>

#include "qhyper/common.hpp"

namespace qhyper {

/// Commutation signs between distinct gaussian indices. Only the pairs
/// 1 <= k < l <= n are stored; the full function on I = {+-1..+-n} is
/// symmetric, sign-blind, and -1 whenever |i| == |j|.
class SignTable {
 public:
  SignTable() = default;
  /// All pair signs +1.
  explicit SignTable(int n);
  /// Explicit entries (k, l, s). Unlisted pairs default to +1.
  SignTable(int n, const std::vector<std::tuple<int, int, int>>& pairs);

  static SignTable constant(int n, int sign);
  /// i.i.d. entries with P(-1) = probability_minus.
  static SignTable random(int n, std::uint64_t seed, double probability_minus = 0.5);

  int n() const { return n_; }
  /// Stored sign for 1 <= k, l <= n, k != l.
  int pair(int k, int l) const;
  void set_pair(int k, int l, int sign);
  /// The full sign function on I x I.
  int operator()(int i, int j) const;

  /// Table on the first k indices.
  SignTable restrict(int k) const;

  std::vector<std::tuple<int, int, int>> pairs() const;

  /// {"n": n, "pairs": [[k, l, s], ...]}
  std::string to_json() const;
  static SignTable from_json(const std::string& text);

  friend bool operator==(const SignTable&, const SignTable&) = default;

 private:
  std::size_t slot(int k, int l) const;

  int n_ = 0;
  std::vector<std::int8_t> entries_;
};

/// A subset A of I, stored as 2n bits in the order -n < ... < -1 < 1 < ... < n.
struct IndexSet {
  std::uint32_t bits = 0;

  static int position(int index, int n) { return index < 0 ? n + index : n + index - 1; }
  static int index_at(int position, int n) { return position < n ? position - n : position - n + 1; }

  bool contains(int index, int n) const { return (bits >> position(index, n)) & 1U; }
  IndexSet with(int index, int n) const { return {bits | (1U << position(index, n))}; }
  IndexSet without(int index, int n) const { return {bits & ~(1U << position(index, n))}; }
  int size() const { return __builtin_popcount(bits); }

  friend bool operator==(IndexSet, IndexSet) = default;
};

IndexSet make_index_set(std::initializer_list<int> indices, int n);

/// Letters of the monomial basis, one per gaussian index.
enum class Letter : std::uint8_t { Unit = 0, Gen = 1, GenStar = 2, Y = 3 };

/// A reduced word w_1 w_2 ... w_n with exactly one letter per index,
/// multiplied in ascending index order.
struct Monomial {
  std::vector<Letter> letters;

  static Monomial unit(int n) { return {std::vector<Letter>(static_cast<std::size_t>(n), Letter::Unit)}; }
  /// Unit word except letter `letter` at index `index`.
  static Monomial single(int n, int index, Letter letter);
  static Monomial from_code(std::size_t code, int n);

  int n() const { return static_cast<int>(letters.size()); }
  Letter at(int index) const { return letters[static_cast<std::size_t>(index - 1)]; }
  /// Base-4 code with index 1 in the lowest digit.
  std::size_t code() const;

  friend bool operator==(const Monomial&, const Monomial&) = default;
};

/// Coordinates of an algebra element in the monomial basis.
class MonomialExpansion {
 public:
  MonomialExpansion() = default;
  explicit MonomialExpansion(int n);
  MonomialExpansion(int n, std::vector<Complex> coefficients);

  int n() const { return n_; }
  std::size_t size() const { return coefficients_.size(); }

  Complex& operator[](const Monomial& w) { return coefficients_[w.code()]; }
  Complex operator[](const Monomial& w) const { return coefficients_[w.code()]; }
  Complex& at_code(std::size_t code) { return coefficients_[code]; }
  Complex at_code(std::size_t code) const { return coefficients_[code]; }

  const std::vector<Complex>& coefficients() const { return coefficients_; }
  std::vector<Complex>& coefficients() { return coefficients_; }

  /// Same element viewed in a model with more indices (unit letters appended).
  MonomialExpansion embed(int n) const;
  /// Drop indices above k. Throws if the element uses them.
  MonomialExpansion restrict(int k, double tolerance = 0.0) const;
  /// True if every nonzero coefficient has unit letters above index k.
  bool supported_below(int k, double tolerance = 0.0) const;

  double norm() const;

  MonomialExpansion& operator+=(const MonomialExpansion& other);
  MonomialExpansion& operator-=(const MonomialExpansion& other);
  MonomialExpansion& operator*=(Complex scale);
  friend MonomialExpansion operator+(MonomialExpansion a, const MonomialExpansion& b) { return a += b; }
  friend MonomialExpansion operator-(MonomialExpansion a, const MonomialExpansion& b) { return a -= b; }
  friend MonomialExpansion operator*(Complex s, MonomialExpansion a) { return a *= s; }

 private:
  int n_ = 0;
  std::vector<Complex> coefficients_;
};

/// n, the weights mu_i >= 1, and the sign table.
struct ModelParams {
  std::vector<double> mu;
  SignTable signs;

  ModelParams() = default;
  ModelParams(std::vector<double> mu_values, SignTable sign_table);

  int n() const { return static_cast<int>(mu.size()); }
  double mu_at(int index) const { return mu[static_cast<std::size_t>(index - 1)]; }
  /// alpha_mu = max_i mu_i.
  double alpha() const;
  void validate() const;
  /// Model on the first k indices.
  ModelParams restrict(int k) const;
};

struct RelationsReport {
  double commutation = 0.0;        ///< gamma_i gamma_j - eps gamma_j gamma_i
  double star_commutation = 0.0;   ///< gamma_i^* gamma_j - eps gamma_j gamma_i^*
  double nilpotency = 0.0;         ///< gamma_i^2 and (gamma_i^*)^2
  double anticommutator = 0.0;     ///< gamma_i^* gamma_i + gamma_i gamma_i^* - (mu^2 + mu^-2)
  double gamma_norm = 0.0;         ///< | ||gamma_i||_op - sqrt(mu^2 + mu^-2) |

  double max_residual() const;
  bool pass(double relation_tolerance = 1e-12, double norm_tolerance = 1e-10) const;
};

/// The twisted baby Fock algebra generated by gamma_1..gamma_n, acting on
/// its 4^n-dimensional GNS space with orthonormal basis {x_A : A subset I}.
/// Immutable after construction.
class BabyFock {
 public:
  explicit BabyFock(ModelParams params);

  const ModelParams& params() const { return params_; }
  int n() const { return params_.n(); }
  std::size_t dim() const { return dim_; }
  std::size_t monomial_count() const { return dim_; }

  /// beta_i^* and beta_i for i in {+-1..+-n}.
  const SparseMatrix& creation(int index) const;
  const SparseMatrix& annihilation(int index) const;
  /// gamma_i = mu_i^-1 beta_i^* + mu_i beta_{-i}, 1 <= i <= n.
  const SparseMatrix& gamma(int index) const;
  const SparseMatrix& gamma_star(int index) const;
  /// y_i = gamma_i^* gamma_i - mu_i^-2.
  const SparseMatrix& y(int index) const;
  const SparseMatrix& letter(int index, Letter letter) const;

  SparseMatrix monomial_sparse(const Monomial& w) const;
  Matrix monomial_matrix(const Monomial& w) const;

  Matrix identity() const { return Matrix::Identity(static_cast<Eigen::Index>(dim_), static_cast<Eigen::Index>(dim_)); }
  Matrix dense(const SparseMatrix& op) const { return Matrix(op); }

  /// <X x_0, x_0>.
  Complex vacuum_state(const Matrix& x) const { return x(0, 0); }
  /// X x_0.
  Vector gns_embed(const Matrix& x) const { return x.col(0); }
  /// W x_0 for a monomial; always a single scaled basis vector.
  Vector monomial_gns(const Monomial& w) const;

  MonomialExpansion monomial_expand(const Matrix& x) const;
  /// Expansion determined by the GNS vector X x_0 alone.
  MonomialExpansion expand_gns(const Vector& xi) const;
  Matrix assemble(const MonomialExpansion& expansion) const;

  /// ||X - assemble(expand(X))||_F / ||X||_F.
  double algebra_residual(const Matrix& x) const;

  /// GNS basis position and coefficient of W_beta x_0.
  std::size_t gns_target(std::size_t code) const { return gns_target_[code]; }
  Complex gns_value(std::size_t code) const { return gns_value_[code]; }
  /// max |coefficient| / min |coefficient| of the monomial-to-GNS bijection.
  double bijection_condition() const { return bijection_condition_; }

  /// Checks the defining relations against `claimed` signs (normally the
  /// model's own table).
  RelationsReport verify_relations(const SignTable& claimed) const;
  RelationsReport verify_relations() const { return verify_relations(params_.signs); }

  /// Sign of moving x_i past the elements of A below i.
  int ordering_sign(int index, IndexSet set) const;

 private:
  std::size_t letter_slot(int index) const;
  Matrix assemble_from(int index, const std::vector<std::size_t>& codes,
                       const MonomialExpansion& expansion) const;

  ModelParams params_;
  std::size_t dim_ = 0;
  std::vector<SparseMatrix> creation_;
  std::vector<SparseMatrix> annihilation_;
  std::vector<SparseMatrix> gamma_;
  std::vector<SparseMatrix> gamma_star_;
  std::vector<SparseMatrix> y_;
  SparseMatrix unit_;
  std::vector<std::size_t> gns_target_;
  std::vector<Complex> gns_value_;
  std::vector<std::size_t> inverse_code_;
  double bijection_condition_ = 0.0;
};

/// Largest singular value of a sparse operator by power iteration on A^*A.
double operator_norm(const SparseMatrix& op, int max_iterations = 1000);

}  // namespace qhyper
