#include "qhyper/babyfock.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <json.hpp>

#include "qhyper/rng.hpp"

namespace qhyper {

namespace {

double max_abs(const SparseMatrix& m) {
  double result = 0.0;
  for (int k = 0; k < m.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(m, k); it; ++it) result = std::max(result, std::abs(it.value()));
  return result;
}

SparseMatrix sparse_identity(std::size_t dim) {
  SparseMatrix id(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  id.setIdentity();
  return id;
}

}  // namespace

// ---------------------------------------------------------------- SignTable

SignTable::SignTable(int n) : n_(n), entries_(static_cast<std::size_t>(n * n), 1) {
  require(n >= 1, "sign table needs n >= 1");
}

SignTable::SignTable(int n, const std::vector<std::tuple<int, int, int>>& pairs) : SignTable(n) {
  for (const auto& [k, l, s] : pairs) set_pair(k, l, s);
}

SignTable SignTable::constant(int n, int sign) {
  SignTable table(n);
  for (int k = 1; k <= n; ++k)
    for (int l = k + 1; l <= n; ++l) table.set_pair(k, l, sign);
  return table;
}

SignTable SignTable::random(int n, std::uint64_t seed, double probability_minus) {
  SignTable table(n);
  Rng rng(seed, 0x5167);
  for (int k = 1; k <= n; ++k)
    for (int l = k + 1; l <= n; ++l) table.set_pair(k, l, rng.uniform() < probability_minus ? -1 : 1);
  return table;
}

std::size_t SignTable::slot(int k, int l) const {
  require(k >= 1 && k <= n_ && l >= 1 && l <= n_ && k != l,
          "sign table pair (" + std::to_string(k) + "," + std::to_string(l) + ") out of range");
  if (k > l) std::swap(k, l);
  return static_cast<std::size_t>((k - 1) * n_ + (l - 1));
}

int SignTable::pair(int k, int l) const { return entries_[slot(k, l)]; }

void SignTable::set_pair(int k, int l, int sign) {
  require(sign == 1 || sign == -1, "sign table entries must be +1 or -1");
  entries_[slot(k, l)] = static_cast<std::int8_t>(sign);
}

int SignTable::operator()(int i, int j) const {
  const int a = std::abs(i);
  const int b = std::abs(j);
  if (a == b) return -1;
  return pair(a, b);
}

SignTable SignTable::restrict(int k) const {
  require(k >= 1 && k <= n_, "cannot restrict sign table to " + std::to_string(k) + " indices");
  SignTable result(k);
  for (int a = 1; a <= k; ++a)
    for (int b = a + 1; b <= k; ++b) result.set_pair(a, b, pair(a, b));
  return result;
}

std::vector<std::tuple<int, int, int>> SignTable::pairs() const {
  std::vector<std::tuple<int, int, int>> out;
  for (int k = 1; k <= n_; ++k)
    for (int l = k + 1; l <= n_; ++l) out.emplace_back(k, l, pair(k, l));
  return out;
}

std::string SignTable::to_json() const {
  nlohmann::json j;
  j["n"] = n_;
  j["pairs"] = nlohmann::json::array();
  for (const auto& [k, l, s] : pairs()) j["pairs"].push_back({k, l, s});
  return j.dump();
}

SignTable SignTable::from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("sign table JSON: ") + e.what());
  }
  require(j.contains("n") && j["n"].is_number_integer(), "sign table JSON needs integer \"n\"");
  SignTable table(j["n"].get<int>());
  if (j.contains("pairs")) {
    for (const auto& entry : j["pairs"]) {
      require(entry.is_array() && entry.size() == 3, "sign table pairs must be [k, l, s]");
      table.set_pair(entry[0].get<int>(), entry[1].get<int>(), entry[2].get<int>());
    }
  }
  return table;
}

// ---------------------------------------------------------------- basis types

IndexSet make_index_set(std::initializer_list<int> indices, int n) {
  IndexSet set;
  for (int i : indices) {
    require(i != 0 && std::abs(i) <= n, "index " + std::to_string(i) + " outside I");
    set = set.with(i, n);
  }
  return set;
}

Monomial Monomial::single(int n, int index, Letter letter) {
  require(index >= 1 && index <= n, "monomial index out of range");
  Monomial w = unit(n);
  w.letters[static_cast<std::size_t>(index - 1)] = letter;
  return w;
}

Monomial Monomial::from_code(std::size_t code, int n) {
  Monomial w = unit(n);
  for (int i = 0; i < n; ++i) {
    w.letters[static_cast<std::size_t>(i)] = static_cast<Letter>(code & 3U);
    code >>= 2;
  }
  return w;
}

std::size_t Monomial::code() const {
  std::size_t code = 0;
  for (std::size_t i = letters.size(); i-- > 0;) code = (code << 2) | static_cast<std::size_t>(letters[i]);
  return code;
}

MonomialExpansion::MonomialExpansion(int n) : n_(n), coefficients_(std::size_t{1} << (2 * n)) {}

MonomialExpansion::MonomialExpansion(int n, std::vector<Complex> coefficients)
    : n_(n), coefficients_(std::move(coefficients)) {
  require(coefficients_.size() == (std::size_t{1} << (2 * n)), "expansion needs 4^n coefficients");
}

MonomialExpansion MonomialExpansion::embed(int n) const {
  require(n >= n_, "cannot embed into a smaller model");
  MonomialExpansion result(n);
  std::copy(coefficients_.begin(), coefficients_.end(), result.coefficients_.begin());
  return result;
}

bool MonomialExpansion::supported_below(int k, double tolerance) const {
  const std::size_t limit = std::size_t{1} << (2 * k);
  for (std::size_t c = limit; c < coefficients_.size(); ++c)
    if (std::abs(coefficients_[c]) > tolerance) return false;
  return true;
}

MonomialExpansion MonomialExpansion::restrict(int k, double tolerance) const {
  require(k <= n_, "cannot restrict to more indices");
  require(supported_below(k, tolerance), "element uses indices above " + std::to_string(k));
  const std::size_t limit = std::size_t{1} << (2 * k);
  return MonomialExpansion(k, std::vector<Complex>(coefficients_.begin(),
                                                   coefficients_.begin() + static_cast<std::ptrdiff_t>(limit)));
}

double MonomialExpansion::norm() const {
  double sum = 0.0;
  for (const Complex& c : coefficients_) sum += std::norm(c);
  return std::sqrt(sum);
}

MonomialExpansion& MonomialExpansion::operator+=(const MonomialExpansion& other) {
  require(other.n_ == n_, "expansions belong to different models");
  for (std::size_t c = 0; c < coefficients_.size(); ++c) coefficients_[c] += other.coefficients_[c];
  return *this;
}

MonomialExpansion& MonomialExpansion::operator-=(const MonomialExpansion& other) {
  require(other.n_ == n_, "expansions belong to different models");
  for (std::size_t c = 0; c < coefficients_.size(); ++c) coefficients_[c] -= other.coefficients_[c];
  return *this;
}

MonomialExpansion& MonomialExpansion::operator*=(Complex scale) {
  for (Complex& c : coefficients_) c *= scale;
  return *this;
}

ModelParams::ModelParams(std::vector<double> mu_values, SignTable sign_table)
    : mu(std::move(mu_values)), signs(std::move(sign_table)) {
  validate();
}

double ModelParams::alpha() const { return *std::max_element(mu.begin(), mu.end()); }

void ModelParams::validate() const {
  require(!mu.empty(), "model needs at least one index");
  require(n() <= kMaxIndices, "model capped at n <= " + std::to_string(kMaxIndices));
  require(signs.n() == n(), "sign table size does not match mu");
  for (double m : mu) require(std::isfinite(m) && m >= 1.0, "mu_i must be finite and >= 1");
}

ModelParams ModelParams::restrict(int k) const {
  require(k >= 1 && k <= n(), "cannot restrict model to " + std::to_string(k) + " indices");
  return ModelParams(std::vector<double>(mu.begin(), mu.begin() + k), signs.restrict(k));
}

double RelationsReport::max_residual() const {
  return std::max({commutation, star_commutation, nilpotency, anticommutator});
}

bool RelationsReport::pass(double relation_tolerance, double norm_tolerance) const {
  return max_residual() <= relation_tolerance && gamma_norm <= norm_tolerance;
}

// ---------------------------------------------------------------- BabyFock

BabyFock::BabyFock(ModelParams params) : params_(std::move(params)) {
  params_.validate();
  const int n = params_.n();
  dim_ = std::size_t{1} << (2 * n);
  const auto d = static_cast<Eigen::Index>(dim_);

  creation_.resize(static_cast<std::size_t>(2 * n));
  annihilation_.resize(static_cast<std::size_t>(2 * n));
  for (int pos = 0; pos < 2 * n; ++pos) {
    const int index = IndexSet::index_at(pos, n);
    std::vector<Eigen::Triplet<Complex>> up;
    std::vector<Eigen::Triplet<Complex>> down;
    for (std::size_t a = 0; a < dim_; ++a) {
      const IndexSet set{static_cast<std::uint32_t>(a)};
      const double sign = ordering_sign(index, set);
      const auto col = static_cast<Eigen::Index>(a);
      if (set.contains(index, n))
        down.emplace_back(static_cast<Eigen::Index>(set.without(index, n).bits), col, sign);
      else
        up.emplace_back(static_cast<Eigen::Index>(set.with(index, n).bits), col, sign);
    }
    SparseMatrix& c = creation_[static_cast<std::size_t>(pos)];
    SparseMatrix& a = annihilation_[static_cast<std::size_t>(pos)];
    c.resize(d, d);
    a.resize(d, d);
    c.setFromTriplets(up.begin(), up.end());
    a.setFromTriplets(down.begin(), down.end());
  }

  unit_ = sparse_identity(dim_);
  for (int i = 1; i <= n; ++i) {
    const double m = params_.mu_at(i);
    SparseMatrix g = creation(i) * Complex(1.0 / m) + annihilation(-i) * Complex(m);
    SparseMatrix gs = SparseMatrix(g.adjoint());
    SparseMatrix yi = SparseMatrix(gs * g) - unit_ * Complex(1.0 / (m * m));
    // mu^-1 * mu^-1 and mu^-2 can differ by an ulp; drop the residue.
    yi.prune(Complex(1.0), 1e-13);
    gamma_.push_back(std::move(g));
    gamma_star_.push_back(std::move(gs));
    y_.push_back(std::move(yi));
  }

  // Each monomial sends x_0 to a single scaled basis vector; record it.
  gns_target_.resize(dim_);
  gns_value_.resize(dim_);
  inverse_code_.assign(dim_, dim_);
  double largest = 0.0;
  double smallest = std::numeric_limits<double>::infinity();
  for (std::size_t code = 0; code < dim_; ++code) {
    const Monomial w = Monomial::from_code(code, n);
    Eigen::Index row = 0;
    Complex value = 1.0;
    for (int i = n; i >= 1; --i) {
      if (w.at(i) == Letter::Unit) continue;
      const SparseMatrix& op = letter(i, w.at(i));
      int count = 0;
      Eigen::Index next = 0;
      Complex factor = 0.0;
      for (SparseMatrix::InnerIterator it(op, row); it; ++it) {
        if (std::abs(it.value()) == 0.0) continue;
        ++count;
        next = it.row();
        factor = it.value();
      }
      ensure(count == 1, "monomial does not map the vacuum to a basis vector");
      row = next;
      value *= factor;
    }
    const auto target = static_cast<std::size_t>(row);
    ensure(inverse_code_[target] == dim_, "monomial-to-GNS map is not injective");
    inverse_code_[target] = code;
    gns_target_[code] = target;
    gns_value_[code] = value;
    largest = std::max(largest, std::abs(value));
    smallest = std::min(smallest, std::abs(value));
  }
  ensure(smallest > 0.0, "monomial-to-GNS map is singular");
  bijection_condition_ = largest / smallest;
}

int BabyFock::ordering_sign(int index, IndexSet set) const {
  const int n = params_.n();
  const int pos = IndexSet::position(index, n);
  int sign = 1;
  for (int j = 0; j < pos; ++j)
    if ((set.bits >> j) & 1U) sign *= params_.signs(index, IndexSet::index_at(j, n));
  return sign;
}

std::size_t BabyFock::letter_slot(int index) const {
  const int n = params_.n();
  require(index != 0 && std::abs(index) <= n, "index " + std::to_string(index) + " outside I");
  return static_cast<std::size_t>(IndexSet::position(index, n));
}

const SparseMatrix& BabyFock::creation(int index) const { return creation_[letter_slot(index)]; }
const SparseMatrix& BabyFock::annihilation(int index) const { return annihilation_[letter_slot(index)]; }

const SparseMatrix& BabyFock::gamma(int index) const {
  require(index >= 1 && index <= n(), "gamma index out of range");
  return gamma_[static_cast<std::size_t>(index - 1)];
}

const SparseMatrix& BabyFock::gamma_star(int index) const {
  require(index >= 1 && index <= n(), "gamma index out of range");
  return gamma_star_[static_cast<std::size_t>(index - 1)];
}

const SparseMatrix& BabyFock::y(int index) const {
  require(index >= 1 && index <= n(), "y index out of range");
  return y_[static_cast<std::size_t>(index - 1)];
}

const SparseMatrix& BabyFock::letter(int index, Letter l) const {
  switch (l) {
    case Letter::Unit: return unit_;
    case Letter::Gen: return gamma(index);
    case Letter::GenStar: return gamma_star(index);
    case Letter::Y: return y(index);
  }
  throw InvalidArgument("unknown letter");
}

SparseMatrix BabyFock::monomial_sparse(const Monomial& w) const {
  require(w.n() == n(), "monomial length does not match model");
  SparseMatrix result = unit_;
  for (int i = 1; i <= n(); ++i) {
    if (w.at(i) == Letter::Unit) continue;
    result = SparseMatrix(result * letter(i, w.at(i)));
  }
  return result;
}

Matrix BabyFock::monomial_matrix(const Monomial& w) const { return Matrix(monomial_sparse(w)); }

Vector BabyFock::monomial_gns(const Monomial& w) const {
  require(w.n() == n(), "monomial length does not match model");
  Vector v = Vector::Zero(static_cast<Eigen::Index>(dim_));
  const std::size_t code = w.code();
  v(static_cast<Eigen::Index>(gns_target_[code])) = gns_value_[code];
  return v;
}

MonomialExpansion BabyFock::expand_gns(const Vector& xi) const {
  require(static_cast<std::size_t>(xi.size()) == dim_, "GNS vector has wrong length");
  MonomialExpansion result(n());
  for (std::size_t code = 0; code < dim_; ++code)
    result.at_code(code) = xi(static_cast<Eigen::Index>(gns_target_[code])) / gns_value_[code];
  return result;
}

MonomialExpansion BabyFock::monomial_expand(const Matrix& x) const {
  require(static_cast<std::size_t>(x.rows()) == dim_ && static_cast<std::size_t>(x.cols()) == dim_,
          "algebra element has wrong shape");
  return expand_gns(x.col(0));
}

Matrix BabyFock::assemble_from(int index, const std::vector<std::size_t>& codes,
                               const MonomialExpansion& expansion) const {
  const auto d = static_cast<Eigen::Index>(dim_);
  if (index > n()) {
    Complex total = 0.0;
    for (std::size_t c : codes) total += expansion.at_code(c);
    return Matrix::Identity(d, d) * total;
  }
  std::vector<std::size_t> groups[4];
  const int shift = 2 * (index - 1);
  for (std::size_t c : codes) groups[(c >> shift) & 3U].push_back(c);
  Matrix result = Matrix::Zero(d, d);
  for (int l = 0; l < 4; ++l) {
    if (groups[l].empty()) continue;
    Matrix tail = assemble_from(index + 1, groups[l], expansion);
    if (l == 0)
      result += tail;
    else
      result += letter(index, static_cast<Letter>(l)) * tail;
  }
  return result;
}

Matrix BabyFock::assemble(const MonomialExpansion& expansion) const {
  require(expansion.n() == n(), "expansion size does not match model");
  std::vector<std::size_t> codes;
  for (std::size_t c = 0; c < dim_; ++c)
    if (expansion.at_code(c) != Complex(0.0)) codes.push_back(c);
  if (codes.empty()) return Matrix::Zero(static_cast<Eigen::Index>(dim_), static_cast<Eigen::Index>(dim_));
  return assemble_from(1, codes, expansion);
}

double BabyFock::algebra_residual(const Matrix& x) const {
  const double scale = x.norm();
  if (scale == 0.0) return 0.0;
  return (x - assemble(monomial_expand(x))).norm() / scale;
}

RelationsReport BabyFock::verify_relations(const SignTable& claimed) const {
  require(claimed.n() == n(), "claimed sign table has wrong size");
  RelationsReport report;
  for (int i = 1; i <= n(); ++i) {
    const SparseMatrix& gi = gamma(i);
    const SparseMatrix& gsi = gamma_star(i);
    for (int j = 1; j <= n(); ++j) {
      if (i == j) continue;
      const Complex eps = static_cast<double>(claimed(i, j));
      const SparseMatrix& gj = gamma(j);
      report.commutation =
          std::max(report.commutation, max_abs(SparseMatrix(gi * gj) - SparseMatrix(gj * gi) * eps));
      report.star_commutation =
          std::max(report.star_commutation, max_abs(SparseMatrix(gsi * gj) - SparseMatrix(gj * gsi) * eps));
    }
    report.nilpotency = std::max({report.nilpotency, max_abs(SparseMatrix(gi * gi)), max_abs(SparseMatrix(gsi * gsi))});
    const double m = params_.mu_at(i);
    const double c = m * m + 1.0 / (m * m);
    report.anticommutator =
        std::max(report.anticommutator, max_abs(SparseMatrix(gsi * gi) + SparseMatrix(gi * gsi) - unit_ * Complex(c)));
    report.gamma_norm = std::max(report.gamma_norm, std::abs(operator_norm(gi) - std::sqrt(c)));
  }
  return report;
}

double operator_norm(const SparseMatrix& op, int max_iterations) {
  if (op.nonZeros() == 0) return 0.0;
  Vector v(op.cols());
  for (Eigen::Index k = 0; k < v.size(); ++k)
    v(k) = Complex(1.0 + 0.37 * std::sin(1.3 * static_cast<double>(k)), 0.21 * std::cos(0.7 * static_cast<double>(k)));
  v.normalize();
  double estimate = 0.0;
  for (int it = 0; it < max_iterations; ++it) {
    Vector w = op.adjoint() * (op * v);
    const double next = std::sqrt(std::abs(v.dot(w)));
    const double wn = w.norm();
    if (wn == 0.0) return 0.0;
    v = w / wn;
    if (it > 2 && std::abs(next - estimate) <= 1e-15 * next) return next;
    estimate = next;
  }
  return estimate;
}

}  // namespace qhyper
