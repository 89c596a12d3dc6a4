#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "qhyper/polynomial.hpp"

namespace qhyper {

/// Pair (i, j) with 1 <= i <= n, 1 <= j <= m is flattened to f = (i-1)m + j;
/// its partner (-i, -j) is -f. The lexicographic order on pairs is the integer
/// order on flat indices, so the baby Fock sign rule carries over unchanged.
int flat_pair_index(int i, int j, int m);

/// Random signs epsilon(P, Q) on unordered pairs of positive pairs, -1 with
/// probability (1-q)/2. Each entry hashes (seed, P, Q) with P, Q keyed by
/// (i, j) rather than the flat index, so samples for different m are nested.
class BigSignSample {
 public:
  BigSignSample(double q, int n, int m, std::uint64_t seed);

  int n() const { return n_; }
  int m() const { return m_; }
  int size() const { return n_ * m_; }
  double q() const { return q_; }
  std::uint64_t seed() const { return seed_; }

  /// Sign on signed flat indices: -1 on the diagonal |a| = |b|.
  int operator()(int a, int b) const;
  int pair(int a, int b) const;  ///< 1 <= a < b <= size()

 private:
  double q_;
  int n_;
  int m_;
  std::uint64_t seed_;
  std::vector<std::int8_t> table_;
};

BigSignSample sample_signs(double q, int n, int m, std::uint64_t seed);

/// Sets of signed flat indices packed into 64 bits: six 10-bit slots holding
/// f + 512 in ascending order. Supports n*m <= 511 and sets of size <= 6.
class SparseVacuumState {
 public:
  using Key = std::uint64_t;
  static constexpr double kPruneTolerance = 1e-15;

  static SparseVacuumState vacuum();
  const std::map<Key, Complex>& entries() const { return entries_; }
  std::map<Key, Complex>& entries() { return entries_; }
  Complex coefficient(const std::vector<int>& set) const;
  void add(Key key, Complex c) { entries_[key] += c; }
  void prune();
  std::size_t size() const { return entries_.size(); }

  static Key pack(const std::vector<int>& sorted_set);
  static std::vector<int> unpack(Key key);

 private:
  std::map<Key, Complex> entries_;
};

/// <xi, eta> in the orthonormal basis x_A.
Complex sparse_inner(const SparseVacuumState& xi, const SparseVacuumState& eta);

/// gamma_{(i,j)} = mu_i^-1 beta^*_f + mu_i beta_-f (or its adjoint) on a state.
SparseVacuumState gamma_apply_sparse(int i, int j, bool starred, const SparseVacuumState& state,
                                     const BigSignSample& sample, const std::vector<double>& mu);
/// s_{i,m} = m^(-1/2) sum_j gamma_{(i,j)} (or its adjoint).
SparseVacuumState s_apply(int i, bool starred, const SparseVacuumState& state, const BigSignSample& sample,
                          const std::vector<double>& mu);

/// tau^epsilon(p(s, s^*)) for one fixed sign sample, evaluated as
/// <F_h^* .. F_1^* x_0, F_{h+1} .. F_k x_0> with h = floor(k/2).
Complex clt_sample_moment(const Polynomial& p, const BigSignSample& sample, const std::vector<double>& mu);
/// Same value from dense matrices of the baby Fock model on n*m indices (n*m <= 6).
Complex clt_dense_moment(const Polynomial& p, const BigSignSample& sample, const std::vector<double>& mu);

struct CltEstimate {
  Complex mean;
  double standard_error = 0.0;  ///< standard error of the complex mean
  int samples = 0;
};

/// Monte-Carlo mean over `samples` sign samples; sample k uses seed derive_seed(seed, k).
CltEstimate clt_estimate(const Polynomial& p, double q, const std::vector<double>& mu, int m, int samples,
                         std::uint64_t seed);

struct ConvergenceRow {
  int m = 0;
  CltEstimate estimate;
  Complex oracle;
  double abs_err = 0.0;
};

struct Trajectory {
  std::uint64_t seed = 0;
  std::vector<Complex> values;  ///< single-sample moments, one per m
};

struct ConvergenceReport {
  std::vector<ConvergenceRow> rows;
  std::vector<Trajectory> trajectories;
  /// Header m,mean_re,mean_im,stderr,oracle_re,oracle_im,abs_err plus one line per row.
  std::string to_csv() const;
};

/// Seeds of the pinned single-sample trajectories.
inline constexpr std::uint64_t kTrajectorySeeds[3] = {11, 23, 47};

ConvergenceReport convergence_report(const Polynomial& p, double q, const std::vector<double>& mu,
                                     const std::vector<int>& m_list, int samples, std::uint64_t seed);

}  // namespace qhyper
