#pragma once

#include <cstdint>

#include "qhyper/state.hpp"

namespace qhyper {

/// 0 for unit, 1 for gamma and gamma^*, 2 for y, summed over letters.
int number_degree(const Monomial& w);
/// Degree of the letter at one index only.
int index_degree(const Monomial& w, int index);

// Monomial path: scale each coefficient by exp(-t * degree).
MonomialExpansion apply_OU(const MonomialExpansion& x, double t);
MonomialExpansion apply_Ti(const MonomialExpansion& x, int index, double t);
Matrix apply_OU(const BabyFock& model, const Matrix& x, double t);
Matrix apply_Ti(const BabyFock& model, const Matrix& x, int index, double t);

// GNS path: diagonal scaling of X x_0 by exp(-t |A|) (resp. exp(-t |A n {+-i}|)).
Vector apply_OU_gns(const BabyFock& model, const Vector& xi, double t);
Vector apply_Ti_gns(const BabyFock& model, const Vector& xi, int index, double t);
/// Reassembles the algebra element from the scaled GNS vector.
Matrix apply_OU_via_gns(const BabyFock& model, const Matrix& x, double t);

/// Choi matrix of the two-level factor of T_i^t, in the basis e_11, e_12, e_21, e_22.
Matrix choi_matrix(double t, double mu);
double choi_min_eigenvalue(double t, double mu);
bool is_cp(double t, double mu, double tolerance = 1e-12);
/// lambda(1-lambda)(1+s mu^4)(1+s mu^-4) - s - lambda(1-lambda)(1-s)^2 with s = e^-2t.
double choi_identity_residual(double t, double mu);

struct CpReport {
  int samples = 0;
  double min_eigenvalue = 0.0;   ///< most negative eigenvalue seen, relative to ||Z||
  double state_residual = 0.0;   ///< max |tau(T X) - tau(X)|
  bool pass(double tolerance = 1e-9) const { return min_eigenvalue >= -tolerance && state_residual <= 1e-10; }
};

/// Applies T_i^t (x) id to random positive elements Z = R^* R of the algebra
/// tensored with M_k, k cycling through 1..max_block.
CpReport cp_randomized_check(const BabyFock& model, int index, double t, int samples, std::uint64_t seed,
                             int max_block = 4);

/// ||P_t(X) D^(1/2)||_2^2 for X = a + gamma_n b + gamma_n^* c + y_n d against
/// the sum of the four weighted squared norms in the smaller model.
Comparison pythagoras_check(const Subalgebra& sub, const MonomialExpansion& a, const MonomialExpansion& b,
                            const MonomialExpansion& c, const MonomialExpansion& d, double t);

}  // namespace qhyper
