#pragma once

#include "qhyper/common.hpp"

namespace qhyper {

/// Eigenvalues in descending order with matching unitary eigenvectors.
struct HermitianSpectrum {
  RealVector eigenvalues;
  Matrix eigenvectors;

  Matrix reconstruct() const;
};

/// Rejects inputs with ||A - A^*||_F > 1e-10 ||A||_F.
HermitianSpectrum eig_hermitian(const Matrix& a);
/// Ascending eigenvalues only; same Hermiticity contract.
RealVector eigenvalues_hermitian(const Matrix& a);
double min_eigenvalue(const Matrix& a);

/// Matrices up to this size get a Jacobi SVD; larger ones go through the
/// spectrum of A^*A with singular values below ~sqrt(eps) sigma_max dropped.
inline constexpr Eigen::Index kJacobiLimit = 128;

/// Singular values in descending order.
RealVector singular_values(const Matrix& a);
/// sum_k s_k^p over a list of singular values.
double power_sum(const RealVector& singular, double p);
/// sum_k sigma_k^p.
double schatten_power_sum(const Matrix& a, double p);
/// (sum_k sigma_k^p)^(1/p), p >= 1.
double schatten_norm(const Matrix& a, double p);

/// A^alpha for positive semidefinite A. Eigenvalues down to -1e-10 ||A|| are
/// clamped to zero; anything more negative is rejected.
Matrix psd_power(const Matrix& a, double alpha);

/// Divided differences of f(x) = x^r on (0, inf). Arguments closer than a
/// relative gap of 1e-7 are treated as equal and use the analytic limit.
class PowerDividedDifferences {
 public:
  static constexpr double kConfluenceGap = 1e-7;

  explicit PowerDividedDifferences(double exponent) : r_(exponent) {}

  double exponent() const { return r_; }
  double value(double a) const;
  double derivative(double a) const;
  double second_derivative(double a) const;

  /// f_1(a, b); f'(a) on the diagonal.
  double first(double a, double b) const;
  /// f_2(a, b, c) = (f_1(a, c) - f_1(b, c)) / (a - b) with confluent limits.
  double second(double a, double b, double c) const;

 private:
  static bool close(double a, double b);
  double r_;
};

/// D f(x)[h] for f(x) = x^(p/2), as sum_{s,t} f_1(s,t) p_s h p_t.
Matrix frechet1(const Matrix& x, const Matrix& h, double p);
/// D^2 f(x)[h, h] = 2 sum_{s,t,u} f_2(s,t,u) p_s h p_t h p_u.
Matrix frechet2(const Matrix& x, const Matrix& h, double p);

/// c_{p,lambda} = (lambda^p - 1) / ((lambda^2 - 1)(1 - lambda^-2)) - p lambda^2 / (2 (lambda^2 - 1)).
double c_coeff(double p, double lambda);

/// Coefficient of eps^2 in ||(1 + eps g) d||_p^p when d g = lambda g d:
/// (p/2 + c_{p,lambda}) Tr d^p g^*g + c_{p,1/lambda} Tr d^p g g^*.
/// Requires p > 2, lambda > 1, d invertible self-adjoint, and the
/// commutation relation to 1e-8 relative.
double expansion_second_order(const Matrix& d, const Matrix& g, double p, double lambda);

/// Both Taylor coefficients of eps -> ||(1 + eps g) d||_p^p computed from the
/// Frechet derivatives at x = d^2 (no commutation hypothesis needed).
struct ExpansionCoefficients {
  double first = 0.0;
  double second = 0.0;
};
ExpansionCoefficients expansion_coefficients_frechet(const Matrix& d, const Matrix& g, double p);

}  // namespace qhyper
