#include "qhyper/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace qhyper {

namespace {

void require_hermitian(const Matrix& a) {
  require(a.rows() == a.cols(), "matrix must be square");
  const double scale = a.norm();
  require((a - a.adjoint()).norm() <= 1e-10 * std::max(scale, 1e-300), "matrix is not Hermitian");
}

}  // namespace

Matrix HermitianSpectrum::reconstruct() const {
  return eigenvectors * eigenvalues.cast<Complex>().asDiagonal() * eigenvectors.adjoint();
}

HermitianSpectrum eig_hermitian(const Matrix& a) {
  require_hermitian(a);
  const Matrix sym = 0.5 * (a + a.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> solver(sym);
  ensure(solver.info() == Eigen::Success, "Hermitian eigensolver failed");
  HermitianSpectrum result;
  result.eigenvalues = solver.eigenvalues().reverse();
  result.eigenvectors = solver.eigenvectors().rowwise().reverse();
  return result;
}

RealVector eigenvalues_hermitian(const Matrix& a) {
  require_hermitian(a);
  const Matrix sym = 0.5 * (a + a.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> solver(sym, Eigen::EigenvaluesOnly);
  ensure(solver.info() == Eigen::Success, "Hermitian eigensolver failed");
  return solver.eigenvalues();
}

double min_eigenvalue(const Matrix& a) { return eigenvalues_hermitian(a)(0); }

RealVector singular_values(const Matrix& a) {
  if (a.size() == 0) return RealVector();
  if (std::min(a.rows(), a.cols()) <= kJacobiLimit) {
    // BDCSVD in Eigen 3.4.0 mis-deflates repeated singular values; Jacobi is exact enough.
    const Eigen::JacobiSVD<Matrix> svd(a);
    return svd.singularValues();
  }
  const Matrix gram = a.adjoint() * a;
  Eigen::SelfAdjointEigenSolver<Matrix> solver(0.5 * (gram + gram.adjoint()), Eigen::EigenvaluesOnly);
  ensure(solver.info() == Eigen::Success, "Hermitian eigensolver failed");
  // Roundoff in A^*A is ~eps * sigma_max^2 per entry; below that a singular value is noise.
  const double floor = 4.0 * std::numeric_limits<double>::epsilon() * static_cast<double>(gram.rows()) *
                       std::max(solver.eigenvalues().maxCoeff(), 0.0);
  RealVector out(solver.eigenvalues().size());
  for (Eigen::Index k = 0; k < out.size(); ++k) {
    const double s2 = solver.eigenvalues()(out.size() - 1 - k);
    out(k) = s2 > floor ? std::sqrt(s2) : 0.0;
  }
  return out;
}

double power_sum(const RealVector& singular, double p) {
  require(p >= 1.0, "Schatten exponent must be >= 1");
  double sum = 0.0;
  for (double s : singular)
    if (s > 0.0) sum += std::pow(s, p);
  return sum;
}

double schatten_power_sum(const Matrix& a, double p) {
  require(p >= 1.0, "Schatten exponent must be >= 1");
  return power_sum(singular_values(a), p);
}

double schatten_norm(const Matrix& a, double p) { return std::pow(schatten_power_sum(a, p), 1.0 / p); }

Matrix psd_power(const Matrix& a, double alpha) {
  HermitianSpectrum spec = eig_hermitian(a);
  const double scale = std::max(std::abs(spec.eigenvalues(0)), std::abs(spec.eigenvalues(spec.eigenvalues.size() - 1)));
  const double floor = -1e-10 * scale;
  RealVector powered(spec.eigenvalues.size());
  for (Eigen::Index k = 0; k < powered.size(); ++k) {
    double s = spec.eigenvalues(k);
    require(s >= floor, "psd_power: matrix is not positive semidefinite");
    s = std::max(s, 0.0);
    require(alpha >= 0.0 || s > 0.0, "psd_power: negative power of a singular matrix");
    powered(k) = (s == 0.0 && alpha == 0.0) ? 1.0 : std::pow(s, alpha);
  }
  return spec.eigenvectors * powered.cast<Complex>().asDiagonal() * spec.eigenvectors.adjoint();
}

// ---------------------------------------------------------------- divided differences

bool PowerDividedDifferences::close(double a, double b) {
  return std::abs(a - b) <= kConfluenceGap * std::max(std::abs(a), std::abs(b));
}

double PowerDividedDifferences::value(double a) const { return std::pow(a, r_); }
double PowerDividedDifferences::derivative(double a) const { return r_ * std::pow(a, r_ - 1.0); }
double PowerDividedDifferences::second_derivative(double a) const { return r_ * (r_ - 1.0) * std::pow(a, r_ - 2.0); }

double PowerDividedDifferences::first(double a, double b) const {
  if (close(a, b)) return derivative(0.5 * (a + b));
  // b^(r-1) (u^r - 1) / (u - 1) with u = a / b, free of cancellation.
  const double log_u = std::log(a / b);
  return std::pow(b, r_ - 1.0) * std::expm1(r_ * log_u) / std::expm1(log_u);
}

double PowerDividedDifferences::second(double a, double b, double c) const {
  double v[3] = {a, b, c};
  std::sort(v, v + 3);
  const double x = v[0];
  const double y = v[1];
  const double z = v[2];
  const bool low = close(x, y);
  const bool high = close(y, z);
  if (low && high) return 0.5 * second_derivative((x + y + z) / 3.0);
  if (low) {
    const double m = 0.5 * (x + y);
    return (first(m, z) - derivative(m)) / (z - m);
  }
  if (high) {
    const double m = 0.5 * (y + z);
    return (derivative(m) - first(x, m)) / (m - x);
  }
  return (first(y, z) - first(x, y)) / (z - x);
}

// ---------------------------------------------------------------- Frechet derivatives

namespace {

struct PositiveSpectrum {
  RealVector values;
  Matrix vectors;
};

PositiveSpectrum positive_definite_spectrum(const Matrix& x) {
  HermitianSpectrum spec = eig_hermitian(x);
  const double top = spec.eigenvalues(0);
  const double bottom = spec.eigenvalues(spec.eigenvalues.size() - 1);
  require(top > 0.0 && bottom > 1e-8 * top, "Frechet derivative needs a positive definite matrix");
  return {spec.eigenvalues, spec.eigenvectors};
}

}  // namespace

Matrix frechet1(const Matrix& x, const Matrix& h, double p) {
  require(h.rows() == x.rows() && h.cols() == x.cols(), "direction has wrong shape");
  const PositiveSpectrum spec = positive_definite_spectrum(x);
  const PowerDividedDifferences f(0.5 * p);
  Matrix ht = spec.vectors.adjoint() * h * spec.vectors;
  const Eigen::Index m = ht.rows();
  for (Eigen::Index j = 0; j < m; ++j)
    for (Eigen::Index i = 0; i < m; ++i) ht(i, j) *= f.first(spec.values(i), spec.values(j));
  return spec.vectors * ht * spec.vectors.adjoint();
}

Matrix frechet2(const Matrix& x, const Matrix& h, double p) {
  require(h.rows() == x.rows() && h.cols() == x.cols(), "direction has wrong shape");
  const PositiveSpectrum spec = positive_definite_spectrum(x);
  const PowerDividedDifferences f(0.5 * p);
  const Matrix ht = spec.vectors.adjoint() * h * spec.vectors;
  const Eigen::Index m = ht.rows();
  Matrix out = Matrix::Zero(m, m);
  for (Eigen::Index j = 0; j < m; ++j)
    for (Eigen::Index i = 0; i < m; ++i) {
      Complex sum = 0.0;
      for (Eigen::Index k = 0; k < m; ++k)
        sum += f.second(spec.values(i), spec.values(k), spec.values(j)) * ht(i, k) * ht(k, j);
      out(i, j) = 2.0 * sum;
    }
  return spec.vectors * out * spec.vectors.adjoint();
}

double c_coeff(double p, double lambda) {
  require(p > 2.0, "c_coeff needs p > 2");
  require(lambda > 0.0 && std::isfinite(lambda), "c_coeff needs lambda > 0");
  require(std::abs(lambda - 1.0) > 1e-12, "c_coeff is undefined at lambda = 1");
  const double l2 = lambda * lambda;
  return (std::pow(lambda, p) - 1.0) / ((l2 - 1.0) * (1.0 - 1.0 / l2)) - p * l2 / (2.0 * (l2 - 1.0));
}

double expansion_second_order(const Matrix& d, const Matrix& g, double p, double lambda) {
  require(p > 2.0, "expansion needs p > 2");
  require(lambda > 1.0, "expansion needs lambda > 1");
  require(d.rows() == d.cols() && g.rows() == d.rows() && g.cols() == d.cols(), "shape mismatch");
  const HermitianSpectrum spec = eig_hermitian(d);
  const double top = spec.eigenvalues.cwiseAbs().maxCoeff();
  require(spec.eigenvalues.cwiseAbs().minCoeff() > 1e-12 * top, "d must be invertible");
  const double scale = std::max(d.norm() * g.norm(), 1e-300);
  require((d * g - lambda * g * d).norm() <= 1e-8 * lambda * scale, "d g = lambda g d does not hold");

  RealVector abs_pow(spec.eigenvalues.size());
  for (Eigen::Index k = 0; k < abs_pow.size(); ++k) abs_pow(k) = std::pow(std::abs(spec.eigenvalues(k)), p);
  const Matrix dp = spec.eigenvectors * abs_pow.cast<Complex>().asDiagonal() * spec.eigenvectors.adjoint();
  const double gsg = (dp * g.adjoint() * g).trace().real();
  const double ggs = (dp * g * g.adjoint()).trace().real();
  return (0.5 * p + c_coeff(p, lambda)) * gsg + c_coeff(p, 1.0 / lambda) * ggs;
}

ExpansionCoefficients expansion_coefficients_frechet(const Matrix& d, const Matrix& g, double p) {
  require(d.rows() == d.cols() && g.rows() == d.rows() && g.cols() == d.cols(), "shape mismatch");
  const Matrix x = d.adjoint() * d;
  const Matrix h1 = d.adjoint() * (g + g.adjoint()) * d;
  const Matrix h2 = d.adjoint() * g.adjoint() * g * d;
  ExpansionCoefficients out;
  out.first = frechet1(x, h1, p).trace().real();
  out.second = frechet1(x, h2, p).trace().real() + 0.5 * frechet2(x, h1, p).trace().real();
  return out;
}

}  // namespace qhyper
