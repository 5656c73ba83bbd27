#ifndef MAGREP_TYPES_HPP
#define MAGREP_TYPES_HPP

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <vector>

namespace magrep {

using cplx = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using RMat = Eigen::MatrixXd;
using CVec = Eigen::VectorXcd;
using RVec = Eigen::VectorXd;

/// Element ids index the rows of a group's Cayley table.
using ElementId = int;

inline constexpr cplx kI{0.0, 1.0};

/// Largest entry modulus; all residuals in this library use this norm.
template <typename Derived>
double max_abs(const Eigen::MatrixBase<Derived>& m) {
  if (m.size() == 0) return 0.0;
  return m.cwiseAbs().maxCoeff();
}

/// conj^s: identity for s = 0, entrywise conjugation for s = 1.
inline CMat conj_if(const CMat& m, bool s) { return s ? CMat(m.conjugate()) : m; }

template <typename A, typename B>
auto kron(const Eigen::MatrixBase<A>& a, const Eigen::MatrixBase<B>& b) {
  using Scalar = typename A::Scalar;
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> out = Eigen::kroneckerProduct(a.eval(), b.eval());
  return out;
}

inline CMat kron3(const CMat& a, const CMat& b, const CMat& c) { return kron(a, kron(b, c)); }

/// Seeded source of the random numbers the algorithms need (mt19937_64).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double normal() { return normal_(engine_); }
  double uniform(double lo = -1.0, double hi = 1.0) {
    return std::uniform_real_distribution<double>(lo, hi)(engine_);
  }
  int uniform_int(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(engine_); }
  cplx complex_normal() { return {normal() / std::sqrt(2.0), normal() / std::sqrt(2.0)}; }
  cplx phase() { return std::polar(1.0, uniform(-M_PI, M_PI)); }

  CMat complex_gaussian(int rows, int cols) {
    CMat m(rows, cols);
    for (int j = 0; j < cols; ++j)
      for (int i = 0; i < rows; ++i) m(i, j) = complex_normal();
    return m;
  }

  RMat real_gaussian(int rows, int cols) {
    RMat m(rows, cols);
    for (int j = 0; j < cols; ++j)
      for (int i = 0; i < rows; ++i) m(i, j) = normal();
    return m;
  }

  CMat hermitian(int d) {
    CMat a = complex_gaussian(d, d);
    return (a + a.adjoint()) / 2.0;
  }

  /// Haar-ish random unitary from the QR factorization of a complex Gaussian matrix.
  CMat unitary(int d) {
    Eigen::HouseholderQR<CMat> qr(complex_gaussian(d, d));
    CMat q = qr.householderQ();
    CMat r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int i = 0; i < d; ++i) {
      const double a = std::abs(r(i, i));
      if (a > 0) q.col(i) *= r(i, i) / a;
    }
    return q;
  }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

/// Real coordinates of a Hermitian matrix (isometric for the Frobenius norm).
/// Layout: diagonal entries first, then sqrt(2)*(Re, Im) of each upper entry, row by row.
inline RVec hermitian_to_real(const CMat& h) {
  const int d = static_cast<int>(h.rows());
  RVec v(d * d);
  int k = 0;
  for (int i = 0; i < d; ++i) v(k++) = h(i, i).real();
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j) {
      v(k++) = std::sqrt(2.0) * h(i, j).real();
      v(k++) = std::sqrt(2.0) * h(i, j).imag();
    }
  return v;
}

inline CMat real_to_hermitian(const RVec& v, int d) {
  CMat h = CMat::Zero(d, d);
  int k = 0;
  for (int i = 0; i < d; ++i) h(i, i) = v(k++);
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j) {
      const double re = v(k++) / std::sqrt(2.0);
      const double im = v(k++) / std::sqrt(2.0);
      h(i, j) = {re, im};
      h(j, i) = {re, -im};
    }
  return h;
}

inline double anti_hermitian_part(const CMat& m) { return max_abs(CMat(m - m.adjoint())) / 2.0; }

}  // namespace magrep

#endif
