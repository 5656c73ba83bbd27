#ifndef MAGREP_LINALG_HPP
#define MAGREP_LINALG_HPP

#include "magrep/error.hpp"
#include "magrep/types.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <numeric>
#include <vector>

namespace magrep {

template <typename Scalar>
using DMat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
struct EigenSystemT {
  RVec values;
  DMat<Scalar> vectors;
};
using EigenSystem = EigenSystemT<cplx>;

template <typename Scalar>
EigenSystemT<Scalar> eigh(const DMat<Scalar>& a, double tol = 1e-9) {
  require(a.rows() == a.cols(), ErrorCode::DimensionMismatch, "eigh needs a square matrix");
  const double scale = std::max(1.0, max_abs(a));
  require(max_abs(DMat<Scalar>(a - a.adjoint())) <= tol * scale, ErrorCode::NotHermitian, "matrix is not Hermitian");
  if (a.rows() == 0) return {RVec(0), DMat<Scalar>(0, 0)};
  Eigen::SelfAdjointEigenSolver<DMat<Scalar>> es((a + a.adjoint()) / 2.0);
  return {es.eigenvalues(), es.eigenvectors()};
}

inline EigenSystem eigh(const CMat& a, double tol = 1e-9) { return eigh<cplx>(a, tol); }

/// Groups ascending values into runs whose consecutive gaps are at most `tol`.
/// Returns the run index of each entry (in the given order, which must be sorted).
inline std::vector<int> cluster_sorted(const RVec& values, double tol) {
  std::vector<int> out(values.size(), 0);
  for (Eigen::Index i = 1; i < values.size(); ++i) out[i] = out[i - 1] + (values(i) - values(i - 1) > tol ? 1 : 0);
  return out;
}

/// Cluster labels for unsorted values; labels are ordered by ascending value.
inline std::vector<int> cluster_values(const RVec& values, double tol) {
  std::vector<int> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return values(a) < values(b); });
  std::vector<int> labels(values.size(), 0);
  int cur = 0;
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (i > 0 && values(order[i]) - values(order[i - 1]) > tol) ++cur;
    labels[order[i]] = cur;
  }
  return labels;
}

template <typename Scalar>
struct SimultaneousDiag {
  DMat<Scalar> basis;
  /// values[k](j): diagonal entry of basis^dagger A_k basis in column j.
  std::vector<RVec> values;
  /// labels[k][j]: cluster index of values[k](j) at the matrix's threshold.
  std::vector<std::vector<int>> labels;
  std::vector<double> thresholds;
  double offdiag_residual = 0.0;
};

namespace detail {

template <typename Scalar>
void split_cluster(const std::vector<DMat<Scalar>>& family, const std::vector<double>& thr, std::size_t k,
                   const DMat<Scalar>& q, std::vector<DMat<Scalar>>& out) {
  if (q.cols() <= 1 || k == family.size()) {
    out.push_back(q);
    return;
  }
  const DMat<Scalar> c = q.adjoint() * family[k] * q;
  Eigen::SelfAdjointEigenSolver<DMat<Scalar>> es((c + c.adjoint()) / 2.0);
  const std::vector<int> lab = cluster_sorted(es.eigenvalues(), thr[k]);
  int start = 0;
  const int n = static_cast<int>(lab.size());
  for (int i = 1; i <= n; ++i) {
    if (i == n || lab[i] != lab[start]) {
      const DMat<Scalar> sub = q * es.eigenvectors().middleCols(start, i - start);
      split_cluster(family, thr, k + 1, sub, out);
      start = i;
    }
  }
}

}  // namespace detail

/// Common eigenbasis of a commuting Hermitian family. A seeded random real
/// combination is diagonalized first; remaining degenerate clusters are split
/// by each family member in order. Columns are sorted lexicographically by the
/// tuple of per-matrix cluster labels.
template <typename Scalar>
SimultaneousDiag<Scalar> simultaneous_diag(const std::vector<DMat<Scalar>>& family, std::uint64_t seed,
                                           double tol = 1e-8) {
  require(!family.empty(), ErrorCode::InvalidArgument, "simultaneous_diag needs at least one matrix");
  const Eigen::Index d = family.front().rows();
  std::vector<double> thr;
  std::vector<double> norms;
  for (const auto& a : family) {
    require(a.rows() == d && a.cols() == d, ErrorCode::DimensionMismatch, "family matrices differ in size");
    const double na = max_abs(a);
    require(max_abs(DMat<Scalar>(a - a.adjoint())) <= tol * std::max(1.0, na), ErrorCode::NotHermitian,
            "family member is not Hermitian");
    norms.push_back(na);
    thr.push_back(tol * std::max(1.0, na));
  }
  for (std::size_t i = 0; i < family.size(); ++i)
    for (std::size_t j = i + 1; j < family.size(); ++j) {
      const DMat<Scalar> comm = family[i] * family[j] - family[j] * family[i];
      require(max_abs(comm) <= tol * std::max(1.0, norms[i]) * std::max(1.0, norms[j]), ErrorCode::NotCommuting,
              "family members " + std::to_string(i) + " and " + std::to_string(j) + " do not commute");
    }

  SimultaneousDiag<Scalar> out;
  out.thresholds = thr;
  if (d == 0) {
    out.basis = DMat<Scalar>(0, 0);
    out.values.assign(family.size(), RVec(0));
    out.labels.assign(family.size(), {});
    return out;
  }

  Rng rng(seed);
  DMat<Scalar> mix = DMat<Scalar>::Zero(d, d);
  for (std::size_t k = 0; k < family.size(); ++k)
    mix += (rng.uniform(0.5, 1.5) / std::max(1.0, norms[k])) * family[k];
  Eigen::SelfAdjointEigenSolver<DMat<Scalar>> es((mix + mix.adjoint()) / 2.0);
  const std::vector<int> lab = cluster_sorted(es.eigenvalues(), tol * static_cast<double>(family.size()));

  std::vector<DMat<Scalar>> pieces;
  int start = 0;
  for (int i = 1; i <= static_cast<int>(d); ++i) {
    if (i == d || lab[i] != lab[start]) {
      detail::split_cluster(family, thr, 0, DMat<Scalar>(es.eigenvectors().middleCols(start, i - start)), pieces);
      start = i;
    }
  }
  DMat<Scalar> u(d, d);
  Eigen::Index col = 0;
  for (const auto& p : pieces) {
    u.middleCols(col, p.cols()) = p;
    col += p.cols();
  }

  std::vector<RVec> vals;
  std::vector<std::vector<int>> labels;
  for (std::size_t k = 0; k < family.size(); ++k) {
    const DMat<Scalar> c = u.adjoint() * family[k] * u;
    RVec v(d);
    for (Eigen::Index j = 0; j < d; ++j) v(j) = std::real(c(j, j));
    vals.push_back(v);
    labels.push_back(cluster_values(v, thr[k]));
  }
  std::vector<int> order(d);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    for (const auto& l : labels)
      if (l[a] != l[b]) return l[a] < l[b];
    return false;
  });
  out.basis.resize(d, d);
  out.values.assign(family.size(), RVec(d));
  out.labels.assign(family.size(), std::vector<int>(d));
  for (Eigen::Index j = 0; j < d; ++j) {
    out.basis.col(j) = u.col(order[j]);
    for (std::size_t k = 0; k < family.size(); ++k) {
      out.values[k](j) = vals[k](order[j]);
      out.labels[k][j] = labels[k][order[j]];
    }
  }
  for (std::size_t k = 0; k < family.size(); ++k) {
    DMat<Scalar> c = out.basis.adjoint() * family[k] * out.basis;
    c.diagonal().setZero();
    out.offdiag_residual = std::max(out.offdiag_residual, max_abs(c));
  }
  return out;
}

struct SymmetricSqrt {
  CMat u;
  bool branch_cut = false;
  double residual = 0.0;
};

/// Square root U of a symmetric unitary M with U^T = U and U* = U^{-1}.
/// Eigenphases theta in (-pi, pi] are halved; an eigenvalue within tol of -1
/// is pinned to theta = pi and flagged.
inline SymmetricSqrt symmetric_unitary_sqrt(const CMat& m, double tol = 1e-9) {
  require(m.rows() == m.cols(), ErrorCode::DimensionMismatch, "square root needs a square matrix");
  const Eigen::Index d = m.rows();
  const CMat id = CMat::Identity(d, d);
  require(max_abs(CMat(m * m.conjugate() - id)) <= tol && max_abs(CMat(m.adjoint() * m - id)) <= tol,
          ErrorCode::NotSymmetricUnitary, "matrix is not a symmetric unitary (M M* != I)");
  SymmetricSqrt out;
  if (d == 0) {
    out.u = CMat(0, 0);
    return out;
  }
  Eigen::ComplexSchur<CMat> schur(m);
  const CMat& z = schur.matrixU();
  const CMat& t = schur.matrixT();
  CVec half(d);
  for (Eigen::Index i = 0; i < d; ++i) {
    const cplx lambda = t(i, i) / std::abs(t(i, i));
    double theta = std::arg(lambda);
    if (std::abs(lambda + 1.0) <= tol) {
      theta = M_PI;
      out.branch_cut = true;
    }
    half(i) = std::polar(1.0, theta / 2.0);
  }
  CMat u = z * half.asDiagonal() * z.adjoint();
  u = (u + u.transpose()) / 2.0;
  out.u = u;
  out.residual = max_abs(CMat(u * u - m));
  return out;
}

/// Orthonormal basis of the eigenvalue-1 eigenspace of an idempotent P.
/// P need not be Hermitian: the range comes from a column-pivoted QR of P.
inline CMat eigenspace_of_one(const CMat& p, double tol = 1e-8) {
  require(p.rows() == p.cols(), ErrorCode::DimensionMismatch, "projector must be square");
  const Eigen::Index n = p.rows();
  require(max_abs(CMat(p * p - p)) <= tol, ErrorCode::NotIdempotent, "matrix is not idempotent");
  const cplx tr = p.trace();
  const double k_real = std::round(tr.real());
  require(std::abs(tr - cplx(k_real, 0.0)) <= std::max(tol, 1e-12 * n), ErrorCode::TraceNotInteger,
          "projector trace is not an integer");
  const Eigen::Index k = static_cast<Eigen::Index>(k_real);
  if (k == 0) return CMat(n, 0);
  // BDCSVD returned a wrong left basis for degenerate non-normal projectors here
  Eigen::ColPivHouseholderQR<CMat> qr(p);
  const CMat q = CMat(qr.householderQ()).leftCols(k);
  require(max_abs(CMat(p * q - q)) <= std::max(tol, 1e-10), ErrorCode::NotIdempotent,
          "projector range could not be extracted");
  return q;
}

/// Orthonormalized column span of a (possibly rank-deficient) matrix.
template <typename Scalar>
DMat<Scalar> orthonormal_span(const DMat<Scalar>& a, double tol = 1e-10) {
  if (a.cols() == 0 || a.rows() == 0) return DMat<Scalar>(a.rows(), 0);
  Eigen::JacobiSVD<DMat<Scalar>> svd(a, Eigen::ComputeThinU);
  const RVec& s = svd.singularValues();
  Eigen::Index r = 0;
  while (r < s.size() && s(r) > tol * std::max(1.0, s(0))) ++r;
  return svd.matrixU().leftCols(r);
}

/// Largest entry of the difference between orthogonal projectors onto two column spans.
template <typename Scalar>
double span_distance(const DMat<Scalar>& a, const DMat<Scalar>& b, double tol = 1e-10) {
  const DMat<Scalar> qa = orthonormal_span(a, tol), qb = orthonormal_span(b, tol);
  if (qa.cols() != qb.cols()) return 1.0;
  return max_abs(DMat<Scalar>(qa * qa.adjoint() - qb * qb.adjoint()));
}

/// Null space of a real matrix from the Gram eigenproblem; eigenvalues below
/// rel_tol * max(1, largest) count as zero.
inline RMat real_null_space(const RMat& a, double rel_tol = 1e-10) {
  const RMat gram = a.transpose() * a;
  if (gram.rows() == 0) return RMat(0, 0);
  Eigen::SelfAdjointEigenSolver<RMat> es(gram);
  const RVec& v = es.eigenvalues();
  const double cut = rel_tol * std::max(1.0, v(v.size() - 1));
  Eigen::Index k = 0;
  while (k < v.size() && v(k) <= cut) ++k;
  return es.eigenvectors().leftCols(k);
}

}  // namespace magrep

#endif
