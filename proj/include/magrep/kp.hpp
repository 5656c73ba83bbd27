#ifndef MAGREP_KP_HPP
#define MAGREP_KP_HPP

#include "magrep/corep.hpp"
#include "magrep/error.hpp"
#include "magrep/linalg.hpp"
#include "magrep/reduce.hpp"
#include "magrep/types.hpp"

#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace magrep {

enum class ProbeKind { Momentum, Electric, Magnetic, Polynomial, Generic };

inline std::string to_string(ProbeKind k) {
  switch (k) {
    case ProbeKind::Momentum: return "momentum";
    case ProbeKind::Electric: return "electric";
    case ProbeKind::Magnetic: return "magnetic";
    case ProbeKind::Polynomial: return "polynomial";
    case ProbeKind::Generic: return "generic";
  }
  return "generic";
}

inline ProbeKind probe_kind_from_string(const std::string& s) {
  for (ProbeKind k : {ProbeKind::Momentum, ProbeKind::Electric, ProbeKind::Magnetic, ProbeKind::Polynomial,
                      ProbeKind::Generic})
    if (to_string(k) == s) return k;
  fail(ErrorCode::InvalidArgument, "unknown action kind '" + s + "'");
}

/// Real linear representation D^{(v)} of the whole group on a probe or momentum
/// channel. The k.p matrices transform with its dual.
class ProbeRepAction {
 public:
  ProbeRepAction(std::shared_ptr<const MagneticGroup> group, std::vector<RMat> mats,
                 ProbeKind kind = ProbeKind::Generic, int order = 1, double tol = 1e-9)
      : group_(std::move(group)), mats_(std::move(mats)), kind_(kind), order_(order) {
    require(group_ != nullptr, ErrorCode::InvalidAction, "action needs a group");
    require(static_cast<int>(mats_.size()) == group_->order(), ErrorCode::InvalidAction,
            "action matrix count differs from group order");
    q_ = static_cast<int>(mats_.front().rows());
    for (const auto& m : mats_)
      require(m.rows() == q_ && m.cols() == q_, ErrorCode::InvalidAction, "action matrices must all be q x q");
    const MagneticGroup& g = *group_;
    for (ElementId a = 0; a < g.order(); ++a)
      for (ElementId b = 0; b < g.order(); ++b) {
        const double res = max_abs(RMat(mats_[a] * mats_[b] - mats_[g.mul(a, b)]));
        require(res <= tol * std::max(1.0, max_abs(mats_[g.mul(a, b)])), ErrorCode::InvalidAction,
                "action is not a representation at (" + g.label(a) + ", " + g.label(b) + ")");
      }
  }

  /// Builds D on all of G from D(h) for h in H and D(T0), using D(h T0) = D(h) D(T0).
  static ProbeRepAction from_halving(std::shared_ptr<const MagneticGroup> group, const std::map<ElementId, RMat>& unitary,
                                     const std::optional<RMat>& d_t0, ProbeKind kind = ProbeKind::Generic,
                                     int order = 1) {
    const MagneticGroup& g = *group;
    std::vector<RMat> mats(g.order());
    for (ElementId h : g.halving()) {
      auto it = unitary.find(h);
      require(it != unitary.end(), ErrorCode::InvalidAction, "action lacks a matrix for " + g.label(h));
      mats[h] = it->second;
    }
    if (g.has_t0()) {
      require(d_t0.has_value(), ErrorCode::InvalidAction, "action lacks the T0 matrix");
      for (ElementId h : g.halving()) mats[g.mul(h, g.t0())] = mats[h] * *d_t0;
    }
    return ProbeRepAction(std::move(group), std::move(mats), kind, order);
  }

  const MagneticGroup& group() const { return *group_; }
  const std::shared_ptr<const MagneticGroup>& group_ptr() const { return group_; }
  int dim() const { return q_; }
  const RMat& operator()(ElementId g) const { return mats_[g]; }
  const std::vector<RMat>& matrices() const { return mats_; }
  ProbeKind kind() const { return kind_; }
  int order() const { return order_; }

  const std::vector<std::string>& basis() const { return basis_; }
  void set_basis(std::vector<std::string> b) { basis_ = std::move(b); }

 private:
  std::shared_ptr<const MagneticGroup> group_;
  std::vector<RMat> mats_;
  ProbeKind kind_;
  int order_;
  int q_ = 0;
  std::vector<std::string> basis_;
};

/// D^{(v-bar)}(g) = (D^{(v)}(g)^{-1})^T.
inline ProbeRepAction dual_rep(const ProbeRepAction& a) {
  std::vector<RMat> mats;
  for (const auto& m : a.matrices()) {
    Eigen::FullPivLU<RMat> lu(m);
    require(lu.isInvertible() && std::abs(lu.determinant()) > 1e-12, ErrorCode::SingularAction,
            "action matrix is singular");
    mats.push_back(lu.inverse().transpose());
  }
  ProbeRepAction out(a.group_ptr(), std::move(mats), a.kind(), a.order());
  out.set_basis(a.basis());
  return out;
}

inline void check_same_group(const CoRep& r, const ProbeRepAction& a) {
  require(r.group_ptr() == a.group_ptr() || r.group().cayley() == a.group().cayley(), ErrorCode::InvalidAction,
          "action and co-rep are defined on different groups");
}

/// Unrounded multiplicity of the channel:
/// (1/2|H|) sum_h [ |chi(h)|^2 Tr D(h) + Tr D(hT0) w(hT0,hT0) chi((hT0)^2) ],
/// or (1/|H|) sum_h |chi(h)|^2 Tr D(h) for unitary groups.
inline cplx linear_multiplicity_value(const CoRep& r, const ProbeRepAction& a) {
  check_same_group(r, a);
  const MagneticGroup& g = r.group();
  const std::vector<cplx> chi = character(r);
  cplx sum = 0.0;
  for (ElementId h : g.halving()) {
    sum += std::norm(chi[h]) * a(h).trace();
    if (g.has_t0()) {
      const ElementId u = g.mul(h, g.t0());
      sum += a(u).trace() * r.omega()(u, u) * chi[g.mul(u, u)];
    }
  }
  return sum / (g.has_t0() ? 2.0 * g.halving_order() : 1.0 * g.halving_order());
}

inline int round_multiplicity(cplx v, double tol) {
  const double k = std::round(v.real());
  require(std::abs(v - cplx(k, 0.0)) <= tol, ErrorCode::NonIntegerMultiplicity,
          "multiplicity " + std::to_string(v.real()) + " is not an integer");
  return static_cast<int>(k);
}

inline int linear_multiplicity(const CoRep& r, const ProbeRepAction& a, double tol = 1e-8) {
  require_valid(r);
  return round_multiplicity(linear_multiplicity_value(r, a), tol);
}

/// Reduced forms for D(T0) = +I or -I:
/// (1/2|H|) sum_h [ |chi(h)|^2 +- w(hT0,hT0) chi((hT0)^2) ] Tr D(h).
inline cplx linear_multiplicity_special(const CoRep& r, const ProbeRepAction& a) {
  check_same_group(r, a);
  const MagneticGroup& g = r.group();
  const RMat& dt = a(g.t0());
  const RMat id = RMat::Identity(a.dim(), a.dim());
  double sign = 0.0;
  if (max_abs(RMat(dt - id)) < 1e-12) sign = 1.0;
  else if (max_abs(RMat(dt + id)) < 1e-12) sign = -1.0;
  require(sign != 0.0, ErrorCode::InvalidArgument, "special form needs D(T0) = +I or -I");
  const std::vector<cplx> chi = character(r);
  cplx sum = 0.0;
  for (ElementId h : g.halving()) {
    const ElementId u = g.mul(h, g.t0());
    sum += (std::norm(chi[h]) + sign * r.omega()(u, u) * chi[g.mul(u, u)]) * a(h).trace();
  }
  return sum / (2.0 * g.halving_order());
}

/// W(h) = D(h) (x) M(h) (x) F(h), W(T0) = D(T0) (x) M(T0) (x) M(T0), W(hT0) = W(h) W(T0).
/// For unitary groups W(h) = D(h) (x) M(h) (x) M*(h).
/// Vector layout: n*d^2 + i*d + j.
inline CMat build_W(const CoRep& r, const ProbeRepAction& a, ElementId g) {
  check_same_group(r, a);
  const MagneticGroup& grp = r.group();
  const CMat dg = a(g).cast<cplx>();
  if (!grp.antiunitary(g)) {
    if (!grp.has_t0()) return kron3(dg, r(g), CMat(r(g).conjugate()));
    return kron3(dg, r(g), f_of_h(r, g));
  }
  const ElementId t = grp.t0();
  const ElementId h = grp.mul(g, grp.inverse(t));
  const CMat wt = kron3(a(t).cast<cplx>(), r(t), r(t));
  return build_W(r, a, h) * wt;
}

/// (1/|H|) sum_h W(h).
inline CMat identity_projector(const CoRep& r, const ProbeRepAction& a) {
  const MagneticGroup& g = r.group();
  const int n = a.dim() * r.dim() * r.dim();
  CMat p = CMat::Zero(n, n);
  for (ElementId h : g.halving()) p += build_W(r, a, h);
  return p / static_cast<double>(g.halving_order());
}

/// Generalized twist: T_{mkl,nij} = eta0 D_{mn}(T0) M(sigma)_{li} delta_{kj}.
inline CMat twist_operator(const CoRep& r, const ProbeRepAction& a) {
  const MagneticGroup& g = r.group();
  const int d = r.dim(), q = a.dim(), d2 = d * d;
  const cplx eta = eta0(r);
  const RMat& dt = a(g.t0());
  const CMat& ms = r(g.sigma());
  CMat t = CMat::Zero(q * d2, q * d2);
  for (int m = 0; m < q; ++m)
    for (int n = 0; n < q; ++n) {
      if (dt(m, n) == 0.0) continue;
      for (int k = 0; k < d; ++k)
        for (int l = 0; l < d; ++l)
          for (int i = 0; i < d; ++i) t(m * d2 + k * d + l, n * d2 + i * d + k) = eta * dt(m, n) * ms(l, i);
    }
  return t;
}

/// Index swap (i,j) -> (j,i) inside each of the q blocks.
inline CMat swap_operator(int q, int d) {
  const int d2 = d * d;
  CMat s = CMat::Zero(q * d2, q * d2);
  for (int m = 0; m < q; ++m)
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) s(m * d2 + i * d + j, m * d2 + j * d + i) = 1.0;
  return s;
}

/// gammas[i][m]: the Hermitian d x d matrix gamma_i^m.
using GammaSet = std::vector<std::vector<CMat>>;

struct KpModel {
  int multiplicity = 0;
  int q = 0;
  int d = 0;
  GammaSet gammas;
  /// Raw anti-Hermitian part of the slices before the exact Hermitian part is emitted.
  double hermiticity_residual = 0.0;
  double covariance_residual = 0.0;
  double gauge_residual = 0.0;
  double tol = 0.0;
};

/// max over g, m of |M(g) conj^s(gamma^m) M(g)^dagger - sum_n Dbar_{nm}(g) gamma^n|.
inline double covariance_residual(const CoRep& r, const ProbeRepAction& a, const GammaSet& gammas) {
  const ProbeRepAction dual = dual_rep(a);
  const MagneticGroup& g = r.group();
  double res = 0.0;
  for (const auto& set : gammas)
    for (ElementId e = 0; e < g.order(); ++e)
      for (int m = 0; m < a.dim(); ++m) {
        CMat lhs = r(e) * conj_if(set[m], g.antiunitary(e)) * r(e).adjoint();
        for (int n = 0; n < a.dim(); ++n) lhs -= dual(e)(n, m) * set[n];
        res = std::max(res, max_abs(lhs));
      }
  return res;
}

/// Gamma(dk) = sum_i r_i sum_m dk_m gamma_i^m.
inline CMat evaluate_gamma(const GammaSet& gammas, const RVec& coeffs, const RVec& dk) {
  CMat out = CMat::Zero(gammas.at(0).at(0).rows(), gammas.at(0).at(0).cols());
  for (std::size_t i = 0; i < gammas.size(); ++i)
    for (std::size_t m = 0; m < gammas[i].size(); ++m) out += coeffs(i) * dk(m) * gammas[i][m];
  return out;
}

/// Largest |M(g) K^s Gamma(Dbar(g)^{-1} dk) K^s M(g)^dagger - Gamma(dk)| over all g and
/// `draws` random (coefficients, dk) pairs.
inline double round_trip_residual(const CoRep& r, const ProbeRepAction& a, const GammaSet& gammas, Rng& rng,
                                  int draws) {
  if (gammas.empty()) return 0.0;
  const ProbeRepAction dual = dual_rep(a);
  const MagneticGroup& g = r.group();
  double res = 0.0;
  for (int t = 0; t < draws; ++t) {
    RVec coeffs(gammas.size()), dk(a.dim());
    for (Eigen::Index i = 0; i < coeffs.size(); ++i) coeffs(i) = rng.normal();
    for (Eigen::Index i = 0; i < dk.size(); ++i) dk(i) = rng.normal();
    const CMat target = evaluate_gamma(gammas, coeffs, dk);
    for (ElementId e = 0; e < g.order(); ++e) {
      const RVec moved = dual(e).fullPivLu().solve(dk);
      const CMat lhs = r(e) * conj_if(evaluate_gamma(gammas, coeffs, moved), g.antiunitary(e)) * r(e).adjoint();
      res = std::max(res, max_abs(CMat(lhs - target)));
    }
  }
  return res;
}

/// Builds the p independent Hermitian families gamma_i^m allowed in the channel:
/// eigenspace of P^(I) (I + T)/2, rebased with the symmetric square root of
/// M(T0) restricted to it, then sliced per component.
inline KpModel build_gamma_matrices(const CoRep& r, const ProbeRepAction& a, double tol = 1e-8) {
  check_same_group(r, a);
  require_valid(r);
  const MagneticGroup& g = r.group();
  const int d = r.dim(), q = a.dim(), d2 = d * d;
  KpModel model;
  model.q = q;
  model.d = d;
  model.tol = tol;

  const CMat pi = identity_projector(r, a);
  CMat proj;
  CMat anti;  // matrix part of the anti-linear map fixing the Hermitian solutions
  if (g.has_t0()) {
    const CMat t = twist_operator(r, a);
    proj = pi * (CMat::Identity(q * d2, q * d2) + t) / 2.0;
    anti = build_W(r, a, g.t0());
  } else {
    proj = pi;
    anti = swap_operator(q, d);
  }
  const CMat zeta = eigenspace_of_one(proj, tol);
  const int p = static_cast<int>(zeta.cols());
  model.multiplicity = p;
  if (p == 0) fail(ErrorCode::EmptyChannel, "no allowed coupling in this channel");

  const CMat mt = zeta.adjoint() * anti * zeta.conjugate();
  model.gauge_residual = max_abs(CMat(mt * mt.conjugate() - CMat::Identity(p, p)));
  require(model.gauge_residual <= tol, ErrorCode::GaugeFixFailed,
          "restricted anti-unitary matrix does not square to identity");
  const CMat u = symmetric_unitary_sqrt(mt, tol).u;
  const CMat delta = zeta * u;

  model.gammas.assign(p, std::vector<CMat>(q));
  for (int i = 0; i < p; ++i)
    for (int m = 0; m < q; ++m) {
      CMat slice(d, d);
      for (int k = 0; k < d; ++k)
        for (int l = 0; l < d; ++l) slice(k, l) = delta(m * d2 + k * d + l, i);
      if (g.has_t0()) slice = slice * r(g.t0()).conjugate();
      model.hermiticity_residual = std::max(model.hermiticity_residual, anti_hermitian_part(slice));
      model.gammas[i][m] = (slice + slice.adjoint()) / 2.0;
    }
  require(model.hermiticity_residual <= tol, ErrorCode::GaugeFixFailed, "coupling matrices are not Hermitian");
  model.covariance_residual = covariance_residual(r, a, model.gammas);
  require(model.covariance_residual <= tol, ErrorCode::GaugeFixFailed, "coupling matrices fail covariance");
  return model;
}

/// Null space of the stacked real-linear covariance system over q Hermitian d x d
/// unknowns. Independent of the projector construction.
struct ConstraintSolution {
  int dimension = 0;
  /// Columns: real coordinates (hermitian_to_real per component, concatenated).
  RMat basis;
  GammaSet gammas;
};

inline RVec pack_gammas(const std::vector<CMat>& set) {
  const int d = static_cast<int>(set.at(0).rows());
  RVec v(static_cast<Eigen::Index>(set.size()) * d * d);
  for (std::size_t m = 0; m < set.size(); ++m) v.segment(m * d * d, d * d) = hermitian_to_real(set[m]);
  return v;
}

inline std::vector<CMat> unpack_gammas(const RVec& v, int q, int d) {
  std::vector<CMat> set;
  for (int m = 0; m < q; ++m) set.push_back(real_to_hermitian(v.segment(m * d * d, d * d), d));
  return set;
}

inline ConstraintSolution solve_constraints(const CoRep& r, const ProbeRepAction& a, double rel_tol = 1e-10) {
  check_same_group(r, a);
  const ProbeRepAction dual = dual_rep(a);
  const MagneticGroup& g = r.group();
  const int d = r.dim(), q = a.dim(), n = q * d * d;
  RMat sys(g.order() * n, n);
  for (int c = 0; c < n; ++c) {
    RVec e = RVec::Zero(n);
    e(c) = 1.0;
    const std::vector<CMat> set = unpack_gammas(e, q, d);
    for (ElementId el = 0; el < g.order(); ++el) {
      std::vector<CMat> out(q);
      for (int m = 0; m < q; ++m) {
        out[m] = r(el) * conj_if(set[m], g.antiunitary(el)) * r(el).adjoint();
        for (int k = 0; k < q; ++k) out[m] -= dual(el)(k, m) * set[k];
        out[m] = (out[m] + out[m].adjoint()) / 2.0;
      }
      sys.block(el * n, c, n, 1) = pack_gammas(out);
    }
  }
  ConstraintSolution sol;
  sol.basis = real_null_space(sys, rel_tol);
  sol.dimension = static_cast<int>(sol.basis.cols());
  for (int i = 0; i < sol.dimension; ++i) sol.gammas.push_back(unpack_gammas(sol.basis.col(i), q, d));
  return sol;
}

/// Projector distance between the real spans of two gamma families.
inline double gamma_span_distance(const GammaSet& a, const GammaSet& b) {
  auto to_cols = [](const GammaSet& s) {
    if (s.empty()) return RMat(0, 0);
    RMat m(pack_gammas(s.front()).size(), static_cast<Eigen::Index>(s.size()));
    for (std::size_t i = 0; i < s.size(); ++i) m.col(i) = pack_gammas(s[i]);
    return m;
  };
  if (a.empty() || b.empty()) return a.size() == b.size() ? 0.0 : 1.0;
  return span_distance<double>(to_cols(a), to_cols(b));
}

// Polynomial channels ---------------------------------------------------------

/// Exponent vectors of the degree-N monomials in q variables, in descending lexicographic order.
inline std::vector<std::vector<int>> monomials(int q, int n) {
  std::vector<std::vector<int>> out;
  std::vector<int> e(q, 0);
  auto rec = [&](auto&& self, int pos, int left) -> void {
    if (pos == q - 1) {
      e[pos] = left;
      out.push_back(e);
      return;
    }
    for (int k = left; k >= 0; --k) {
      e[pos] = k;
      self(self, pos + 1, left - k);
    }
  };
  if (q > 0) rec(rec, 0, n);
  return out;
}

/// A with mono_j(L x) = sum_l A_{jl} mono_l(x) for the degree-N monomials.
inline RMat substitution_matrix(const RMat& lin, const std::vector<std::vector<int>>& monos) {
  const int q = static_cast<int>(lin.rows());
  std::map<std::vector<int>, int> index;
  for (std::size_t i = 0; i < monos.size(); ++i) index[monos[i]] = static_cast<int>(i);
  RMat a = RMat::Zero(static_cast<Eigen::Index>(monos.size()), static_cast<Eigen::Index>(monos.size()));
  for (std::size_t j = 0; j < monos.size(); ++j) {
    std::map<std::vector<int>, double> poly{{std::vector<int>(q, 0), 1.0}};
    for (int m = 0; m < q; ++m)
      for (int rep = 0; rep < monos[j][m]; ++rep) {
        std::map<std::vector<int>, double> next;
        for (const auto& [exp, c] : poly)
          for (int v = 0; v < q; ++v) {
            if (lin(m, v) == 0.0) continue;
            std::vector<int> e2 = exp;
            ++e2[v];
            next[e2] += c * lin(m, v);
          }
        poly = std::move(next);
      }
    for (const auto& [exp, c] : poly) a(static_cast<Eigen::Index>(j), index.at(exp)) += c;
  }
  return a;
}

inline double evaluate_monomial(const std::vector<int>& e, const RVec& x) {
  double v = 1.0;
  for (std::size_t i = 0; i < e.size(); ++i) v *= std::pow(x(static_cast<Eigen::Index>(i)), e[i]);
  return v;
}

inline std::string polynomial_string(const RVec& coeffs, const std::vector<std::vector<int>>& monos,
                                     double cut = 1e-10) {
  std::ostringstream os;
  os.precision(6);
  bool first = true;
  for (std::size_t j = 0; j < monos.size(); ++j) {
    const double c = coeffs(static_cast<Eigen::Index>(j));
    if (std::abs(c) <= cut) continue;
    os << (first ? (c < 0 ? "-" : "") : (c < 0 ? " - " : " + "));
    bool unit = std::abs(std::abs(c) - 1.0) <= cut;
    if (!unit) os << std::abs(c);
    for (std::size_t v = 0; v < monos[j].size(); ++v) {
      if (monos[j][v] == 0) continue;
      if (!unit) os << "*";
      unit = false;
      os << (monos[j].size() == 3 ? std::string(1, "xyz"[v]).insert(0, "k") : "k" + std::to_string(v + 1));
      if (monos[j][v] > 1) os << "^" << monos[j][v];
    }
    if (unit) os << 1;
    first = false;
  }
  return first ? "0" : os.str();
}

/// A channel of degree-N polynomials P = C^T mono(dk) closed under substitution.
struct PolynomialChannel {
  int order = 1;
  /// Action D^{(mu)} whose dual governs P: P(Dbar(g) dk) = A(g) P(dk), A = dual of D^{(mu)}.
  ProbeRepAction action;
  /// Columns: monomial coefficients of each basis polynomial.
  RMat coefficients;
  std::vector<std::vector<int>> monomials;
  std::vector<std::string> polynomials;
  /// A(g) for every element.
  std::vector<RMat> substitution;
};

namespace detail {

inline PolynomialChannel make_channel(const ProbeRepAction& vec, int n, const RMat& c,
                                      const std::vector<std::vector<int>>& monos, const std::vector<RMat>& b) {
  const MagneticGroup& g = vec.group();
  const Eigen::CompleteOrthogonalDecomposition<RMat> pinv(c);
  std::vector<RMat> act, subst;
  for (ElementId e = 0; e < g.order(); ++e) {
    const RMat bc = pinv.solve(RMat(b[e] * c));
    subst.push_back(bc.transpose());
    act.push_back(bc.inverse());
  }
  PolynomialChannel ch{n, ProbeRepAction(vec.group_ptr(), act, ProbeKind::Polynomial, n, 1e-8), c, monos, {}, subst};
  for (Eigen::Index i = 0; i < c.cols(); ++i) ch.polynomials.push_back(polynomial_string(c.col(i), monos));
  ch.action.set_basis(ch.polynomials);
  return ch;
}

}  // namespace detail

/// The whole degree-N monomial space as one channel; N = 1 gives back the input action.
inline PolynomialChannel polynomial_channel(const ProbeRepAction& vec, int n) {
  require(n >= 1, ErrorCode::InvalidArgument, "polynomial order must be at least 1");
  const ProbeRepAction dual = dual_rep(vec);
  const auto monos = monomials(vec.dim(), n);
  std::vector<RMat> b;
  for (ElementId e = 0; e < vec.group().order(); ++e) b.push_back(substitution_matrix(dual(e), monos).transpose());
  const RMat c = RMat::Identity(static_cast<Eigen::Index>(monos.size()), static_cast<Eigen::Index>(monos.size()));
  if (n == 1) {
    PolynomialChannel ch = detail::make_channel(vec, n, c, monos, b);
    ProbeRepAction same = vec;
    same.set_basis(ch.polynomials);
    ch.action = same;
    return ch;
  }
  return detail::make_channel(vec, n, c, monos, b);
}

/// Splits the degree-N monomial space into real irreducible channels of G: the
/// substitution action is made orthogonal with its invariant metric, and the
/// eigenspaces of a seeded random symmetric commutant give the channels.
/// Channels are ordered by dimension, then by their characters.
inline std::vector<PolynomialChannel> decompose_channels(const ProbeRepAction& vec, int n, std::uint64_t seed,
                                                         double tol = 1e-8) {
  require(n >= 1, ErrorCode::InvalidArgument, "polynomial order must be at least 1");
  const MagneticGroup& g = vec.group();
  const ProbeRepAction dual = dual_rep(vec);
  const auto monos = monomials(vec.dim(), n);
  const int k = static_cast<int>(monos.size());
  std::vector<RMat> b;
  for (ElementId e = 0; e < g.order(); ++e) b.push_back(substitution_matrix(dual(e), monos).transpose());

  RMat metric = RMat::Zero(k, k);
  for (const auto& m : b) metric += m.transpose() * m;
  Eigen::SelfAdjointEigenSolver<RMat> mes(metric);
  const RMat l = mes.operatorSqrt();
  const RMat linv = mes.operatorInverseSqrt();

  Rng rng(seed);
  RMat s = rng.real_gaussian(k, k);
  s = (s + s.transpose()).eval();
  RMat comm = RMat::Zero(k, k);
  for (const auto& m : b) {
    const RMat bo = l * m * linv;
    comm += bo * s * bo.transpose();
  }
  Eigen::SelfAdjointEigenSolver<RMat> es((comm + comm.transpose()) / 2.0);
  const std::vector<int> lab = cluster_sorted(es.eigenvalues(), tol * std::max(1.0, max_abs(comm)));

  std::vector<PolynomialChannel> out;
  int start = 0;
  for (int i = 1; i <= k; ++i) {
    if (i == k || lab[i] != lab[start]) {
      const RMat c = linv * es.eigenvectors().middleCols(start, i - start);
      out.push_back(detail::make_channel(vec, n, c, monos, b));
      start = i;
    }
  }
  auto signature = [&](const PolynomialChannel& ch) {
    std::vector<double> sig;
    for (ElementId e = 0; e < g.order(); ++e) sig.push_back(std::round(ch.action(e).trace() * 1e6) / 1e6);
    return sig;
  };
  std::stable_sort(out.begin(), out.end(), [&](const PolynomialChannel& x, const PolynomialChannel& y) {
    if (x.action.dim() != y.action.dim()) return x.action.dim() < y.action.dim();
    return signature(x) > signature(y);
  });
  return out;
}

struct ChannelResult {
  int order = 1;
  std::string name;
  int dim = 0;
  int multiplicity = 0;
  std::vector<std::string> polynomials;
  std::optional<KpModel> model;
};

struct DispersionReport {
  std::vector<ChannelResult> channels;
  std::optional<int> leading_order;
};

/// Multiplicity of every channel for N = 1..n_max. Order 1 lists the full
/// vector channel and, when it is reducible, its irreducible parts. Models are
/// built for the channels at the leading order.
inline DispersionReport dispersion_order(const CoRep& r, const ProbeRepAction& vec, int n_max, std::uint64_t seed,
                                         double tol = 1e-8) {
  require(n_max >= 1, ErrorCode::InvalidArgument, "maximum order must be at least 1");
  require_valid(r);
  DispersionReport rep;
  std::vector<ProbeRepAction> actions;
  for (int n = 1; n <= n_max; ++n) {
    std::vector<PolynomialChannel> chans = decompose_channels(vec, n, seed + static_cast<std::uint64_t>(n), tol);
    if (n == 1) {
      PolynomialChannel full = polynomial_channel(vec, 1);
      if (chans.size() > 1) chans.insert(chans.begin(), full);
      else chans = {full};
    }
    const std::size_t shift = n == 1 && chans.size() > 1 ? 1 : 0;
    for (std::size_t i = 0; i < chans.size(); ++i) {
      ChannelResult c;
      c.order = n;
      c.name = n == 1 && i == 0 ? "vector" : "order" + std::to_string(n) + "_ch" + std::to_string(i - shift);
      c.dim = chans[i].action.dim();
      c.multiplicity = round_multiplicity(linear_multiplicity_value(r, chans[i].action), tol);
      c.polynomials = chans[i].polynomials;
      if (c.multiplicity > 0 && !rep.leading_order) rep.leading_order = n;
      rep.channels.push_back(c);
      actions.push_back(chans[i].action);
    }
  }
  for (std::size_t i = 0; i < rep.channels.size(); ++i)
    if (rep.leading_order && rep.channels[i].order == *rep.leading_order && rep.channels[i].multiplicity > 0)
      rep.channels[i].model = build_gamma_matrices(r, actions[i], tol);
  return rep;
}

struct ProbeChannelResult {
  std::string name;
  ProbeKind kind = ProbeKind::Generic;
  int multiplicity = 0;
  /// Copies of the trivial representation inside the probe channel; each couples only through the identity.
  int trivial_count = 0;
  int splitting_multiplicity = 0;
  std::optional<KpModel> couplings;
};

struct ProbeReport {
  double index = 0.0;
  bool protected_degeneracy = false;
  double tol = 0.0;
  std::vector<ProbeChannelResult> channels;
};

/// Keeps the listed elements (closed under multiplication) and returns the subgroup with its embedding.
inline Subgroup restrict_to_subgroup(const MagneticGroup& g, const ElementSet& keep) { return extract_subgroup(g, keep); }

/// Restricts the co-rep to G' and checks the criterion there; probe channels
/// (actions of G) are tested for linear coupling.
inline ProbeReport probe_stability(const CoRep& r, std::shared_ptr<const MagneticGroup> sub,
                                   const std::vector<ElementId>& embedding,
                                   const std::vector<std::pair<std::string, ProbeRepAction>>& probes,
                                   double tol = 1e-8) {
  ProbeReport rep;
  rep.tol = tol;
  const CoRep restricted = restrict_corep(r, std::move(sub), embedding);
  rep.index = irreducibility_index(restricted);
  rep.protected_degeneracy = std::abs(rep.index - 1.0) <= tol;
  for (const auto& [name, action] : probes) {
    ProbeChannelResult c;
    c.name = name;
    c.kind = action.kind();
    c.multiplicity = linear_multiplicity(r, action, tol);
    double triv = 0.0;
    for (ElementId e = 0; e < action.group().order(); ++e) triv += action(e).trace();
    c.trivial_count = round_multiplicity(triv / action.group().order(), tol);
    c.splitting_multiplicity = c.multiplicity - c.trivial_count;
    if (c.multiplicity > 0) c.couplings = build_gamma_matrices(r, action, tol);
    rep.channels.push_back(std::move(c));
  }
  return rep;
}

}  // namespace magrep

#endif
