#ifndef MAGREP_COREP_HPP
#define MAGREP_COREP_HPP

#include "magrep/error.hpp"
#include "magrep/group.hpp"
#include "magrep/types.hpp"

#include <memory>
#include <utility>
#include <vector>

namespace magrep {

/// Projective co-representation: g acts as M(g) K^{s(g)} with
/// M(a) conj^{s(a)}(M(b)) = w(a,b) M(ab).
class CoRep {
 public:
  CoRep(std::shared_ptr<const MagneticGroup> group, FactorSystem omega, std::vector<CMat> matrices)
      : group_(std::move(group)), omega_(std::move(omega)), matrices_(std::move(matrices)) {
    require(group_ != nullptr, ErrorCode::InvalidArgument, "co-rep needs a group");
    check_factor_dims(*group_, omega_);
    require(static_cast<int>(matrices_.size()) == group_->order(), ErrorCode::DimensionMismatch,
            "matrix count differs from group order");
    dim_ = static_cast<int>(matrices_.front().rows());
    for (const auto& m : matrices_)
      require(m.rows() == dim_ && m.cols() == dim_, ErrorCode::DimensionMismatch, "co-rep matrices must all be d x d");
  }

  CoRep(std::shared_ptr<const MagneticGroup> group, std::vector<CMat> matrices)
      : CoRep(group, FactorSystem::trivial(group->order()), std::move(matrices)) {}

  const MagneticGroup& group() const { return *group_; }
  const std::shared_ptr<const MagneticGroup>& group_ptr() const { return group_; }
  const FactorSystem& omega() const { return omega_; }
  int dim() const { return dim_; }
  const CMat& operator()(ElementId g) const { return matrices_[g]; }
  const std::vector<CMat>& matrices() const { return matrices_; }

 private:
  std::shared_ptr<const MagneticGroup> group_;
  FactorSystem omega_;
  std::vector<CMat> matrices_;
  int dim_ = 0;
};

struct CoRepReport {
  double unitarity_residual = 0.0;
  double relation_residual = 0.0;
  std::pair<ElementId, ElementId> worst_pair{0, 0};
  double tol = 0.0;
  bool pass = false;
};

inline CoRepReport validate_corep(const CoRep& r, double tol = 1e-9) {
  const MagneticGroup& g = r.group();
  const int d = r.dim();
  CoRepReport rep;
  rep.tol = tol;
  const CMat id = CMat::Identity(d, d);
  for (ElementId a = 0; a < g.order(); ++a)
    rep.unitarity_residual = std::max(rep.unitarity_residual, max_abs(CMat(r(a).adjoint() * r(a) - id)));
  for (ElementId a = 0; a < g.order(); ++a)
    for (ElementId b = 0; b < g.order(); ++b) {
      const CMat lhs = r(a) * conj_if(r(b), g.antiunitary(a));
      const double res = max_abs(CMat(lhs - r.omega()(a, b) * r(g.mul(a, b))));
      if (res > rep.relation_residual) {
        rep.relation_residual = res;
        rep.worst_pair = {a, b};
      }
    }
  rep.pass = rep.unitarity_residual <= tol && rep.relation_residual <= tol;
  return rep;
}

inline void require_valid(const CoRep& r, double tol = 1e-9) {
  const CoRepReport rep = validate_corep(r, tol);
  require(rep.pass, ErrorCode::InvalidCoRep,
          "co-rep fails validation (unitarity " + std::to_string(rep.unitarity_residual) + ", relation " +
              std::to_string(rep.relation_residual) + ")");
}

/// eta0 = w(T0, T0); M(T0) M*(T0) = eta0 M(sigma).
inline cplx eta0(const CoRep& r) {
  const ElementId t = r.group().t0();
  return r.omega()(t, t);
}

/// F(h) = M(T0) M*(h) M(T0)^dagger.
inline CMat f_of_h(const CoRep& r, ElementId h) {
  const MagneticGroup& g = r.group();
  require(!g.antiunitary(h), ErrorCode::InvalidArgument, "f_of_h expects a unitary element");
  const CMat& mt = r(g.t0());
  return mt * r(h).conjugate() * mt.adjoint();
}

/// Matrix part of the linear co-rep V(g) K^{s(g)} on the d^2-dim product space:
/// V(h) = M(h) (x) F(h), V(T0) = M(T0) (x) M(T0), V(h T0) = V(h) V(T0).
inline CMat product_rep_V(const CoRep& r, ElementId g) {
  const MagneticGroup& grp = r.group();
  if (!grp.antiunitary(g)) {
    if (!grp.has_t0()) return kron(r(g), CMat(r(g).conjugate()));
    return kron(r(g), f_of_h(r, g));
  }
  const ElementId t = grp.t0();
  const ElementId h = grp.mul(g, grp.inverse(t));
  const CMat vt = kron(r(t), r(t));
  return product_rep_V(r, h) * vt;
}

/// chi(g) = Tr M(g) for every element; only the unitary entries are characters.
inline std::vector<cplx> character(const CoRep& r) {
  std::vector<cplx> chi(r.group().order());
  for (ElementId a = 0; a < r.group().order(); ++a) chi[a] = r(a).trace();
  return chi;
}

/// Direct sum over the same group and factor system.
inline CoRep direct_sum(const CoRep& a, const CoRep& b) {
  require(a.group_ptr() == b.group_ptr() || a.group().cayley() == b.group().cayley(), ErrorCode::InvalidArgument,
          "direct sum needs a common group");
  for (ElementId x = 0; x < a.group().order(); ++x)
    for (ElementId y = 0; y < a.group().order(); ++y)
      require(std::abs(a.omega()(x, y) - b.omega()(x, y)) <= 1e-12, ErrorCode::InvalidArgument,
              "direct sum needs a common factor system");
  const int da = a.dim(), db = b.dim();
  std::vector<CMat> mats;
  for (ElementId g = 0; g < a.group().order(); ++g) {
    CMat m = CMat::Zero(da + db, da + db);
    m.topLeftCorner(da, da) = a(g);
    m.bottomRightCorner(db, db) = b(g);
    mats.push_back(m);
  }
  return CoRep(a.group_ptr(), a.omega(), std::move(mats));
}

/// New basis given by the columns of the unitary V: M'(g) = V^dagger M(g) conj^{s(g)}(V).
inline CoRep change_basis(const CoRep& r, const CMat& v) {
  require(v.rows() == r.dim(), ErrorCode::DimensionMismatch, "basis change has wrong row count");
  std::vector<CMat> mats;
  for (ElementId g = 0; g < r.group().order(); ++g)
    mats.push_back(v.adjoint() * r(g) * conj_if(v, r.group().antiunitary(g)));
  return CoRep(r.group_ptr(), r.omega(), std::move(mats));
}

/// M'(g) = Omega(g) M(g) with the matching coboundary applied to the factor system.
inline CoRep gauge_corep(const CoRep& r, const std::vector<cplx>& omega) {
  std::vector<CMat> mats;
  for (ElementId g = 0; g < r.group().order(); ++g) mats.push_back(omega[g] * r(g));
  return CoRep(r.group_ptr(), gauge_transform(r.group(), r.omega(), omega), std::move(mats));
}

/// Restriction to a subgroup along an embedding sub -> group.
inline CoRep restrict_corep(const CoRep& r, std::shared_ptr<const MagneticGroup> sub,
                            const std::vector<ElementId>& embedding) {
  validate_embedding(r.group(), *sub, embedding);
  const int n = sub->order();
  std::vector<std::vector<cplx>> w(n, std::vector<cplx>(n));
  std::vector<CMat> mats;
  for (ElementId a = 0; a < n; ++a) {
    mats.push_back(r(embedding[a]));
    for (ElementId b = 0; b < n; ++b) w[a][b] = r.omega()(embedding[a], embedding[b]);
  }
  return CoRep(std::move(sub), FactorSystem(std::move(w)), std::move(mats));
}

/// Projective regular co-rep: basis |x>, g|x> = w(g,x) |gx>; dimension |G|.
inline CoRep regular_corep(std::shared_ptr<const MagneticGroup> group, const FactorSystem& omega) {
  const MagneticGroup& g = *group;
  const int n = g.order();
  std::vector<CMat> mats;
  for (ElementId a = 0; a < n; ++a) {
    CMat m = CMat::Zero(n, n);
    for (ElementId x = 0; x < n; ++x) m(g.mul(a, x), x) = omega(a, x);
    mats.push_back(m);
  }
  return CoRep(std::move(group), omega, std::move(mats));
}

}  // namespace magrep

#endif
