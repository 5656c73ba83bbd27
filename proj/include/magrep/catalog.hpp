#ifndef MAGREP_CATALOG_HPP
#define MAGREP_CATALOG_HPP

#include "magrep/corep.hpp"
#include "magrep/error.hpp"
#include "magrep/group.hpp"
#include "magrep/kp.hpp"
#include "magrep/types.hpp"

#include <Eigen/Geometry>

#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace magrep {

/// O(3) matrix paired with a time-reversal flag.
struct PointOp {
  Eigen::Matrix3d r = Eigen::Matrix3d::Identity();
  int t = 0;

  PointOp operator*(const PointOp& o) const { return {r * o.r, t ^ o.t}; }
  bool same(const PointOp& o) const { return t == o.t && (r - o.r).cwiseAbs().maxCoeff() < 1e-9; }
};

inline Eigen::Matrix3d rot_z(double deg) {
  return Eigen::AngleAxisd(deg * M_PI / 180.0, Eigen::Vector3d::UnitZ()).toRotationMatrix();
}

/// Mirror with normal in the xy-plane at angle `deg` from x.
inline Eigen::Matrix3d mirror_xy(double deg) {
  const double a = deg * M_PI / 180.0;
  const Eigen::Vector3d n(std::cos(a), std::sin(a), 0.0);
  return Eigen::Matrix3d::Identity() - 2.0 * n * n.transpose();
}

namespace detail {

inline std::string axis_label(Eigen::Vector3d n) {
  if (std::abs(n.z()) > 1 - 1e-9) return "z";
  if (std::abs(n.z()) < 1e-9) {
    double deg = std::atan2(n.y(), n.x()) * 180.0 / M_PI;
    if (deg < -1e-9) deg += 180.0;
    if (deg >= 180.0 - 1e-9) deg -= 180.0;
    const long k = std::lround(deg);
    if (k == 0) return "x";
    if (k == 90) return "y";
    return "d" + std::to_string(k);
  }
  return "[" + std::to_string(std::lround(n.x() * 100)) + "," + std::to_string(std::lround(n.y() * 100)) + "," +
         std::to_string(std::lround(n.z() * 100)) + "]";
}

/// Name of a rotation by angle `ang` (radians, in [0, pi]) about `axis`.
inline std::string rotation_name(const std::string& prefix, double ang, Eigen::Vector3d axis) {
  if (axis.z() < -1e-9) {
    axis = -axis;
    ang = -ang;
  }
  const double frac = std::abs(ang) / (2 * M_PI);
  const long n = std::lround(1.0 / frac);
  std::string s = prefix + std::to_string(n) + axis_label(axis);
  if (ang < 0 && n != 2) s += "^-1";
  return s;
}

}  // namespace detail

/// Readable label such as "C4z", "C4z^-1", "md45", "S4zT", "I", "T".
inline std::string point_op_label(const PointOp& op) {
  const Eigen::Matrix3d& r = op.r;
  const double det = r.determinant();
  const std::string suffix = op.t ? "T" : "";
  const Eigen::Matrix3d id = Eigen::Matrix3d::Identity();
  if ((r - id).cwiseAbs().maxCoeff() < 1e-9) return op.t ? "T" : "E";
  if ((r + id).cwiseAbs().maxCoeff() < 1e-9) return "I" + suffix;
  if (det > 0) {
    const Eigen::AngleAxisd aa(r);
    return detail::rotation_name("C", aa.angle(), aa.axis()) + suffix;
  }
  const Eigen::AngleAxisd aa(Eigen::Matrix3d(-r));
  if (std::abs(aa.angle() - M_PI) < 1e-9) return "m" + detail::axis_label(aa.axis()) + suffix;
  // r = -P with P a rotation by psi; as a rotoreflection r = sigma_n C(psi + pi).
  double ang = aa.angle() + M_PI;
  Eigen::Vector3d axis = aa.axis();
  if (ang > M_PI) {
    ang = 2 * M_PI - ang;
    axis = -axis;
  }
  return detail::rotation_name("S", ang, axis) + suffix;
}

/// Closure of the generators under multiplication, in breadth-first order from the identity.
inline std::vector<PointOp> close_point_ops(const std::vector<PointOp>& gens) {
  std::vector<PointOp> ops{PointOp{}};
  for (std::size_t i = 0; i < ops.size(); ++i)
    for (const auto& gen : gens) {
      const PointOp p = ops[i] * gen;
      bool found = false;
      for (const auto& o : ops) found = found || o.same(p);
      if (!found) ops.push_back(p);
      require(ops.size() <= 512, ErrorCode::InvalidArgument, "point group closure does not terminate");
    }
  return ops;
}

inline MagneticGroup group_from_ops(const std::vector<PointOp>& ops) {
  const int n = static_cast<int>(ops.size());
  CayleyTable table(n, std::vector<ElementId>(n, -1));
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      const PointOp p = ops[a] * ops[b];
      for (int c = 0; c < n; ++c)
        if (ops[c].same(p)) table[a][b] = c;
      require(table[a][b] >= 0, ErrorCode::NotAGroup, "point operations are not closed");
    }
  std::vector<int> flags;
  std::vector<std::string> labels;
  for (const auto& o : ops) {
    flags.push_back(o.t);
    labels.push_back(point_op_label(o));
  }
  return build_group(table, flags, labels);
}

/// SU(2) lift cos(theta/2) I - i sin(theta/2) n.sigma of the proper part det(R) R.
inline CMat spin_half_lift(const Eigen::Matrix3d& r) {
  const Eigen::Matrix3d p = r.determinant() * r;
  const Eigen::AngleAxisd aa(p);
  Eigen::Vector3d n = aa.axis();
  const double th = aa.angle();
  if (std::abs(th - M_PI) < 1e-9) {
    int k = 0;
    while (k < 3 && std::abs(n(k)) < 1e-9) ++k;
    if (k < 3 && n(k) < 0) n = -n;
  }
  CMat sx(2, 2), sy(2, 2), sz(2, 2);
  sx << 0, 1, 1, 0;
  sy << 0, -kI, kI, 0;
  sz << 1, 0, 0, -1;
  const CMat ns = n.x() * sx + n.y() * sy + n.z() * sz;
  return std::cos(th / 2) * CMat::Identity(2, 2) - kI * std::sin(th / 2) * ns;
}

/// Factor system read off from matrices that multiply up to phases.
inline FactorSystem factor_system_of(const MagneticGroup& g, const std::vector<CMat>& mats) {
  const int n = g.order();
  std::vector<std::vector<cplx>> w(n, std::vector<cplx>(n));
  for (ElementId a = 0; a < n; ++a)
    for (ElementId b = 0; b < n; ++b) {
      const CMat lhs = mats[a] * conj_if(mats[b], g.antiunitary(a));
      const cplx ph = (mats[g.mul(a, b)].adjoint() * lhs).trace() / static_cast<double>(lhs.rows());
      w[a][b] = ph / std::abs(ph);
    }
  return FactorSystem(std::move(w));
}

struct CatalogRep {
  std::string name;
  CoRep rep;
  bool irreducible = true;
  std::optional<int> torsion;
};

struct CatalogEntry {
  std::string name;
  std::string description;
  std::shared_ptr<const MagneticGroup> group;
  std::vector<PointOp> ops;
  std::map<std::string, FactorSystem> omega_classes;
  std::vector<CatalogRep> reps;
  std::vector<std::pair<std::string, ProbeRepAction>> probe_actions;

  const CatalogRep& rep(const std::string& n) const {
    for (const auto& r : reps)
      if (r.name == n) return r;
    fail(ErrorCode::UnknownName, "entry '" + name + "' has no rep '" + n + "'");
  }
  const ProbeRepAction& action(const std::string& n) const {
    for (const auto& [k, a] : probe_actions)
      if (k == n) return a;
    fail(ErrorCode::UnknownName, "entry '" + name + "' has no action '" + n + "'");
  }
};

namespace detail {

using GroupPtr = std::shared_ptr<const MagneticGroup>;

inline CMat sigma_y_i() {
  CMat m(2, 2);
  m << 0, 1, -1, 0;
  return m;
}

inline CMat scalar(cplx v) { return CMat::Constant(1, 1, v); }

/// xy block of R as a complex number alpha; rotations give e^{i phi}, mirrors e^{i psi}.
inline cplx xy_alpha(const Eigen::Matrix3d& r) { return {r(0, 0), r(1, 0)}; }

/// 2-dim real rep of C_nv-type ops: rotations by n*phi, mirrors with alpha^n.
inline CMat cnv_block(const Eigen::Matrix3d& r, int n) {
  const cplx a = std::pow(xy_alpha(r), n);
  const bool proper = r.block<2, 2>(0, 0).determinant() > 0;
  CMat m(2, 2);
  if (proper) m << a.real(), -a.imag(), a.imag(), a.real();
  else m << a.real(), a.imag(), a.imag(), -a.real();
  return m;
}

inline std::vector<CMat> ops_map(const std::vector<PointOp>& ops, const std::function<CMat(const PointOp&)>& f) {
  std::vector<CMat> out;
  for (const auto& o : ops) out.push_back(f(o));
  return out;
}

inline std::vector<CMat> spin_matrices(const std::vector<PointOp>& ops) {
  return ops_map(ops, [](const PointOp& o) {
    CMat u = spin_half_lift(o.r);
    return o.t ? CMat(u * sigma_y_i()) : u;
  });
}

inline void add_rep(CatalogEntry& e, const std::string& name, const FactorSystem& w, std::vector<CMat> mats,
                    bool irreducible, std::optional<int> torsion) {
  e.reps.push_back({name, CoRep(e.group, w, std::move(mats)), irreducible, torsion});
}

inline void add_vector_actions(CatalogEntry& e) {
  std::vector<RMat> mom, ele, mag, even, odd;
  for (const auto& o : e.ops) {
    const double sign = o.t ? -1.0 : 1.0;
    mom.push_back(sign * o.r);
    ele.push_back(o.r);
    mag.push_back(sign * o.r.determinant() * o.r);
    even.push_back(RMat::Identity(1, 1));
    odd.push_back(RMat::Constant(1, 1, sign));
  }
  e.probe_actions.emplace_back("momentum", ProbeRepAction(e.group, mom, ProbeKind::Momentum));
  e.probe_actions.emplace_back("electric", ProbeRepAction(e.group, ele, ProbeKind::Electric));
  e.probe_actions.emplace_back("magnetic", ProbeRepAction(e.group, mag, ProbeKind::Magnetic));
  // single-component fields: T-even and T-odd scalars
  e.probe_actions.emplace_back("electric_scalar", ProbeRepAction(e.group, even, ProbeKind::Electric));
  e.probe_actions.emplace_back("magnetic_scalar", ProbeRepAction(e.group, odd, ProbeKind::Magnetic));
}

inline CatalogEntry from_ops(const std::string& name, const std::string& desc, const std::vector<PointOp>& gens) {
  CatalogEntry e;
  e.name = name;
  e.description = desc;
  e.ops = close_point_ops(gens);
  e.group = std::make_shared<const MagneticGroup>(group_from_ops(e.ops));
  e.omega_classes.emplace("trivial", FactorSystem::trivial(e.group->order()));
  return e;
}

inline FactorSystem add_spin_class(CatalogEntry& e) {
  const FactorSystem w = factor_system_of(*e.group, spin_matrices(e.ops));
  e.omega_classes.emplace("spin", w);
  return w;
}

inline PointOp time_reversal() { return {Eigen::Matrix3d::Identity(), 1}; }

inline CatalogEntry make_z2t(bool kramers) {
  CatalogEntry e = from_ops(kramers ? "z2t_kramers" : "z2t_spinless",
                            kramers ? "Z2^T with w(T,T) = -1 (Kramers class)" : "Z2^T with trivial factor system",
                            {time_reversal()});
  if (kramers) {
    const FactorSystem w = add_spin_class(e);
    add_rep(e, "kramers", w, spin_matrices(e.ops), true, 4);
  } else {
    add_rep(e, "A", e.omega_classes.at("trivial"), {scalar(1), scalar(1)}, true, 1);
  }
  add_vector_actions(e);
  return e;
}

inline CatalogEntry make_z4t() {
  const Eigen::Matrix3d s4 = -rot_z(-90.0);
  CatalogEntry e = from_ops("z4t", "type-II group {E, C2z, S4zT, S4zT^-1}, T0^2 = C2z", {PointOp{s4, 1}});
  const FactorSystem triv = e.omega_classes.at("trivial");
  const auto& g = *e.group;
  add_rep(e, "A", triv, ops_map(e.ops, [](const PointOp&) { return scalar(1); }), true, 1);
  // sigma = T0^2 -> -I and T0 -> i sigma_y, so T0 sigma -> -i sigma_y.
  std::vector<CMat> b(g.order());
  const ElementId t0 = g.t0(), sg = g.sigma();
  b[g.identity()] = CMat::Identity(2, 2);
  b[sg] = -CMat::Identity(2, 2);
  b[t0] = sigma_y_i();
  b[g.mul(t0, sg)] = -sigma_y_i();
  add_rep(e, "B_quaternionic", triv, b, true, 4);
  const FactorSystem w = add_spin_class(e);
  add_rep(e, "spin", w, spin_matrices(e.ops), true, 2);
  add_vector_actions(e);
  return e;
}

/// Quaternion group with H = <i> unitary and T0 = j.
inline CatalogEntry make_q8t() {
  CatalogEntry e;
  e.name = "q8t";
  e.description = "type-II non-split group Q8 with halving subgroup <i>, T0 = j, T0^2 = -1";
  // Elements as (sign, unit) with unit 0=1, 1=i, 2=j, 3=k.
  const std::vector<std::pair<int, int>> el = {{1, 0}, {-1, 0}, {1, 1}, {-1, 1}, {1, 2}, {-1, 2}, {1, 3}, {-1, 3}};
  const std::vector<std::string> labels = {"1", "-1", "i", "-i", "j", "-j", "k", "-k"};
  // unit products: u*v = sign * w
  const int prod_unit[4][4] = {{0, 1, 2, 3}, {1, 0, 3, 2}, {2, 3, 0, 1}, {3, 2, 1, 0}};
  const int prod_sign[4][4] = {{1, 1, 1, 1}, {1, -1, 1, -1}, {1, -1, -1, 1}, {1, 1, -1, -1}};
  CayleyTable table(8, std::vector<ElementId>(8));
  for (int a = 0; a < 8; ++a)
    for (int b = 0; b < 8; ++b) {
      const int u = prod_unit[el[a].second][el[b].second];
      const int s = el[a].first * el[b].first * prod_sign[el[a].second][el[b].second];
      for (int c = 0; c < 8; ++c)
        if (el[c].first == s && el[c].second == u) table[a][b] = c;
    }
  const std::vector<int> flags = {0, 0, 0, 0, 1, 1, 1, 1};
  e.group = std::make_shared<const MagneticGroup>(build_group(table, flags, labels));
  const Eigen::Matrix3d c2[4] = {Eigen::Matrix3d::Identity(), Eigen::Vector3d(1, -1, -1).asDiagonal(),
                                 Eigen::Vector3d(-1, 1, -1).asDiagonal(), Eigen::Vector3d(-1, -1, 1).asDiagonal()};
  for (int a = 0; a < 8; ++a) e.ops.push_back({c2[el[a].second], flags[a]});
  const FactorSystem triv = FactorSystem::trivial(8);
  e.omega_classes.emplace("trivial", triv);

  for (int sgn : {1, -1}) {
    std::vector<CMat> m;
    for (int a = 0; a < 8; ++a) m.push_back(scalar(el[a].second == 1 || el[a].second == 3 ? sgn : 1));
    add_rep(e, sgn > 0 ? "A1" : "A2", triv, m, true, 1);
  }
  for (int sgn : {1, -1}) {
    const CMat unit[4] = {CMat::Identity(2, 2), CMat(static_cast<double>(sgn) * kI * CMat::Identity(2, 2)), sigma_y_i(),
                          CMat(static_cast<double>(sgn) * kI * CMat::Identity(2, 2) * sigma_y_i())};
    std::vector<CMat> m;
    for (int a = 0; a < 8; ++a) m.push_back(static_cast<double>(el[a].first) * unit[el[a].second]);
    add_rep(e, sgn > 0 ? "Q_plus" : "Q_minus", triv, m, true, 4);
  }
  add_vector_actions(e);
  return e;
}

inline CatalogEntry make_c3t() {
  CatalogEntry e = from_ops("c3t", "grey group C3 x Z2^T", {PointOp{rot_z(120.0), 0}, time_reversal()});
  const FactorSystem triv = e.omega_classes.at("trivial");
  add_rep(e, "A", triv, ops_map(e.ops, [](const PointOp&) { return scalar(1); }), true, 1);
  CMat sx(2, 2);
  sx << 0, 1, 1, 0;
  add_rep(e, "E_complex", triv, ops_map(e.ops, [&](const PointOp& o) {
            const cplx a = xy_alpha(o.r);
            CMat m = CMat::Zero(2, 2);
            m(0, 0) = a;
            m(1, 1) = std::conj(a);
            return o.t ? CMat(m * sx) : m;
          }),
          true, 2);
  const FactorSystem w = add_spin_class(e);
  add_rep(e, "spin", w, spin_matrices(e.ops), true, 2);
  add_vector_actions(e);
  return e;
}

inline CatalogEntry make_c4_mxT() {
  CatalogEntry e = from_ops("c4_mxT", "magnetic group 4m'm': C4 plus mirrors combined with T, T0 = mxT",
                            {PointOp{rot_z(90.0), 0}, PointOp{mirror_xy(0.0), 1}});
  const FactorSystem triv = e.omega_classes.at("trivial");
  const char* names[4] = {"A", "B", "E_plus", "E_minus"};
  const cplx lambdas[4] = {1.0, -1.0, kI, -kI};
  for (int k = 0; k < 4; ++k) {
    add_rep(e, names[k], triv, ops_map(e.ops, [&](const PointOp& o) {
              // C4^n -> lambda^n on the unitary part; the anti-unitary coset is fixed by M(T0) = 1.
              const cplx a = xy_alpha(o.t ? Eigen::Matrix3d(o.r * mirror_xy(0.0)) : o.r);
              const int n = static_cast<int>(std::lround(std::arg(a) / (M_PI / 2))) & 3;
              return scalar(std::pow(lambdas[k], n));
            }),
            true, 1);
  }
  const FactorSystem w = add_spin_class(e);
  add_rep(e, "spin", w, spin_matrices(e.ops), false, std::nullopt);
  add_vector_actions(e);
  return e;
}

inline CatalogEntry make_cnv_grey(int n) {
  const std::string nm = n == 4 ? "c4v_grey" : "c6v_grey";
  CatalogEntry e = from_ops(nm, "grey group C" + std::to_string(n) + "v x Z2^T",
                            {PointOp{rot_z(360.0 / n), 0}, PointOp{mirror_xy(0.0), 0}, time_reversal()});
  const FactorSystem triv = e.omega_classes.at("trivial");
  auto one = [](const PointOp&) { return scalar(1); };
  auto a2 = [](const PointOp& o) { return scalar(o.r.block<2, 2>(0, 0).determinant()); };
  auto b_entry = [n](int idx) {
    return [n, idx](const PointOp& o) { return scalar(cnv_block(o.r, n / 2)(idx, idx)); };
  };
  add_rep(e, "A1", triv, ops_map(e.ops, one), true, 1);
  add_rep(e, "A2", triv, ops_map(e.ops, a2), true, 1);
  add_rep(e, "B1", triv, ops_map(e.ops, b_entry(0)), true, 1);
  add_rep(e, "B2", triv, ops_map(e.ops, b_entry(1)), true, 1);
  add_rep(e, "E1", triv, ops_map(e.ops, [](const PointOp& o) { return cnv_block(o.r, 1); }), true, 1);
  if (n == 6) add_rep(e, "E2", triv, ops_map(e.ops, [](const PointOp& o) { return cnv_block(o.r, 2); }), true, 1);

  const FactorSystem w = add_spin_class(e);
  const std::vector<CMat> spin = spin_matrices(e.ops);
  add_rep(e, "E1/2", w, spin, true, 1);
  std::vector<CMat> twisted;
  for (std::size_t i = 0; i < spin.size(); ++i) twisted.push_back(spin[i] * cnv_block(e.ops[i].r, n / 2)(0, 0));
  add_rep(e, n == 4 ? "E3/2" : "E5/2", w, twisted, true, 1);
  add_vector_actions(e);
  return e;
}

inline const std::vector<std::pair<std::string, std::function<CatalogEntry()>>>& catalog_builders() {
  static const std::vector<std::pair<std::string, std::function<CatalogEntry()>>> b = {
      {"z2t_spinless", [] { return make_z2t(false); }},
      {"z2t_kramers", [] { return make_z2t(true); }},
      {"z4t", make_z4t},
      {"q8t", make_q8t},
      {"c3t", make_c3t},
      {"c4_mxT", make_c4_mxT},
      {"c4v_grey", [] { return make_cnv_grey(4); }},
      {"c6v_grey", [] { return make_cnv_grey(6); }},
  };
  return b;
}

}  // namespace detail

inline std::vector<std::string> catalog_list() {
  std::vector<std::string> out;
  for (const auto& [name, _] : detail::catalog_builders()) out.push_back(name);
  return out;
}

inline CatalogEntry catalog_get(const std::string& name) {
  for (const auto& [n, build] : detail::catalog_builders())
    if (n == name) return build();
  fail(ErrorCode::UnknownName, "no catalog entry named '" + name + "'");
}

}  // namespace magrep

#endif
