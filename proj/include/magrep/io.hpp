#ifndef MAGREP_IO_HPP
#define MAGREP_IO_HPP

// JSON reading and writing. Complex numbers are [re, im] pairs, matrices are
// row-major nested arrays, and judged floats are written as {value, tol}.

#include "magrep/corep.hpp"
#include "magrep/error.hpp"
#include "magrep/group.hpp"
#include "magrep/kp.hpp"
#include "magrep/reduce.hpp"

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>

namespace magrep {

using json = nlohmann::json;

inline json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  require(in.good(), ErrorCode::ParseError, "cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    fail(ErrorCode::ParseError, path.string() + ": " + e.what());
  }
}

inline void write_json_file(const std::filesystem::path& path, const json& j) {
  std::ofstream out(path);
  require(out.good(), ErrorCode::ParseError, "cannot write " + path.string());
  out << j.dump(2) << "\n";
}

inline double finite(double x) {
  require(std::isfinite(x), ErrorCode::InvalidArgument, "refusing to serialize a non-finite number");
  return x;
}

inline json judged(double value, double tol) { return {{"value", finite(value)}, {"tol", finite(tol)}}; }

namespace detail {

/// Runs a JSON accessor and turns type/key errors into ParseError.
template <typename F>
auto parse_guard(const std::string& what, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const json::exception& e) {
    fail(ErrorCode::ParseError, what + ": " + e.what());
  }
}

}  // namespace detail

inline json to_json(cplx z) { return json::array({finite(z.real()), finite(z.imag())}); }

inline cplx complex_from_json(const json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  require(j.is_array() && j.size() == 2, ErrorCode::ParseError, "complex numbers must be [re, im]");
  return {j.at(0).get<double>(), j.at(1).get<double>()};
}

inline json to_json(const CMat& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(to_json(m(i, k)));
    rows.push_back(row);
  }
  return rows;
}

inline json to_json(const RMat& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(finite(m(i, k)));
    rows.push_back(row);
  }
  return rows;
}

inline CMat cmat_from_json(const json& j, int dim) {
  return detail::parse_guard("complex matrix", [&] {
    require(j.is_array() && static_cast<int>(j.size()) == dim, ErrorCode::ParseError, "matrix must have " +
                                                                                            std::to_string(dim) + " rows");
    CMat m(dim, dim);
    for (int i = 0; i < dim; ++i) {
      require(j[i].is_array() && static_cast<int>(j[i].size()) == dim, ErrorCode::ParseError, "ragged matrix row");
      for (int k = 0; k < dim; ++k) m(i, k) = complex_from_json(j[i][k]);
    }
    return m;
  });
}

inline RMat rmat_from_json(const json& j, int dim) {
  return detail::parse_guard("real matrix", [&] {
    require(j.is_array() && static_cast<int>(j.size()) == dim, ErrorCode::ParseError, "matrix must have " +
                                                                                            std::to_string(dim) + " rows");
    RMat m(dim, dim);
    for (int i = 0; i < dim; ++i) {
      require(j[i].is_array() && static_cast<int>(j[i].size()) == dim, ErrorCode::ParseError, "ragged matrix row");
      for (int k = 0; k < dim; ++k) m(i, k) = j[i][k].get<double>();
    }
    return m;
  });
}

inline json to_json(const FactorSystem& w) {
  json rows = json::array();
  for (const auto& r : w.table()) {
    json row = json::array();
    for (cplx z : r) row.push_back(to_json(z));
    rows.push_back(row);
  }
  return rows;
}

inline FactorSystem factor_system_from_json(const json& j, int n) {
  return detail::parse_guard("omega", [&] {
    require(j.is_array() && static_cast<int>(j.size()) == n, ErrorCode::ParseError, "omega must be n x n");
    std::vector<std::vector<cplx>> t(n, std::vector<cplx>(n));
    for (int a = 0; a < n; ++a) {
      require(j[a].is_array() && static_cast<int>(j[a].size()) == n, ErrorCode::ParseError, "omega must be n x n");
      for (int b = 0; b < n; ++b) t[a][b] = complex_from_json(j[a][b]);
    }
    return FactorSystem(std::move(t));
  });
}

struct GroupData {
  std::shared_ptr<const MagneticGroup> group;
  FactorSystem omega;
};

/// Table and flags as read, before any group validation.
struct RawGroup {
  CayleyTable cayley;
  std::vector<int> flags;
  std::vector<std::string> labels;
  std::vector<ElementSet> chain;
  std::optional<json> omega;
};

inline RawGroup raw_group_from_json(const json& j) {
  return detail::parse_guard("group", [&] {
    require(j.is_object(), ErrorCode::ParseError, "group must be a JSON object");
    RawGroup raw;
    raw.cayley = j.at("cayley").get<CayleyTable>();
    const int n = static_cast<int>(raw.cayley.size());
    if (j.contains("order"))
      require(j.at("order").get<int>() == n, ErrorCode::ParseError, "order does not match the Cayley table");
    raw.flags = j.contains("antiunitary") ? j.at("antiunitary").get<std::vector<int>>() : std::vector<int>(n, 0);
    if (j.contains("labels")) raw.labels = j.at("labels").get<std::vector<std::string>>();
    if (j.contains("subgroup_chain")) raw.chain = j.at("subgroup_chain").get<std::vector<ElementSet>>();
    if (j.contains("omega") && !j.at("omega").is_null()) raw.omega = j.at("omega");
    return raw;
  });
}

inline GroupData group_from_json(const json& j) {
  RawGroup raw = raw_group_from_json(j);
  auto g = std::make_shared<const MagneticGroup>(build_group(raw.cayley, raw.flags, raw.labels, raw.chain));
  FactorSystem w = raw.omega ? factor_system_from_json(*raw.omega, g->order()) : FactorSystem::trivial(g->order());
  return {g, w};
}

inline json to_json(const MagneticGroup& g, const std::optional<FactorSystem>& omega = std::nullopt) {
  json j;
  j["order"] = g.order();
  j["labels"] = g.labels();
  j["cayley"] = g.cayley();
  j["antiunitary"] = g.flags();
  j["subgroup_chain"] = g.subgroup_chain();
  if (omega) j["omega"] = to_json(*omega);
  return j;
}

inline ElementId element_by_label(const MagneticGroup& g, const std::string& label) {
  auto id = g.find(label);
  require(id.has_value(), ErrorCode::ParseError, "unknown element label '" + label + "'");
  return *id;
}

/// Reads a co-rep. The group comes from `group` when given, otherwise from the
/// file's "group" entry (inline object or path relative to `base`). A co-rep
/// "omega" overrides the group's factor system.
inline CoRep corep_from_json(const json& j, const std::optional<GroupData>& group = std::nullopt,
                             const std::filesystem::path& base = ".") {
  GroupData gd = detail::parse_guard("co-rep", [&]() -> GroupData {
    if (group) return *group;
    require(j.contains("group"), ErrorCode::ParseError, "co-rep has no group and none was supplied");
    const json& gj = j.at("group");
    if (gj.is_string()) return group_from_json(read_json_file(base / gj.get<std::string>()));
    return group_from_json(gj);
  });
  const MagneticGroup& g = *gd.group;
  return detail::parse_guard("co-rep", [&] {
    const int d = j.at("dim").get<int>();
    require(d >= 1, ErrorCode::ParseError, "dim must be positive");
    const json& mats = j.at("matrices");
    require(mats.is_object(), ErrorCode::ParseError, "matrices must be keyed by element label");
    std::vector<CMat> m(g.order());
    for (ElementId a = 0; a < g.order(); ++a) {
      require(mats.contains(g.label(a)), ErrorCode::ParseError, "no matrix for element '" + g.label(a) + "'");
      m[a] = cmat_from_json(mats.at(g.label(a)), d);
    }
    for (const auto& [key, _] : mats.items()) element_by_label(g, key);
    FactorSystem w = j.contains("omega") && !j.at("omega").is_null() ? factor_system_from_json(j.at("omega"), g.order())
                                                                      : gd.omega;
    return CoRep(gd.group, std::move(w), std::move(m));
  });
}

inline json to_json(const CoRep& r, bool inline_group = true) {
  json j;
  if (inline_group) j["group"] = to_json(r.group());
  j["dim"] = r.dim();
  j["omega"] = to_json(r.omega());
  json mats = json::object();
  for (ElementId a = 0; a < r.group().order(); ++a) mats[r.group().label(a)] = to_json(r(a));
  j["matrices"] = mats;
  return j;
}

/// Reads an action; matrices may cover every element or only H plus T0.
inline ProbeRepAction action_from_json(const json& j, const std::shared_ptr<const MagneticGroup>& group) {
  const MagneticGroup& g = *group;
  return detail::parse_guard("action", [&] {
    const int q = j.at("dim").get<int>();
    require(q >= 1, ErrorCode::ParseError, "action dim must be positive");
    const ProbeKind kind = j.contains("kind") ? probe_kind_from_string(j.at("kind").get<std::string>()) : ProbeKind::Generic;
    const int order = j.contains("order") ? j.at("order").get<int>() : 1;
    const json& mats = j.at("matrices");
    require(mats.is_object(), ErrorCode::ParseError, "action matrices must be keyed by element label");
    for (const auto& [key, _] : mats.items()) element_by_label(g, key);
    bool all = true;
    for (ElementId a = 0; a < g.order(); ++a) all = all && mats.contains(g.label(a));
    if (all) {
      std::vector<RMat> m;
      for (ElementId a = 0; a < g.order(); ++a) m.push_back(rmat_from_json(mats.at(g.label(a)), q));
      return ProbeRepAction(group, std::move(m), kind, order);
    }
    std::map<ElementId, RMat> unitary;
    for (ElementId h : g.halving()) {
      require(mats.contains(g.label(h)), ErrorCode::ParseError, "no action matrix for '" + g.label(h) + "'");
      unitary[h] = rmat_from_json(mats.at(g.label(h)), q);
    }
    std::optional<RMat> dt;
    if (g.has_t0()) {
      require(mats.contains(g.label(g.t0())), ErrorCode::ParseError, "no action matrix for T0 '" + g.label(g.t0()) + "'");
      dt = rmat_from_json(mats.at(g.label(g.t0())), q);
    }
    return ProbeRepAction::from_halving(group, unitary, dt, kind, order);
  });
}

inline json to_json(const ProbeRepAction& a) {
  json j;
  j["dim"] = a.dim();
  j["kind"] = to_string(a.kind());
  j["order"] = a.order();
  json mats = json::object();
  for (ElementId e = 0; e < a.group().order(); ++e) mats[a.group().label(e)] = to_json(a(e));
  j["matrices"] = mats;
  if (!a.basis().empty()) j["basis"] = a.basis();
  return j;
}

// Reports ---------------------------------------------------------------------

inline json to_json(const CocycleReport& r) {
  return {{"violation", judged(r.max_violation, r.tol)},
          {"modulus_error", judged(r.max_modulus_error, r.tol)},
          {"worst_triple", r.worst_triple},
          {"pass", r.pass}};
}

inline json to_json(const CoRepReport& r) {
  return {{"unitarity", judged(r.unitarity_residual, r.tol)},
          {"relation", judged(r.relation_residual, r.tol)},
          {"worst_pair", {r.worst_pair.first, r.worst_pair.second}},
          {"pass", r.pass}};
}

inline json optional_int(const std::optional<int>& v) { return v ? json(*v) : json(nullptr); }

inline json to_json(const IrrepDecomposition& d) {
  json blocks = json::array();
  for (const auto& b : d.blocks) {
    json labels = json::array();
    for (const auto& col : b.class_labels) {
      json c = json::array();
      for (double x : col) c.push_back(finite(x));
      labels.push_back(c);
    }
    blocks.push_back({{"offset", b.offset},
                      {"dim", b.dim},
                      {"energy", finite(b.energy)},
                      {"class_labels", labels},
                      {"torsion", optional_int(b.torsion)},
                      {"criterion", judged(b.criterion, d.tol)}});
  }
  return {{"criterion", judged(d.criterion, d.tol)},
          {"irreducible", d.irreducible},
          {"torsion", optional_int(d.torsion)},
          {"blocks", blocks},
          {"basis", to_json(d.basis)},
          {"residuals",
           {{"block_offdiagonal", judged(d.block_residual, d.tol)},
            {"commutant", judged(d.commutant_residual, 1e-9)},
            {"simultaneous_diag", judged(d.offdiag_residual, 1e-7)}}},
          {"seeds_used", d.seeds_used},
          {"log", d.log}};
}

inline IrrepDecomposition decomposition_from_json(const json& j, int dim) {
  return detail::parse_guard("decomposition", [&] {
    IrrepDecomposition d;
    d.tol = j.at("criterion").at("tol").get<double>();
    d.criterion = j.at("criterion").at("value").get<double>();
    d.irreducible = j.at("irreducible").get<bool>();
    if (!j.at("torsion").is_null()) d.torsion = j.at("torsion").get<int>();
    d.basis = cmat_from_json(j.at("basis"), dim);
    for (const auto& bj : j.at("blocks")) {
      IrrepBlock b;
      b.offset = bj.at("offset").get<int>();
      b.dim = bj.at("dim").get<int>();
      b.energy = bj.at("energy").get<double>();
      b.class_labels = bj.at("class_labels").get<std::vector<std::vector<double>>>();
      if (!bj.at("torsion").is_null()) b.torsion = bj.at("torsion").get<int>();
      b.criterion = bj.at("criterion").at("value").get<double>();
      d.blocks.push_back(b);
    }
    d.block_residual = j.at("residuals").at("block_offdiagonal").at("value").get<double>();
    d.seeds_used = j.at("seeds_used").get<std::vector<std::uint64_t>>();
    return d;
  });
}

inline json gammas_to_json(const GammaSet& gammas) {
  json out = json::array();
  for (const auto& set : gammas) {
    json comps = json::array();
    for (const auto& m : set) comps.push_back(to_json(m));
    out.push_back(comps);
  }
  return out;
}

inline GammaSet gammas_from_json(const json& j, int d) {
  return detail::parse_guard("gammas", [&] {
    GammaSet g;
    for (const auto& set : j) {
      std::vector<CMat> comps;
      for (const auto& m : set) comps.push_back(cmat_from_json(m, d));
      g.push_back(comps);
    }
    return g;
  });
}

inline json to_json(const KpModel& m) {
  return {{"multiplicity", m.multiplicity},
          {"q", m.q},
          {"d", m.d},
          {"gammas", gammas_to_json(m.gammas)},
          {"residuals",
           {{"hermiticity", judged(m.hermiticity_residual, m.tol)},
            {"covariance", judged(m.covariance_residual, m.tol)},
            {"gauge", judged(m.gauge_residual, m.tol)}}}};
}

inline KpModel kp_model_from_json(const json& j) {
  return detail::parse_guard("kp model", [&] {
    KpModel m;
    m.multiplicity = j.at("multiplicity").get<int>();
    m.q = j.at("q").get<int>();
    m.d = j.at("d").get<int>();
    m.gammas = gammas_from_json(j.at("gammas"), m.d);
    m.tol = j.at("residuals").at("covariance").at("tol").get<double>();
    m.covariance_residual = j.at("residuals").at("covariance").at("value").get<double>();
    m.hermiticity_residual = j.at("residuals").at("hermiticity").at("value").get<double>();
    return m;
  });
}

inline json to_json(const DispersionReport& r) {
  json chans = json::array();
  for (const auto& c : r.channels) {
    json cj = {{"channel", c.name},
               {"order", c.order},
               {"dim", c.dim},
               {"multiplicity", c.multiplicity},
               {"polynomials", c.polynomials}};
    cj["gammas"] = c.model ? gammas_to_json(c.model->gammas) : json::array();
    if (c.model) cj["model"] = to_json(*c.model);
    chans.push_back(cj);
  }
  return {{"channels", chans}, {"leading_order", optional_int(r.leading_order)}};
}

inline json to_json(const ProbeReport& r) {
  json chans = json::array();
  for (const auto& c : r.channels) {
    json cj = {{"channel", c.name},
               {"kind", to_string(c.kind)},
               {"order", 1},
               {"multiplicity", c.multiplicity},
               {"trivial_count", c.trivial_count},
               {"splitting_multiplicity", c.splitting_multiplicity},
               {"protected", r.protected_degeneracy}};
    cj["gammas"] = c.couplings ? gammas_to_json(c.couplings->gammas) : json::array();
    if (c.couplings) cj["model"] = to_json(*c.couplings);
    chans.push_back(cj);
  }
  return {{"criterion", judged(r.index, r.tol)}, {"protected", r.protected_degeneracy}, {"channels", chans}};
}

inline std::string format_matrix(const CMat& m, int precision = 4) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(precision);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    os << "  [";
    for (Eigen::Index k = 0; k < m.cols(); ++k) {
      const cplx z = m(i, k);
      const double re = std::abs(z.real()) < 5e-13 ? 0.0 : z.real();
      const double im = std::abs(z.imag()) < 5e-13 ? 0.0 : z.imag();
      os << (k ? ", " : "") << re << (im < 0 ? "-" : "+") << std::abs(im) << "i";
    }
    os << "]\n";
  }
  return os.str();
}

}  // namespace magrep

#endif
