// magrep: command-line front end over the header-only library.
// Exit codes: 0 success, 1 domain failure, 2 input or usage error.

#include "magrep/magrep.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using magrep::json;

namespace {

constexpr std::uint64_t kDefaultSeed = 20240611;

struct Common {
  std::string group_file;
  std::string rep_file;
  std::string out;
  std::string format = "json";
  double tol = 1e-8;
  std::uint64_t seed = kDefaultSeed;
};

int exit_code_for(magrep::ErrorCode c) {
  using magrep::ErrorCode;
  switch (c) {
    case ErrorCode::ParseError:
    case ErrorCode::UnknownName:
    case ErrorCode::InvalidArgument:
      return 2;
    default:
      return 1;
  }
}

json error_json(const magrep::Error& e) {
  return {{"status", "error"}, {"error", {{"code", std::string(magrep::to_string(e.code())) }, {"message", e.what()}}}};
}

void emit(const Common& c, const json& j, const std::string& text) {
  const std::string body = c.format == "text" ? text : j.dump(2) + "\n";
  if (c.out.empty()) {
    std::cout << body;
    return;
  }
  std::ofstream os(c.out);
  if (!os) magrep::fail(magrep::ErrorCode::ParseError, "cannot write " + c.out);
  os << body;
}

std::optional<magrep::GroupData> load_group(const Common& c) {
  if (c.group_file.empty()) return std::nullopt;
  return magrep::group_from_json(magrep::read_json_file(c.group_file));
}

magrep::CoRep load_rep(const Common& c) {
  if (c.rep_file.empty()) magrep::fail(magrep::ErrorCode::InvalidArgument, "--rep is required");
  const json j = magrep::read_json_file(c.rep_file);
  return magrep::corep_from_json(j, load_group(c), fs::path(c.rep_file).parent_path());
}

void add_common(CLI::App* sub, Common& c, bool needs_rep = true) {
  sub->add_option("--group", c.group_file, "group JSON (optional when the rep embeds or references one)");
  auto* rep = sub->add_option("--rep", c.rep_file, "co-rep JSON");
  if (needs_rep) rep->required();
  sub->add_option("--out", c.out, "write the report here instead of stdout");
  sub->add_option("--format", c.format, "json or text")->check(CLI::IsMember({"json", "text"}));
  sub->add_option("--tol", c.tol, "numerical tolerance")->capture_default_str();
  sub->add_option("--seed", c.seed, "seed for randomized steps")->capture_default_str();
}

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(10);
  os << x;
  return os.str();
}

// --- subcommands -------------------------------------------------------------

int run_validate(const Common& c) {
  json report;
  report["status"] = "ok";
  std::string text;
  std::shared_ptr<const magrep::MagneticGroup> group;
  magrep::FactorSystem omega;
  json rep_json;
  fs::path base = ".";
  if (!c.rep_file.empty()) {
    rep_json = magrep::read_json_file(c.rep_file);
    base = fs::path(c.rep_file).parent_path();
  }
  json group_json;
  if (!c.group_file.empty()) group_json = magrep::read_json_file(c.group_file);
  else if (rep_json.is_object() && rep_json.contains("group"))
    group_json = rep_json.at("group").is_string() ? magrep::read_json_file(base / rep_json.at("group").get<std::string>())
                                                  : rep_json.at("group");
  else magrep::fail(magrep::ErrorCode::InvalidArgument, "validate needs --group or a rep that names its group");

  // structural failures are reported, not thrown
  try {
    magrep::RawGroup raw = magrep::raw_group_from_json(group_json);
    group = std::make_shared<const magrep::MagneticGroup>(magrep::build_group(raw.cayley, raw.flags, raw.labels, raw.chain));
    omega = raw.omega ? magrep::factor_system_from_json(*raw.omega, group->order())
                      : magrep::FactorSystem::trivial(group->order());
    report["group"] = {{"order", group->order()},
                       {"halving_order", group->halving_order()},
                       {"t0", group->has_t0() ? json(group->label(group->t0())) : json(nullptr)},
                       {"type_one", group->type_one()},
                       {"omega_default", !raw.omega.has_value()}};
    text += "group: order " + std::to_string(group->order()) + ", |H| = " + std::to_string(group->halving_order()) + "\n";
  } catch (const magrep::Error& e) {
    if (exit_code_for(e.code()) == 2) throw;
    report["status"] = "failed";
    report["error"] = error_json(e)["error"];
    emit(c, report, std::string("group: FAILED ") + e.what() + "\n");
    return 1;
  }

  magrep::CoRep rep = [&] {
    if (rep_json.is_object()) {
      magrep::CoRep r = magrep::corep_from_json(rep_json, magrep::GroupData{group, omega}, base);
      return r;
    }
    return magrep::CoRep(group, omega, std::vector<magrep::CMat>(group->order(), magrep::CMat::Identity(1, 1)));
  }();
  const magrep::CocycleReport cr = magrep::validate_cocycle(*group, rep.omega());
  report["cocycle"] = magrep::to_json(cr);
  text += std::string("cocycle: ") + (cr.pass ? "pass" : "FAIL") + " (violation " + fmt(cr.max_violation) + ")\n";
  if (rep_json.is_object()) {
    const magrep::CoRepReport rr = magrep::validate_corep(rep);
    report["corep"] = magrep::to_json(rr);
    text += std::string("co-rep: ") + (rr.pass ? "pass" : "FAIL") + " (relation " + fmt(rr.relation_residual) + ")\n";
    if (!rr.pass) report["status"] = "failed";
  }
  if (!cr.pass) report["status"] = "failed";
  emit(c, report, text);
  return report["status"] == "ok" ? 0 : 1;
}

int run_irreducible(const Common& c) {
  const magrep::CoRep r = load_rep(c);
  magrep::require_valid(r);
  const double idx = magrep::irreducibility_index(r);
  const double idx_trace = magrep::irreducibility_index_trace(r);
  const bool irr = std::abs(idx - 1.0) <= c.tol;
  json j = {{"status", "ok"},
            {"criterion", magrep::judged(idx, c.tol)},
            {"criterion_trace_form", magrep::judged(idx_trace, c.tol)},
            {"irreducible", irr}};
  emit(c, j, "criterion " + fmt(idx) + " (trace form " + fmt(idx_trace) + "): " + (irr ? "irreducible" : "reducible") + "\n");
  return 0;
}

int run_torsion(const Common& c) {
  const magrep::CoRep r = load_rep(c);
  magrep::require_valid(r);
  const double s = magrep::torsion_indicator(r);
  const int t = magrep::torsion_number(r, c.tol);
  json j = {{"status", "ok"}, {"indicator", magrep::judged(s, c.tol)}, {"torsion", t}};
  emit(c, j, "indicator " + fmt(s) + " -> R = " + std::to_string(t) + "\n");
  return 0;
}

int run_reduce(const Common& c) {
  const magrep::CoRep r = load_rep(c);
  magrep::ReduceOptions opt;
  opt.seed = c.seed;
  opt.tol = c.tol;
  const magrep::IrrepDecomposition d = magrep::reduce_corep(r, opt);
  json j = magrep::to_json(d);
  j["status"] = "ok";
  j["seed"] = c.seed;
  std::string text = "blocks:";
  for (const auto& b : d.blocks)
    text += " " + std::to_string(b.dim) + (b.torsion ? "(R=" + std::to_string(*b.torsion) + ")" : "");
  text += "\nblock residual " + fmt(d.block_residual) + "\n";
  for (const auto& line : d.log) text += line + "\n";
  emit(c, j, text);
  return 0;
}

magrep::ProbeRepAction load_action(const std::string& path, const magrep::CoRep& r) {
  return magrep::action_from_json(magrep::read_json_file(path), r.group_ptr());
}

int run_kp(const Common& c, const std::string& action_file, int max_order) {
  if (max_order < 1) magrep::fail(magrep::ErrorCode::InvalidArgument, "--max-order must be at least 1");
  const magrep::CoRep r = load_rep(c);
  const magrep::ProbeRepAction a = load_action(action_file, r);
  const magrep::DispersionReport rep = magrep::dispersion_order(r, a, max_order, c.seed, c.tol);
  json j = magrep::to_json(rep);
  j["status"] = "ok";
  j["seed"] = c.seed;
  j["max_order"] = max_order;
  std::string text = "leading order: " + (rep.leading_order ? std::to_string(*rep.leading_order) : "none") + "\n";
  for (const auto& ch : rep.channels) {
    text += "order " + std::to_string(ch.order) + " " + ch.name + " (dim " + std::to_string(ch.dim) +
            "): p = " + std::to_string(ch.multiplicity) + "\n";
    if (!ch.model) continue;
    for (std::size_t i = 0; i < ch.model->gammas.size(); ++i)
      for (std::size_t m = 0; m < ch.model->gammas[i].size(); ++m) {
        const std::string var = m < ch.polynomials.size() ? ch.polynomials[m] : "m" + std::to_string(m);
        text += " gamma_" + std::to_string(i + 1) + " [" + var + "]\n" + magrep::format_matrix(ch.model->gammas[i][m]);
      }
  }
  emit(c, j, text);
  return 0;
}

std::vector<std::string> split_labels(const std::vector<std::string>& in) {
  std::vector<std::string> out;
  for (const auto& s : in) {
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ','))
      if (!tok.empty()) out.push_back(tok);
  }
  return out;
}

int run_probe(const Common& c, const std::vector<std::string>& keep, const std::vector<std::string>& channels) {
  const magrep::CoRep r = load_rep(c);
  magrep::require_valid(r);
  const magrep::MagneticGroup& g = r.group();
  magrep::ElementSet ids;
  for (const auto& l : split_labels(keep)) ids.push_back(magrep::element_by_label(g, l));
  if (ids.empty()) ids.push_back(g.identity());
  const magrep::Subgroup sub = magrep::restrict_to_subgroup(g, ids);
  std::vector<std::pair<std::string, magrep::ProbeRepAction>> probes;
  for (const auto& arg : channels) {
    // NAME=path or just path
    const auto eq = arg.find('=');
    const std::string name = eq == std::string::npos ? fs::path(arg).stem().string() : arg.substr(0, eq);
    const std::string path = eq == std::string::npos ? arg : arg.substr(eq + 1);
    probes.emplace_back(name, load_action(path, r));
  }
  const magrep::ProbeReport rep = magrep::probe_stability(r, std::make_shared<const magrep::MagneticGroup>(sub.group), sub.embedding, probes, c.tol);
  json j = magrep::to_json(rep);
  j["status"] = "ok";
  json kept = json::array();
  for (auto e : sub.embedding) kept.push_back(g.label(e));
  j["subgroup"] = kept;
  std::string text = "restricted criterion " + fmt(rep.index) + ": " +
                     (rep.protected_degeneracy ? "protected" : "splitting allowed") + "\n";
  for (const auto& ch : rep.channels)
    text += ch.name + ": p = " + std::to_string(ch.multiplicity) + ", splitting = " +
            std::to_string(ch.splitting_multiplicity) + "\n";
  emit(c, j, text);
  return 0;
}

std::string file_safe(std::string s) {
  for (char& ch : s)
    if (ch == '/' || ch == ' ') ch = '_';
  return s;
}

json entry_summary(const magrep::CatalogEntry& e) {
  json reps = json::array();
  for (const auto& r : e.reps)
    reps.push_back({{"name", r.name},
                    {"dim", r.rep.dim()},
                    {"irreducible", r.irreducible},
                    {"torsion", magrep::optional_int(r.torsion)}});
  json actions = json::array();
  for (const auto& [k, a] : e.probe_actions) actions.push_back({{"name", k}, {"dim", a.dim()}, {"kind", to_string(a.kind())}});
  json omegas = json::array();
  for (const auto& [k, _] : e.omega_classes) omegas.push_back(k);
  return {{"name", e.name}, {"description", e.description}, {"order", e.group->order()},
          {"omega_classes", omegas}, {"reps", reps}, {"actions", actions}};
}

int run_catalog(const Common& c, const std::string& verb, const std::string& name, const std::string& dir) {
  if (verb == "list") {
    json arr = json::array();
    std::string text;
    for (const auto& n : magrep::catalog_list()) {
      const magrep::CatalogEntry e = magrep::catalog_get(n);
      arr.push_back({{"name", n}, {"description", e.description}, {"order", e.group->order()}});
      text += n + "  (order " + std::to_string(e.group->order()) + ")  " + e.description + "\n";
    }
    emit(c, {{"status", "ok"}, {"entries", arr}}, text);
    return 0;
  }
  if (name.empty()) magrep::fail(magrep::ErrorCode::InvalidArgument, "catalog " + verb + " needs an entry name");
  const magrep::CatalogEntry e = magrep::catalog_get(name);
  if (verb == "get") {
    json j = entry_summary(e);
    j["status"] = "ok";
    j["group"] = magrep::to_json(*e.group);
    std::string text = e.name + ": " + e.description + "\n";
    for (const auto& r : e.reps) text += "  rep " + r.name + " (dim " + std::to_string(r.rep.dim()) + ")\n";
    for (const auto& [k, a] : e.probe_actions) text += "  action " + k + " (dim " + std::to_string(a.dim()) + ")\n";
    emit(c, j, text);
    return 0;
  }
  if (verb == "export") {
    if (dir.empty()) magrep::fail(magrep::ErrorCode::InvalidArgument, "catalog export needs a directory");
    const fs::path out(dir);
    fs::create_directories(out);
    magrep::write_json_file(out / "group.json", magrep::to_json(*e.group));
    json files = json::array({"group.json"});
    for (const auto& r : e.reps) {
      json rj = magrep::to_json(r.rep, false);
      rj["group"] = "group.json";
      rj["name"] = r.name;
      const std::string f = "rep_" + file_safe(r.name) + ".json";
      magrep::write_json_file(out / f, rj);
      files.push_back(f);
    }
    for (const auto& [k, a] : e.probe_actions) {
      const std::string f = "action_" + file_safe(k) + ".json";
      magrep::write_json_file(out / f, magrep::to_json(a));
      files.push_back(f);
    }
    json j = {{"status", "ok"}, {"entry", e.name}, {"directory", out.string()}, {"files", files}};
    std::string text;
    for (const auto& f : files) text += (out / f.get<std::string>()).string() + "\n";
    emit(c, j, text);
    return 0;
  }
  magrep::fail(magrep::ErrorCode::InvalidArgument, "unknown catalog verb '" + verb + "'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"magrep: co-representations of magnetic groups and k.p models"};
  app.require_subcommand(1);

  Common c;
  auto* validate = app.add_subcommand("validate", "check group, factor system and co-rep");
  add_common(validate, c, false);
  auto* irreducible = app.add_subcommand("irreducible", "evaluate the irreducibility criterion");
  add_common(irreducible, c);
  auto* torsion = app.add_subcommand("torsion", "torsion number of an irreducible co-rep");
  add_common(torsion, c);
  auto* reduce = app.add_subcommand("reduce", "decompose a co-rep into irreducible blocks");
  add_common(reduce, c);

  std::string action_file;
  int max_order = 2;
  auto* kp = app.add_subcommand("kp", "dispersion order and k.p matrices");
  add_common(kp, c);
  kp->add_option("--action", action_file, "momentum action JSON")->required();
  kp->add_option("--max-order", max_order, "highest polynomial order")->capture_default_str();

  std::vector<std::string> keep, channels;
  auto* probe = app.add_subcommand("probe", "stability of the degeneracy under a symmetry-breaking field");
  add_common(probe, c);
  probe->add_option("--keep", keep, "labels of the surviving elements (comma separated; default: identity only)");
  probe->add_option("--channel", channels, "probe action, NAME=path or path (repeatable)");

  std::string verb, name, dir;
  auto* catalog = app.add_subcommand("catalog", "built-in fixtures: list | get NAME | export NAME DIR");
  catalog->add_option("verb", verb, "list, get or export")->required()->check(CLI::IsMember({"list", "get", "export"}));
  catalog->add_option("name", name, "entry name");
  catalog->add_option("dir", dir, "output directory for export");
  catalog->add_option("--out", c.out, "write the report here instead of stdout");
  catalog->add_option("--format", c.format, "json or text")->check(CLI::IsMember({"json", "text"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*validate) return run_validate(c);
    if (*irreducible) return run_irreducible(c);
    if (*torsion) return run_torsion(c);
    if (*reduce) return run_reduce(c);
    if (*kp) return run_kp(c, action_file, max_order);
    if (*probe) return run_probe(c, keep, channels);
    if (*catalog) return run_catalog(c, verb, name, dir);
  } catch (const magrep::Error& e) {
    std::cout << error_json(e).dump(2) << "\n";
    std::cerr << "magrep: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "magrep: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
