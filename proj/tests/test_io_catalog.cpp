#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <limits>

using namespace magrep;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorCode::InvalidArgument;
}

const char* kKramersGroup = R"({
  "order": 2, "labels": ["E", "T"], "cayley": [[0, 1], [1, 0]], "antiunitary": [0, 1],
  "omega": [[[1, 0], [1, 0]], [[1, 0], [-1, 0]]]
})";

const char* kKramersRep = R"({
  "dim": 2,
  "matrices": {"E": [[1, 0], [0, 1]], "T": [[0, 1], [-1, 0]]}
})";

}  // namespace

TEST(Catalog, ListAndGet) {
  const auto names = catalog_list();
  EXPECT_GE(names.size(), 6u);
  for (const auto& n : names) EXPECT_EQ(catalog_get(n).name, n);
  EXPECT_EQ(code_of([] { catalog_get("no_such_group"); }), ErrorCode::UnknownName);
  EXPECT_EQ(code_of([] { catalog_get("z2t_kramers").rep("nope"); }), ErrorCode::UnknownName);
}

TEST(Catalog, RequiredFixturesPresent) {
  const auto names = catalog_list();
  for (const char* n : {"z2t_spinless", "z2t_kramers", "z4t", "c4v_grey", "c6v_grey", "q8t"})
    EXPECT_NE(std::find(names.begin(), names.end(), n), names.end()) << n;
  EXPECT_FALSE(catalog_get("z4t").group->type_one());
}

TEST(Catalog, RepFlagsMatchCriterionAndTorsion) {
  for (const auto& e : oracle::catalog())
    for (const auto& r : e.reps) {
      const bool irr = std::abs(irreducibility_index(r.rep) - 1.0) < 1e-9;
      EXPECT_EQ(irr, r.irreducible) << e.name << ":" << r.name;
      if (irr && r.torsion) {
        EXPECT_EQ(torsion_number(r.rep), *r.torsion) << e.name << ":" << r.name;
      }
    }
}

TEST(Catalog, KnownTorsionNumbers) {
  EXPECT_EQ(catalog_get("z2t_kramers").rep("kramers").torsion, 4);
  EXPECT_EQ(catalog_get("z2t_spinless").rep("A").torsion, 1);
  EXPECT_EQ(catalog_get("c3t").rep("E_complex").torsion, 2);
}

TEST(Catalog, VectorActionsAndScalars) {
  for (const auto& e : oracle::catalog()) {
    const MagneticGroup& g = *e.group;
    const ElementId t = g.t0();
    const ProbeRepAction& mom = e.action("momentum");
    const ProbeRepAction& ele = e.action("electric");
    EXPECT_EQ(mom.dim(), 3);
    for (ElementId h : g.halving()) EXPECT_LT(max_abs(RMat(mom(h) - ele(h))), 1e-12) << e.name;
    EXPECT_LT(max_abs(RMat(mom(t) + ele(t))), 1e-12) << e.name;
    for (ElementId a = 0; a < g.order(); ++a) {
      EXPECT_NEAR(e.action("electric_scalar")(a)(0, 0), 1.0, 1e-15);
      EXPECT_NEAR(e.action("magnetic_scalar")(a)(0, 0), g.antiunitary(a) ? -1.0 : 1.0, 1e-15);
    }
  }
}

TEST(Json, ComplexPairs) {
  EXPECT_EQ(to_json(cplx(1.5, -2.0)), json::parse("[1.5, -2.0]"));
  EXPECT_EQ(complex_from_json(json::parse("[0.25, 3]")), cplx(0.25, 3.0));
  EXPECT_EQ(complex_from_json(json::parse("2")), cplx(2.0, 0.0));
  EXPECT_EQ(code_of([] { complex_from_json(json::parse("[1, 2, 3]")); }), ErrorCode::ParseError);
}

TEST(Json, NonFiniteValuesAreRefused) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  const double inf = std::numeric_limits<double>::infinity();
  EXPECT_EQ(code_of([&] { magrep::finite(nan); }), ErrorCode::InvalidArgument);
  EXPECT_EQ(code_of([&] { to_json(cplx(0.0, inf)); }), ErrorCode::InvalidArgument);
  EXPECT_EQ(code_of([&] { judged(nan, 1e-8); }), ErrorCode::InvalidArgument);
  RMat m = RMat::Identity(2, 2);
  m(1, 0) = inf;
  EXPECT_EQ(code_of([&] { to_json(m); }), ErrorCode::InvalidArgument);
}

TEST(Json, GroupRoundTrip) {
  for (const auto& e : oracle::catalog())
    for (const auto& [name, w] : e.omega_classes) {
      const GroupData back = group_from_json(json::parse(to_json(*e.group, w).dump()));
      EXPECT_EQ(back.group->cayley(), e.group->cayley());
      EXPECT_EQ(back.group->flags(), e.group->flags());
      EXPECT_EQ(back.group->labels(), e.group->labels());
      EXPECT_EQ(back.group->t0(), e.group->t0());
      EXPECT_EQ(back.group->subgroup_chain(), e.group->subgroup_chain());
      EXPECT_TRUE(oracle::same_omega(back.omega, w)) << e.name << ":" << name;
    }
}

TEST(Json, CoRepRoundTrip) {
  for (const auto& e : oracle::catalog())
    for (const auto& r : e.reps) {
      const CoRep back = corep_from_json(json::parse(to_json(r.rep).dump()));
      ASSERT_EQ(back.dim(), r.rep.dim());
      for (ElementId a = 0; a < e.group->order(); ++a) EXPECT_LT(max_abs(CMat(back(a) - r.rep(a))), 1e-15);
      EXPECT_TRUE(oracle::same_omega(back.omega(), r.rep.omega()));
      EXPECT_TRUE(validate_corep(back).pass);
    }
}

TEST(Json, ActionRoundTripAndHalvingOnlyInput) {
  for (const auto& e : oracle::catalog())
    for (const auto& [name, a] : e.probe_actions) {
      const json j = to_json(a);
      const ProbeRepAction back = action_from_json(json::parse(j.dump()), e.group);
      EXPECT_EQ(back.kind(), a.kind());
      for (ElementId g = 0; g < e.group->order(); ++g) EXPECT_LT(max_abs(RMat(back(g) - a(g))), 1e-15);

      json partial = j;
      const MagneticGroup& g = *e.group;
      for (ElementId x = 0; x < g.order(); ++x)
        if (g.antiunitary(x) && x != g.t0()) partial["matrices"].erase(g.label(x));
      const ProbeRepAction rebuilt = action_from_json(partial, e.group);
      for (ElementId x = 0; x < g.order(); ++x) EXPECT_LT(max_abs(RMat(rebuilt(x) - a(x))), 1e-12) << e.name << ":" << name;
    }
}

TEST(Json, DecompositionRoundTripStillVerifies) {
  Rng rng(4);
  const CatalogEntry e = catalog_get("c4v_grey");
  const CoRep r = change_basis(direct_sum(e.rep("E1").rep, e.rep("A2").rep), rng.unitary(3));
  const IrrepDecomposition d = reduce_corep(r);
  const IrrepDecomposition back = decomposition_from_json(json::parse(to_json(d).dump()), r.dim());
  EXPECT_EQ(oracle::sorted_dims(back), oracle::sorted_dims(d));
  EXPECT_LT(max_abs(CMat(back.basis - d.basis)), 1e-15);
  EXPECT_LT(block_offdiag_residual(r, back.basis, back.blocks), 1e-8);
  EXPECT_EQ(back.seeds_used, d.seeds_used);
}

TEST(Json, KpModelRoundTripStillVerifies) {
  const CatalogEntry e = catalog_get("c4v_grey");
  const ProbeRepAction& a = e.action("momentum");
  const CoRep& r = e.rep("E1/2").rep;
  const KpModel m = build_gamma_matrices(r, a);
  const KpModel back = kp_model_from_json(json::parse(to_json(m).dump()));
  EXPECT_EQ(back.multiplicity, m.multiplicity);
  EXPECT_LT(covariance_residual(r, a, back.gammas), 1e-12);
  EXPECT_LT(gamma_span_distance(back.gammas, m.gammas), 1e-12);
}

TEST(Json, MalformedInputIsParseError) {
  const json g = json::parse(kKramersGroup);
  EXPECT_EQ(code_of([] { group_from_json(json::parse(R"({"labels": ["E"]})")); }), ErrorCode::ParseError);
  EXPECT_EQ(code_of([] { group_from_json(json::parse(R"({"cayley": "nope"})")); }), ErrorCode::ParseError);
  EXPECT_EQ(code_of([] { group_from_json(json::parse(R"({"order": 3, "cayley": [[0]]})")); }), ErrorCode::ParseError);
  const GroupData gd = group_from_json(g);
  EXPECT_EQ(code_of([&] { corep_from_json(json::parse(R"({"dim": 2, "matrices": {"E": [[1,0],[0,1]]}})"), gd); }),
            ErrorCode::ParseError);
  EXPECT_EQ(code_of([&] {
              corep_from_json(json::parse(R"({"dim": 2, "matrices": {"E": [[1,0],[0,1]], "T": [[0,1]], "X": []}})"), gd);
            }),
            ErrorCode::ParseError);
  EXPECT_EQ(code_of([] { corep_from_json(json::parse(R"({"dim": 1, "matrices": {}})")); }), ErrorCode::ParseError);
  EXPECT_EQ(code_of([] { read_json_file("/nonexistent/magrep/file.json"); }), ErrorCode::ParseError);

  const auto path = std::filesystem::temp_directory_path() / "magrep_bad.json";
  {
    std::ofstream out(path);
    out << "{ not json";
  }
  EXPECT_EQ(code_of([&] { read_json_file(path); }), ErrorCode::ParseError);
  std::filesystem::remove(path);
}

TEST(Json, OmegaDefaultsAndOverride) {
  json g = json::parse(kKramersGroup);
  const CoRep with = corep_from_json(json::parse(kKramersRep), group_from_json(g));
  EXPECT_TRUE(validate_corep(with).pass);

  g.erase("omega");
  const CoRep without = corep_from_json(json::parse(kKramersRep), group_from_json(g));
  EXPECT_EQ(without.omega()(1, 1), cplx(1.0));
  EXPECT_FALSE(validate_corep(without).pass);

  json rep = json::parse(kKramersRep);
  rep["omega"] = json::parse("[[[1,0],[1,0]],[[1,0],[-1,0]]]");
  EXPECT_TRUE(validate_corep(corep_from_json(rep, group_from_json(g))).pass);
}

TEST(Json, GroupByRelativePath) {
  const auto dir = std::filesystem::temp_directory_path() / "magrep_io_test";
  std::filesystem::create_directories(dir);
  write_json_file(dir / "g.json", json::parse(kKramersGroup));
  json rep = json::parse(kKramersRep);
  rep["group"] = "g.json";
  const CoRep r = corep_from_json(rep, std::nullopt, dir);
  EXPECT_TRUE(validate_corep(r).pass);
  EXPECT_EQ(torsion_number(r), 4);
  std::filesystem::remove_all(dir);
}
