#include "oracles.hpp"

#include <gtest/gtest.h>

using namespace magrep;

namespace {

std::shared_ptr<const MagneticGroup> z2t() {
  return std::make_shared<const MagneticGroup>(build_group({{0, 1}, {1, 0}}, {0, 1}, {"E", "T"}));
}

FactorSystem kramers_omega() {
  FactorSystem w = FactorSystem::trivial(2);
  w.at(1, 1) = -1.0;
  return w;
}

CMat isy() {
  CMat m(2, 2);
  m << 0, 1, -1, 0;
  return m;
}

CoRep kramers() { return CoRep(z2t(), kramers_omega(), {CMat::Identity(2, 2), isy()}); }

}  // namespace

TEST(ValidateCoRep, TrivialGroup) {
  auto g = std::make_shared<const MagneticGroup>(build_group({{0}}, {0}));
  const CoRepReport r = validate_corep(CoRep(g, {CMat::Identity(1, 1)}));
  EXPECT_TRUE(r.pass);
  EXPECT_EQ(r.relation_residual, 0.0);
}

TEST(ValidateCoRep, KramersPasses) { EXPECT_TRUE(validate_corep(kramers()).pass); }

TEST(ValidateCoRep, KramersMatricesWithTrivialOmegaFail) {
  const CoRep bad(z2t(), {CMat::Identity(2, 2), isy()});
  const CoRepReport r = validate_corep(bad);
  EXPECT_FALSE(r.pass);
  EXPECT_NEAR(r.relation_residual, 2.0, 1e-12);
  EXPECT_EQ(r.worst_pair, std::make_pair(ElementId{1}, ElementId{1}));
}

TEST(ValidateCoRep, NonUnitaryFails) {
  const CoRep bad(z2t(), kramers_omega(), {CMat::Identity(2, 2), CMat(2.0 * isy())});
  EXPECT_FALSE(validate_corep(bad).pass);
  EXPECT_THROW(require_valid(bad), Error);
}

TEST(ValidateCoRep, EveryCatalogRepPasses) {
  for (const auto& e : oracle::catalog())
    for (const auto& r : e.reps) EXPECT_TRUE(validate_corep(r.rep).pass) << e.name << ":" << r.name;
}

TEST(FOfH, IdentityGivesIdentity) {
  for (const auto& e : oracle::catalog())
    for (const auto& r : e.reps)
      EXPECT_LT(max_abs(CMat(f_of_h(r.rep, e.group->identity()) - CMat::Identity(r.rep.dim(), r.rep.dim()))), 1e-12);
}

TEST(FOfH, TraceIsConjugateCharacter) {
  for (const auto& e : oracle::catalog())
    for (const auto& r : e.reps)
      for (ElementId h : e.group->halving())
        EXPECT_LT(std::abs(f_of_h(r.rep, h).trace() - std::conj(r.rep(h).trace())), 1e-12) << e.name << ":" << r.name;
}

TEST(ProductRep, Examples) {
  const CoRep k = kramers();
  EXPECT_LT(max_abs(CMat(product_rep_V(k, 0) - CMat::Identity(4, 4))), 1e-14);
  const CMat vt = product_rep_V(k, 1);
  EXPECT_LT(max_abs(CMat(vt - kron(isy(), isy()))), 1e-14);
  EXPECT_LT(vt.imag().cwiseAbs().maxCoeff(), 1e-14);
}

TEST(ProductRep, LinearOnHalvingSubgroup) {
  for (const auto& e : oracle::catalog()) {
    const MagneticGroup& g = *e.group;
    for (const auto& r : e.reps)
      for (ElementId a : g.halving())
        for (ElementId b : g.halving()) {
          const CMat lhs = product_rep_V(r.rep, a) * product_rep_V(r.rep, b);
          EXPECT_LT(max_abs(CMat(lhs - product_rep_V(r.rep, g.mul(a, b)))), 1e-10) << e.name << ":" << r.name;
        }
  }
}

TEST(Character, Examples) {
  auto g = z2t();
  const auto one = character(CoRep(g, {CMat::Identity(1, 1), CMat::Identity(1, 1)}));
  EXPECT_EQ(one[0], cplx(1.0));
  EXPECT_EQ(character(kramers())[0], cplx(2.0));
}

TEST(Character, AdditiveUnderDirectSum) {
  const CatalogEntry e = catalog_get("c6v_grey");
  const CoRep& a = e.rep("E1").rep;
  const CoRep& b = e.rep("B2").rep;
  const auto ca = character(a), cb = character(b), cs = character(direct_sum(a, b));
  for (std::size_t i = 0; i < cs.size(); ++i) EXPECT_LT(std::abs(cs[i] - ca[i] - cb[i]), 1e-12);
}

TEST(ChangeBasis, PreservesValidityAndCharacters) {
  Rng rng(5);
  for (const auto& e : oracle::catalog())
    for (const auto& r : e.reps) {
      const CoRep c = change_basis(r.rep, rng.unitary(r.rep.dim()));
      EXPECT_TRUE(validate_corep(c).pass);
      const auto x = character(r.rep), y = character(c);
      for (ElementId h : e.group->halving()) EXPECT_LT(std::abs(x[h] - y[h]), 1e-10);
    }
}

TEST(Gauge, GaugedCoRepValidates) {
  Rng rng(6);
  for (const auto& e : oracle::catalog())
    for (const auto& r : e.reps)
      for (int t = 0; t < 3; ++t) {
        const CoRep gr = gauge_corep(r.rep, oracle::random_gauge(*e.group, rng));
        EXPECT_TRUE(validate_corep(gr).pass) << e.name << ":" << r.name;
        EXPECT_TRUE(validate_cocycle(*e.group, gr.omega()).pass);
      }
}

TEST(Restrict, ToHalvingSubgroupIsUnitaryCoRep) {
  for (const auto& e : oracle::catalog()) {
    auto [h, emb] = oracle::halving_subgroup(*e.group);
    for (const auto& r : e.reps) {
      const CoRep res = restrict_corep(r.rep, h, emb);
      EXPECT_FALSE(res.group().has_t0());
      EXPECT_TRUE(validate_corep(res).pass);
    }
  }
}

TEST(Regular, RegularCoRepValidates) {
  for (const auto& e : oracle::catalog())
    for (const auto& [name, w] : e.omega_classes) {
      const CoRep r = regular_corep(e.group, w);
      EXPECT_EQ(r.dim(), e.group->order());
      EXPECT_TRUE(validate_corep(r).pass) << e.name << ":" << name;
    }
}

TEST(DirectSum, RequiresCommonFactorSystem) {
  const CatalogEntry s = catalog_get("z2t_spinless");
  const CatalogEntry k = catalog_get("z2t_kramers");
  EXPECT_THROW(direct_sum(s.rep("A").rep, k.rep("kramers").rep), Error);
}
