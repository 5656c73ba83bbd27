#include "oracles.hpp"

#include <gtest/gtest.h>

#include <numeric>

using namespace magrep;

namespace {

const CatalogEntry& entry(const std::string& name) {
  for (const auto& e : oracle::catalog())
    if (e.name == name) return e;
  throw std::runtime_error("missing catalog entry " + name);
}

CMat pauli(int k) {
  CMat m(2, 2);
  if (k == 1) m << 0, 1, 1, 0;
  if (k == 2) m << 0, -kI, kI, 0;
  if (k == 3) m << 1, 0, 0, -1;
  return m;
}

// span distance between complex 2x2 matrices seen as real 8-vectors
double complex_span_distance(const std::vector<CMat>& a, const std::vector<CMat>& b) {
  auto pack = [](const std::vector<CMat>& s) {
    RMat out(8, static_cast<Eigen::Index>(s.size()));
    for (std::size_t c = 0; c < s.size(); ++c)
      for (int i = 0; i < 4; ++i) {
        out(2 * i, static_cast<Eigen::Index>(c)) = s[c](i / 2, i % 2).real();
        out(2 * i + 1, static_cast<Eigen::Index>(c)) = s[c](i / 2, i % 2).imag();
      }
    return out;
  };
  return oracle::projector_distance(pack(a), pack(b));
}

// C3 acting on the hexagonal lattice basis a1, a2 (non-orthogonal), odd under T
ProbeRepAction hexagonal_lattice_action(const CatalogEntry& c3t) {
  const MagneticGroup& g = *c3t.group;
  ElementId c3 = g.identity();
  for (ElementId h : g.halving())
    if (g.element_order(h) == 3) c3 = h;
  RMat a(2, 2);
  a << 0, -1, 1, -1;
  std::map<ElementId, RMat> unitary{{g.identity(), RMat::Identity(2, 2)}, {c3, a}, {g.mul(c3, c3), RMat(a * a)}};
  return ProbeRepAction::from_halving(c3t.group, unitary, RMat(-RMat::Identity(2, 2)), ProbeKind::Momentum);
}

Eigen::Index mono_index(const std::vector<std::vector<int>>& monos, const std::vector<int>& e) {
  for (std::size_t j = 0; j < monos.size(); ++j)
    if (monos[j] == e) return static_cast<Eigen::Index>(j);
  return -1;
}

}  // namespace

TEST(DualRep, OrthogonalActionIsSelfDual) {
  const auto& e = entry("c4v_grey");
  const ProbeRepAction& mom = e.action("momentum");
  const ProbeRepAction dual = dual_rep(mom);
  for (ElementId g = 0; g < e.group->order(); ++g) EXPECT_LT(max_abs(RMat(dual(g) - mom(g))), 1e-12);
}

TEST(DualRep, IdentityAction) {
  auto g = std::make_shared<const MagneticGroup>(build_group({{0}}, {0}));
  const ProbeRepAction a(g, {RMat::Identity(3, 3)});
  EXPECT_LT(max_abs(RMat(dual_rep(a)(0) - RMat::Identity(3, 3))), 1e-15);
}

TEST(DualRep, HexagonalLatticeBasis) {
  const auto& e = entry("c3t");
  const ProbeRepAction a = hexagonal_lattice_action(e);
  const ProbeRepAction dual = dual_rep(a);
  bool some_non_orthogonal = false;
  for (ElementId g = 0; g < e.group->order(); ++g) {
    EXPECT_LT(max_abs(RMat(dual(g).transpose() * a(g) - RMat::Identity(2, 2))), 1e-12);
    some_non_orthogonal |= max_abs(RMat(a(g).transpose() * a(g) - RMat::Identity(2, 2))) > 0.1;
  }
  EXPECT_TRUE(some_non_orthogonal);
}

TEST(DualRep, NonOrthogonalActionCouplingsAgreeWithOracle) {
  const auto& e = entry("c3t");
  const ProbeRepAction a = hexagonal_lattice_action(e);
  for (const auto& r : e.reps) {
    const int mult = linear_multiplicity(r.rep, a);
    const oracle::NullSpace ns = oracle::constraint_null_space(r.rep, a.matrices(), oracle::linear_basis(2));
    EXPECT_EQ(mult, ns.dimension) << r.name;
    if (mult == 0) continue;
    const KpModel m = build_gamma_matrices(r.rep, a);
    EXPECT_LT(oracle::projector_distance(oracle::gammas_as_params(m.gammas, 2, r.rep.dim()), ns.basis), 1e-8) << r.name;
    Rng rng(5);
    EXPECT_LT(oracle::round_trip(r.rep, a.matrices(), m.gammas, oracle::linear_basis(2), rng, 30), 1e-9) << r.name;
  }
}

TEST(DualRep, SingularActionRejected) {
  auto g = std::make_shared<const MagneticGroup>(build_group({{0}}, {0}));
  const ProbeRepAction zero(g, {RMat::Zero(2, 2)});
  try {
    dual_rep(zero);
    FAIL();
  } catch (const Error& err) {
    EXPECT_EQ(err.code(), ErrorCode::SingularAction);
  }
}

TEST(Multiplicity, KramersExamples) {
  const auto& e = entry("z2t_kramers");
  const CoRep& k = e.rep("kramers").rep;
  EXPECT_EQ(linear_multiplicity(k, e.action("momentum")), 9);
  EXPECT_EQ(linear_multiplicity(k, e.action("electric")), 3);
  EXPECT_EQ(linear_multiplicity(k, e.action("magnetic_scalar")), 3);
  EXPECT_EQ(linear_multiplicity(k, e.action("electric_scalar")), 1);
  const auto& s = entry("z2t_spinless");
  EXPECT_EQ(linear_multiplicity(s.rep("A").rep, s.action("momentum")), 0);
  EXPECT_EQ(linear_multiplicity(s.rep("A").rep, s.action("electric")), 3);
}

TEST(Multiplicity, SpecialFormAgreesWhereApplicable) {
  int checked = 0;
  for (const auto& e : oracle::catalog())
    for (const auto& [name, a] : e.probe_actions) {
      const RMat& dt = a(e.group->t0());
      const RMat id = RMat::Identity(a.dim(), a.dim());
      if (max_abs(RMat(dt - id)) > 1e-12 && max_abs(RMat(dt + id)) > 1e-12) {
        EXPECT_THROW(linear_multiplicity_special(e.reps.front().rep, a), Error);
        continue;
      }
      for (const auto& r : e.reps) {
        EXPECT_LT(std::abs(linear_multiplicity_special(r.rep, a) - linear_multiplicity_value(r.rep, a)), 1e-10)
            << e.name << ":" << r.name << ":" << name;
        ++checked;
      }
    }
  EXPECT_GT(checked, 20);
}

TEST(Multiplicity, IsGaugeAndBasisInvariant) {
  Rng rng(3);
  for (const auto& e : oracle::catalog())
    for (const auto& r : e.reps) {
      const CoRep moved = change_basis(gauge_corep(r.rep, oracle::random_gauge(*e.group, rng)), rng.unitary(r.rep.dim()));
      for (const auto& [name, a] : e.probe_actions)
        EXPECT_EQ(linear_multiplicity(moved, a), linear_multiplicity(r.rep, a)) << e.name << ":" << r.name << ":" << name;
    }
}

TEST(BuildW, LinearOnHalvingAndProjectorIdempotent) {
  for (const std::string name : {"z4t", "c3t", "c4_mxT", "q8t"}) {
    const auto& e = entry(name);
    const MagneticGroup& g = *e.group;
    const ProbeRepAction& a = e.action("momentum");
    for (const auto& r : e.reps) {
      for (ElementId x : g.halving())
        for (ElementId y : g.halving())
          EXPECT_LT(max_abs(CMat(build_W(r.rep, a, x) * build_W(r.rep, a, y) - build_W(r.rep, a, g.mul(x, y)))), 1e-10)
              << name << ":" << r.name;
      const CMat p = identity_projector(r.rep, a);
      EXPECT_LT(max_abs(CMat(p * p - p)), 1e-10) << name << ":" << r.name;
    }
  }
}

TEST(GammaMatrices, WeylPoint) {
  const auto& e = entry("z2t_kramers");
  const KpModel m = build_gamma_matrices(e.rep("kramers").rep, e.action("momentum"));
  ASSERT_EQ(m.multiplicity, 9);
  ASSERT_EQ(m.gammas.size(), 9u);
  for (int comp = 0; comp < 3; ++comp) {
    std::vector<CMat> slice;
    for (const auto& set : m.gammas) slice.push_back(set[comp]);
    EXPECT_LT(complex_span_distance(slice, {pauli(1), pauli(2), pauli(3)}), 1e-10) << comp;
  }
  EXPECT_LT(m.covariance_residual, 1e-12);
}

TEST(GammaMatrices, KramersElectricCouplesOnlyThroughIdentity) {
  const auto& e = entry("z2t_kramers");
  const KpModel m = build_gamma_matrices(e.rep("kramers").rep, e.action("electric"));
  ASSERT_EQ(m.multiplicity, 3);
  for (const auto& set : m.gammas)
    for (const CMat& c : set) EXPECT_LT(max_abs(CMat(c - c(0, 0) * CMat::Identity(2, 2))), 1e-12);
}

TEST(GammaMatrices, SpinlessTrimHasNoLinearTerm) {
  const auto& e = entry("z2t_spinless");
  try {
    build_gamma_matrices(e.rep("A").rep, e.action("momentum"));
    FAIL();
  } catch (const Error& err) {
    EXPECT_EQ(err.code(), ErrorCode::EmptyChannel);
  }
}

TEST(GammaMatrices, MatchBruteForceOnCatalog) {
  Rng rng(17);
  for (const auto& e : oracle::catalog())
    for (const auto& r : e.reps)
      for (const std::string act : {"momentum", "electric", "magnetic"}) {
        const ProbeRepAction& a = e.action(act);
        const int d = r.rep.dim();
        if (a.dim() * d * d > 80) continue;
        const oracle::NullSpace ns = oracle::constraint_null_space(r.rep, a.matrices(), oracle::linear_basis(a.dim()));
        const int mult = linear_multiplicity(r.rep, a);
        EXPECT_EQ(mult, ns.dimension) << e.name << ":" << r.name << ":" << act;
        if (mult == 0) continue;
        const KpModel m = build_gamma_matrices(r.rep, a);
        EXPECT_EQ(m.multiplicity, mult);
        EXPECT_LT(oracle::projector_distance(oracle::gammas_as_params(m.gammas, a.dim(), d), ns.basis), 1e-8)
            << e.name << ":" << r.name << ":" << act;
        EXPECT_LT(oracle::round_trip(r.rep, a.matrices(), m.gammas, oracle::linear_basis(a.dim()), rng, 20), 1e-9);
      }
}

TEST(GammaMatrices, AgreeWithConstraintSolver) {
  const auto& e = entry("c4v_grey");
  const ProbeRepAction& a = e.action("momentum");
  for (const auto& r : e.reps) {
    const ConstraintSolution sol = solve_constraints(r.rep, a);
    EXPECT_EQ(sol.dimension, linear_multiplicity(r.rep, a)) << r.name;
    if (sol.dimension == 0) continue;
    EXPECT_LT(gamma_span_distance(sol.gammas, build_gamma_matrices(r.rep, a).gammas), 1e-8) << r.name;
  }
}

TEST(PolynomialChannel, OrderOneIsTheInputAction) {
  const auto& e = entry("c6v_grey");
  const ProbeRepAction& mom = e.action("momentum");
  const PolynomialChannel ch = polynomial_channel(mom, 1);
  ASSERT_EQ(ch.action.dim(), 3);
  for (ElementId g = 0; g < e.group->order(); ++g) EXPECT_LT(max_abs(RMat(ch.action(g) - mom(g))), 1e-12);
  EXPECT_EQ(ch.polynomials, (std::vector<std::string>{"kx", "ky", "kz"}));
}

TEST(PolynomialChannel, OrderTwoDimension) {
  const auto& e = entry("c6v_grey");
  EXPECT_EQ(polynomial_channel(e.action("momentum"), 2).action.dim(), 6);
  EXPECT_EQ(polynomial_channel(e.action("momentum"), 3).action.dim(), 10);
  EXPECT_THROW(polynomial_channel(e.action("momentum"), 0), Error);
}

TEST(PolynomialChannel, SubstitutionHoldsAtRandomMomenta) {
  Rng rng(23);
  for (const std::string name : {"c6v_grey", "c4_mxT", "c3t"}) {
    const auto& e = entry(name);
    const ProbeRepAction& mom = e.action("momentum");
    const ProbeRepAction dual = dual_rep(mom);
    std::vector<PolynomialChannel> chans = decompose_channels(mom, 2, 4);
    chans.push_back(polynomial_channel(mom, 2));
    for (const auto& ch : chans) {
      const oracle::PolyBasis pb = oracle::channel_basis(ch);
      const ProbeRepAction ad = dual_rep(ch.action);
      for (ElementId g = 0; g < e.group->order(); ++g) {
        EXPECT_LT(max_abs(RMat(ad(g) - ch.substitution[g])), 1e-9);
        for (int t = 0; t < 100; ++t) {
          const RVec k = rng.real_gaussian(3, 1);
          EXPECT_LT((pb.eval(RVec(dual(g) * k)) - ch.substitution[g] * pb.eval(k)).cwiseAbs().maxCoeff(), 1e-9);
        }
      }
    }
  }
}

TEST(PolynomialChannel, HexagonalQuadraticDoublet) {
  const auto& e = entry("c6v_grey");
  const std::vector<PolynomialChannel> chans = decompose_channels(e.action("momentum"), 2, 8);
  int total = 0;
  for (const auto& ch : chans) total += ch.action.dim();
  EXPECT_EQ(total, 6);
  const auto& monos = chans.front().monomials;
  RMat target = RMat::Zero(6, 2);
  target(mono_index(monos, {2, 0, 0}), 0) = 1.0;
  target(mono_index(monos, {0, 2, 0}), 0) = -1.0;
  target(mono_index(monos, {1, 1, 0}), 1) = 1.0;
  int found = 0;
  for (const auto& ch : chans)
    if (ch.action.dim() == 2 && oracle::projector_distance(ch.coefficients, target) < 1e-8) ++found;
  EXPECT_EQ(found, 1);
}

TEST(Dispersion, WeylIsLinear) {
  const auto& e = entry("z2t_kramers");
  const DispersionReport d = dispersion_order(e.rep("kramers").rep, e.action("momentum"), 2, 1);
  ASSERT_TRUE(d.leading_order.has_value());
  EXPECT_EQ(*d.leading_order, 1);
  ASSERT_FALSE(d.channels.empty());
  EXPECT_EQ(d.channels.front().name, "vector");
  EXPECT_EQ(d.channels.front().multiplicity, 9);
  ASSERT_TRUE(d.channels.front().model.has_value());
}

TEST(Dispersion, SpinlessTrimStartsAtSecondOrder) {
  const auto& e = entry("z2t_spinless");
  const DispersionReport d = dispersion_order(e.rep("A").rep, e.action("momentum"), 2, 1);
  for (const auto& c : d.channels)
    if (c.order == 1) {
      EXPECT_EQ(c.multiplicity, 0) << c.name;
    }
  ASSERT_TRUE(d.leading_order.has_value());
  EXPECT_EQ(*d.leading_order, 2);
  int second = 0;
  for (const auto& c : d.channels)
    if (c.order == 2) {
      second += c.multiplicity;
      if (c.multiplicity > 0) {
        EXPECT_TRUE(c.model.has_value());
      }
    }
  EXPECT_GT(second, 0);
}

TEST(Dispersion, TrivialGroupCountsEveryMatrix) {
  auto g = std::make_shared<const MagneticGroup>(build_group({{0}}, {0}));
  const CoRep r(g, {CMat::Identity(2, 2)});
  const ProbeRepAction vec(g, {RMat::Identity(2, 2)}, ProbeKind::Momentum);
  const DispersionReport d = dispersion_order(r, vec, 2, 3);
  for (const auto& c : d.channels) EXPECT_EQ(c.multiplicity, 4 * c.dim) << c.name;
  EXPECT_THROW(dispersion_order(r, vec, 0, 3), Error);
}

TEST(Probe, KramersDoublet) {
  const auto& e = entry("z2t_kramers");
  const CoRep& k = e.rep("kramers").rep;
  const std::vector<std::pair<std::string, ProbeRepAction>> probes = {
      {"magnetic_scalar", e.action("magnetic_scalar")}, {"electric_scalar", e.action("electric_scalar")}};

  std::vector<ElementId> all(static_cast<std::size_t>(e.group->order()));
  std::iota(all.begin(), all.end(), 0);
  const ProbeReport whole = probe_stability(k, e.group, all, probes);
  EXPECT_TRUE(whole.protected_degeneracy);
  EXPECT_NEAR(whole.index, 1.0, 1e-12);

  const Subgroup s = restrict_to_subgroup(*e.group, {e.group->identity()});
  const ProbeReport broken = probe_stability(k, std::make_shared<const MagneticGroup>(s.group), s.embedding, probes);
  EXPECT_FALSE(broken.protected_degeneracy);
  EXPECT_NEAR(broken.index, 4.0, 1e-12);
  ASSERT_EQ(broken.channels.size(), 2u);
  EXPECT_EQ(broken.channels[0].multiplicity, 3);
  EXPECT_EQ(broken.channels[0].trivial_count, 0);
  EXPECT_EQ(broken.channels[0].splitting_multiplicity, 3);
  EXPECT_EQ(broken.channels[1].multiplicity, 1);
  EXPECT_EQ(broken.channels[1].trivial_count, 1);
  EXPECT_EQ(broken.channels[1].splitting_multiplicity, 0);
  ASSERT_TRUE(broken.channels[0].couplings.has_value());
  EXPECT_LT(complex_span_distance(
                [&] {
                  std::vector<CMat> v;
                  for (const auto& set : broken.channels[0].couplings->gammas) v.push_back(set[0]);
                  return v;
                }(),
                {pauli(1), pauli(2), pauli(3)}),
            1e-10);
}

TEST(Probe, BadEmbeddingRejected) {
  const auto& e = entry("c4v_grey");
  const Subgroup s = extract_subgroup(*e.group, e.group->halving());
  std::vector<ElementId> bad = s.embedding;
  std::swap(bad[1], bad[2]);
  try {
    probe_stability(e.rep("E1").rep, std::make_shared<const MagneticGroup>(s.group), bad, {});
    FAIL();
  } catch (const Error& err) {
    EXPECT_EQ(err.code(), ErrorCode::NotASubgroupEmbedding);
  }
}
