#ifndef MAGREP_REDUCE_HPP
#define MAGREP_REDUCE_HPP

#include "magrep/corep.hpp"
#include "magrep/error.hpp"
#include "magrep/linalg.hpp"
#include "magrep/types.hpp"

#include <optional>
#include <string>
#include <vector>

namespace magrep {

/// Irreducibility index from characters: equals 1 iff the co-rep is irreducible.
/// Anti-unitary groups: (1/2|H|) sum_h [ |chi(h)|^2 + w(T0h,T0h) chi((T0h)^2) ].
/// Unitary groups: (1/|H|) sum_h |chi(h)|^2.
inline double irreducibility_index(const CoRep& r, double tol = 1e-9) {
  require_valid(r, tol);
  const MagneticGroup& g = r.group();
  const std::vector<cplx> chi = character(r);
  cplx sum = 0.0;
  for (ElementId h : g.halving()) {
    sum += std::norm(chi[h]);
    if (g.has_t0()) {
      const ElementId u = g.mul(g.t0(), h);
      sum += r.omega()(u, u) * chi[g.mul(u, u)];
    }
  }
  const double norm = g.has_t0() ? 2.0 * g.halving_order() : g.halving_order();
  return sum.real() / norm;
}

/// Same index through Tr[M(T0h) M*(T0h)] instead of the factor system.
inline double irreducibility_index_trace(const CoRep& r, double tol = 1e-9) {
  require_valid(r, tol);
  const MagneticGroup& g = r.group();
  cplx sum = 0.0;
  for (ElementId h : g.halving()) {
    sum += std::norm(r(h).trace());
    if (g.has_t0()) {
      const ElementId u = g.mul(g.t0(), h);
      sum += (r(u) * r(u).conjugate()).trace();
    }
  }
  const double norm = g.has_t0() ? 2.0 * g.halving_order() : g.halving_order();
  return sum.real() / norm;
}

/// (1/|H|) sum_{u in T0 H} Tr[M(u) M*(u)]. For an irreducible co-rep this is 2 - R.
inline double torsion_indicator(const CoRep& r) {
  const MagneticGroup& g = r.group();
  const ElementId t = g.t0();
  cplx sum = 0.0;
  for (ElementId h : g.halving()) {
    const ElementId u = g.mul(t, h);
    sum += (r(u) * r(u).conjugate()).trace();
  }
  return sum.real() / g.halving_order();
}

/// Torsion number R in {1, 2, 4} of an irreducible co-rep (indicator 1, 0, -2).
inline int torsion_number(const CoRep& r, double tol = 1e-8) {
  require(r.group().has_t0(), ErrorCode::NoT0, "torsion needs an anti-unitary group");
  const double index = irreducibility_index(r);
  require(std::abs(index - 1.0) <= tol, ErrorCode::NotIrreducible,
          "co-rep is not irreducible (index " + std::to_string(index) + ")");
  const double s = torsion_indicator(r);
  for (int rr : {1, 2, 4})
    if (std::abs(s - (2.0 - rr)) <= tol) return rr;
  fail(ErrorCode::IndicatorNotQuantized, "torsion indicator " + std::to_string(s) + " is not in {1, 0, -2}");
}

/// Hermitian matrix commuting with M(h) for all unitary h, from a seeded complex Gaussian A.
inline CMat build_H_commutant(const CoRep& r, std::uint64_t seed) {
  const MagneticGroup& g = r.group();
  const int d = r.dim();
  Rng rng(seed);
  const CMat a = rng.complex_gaussian(d, d);
  CMat l0 = CMat::Zero(d, d);
  for (ElementId h : g.halving()) l0 += r(h) * a * r(h).adjoint();
  l0 /= static_cast<double>(g.halving_order());
  return (l0 + l0.adjoint()) + kI * (l0 - l0.adjoint());
}

struct CommutantHamiltonian {
  CMat gamma;
  CMat lambda;
  std::uint64_t seed = 0;
};

/// Gamma = Lambda + M(T0) Lambda* M(T0)^dagger (just Lambda for unitary groups).
inline CommutantHamiltonian commutant_from_lambda(const CoRep& r, const CMat& lambda, std::uint64_t seed = 0) {
  CommutantHamiltonian out{lambda, lambda, seed};
  if (r.group().has_t0()) {
    const CMat& mt = r(r.group().t0());
    out.gamma = lambda + mt * lambda.conjugate() * mt.adjoint();
  }
  return out;
}

inline CommutantHamiltonian build_G_commutant(const CoRep& r, std::uint64_t seed) {
  return commutant_from_lambda(r, build_H_commutant(r, seed), seed);
}

struct CommutantResiduals {
  double hermiticity = 0.0;
  double unitary_part = 0.0;
  double antiunitary_part = 0.0;
  double max() const { return std::max({hermiticity, unitary_part, antiunitary_part}); }
};

inline CommutantResiduals commutant_residuals(const CoRep& r, const CMat& gamma) {
  CommutantResiduals res;
  res.hermiticity = max_abs(CMat(gamma - gamma.adjoint()));
  for (ElementId h : r.group().halving())
    res.unitary_part = std::max(res.unitary_part, max_abs(CMat(r(h) * gamma * r(h).adjoint() - gamma)));
  if (r.group().has_t0()) {
    const CMat& mt = r(r.group().t0());
    res.antiunitary_part = max_abs(CMat(mt * gamma.conjugate() * mt.adjoint() - gamma));
  }
  return res;
}

/// C_i = sum_{a in S} M(h_a) M(h_i) M(h_a)^dagger over the unitary subgroup S.
inline CMat class_operator(const CoRep& r, ElementId class_rep, const ElementSet& subgroup) {
  const MagneticGroup& g = r.group();
  require(std::find(subgroup.begin(), subgroup.end(), class_rep) != subgroup.end(), ErrorCode::ElementNotInSubgroup,
          "class representative is not in the subgroup");
  for (ElementId a : subgroup)
    require(a >= 0 && a < g.order() && !g.antiunitary(a), ErrorCode::ElementNotInSubgroup,
            "class operators are summed over unitary elements only");
  CMat c = CMat::Zero(r.dim(), r.dim());
  for (ElementId a : subgroup) c += r(a) * r(class_rep) * r(a).adjoint();
  return c;
}

/// Hermitian random real combination sum_i x_i (C_i + C_i^dagger) + y_i i (C_i - C_i^dagger)
/// over the classes of `subgroup`.
inline CMat class_operator_combination(const CoRep& r, const ElementSet& subgroup, Rng& rng) {
  CMat out = CMat::Zero(r.dim(), r.dim());
  for (const auto& cls : r.group().classes_of(subgroup)) {
    const CMat c = class_operator(r, cls.front(), subgroup);
    const double x = rng.uniform(0.5, 1.5), y = rng.uniform(0.5, 1.5);
    out += x * (c + c.adjoint()) + y * kI * (c - c.adjoint());
  }
  return out;
}

/// Hermitian class operators adapted to T0: with X_i = C_i + M(T0) C_i* M(T0)^dagger,
/// returns {X_i + X_i^dagger, i (X_i - X_i^dagger)}.
inline std::pair<CMat, CMat> class_operator_pm(const CoRep& r, ElementId class_rep) {
  const MagneticGroup& g = r.group();
  const CMat c = class_operator(r, class_rep, g.halving());
  const CMat& mt = r(g.t0());
  const CMat x = c + mt * c.conjugate() * mt.adjoint();
  return {x + x.adjoint(), kI * (x - x.adjoint())};
}

struct IrrepBlock {
  int offset = 0;
  int dim = 0;
  double energy = 0.0;
  /// Per column: eigenvalues of the H class-operator combination, then of each chain subgroup's.
  std::vector<std::vector<double>> class_labels;
  std::optional<int> torsion;
  double criterion = 0.0;
};

struct IrrepDecomposition {
  CMat basis;
  std::vector<IrrepBlock> blocks;
  double criterion = 0.0;
  bool irreducible = false;
  std::optional<int> torsion;
  double block_residual = 0.0;
  double commutant_residual = 0.0;
  double offdiag_residual = 0.0;
  double tol = 0.0;
  std::vector<std::uint64_t> seeds_used;
  std::vector<std::string> log;
};

struct ReduceOptions {
  std::uint64_t seed = 20240611;
  double tol = 1e-8;
  /// Relative threshold for grouping Gamma eigenvalues into blocks.
  double cluster_tol = 1e-7;
  int max_retries = 5;
};

/// Largest entry of U^dagger M(g) conj^s(U) outside the declared diagonal blocks.
inline double block_offdiag_residual(const CoRep& r, const CMat& u, const std::vector<IrrepBlock>& blocks) {
  double res = 0.0;
  std::vector<int> owner(r.dim(), -1);
  for (std::size_t b = 0; b < blocks.size(); ++b)
    for (int i = 0; i < blocks[b].dim; ++i) owner[blocks[b].offset + i] = static_cast<int>(b);
  for (ElementId g = 0; g < r.group().order(); ++g) {
    const CMat m = u.adjoint() * r(g) * conj_if(u, r.group().antiunitary(g));
    for (int i = 0; i < r.dim(); ++i)
      for (int j = 0; j < r.dim(); ++j)
        if (owner[i] != owner[j]) res = std::max(res, std::abs(m(i, j)));
  }
  return res;
}

inline CoRep block_corep(const CoRep& r, const CMat& u, const IrrepBlock& b) {
  return change_basis(r, CMat(u.middleCols(b.offset, b.dim)));
}

namespace detail {

struct Attempt {
  CMat basis;
  std::vector<IrrepBlock> blocks;
  double commutant_residual = 0.0;
  double offdiag = 0.0;
};

inline Attempt reduce_once(const CoRep& r, std::uint64_t seed, const ReduceOptions& opt) {
  const MagneticGroup& g = r.group();
  const int d = r.dim();
  Rng rng(seed);
  const CommutantHamiltonian ch = build_G_commutant(r, rng.engine()());
  Attempt at;
  at.commutant_residual = commutant_residuals(r, ch.gamma).max();

  std::vector<CMat> family;
  family.push_back(class_operator_combination(r, g.halving(), rng));
  for (const auto& sub : g.subgroup_chain())
    if (sub.size() != g.halving().size()) family.push_back(class_operator_combination(r, sub, rng));
  family.push_back(ch.gamma);
  const std::size_t ng = family.size() - 1;

  const auto sd = simultaneous_diag<cplx>(family, rng.engine()(), 1e-9);
  at.offdiag = sd.offdiag_residual;

  const double gnorm = std::max(1e-300, max_abs(ch.gamma));
  const std::vector<int> elab = cluster_values(sd.values[ng], opt.cluster_tol * gnorm);
  std::vector<int> order(d);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    if (elab[a] != elab[b]) return elab[a] < elab[b];
    for (std::size_t k = 0; k < ng; ++k)
      if (sd.labels[k][a] != sd.labels[k][b]) return sd.labels[k][a] < sd.labels[k][b];
    return false;
  });

  at.basis.resize(d, d);
  for (int j = 0; j < d; ++j) at.basis.col(j) = sd.basis.col(order[j]);

  // Columns sharing every label inside a block span copies of one H-irrep;
  // the compressed Lambda picks a definite basis among them.
  int start = 0;
  auto same_labels = [&](int a, int b) {
    if (elab[order[a]] != elab[order[b]]) return false;
    for (std::size_t k = 0; k < ng; ++k)
      if (sd.labels[k][order[a]] != sd.labels[k][order[b]]) return false;
    return true;
  };
  for (int i = 1; i <= d; ++i) {
    if (i == d || !same_labels(i, start)) {
      const int n = i - start;
      if (n > 1) {
        const CMat q = at.basis.middleCols(start, n);
        const CMat c = q.adjoint() * ch.lambda * q;
        Eigen::SelfAdjointEigenSolver<CMat> es((c + c.adjoint()) / 2.0);
        at.basis.middleCols(start, n) = q * es.eigenvectors();
      }
      start = i;
    }
  }

  start = 0;
  for (int i = 1; i <= d; ++i) {
    if (i == d || elab[order[i]] != elab[order[start]]) {
      IrrepBlock b;
      b.offset = start;
      b.dim = i - start;
      b.energy = sd.values[ng](order[start]);
      for (int j = start; j < i; ++j) {
        std::vector<double> lab;
        for (std::size_t k = 0; k < ng; ++k) lab.push_back(sd.values[k](order[j]));
        b.class_labels.push_back(lab);
      }
      at.blocks.push_back(b);
      start = i;
    }
  }
  return at;
}

}  // namespace detail

/// Splits a co-rep into irreducible blocks by simultaneously diagonalizing class
/// operators and a random commutant Gamma. Blocks are the Gamma eigenspaces; each
/// is re-checked against the criterion, and the whole attempt is redone with a
/// fresh seed if any check fails.
inline IrrepDecomposition reduce_corep(const CoRep& r, const ReduceOptions& opt = {}) {
  const CoRepReport vr = validate_corep(r);
  require(vr.pass, ErrorCode::InvalidCoRep, "co-rep fails validation");
  const MagneticGroup& g = r.group();
  IrrepDecomposition out;
  out.tol = opt.tol;
  out.criterion = irreducibility_index(r);
  out.irreducible = std::abs(out.criterion - 1.0) <= opt.tol;
  if (out.irreducible && g.has_t0()) out.torsion = torsion_number(r, opt.tol);

  if (out.irreducible) {
    const CommutantHamiltonian ch = build_G_commutant(r, opt.seed);
    out.seeds_used.push_back(opt.seed);
    out.basis = CMat::Identity(r.dim(), r.dim());
    IrrepBlock b;
    b.dim = r.dim();
    b.energy = ch.gamma.trace().real() / r.dim();
    b.torsion = out.torsion;
    b.criterion = out.criterion;
    out.blocks.push_back(b);
    out.commutant_residual = commutant_residuals(r, ch.gamma).max();
    out.log.push_back("already irreducible");
    return out;
  }

  for (int attempt = 0; attempt < opt.max_retries; ++attempt) {
    const std::uint64_t seed = opt.seed + static_cast<std::uint64_t>(attempt);
    out.seeds_used.push_back(seed);
    detail::Attempt at = detail::reduce_once(r, seed, opt);
    const double res = block_offdiag_residual(r, at.basis, at.blocks);
    bool ok = res <= opt.tol;
    std::string why = ok ? "" : "block residual " + std::to_string(res);
    for (auto& b : at.blocks) {
      if (!ok) break;
      const CoRep sub = block_corep(r, at.basis, b);
      b.criterion = irreducibility_index(sub, 1e-7);
      if (std::abs(b.criterion - 1.0) > opt.tol) {
        ok = false;
        why = "block at " + std::to_string(b.offset) + " has index " + std::to_string(b.criterion);
        break;
      }
      if (g.has_t0()) b.torsion = torsion_number(sub, opt.tol);
    }
    if (ok) {
      out.basis = at.basis;
      out.blocks = at.blocks;
      out.block_residual = res;
      out.commutant_residual = at.commutant_residual;
      out.offdiag_residual = at.offdiag;
      out.log.push_back("seed " + std::to_string(seed) + ": " + std::to_string(at.blocks.size()) + " blocks");
      return out;
    }
    out.log.push_back("seed " + std::to_string(seed) + " rejected: " + why);
  }
  fail(ErrorCode::ReductionFailed, "no valid reduction after " + std::to_string(opt.max_retries) + " seeds");
}

}  // namespace magrep

#endif
