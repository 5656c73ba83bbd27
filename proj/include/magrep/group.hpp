#ifndef MAGREP_GROUP_HPP
#define MAGREP_GROUP_HPP

#include "magrep/error.hpp"
#include "magrep/types.hpp"

#include <algorithm>
#include <array>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace magrep {

using CayleyTable = std::vector<std::vector<ElementId>>;
using ElementSet = std::vector<ElementId>;

/// Finite group G = H + T0 H given extensionally by its Cayley table, with a
/// Z2 grading s(g) marking the anti-unitary elements. Immutable once built.
class MagneticGroup {
 public:
  int order() const { return static_cast<int>(cayley_.size()); }
  ElementId mul(ElementId a, ElementId b) const { return cayley_[a][b]; }
  ElementId inverse(ElementId a) const { return inverse_[a]; }
  ElementId identity() const { return identity_; }
  bool antiunitary(ElementId a) const { return flags_[a] != 0; }
  int element_order(ElementId a) const { return orders_[a]; }

  bool has_t0() const { return t0_.has_value(); }
  ElementId t0() const {
    require(t0_.has_value(), ErrorCode::NoT0, "group has no anti-unitary elements");
    return *t0_;
  }
  /// sigma = t0^2, the identity for type-I groups.
  ElementId sigma() const { return mul(t0(), t0()); }
  bool type_one() const { return has_t0() && sigma() == identity_; }

  /// Unitary elements in ascending id order (the whole group if purely unitary).
  const ElementSet& halving() const { return halving_; }
  int halving_order() const { return static_cast<int>(halving_.size()); }
  const std::vector<ElementSet>& halving_classes() const { return halving_classes_; }
  const std::vector<ElementSet>& subgroup_chain() const { return chain_; }

  const std::string& label(ElementId a) const { return labels_[a]; }
  const std::vector<std::string>& labels() const { return labels_; }
  std::optional<ElementId> find(const std::string& label) const {
    auto it = std::find(labels_.begin(), labels_.end(), label);
    if (it == labels_.end()) return std::nullopt;
    return static_cast<ElementId>(it - labels_.begin());
  }

  const CayleyTable& cayley() const { return cayley_; }
  const std::vector<int>& flags() const { return flags_; }

  /// Conjugacy classes of the subgroup `sub` under conjugation by its own elements.
  std::vector<ElementSet> classes_of(const ElementSet& sub) const {
    std::vector<ElementSet> out;
    std::vector<bool> seen(order(), false);
    for (ElementId x : sub) {
      if (seen[x]) continue;
      std::set<ElementId> cls;
      for (ElementId a : sub) cls.insert(mul(mul(a, x), inverse(a)));
      for (ElementId y : cls) seen[y] = true;
      out.emplace_back(cls.begin(), cls.end());
    }
    return out;
  }

  bool is_closed_subset(const ElementSet& sub) const {
    std::vector<bool> in(order(), false);
    for (ElementId x : sub) in[x] = true;
    if (!in[identity_]) return false;
    for (ElementId a : sub)
      for (ElementId b : sub)
        if (!in[mul(a, b)]) return false;
    return true;
  }

 private:
  friend MagneticGroup build_group(const CayleyTable&, const std::vector<int>&,
                                   std::vector<std::string>, std::vector<ElementSet>);

  CayleyTable cayley_;
  std::vector<int> flags_;
  std::vector<std::string> labels_;
  std::vector<ElementId> inverse_;
  std::vector<int> orders_;
  ElementId identity_ = 0;
  std::optional<ElementId> t0_;
  ElementSet halving_;
  std::vector<ElementSet> halving_classes_;
  std::vector<ElementSet> chain_;
};

/// Validates the table and flags and derives the structure every algorithm needs.
/// t0 is the anti-unitary element of minimal order, ties broken by lowest id.
/// An empty `chain` defaults to {E} followed by H.
inline MagneticGroup build_group(const CayleyTable& cayley, const std::vector<int>& flags,
                                 std::vector<std::string> labels = {},
                                 std::vector<ElementSet> chain = {}) {
  const int n = static_cast<int>(cayley.size());
  require(n >= 1, ErrorCode::NotAGroup, "empty Cayley table");
  require(static_cast<int>(flags.size()) == n, ErrorCode::DimensionMismatch,
          "antiunitary flag count differs from the group order");
  for (const auto& row : cayley) {
    require(static_cast<int>(row.size()) == n, ErrorCode::NotAGroup, "Cayley table is not square");
    for (ElementId x : row) require(x >= 0 && x < n, ErrorCode::NotAGroup, "Cayley entry out of range");
  }
  for (int f : flags) require(f == 0 || f == 1, ErrorCode::FlagInconsistent, "flags must be 0 or 1");

  MagneticGroup g;
  g.cayley_ = cayley;
  g.flags_ = flags;

  std::optional<ElementId> e;
  for (ElementId a = 0; a < n && !e; ++a) {
    bool ok = true;
    for (ElementId b = 0; b < n && ok; ++b) ok = cayley[a][b] == b && cayley[b][a] == b;
    if (ok) e = a;
  }
  require(e.has_value(), ErrorCode::NotAGroup, "no identity element");
  g.identity_ = *e;

  for (ElementId a = 0; a < n; ++a) {
    std::vector<bool> row(n, false), col(n, false);
    for (ElementId b = 0; b < n; ++b) {
      row[cayley[a][b]] = true;
      col[cayley[b][a]] = true;
    }
    require(std::all_of(row.begin(), row.end(), [](bool v) { return v; }) &&
                std::all_of(col.begin(), col.end(), [](bool v) { return v; }),
            ErrorCode::NotAGroup, "row or column of element " + std::to_string(a) + " is not a permutation");
  }
  for (ElementId a = 0; a < n; ++a)
    for (ElementId b = 0; b < n; ++b)
      for (ElementId c = 0; c < n; ++c)
        require(cayley[cayley[a][b]][c] == cayley[a][cayley[b][c]], ErrorCode::NotAGroup,
                "associativity fails for (" + std::to_string(a) + "," + std::to_string(b) + "," +
                    std::to_string(c) + ")");

  g.inverse_.assign(n, 0);
  for (ElementId a = 0; a < n; ++a)
    for (ElementId b = 0; b < n; ++b)
      if (cayley[a][b] == g.identity_) g.inverse_[a] = b;

  for (ElementId a = 0; a < n; ++a)
    for (ElementId b = 0; b < n; ++b)
      require(flags[cayley[a][b]] == (flags[a] ^ flags[b]), ErrorCode::FlagInconsistent,
              "s(ab) != s(a) xor s(b) for (" + std::to_string(a) + "," + std::to_string(b) + ")");

  g.orders_.assign(n, 1);
  for (ElementId a = 0; a < n; ++a) {
    ElementId p = a;
    int k = 1;
    while (p != g.identity_) {
      p = cayley[p][a];
      ++k;
    }
    g.orders_[a] = k;
  }

  for (ElementId a = 0; a < n; ++a)
    if (!flags[a]) g.halving_.push_back(a);
  const bool any_anti = static_cast<int>(g.halving_.size()) != n;
  if (any_anti) {
    require(2 * static_cast<int>(g.halving_.size()) == n, ErrorCode::NoHalvingSubgroup,
            "unitary elements do not form an index-2 subgroup");
    for (ElementId a = 0; a < n; ++a)
      if (flags[a] && (!g.t0_ || g.orders_[a] < g.orders_[*g.t0_])) g.t0_ = a;
  }

  if (labels.empty()) {
    labels.resize(n);
    for (ElementId a = 0; a < n; ++a) labels[a] = a == g.identity_ ? "E" : "g" + std::to_string(a);
  }
  require(static_cast<int>(labels.size()) == n, ErrorCode::DimensionMismatch, "label count differs from order");
  {
    std::set<std::string> uniq(labels.begin(), labels.end());
    require(static_cast<int>(uniq.size()) == n, ErrorCode::InvalidArgument, "element labels must be unique");
  }
  g.labels_ = std::move(labels);

  g.halving_classes_ = g.classes_of(g.halving_);

  if (chain.empty()) chain = {ElementSet{g.identity_}, g.halving_};
  for (auto& sub : chain) {
    std::sort(sub.begin(), sub.end());
    sub.erase(std::unique(sub.begin(), sub.end()), sub.end());
    for (ElementId x : sub) {
      require(x >= 0 && x < n, ErrorCode::InvalidArgument, "subgroup chain element out of range");
      require(!flags[x], ErrorCode::InvalidArgument, "subgroup chain must lie inside H");
    }
    require(g.is_closed_subset(sub), ErrorCode::InvalidArgument, "subgroup chain member is not a subgroup");
  }
  for (std::size_t i = 1; i < chain.size(); ++i)
    require(std::includes(chain[i].begin(), chain[i].end(), chain[i - 1].begin(), chain[i - 1].end()),
            ErrorCode::InvalidArgument, "subgroup chain is not ascending");
  g.chain_ = std::move(chain);
  return g;
}

/// T0^{-1} h T0 for a unitary h.
inline ElementId conjugate_by_t0(const MagneticGroup& g, ElementId h) {
  require(h >= 0 && h < g.order(), ErrorCode::InvalidArgument, "element id out of range");
  require(!g.antiunitary(h), ErrorCode::InvalidArgument, "conjugate_by_t0 expects a unitary element");
  const ElementId t = g.t0();
  return g.mul(g.mul(g.inverse(t), h), t);
}

/// The U(1) 2-cocycle of a projective co-representation.
class FactorSystem {
 public:
  FactorSystem() = default;
  explicit FactorSystem(std::vector<std::vector<cplx>> table) : table_(std::move(table)) {}

  static FactorSystem trivial(int n) { return FactorSystem(std::vector<std::vector<cplx>>(n, std::vector<cplx>(n, 1.0))); }

  int size() const { return static_cast<int>(table_.size()); }
  cplx operator()(ElementId a, ElementId b) const { return table_[a][b]; }
  cplx& at(ElementId a, ElementId b) { return table_[a][b]; }
  const std::vector<std::vector<cplx>>& table() const { return table_; }

 private:
  std::vector<std::vector<cplx>> table_;
};

struct CocycleReport {
  double max_violation = 0.0;
  double max_modulus_error = 0.0;
  std::array<ElementId, 3> worst_triple{0, 0, 0};
  double tol = 0.0;
  bool pass = false;
};

inline void check_factor_dims(const MagneticGroup& g, const FactorSystem& w) {
  require(w.size() == g.order(), ErrorCode::DimensionMismatch, "factor system size differs from group order");
  for (const auto& row : w.table())
    require(static_cast<int>(row.size()) == g.order(), ErrorCode::DimensionMismatch, "factor system is not square");
}

/// Checks |w| = 1 and w^{s(a)}(b,c) w^{-1}(ab,c) w(a,bc) w^{-1}(a,b) = 1 over all n^3 triples.
inline CocycleReport validate_cocycle(const MagneticGroup& g, const FactorSystem& w, double tol = 1e-10) {
  check_factor_dims(g, w);
  CocycleReport rep;
  rep.tol = tol;
  const int n = g.order();
  for (ElementId a = 0; a < n; ++a)
    for (ElementId b = 0; b < n; ++b) rep.max_modulus_error = std::max(rep.max_modulus_error, std::abs(std::abs(w(a, b)) - 1.0));
  for (ElementId a = 0; a < n; ++a)
    for (ElementId b = 0; b < n; ++b)
      for (ElementId c = 0; c < n; ++c) {
        const cplx wbc = g.antiunitary(a) ? std::conj(w(b, c)) : w(b, c);
        const cplx val = wbc / w(g.mul(a, b), c) * w(a, g.mul(b, c)) / w(a, b);
        const double viol = std::abs(val - 1.0);
        if (viol > rep.max_violation) {
          rep.max_violation = viol;
          rep.worst_triple = {a, b, c};
        }
      }
  rep.pass = rep.max_violation <= tol && rep.max_modulus_error <= tol;
  return rep;
}

/// w'(a,b) = w(a,b) Omega(a) Omega^{s(a)}(b) / Omega(ab), the coboundary matching M'(g) = Omega(g) M(g).
inline FactorSystem gauge_transform(const MagneticGroup& g, const FactorSystem& w, const std::vector<cplx>& omega) {
  require(static_cast<int>(omega.size()) == g.order(), ErrorCode::DimensionMismatch, "gauge phase count");
  FactorSystem out = w;
  for (ElementId a = 0; a < g.order(); ++a)
    for (ElementId b = 0; b < g.order(); ++b) {
      const cplx ob = g.antiunitary(a) ? std::conj(omega[b]) : omega[b];
      out.at(a, b) = w(a, b) * omega[a] * ob / omega[g.mul(a, b)];
    }
  return out;
}

/// Subgroup spanned by `elements` (must already be closed) as a standalone group,
/// together with the embedding of its ids into `g`.
struct Subgroup {
  MagneticGroup group;
  std::vector<ElementId> embedding;
};

inline Subgroup extract_subgroup(const MagneticGroup& g, ElementSet elements) {
  std::sort(elements.begin(), elements.end());
  elements.erase(std::unique(elements.begin(), elements.end()), elements.end());
  for (ElementId x : elements) require(x >= 0 && x < g.order(), ErrorCode::InvalidArgument, "element id out of range");
  require(g.is_closed_subset(elements), ErrorCode::NotASubgroupEmbedding, "elements are not closed under multiplication");
  std::vector<int> index(g.order(), -1);
  for (std::size_t i = 0; i < elements.size(); ++i) index[elements[i]] = static_cast<int>(i);
  const int m = static_cast<int>(elements.size());
  CayleyTable table(m, std::vector<ElementId>(m));
  std::vector<int> flags(m);
  std::vector<std::string> labels(m);
  for (int i = 0; i < m; ++i) {
    flags[i] = g.antiunitary(elements[i]) ? 1 : 0;
    labels[i] = g.label(elements[i]);
    for (int j = 0; j < m; ++j) table[i][j] = index[g.mul(elements[i], elements[j])];
  }
  return {build_group(table, flags, labels), elements};
}

/// Checks that `embedding` maps `sub` injectively into `g`, preserving products and flags.
inline void validate_embedding(const MagneticGroup& g, const MagneticGroup& sub, const std::vector<ElementId>& embedding) {
  require(static_cast<int>(embedding.size()) == sub.order(), ErrorCode::NotASubgroupEmbedding, "embedding size");
  std::set<ElementId> image;
  for (ElementId x : embedding) {
    require(x >= 0 && x < g.order(), ErrorCode::NotASubgroupEmbedding, "embedding target out of range");
    image.insert(x);
  }
  require(static_cast<int>(image.size()) == sub.order(), ErrorCode::NotASubgroupEmbedding, "embedding is not injective");
  for (ElementId a = 0; a < sub.order(); ++a) {
    require(sub.antiunitary(a) == g.antiunitary(embedding[a]), ErrorCode::NotASubgroupEmbedding,
            "embedding does not preserve anti-unitarity");
    for (ElementId b = 0; b < sub.order(); ++b)
      require(embedding[sub.mul(a, b)] == g.mul(embedding[a], embedding[b]), ErrorCode::NotASubgroupEmbedding,
              "embedding does not preserve products");
  }
}

}  // namespace magrep

#endif
