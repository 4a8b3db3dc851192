#pragma once

#include <functional>
#include <vector>

#include "auction/model.hpp"

namespace auction {

// sigma = (bidder permutation, item permutation); cell (i,j) maps to
// (bidder[i], item[j]).
struct Permutation {
  std::vector<int> bidder;
  std::vector<int> item;

  bool operator==(const Permutation&) const = default;
};

Permutation identity_perm(int m, int n);
Permutation inverse(const Permutation& p);
// compose(a, b) acts as a after b: (a*b)(x) = a(b(x)).
Permutation compose(const Permutation& a, const Permutation& b);

// w with w[sigma.bidder[i]][sigma.item[j]] = v[i][j].
TypeProfile permute(const Permutation& sigma, const TypeProfile& v);
ValueVector apply_items(const std::vector<int>& item_perm, const ValueVector& v);

struct NotASubgroup : ModelError {
  using ModelError::ModelError;
};

enum class GroupKind { Trivial, AllBidders, AllItems, Product, Custom };

std::string group_kind_str(GroupKind k);
GroupKind group_kind_parse(const std::string& s);

class SymmetryGroup {
 public:
  static SymmetryGroup trivial(int m, int n);
  static SymmetryGroup all_bidders(int m, int n);
  static SymmetryGroup all_items(int m, int n);
  static SymmetryGroup product(int m, int n);  // full S_m x S_n
  // Verifies identity membership and closure under composition and inverse.
  static SymmetryGroup custom(int m, int n, std::vector<Permutation> elements);

  GroupKind kind() const { return kind_; }
  int bidders() const { return m_; }
  int items() const { return n_; }

  unsigned long size() const;
  // Explicit element list; throws ExplosionGuard beyond cap.
  std::vector<Permutation> elements(unsigned long cap = 100000) const;

  // Lexicographically greatest profile in the orbit (row-major flattening).
  // For bidder permutations this sorts rows descending, for item permutations
  // it sorts columns descending, so representative types come out sorted
  // v_{i1} >= ... >= v_{in}.
  TypeProfile canonical(const TypeProfile& v) const;

  // All group elements sigma with sigma(rep) = target (a stabilizer coset).
  std::vector<Permutation> maps_onto(const TypeProfile& rep, const TypeProfile& target) const;
  std::vector<Permutation> stabilizer(const TypeProfile& rep) const;

 private:
  SymmetryGroup(GroupKind k, int m, int n) : kind_(k), m_(m), n_(n) {}
  GroupKind kind_;
  int m_, n_;
  std::vector<Permutation> custom_;
};

struct RepClass {
  TypeProfile rep;       // canonical representative
  Rat class_weight;      // Pr[orbit]
  Rat rep_prob;          // Pr[the representative profile itself]
  unsigned long orbit_size = 1;
  unsigned long stab_size = 1;
};

struct RepresentativeSet {
  std::vector<RepClass> classes;
  GroupKind kind = GroupKind::Trivial;

  int index_of(const TypeProfile& rep) const;  // -1 if absent
};

// Canonical representative per equivalence class of the support with exact
// orbit masses.  AllBidders enumerates bidder-type multisets combinatorially;
// other groups canonicalize the (guarded) expanded support.
RepresentativeSet enumerate_representatives(const DiscreteDistribution& dist,
                                            const SymmetryGroup& group,
                                            std::size_t support_cap = 65536);

struct TypeClass {
  ValueVector rep;   // sorted descending
  Rat class_weight;  // Pr[orbit] within the bidder's factor
  Rat rep_prob;      // Pr[sorted vector itself]
};

// Per-bidder representative types under item permutations (the sets E_i).
std::vector<TypeClass> bidder_type_reps(const DiscreteDistribution& dist, int bidder);

bool has_symmetry(const DiscreteDistribution& dist, const Permutation& sigma,
                  std::size_t support_cap = 65536);
bool has_group_symmetry(const DiscreteDistribution& dist, const SymmetryGroup& group,
                        std::size_t support_cap = 65536);

// Histogram estimator over equivalence classes induced by delta-rounding and
// the group; probabilities are exact sample fractions summing to 1.
DiscreteDistribution estimate_from_samples(const std::function<TypeProfile(RandomStream&)>& oracle,
                                           int bidders, int items, const Rat& delta,
                                           const SymmetryGroup& group, double zeta,
                                           RandomStream& rng,
                                           std::size_t max_samples = 2000000);

}  // namespace auction
