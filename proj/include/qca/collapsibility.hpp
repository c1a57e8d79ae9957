#pragma once

#include <functional>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "qca/clones.hpp"
#include "qca/logic.hpp"
#include "qca/structures.hpp"

namespace qca {

// Upsilon(m,p,B): rectangular adversaries with p full coordinates, the rest {x} for x in B.
// For p >= m the family is {A^m}.
AdversarySet upsilon(int n, int m, int p, const std::vector<int>& B);
// Sigma(m,p): one adversary per increasing i in [m-1]^p, tuples constant on each segment.
// For p >= m-1 the family is {A^m}.
AdversarySet sigma(int n, int m, int p);

enum class FamilyKind { Upsilon, Sigma, Full, Custom };
std::string to_string(FamilyKind k);

struct AdversaryFamily {
  FamilyKind kind = FamilyKind::Full;
  int p = 0;
  std::vector<int> B;
  std::function<AdversarySet(int n, int m)> generator;  // Custom only
  std::string width_bound;  // symbolic, e.g. "|B|*C(m,p)*n^p"
  bool effective = true;

  static AdversaryFamily make_upsilon(int p, std::vector<int> B);
  static AdversaryFamily make_sigma(int p);
  static AdversaryFamily make_full();
  static AdversaryFamily make_custom(std::function<AdversarySet(int, int)> gen);

  AdversarySet emit(int n, int m) const;
};

// Two universal positions receive identical constant columns in the product of expansions.
bool is_degenerate(const AdversarySet& omega);

struct ProjectivityResult {
  bool projective = true;
  std::optional<Adversary> failing;  // adversary of Omega_{n*m} with no dominating adversary
};

ProjectivityResult check_projectivity(const AdversaryFamily& family, int n, int m);

// forall w_1..w_m exists (product elements): canonical query of the product of the expansions,
// w_j tied to its column by an equality atom.
PHSentence canonical_pi2(const AdversarySet& omega, const Structure& A, const Budget& budget = {});

// Number of maps [n]x[m] -> A consistent with the adversary.
std::size_t consistent_map_count(const Adversary& O, int n);
std::size_t unbounded_factor_count(const AdversarySet& omega, int n);
// Universals w_i_j (i in [n], j in [m]), one product factor per consistent map.
PHSentence canonical_unbounded(int n, const AdversarySet& omega, const Structure& A,
                               const Budget& budget = {});

// Composite operation: a tree of applications of the base table. A leaf reads argument `leaf`.
struct CompositionTerm {
  int leaf = -1;
  std::vector<CompositionTerm> args;

  static CompositionTerm variable(int i) { return CompositionTerm{i, {}}; }
  int evaluate(const OpTable& f, const std::vector<int>& inputs) const;
  int size() const;
};

struct ReactiveWitness {
  OpTable f;              // base operation
  CompositionTerm term;   // composite of arity `leaves`
  int leaves = 0;
  // g_last[j][i][a-1]: value of g^j_i when the last argument is a (0 = undefined)
  std::vector<std::vector<std::vector<int>>> g_last;
  // Optional full-history maps, used instead of g_last when nonempty.
  std::vector<std::vector<std::map<Tuple, int>>> g_full;
  std::vector<int> leaf_adversary;  // index into Omega for every leaf
};

struct ReactiveCheck {
  bool ok = true;
  std::string reason;
};

ReactiveCheck verify_reactive_composition(const Structure& A, const ReactiveWitness& w,
                                          const Adversary& target, const AdversarySet& omega);

// Shifting construction: a k-ary Hubie operation with source x (and f(x,..,x) = x)
// gives A^m reactively composable from upsilon(n, m, k-1, {x}).
ReactiveWitness chen_witness(const OpTable& hubie, int x, int m);

struct CollapseBudgets {
  int max_arity = 3;
  int max_m = 3;
  Budget budget;
};

struct CollapsibilityVerdict {
  Answer answer = Answer::Unknown;
  std::string method;  // "hubie", "maltsev", "near_unanimity", "generation", "canonical" or ""
  std::optional<OpTable> certificate;
  int m = 0;
  Tuple counterexample;
  std::string note;
};

// x is an element named by a constant of A.
CollapsibilityVerdict decide_collapsible_singleton(const Structure& A, int x, int p,
                                                   const CollapseBudgets& budgets = {});
// Re-checks a verdict: Yes certificates and No counterexamples.
bool verify_collapsibility_verdict(const Structure& A, int x, int p, const CollapsibilityVerdict& v,
                                   const Budget& budget = {});

struct Shop {
  std::vector<std::vector<int>> images;  // images[a-1], sorted
  int source = 0;
  bool is_A_shop = false;
  bool is_simple = false;
};

void recompute_shop_flags(Shop& s);
bool is_she(const Structure& A, const Shop& s);
// Simple A-she, searched source first then singleton images in lex order.
std::optional<Shop> decide_zero_collapsible(const Structure& A, std::optional<int> source = std::nullopt);

// A^{|C|} and the element (c_1,..,c_k) for C sorted.
std::pair<Structure, int> rainbow_lift(const Structure& A, std::vector<int> C);

struct ProbeReport {
  struct Discrepancy {
    std::size_t index = 0;
    bool full = false, restricted = false;
  };
  std::size_t sentences = 0;
  std::size_t agreements = 0;
  std::vector<Discrepancy> discrepancies;
};

ProbeReport probe_collapsibility_logical(const Structure& A, int p, const std::vector<int>& B,
                                         const std::vector<PHSentence>& sample,
                                         const Budget& budget = {});

// Every prenex sentence over the binary/unary relations of sig with at most the given numbers of
// universals, existentials and atoms (at least one atom), without constants or equality.
std::vector<PHSentence> enumerate_sentences(const Signature& sig, int max_universals,
                                            int max_existentials, int max_atoms);
PHSentence random_sentence(std::mt19937_64& rng, const Signature& sig, int max_universals,
                           int max_existentials, int max_atoms, bool with_constants = false,
                           int n = 0);

}  // namespace qca
