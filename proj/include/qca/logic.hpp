#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qca/structures.hpp"

namespace qca {

enum class Quant { Forall, Exists };

struct PHSentence {
  std::vector<std::pair<Quant, std::string>> prefix;
  std::vector<Atom> atoms;

  int num_universals() const;
  int num_existentials() const;
  bool has_equality() const;
  std::vector<std::string> universals() const;
  std::string to_string() const;
};

// Grammar: ("forall"|"exists") ident ... ":" atom ("&" atom)*
// where atom is Name(t1,...,tk) or t1 = t2, and terms are variables or constants.
PHSentence parse_sentence(const std::string& text, const Signature& sig, bool allow_equality = true);

struct Adversary {
  int m = 0;
  std::vector<Tuple> tuples;  // sorted, unique
  std::optional<std::vector<std::vector<int>>> factors;

  static Adversary from_tuples(int m, std::vector<Tuple> tuples);
  static Adversary rectangular(const std::vector<std::vector<int>>& factors);
  bool contains(const Tuple& t) const;
  std::size_t size() const { return tuples.size(); }
  bool operator==(const Adversary& o) const { return m == o.m && tuples == o.tuples; }
};

struct AdversarySet {
  int m = 0;
  std::vector<Adversary> adversaries;

  std::size_t width() const;
  std::vector<Tuple> union_tuples() const;  // sorted, unique
};

AdversarySet full_adversary(int n, int m);

struct PPResult {
  bool sat = false;
  std::map<std::string, int> witness;  // existential variable -> element
};

PPResult solve_pp(const Structure& A, const PHSentence& phi, const Budget& budget = {});
bool solve_qcsp(const Structure& A, const PHSentence& phi, const Budget& budget = {});
bool models_restricted(const Structure& A, const PHSentence& phi, const AdversarySet& omega,
                       const Budget& budget = {});

// Replaces the assigned universals by constants c<a>; evaluate over with_all_constants(A).
PHSentence instantiate_universals(const PHSentence& phi, const std::map<std::string, int>& rho);

struct CSPReduct {
  struct Merge {
    int adversary = 0;
    std::string var;
    Tuple kept, merged;
    int shared_prefix = 0;
  };
  std::vector<PHSentence> instances;  // one per (adversary, tuple), pp with constants
  std::vector<Merge> merges;
  PHSentence combined;  // conjunction of all instances

  std::string serialize(const Structure& A) const;
};

CSPReduct qcsp_to_csp(const Structure& A, const PHSentence& phi, const AdversarySet& omega);
bool reduct_satisfiable(const Structure& A, const CSPReduct& r, const Budget& budget = {});

}  // namespace qca
