#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qca/clones.hpp"
#include "qca/logic.hpp"
#include "qca/structures.hpp"

namespace qca {

struct SemicompleteAnalysis {
  bool is_semicomplete = false;
  bool is_tournament = false;
  std::vector<int> sources, sinks;
  bool is_smooth = false;
  int cycle_census = 0;  // 0, 1 or 2 (meaning "more")
  std::vector<int> smooth_part;  // vertices left after repeatedly removing sinks
};

// Requires exactly one relation, binary.
SemicompleteAnalysis analyze_semicomplete(const Structure& G);
// Number of simple directed cycles (2-cycles included), counting stops at cap.
int count_cycles(const Structure& G, int cap = 2);

Structure add_sink(const Structure& G);

struct OrderPartition {
  std::vector<std::vector<bool>> leq;  // leq[x-1][y-1] iff x^- is a subset of y^-
  std::vector<int> v_min, v_max, v_both, v_none;
  std::string part_of(int v) const;  // "min", "max", "both" or "none"
};

OrderPartition order_partition(const Structure& G);
Structure s_of_g(const Structure& G);

struct NoviSad {
  int p, q, p_prime, q_prime;
};

std::optional<NoviSad> novi_sad(const Structure& G);

struct SemicompleteHubie {
  std::string construction;  // "dual-discriminator-core" or "source-sink"
  OpTable table;
  std::vector<int> hubie_elements;
};

std::optional<SemicompleteHubie> semicomplete_hubie(const Structure& G);

std::string semicomplete_verdict(const Structure& G);  // "PGP" or "EGP"

struct EGPSemiWitness {
  int m = 0;
  NoviSad ns{};
  std::vector<int> smooth_part;
  Tuple tau;
  std::vector<Tuple> relation;  // {p,q}^m minus tau
  PHSentence sentence;          // forall x exists x' : E(x_i,x_i') & R(x')
  Structure expanded;
  Tuple falsifier;
  std::vector<Tuple> checked;
};

// Words obtained from a {p,q}-word by p -> p^- \ q^-, q -> q^- \ p^-.
std::vector<Tuple> semicomplete_predecessors(const Structure& G, int p, int q, const Tuple& word);

EGPSemiWitness semicomplete_egp_witness(const Structure& G, int m,
                                        const std::optional<std::vector<Tuple>>& gamma = std::nullopt);

}  // namespace qca
