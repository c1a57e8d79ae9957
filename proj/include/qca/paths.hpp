#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qca/clones.hpp"
#include "qca/logic.hpp"
#include "qca/structures.hpp"

namespace qca {

// Undirected path on |beta| vertices, loop at i iff beta[i-1] == '1'.
Structure path_structure(const std::string& beta);

enum class PathKind { LoopConnected, QuasiLoopConnected, NotQLC };
std::string to_string(PathKind k);

struct PathClass {
  PathKind kind = PathKind::NotQLC;
  // Matched decomposition (empty form if none matched). A loop-connected path
  // may still carry a form; constructions need one.
  std::string form;  // "i", "ii" or ""
  int a = 0, b = 0;
  std::string alpha;
  bool reversed = false;
  std::string normalized;  // beta or its reversal, whichever matched

  bool is_qlc() const { return kind != PathKind::NotQLC; }
};

PathClass classify_path(const std::string& beta);

struct PathVerdict {
  std::string gap;         // "PGP" or "EGP"
  std::string complexity;  // "NL", "NP-complete" or "Pspace-complete"
};

PathVerdict path_verdict(const std::string& beta, bool constants_present);

// Majority on the integers: median if all share a parity, else the max (or min)
// of the arguments with the repeated parity.
int feder_value(int x, int y, int z, bool use_max = true);
// Clamped variant, a majority polymorphism for every loop-connected path.
OpTable feder_majority(const std::string& beta);
// Case split exactly as displayed: Feder inside L or inside R, median otherwise.
OpTable feder_majority_literal(const std::string& beta);

struct BinaryFy {
  std::string beta;  // normalized orientation the table refers to
  OpTable table;
  std::pair<int, int> anchor;  // f(anchor) = y
};

BinaryFy binary_fy(const std::string& beta, int y);

// Listed generators of A^m, in the orientation of beta.
std::vector<Tuple> generating_tuples(const std::string& beta, int m);

// Steps (y, position) rebuilding t from (1,...,1); positions are 1-based.
// Refers to the normalized orientation; beta must be of form (i).
std::vector<std::pair<int, int>> tuple_certificate(const std::string& beta, int m, const Tuple& t);
Tuple replay_certificate(const std::string& beta, int m, const std::vector<std::pair<int, int>>& steps);

struct EGPPathWitness {
  int n = 0, m = 0;
  int p = 0, q = 0;
  int mu = 0, mu_formula = 0;
  bool used_fallback = false;
  std::vector<int> P, Q;
  Tuple tau;
  std::vector<Tuple> relation;  // R = {p,q}^m minus tau
  PHSentence sentence;          // forall x1..xm phi(x1..xm) over E, R and constants
  Structure expanded;           // path with constants and R
  Tuple falsifier;              // tau with p -> 1, q -> n
  std::vector<Tuple> checked;   // tuples on which phi was verified
};

std::vector<Tuple> path_cousins(const std::string& beta, int mu, const Tuple& word);

EGPPathWitness path_egp_witness(const std::string& beta, int m,
                                const std::optional<std::vector<Tuple>>& gamma = std::nullopt);

}  // namespace qca
