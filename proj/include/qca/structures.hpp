#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace qca {

using Tuple = std::vector<int>;

// Base error carrying a machine-readable code ("parse_error", "budget_exceeded", ...).
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& what)
      : std::runtime_error(what), code_(std::move(code)) {}
  const std::string& code() const { return code_; }

 private:
  std::string code_;
};

class ParseError : public Error {
 public:
  ParseError(int line, const std::string& what)
      : Error("parse_error", "line " + std::to_string(line) + ": " + what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

// Raised whenever an exact computation would exceed a configured budget.
// Never to be confused with a negative answer.
class BudgetExceeded : public Error {
 public:
  BudgetExceeded(std::string resource, std::size_t limit, std::size_t requested)
      : Error("budget_exceeded", "budget exceeded: " + resource + " limit " +
                                     std::to_string(limit) + ", requested " +
                                     std::to_string(requested)),
        resource_(std::move(resource)),
        limit_(limit),
        requested_(requested) {}
  const std::string& resource() const { return resource_; }
  std::size_t limit() const { return limit_; }
  std::size_t requested() const { return requested_; }

 private:
  std::string resource_;
  std::size_t limit_;
  std::size_t requested_;
};

struct Budget {
  std::size_t max_elements = 1'000'000;   // elements of a product structure
  std::size_t max_nodes = 10'000'000;     // search nodes per solver call
  std::size_t max_tuples = 100'000'000;   // stored relation entries of a product
};

struct Relation {
  std::string name;
  int arity = 0;
  std::vector<int> data;  // flattened tuples, row-major

  std::size_t size() const { return arity == 0 ? 0 : data.size() / arity; }
  std::span<const int> tuple(std::size_t i) const {
    return {data.data() + i * arity, static_cast<std::size_t>(arity)};
  }
  void add(std::span<const int> t) { data.insert(data.end(), t.begin(), t.end()); }
  // Sorts tuples lexicographically and removes duplicates.
  void normalize();
  // Requires normalized data.
  bool contains(std::span<const int> t) const;
  std::vector<Tuple> tuples() const;
};

struct Signature {
  std::vector<std::pair<std::string, int>> relations;
  std::vector<std::string> constants;
  bool operator==(const Signature&) const = default;
};

struct Structure {
  int n = 0;
  std::vector<Relation> relations;
  std::map<std::string, int> constants;
  // Set for products: sizes of the factors, element e <-> mixed-radix digits of e-1.
  std::vector<int> factor_sizes;

  const Relation* find(const std::string& name) const;
  Relation* find(const std::string& name);
  const Relation& rel(const std::string& name) const;
  Relation& add_relation(const std::string& name, int arity);
  Signature signature() const;

  Tuple element_tuple(int e) const;
  int element_index(std::span<const int> coords) const;
};

// A digraph on 1..n with relation "E".
Structure make_digraph(int n, const std::vector<std::pair<int, int>>& edges);
// Copy of A with constants c1..cn naming every element (missing ones only).
Structure with_all_constants(const Structure& A);
std::string constant_name(int element);

Structure parse_structure(const std::string& text);
std::string serialize_structure(const Structure& A);

Structure power_product(const std::vector<const Structure*>& factors, const Budget& budget = {});
Structure power_product(const std::vector<Structure>& factors, const Budget& budget = {});
Structure power(const Structure& A, int k, const Budget& budget = {});

// Pinned homomorphism search with arc consistency and backtracking.
// Built once for a (source, target) pair and reusable with different pins.
// Source constants are mapped to the target constants of the same name.
class HomSolver {
 public:
  HomSolver(const Structure& source, const Structure& target, const Budget& budget = {});

  using Pins = std::vector<std::pair<int, int>>;  // (source element, target element)
  // Assignment is indexed by source element - 1 and holds target elements.
  std::optional<std::vector<int>> solve(const Pins& pins = {});
  // Calls cb for each solution in search order until cb returns false.
  std::size_t enumerate(const Pins& pins, const std::function<bool(const std::vector<int>&)>& cb);

  // Branch on the lowest undecided variable instead of the smallest domain.
  void set_lex_order(bool lex) { lex_order_ = lex; }
  // Extra pruning hook evaluated after each successful propagation.
  void set_extra_check(std::function<bool(const HomSolver&)> check) { extra_ = std::move(check); }

  int source_size() const { return ns_; }
  int target_size() const { return nt_; }
  bool contains(int var, int value) const;  // var 0-based, value 1-based
  int domain_size(int var) const { return dsize_[var]; }
  std::size_t nodes() const { return nodes_; }

 private:
  struct TargetRel {
    int arity = 0;
    std::vector<uint64_t> succ, pred, loops, unary;  // bitsets for arity <= 2
    const Relation* rel = nullptr;
  };
  struct Constraint {
    int rel = 0;
    int offset = 0;  // into scope_
    int arity = 0;
  };

  uint64_t* dom(int v) { return dom_.data() + static_cast<std::size_t>(v) * W_; }
  const uint64_t* dom(int v) const { return dom_.data() + static_cast<std::size_t>(v) * W_; }
  bool restrict_domain(int v, const uint64_t* mask);
  bool assign(int v, int value);
  bool propagate();
  bool revise(int c);
  void push_level();
  void pop_level();
  void enqueue_var(int v, int except);
  int choose_var();
  bool search(const std::function<bool(const std::vector<int>&)>& cb, bool& stop,
              std::size_t& count);
  bool reset(const Pins& pins);
  void recount();

  int ns_, nt_, W_;
  Budget budget_;
  bool unsat_ = false;
  bool lex_order_ = false;
  std::function<bool(const HomSolver&)> extra_;
  std::vector<TargetRel> trels_;
  std::vector<Constraint> cons_;
  std::vector<int> scope_;
  std::vector<std::vector<int>> watch_;
  std::vector<uint64_t> base_dom_, dom_, closed_dom_;
  bool closed_ = false;
  std::vector<int> dsize_;
  std::vector<int> queue_;
  std::vector<char> in_queue_;
  std::vector<int> trail_var_;
  std::vector<uint64_t> trail_words_;
  std::vector<std::size_t> level_marks_;
  std::vector<int> cursor_marks_;
  int cursor_ = 0;
  std::size_t nodes_ = 0;
};

struct PinnedHomProblem {
  const Structure* source = nullptr;
  const Structure* target = nullptr;
  HomSolver::Pins pins;
};

std::optional<std::vector<int>> find_homomorphism(const PinnedHomProblem& problem,
                                                  const Budget& budget = {});

// Atoms shared by conjunctive queries and sentences. Relation "=" is equality.
struct Term {
  bool is_const = false;
  std::string name;
  bool operator==(const Term&) const = default;
};
struct Atom {
  std::string rel;
  std::vector<Term> args;
  bool operator==(const Atom&) const = default;
};

struct Conjunction {
  std::vector<std::string> vars;
  std::vector<Atom> atoms;
  std::map<std::string, std::string> constant_vars;  // constant symbol -> its variable
};

std::string format_atom(const Atom& a);
std::string format_conjunction(const std::vector<Atom>& atoms);

Conjunction canonical_query(const Structure& A);
// Domain follows phi.vars, then any further variables in order of appearance.
// Constant arguments become elements interpreting that constant.
Structure canonical_database(const Conjunction& phi, const Signature& sig);

// Least r with pointwise walks of length exactly r from s to t (0 iff s == t).
std::optional<int> tuple_distance(const Structure& G, const Tuple& s, const Tuple& t);

}  // namespace qca
