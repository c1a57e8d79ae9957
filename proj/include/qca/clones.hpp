#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "qca/structures.hpp"

namespace qca {

struct OpTable {
  int k = 0;
  int n = 0;
  std::vector<int> vals;  // n^k entries, lexicographic in the arguments

  std::size_t index(std::span<const int> args) const;
  int operator()(std::span<const int> args) const { return vals[index(args)]; }
  int operator()(std::initializer_list<int> args) const {
    return (*this)(std::span<const int>(args.begin(), args.size()));
  }
  Tuple args_of(std::size_t index) const;

  static OpTable from_function(int k, int n, const std::function<int(std::span<const int>)>& f);
  static OpTable projection(int k, int n, int i);  // i is 1-based
  bool operator==(const OpTable&) const = default;
};

// Pointwise application to k tuples of equal length.
Tuple apply_pointwise(const OpTable& f, const std::vector<Tuple>& args);

std::string serialize_op_table(const OpTable& f, const std::string& name = "f");
OpTable parse_op_table(const std::string& text);

bool is_polymorphism(const OpTable& f, const Structure& A);
// Description of the first violated constraint, or nullopt for a polymorphism.
std::optional<std::string> polymorphism_violation(const OpTable& f, const Structure& A);
bool is_idempotent(const OpTable& f);

// Tags in fixed order: projection, essentially_unary, majority, dual_discriminator,
// maltsev, near_unanimity(k), semilattice_with_unit(x), hubie(x).
std::vector<std::string> classify_operation(const OpTable& f);
bool has_tag(const OpTable& f, const std::string& tag);
bool is_hubie(const OpTable& f, int x);

struct EnumerationResult {
  std::vector<OpTable> tables;
  bool truncated = false;
};

// Idempotent polymorphisms of A (constants for every element are added), in
// lexicographic table order. filter is "" or a tag name; identity tags
// (majority, maltsev, near_unanimity, dual_discriminator) are imposed during
// search, other tags are checked on each solution.
EnumerationResult enumerate_polymorphisms(const Structure& A, int k, const std::string& filter,
                                          std::size_t limit, const Budget& budget = {});

std::optional<OpTable> find_hubie_polymorphism(const Structure& A, int x, int k,
                                               const Budget& budget = {});

enum class Answer { Yes, No, Unknown };
std::string to_string(Answer a);

struct MembershipCertificate {
  Tuple target;
  std::vector<Tuple> generators;
  OpTable f;
};

struct MembershipResult {
  Answer answer = Answer::Unknown;
  std::optional<MembershipCertificate> certificate;
  std::string note;
};

// Decides t in Sg(S) under the polymorphisms of A (pass A with constants for
// idempotent semantics). Budget exhaustion yields Unknown.
MembershipResult subpower_membership(const Structure& A, const std::vector<Tuple>& S, const Tuple& t,
                                     const Budget& budget = {});
bool verify_certificate(const Structure& A, const MembershipCertificate& c);

struct GenerationResult {
  Answer answer = Answer::Unknown;
  std::optional<Tuple> counterexample;  // lexicographically least non-member
  std::string note;
};

GenerationResult generates_full_power(const Structure& A, const std::vector<Tuple>& S, int m,
                                      const Budget& budget = {});

struct MinGenResult {
  std::optional<int> size;  // nullopt = Unknown
  std::vector<Tuple> witness;
  std::size_t subsets_checked = 0;
  std::string note;
};

MinGenResult min_generating_size(const Structure& A, int m, int max_size,
                                 std::size_t max_subsets = 200000, const Budget& budget = {});

// All tuples of [n]^m in lexicographic order.
std::vector<Tuple> all_tuples(int n, int m);

}  // namespace qca
