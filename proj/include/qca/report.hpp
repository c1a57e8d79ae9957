#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "qca/clones.hpp"
#include "qca/structures.hpp"

namespace qca {

using nlohmann::json;

// Structure reference: {"file": path} | {"beta": word} | {"inline": text}, optional "constants": bool.
Structure resolve_structure(const json& ref);
// Parses a command-line structure argument ("beta:1001" or a file path) into a reference.
json structure_ref(const std::string& arg, bool constants);

json op_to_json(const OpTable& f);
OpTable op_from_json(const json& j);
json tuples_to_json(const std::vector<Tuple>& ts);
std::vector<Tuple> tuples_from_json(const json& j);

struct ReportCheck {
  bool valid = true;
  std::size_t checked = 0;
  std::vector<std::string> failures;
};

// Re-verifies every entry of report["certificates"]. Kinds: polymorphism, hubie, membership,
// non_membership, shop, egp_witness. Throws Error("schema_mismatch") on malformed input.
ReportCheck verify_report(const json& report, const Budget& budget = {});

}  // namespace qca
