#include "qca/report.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "qca/collapsibility.hpp"
#include "qca/logic.hpp"
#include "qca/paths.hpp"

namespace qca {

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("input_error", "cannot read input file " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

const json& field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw Error("schema_mismatch", std::string("missing field '") + key + "'");
  return j.at(key);
}

std::string tuple_str(const Tuple& t) { return json(t).dump(); }

// Truth of the sentence with its universals set to t, evaluated over A with every element named.
bool holds_at(const Structure& named, const PHSentence& phi, const Tuple& t, const Budget& budget) {
  auto us = phi.universals();
  if (us.size() != t.size()) throw Error("schema_mismatch", "tuple length differs from the universal count");
  std::map<std::string, int> rho;
  for (std::size_t i = 0; i < us.size(); ++i) rho[us[i]] = t[i];
  return solve_qcsp(named, instantiate_universals(phi, rho), budget);
}

}  // namespace

Structure resolve_structure(const json& ref) {
  Structure A;
  if (!ref.is_object()) throw Error("schema_mismatch", "structure reference must be an object");
  if (ref.contains("file"))
    A = parse_structure(read_file(ref.at("file").get<std::string>()));
  else if (ref.contains("beta"))
    A = path_structure(ref.at("beta").get<std::string>());
  else if (ref.contains("inline"))
    A = parse_structure(ref.at("inline").get<std::string>());
  else
    throw Error("schema_mismatch", "structure reference needs 'file', 'beta' or 'inline'");
  if (ref.value("constants", false)) A = with_all_constants(A);
  return A;
}

json structure_ref(const std::string& arg, bool constants) {
  json ref;
  if (arg.rfind("beta:", 0) == 0)
    ref["beta"] = arg.substr(5);
  else {
    if (!std::filesystem::exists(arg)) throw Error("input_error", "no such structure file " + arg);
    ref["file"] = arg;
  }
  ref["constants"] = constants;
  return ref;
}

json op_to_json(const OpTable& f) { return json{{"arity", f.k}, {"domain", f.n}, {"values", f.vals}}; }

OpTable op_from_json(const json& j) {
  OpTable f;
  f.k = field(j, "arity").get<int>();
  f.n = field(j, "domain").get<int>();
  f.vals = field(j, "values").get<std::vector<int>>();
  std::size_t expect = 1;
  for (int i = 0; i < f.k; ++i) expect *= static_cast<std::size_t>(f.n);
  if (f.k < 0 || f.n < 1 || f.vals.size() != expect) throw Error("schema_mismatch", "operation table has the wrong size");
  for (int v : f.vals)
    if (v < 1 || v > f.n) throw Error("schema_mismatch", "operation value outside the domain");
  return f;
}

json tuples_to_json(const std::vector<Tuple>& ts) { return json(ts); }

std::vector<Tuple> tuples_from_json(const json& j) { return j.get<std::vector<Tuple>>(); }

ReportCheck verify_report(const json& report, const Budget& budget) {
  ReportCheck r;
  const json& certs = field(report, "certificates");
  if (!certs.is_array()) throw Error("schema_mismatch", "'certificates' must be an array");
  for (std::size_t idx = 0; idx < certs.size(); ++idx) {
    const json& c = certs[idx];
    std::string kind = field(c, "kind").get<std::string>();
    std::string where = "certificate " + std::to_string(idx) + " (" + kind + "): ";
    auto fail = [&](const std::string& why) {
      r.valid = false;
      r.failures.push_back(where + why);
    };
    ++r.checked;
    if (kind == "egp_witness") {
      Structure E = parse_structure(field(c, "expanded").get<std::string>());
      PHSentence phi = parse_sentence(field(c, "sentence").get<std::string>(), with_all_constants(E).signature());
      Structure named = with_all_constants(E);
      Tuple fals = field(c, "falsifier").get<Tuple>();
      if (holds_at(named, phi, fals, budget)) fail("sentence holds at the falsifier " + tuple_str(fals));
      for (const auto& t : tuples_from_json(field(c, "checked")))
        if (!holds_at(named, phi, t, budget)) fail("sentence fails at generator " + tuple_str(t));
      continue;
    }
    Structure A = resolve_structure(field(c, "structure"));
    if (kind == "polymorphism" || kind == "hubie") {
      OpTable f = op_from_json(field(c, "table"));
      if (f.n != A.n) {
        fail("table domain differs from the structure");
        continue;
      }
      if (auto v = polymorphism_violation(f, A)) fail("not a polymorphism: " + *v);
      for (const auto& tag : c.value("tags", json::array()))
        if (!has_tag(f, tag.get<std::string>())) fail("missing property " + tag.get<std::string>());
      if (kind == "hubie" && !is_hubie(f, field(c, "source").get<int>())) fail("not Hubie at the source");
    } else if (kind == "membership") {
      MembershipCertificate mc{field(c, "target").get<Tuple>(), tuples_from_json(field(c, "generators")),
                               op_from_json(field(c, "table"))};
      if (!verify_certificate(A, mc)) fail("table does not produce the target from the generators");
    } else if (kind == "non_membership") {
      auto res = subpower_membership(A, tuples_from_json(field(c, "generators")), field(c, "target").get<Tuple>(),
                                     budget);
      if (res.answer != Answer::No) fail("target is not refuted on re-run (" + to_string(res.answer) + ")");
    } else if (kind == "shop") {
      Shop s;
      s.images = field(c, "images").get<std::vector<std::vector<int>>>();
      if (!is_she(A, s)) fail("images do not form a surjective hyper-endomorphism");
      recompute_shop_flags(s);
      if (!s.is_A_shop || !s.is_simple) fail("shop is not a simple A-shop");
    } else {
      throw Error("schema_mismatch", "unknown certificate kind '" + kind + "'");
    }
  }
  return r;
}

}  // namespace qca
