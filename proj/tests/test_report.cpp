#include "doctest.h"
#include "qca/collapsibility.hpp"
#include "qca/paths.hpp"
#include "qca/report.hpp"

using namespace qca;

namespace {

json k2_ref() {
  return json{{"inline", "domain 2;\nrel E/2 { 1 2; 2 1 }\n"}, {"constants", true}};
}

}  // namespace

TEST_CASE("structure references") {
  Structure A = resolve_structure(k2_ref());
  CHECK(A.n == 2);
  CHECK(A.constants.size() == 2);
  CHECK(resolve_structure(json{{"beta", "1001"}}).n == 4);
  CHECK(structure_ref("beta:011", false) == json{{"beta", "011"}, {"constants", false}});
  CHECK_THROWS_AS(structure_ref("/no/such/file", false), Error);
  CHECK_THROWS_AS(resolve_structure(json{{"file", "/no/such/file"}}), Error);
  CHECK_THROWS_AS(resolve_structure(json{{"other", 1}}), Error);
}

TEST_CASE("operation tables round trip through JSON") {
  OpTable f = OpTable::projection(3, 2, 2);
  CHECK(op_from_json(op_to_json(f)) == f);
  json bad = op_to_json(f);
  bad["values"].erase(0);
  CHECK_THROWS_AS(op_from_json(bad), Error);
}

TEST_CASE("report verification") {
  Structure K = resolve_structure(k2_ref());
  auto v = decide_collapsible_singleton(K, 1, 1);
  REQUIRE(v.certificate);
  json report{{"certificates",
               json::array({json{{"kind", "polymorphism"},
                                 {"structure", k2_ref()},
                                 {"table", op_to_json(*v.certificate)},
                                 {"tags", json::array({"maltsev"})}},
                            json{{"kind", "shop"},
                                 {"structure", json{{"inline", "domain 2;\nrel E/2 { 1 2; 2 2 }\n"}}},
                                 {"images", json::array({json::array({1, 2}), json::array({2})})}},
                            json{{"kind", "non_membership"},
                                 {"structure", json{{"beta", "1001"}, {"constants", true}}},
                                 {"generators", upsilon(4, 2, 1, {1}).union_tuples()},
                                 {"target", Tuple{4, 4}}}})}};
  auto w = path_egp_witness("1001", 2);
  report["certificates"].push_back(json{{"kind", "egp_witness"},
                                        {"expanded", serialize_structure(w.expanded)},
                                        {"sentence", w.sentence.to_string()},
                                        {"falsifier", w.falsifier},
                                        {"checked", w.checked}});
  auto ok = verify_report(report);
  CHECK(ok.valid);
  CHECK(ok.checked == 4);

  json tampered = report;
  auto& vals = tampered["certificates"][0]["table"]["values"];
  vals[1] = 3 - vals[1].get<int>();
  auto bad = verify_report(tampered);
  CHECK_FALSE(bad.valid);
  REQUIRE_FALSE(bad.failures.empty());
  CHECK(bad.failures[0].find("not a polymorphism") != std::string::npos);

  json wrong_target = report;
  wrong_target["certificates"][2]["target"] = Tuple{1, 2};
  CHECK_FALSE(verify_report(wrong_target).valid);

  json wrong_falsifier = report;
  wrong_falsifier["certificates"][3]["falsifier"] = w.checked[0];
  CHECK_FALSE(verify_report(wrong_falsifier).valid);

  json missing = report;
  missing["certificates"][1]["structure"] = json{{"file", "/no/such/file"}};
  CHECK_THROWS_AS(verify_report(missing), Error);
  CHECK_THROWS_AS(verify_report(json{{"result", 1}}), Error);
  CHECK_THROWS_AS(verify_report(json{{"certificates", json::array({json{{"kind", "mystery"}, {"structure", k2_ref()}}})}}),
                  Error);
}
