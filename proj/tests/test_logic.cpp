#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "qca/logic.hpp"

using namespace qca;

namespace {

Structure dc3() { return make_digraph(3, {{1, 2}, {2, 3}, {3, 1}}); }
Structure k2() { return make_digraph(2, {{1, 2}, {2, 1}}); }
Structure trans3() { return make_digraph(3, {{1, 2}, {1, 3}, {2, 3}}); }
Structure p1001() {
  return make_digraph(4, {{1, 1}, {1, 2}, {2, 1}, {2, 3}, {3, 2}, {3, 4}, {4, 3}, {4, 4}});
}

}  // namespace

TEST_CASE("parse_sentence") {
  Signature sig = k2().signature();
  PHSentence a = parse_sentence("forall x exists y : E(x,y)", sig);
  CHECK(a.num_universals() == 1);
  CHECK(a.num_existentials() == 1);
  CHECK(a.atoms.size() == 1);
  CHECK(a.to_string() == "forall x exists y : E(x,y)");

  PHSentence eq = parse_sentence("forall x forall y : x = y", sig);
  CHECK(eq.has_equality());
  CHECK(eq.num_universals() == 2);

  PHSentence pp = parse_sentence("exists y : E(y,y)", sig);
  CHECK(pp.num_universals() == 0);

  CHECK_THROWS_AS(parse_sentence("forall x : E(x,z)", sig), Error);
  CHECK_THROWS_AS(parse_sentence("forall x : F(x,x)", sig), Error);
  CHECK_THROWS_AS(parse_sentence("forall x : E(x)", sig), Error);
  CHECK_THROWS_AS(parse_sentence("forall x forall y : x = y", sig, false), Error);

  Signature withc = with_all_constants(k2()).signature();
  PHSentence c = parse_sentence("exists y : E(c1,y) & y = c2", withc);
  CHECK(c.atoms[0].args[0].is_const);
  CHECK(parse_sentence(c.to_string(), withc).to_string() == c.to_string());
}

TEST_CASE("solve_pp examples") {
  Signature sig = dc3().signature();
  CHECK_FALSE(solve_pp(dc3(), parse_sentence("exists y : E(y,y)", sig)).sat);
  auto r = solve_pp(p1001(), parse_sentence("exists y : E(y,y)", sig));
  CHECK(r.sat);
  CHECK(r.witness.at("y") == 1);
  CHECK(solve_pp(k2(), parse_sentence("exists x exists y : E(x,y) & E(y,x)", sig)).sat);
  // equality merging
  auto m = solve_pp(k2(), parse_sentence("exists x exists y : E(x,y) & x = y", sig));
  CHECK_FALSE(m.sat);
  Structure pc = with_all_constants(p1001());
  auto w = solve_pp(pc, parse_sentence("exists x exists y : E(x,y) & y = c3 & E(x,x)", pc.signature()));
  CHECK(w.sat);
  CHECK(w.witness.at("x") == 4);
}

TEST_CASE("solve_qcsp examples") {
  Signature sig = k2().signature();
  CHECK(solve_qcsp(k2(), parse_sentence("forall x exists y : E(x,y)", sig)));
  CHECK_FALSE(solve_qcsp(trans3(), parse_sentence("forall x exists y : E(x,y)", sig)));
  CHECK_FALSE(solve_qcsp(dc3(), parse_sentence("forall x forall y exists z : E(x,z) & E(y,z)", sig)));
  CHECK_FALSE(solve_qcsp(k2(), parse_sentence("forall x forall y : x = y", sig)));
  CHECK(solve_qcsp(make_digraph(1, {}), parse_sentence("forall x forall y : x = y", sig)));
}

TEST_CASE("solve_qcsp agrees with plain recursion") {
  std::mt19937 rng(21);
  for (int trial = 0; trial < 400; ++trial) {
    int n = 1 + trial % 4;
    Structure A = with_all_constants(oracle::random_digraph(rng, n, 0.45));
    std::vector<std::string> consts{"c1"};
    if (n > 1) consts.push_back("c2");
    PHSentence phi = oracle::random_sentence(rng, static_cast<int>(rng() % 3),
                                             static_cast<int>(rng() % 4), 1 + static_cast<int>(rng() % 4),
                                             consts, true);
    CHECK(solve_qcsp(A, phi) == oracle::eval_sentence(A, phi));
  }
}

TEST_CASE("models_restricted") {
  Signature sig = k2().signature();
  PHSentence phi = parse_sentence("forall x exists y : E(x,y)", sig);
  // Y(1,1,{1}) is the full adversary on length 1
  CHECK(models_restricted(p1001(), phi, full_adversary(4, 1)));

  std::mt19937 rng(5);
  for (int trial = 0; trial < 300; ++trial) {
    int n = 1 + trial % 4;
    Structure A = with_all_constants(oracle::random_digraph(rng, n, 0.5));
    int nu = static_cast<int>(rng() % 4);
    PHSentence f = oracle::random_sentence(rng, nu, 1 + static_cast<int>(rng() % 3),
                                           1 + static_cast<int>(rng() % 3), {"c1"}, trial % 2 == 0);
    // full adversary = plain QCSP
    CHECK(models_restricted(A, f, full_adversary(n, nu)) == solve_qcsp(A, f));
    if (nu > 2 || n > 3) continue;
    // random adversaries against the Skolem definition
    std::vector<Tuple> all;
    oracle::for_each_map(nu, n, [&](const std::vector<int>& t) { all.push_back(t); });
    std::vector<Tuple> pick;
    for (const auto& t : all)
      if (rng() % 2) pick.push_back(t);
    AdversarySet omega{nu, {Adversary::from_tuples(nu, pick)}};
    bool got = models_restricted(A, f, omega);
    if (!f.has_equality()) CHECK(got == oracle::skolem_wins(A, f, omega.adversaries[0].tuples));
    // single tuple = pp instance
    if (!pick.empty()) {
      std::map<std::string, int> rho;
      auto us = f.universals();
      for (std::size_t i = 0; i < us.size(); ++i) rho[us[i]] = pick[0][i];
      AdversarySet single{nu, {Adversary::from_tuples(nu, {pick[0]})}};
      CHECK(models_restricted(A, f, single) == solve_qcsp(A, instantiate_universals(f, rho)));
    }
    // monotonicity
    if (got && !pick.empty()) {
      std::vector<Tuple> sub(pick.begin(), pick.begin() + (pick.size() + 1) / 2);
      CHECK(models_restricted(A, f, AdversarySet{nu, {Adversary::from_tuples(nu, sub)}}));
    }
  }
  CHECK_THROWS_AS(models_restricted(p1001(), phi, full_adversary(4, 2)), Error);
}

TEST_CASE("principle of union for Pi2 sentences") {
  std::mt19937 rng(17);
  for (int trial = 0; trial < 200; ++trial) {
    int n = 1 + trial % 3;
    Structure A = with_all_constants(oracle::random_digraph(rng, n, 0.5));
    int nu = 1 + static_cast<int>(rng() % 2), ne = 1 + static_cast<int>(rng() % 2);
    PHSentence f;
    for (int i = 0; i < nu; ++i) f.prefix.emplace_back(Quant::Forall, "u" + std::to_string(i + 1));
    for (int i = 0; i < ne; ++i) f.prefix.emplace_back(Quant::Exists, "e" + std::to_string(i + 1));
    PHSentence body = oracle::random_sentence(rng, nu, ne, 1 + static_cast<int>(rng() % 3), {"c1"}, false);
    // reuse the random body but force the Pi2 prefix order
    f.atoms = body.atoms;
    std::vector<Tuple> all;
    oracle::for_each_map(nu, n, [&](const std::vector<int>& t) { all.push_back(t); });
    AdversarySet omega{nu, {}};
    for (int k = 0; k < 2; ++k) {
      std::vector<Tuple> pick;
      for (const auto& t : all)
        if (rng() % 2) pick.push_back(t);
      omega.adversaries.push_back(Adversary::from_tuples(nu, pick));
    }
    bool sets = models_restricted(A, f, omega);
    bool uni = models_restricted(A, f, AdversarySet{nu, {Adversary::from_tuples(nu, omega.union_tuples())}});
    AdversarySet singles{nu, {}};
    for (const auto& t : omega.union_tuples()) singles.adversaries.push_back(Adversary::from_tuples(nu, {t}));
    CHECK(sets == uni);
    CHECK(uni == models_restricted(A, f, singles));
  }
}

TEST_CASE("instantiate_universals") {
  Signature sig = with_all_constants(dc3()).signature();
  PHSentence phi = parse_sentence("forall x forall y exists z : E(x,z) & E(y,z)", sig);
  CHECK(instantiate_universals(phi, {{"x", 1}}).to_string() == "forall y exists z : E(c1,z) & E(y,z)");
  CHECK(instantiate_universals(phi, {{"x", 1}, {"y", 2}}).num_universals() == 0);
  CHECK(instantiate_universals(phi, {}).to_string() == phi.to_string());
  CHECK_THROWS_AS(instantiate_universals(phi, {{"z", 1}}), Error);
}

TEST_CASE("qcsp_to_csp identification rule") {
  Structure A = with_all_constants(dc3());
  Signature sig = A.signature();
  PHSentence phi = parse_sentence("forall x1 exists y forall x2 : E(x1,y) & E(y,x2)", sig);
  AdversarySet omega{2, {Adversary::from_tuples(2, {{1, 1}, {1, 2}})}};
  CSPReduct r = qcsp_to_csp(A, phi, omega);
  CHECK(r.instances.size() == 2);
  REQUIRE(r.merges.size() == 1);
  CHECK(r.merges[0].var == "y");
  CHECK(r.merges[0].shared_prefix == 1);
  CHECK(r.combined.num_existentials() == 1);

  PHSentence f = parse_sentence("forall x exists y : E(x,y)", sig);
  CSPReduct r2 = qcsp_to_csp(A, f, full_adversary(3, 1));
  CHECK(r2.instances.size() == 3);
  CHECK(r2.merges.empty());
  CHECK(r2.instances[1].to_string() == "exists y__2 : E(c2,y__2)");

  PHSentence pp = parse_sentence("exists y : E(y,y)", sig);
  CSPReduct r3 = qcsp_to_csp(A, pp, AdversarySet{0, {Adversary::from_tuples(0, {Tuple{}})}});
  REQUIRE(r3.instances.size() == 1);
  CHECK(r3.instances[0].to_string() == pp.to_string());

  CHECK_THROWS_AS(qcsp_to_csp(dc3(), f, full_adversary(3, 1)), Error);
  CHECK_THROWS_AS(qcsp_to_csp(A, parse_sentence("forall x exists y : x = y", sig), full_adversary(3, 1)), Error);
  std::string text = r.serialize(A);
  CHECK(text.find("# merged: adversary 0 y(1,1) = y(1,2) shared prefix 1") != std::string::npos);
  CHECK_NOTHROW(parse_structure(text));
}

TEST_CASE("qcsp_to_csp reduction soundness") {
  std::mt19937 rng(29);
  for (int trial = 0; trial < 300; ++trial) {
    int n = 1 + trial % 4;
    Structure A = with_all_constants(oracle::random_digraph(rng, n, 0.5));
    int nu = static_cast<int>(rng() % 4);
    PHSentence f = oracle::random_sentence(rng, nu, 1 + static_cast<int>(rng() % 3),
                                           1 + static_cast<int>(rng() % 3), {"c1"}, false);
    std::vector<Tuple> all;
    oracle::for_each_map(nu, n, [&](const std::vector<int>& t) { all.push_back(t); });
    AdversarySet omega{nu, {}};
    for (int k = 0; k < 1 + trial % 2; ++k) {
      std::vector<Tuple> pick;
      for (const auto& t : all)
        if (rng() % 3) pick.push_back(t);
      omega.adversaries.push_back(Adversary::from_tuples(nu, pick));
    }
    CSPReduct r = qcsp_to_csp(A, f, omega);
    CHECK(r.instances.size() <= omega.width());
    for (const auto& mg : r.merges) {
      int l = 0;
      while (l < nu && mg.kept[l] == mg.merged[l]) ++l;
      CHECK(l == mg.shared_prefix);
    }
    CHECK(reduct_satisfiable(A, r) == models_restricted(A, f, omega));
  }
}
