#include <algorithm>
#include <random>
#include <set>

#include "doctest.h"
#include "oracles.hpp"
#include "qca/collapsibility.hpp"

using namespace qca;

namespace {

Structure k2() { return make_digraph(2, {{1, 2}, {2, 1}}); }
Structure dc3() { return make_digraph(3, {{1, 2}, {2, 3}, {3, 1}}); }
Structure tt3() { return make_digraph(3, {{1, 2}, {2, 3}, {1, 3}}); }
Structure p011() { return make_digraph(3, {{1, 2}, {2, 1}, {2, 2}, {2, 3}, {3, 2}, {3, 3}}); }
Structure p1001() {
  return make_digraph(4, {{1, 1}, {1, 2}, {2, 1}, {2, 3}, {3, 2}, {3, 4}, {4, 3}, {4, 4}});
}

// All 16 single-binary-relation structures on two elements.
std::vector<Structure> all_two_element() {
  std::vector<Structure> out;
  std::vector<std::pair<int, int>> pairs{{1, 1}, {1, 2}, {2, 1}, {2, 2}};
  for (int mask = 0; mask < 16; ++mask) {
    std::vector<std::pair<int, int>> e;
    for (int i = 0; i < 4; ++i)
      if (mask >> i & 1) e.push_back(pairs[i]);
    out.push_back(make_digraph(2, e));
  }
  return out;
}

// Non-degenerate sets of at most two adversaries of at most two tuples over [n]^2.
std::vector<AdversarySet> small_adversary_sets(int n) {
  auto tuples = all_tuples(n, 2);
  std::vector<Adversary> advs;
  for (std::size_t i = 0; i < tuples.size(); ++i) {
    advs.push_back(Adversary::from_tuples(2, {tuples[i]}));
    for (std::size_t j = i + 1; j < tuples.size(); ++j) advs.push_back(Adversary::from_tuples(2, {tuples[i], tuples[j]}));
  }
  std::vector<AdversarySet> out;
  for (std::size_t i = 0; i < advs.size(); ++i) {
    out.push_back(AdversarySet{2, {advs[i]}});
    for (std::size_t j = i + 1; j < advs.size(); ++j) out.push_back(AdversarySet{2, {advs[i], advs[j]}});
  }
  std::erase_if(out, [](const AdversarySet& s) { return is_degenerate(s); });
  return out;
}

// Restricted truth straight from the definition: all universals set to one source element.
bool zero_restricted(const Structure& A, const PHSentence& phi, const std::vector<int>& B) {
  int m = phi.num_universals();
  if (m == 0) return oracle::eval_sentence(A, phi);
  std::vector<Tuple> adv;
  for (int x : B) adv.push_back(Tuple(m, x));
  return oracle::skolem_wins(A, phi, adv);
}

}  // namespace

TEST_CASE("upsilon and sigma families") {
  auto u = upsilon(4, 2, 1, {1});
  REQUIRE(u.adversaries.size() == 2);
  CHECK(u.width() == 8);
  CHECK(u.union_tuples() == std::vector<Tuple>{{1, 1}, {1, 2}, {1, 3}, {1, 4}, {2, 1}, {3, 1}, {4, 1}});
  CHECK(u.adversaries[0].tuples == std::vector<Tuple>{{1, 1}, {2, 1}, {3, 1}, {4, 1}});
  CHECK(upsilon(3, 2, 2, {1}).adversaries.size() == 1);
  CHECK(upsilon(3, 2, 2, {1}).width() == 9);
  CHECK(upsilon(2, 3, 0, {1, 2}).union_tuples() == std::vector<Tuple>{{1, 1, 1}, {2, 2, 2}});
  CHECK_THROWS_AS(upsilon(2, 2, 1, {3}), Error);

  auto s = sigma(2, 3, 1);
  REQUIRE(s.adversaries.size() == 2);
  CHECK(s.adversaries[0].tuples == std::vector<Tuple>{{1, 1, 1}, {1, 2, 2}, {2, 1, 1}, {2, 2, 2}});
  CHECK(s.adversaries[1].tuples == std::vector<Tuple>{{1, 1, 1}, {1, 1, 2}, {2, 2, 1}, {2, 2, 2}});
  CHECK(sigma(2, 3, 2).width() == 8);
  CHECK(sigma(3, 4, 0).union_tuples().size() == 3);

  auto fam = AdversaryFamily::make_upsilon(1, {1});
  CHECK(fam.emit(3, 2).width() == upsilon(3, 2, 1, {1}).width());
  CHECK(to_string(fam.kind) == "upsilon");
  CHECK_THROWS_AS(AdversaryFamily::make_custom(nullptr).emit(2, 2), Error);
}

TEST_CASE("degeneracy") {
  CHECK_FALSE(is_degenerate(upsilon(2, 2, 1, {1})));
  CHECK_FALSE(is_degenerate(upsilon(4, 2, 1, {1})));
  for (int m = 2; m <= 4; ++m) CHECK(is_degenerate(upsilon(3, m, 0, {1, 2})));
  CHECK(is_degenerate(AdversarySet{2, {Adversary::from_tuples(2, {{1, 1}})}}));
  CHECK(is_degenerate(AdversarySet{2, {}}));
  CHECK_FALSE(is_degenerate(AdversarySet{2, {Adversary::from_tuples(2, {{1, 2}})}}));
}

TEST_CASE("projectivity") {
  for (int n = 1; n <= 3; ++n)
    for (int m = 1; m <= 2; ++m)
      for (int p = 0; p <= 2; ++p) {
        CHECK(check_projectivity(AdversaryFamily::make_upsilon(p, {1}), n, m).projective);
        CHECK(check_projectivity(AdversaryFamily::make_sigma(p), n, m).projective);
      }
  CHECK(check_projectivity(AdversaryFamily::make_full(), 2, 2).projective);
  // constant tuples at length m, but one free coordinate at length n*m
  auto bad = AdversaryFamily::make_custom([](int n, int m) {
    return m == 2 ? upsilon(n, m, 0, {1}) : upsilon(n, m, 1, {1});
  });
  auto r = check_projectivity(bad, 2, 2);
  CHECK_FALSE(r.projective);
  REQUIRE(r.failing);
  CHECK(r.failing->size() == 2);
}

TEST_CASE("canonical Pi2 sentence") {
  Structure K = with_all_constants(k2());
  AdversarySet whole{1, {Adversary::from_tuples(1, {{1}, {2}})}};
  PHSentence phi = canonical_pi2(whole, K);
  CHECK(phi.num_universals() == 1);
  CHECK(phi.num_existentials() == 2);
  CHECK(solve_qcsp(K, phi));
  CHECK_THROWS_AS(canonical_pi2(upsilon(2, 2, 0, {1}), K), Error);
  Budget tiny;
  tiny.max_elements = 10;
  CHECK_THROWS_AS(canonical_pi2(upsilon(2, 2, 1, {1}), K, tiny), BudgetExceeded);
}

TEST_CASE("canonical Pi2 truth equals generation") {
  for (const Structure& base : {k2(), p011()}) {
    Structure A = with_all_constants(base);
    int disagreements = 0, yes = 0, total = 0;
    for (const auto& omega : small_adversary_sets(A.n)) {
      bool gen = generates_full_power(A, omega.union_tuples(), 2).answer == Answer::Yes;
      bool holds = solve_qcsp(A, canonical_pi2(omega, A));
      if (gen != holds) ++disagreements;
      yes += gen;
      ++total;
    }
    CHECK(disagreements == 0);
    CHECK(yes > 0);
    CHECK(yes < total);
  }
}

TEST_CASE("canonical unbounded sentence") {
  // Upsilon(1,1,{1}) at n=2 is {A^1}: every map [2]x[1] -> A is consistent
  auto one = upsilon(2, 1, 1, {1});
  CHECK(consistent_map_count(one.adversaries[0], 2) == 4);
  Structure K = with_all_constants(k2());
  PHSentence phi = canonical_unbounded(2, one, K);
  CHECK(phi.num_universals() == 2);
  CHECK(solve_qcsp(K, phi));

  // brute-force count of consistent maps for Upsilon(2,1,{1}), n = 2 and 3
  for (int n = 2; n <= 3; ++n) {
    auto omega = upsilon(n, 2, 1, {1});
    std::size_t brute = 0;
    for (const auto& O : omega.adversaries)
      oracle::for_each_map(2 * n, n, [&](const std::vector<int>& mu) {
        // mu[(i-1)*2 + (j-1)] = mu(i,j); consistent iff every choice of rows lands in O
        for (const auto& rows : all_tuples(n, 2))
          if (!O.contains(Tuple{mu[(rows[0] - 1) * 2], mu[(rows[1] - 1) * 2 + 1]})) return;
        ++brute;
      });
    CHECK(unbounded_factor_count(omega, n) == brute);
  }
  CHECK(unbounded_factor_count(upsilon(3, 2, 1, {1}), 3) == 54);
  CHECK_THROWS_AS(canonical_unbounded(3, upsilon(3, 2, 1, {1}), with_all_constants(dc3())), BudgetExceeded);
  CHECK_THROWS_AS(canonical_unbounded(2, upsilon(2, 2, 0, {1}), K), Error);
}

TEST_CASE("reactive composition verifier") {
  Structure A = k2();
  Adversary B = Adversary::from_tuples(2, {{1, 2}, {2, 1}});
  ReactiveWitness w;
  w.f = OpTable::projection(1, 2, 1);
  w.term = CompositionTerm::variable(0);
  w.leaves = 1;
  w.g_last = {{{1, 2}, {1, 2}}};
  w.leaf_adversary = {0};
  AdversarySet omega{2, {B}};
  CHECK(verify_reactive_composition(A, w, B, omega).ok);
  w.g_last = {{{1, 2}, {2, 1}}};
  auto bad = verify_reactive_composition(A, w, B, omega);
  CHECK_FALSE(bad.ok);
  CHECK(bad.reason.find("trace 1") != std::string::npos);
  w.g_last = {{{1, 2}, {0, 1}}};
  CHECK_FALSE(verify_reactive_composition(A, w, B, omega).ok);
}

TEST_CASE("Chen witnesses from Hubie operations") {
  struct Case {
    Structure A;
    int x, k;
  };
  std::vector<Case> cases{{with_all_constants(dc3()), 1, 3}, {with_all_constants(tt3()), 1, 3},
                          {with_all_constants(tt3()), 3, 2}, {with_all_constants(p011()), 2, 2}};
  int verified = 0;
  for (const auto& c : cases) {
    auto f = find_hubie_polymorphism(c.A, c.x, c.k);
    if (!f) continue;
    for (int m = 1; m <= c.k + 2; ++m) {
      auto w = chen_witness(*f, c.x, m);
      auto omega = upsilon(c.A.n, m, c.k - 1, {c.x});
      auto full = full_adversary(c.A.n, m).adversaries[0];
      auto r = verify_reactive_composition(c.A, w, full, omega);
      CHECK_MESSAGE(r.ok, r.reason);
      ++verified;
    }
    // tampering with one g entry breaks the witness
    auto w = chen_witness(*f, c.x, c.k + 1);
    for (auto& v : w.g_last.back().back()) v = 0;
    CHECK_FALSE(verify_reactive_composition(c.A, w, full_adversary(c.A.n, c.k + 1).adversaries[0],
                                            upsilon(c.A.n, c.k + 1, c.k - 1, {c.x}))
                    .ok);
  }
  CHECK(verified >= 10);
  CHECK_THROWS_AS(chen_witness(OpTable::projection(2, 2, 1), 1, 2), Error);
}

TEST_CASE("Theorem 7.6 chain on random triples") {
  std::mt19937 rng(7);
  int triples = 0, restricted_true = 0;
  while (triples < 100) {
    int n = 2 + static_cast<int>(rng() % 2);
    Structure A = with_all_constants(oracle::random_digraph(rng, n, 0.5));
    int x = 1 + static_cast<int>(rng() % n);
    int k = 2 + static_cast<int>(rng() % 2);
    auto f = find_hubie_polymorphism(A, x, k);
    if (!f) continue;
    int m = 1 + static_cast<int>(rng() % 3);
    PHSentence phi = oracle::random_sentence(rng, m, 2, 3, {constant_name(x)}, false);
    auto w = chen_witness(*f, x, m);
    auto omega = upsilon(n, m, k - 1, {x});
    REQUIRE(verify_reactive_composition(A, w, full_adversary(n, m).adversaries[0], omega).ok);
    if (models_restricted(A, phi, omega)) {
      CHECK(solve_qcsp(A, phi));
      CHECK(oracle::eval_sentence(A, phi));
      ++restricted_true;
    }
    ++triples;
  }
  CHECK(restricted_true > 10);
}

TEST_CASE("singleton-source decisions") {
  Structure K = with_all_constants(k2());
  auto vk = decide_collapsible_singleton(K, 1, 1);
  CHECK(vk.answer == Answer::Yes);
  CHECK(vk.method == "maltsev");
  REQUIRE(vk.certificate);
  CHECK(oracle::preserves(K, vk.certificate->vals, 3));
  CHECK(verify_collapsibility_verdict(K, 1, 1, vk));

  Structure D = with_all_constants(dc3());
  auto vd = decide_collapsible_singleton(D, 1, 2);
  CHECK(vd.answer == Answer::Yes);
  CHECK(vd.method == "hubie");
  REQUIRE(vd.certificate);
  // DC3 is affine, so a binary Hubie table already exists
  CHECK(vd.certificate->k == 2);
  CHECK(oracle::preserves(D, vd.certificate->vals, 2));
  CHECK(verify_collapsibility_verdict(D, 1, 2, vd));

  Structure P = with_all_constants(p1001());
  CollapseBudgets b;
  b.max_m = 2;
  auto vp = decide_collapsible_singleton(P, 1, 1, b);
  CHECK(vp.answer == Answer::No);
  CHECK(vp.method == "generation");
  CHECK(vp.m == 2);
  CHECK(vp.counterexample == Tuple{2, 2});
  CHECK(verify_collapsibility_verdict(P, 1, 1, vp));
  auto gens = upsilon(4, 2, 1, {1}).union_tuples();
  CHECK(subpower_membership(P, gens, {4, 4}).answer == Answer::No);

  // a forged certificate is rejected
  CollapsibilityVerdict forged = vk;
  forged.certificate = OpTable::projection(3, 2, 1);
  CHECK_FALSE(verify_collapsibility_verdict(K, 1, 1, forged));
  CHECK_THROWS_AS(decide_collapsible_singleton(k2(), 1, 1), Error);
  CHECK_THROWS_AS(decide_collapsible_singleton(K, 1, 0), Error);
}

TEST_CASE("shops and 0-collapsibility") {
  auto s = decide_zero_collapsible(make_digraph(2, {{1, 2}, {2, 2}}));
  REQUIRE(s);
  CHECK(s->source == 1);
  CHECK(s->images == std::vector<std::vector<int>>{{1, 2}, {2}});
  CHECK(s->is_A_shop);
  CHECK(s->is_simple);
  CHECK_FALSE(decide_zero_collapsible(make_digraph(2, {{1, 2}})));
  Structure empty = make_digraph(3, {});
  auto e = decide_zero_collapsible(empty);
  REQUIRE(e);
  CHECK(is_she(empty, *e));

  // agreement with the definition over small equality-free sentences
  auto sentences = enumerate_sentences(make_digraph(2, {}).signature(), 2, 2, 2);
  CHECK(sentences.size() > 100);
  for (const auto& A : all_two_element()) {
    auto shop = decide_zero_collapsible(A);
    bool some_source_agrees = false;
    for (int x = 1; x <= 2; ++x) {
      bool agree = std::all_of(sentences.begin(), sentences.end(), [&](const PHSentence& phi) {
        return oracle::eval_sentence(A, phi) == zero_restricted(A, phi, {x});
      });
      if (agree) some_source_agrees = true;
      if (shop && shop->source == x) CHECK(agree);
    }
    CHECK(shop.has_value() == some_source_agrees);
  }
}

TEST_CASE("rainbow lift") {
  Structure A = dc3();
  auto [same, c] = rainbow_lift(A, {2});
  CHECK(c == 2);
  CHECK(same.n == 3);
  auto [L, e] = rainbow_lift(A, {2, 1, 2});
  CHECK(L.n == 9);
  CHECK(L.element_tuple(e) == Tuple{1, 2});

  auto sentences = enumerate_sentences(make_digraph(2, {}).signature(), 2, 2, 2);
  for (const auto& B : all_two_element()) {
    auto [lift, r] = rainbow_lift(B, {1, 2});
    bool lifted = decide_zero_collapsible(lift, r).has_value();
    bool direct = std::all_of(sentences.begin(), sentences.end(), [&](const PHSentence& phi) {
      return oracle::eval_sentence(B, phi) == zero_restricted(B, phi, {1, 2});
    });
    CHECK(lifted == direct);
  }
}

TEST_CASE("logical probe") {
  Structure T = with_all_constants(tt3());
  std::mt19937_64 rng(11);
  std::vector<PHSentence> sample;
  for (int i = 0; i < 60; ++i) sample.push_back(random_sentence(rng, T.signature(), 3, 2, 3, true, 3));
  auto rep = probe_collapsibility_logical(T, 1, {1}, sample);
  CHECK(rep.sentences == 60);
  CHECK(rep.agreements == 60);
  CHECK(rep.discrepancies.empty());

  Structure P = p1001();
  Signature sig = P.signature();
  PHSentence eq = parse_sentence("forall x forall y : x = y", sig);
  auto r = probe_collapsibility_logical(P, 0, {1}, {eq});
  REQUIRE(r.discrepancies.size() == 1);
  CHECK_FALSE(r.discrepancies[0].full);
  CHECK(r.discrepancies[0].restricted);
  CHECK(probe_collapsibility_logical(P, 2, {1}, {eq}).agreements == 1);

  auto all = enumerate_sentences(sig, 1, 1, 1);
  // E(x,x), E(x,y), E(y,x), E(y,y) under two prefixes, plus one-variable sentences
  CHECK(all.size() == 1 + 1 + 4 * 2);
}
