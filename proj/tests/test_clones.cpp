#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "qca/clones.hpp"

using namespace qca;

namespace {

Structure dc3() { return make_digraph(3, {{1, 2}, {2, 3}, {3, 1}}); }
Structure k2() { return make_digraph(2, {{1, 2}, {2, 1}}); }
Structure loop1() { return make_digraph(1, {{1, 1}}); }
Structure p1001() {
  return make_digraph(4, {{1, 1}, {1, 2}, {2, 1}, {2, 3}, {3, 2}, {3, 4}, {4, 3}, {4, 4}});
}
Structure p011() { return make_digraph(3, {{1, 2}, {2, 1}, {2, 2}, {2, 3}, {3, 2}, {3, 3}}); }

OpTable median3() {
  return OpTable::from_function(3, 3, [](std::span<const int> a) {
    std::vector<int> v(a.begin(), a.end());
    std::sort(v.begin(), v.end());
    return v[1];
  });
}

OpTable dual_discriminator(int n) {
  return OpTable::from_function(3, n, [](std::span<const int> a) {
    if (a[1] == a[2]) return a[1];
    return a[0];
  });
}

OpTable parity2() {
  return OpTable::from_function(3, 2, [](std::span<const int> a) {
    return ((a[0] - 1) ^ (a[1] - 1) ^ (a[2] - 1)) + 1;
  });
}

bool contains_tag(const std::vector<std::string>& tags, const std::string& t) {
  return std::find(tags.begin(), tags.end(), t) != tags.end();
}

// All idempotent k-ary polymorphisms by trying every table.
std::vector<std::vector<int>> brute_idempotent_polymorphisms(const Structure& A, int k) {
  Structure Ac = with_all_constants(A);
  std::size_t cells = 1;
  for (int i = 0; i < k; ++i) cells *= A.n;
  std::vector<std::vector<int>> out;
  oracle::for_each_map(static_cast<int>(cells), A.n, [&](const std::vector<int>& vals) {
    if (oracle::preserves(Ac, vals, k)) out.push_back(vals);
  });
  return out;
}

}  // namespace

TEST_CASE("op table format") {
  OpTable f = median3();
  std::string text = serialize_op_table(f, "med");
  CHECK(text.rfind("op med arity 3 domain 3\n", 0) == 0);
  CHECK(parse_op_table(text) == f);
  CHECK_THROWS_AS(parse_op_table("op f arity 2 domain 2\n1 2 3 2\n"), ParseError);
  CHECK_THROWS_AS(parse_op_table("op f arity 2 domain 2\n1 2 1\n"), ParseError);
  CHECK_THROWS_AS(parse_op_table("opx f arity 2 domain 2\n"), ParseError);
  CHECK(f.args_of(f.index(std::vector<int>{3, 1, 2})) == Tuple{3, 1, 2});
}

TEST_CASE("is_polymorphism and is_idempotent") {
  CHECK(is_polymorphism(OpTable::projection(3, 4, 1), p1001()));
  CHECK(is_polymorphism(parity2(), with_all_constants(k2())));
  CHECK(is_polymorphism(dual_discriminator(3), with_all_constants(dc3())));
  OpTable bad = OpTable::projection(2, 2, 1);
  bad.vals[1] = 3;
  CHECK_THROWS_AS(is_polymorphism(bad, k2()), Error);
  CHECK_THROWS_AS(is_polymorphism(OpTable::projection(2, 3, 1), k2()), Error);
  OpTable constant{2, 2, {1, 1, 1, 1}};
  CHECK_FALSE(is_idempotent(constant));
  CHECK(is_idempotent(OpTable::projection(2, 2, 2)));
  CHECK_FALSE(is_polymorphism(constant, k2()));
  auto why = polymorphism_violation(constant, k2());
  REQUIRE(why);
  CHECK(why->find("relation E") == 0);
}

TEST_CASE("classify_operation examples") {
  auto med = classify_operation(median3());
  CHECK(contains_tag(med, "majority"));
  CHECK(contains_tag(med, "near_unanimity(3)"));
  CHECK_FALSE(contains_tag(med, "essentially_unary"));
  auto dd = classify_operation(dual_discriminator(3));
  CHECK(contains_tag(dd, "majority"));
  CHECK(contains_tag(dd, "dual_discriminator"));
  for (int x = 1; x <= 3; ++x) CHECK(contains_tag(dd, "hubie(" + std::to_string(x) + ")"));
  CHECK(classify_operation(OpTable::projection(2, 3, 2)) ==
        std::vector<std::string>{"projection", "essentially_unary"});
  auto par = classify_operation(parity2());
  CHECK(contains_tag(par, "maltsev"));
  CHECK(contains_tag(par, "hubie(1)"));
  OpTable mx = OpTable::from_function(2, 3, [](std::span<const int> a) { return std::max(a[0], a[1]); });
  CHECK(contains_tag(classify_operation(mx), "semilattice_with_unit(1)"));
  CHECK(contains_tag(classify_operation(mx), "hubie(1)"));
  CHECK_FALSE(contains_tag(classify_operation(mx), "hubie(2)"));
}

TEST_CASE("classify_operation invariants on random tables") {
  std::mt19937 rng(3);
  for (int trial = 0; trial < 300; ++trial) {
    int n = 2 + trial % 3, k = 3 + trial % 2;
    // random near-unanimity: identities forced, other cells random
    OpTable f = OpTable::from_function(k, n, [&](std::span<const int> a) {
      std::map<int, int> cnt;
      for (int v : a) ++cnt[v];
      for (auto [v, c] : cnt)
        if (c >= k - 1) return v;
      return 1 + static_cast<int>(rng() % n);
    });
    auto tags = classify_operation(f);
    CHECK(contains_tag(tags, "near_unanimity(" + std::to_string(k) + ")"));
    CHECK_FALSE(contains_tag(tags, "essentially_unary"));
    if (contains_tag(tags, "dual_discriminator")) CHECK(contains_tag(tags, "majority"));
  }
}

TEST_CASE("enumerate_polymorphisms examples") {
  auto p = enumerate_polymorphisms(p1001(), 2, "", 100);
  REQUIRE(p.tables.size() == 2);
  CHECK(p.tables[0] == OpTable::projection(2, 4, 1));
  CHECK(p.tables[1] == OpTable::projection(2, 4, 2));
  CHECK_FALSE(p.truncated);
  CHECK(enumerate_polymorphisms(loop1(), 2, "", 10).tables.size() == 1);
  auto m = enumerate_polymorphisms(k2(), 3, "maltsev", 100);
  CHECK(std::find(m.tables.begin(), m.tables.end(), parity2()) != m.tables.end());
  for (const auto& f : m.tables) CHECK(has_tag(f, "maltsev"));
  auto t = enumerate_polymorphisms(dc3(), 3, "", 1);
  CHECK(t.tables.size() == 1);
  CHECK(t.truncated);
  Budget tiny;
  tiny.max_elements = 10;
  CHECK_THROWS_AS(enumerate_polymorphisms(p1001(), 2, "", 10, tiny), BudgetExceeded);
}

TEST_CASE("enumerate_polymorphisms agrees with brute force") {
  std::mt19937 rng(11);
  for (int trial = 0; trial < 60; ++trial) {
    int n = 2 + trial % 2;
    Structure A = trial % 3 == 0 ? oracle::random_symmetric(rng, n, 0.5) : oracle::random_digraph(rng, n, 0.5);
    auto brute = brute_idempotent_polymorphisms(A, 2);
    auto got = enumerate_polymorphisms(A, 2, "", 100000);
    REQUIRE(got.tables.size() == brute.size());
    for (std::size_t i = 0; i < brute.size(); ++i) CHECK(got.tables[i].vals == brute[i]);
    if (n == 2) {
      auto b3 = brute_idempotent_polymorphisms(A, 3);
      auto g3 = enumerate_polymorphisms(A, 3, "", 100000);
      CHECK(g3.tables.size() == b3.size());
      std::size_t maj = 0;
      for (const auto& v : b3)
        if (has_tag(OpTable{3, n, v}, "majority")) ++maj;
      CHECK(enumerate_polymorphisms(A, 3, "majority", 100000).tables.size() == maj);
    }
  }
}

TEST_CASE("find_hubie_polymorphism") {
  auto dd = find_hubie_polymorphism(dc3(), 1, 3);
  REQUIRE(dd);
  CHECK(is_polymorphism(*dd, with_all_constants(dc3())));
  CHECK(is_hubie(*dd, 1));
  CHECK(is_polymorphism(dual_discriminator(3), with_all_constants(dc3())));
  CHECK(is_hubie(dual_discriminator(3), 1));
  // K2 has only projections at arity 2; the ternary parity is Hubie(1)
  CHECK_FALSE(find_hubie_polymorphism(k2(), 1, 2));
  auto h = find_hubie_polymorphism(k2(), 1, 3);
  REQUIRE(h);
  CHECK(has_tag(*h, "hubie(1)"));
  for (int x = 1; x <= 4; ++x) CHECK_FALSE(find_hubie_polymorphism(p1001(), x, 2));

  std::mt19937 rng(13);
  for (int trial = 0; trial < 40; ++trial) {
    int n = 2 + trial % 2;
    Structure A = oracle::random_digraph(rng, n, 0.6);
    auto brute = brute_idempotent_polymorphisms(A, 2);
    for (int x = 1; x <= n; ++x) {
      bool exists = false;
      for (const auto& v : brute) exists = exists || is_hubie(OpTable{2, n, v}, x);
      auto got = find_hubie_polymorphism(A, x, 2);
      CHECK(got.has_value() == exists);
      if (got) CHECK(is_hubie(*got, x));
    }
  }
}

TEST_CASE("subpower_membership examples") {
  Structure K = with_all_constants(k2());
  auto in = subpower_membership(K, {{1, 2}, {2, 1}}, {2, 1});
  CHECK(in.answer == Answer::Yes);
  REQUIRE(in.certificate);
  CHECK(in.certificate->f == OpTable::projection(2, 2, 2));
  CHECK(subpower_membership(K, {{1, 2}, {2, 1}}, {1, 1}).answer == Answer::No);
  auto gen = subpower_membership(K, {{1, 1}, {1, 2}, {2, 1}}, {2, 2});
  CHECK(gen.answer == Answer::Yes);
  REQUIRE(gen.certificate);
  CHECK(verify_certificate(K, *gen.certificate));

  Budget tiny;
  tiny.max_elements = 3;
  CHECK(subpower_membership(K, {{1, 1}, {1, 2}}, {2, 2}, tiny).answer == Answer::Unknown);
  CHECK_THROWS_AS(subpower_membership(K, {{1, 1, 1}}, {2, 2}), Error);
}

TEST_CASE("subpower_membership against table enumeration") {
  std::mt19937 rng(19);
  for (int trial = 0; trial < 80; ++trial) {
    int n = 2 + trial % 2, k = n == 2 ? 1 + static_cast<int>(rng() % 3) : 1 + static_cast<int>(rng() % 2);
    int m = 1 + static_cast<int>(rng() % 3);
    Structure A = with_all_constants(oracle::random_digraph(rng, n, 0.55));
    std::vector<Tuple> S(k, Tuple(m));
    for (auto& s : S)
      for (auto& v : s) v = 1 + static_cast<int>(rng() % n);
    Tuple t(m);
    for (auto& v : t) v = 1 + static_cast<int>(rng() % n);
    bool expect = false;
    for (const auto& vals : brute_idempotent_polymorphisms(A, k)) {
      Tuple img(m);
      for (int j = 0; j < m; ++j) {
        std::vector<int> col;
        for (int i = 0; i < k; ++i) col.push_back(S[i][j]);
        img[j] = oracle::op_value(vals, n, col);
      }
      if (img == t) expect = true;
    }
    auto r = subpower_membership(A, S, t);
    CHECK((r.answer == Answer::Yes) == expect);
    if (r.certificate) CHECK(verify_certificate(A, *r.certificate));
    if (expect) {
      // monotone in S
      std::vector<Tuple> more = S;
      more.push_back(Tuple(m, 1));
      CHECK(subpower_membership(A, more, t).answer == Answer::Yes);
    }
  }
}

TEST_CASE("generates_full_power") {
  Structure K = with_all_constants(k2());
  CHECK(generates_full_power(K, all_tuples(2, 2), 2).answer == Answer::Yes);
  CHECK(generates_full_power(with_all_constants(p011()), {{1, 1}, {3, 1}, {1, 3}}, 2).answer == Answer::Yes);
  auto r = generates_full_power(with_all_constants(p1001()), {{1, 1}, {1, 2}, {1, 3}, {1, 4}, {2, 1}, {3, 1}, {4, 1}}, 2);
  CHECK(r.answer == Answer::No);
  REQUIRE(r.counterexample);
  CHECK(*r.counterexample == Tuple{2, 2});
  auto two = generates_full_power(K, {{1, 2}, {2, 1}}, 2);
  CHECK(two.answer == Answer::No);
  CHECK(*two.counterexample == Tuple{1, 1});
}

TEST_CASE("min_generating_size") {
  for (int m = 1; m <= 3; ++m) CHECK(min_generating_size(loop1(), m, 4).size == 1);
  auto k = min_generating_size(with_all_constants(k2()), 2, 4);
  REQUIRE(k.size);
  CHECK(*k.size == 3);
  CHECK(k.witness == std::vector<Tuple>{{1, 1}, {1, 2}, {2, 1}});
  auto capped = min_generating_size(with_all_constants(k2()), 2, 2);
  CHECK_FALSE(capped.size);
}

TEST_CASE("polymorphisms preserve pp-definable relations") {
  std::mt19937 rng(23);
  for (int trial = 0; trial < 100; ++trial) {
    int n = 2 + trial % 3;
    Structure A = with_all_constants(oracle::random_digraph(rng, n, 0.5));
    auto polys = enumerate_polymorphisms(A, 2 + trial % 2, "", 50);
    if (polys.tables.empty()) continue;
    const OpTable& f = polys.tables[rng() % polys.tables.size()];
    // phi(x1,x2) = exists y: up to 3 random E-atoms over {x1,x2,y} and constants
    std::vector<std::string> vars{"x1", "x2", "y"};
    std::vector<Atom> atoms;
    int na = 1 + static_cast<int>(rng() % 3);
    for (int a = 0; a < na; ++a) {
      auto term = [&]() -> Term {
        if (rng() % 5 == 0) return {true, "c1"};
        return {false, vars[rng() % 3]};
      };
      atoms.push_back(Atom{"E", {term(), term()}});
    }
    Structure R = A;
    auto& rel = R.add_relation("R", 2);
    for (int x1 = 1; x1 <= n; ++x1)
      for (int x2 = 1; x2 <= n; ++x2)
        for (int y = 1; y <= n; ++y)
          if (oracle::atoms_hold(A, atoms, {{"x1", x1}, {"x2", x2}, {"y", y}})) {
            rel.add(std::vector<int>{x1, x2});
            break;
          }
    rel.normalize();
    CHECK(oracle::preserves(R, f.vals, f.k));
  }
}
