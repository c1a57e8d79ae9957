#include "qca/collapsibility.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <set>

namespace qca {

namespace {

// All k-subsets of {1..m} in lexicographic order.
std::vector<std::vector<int>> combinations(int m, int k) {
  std::vector<std::vector<int>> out;
  std::vector<int> c;
  std::function<void(int)> rec = [&](int start) {
    if (static_cast<int>(c.size()) == k) {
      out.push_back(c);
      return;
    }
    for (int v = start; v <= m; ++v) {
      c.push_back(v);
      rec(v + 1);
      c.pop_back();
    }
  };
  rec(1);
  return out;
}

std::vector<int> iota_vec(int n) {
  std::vector<int> v(n);
  for (int i = 0; i < n; ++i) v[i] = i + 1;
  return v;
}

// n^e with saturation.
std::size_t sat_pow(std::size_t n, std::size_t e) {
  std::size_t r = 1;
  for (std::size_t i = 0; i < e; ++i) {
    if (n != 0 && r > std::numeric_limits<std::size_t>::max() / n) return std::numeric_limits<std::size_t>::max();
    r *= n;
  }
  return r;
}

std::size_t sat_mul(std::size_t a, std::size_t b) {
  if (a != 0 && b > std::numeric_limits<std::size_t>::max() / a) return std::numeric_limits<std::size_t>::max();
  return a * b;
}

std::size_t sat_add(std::size_t a, std::size_t b) {
  return a > std::numeric_limits<std::size_t>::max() - b ? std::numeric_limits<std::size_t>::max() : a + b;
}

bool named_by_constant(const Structure& A, int x) {
  return std::any_of(A.constants.begin(), A.constants.end(), [x](const auto& c) { return c.second == x; });
}

// Element -> constant name (first name in map order).
std::map<int, std::string> constant_names(const Structure& A) {
  std::map<int, std::string> out;
  for (const auto& [c, e] : A.constants) out.emplace(e, c);
  return out;
}

// Canonical query of the product P with the given column elements as outermost universals.
PHSentence sentence_from_product(const Structure& P, const std::vector<std::string>& universals,
                                 const std::vector<int>& columns) {
  auto names = constant_names(P);
  auto term = [&](int e) {
    auto it = names.find(e);
    if (it != names.end()) return Term{true, it->second};
    return Term{false, "x" + std::to_string(e)};
  };
  PHSentence s;
  for (const auto& w : universals) s.prefix.emplace_back(Quant::Forall, w);
  for (int e = 1; e <= P.n; ++e)
    if (!names.count(e)) s.prefix.emplace_back(Quant::Exists, "x" + std::to_string(e));
  for (const auto& r : P.relations)
    for (std::size_t i = 0; i < r.size(); ++i) {
      Atom a{r.name, {}};
      for (int v : r.tuple(i)) a.args.push_back(term(v));
      s.atoms.push_back(std::move(a));
    }
  for (std::size_t j = 0; j < universals.size(); ++j)
    s.atoms.push_back(Atom{"=", {Term{false, universals[j]}, term(columns[j])}});
  return s;
}

void check_columns_distinct(const std::vector<Tuple>& columns) {
  std::set<Tuple> seen;
  for (const auto& c : columns)
    if (!seen.insert(c).second) throw Error("invalid_argument", "degenerate adversary set: constants coincide");
}

Structure product_of(const Structure& A, std::size_t factors, const Budget& budget) {
  std::size_t elems = sat_pow(A.n, factors);
  if (elems > budget.max_elements) throw BudgetExceeded("elements", budget.max_elements, elems);
  return power(A, static_cast<int>(factors), budget);
}

std::size_t surjections(int n, int k) {
  // inclusion-exclusion: sum (-1)^i C(k,i) (k-i)^n
  long double total = 0;
  long double binom = 1;
  for (int i = 0; i <= k; ++i) {
    long double term = binom * std::pow(static_cast<long double>(k - i), n);
    total += (i % 2 == 0) ? term : -term;
    binom = binom * (k - i) / (i + 1);
  }
  return static_cast<std::size_t>(std::llround(total));
}

// Column image sets (bitmasks) of consistent maps; calls cb for each valid choice.
void for_each_column_sets(const Adversary& O, int n, const std::function<void(const std::vector<int>&)>& cb) {
  int m = O.m;
  std::vector<std::set<Tuple>> prefixes(m + 1);
  for (const auto& t : O.tuples)
    for (int l = 0; l <= m; ++l) prefixes[l].insert(Tuple(t.begin(), t.begin() + l));
  std::vector<int> masks;
  std::vector<Tuple> partial{{}};
  std::function<void(int, const std::vector<Tuple>&)> rec = [&](int j, const std::vector<Tuple>& cur) {
    if (j == m) {
      cb(masks);
      return;
    }
    for (int mask = 1; mask < (1 << n); ++mask) {
      std::vector<Tuple> nxt;
      bool ok = true;
      for (const auto& t : cur) {
        for (int v = 1; v <= n && ok; ++v) {
          if (!(mask >> (v - 1) & 1)) continue;
          Tuple u = t;
          u.push_back(v);
          if (!prefixes[j + 1].count(u)) ok = false;
          nxt.push_back(std::move(u));
        }
        if (!ok) break;
      }
      if (!ok) continue;
      masks.push_back(mask);
      rec(j + 1, nxt);
      masks.pop_back();
    }
  };
  rec(0, partial);
}

std::vector<int> mask_elements(int mask, int n) {
  std::vector<int> out;
  for (int v = 1; v <= n; ++v)
    if (mask >> (v - 1) & 1) out.push_back(v);
  return out;
}

// Maps [n] -> S hitting every element of S, in lexicographic order.
std::vector<std::vector<int>> surjective_columns(int n, const std::vector<int>& S) {
  std::vector<std::vector<int>> out;
  std::vector<int> col(n);
  std::function<void(int)> rec = [&](int i) {
    if (i == n) {
      std::set<int> img(col.begin(), col.end());
      if (img.size() == S.size()) out.push_back(col);
      return;
    }
    for (int v : S) {
      col[i] = v;
      rec(i + 1);
    }
  };
  rec(0);
  return out;
}

std::string tuple_str(const Tuple& t) {
  std::string s = "(";
  for (std::size_t i = 0; i < t.size(); ++i) s += (i ? "," : "") + std::to_string(t[i]);
  return s + ")";
}

}  // namespace

AdversarySet upsilon(int n, int m, int p, const std::vector<int>& B) {
  if (n < 1 || m < 1 || p < 0) throw Error("invalid_argument", "upsilon needs n >= 1, m >= 1, p >= 0");
  if (B.empty()) throw Error("invalid_argument", "upsilon needs a nonempty source set");
  for (int x : B)
    if (x < 1 || x > n) throw Error("invalid_argument", "source element out of range");
  if (p >= m) return full_adversary(n, m);
  std::vector<int> all = iota_vec(n);
  std::vector<int> src = B;
  std::sort(src.begin(), src.end());
  src.erase(std::unique(src.begin(), src.end()), src.end());
  AdversarySet out{m, {}};
  for (int x : src)
    for (const auto& S : combinations(m, p)) {
      std::vector<std::vector<int>> factors(m, std::vector<int>{x});
      for (int i : S) factors[i - 1] = all;
      out.adversaries.push_back(Adversary::rectangular(factors));
    }
  return out;
}

AdversarySet sigma(int n, int m, int p) {
  if (n < 1 || m < 1 || p < 0) throw Error("invalid_argument", "sigma needs n >= 1, m >= 1, p >= 0");
  if (p >= m - 1) return full_adversary(n, m);
  AdversarySet out{m, {}};
  for (const auto& cuts : combinations(m - 1, p)) {
    // segment index of every coordinate
    std::vector<int> seg(m);
    for (int i = 1, s = 0; i <= m; ++i) {
      seg[i - 1] = s;
      if (s < p && i == cuts[s]) ++s;
    }
    std::vector<Tuple> tuples;
    for (const auto& vals : all_tuples(n, p + 1)) {
      Tuple t(m);
      for (int i = 0; i < m; ++i) t[i] = vals[seg[i]];
      tuples.push_back(t);
    }
    out.adversaries.push_back(Adversary::from_tuples(m, std::move(tuples)));
  }
  return out;
}

std::string to_string(FamilyKind k) {
  switch (k) {
    case FamilyKind::Upsilon: return "upsilon";
    case FamilyKind::Sigma: return "sigma";
    case FamilyKind::Full: return "full";
    case FamilyKind::Custom: return "custom";
  }
  return "?";
}

AdversaryFamily AdversaryFamily::make_upsilon(int p, std::vector<int> B) {
  if (p < 0 || B.empty()) throw Error("invalid_argument", "upsilon needs p >= 0 and a nonempty source set");
  AdversaryFamily f;
  f.kind = FamilyKind::Upsilon;
  f.p = p;
  f.B = std::move(B);
  f.width_bound = "|B|*C(m," + std::to_string(p) + ")*n^" + std::to_string(p);
  return f;
}

AdversaryFamily AdversaryFamily::make_sigma(int p) {
  if (p < 0) throw Error("invalid_argument", "sigma needs p >= 0");
  AdversaryFamily f;
  f.kind = FamilyKind::Sigma;
  f.p = p;
  f.width_bound = "C(m-1," + std::to_string(p) + ")*n^" + std::to_string(p + 1);
  return f;
}

AdversaryFamily AdversaryFamily::make_full() {
  AdversaryFamily f;
  f.kind = FamilyKind::Full;
  f.width_bound = "n^m";
  f.effective = false;
  return f;
}

AdversaryFamily AdversaryFamily::make_custom(std::function<AdversarySet(int, int)> gen) {
  AdversaryFamily f;
  f.kind = FamilyKind::Custom;
  f.generator = std::move(gen);
  f.width_bound = "unknown";
  f.effective = false;
  return f;
}

AdversarySet AdversaryFamily::emit(int n, int m) const {
  switch (kind) {
    case FamilyKind::Upsilon: return upsilon(n, m, p, B);
    case FamilyKind::Sigma: return sigma(n, m, p);
    case FamilyKind::Full: return full_adversary(n, m);
    case FamilyKind::Custom: {
      if (!generator) throw Error("invalid_argument", "custom family without generator");
      AdversarySet s = generator(n, m);
      if (s.m != m) throw Error("length_mismatch", "custom family emitted the wrong length");
      return s;
    }
  }
  throw Error("internal", "unknown family kind");
}

bool is_degenerate(const AdversarySet& omega) {
  if (omega.width() == 0) return true;
  std::vector<Tuple> columns(omega.m);
  for (const auto& O : omega.adversaries)
    for (const auto& t : O.tuples)
      for (int j = 0; j < omega.m; ++j) columns[j].push_back(t[j]);
  std::set<Tuple> seen(columns.begin(), columns.end());
  return seen.size() != columns.size();
}

ProjectivityResult check_projectivity(const AdversaryFamily& family, int n, int m) {
  AdversarySet big = family.emit(n, n * m);
  AdversarySet small = family.emit(n, m);
  ProjectivityResult r;
  for (const auto& B : big.adversaries) {
    // union of all block projections; each must be dominated by one adversary, so the union must be
    std::set<Tuple> proj;
    for (const auto& choice : all_tuples(n, m))
      for (const auto& t : B.tuples) {
        Tuple u(m);
        for (int b = 0; b < m; ++b) u[b] = t[b * n + choice[b] - 1];
        proj.insert(u);
      }
    bool dominated = std::any_of(small.adversaries.begin(), small.adversaries.end(), [&](const Adversary& A) {
      return std::all_of(proj.begin(), proj.end(), [&](const Tuple& u) { return A.contains(u); });
    });
    if (!dominated) {
      r.projective = false;
      r.failing = B;
      return r;
    }
  }
  return r;
}

PHSentence canonical_pi2(const AdversarySet& omega, const Structure& A, const Budget& budget) {
  if (is_degenerate(omega)) throw Error("invalid_argument", "degenerate adversary set has no canonical sentence");
  for (const auto& t : omega.union_tuples())
    for (int v : t)
      if (v < 1 || v > A.n) throw Error("invalid_argument", "adversary element out of range");
  std::vector<Tuple> columns(omega.m);
  for (const auto& O : omega.adversaries)
    for (const auto& t : O.tuples)
      for (int j = 0; j < omega.m; ++j) columns[j].push_back(t[j]);
  Structure P = product_of(A, omega.width(), budget);
  std::vector<std::string> ws;
  std::vector<int> cols;
  for (int j = 0; j < omega.m; ++j) {
    ws.push_back("w" + std::to_string(j + 1));
    cols.push_back(P.element_index(columns[j]));
  }
  return sentence_from_product(P, ws, cols);
}

std::size_t consistent_map_count(const Adversary& O, int n) {
  std::size_t total = 0;
  for_each_column_sets(O, n, [&](const std::vector<int>& masks) {
    std::size_t c = 1;
    for (int mask : masks) c = sat_mul(c, surjections(n, __builtin_popcount(mask)));
    total = sat_add(total, c);
  });
  return total;
}

std::size_t unbounded_factor_count(const AdversarySet& omega, int n) {
  std::size_t total = 0;
  for (const auto& O : omega.adversaries) total = sat_add(total, consistent_map_count(O, n));
  return total;
}

PHSentence canonical_unbounded(int n, const AdversarySet& omega, const Structure& A, const Budget& budget) {
  if (n != A.n) throw Error("invalid_argument", "n must be the domain size of A");
  if (is_degenerate(omega)) throw Error("invalid_argument", "degenerate adversary set has no canonical sentence");
  int m = omega.m;
  std::size_t F = unbounded_factor_count(omega, n);
  std::size_t elems = sat_pow(n, F);
  if (elems > budget.max_elements)
    throw BudgetExceeded("elements (" + std::to_string(F) + " factors)", budget.max_elements, elems);

  // columns[(i-1)*m + (j-1)] collects mu(i,j) over all factors
  std::vector<Tuple> columns(static_cast<std::size_t>(n) * m);
  for (const auto& O : omega.adversaries)
    for_each_column_sets(O, n, [&](const std::vector<int>& masks) {
      std::vector<std::vector<std::vector<int>>> choices;
      for (int mask : masks) choices.push_back(surjective_columns(n, mask_elements(mask, n)));
      std::vector<std::size_t> idx(m, 0);
      for (;;) {
        for (int j = 0; j < m; ++j)
          for (int i = 0; i < n; ++i) columns[static_cast<std::size_t>(i) * m + j].push_back(choices[j][idx[j]][i]);
        int j = m - 1;
        while (j >= 0 && ++idx[j] == choices[j].size()) idx[j--] = 0;
        if (j < 0) break;
      }
    });
  check_columns_distinct(columns);
  Structure P = product_of(A, F, budget);
  std::vector<std::string> ws;
  std::vector<int> cols;
  for (int i = 1; i <= n; ++i)
    for (int j = 1; j <= m; ++j) {
      ws.push_back("w" + std::to_string(i) + "_" + std::to_string(j));
      cols.push_back(P.element_index(columns[static_cast<std::size_t>(i - 1) * m + (j - 1)]));
    }
  return sentence_from_product(P, ws, cols);
}

int CompositionTerm::evaluate(const OpTable& f, const std::vector<int>& inputs) const {
  if (leaf >= 0) return inputs.at(leaf);
  std::vector<int> vals;
  vals.reserve(args.size());
  for (const auto& a : args) vals.push_back(a.evaluate(f, inputs));
  return f(std::span<const int>(vals));
}

int CompositionTerm::size() const {
  int s = 1;
  for (const auto& a : args) s += a.size();
  return s;
}

ReactiveCheck verify_reactive_composition(const Structure& A, const ReactiveWitness& w, const Adversary& target,
                                          const AdversarySet& omega) {
  ReactiveCheck r;
  auto fail = [&](std::string why) {
    r.ok = false;
    r.reason = std::move(why);
    return r;
  };
  int m = target.m, n = A.n;
  if (w.f.n != n) return fail("operation domain differs from the structure");
  if (omega.m != m) return fail("adversary lengths differ");
  if (auto v = polymorphism_violation(w.f, A)) return fail("not a polymorphism: " + *v);
  std::function<bool(const CompositionTerm&)> shape_ok = [&](const CompositionTerm& t) {
    if (t.leaf >= 0) return t.leaf < w.leaves && t.args.empty();
    if (static_cast<int>(t.args.size()) != w.f.k) return false;
    return std::all_of(t.args.begin(), t.args.end(), shape_ok);
  };
  if (!shape_ok(w.term)) return fail("composition term has the wrong shape");
  if (static_cast<int>(w.leaf_adversary.size()) != w.leaves) return fail("leaf adversary list has the wrong size");
  for (int j : w.leaf_adversary)
    if (j < 0 || j >= static_cast<int>(omega.adversaries.size())) return fail("leaf adversary index out of range");
  bool full = !w.g_full.empty();
  if (full ? static_cast<int>(w.g_full.size()) != w.leaves : static_cast<int>(w.g_last.size()) != w.leaves)
    return fail("g maps have the wrong number of leaves");
  for (int j = 0; j < w.leaves; ++j)
    if (full ? static_cast<int>(w.g_full[j].size()) != m : static_cast<int>(w.g_last[j].size()) != m)
      return fail("g maps have the wrong length");

  for (const auto& a : target.tuples) {
    std::vector<Tuple> traces(w.leaves, Tuple(m));
    for (int j = 0; j < w.leaves; ++j) {
      for (int i = 0; i < m; ++i) {
        int v = 0;
        if (full) {
          auto it = w.g_full[j][i].find(Tuple(a.begin(), a.begin() + i + 1));
          if (it != w.g_full[j][i].end()) v = it->second;
        } else if (static_cast<int>(w.g_last[j][i].size()) == n) {
          v = w.g_last[j][i][a[i] - 1];
        }
        if (v < 1 || v > n)
          return fail("g^" + std::to_string(j + 1) + "_" + std::to_string(i + 1) + " undefined at " + tuple_str(a));
        traces[j][i] = v;
      }
      if (!omega.adversaries[w.leaf_adversary[j]].contains(traces[j]))
        return fail("trace " + std::to_string(j + 1) + " of " + tuple_str(a) + " is " + tuple_str(traces[j]) +
                    ", outside its adversary");
    }
    for (int i = 0; i < m; ++i) {
      std::vector<int> in(w.leaves);
      for (int j = 0; j < w.leaves; ++j) in[j] = traces[j][i];
      if (w.term.evaluate(w.f, in) != a[i])
        return fail("reconstruction fails at coordinate " + std::to_string(i + 1) + " of " + tuple_str(a));
    }
  }
  return r;
}

ReactiveWitness chen_witness(const OpTable& f, int x, int m) {
  int k = f.k, n = f.n, p = k - 1;
  if (x < 1 || x > n) throw Error("invalid_argument", "source out of range");
  if (m < 1) throw Error("invalid_argument", "m must be positive");
  if (f(std::vector<int>(k, x)) != x) throw Error("invalid_argument", "operation does not fix the source");
  // pre[pos][a-1]: first argument tuple with x at pos and value a
  std::vector<std::vector<Tuple>> pre(k, std::vector<Tuple>(n));
  for (const auto& args : all_tuples(n, k)) {
    int v = f(args);
    for (int pos = 0; pos < k; ++pos)
      if (args[pos] == x && pre[pos][v - 1].empty()) pre[pos][v - 1] = args;
  }
  for (int pos = 0; pos < k; ++pos)
    for (int a = 1; a <= n; ++a)
      if (pre[pos][a - 1].empty()) throw Error("invalid_argument", "operation is not Hubie at the source");

  ReactiveWitness w;
  w.f = f;
  std::vector<std::vector<int>> subsets = p >= m ? std::vector<std::vector<int>>{} : combinations(m, p);

  // pos_of per node on the current path (-1 for coordinates that are already x)
  std::vector<std::pair<std::vector<int>, int>> path;  // (pos_of, child index taken)
  std::function<CompositionTerm(const std::vector<int>&)> build = [&](const std::vector<int>& F) {
    if (static_cast<int>(F.size()) <= p) {
      int leaf = w.leaves++;
      std::vector<std::vector<int>> g(m, std::vector<int>(n, 0));
      for (int i = 0; i < m; ++i)
        for (int a = 1; a <= n; ++a) {
          int v = a;
          for (const auto& [pos_of, child] : path) {
            int pos = pos_of[i];
            v = pos < 0 ? (v == x ? x : 0) : pre[pos][v - 1][child];
            if (v == 0) break;
          }
          g[i][a - 1] = v;
        }
      w.g_last.push_back(std::move(g));
      int adv = 0;
      if (p < m) {
        auto it = std::find_if(subsets.begin(), subsets.end(), [&](const std::vector<int>& S) {
          return std::includes(S.begin(), S.end(), F.begin(), F.end());
        });
        adv = static_cast<int>(it - subsets.begin());
      }
      w.leaf_adversary.push_back(adv);
      return CompositionTerm::variable(leaf);
    }
    int r = static_cast<int>(F.size());
    std::vector<int> pos_of(m, -1);
    std::vector<std::vector<int>> parts(k);
    for (int j = 0, idx = 0; j < k; ++j) {
      int size = r / k + (j < r % k ? 1 : 0);
      for (int s = 0; s < size; ++s, ++idx) {
        parts[j].push_back(F[idx]);
        pos_of[F[idx] - 1] = j;
      }
    }
    CompositionTerm node;
    for (int j = 0; j < k; ++j) {
      std::vector<int> child;
      std::set_difference(F.begin(), F.end(), parts[j].begin(), parts[j].end(), std::back_inserter(child));
      path.emplace_back(pos_of, j);
      node.args.push_back(build(child));
      path.pop_back();
    }
    return node;
  };
  w.term = build(iota_vec(m));
  return w;
}

CollapsibilityVerdict decide_collapsible_singleton(const Structure& A, int x, int p, const CollapseBudgets& budgets) {
  if (!named_by_constant(A, x)) throw Error("invalid_argument", "source element must be named by a constant");
  if (p < 1) throw Error("invalid_argument", "p must be at least 1 (use decide_zero_collapsible for p = 0)");
  const Budget& budget = budgets.budget;
  CollapsibilityVerdict v;
  std::vector<std::string> notes;
  auto note = [&](const std::string& s) { notes.push_back(s); };
  auto finish = [&]() {
    for (std::size_t i = 0; i < notes.size(); ++i) v.note += (i ? "; " : "") + notes[i];
    return v;
  };

  // (a) sufficient conditions from single polymorphisms
  for (int k = 2; k <= std::min(budgets.max_arity, p + 1); ++k) {
    try {
      if (auto f = find_hubie_polymorphism(A, x, k, budget)) {
        v.answer = Answer::Yes;
        v.method = "hubie";
        v.certificate = *f;
        return finish();
      }
    } catch (const BudgetExceeded& e) {
      note("hubie arity " + std::to_string(k) + ": " + e.what());
    }
  }
  if (budgets.max_arity >= 3) {
    try {
      auto r = enumerate_polymorphisms(A, 3, "maltsev", 1, budget);
      if (!r.tables.empty()) {
        v.answer = Answer::Yes;
        v.method = "maltsev";
        v.certificate = r.tables[0];
        return finish();
      }
    } catch (const BudgetExceeded& e) {
      note(std::string("maltsev: ") + e.what());
    }
  }
  for (int k = 3; k <= std::min(budgets.max_arity, p + 1); ++k) {
    try {
      auto r = enumerate_polymorphisms(A, k, k == 3 ? "majority" : "near_unanimity", 1, budget);
      if (!r.tables.empty()) {
        v.answer = Answer::Yes;
        v.method = "near_unanimity";
        v.certificate = r.tables[0];
        return finish();
      }
    } catch (const BudgetExceeded& e) {
      note("near unanimity arity " + std::to_string(k) + ": " + e.what());
    }
  }

  // (b) refutation: Upsilon(m,p,x) fails to generate A^m
  for (int m = p + 1; m <= budgets.max_m; ++m) {
    std::vector<Tuple> gens = upsilon(A.n, m, p, {x}).union_tuples();
    GenerationResult g = generates_full_power(A, gens, m, budget);
    if (g.answer == Answer::No && g.counterexample) {
      v.answer = Answer::No;
      v.method = "generation";
      v.m = m;
      v.counterexample = *g.counterexample;
      return finish();
    }
    if (g.answer == Answer::Unknown) note("generation m=" + std::to_string(m) + ": " + g.note);
  }

  // (c) exact: the canonical sentence for Upsilon(p+1,p,x)
  try {
    PHSentence phi = canonical_unbounded(A.n, upsilon(A.n, p + 1, p, {x}), A, budget);
    bool holds = solve_qcsp(A, phi, budget);
    v.answer = holds ? Answer::Yes : Answer::No;
    v.method = "canonical";
    v.m = p + 1;
    return finish();
  } catch (const BudgetExceeded& e) {
    note(std::string("canonical sentence: ") + e.what());
  }
  v.answer = Answer::Unknown;
  return finish();
}

bool verify_collapsibility_verdict(const Structure& A, int x, int p, const CollapsibilityVerdict& v,
                                   const Budget& budget) {
  if (v.answer == Answer::Unknown) return true;
  if (v.method == "canonical") {
    PHSentence phi = canonical_unbounded(A.n, upsilon(A.n, p + 1, p, {x}), A, budget);
    return solve_qcsp(A, phi, budget) == (v.answer == Answer::Yes);
  }
  if (v.answer == Answer::Yes) {
    if (!v.certificate || !is_polymorphism(*v.certificate, A)) return false;
    const OpTable& f = *v.certificate;
    if (v.method == "hubie") return f.k - 1 <= p && is_idempotent(f) && is_hubie(f, x);
    if (v.method == "maltsev") return p >= 1 && has_tag(f, "maltsev");
    if (v.method == "near_unanimity")
      return f.k - 1 <= p && (has_tag(f, "near_unanimity(" + std::to_string(f.k) + ")") || has_tag(f, "majority"));
    return false;
  }
  if (v.method != "generation" || static_cast<int>(v.counterexample.size()) != v.m) return false;
  std::vector<Tuple> gens = upsilon(A.n, v.m, p, {x}).union_tuples();
  return subpower_membership(A, gens, v.counterexample, budget).answer == Answer::No;
}

void recompute_shop_flags(Shop& s) {
  int n = static_cast<int>(s.images.size());
  s.is_A_shop = false;
  s.is_simple = false;
  s.source = 0;
  for (int a = 1; a <= n; ++a)
    if (static_cast<int>(s.images[a - 1].size()) == n) {
      s.is_A_shop = true;
      s.source = a;
      break;
    }
  if (s.is_A_shop) {
    s.is_simple = true;
    for (int a = 1; a <= n; ++a)
      if (a != s.source && s.images[a - 1].size() != 1) s.is_simple = false;
  }
}

bool is_she(const Structure& A, const Shop& s) {
  int n = A.n;
  if (static_cast<int>(s.images.size()) != n) return false;
  std::vector<bool> hit(n + 1, false);
  for (const auto& img : s.images) {
    if (img.empty()) return false;
    for (int v : img) {
      if (v < 1 || v > n) return false;
      hit[v] = true;
    }
  }
  for (int v = 1; v <= n; ++v)
    if (!hit[v]) return false;
  for (const auto& R : A.relations)
    for (std::size_t i = 0; i < R.size(); ++i) {
      auto t = R.tuple(i);
      std::vector<Tuple> combos{{}};
      for (int a : t) {
        std::vector<Tuple> nxt;
        for (const auto& c : combos)
          for (int b : s.images[a - 1]) {
            Tuple u = c;
            u.push_back(b);
            nxt.push_back(std::move(u));
          }
        combos = std::move(nxt);
      }
      for (const auto& c : combos)
        if (!R.contains(c)) return false;
    }
  return true;
}

std::optional<Shop> decide_zero_collapsible(const Structure& A, std::optional<int> source) {
  int n = A.n;
  if (source && (*source < 1 || *source > n)) throw Error("invalid_argument", "source out of range");
  std::vector<int> sources;
  if (source)
    sources.push_back(*source);
  else
    sources = iota_vec(n);
  for (int x : sources)
    for (const auto& vals : all_tuples(n, n - 1)) {
      Shop s;
      s.images.resize(n);
      for (int a = 1, idx = 0; a <= n; ++a) {
        if (a == x)
          s.images[a - 1] = iota_vec(n);
        else
          s.images[a - 1] = {vals[idx++]};
      }
      if (is_she(A, s)) {
        recompute_shop_flags(s);
        s.source = x;
        return s;
      }
    }
  return std::nullopt;
}

std::pair<Structure, int> rainbow_lift(const Structure& A, std::vector<int> C) {
  if (C.empty()) throw Error("invalid_argument", "rainbow lift needs a nonempty set");
  std::sort(C.begin(), C.end());
  C.erase(std::unique(C.begin(), C.end()), C.end());
  for (int c : C)
    if (c < 1 || c > A.n) throw Error("invalid_argument", "element out of range");
  if (C.size() == 1) return {A, C[0]};
  Structure P = power(A, static_cast<int>(C.size()));
  return {P, P.element_index(C)};
}

ProbeReport probe_collapsibility_logical(const Structure& A, int p, const std::vector<int>& B,
                                         const std::vector<PHSentence>& sample, const Budget& budget) {
  ProbeReport r;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const PHSentence& phi = sample[i];
    int m = phi.num_universals();
    bool full = solve_qcsp(A, phi, budget);
    bool restricted = m == 0 ? full : models_restricted(A, phi, upsilon(A.n, m, p, B), budget);
    ++r.sentences;
    if (full == restricted)
      ++r.agreements;
    else
      r.discrepancies.push_back({i, full, restricted});
  }
  return r;
}

std::vector<PHSentence> enumerate_sentences(const Signature& sig, int max_universals, int max_existentials,
                                            int max_atoms) {
  std::vector<PHSentence> out;
  for (int u = 0; u <= max_universals; ++u)
    for (int e = 0; e <= max_existentials; ++e) {
      if (u + e == 0) continue;
      std::vector<std::string> us, es;
      for (int i = 1; i <= u; ++i) us.push_back("x" + std::to_string(i));
      for (int i = 1; i <= e; ++i) es.push_back("y" + std::to_string(i));
      std::vector<std::string> vars = us;
      vars.insert(vars.end(), es.begin(), es.end());
      // candidate atoms
      std::vector<Atom> atoms;
      for (const auto& [name, arity] : sig.relations)
        for (const auto& idx : all_tuples(u + e, arity)) {
          Atom a{name, {}};
          for (int v : idx) a.args.push_back(Term{false, vars[v - 1]});
          atoms.push_back(std::move(a));
        }
      int V = static_cast<int>(atoms.size());
      std::vector<std::vector<int>> atom_sets;
      for (int c = 1; c <= std::min(max_atoms, V); ++c)
        for (const auto& S : combinations(V, c)) atom_sets.push_back(S);
      // interleavings: positions of universals in the prefix
      for (const auto& upos : combinations(u + e, u)) {
        std::vector<std::pair<Quant, std::string>> prefix;
        for (int pos = 1, ui = 0, ei = 0; pos <= u + e; ++pos) {
          if (ui < u && upos[ui] == pos)
            prefix.emplace_back(Quant::Forall, us[ui++]);
          else
            prefix.emplace_back(Quant::Exists, es[ei++]);
        }
        for (const auto& S : atom_sets) {
          PHSentence s;
          s.prefix = prefix;
          for (int i : S) s.atoms.push_back(atoms[i - 1]);
          out.push_back(std::move(s));
        }
      }
    }
  return out;
}

PHSentence random_sentence(std::mt19937_64& rng, const Signature& sig, int max_universals, int max_existentials,
                           int max_atoms, bool with_constants, int n) {
  if (sig.relations.empty()) throw Error("invalid_argument", "signature has no relations");
  auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  int u = pick(0, max_universals), e = pick(1, std::max(1, max_existentials));
  PHSentence s;
  std::vector<std::string> vars;
  int ui = 0, ei = 0;
  while (ui < u || ei < e) {
    bool take_u = ei == e || (ui < u && pick(0, 1) == 0);
    std::string v = take_u ? "x" + std::to_string(++ui) : "y" + std::to_string(++ei);
    s.prefix.emplace_back(take_u ? Quant::Forall : Quant::Exists, v);
    vars.push_back(v);
  }
  int na = pick(1, max_atoms);
  for (int i = 0; i < na; ++i) {
    const auto& [name, arity] = sig.relations[pick(0, static_cast<int>(sig.relations.size()) - 1)];
    Atom a{name, {}};
    for (int j = 0; j < arity; ++j) {
      if (with_constants && n > 0 && pick(0, 4) == 0)
        a.args.push_back(Term{true, constant_name(pick(1, n))});
      else
        a.args.push_back(Term{false, vars[pick(0, static_cast<int>(vars.size()) - 1)]});
    }
    s.atoms.push_back(std::move(a));
  }
  return s;
}

}  // namespace qca
