#include "qca/semicomplete.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>

namespace qca {

namespace {

using Adj = std::vector<std::vector<bool>>;

const Relation& edge_relation(const Structure& G) {
  if (G.relations.size() != 1 || G.relations[0].arity != 2)
    throw Error("signature_mismatch", "expected a digraph with a single binary relation");
  return G.relations[0];
}

Adj adjacency(const Structure& G) {
  const Relation& E = edge_relation(G);
  Adj a(G.n, std::vector<bool>(G.n, false));
  for (std::size_t i = 0; i < E.size(); ++i) {
    auto t = E.tuple(i);
    a[t[0] - 1][t[1] - 1] = true;
  }
  return a;
}

bool semicomplete_adj(const Adj& a) {
  int n = static_cast<int>(a.size());
  for (int x = 0; x < n; ++x) {
    if (a[x][x]) return false;
    for (int y = x + 1; y < n; ++y)
      if (!a[x][y] && !a[y][x]) return false;
  }
  return true;
}

// Sinks of the subgraph induced on alive (1-based output).
std::vector<int> sinks_within(const Adj& a, const std::vector<bool>& alive) {
  std::vector<int> out;
  int n = static_cast<int>(a.size());
  for (int x = 0; x < n; ++x) {
    if (!alive[x]) continue;
    bool sink = true;
    for (int y = 0; y < n && sink; ++y)
      if (alive[y] && y != x && a[x][y]) sink = false;
    if (sink) out.push_back(x + 1);
  }
  return out;
}

Adj transpose(const Adj& a) {
  int n = static_cast<int>(a.size());
  Adj t(n, std::vector<bool>(n));
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y) t[y][x] = a[x][y];
  return t;
}

// Repeatedly removes the sinks of the remaining subgraph; returns removed vertices in order.
std::vector<int> strip_sinks(const Adj& a, std::vector<bool>& alive) {
  std::vector<int> removed;
  for (auto s = sinks_within(a, alive); !s.empty(); s = sinks_within(a, alive))
    for (int v : s) {
      removed.push_back(v);
      alive[v - 1] = false;
    }
  return removed;
}

std::vector<int> in_set(const Adj& a, int v) {
  std::vector<int> out;
  for (int u = 0; u < static_cast<int>(a.size()); ++u)
    if (a[u][v - 1]) out.push_back(u + 1);
  return out;
}

std::vector<int> minus(const std::vector<int>& x, const std::vector<int>& y) {
  std::vector<int> out;
  std::set_difference(x.begin(), x.end(), y.begin(), y.end(), std::back_inserter(out));
  return out;
}

}  // namespace

int count_cycles(const Structure& G, int cap) {
  Adj a = adjacency(G);
  int n = G.n;
  int count = 0;
  std::vector<bool> on_path(n, false);
  // Each simple cycle is counted once, rooted at its smallest vertex.
  std::function<void(int, int)> dfs = [&](int root, int v) {
    for (int w = root; w < n && count < cap; ++w) {
      if (!a[v][w]) continue;
      if (w == root) {
        ++count;
      } else if (!on_path[w]) {
        on_path[w] = true;
        dfs(root, w);
        on_path[w] = false;
      }
    }
  };
  for (int r = 0; r < n && count < cap; ++r) {
    on_path[r] = true;
    dfs(r, r);
    on_path[r] = false;
  }
  return count;
}

SemicompleteAnalysis analyze_semicomplete(const Structure& G) {
  Adj a = adjacency(G);
  SemicompleteAnalysis r;
  r.is_semicomplete = semicomplete_adj(a);
  r.is_tournament = r.is_semicomplete;
  for (int x = 0; x < G.n; ++x)
    for (int y = x + 1; y < G.n; ++y)
      if (a[x][y] && a[y][x]) r.is_tournament = false;
  std::vector<bool> all(G.n, true);
  r.sinks = sinks_within(a, all);
  r.sources = sinks_within(transpose(a), all);
  r.is_smooth = r.sinks.empty() && r.sources.empty();
  r.cycle_census = count_cycles(G, 2);
  std::vector<bool> alive(G.n, true);
  strip_sinks(a, alive);
  for (int v = 0; v < G.n; ++v)
    if (alive[v]) r.smooth_part.push_back(v + 1);
  return r;
}

Structure add_sink(const Structure& G) {
  edge_relation(G);
  std::vector<std::pair<int, int>> edges;
  for (const auto& t : G.relations[0].tuples()) edges.emplace_back(t[0], t[1]);
  for (int v = 1; v <= G.n; ++v) edges.emplace_back(v, G.n + 1);
  return make_digraph(G.n + 1, edges);
}

std::string OrderPartition::part_of(int v) const {
  auto has = [v](const std::vector<int>& s) { return std::find(s.begin(), s.end(), v) != s.end(); };
  if (has(v_min)) return "min";
  if (has(v_max)) return "max";
  if (has(v_both)) return "both";
  return "none";
}

OrderPartition order_partition(const Structure& G) {
  Adj a = adjacency(G);
  int n = G.n;
  OrderPartition op;
  op.leq.assign(n, std::vector<bool>(n, true));
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y)
      for (int u = 0; u < n; ++u)
        if (a[u][x] && !a[u][y]) {
          op.leq[x][y] = false;
          break;
        }
  for (int x = 0; x < n; ++x) {
    bool minimal = true, maximal = true;
    for (int y = 0; y < n; ++y) {
      if (y == x) continue;
      if (op.leq[y][x]) minimal = false;
      if (op.leq[x][y]) maximal = false;
    }
    if (minimal && maximal) op.v_both.push_back(x + 1);
    else if (minimal) op.v_min.push_back(x + 1);
    else if (maximal) op.v_max.push_back(x + 1);
    else op.v_none.push_back(x + 1);
  }
  return op;
}

Structure s_of_g(const Structure& G) {
  Adj a = adjacency(G);
  if (!semicomplete_adj(a)) throw Error("invalid_argument", "S(G) needs a semicomplete digraph");
  OrderPartition op = order_partition(G);
  std::vector<std::string> part(G.n + 1);
  for (int v = 1; v <= G.n; ++v) part[v] = op.part_of(v);
  auto top = [](const std::string& p) { return p == "max" || p == "both"; };
  // one-way rules between distinct parts
  auto one_way = [](const std::string& from, const std::string& to) {
    if (from == "min") return to == "none" || to == "max";
    if (from == "none") return to == "max";
    if (from == "both") return to == "none" || to == "min";
    return false;
  };
  std::vector<std::pair<int, int>> edges;
  for (int x = 1; x <= G.n; ++x)
    for (int y = 1; y <= G.n; ++y) {
      if (x == y) continue;
      const std::string &px = part[x], &py = part[y];
      bool e;
      if (top(px) && top(py)) e = true;
      else if (px == "min" && py == "min") e = true;
      else if (px == "none" && py == "none") e = a[x - 1][y - 1];
      else e = one_way(px, py);
      if (e) edges.emplace_back(x, y);
    }
  return make_digraph(G.n, edges);
}

std::optional<NoviSad> novi_sad(const Structure& G) {
  Adj a = adjacency(G);
  int n = G.n;
  for (int p = 1; p <= n; ++p)
    for (int q = p + 1; q <= n; ++q) {
      bool covers = true;
      for (int v = 0; v < n && covers; ++v)
        if (!a[v][p - 1] && !a[v][q - 1]) covers = false;
      if (!covers) continue;
      auto pick = [&](int to, int avoid, int preferred) -> int {
        auto ok = [&](int v) { return a[v - 1][to - 1] && !a[v - 1][avoid - 1]; };
        if (ok(preferred)) return preferred;
        for (int v = 1; v <= n; ++v)
          if (ok(v)) return v;
        return 0;
      };
      int pp = pick(p, q, q), qp = pick(q, p, p);
      if (pp && qp) return NoviSad{p, q, pp, qp};
    }
  return std::nullopt;
}

std::optional<SemicompleteHubie> semicomplete_hubie(const Structure& G) {
  Adj a = adjacency(G);
  if (!semicomplete_adj(a)) throw Error("invalid_argument", "expected a semicomplete digraph");
  SemicompleteAnalysis an = analyze_semicomplete(G);
  int n = G.n;
  SemicompleteHubie h;
  if (!an.sources.empty() && !an.sinks.empty()) {
    int s = an.sources[0], t = an.sinks[0];
    h.construction = "source-sink";
    h.table = OpTable::from_function(3, n, [s, t](std::span<const int> x) {
      std::vector<int> ms(x.begin(), x.end());
      auto is = std::find(ms.begin(), ms.end(), s);
      auto it = std::find(ms.begin(), ms.end(), t);
      if (is == ms.end() || it == ms.end()) return x[0];
      int drop_s = static_cast<int>(is - ms.begin()), drop_t = static_cast<int>(it - ms.begin());
      for (int i = 0; i < 3; ++i)
        if (i != drop_s && i != drop_t) return ms[i];
      return x[0];
    });
  } else if (an.cycle_census <= 1) {
    // strip the unique sinks (or, dually, sources) down to the smooth core
    Adj b = an.sinks.empty() ? transpose(a) : a;
    std::vector<bool> alive(n, true);
    std::vector<int> stripped = strip_sinks(b, alive);
    int core = static_cast<int>(std::count(alive.begin(), alive.end(), true));
    if (core != 2 && core != 3) throw Error("internal", "core of a one-cycle semicomplete is not DC3 or K2");
    std::vector<int> rank(n + 1, -1);  // earlier stripped wins
    for (std::size_t i = 0; i < stripped.size(); ++i) rank[stripped[i]] = static_cast<int>(i);
    h.construction = "dual-discriminator-core";
    h.table = OpTable::from_function(3, n, [rank](std::span<const int> x) {
      int best = -1;
      for (int v : x)
        if (rank[v] >= 0 && (best < 0 || rank[v] < rank[best])) best = v;
      if (best > 0) return best;
      return x[1] == x[2] ? x[1] : x[0];
    });
  } else {
    return std::nullopt;
  }
  if (auto v = polymorphism_violation(h.table, G))
    throw Error("internal", "semicomplete Hubie construction is not a polymorphism: " + *v);
  for (int x = 1; x <= n; ++x)
    if (is_hubie(h.table, x)) h.hubie_elements.push_back(x);
  if (h.hubie_elements.empty()) throw Error("internal", "semicomplete construction has no Hubie element");
  return h;
}

std::string semicomplete_verdict(const Structure& G) {
  SemicompleteAnalysis an = analyze_semicomplete(G);
  if (!an.is_semicomplete) throw Error("invalid_argument", "expected a semicomplete digraph");
  bool pgp = an.cycle_census <= 1 || (!an.sources.empty() && !an.sinks.empty());
  return pgp ? "PGP" : "EGP";
}

std::vector<Tuple> semicomplete_predecessors(const Structure& G, int p, int q, const Tuple& word) {
  Adj a = adjacency(G);
  std::vector<int> pin = in_set(a, p), qin = in_set(a, q);
  std::vector<int> ponly = minus(pin, qin), qonly = minus(qin, pin);
  std::vector<Tuple> out{Tuple{}};
  for (int w : word) {
    if (w != p && w != q) throw Error("invalid_argument", "word must use only p and q");
    const auto& choices = w == p ? ponly : qonly;
    std::vector<Tuple> next;
    for (const auto& t : out)
      for (int c : choices) {
        Tuple u = t;
        u.push_back(c);
        next.push_back(std::move(u));
      }
    out = std::move(next);
  }
  return out;
}

EGPSemiWitness semicomplete_egp_witness(const Structure& G, int m, const std::optional<std::vector<Tuple>>& gamma) {
  SemicompleteAnalysis an = analyze_semicomplete(G);
  if (!an.is_semicomplete) throw Error("invalid_argument", "expected a semicomplete digraph");
  if (an.cycle_census < 2 || !an.sources.empty())
    throw Error("invalid_argument", "EGP witness needs more than one cycle and no source");
  if (m < 1) throw Error("invalid_argument", "tuple length must be positive");
  auto ns = novi_sad(G);
  if (!ns) throw Error("invalid_argument", "no Novi Sad pair");
  if (gamma)
    for (const auto& g : *gamma)
      if (static_cast<int>(g.size()) != m) throw Error("length_mismatch", "generator length differs from m");

  EGPSemiWitness w;
  w.m = m;
  w.ns = *ns;
  w.smooth_part = an.smooth_part;
  int p = ns->p, q = ns->q;
  std::set<Tuple> gset;
  if (gamma) gset.insert(gamma->begin(), gamma->end());
  std::vector<Tuple> words;
  for (const auto& bits : all_tuples(2, m)) {
    Tuple word(m);
    for (int i = 0; i < m; ++i) word[i] = bits[i] == 1 ? p : q;
    words.push_back(word);
  }
  bool found = false;
  for (const auto& word : words) {
    bool clear = true;
    for (const auto& t : semicomplete_predecessors(G, p, q, word))
      if (gset.count(t)) {
        clear = false;
        break;
      }
    if (clear) {
      w.tau = word;
      found = true;
      break;
    }
  }
  if (!found) throw Error("invalid_argument", "every word in {p,q}^m has a predecessor among the generators");
  for (const auto& word : words)
    if (word != w.tau) w.relation.push_back(word);

  const std::string ename = G.relations[0].name;
  w.expanded = G;
  Relation& R = w.expanded.add_relation("R", m);
  for (const auto& t : w.relation) R.add(t);
  R.normalize();

  PHSentence& s = w.sentence;
  auto var = [](int i, bool primed) { return (primed ? "y" : "x") + std::to_string(i); };
  for (int i = 1; i <= m; ++i) s.prefix.emplace_back(Quant::Forall, var(i, false));
  for (int i = 1; i <= m; ++i) s.prefix.emplace_back(Quant::Exists, var(i, true));
  for (int i = 1; i <= m; ++i) s.atoms.push_back(Atom{ename, {{false, var(i, false)}, {false, var(i, true)}}});
  Atom r{"R", {}};
  for (int i = 1; i <= m; ++i) r.args.push_back({false, var(i, true)});
  s.atoms.push_back(r);

  w.falsifier.resize(m);
  for (int i = 0; i < m; ++i) w.falsifier[i] = w.tau[i] == p ? ns->p_prime : ns->q_prime;

  Structure named = with_all_constants(w.expanded);
  auto holds_at = [&](const Tuple& t) {
    std::map<std::string, int> rho;
    for (int i = 0; i < m; ++i) rho[var(i + 1, false)] = t[i];
    return solve_qcsp(named, instantiate_universals(s, rho));
  };
  if (gamma) {
    w.checked = *gamma;
  } else {
    auto pz = semicomplete_predecessors(G, p, q, w.tau);
    std::set<Tuple> ps(pz.begin(), pz.end());
    for (const auto& t : all_tuples(G.n, m))
      if (!ps.count(t)) w.checked.push_back(t);
  }
  for (const auto& t : w.checked)
    if (!holds_at(t)) throw Error("internal", "EGP witness formula fails on a generator");
  if (holds_at(w.falsifier)) throw Error("internal", "EGP witness falsifier satisfies the formula");
  return w;
}

}  // namespace qca
