#include "qca/paths.hpp"

#include <algorithm>
#include <set>

namespace qca {

namespace {

void check_beta(const std::string& beta) {
  if (beta.empty()) throw Error("invalid_argument", "empty path string");
  for (char c : beta)
    if (c != '0' && c != '1') throw Error("invalid_argument", std::string("path string has character '") + c + "'");
}

std::string reversed(std::string s) {
  std::reverse(s.begin(), s.end());
  return s;
}

bool loop_connected(const std::string& beta) {
  auto first = beta.find('1');
  if (first == std::string::npos) return true;
  auto last = beta.rfind('1');
  return beta.find('0', first) == std::string::npos || beta.find('0', first) > last;
}

std::size_t leading_zeros(const std::string& s) {
  auto i = s.find('1');
  return i == std::string::npos ? s.size() : i;
}

// Form (i): 0^a 1^b alpha with b > 0 and |alpha| = a.
bool match_form1(const std::string& s, PathClass& c) {
  int n = static_cast<int>(s.size());
  int a = static_cast<int>(leading_zeros(s));
  int b = n - 2 * a;
  if (b < 1) return false;
  for (int i = a; i < a + b; ++i)
    if (s[i] != '1') return false;
  c.form = "i";
  c.a = a;
  c.b = b;
  c.alpha = s.substr(a + b);
  return true;
}

// Form (ii): 0^a alpha with |alpha| in {a, a-1}, i.e. a = ceil(n/2).
bool match_form2(const std::string& s, PathClass& c) {
  int n = static_cast<int>(s.size());
  int a = (n + 1) / 2;
  if (static_cast<int>(leading_zeros(s)) < a) return false;
  c.form = "ii";
  c.a = a;
  c.b = 0;
  c.alpha = s.substr(a);
  return true;
}

int T(int l, int m) {
  if (l <= m) return m;
  return (l - m + 1) % 2 == 1 ? l : l + 1;
}

int T0(int l, int m) {
  int M = std::max(l, m);
  return (M - m) % 2 == 0 ? M : M + 1;
}

// Staircase construction for 0^a 1^b alpha; even n cuts at the right central column.
std::vector<int> form1_table(const PathClass& c, int y) {
  const int n = static_cast<int>(c.normalized.size());
  const int p = c.a + 1, r = c.a + c.b;
  int q, cut, Tt;
  if (n % 2) {
    q = (n + 1) / 2;
    cut = q;
    Tt = q;
  } else {
    q = n / 2;
    cut = q + 1;
    Tt = y > q ? q + 1 : q;
  }
  const int K = q - 1, rowtop = q;
  std::vector<int> z(K + 1);
  if (y >= Tt) {
    int hold = std::min(y, r);
    for (int k = 0; k <= K; ++k) z[k] = std::max(y - k, std::min(hold, Tt + K - k));
  } else {
    int hold = std::max(y, p);
    for (int k = 0; k <= K; ++k) z[k] = std::min(y + k, std::max(hold, Tt - (K - k)));
  }
  int s = y > r ? y - r : (y < p ? p - y : 0);
  std::vector<int> vals(static_cast<std::size_t>(n) * n);
  for (int u = 1; u <= n; ++u)
    for (int v = 1; v <= n; ++v) {
      int val;
      if (v >= cut) {
        val = v;
      } else if (u <= rowtop && v <= rowtop) {
        int mx = std::max(u, v);
        val = mx >= p ? mx : T(u, v);
      } else {
        int k = std::max(n - u, v - 1);
        if (k >= s)
          val = z[k];
        else if (y > r)
          val = y + 1 - T(n + 1 - u, v);
        else
          val = y - 1 + T(n + 1 - u, v);
      }
      vals[(u - 1) * n + (v - 1)] = val;
    }
  return vals;
}

// Clamped mirror construction for 0^a alpha; returns the table and anchor column.
std::vector<int> form2_table(int n, int y, int& anchor_col) {
  const int a = (n + 1) / 2;
  const int j = y % 2 ? 1 : 2;
  const int z = y % 2 ? y : y - 1;
  const int c = y + j <= 2 * a ? a : a + 1;
  auto cap2 = [&](int v) { return n - ((n - v) % 2); };
  auto top = [&](int u, int v) { return std::min({T(u, v), 2 * c - v, cap2(v)}); };
  const bool asc = y <= top(n, j);
  std::vector<int> vals(static_cast<std::size_t>(n) * n);
  for (int u = 1; u <= n; ++u)
    for (int v = 1; v <= n; ++v) {
      int val;
      if (v >= c)
        val = v;
      else if (asc)
        val = std::min(top(u, v), T(n + z - u, v));
      else
        val = std::max(top(u, v), y + 1 - T0(n + 1 - u, v + 1 - j));
      vals[(u - 1) * n + (v - 1)] = val;
    }
  anchor_col = n == 1 ? 1 : j;
  return vals;
}

int flip(int n, int v) { return n + 1 - v; }

}  // namespace

Structure path_structure(const std::string& beta) {
  check_beta(beta);
  int n = static_cast<int>(beta.size());
  std::vector<std::pair<int, int>> e;
  for (int i = 1; i < n; ++i) {
    e.push_back({i, i + 1});
    e.push_back({i + 1, i});
  }
  for (int i = 1; i <= n; ++i)
    if (beta[i - 1] == '1') e.push_back({i, i});
  return make_digraph(n, e);
}

std::string to_string(PathKind k) {
  switch (k) {
    case PathKind::LoopConnected:
      return "loop-connected";
    case PathKind::QuasiLoopConnected:
      return "quasi-loop-connected";
    default:
      return "not-quasi-loop-connected";
  }
}

PathClass classify_path(const std::string& beta) {
  check_beta(beta);
  PathClass c;
  std::string rev = reversed(beta);
  bool matched = false;
  for (auto match : {match_form1, match_form2}) {
    if (match(beta, c)) {
      c.normalized = beta;
      matched = true;
    } else if (match(rev, c)) {
      c.normalized = rev;
      c.reversed = true;
      matched = true;
    }
    if (matched) break;
  }
  if (!matched) c.normalized = beta;
  if (loop_connected(beta))
    c.kind = PathKind::LoopConnected;
  else
    c.kind = matched ? PathKind::QuasiLoopConnected : PathKind::NotQLC;
  return c;
}

PathVerdict path_verdict(const std::string& beta, bool constants_present) {
  PathClass c = classify_path(beta);
  if (c.kind == PathKind::NotQLC) return {"EGP", "Pspace-complete"};
  if (!constants_present || c.kind == PathKind::LoopConnected) return {"PGP", "NL"};
  return {"PGP", "NP-complete"};
}

int feder_value(int x, int y, int z, bool use_max) {
  int a[3] = {x, y, z};
  int odd = (x & 1) + (y & 1) + (z & 1);
  if (odd == 0 || odd == 3) {
    std::sort(a, a + 3);
    return a[1];
  }
  int rp = odd >= 2 ? 1 : 0;
  int best = 0;
  bool any = false;
  for (int v : a)
    if ((v & 1) == rp) {
      best = !any ? v : (use_max ? std::max(best, v) : std::min(best, v));
      any = true;
    }
  return best;
}

OpTable feder_majority(const std::string& beta) {
  if (classify_path(beta).kind != PathKind::LoopConnected)
    throw Error("invalid_argument", "Feder majority needs a loop-connected path");
  int n = static_cast<int>(beta.size());
  auto first = beta.find('1');
  int p = first == std::string::npos ? n + 1 : static_cast<int>(first) + 1;
  int q = first == std::string::npos ? n + 1 : static_cast<int>(beta.rfind('1')) + 1;
  return OpTable::from_function(3, n, [&](std::span<const int> a) {
    int s[3] = {a[0], a[1], a[2]};
    std::sort(s, s + 3);
    int md = s[1];
    if (md < p) return feder_value(std::min(a[0], p), std::min(a[1], p), std::min(a[2], p), true);
    if (md > q) return feder_value(std::max(a[0], q), std::max(a[1], q), std::max(a[2], q), false);
    return md;
  });
}

OpTable feder_majority_literal(const std::string& beta) {
  if (classify_path(beta).kind != PathKind::LoopConnected)
    throw Error("invalid_argument", "Feder majority needs a loop-connected path");
  int n = static_cast<int>(beta.size());
  auto first = beta.find('1');
  // L = vertices before the loop block, R = after it; no loops means L is everything
  int lmax = first == std::string::npos ? n : static_cast<int>(first);
  int rmin = first == std::string::npos ? n + 1 : static_cast<int>(beta.rfind('1')) + 2;
  return OpTable::from_function(3, n, [&](std::span<const int> a) {
    bool inL = std::all_of(a.begin(), a.end(), [&](int v) { return v <= lmax; });
    bool inR = std::all_of(a.begin(), a.end(), [&](int v) { return v >= rmin; });
    if (inL || inR) return feder_value(a[0], a[1], a[2], true);
    int s[3] = {a[0], a[1], a[2]};
    std::sort(s, s + 3);
    return s[1];
  });
}

BinaryFy binary_fy(const std::string& beta, int y) {
  PathClass c = classify_path(beta);
  if (c.form.empty()) throw Error("invalid_argument", "binary f_y needs a quasi-loop-connected path");
  int n = static_cast<int>(beta.size());
  if (y < 1 || y > n) throw Error("invalid_argument", "y outside the path");
  BinaryFy r;
  r.beta = c.normalized;
  r.table.k = 2;
  r.table.n = n;
  if (c.form == "i") {
    r.table.vals = form1_table(c, y);
    r.anchor = {n, 1};
  } else {
    int col = 1;
    r.table.vals = form2_table(n, y, col);
    r.anchor = {n, col};
  }
  return r;
}

std::vector<Tuple> generating_tuples(const std::string& beta, int m) {
  PathClass c = classify_path(beta);
  if (c.form.empty()) throw Error("invalid_argument", "generators need a quasi-loop-connected path");
  if (m < 1) throw Error("invalid_argument", "tuple length must be positive");
  int n = static_cast<int>(beta.size());
  std::vector<int> backgrounds{1};
  if (c.form == "ii" && n >= 2) backgrounds.push_back(2);
  std::vector<Tuple> out;
  for (int bg : backgrounds) out.push_back(Tuple(m, bg));
  for (int bg : backgrounds)
    for (int j = 0; j < m; ++j) {
      Tuple t(m, bg);
      t[j] = n;
      out.push_back(t);
    }
  if (c.reversed)
    for (auto& t : out)
      for (auto& v : t) v = flip(n, v);
  std::set<Tuple> seen;
  std::vector<Tuple> unique;
  for (auto& t : out)
    if (seen.insert(t).second) unique.push_back(t);
  return unique;
}

std::vector<std::pair<int, int>> tuple_certificate(const std::string& beta, int m, const Tuple& t) {
  PathClass c = classify_path(beta);
  if (c.form != "i") throw Error("invalid_argument", "tuple certificates need a form (i) path");
  int n = static_cast<int>(beta.size());
  if (static_cast<int>(t.size()) != m) throw Error("length_mismatch", "tuple length differs from m");
  std::vector<std::pair<int, int>> steps;
  for (int j = 0; j < m; ++j) {
    if (t[j] < 1 || t[j] > n) throw Error("invalid_argument", "tuple entry outside the path");
    if (t[j] != 1) steps.emplace_back(t[j], j + 1);
  }
  return steps;
}

Tuple replay_certificate(const std::string& beta, int m, const std::vector<std::pair<int, int>>& steps) {
  int n = static_cast<int>(beta.size());
  Tuple cur(m, 1);
  for (auto [y, j] : steps) {
    if (j < 1 || j > m) throw Error("invalid_argument", "step position out of range");
    Tuple e(m, 1);
    e[j - 1] = n;
    cur = apply_pointwise(binary_fy(beta, y).table, {e, cur});
  }
  return cur;
}

namespace {

struct LoopData {
  int n, p, q;
};

LoopData loop_data(const std::string& beta) {
  int n = static_cast<int>(beta.size());
  auto first = beta.find('1');
  if (first == std::string::npos) throw Error("invalid_argument", "path has no loops");
  return {n, static_cast<int>(first) + 1, static_cast<int>(beta.rfind('1')) + 1};
}

bool mu_valid(const LoopData& d, int mu) {
  for (int v = 1; v <= d.n; ++v)
    if (std::min(std::abs(v - d.p), std::abs(v - d.q)) > mu) return false;
  return d.q - 1 > mu && d.n - d.p > mu;
}

std::vector<int> ball(int n, int centre, int mu) {
  std::vector<int> out;
  for (int v = std::max(1, centre - mu); v <= std::min(n, centre + mu); ++v) out.push_back(v);
  return out;
}

}  // namespace

std::vector<Tuple> path_cousins(const std::string& beta, int mu, const Tuple& word) {
  check_beta(beta);
  LoopData d = loop_data(beta);
  std::vector<int> P = ball(d.n, d.p, mu), Q = ball(d.n, d.q, mu), onlyP, onlyQ;
  for (int v : P)
    if (!std::count(Q.begin(), Q.end(), v)) onlyP.push_back(v);
  for (int v : Q)
    if (!std::count(P.begin(), P.end(), v)) onlyQ.push_back(v);
  std::vector<Tuple> out{Tuple{}};
  for (int w : word) {
    if (w != d.p && w != d.q) throw Error("invalid_argument", "word entry is neither p nor q");
    const auto& choices = w == d.p ? onlyP : onlyQ;
    std::vector<Tuple> next;
    for (const auto& t : out)
      for (int v : choices) {
        Tuple u = t;
        u.push_back(v);
        next.push_back(u);
      }
    out = std::move(next);
  }
  return out;
}

EGPPathWitness path_egp_witness(const std::string& beta, int m, const std::optional<std::vector<Tuple>>& gamma) {
  PathClass c = classify_path(beta);
  if (c.kind != PathKind::NotQLC)
    throw Error("invalid_argument", "EGP witness needs a path that is not quasi-loop-connected");
  if (m < 1) throw Error("invalid_argument", "tuple length must be positive");
  LoopData d = loop_data(beta);
  EGPPathWitness w;
  w.n = d.n;
  w.m = m;
  w.p = d.p;
  w.q = d.q;
  w.mu_formula = std::max({d.p, d.n - d.q, (d.q - d.p - 1) / 2});
  w.mu = w.mu_formula;
  if (!mu_valid(d, w.mu)) {
    w.mu = std::max({d.p - 1, d.n - d.q, (d.q - d.p) / 2});
    w.used_fallback = true;
    if (!mu_valid(d, w.mu)) throw Error("internal", "no valid chain length for " + beta);
  }
  w.P = ball(d.n, d.p, w.mu);
  w.Q = ball(d.n, d.q, w.mu);

  if (gamma) {
    for (const auto& g : *gamma)
      if (static_cast<int>(g.size()) != m) throw Error("length_mismatch", "generator length differs from m");
  }
  // omitted word: lexicographically first in {p,q}^m with no cousin in gamma
  std::set<Tuple> gset;
  if (gamma) gset.insert(gamma->begin(), gamma->end());
  std::vector<Tuple> words;
  for (const auto& bits : all_tuples(2, m)) {
    Tuple word(m);
    for (int i = 0; i < m; ++i) word[i] = bits[i] == 1 ? d.p : d.q;
    words.push_back(word);
  }
  bool found = false;
  for (const auto& word : words) {
    bool clear = true;
    for (const auto& t : path_cousins(beta, w.mu, word))
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
  if (!found) throw Error("invalid_argument", "every word in {p,q}^m has a cousin among the generators");
  for (const auto& word : words)
    if (word != w.tau) w.relation.push_back(word);

  w.expanded = with_all_constants(path_structure(beta));
  Relation& R = w.expanded.add_relation("R", m);
  for (const auto& t : w.relation) R.add(t);
  R.normalize();

  // forall x_i exists chains x_i -> x_i_1 -> ... -> x_i_mu, loop at the end, R on the ends
  PHSentence& s = w.sentence;
  auto var = [](int i, int k) {
    return "x" + std::to_string(i) + (k == 0 ? "" : "_" + std::to_string(k));
  };
  for (int i = 1; i <= m; ++i) s.prefix.emplace_back(Quant::Forall, var(i, 0));
  for (int i = 1; i <= m; ++i)
    for (int k = 1; k <= w.mu; ++k) s.prefix.emplace_back(Quant::Exists, var(i, k));
  for (int i = 1; i <= m; ++i) {
    for (int k = 1; k <= w.mu; ++k) s.atoms.push_back(Atom{"E", {{false, var(i, k - 1)}, {false, var(i, k)}}});
    s.atoms.push_back(Atom{"E", {{false, var(i, w.mu)}, {false, var(i, w.mu)}}});
  }
  Atom r{"R", {}};
  for (int i = 1; i <= m; ++i) r.args.push_back({false, var(i, w.mu)});
  s.atoms.push_back(r);

  w.falsifier.resize(m);
  for (int i = 0; i < m; ++i) w.falsifier[i] = w.tau[i] == d.p ? 1 : d.n;

  auto holds_at = [&](const Tuple& t) {
    std::map<std::string, int> rho;
    for (int i = 0; i < m; ++i) rho[var(i + 1, 0)] = t[i];
    return solve_qcsp(w.expanded, instantiate_universals(s, rho));
  };
  if (gamma) {
    w.checked = *gamma;
  } else {
    auto cz = path_cousins(beta, w.mu, w.tau);
    std::set<Tuple> cs(cz.begin(), cz.end());
    for (const auto& t : all_tuples(d.n, m))
      if (!cs.count(t)) w.checked.push_back(t);
  }
  for (const auto& t : w.checked)
    if (!holds_at(t)) throw Error("internal", "EGP witness formula fails on a generator");
  if (holds_at(w.falsifier)) throw Error("internal", "EGP witness falsifier satisfies the formula");
  return w;
}

}  // namespace qca
