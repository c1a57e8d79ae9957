#include "qca/clones.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <sstream>

namespace qca {

namespace {

std::size_t ipow(std::size_t b, int e) {
  std::size_t r = 1;
  for (int i = 0; i < e; ++i) r *= b;
  return r;
}

void check_table(const OpTable& f) {
  if (f.k < 0 || f.n < 1 || f.vals.size() != ipow(f.n, f.k))
    throw Error("invalid_argument", "operation table has the wrong number of entries");
  for (int v : f.vals)
    if (v < 1 || v > f.n)
      throw Error("invalid_argument", "operation value " + std::to_string(v) + " outside 1.." +
                                          std::to_string(f.n));
}

std::string tuple_string(std::span<const int> t) {
  std::string s = "(";
  for (std::size_t i = 0; i < t.size(); ++i) s += (i ? "," : "") + std::to_string(t[i]);
  return s + ")";
}

// Identity pins for the identity-defined tags, as (cell index, value).
std::vector<std::pair<int, int>> identity_pins(const std::string& tag, int k, int n) {
  std::vector<std::pair<int, int>> pins;
  auto cell = [&](const Tuple& args) {
    std::size_t idx = 0;
    for (int a : args) idx = idx * n + (a - 1);
    return static_cast<int>(idx) + 1;
  };
  bool nu = tag == "majority" || tag == "dual_discriminator" || tag.rfind("near_unanimity", 0) == 0;
  if ((tag == "majority" || tag == "dual_discriminator" || tag == "maltsev") && k != 3)
    throw Error("arity_mismatch", tag + " requires arity 3");
  if (nu && k < 3) throw Error("arity_mismatch", tag + " requires arity at least 3");
  for (int x = 1; x <= n; ++x)
    for (int y = 1; y <= n; ++y) {
      if (nu) {
        for (int i = 0; i < k; ++i) {
          Tuple args(k, x);
          args[i] = y;
          pins.emplace_back(cell(args), x);
        }
      }
      if (tag == "maltsev") {
        pins.emplace_back(cell({x, y, y}), x);
        pins.emplace_back(cell({y, y, x}), x);
      }
    }
  if (tag == "dual_discriminator")
    for (int x = 1; x <= n; ++x)
      for (int y = 1; y <= n; ++y)
        for (int z = 1; z <= n; ++z)
          if (x != y && y != z && x != z) pins.emplace_back(cell({x, y, z}), x);
  return pins;
}

bool tag_imposed_by_pins(const std::string& tag) {
  return tag == "majority" || tag == "dual_discriminator" || tag == "maltsev" ||
         tag.rfind("near_unanimity", 0) == 0;
}

OpTable table_from_assignment(int k, int n, const std::vector<int>& h) {
  OpTable f;
  f.k = k;
  f.n = n;
  f.vals = h;
  return f;
}

void check_power_budget(int n, int k, const Budget& budget) {
  long double size = 1;
  for (int i = 0; i < k; ++i) size *= n;
  if (size > static_cast<long double>(budget.max_elements))
    throw BudgetExceeded("elements", budget.max_elements,
                         size > 1e18L ? SIZE_MAX : static_cast<std::size_t>(size));
}

}  // namespace

std::size_t OpTable::index(std::span<const int> args) const {
  if (static_cast<int>(args.size()) != k) throw Error("arity_mismatch", "wrong number of arguments");
  std::size_t idx = 0;
  for (int a : args) {
    if (a < 1 || a > n) throw Error("invalid_argument", "argument outside the domain");
    idx = idx * n + (a - 1);
  }
  return idx;
}

Tuple OpTable::args_of(std::size_t idx) const {
  Tuple t(k);
  for (int i = k - 1; i >= 0; --i) {
    t[i] = static_cast<int>(idx % n) + 1;
    idx /= n;
  }
  return t;
}

OpTable OpTable::from_function(int k, int n, const std::function<int(std::span<const int>)>& f) {
  OpTable t;
  t.k = k;
  t.n = n;
  std::size_t size = ipow(n, k);
  t.vals.resize(size);
  for (std::size_t i = 0; i < size; ++i) {
    Tuple a = t.args_of(i);
    t.vals[i] = f(a);
  }
  return t;
}

OpTable OpTable::projection(int k, int n, int i) {
  if (i < 1 || i > k) throw Error("invalid_argument", "projection index out of range");
  return from_function(k, n, [i](std::span<const int> a) { return a[i - 1]; });
}

Tuple apply_pointwise(const OpTable& f, const std::vector<Tuple>& args) {
  if (static_cast<int>(args.size()) != f.k) throw Error("arity_mismatch", "wrong number of tuples");
  std::size_t m = args.empty() ? 0 : args[0].size();
  for (const auto& t : args)
    if (t.size() != m) throw Error("length_mismatch", "tuples of different lengths");
  Tuple out(m);
  Tuple col(f.k);
  for (std::size_t j = 0; j < m; ++j) {
    for (int i = 0; i < f.k; ++i) col[i] = args[i][j];
    out[j] = f(col);
  }
  return out;
}

std::string serialize_op_table(const OpTable& f, const std::string& name) {
  std::ostringstream os;
  os << "op " << name << " arity " << f.k << " domain " << f.n << "\n";
  std::size_t row = f.n;
  for (std::size_t i = 0; i < f.vals.size(); ++i)
    os << f.vals[i] << ((i + 1) % row == 0 ? "\n" : " ");
  return os.str();
}

OpTable parse_op_table(const std::string& text) {
  std::istringstream in(text);
  std::string line, word, name, kw1, kw2;
  int lineno = 0;
  OpTable f;
  bool header = false;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::istringstream ls(line);
    if (!header) {
      if (!(ls >> word)) continue;
      if (word != "op" || !(ls >> name >> kw1 >> f.k >> kw2 >> f.n) || kw1 != "arity" ||
          kw2 != "domain")
        throw ParseError(lineno, "expected 'op <name> arity <k> domain <n>'");
      if (f.k < 0 || f.n < 1 || f.k > 16) throw ParseError(lineno, "bad arity or domain size");
      header = true;
    }
    while (ls >> word) {
      try {
        std::size_t pos = 0;
        int v = std::stoi(word, &pos);
        if (pos != word.size()) throw std::invalid_argument(word);
        if (v < 1 || v > f.n) throw ParseError(lineno, "value " + word + " outside the domain");
        f.vals.push_back(v);
      } catch (const std::logic_error&) {
        throw ParseError(lineno, "expected a number, got '" + word + "'");
      }
    }
  }
  if (!header) throw ParseError(lineno, "missing op header");
  if (f.vals.size() != ipow(f.n, f.k))
    throw ParseError(lineno, "expected " + std::to_string(ipow(f.n, f.k)) + " values, got " +
                                 std::to_string(f.vals.size()));
  return f;
}

std::optional<std::string> polymorphism_violation(const OpTable& f, const Structure& A) {
  check_table(f);
  if (f.n != A.n) throw Error("invalid_argument", "operation domain does not match the structure");
  for (const auto& [c, e] : A.constants) {
    Tuple diag(f.k, e);
    if (f(diag) != e) return "constant " + c + ": f" + tuple_string(diag) + " = " + std::to_string(f(diag));
  }
  for (const auto& R : A.relations) {
    std::size_t sz = R.size();
    if (sz == 0 || f.k == 0) continue;
    std::vector<std::size_t> pick(f.k, 0);
    Tuple col(f.k), img(R.arity);
    for (;;) {
      for (int j = 0; j < R.arity; ++j) {
        for (int i = 0; i < f.k; ++i) col[i] = R.tuple(pick[i])[j];
        img[j] = f(col);
      }
      if (!R.contains(img)) {
        std::string rows;
        for (int i = 0; i < f.k; ++i) rows += (i ? " " : "") + tuple_string(R.tuple(pick[i]));
        return "relation " + R.name + ": rows " + rows + " map to " + tuple_string(img);
      }
      int i = f.k - 1;
      while (i >= 0 && pick[i] == sz - 1) pick[i--] = 0;
      if (i < 0) break;
      ++pick[i];
    }
  }
  return std::nullopt;
}

bool is_polymorphism(const OpTable& f, const Structure& A) { return !polymorphism_violation(f, A); }

bool is_idempotent(const OpTable& f) {
  for (int x = 1; x <= f.n; ++x)
    if (f(Tuple(f.k, x)) != x) return false;
  return true;
}

bool is_hubie(const OpTable& f, int x) {
  if (f.k == 0) return false;
  for (int i = 0; i < f.k; ++i) {
    std::vector<char> seen(f.n + 1, 0);
    int count = 0;
    for (std::size_t c = 0; c < f.vals.size(); ++c) {
      if (f.args_of(c)[i] != x) continue;
      if (!seen[f.vals[c]]) {
        seen[f.vals[c]] = 1;
        ++count;
      }
    }
    if (count != f.n) return false;
  }
  return true;
}

std::vector<std::string> classify_operation(const OpTable& f) {
  check_table(f);
  const int k = f.k, n = f.n;
  std::vector<std::string> tags;
  std::vector<Tuple> args(f.vals.size());
  for (std::size_t c = 0; c < args.size(); ++c) args[c] = f.args_of(c);

  auto depends_only_on = [&](int i, bool identity) {
    std::vector<int> g(n + 1, 0);
    for (std::size_t c = 0; c < args.size(); ++c) {
      int a = args[c][i];
      if (identity && f.vals[c] != a) return false;
      if (g[a] == 0) g[a] = f.vals[c];
      if (g[a] != f.vals[c]) return false;
    }
    return true;
  };
  bool proj = false, eu = k == 0 || std::all_of(f.vals.begin(), f.vals.end(), [&](int v) { return v == f.vals[0]; });
  for (int i = 0; i < k; ++i) {
    if (depends_only_on(i, true)) proj = true;
    if (depends_only_on(i, false)) eu = true;
  }
  if (proj) tags.push_back("projection");
  if (eu) tags.push_back("essentially_unary");

  auto near_unanimity = [&]() {
    if (k < 3) return false;
    for (int x = 1; x <= n; ++x)
      for (int y = 1; y <= n; ++y)
        for (int i = 0; i < k; ++i) {
          Tuple a(k, x);
          a[i] = y;
          if (f(a) != x) return false;
        }
    return true;
  };
  bool nu = near_unanimity();
  if (k == 3 && nu) {
    tags.push_back("majority");
    bool dd = true;
    for (int x = 1; x <= n && dd; ++x)
      for (int y = 1; y <= n && dd; ++y)
        for (int z = 1; z <= n && dd; ++z)
          if (x != y && y != z && x != z && f({x, y, z}) != x) dd = false;
    if (dd) tags.push_back("dual_discriminator");
  }
  if (k == 3) {
    bool mal = true;
    for (int x = 1; x <= n && mal; ++x)
      for (int y = 1; y <= n && mal; ++y)
        if (f({x, y, y}) != x || f({y, y, x}) != x) mal = false;
    if (mal) tags.push_back("maltsev");
  }
  if (nu) tags.push_back("near_unanimity(" + std::to_string(k) + ")");
  if (k == 2) {
    bool semilattice = is_idempotent(f);
    for (int x = 1; x <= n && semilattice; ++x)
      for (int y = 1; y <= n && semilattice; ++y) {
        if (f({x, y}) != f({y, x})) semilattice = false;
        for (int z = 1; z <= n && semilattice; ++z)
          if (f({f({x, y}), z}) != f({x, f({y, z})})) semilattice = false;
      }
    if (semilattice)
      for (int x = 1; x <= n; ++x) {
        bool unit = true;
        for (int y = 1; y <= n && unit; ++y)
          if (f({x, y}) != y) unit = false;
        if (unit) tags.push_back("semilattice_with_unit(" + std::to_string(x) + ")");
      }
  }
  for (int x = 1; x <= n; ++x)
    if (is_hubie(f, x)) tags.push_back("hubie(" + std::to_string(x) + ")");
  return tags;
}

bool has_tag(const OpTable& f, const std::string& tag) {
  auto tags = classify_operation(f);
  return std::find(tags.begin(), tags.end(), tag) != tags.end();
}

EnumerationResult enumerate_polymorphisms(const Structure& A, int k, const std::string& filter,
                                          std::size_t limit, const Budget& budget) {
  if (k < 1) throw Error("invalid_argument", "arity must be positive");
  check_power_budget(A.n, k, budget);
  Structure Ac = with_all_constants(A);
  Structure P = power(Ac, k, budget);
  HomSolver solver(P, Ac, budget);
  solver.set_lex_order(true);
  HomSolver::Pins pins;
  bool pinned = !filter.empty() && tag_imposed_by_pins(filter);
  if (pinned) pins = identity_pins(filter, k, A.n);
  EnumerationResult out;
  solver.enumerate(pins, [&](const std::vector<int>& h) {
    OpTable f = table_from_assignment(k, A.n, h);
    if (!filter.empty() && !pinned && !has_tag(f, filter)) return true;
    if (out.tables.size() == limit) {
      out.truncated = true;
      return false;
    }
    out.tables.push_back(std::move(f));
    return true;
  });
  return out;
}

std::optional<OpTable> find_hubie_polymorphism(const Structure& A, int x, int k, const Budget& budget) {
  if (x < 1 || x > A.n) throw Error("invalid_argument", "source element outside the domain");
  if (k < 1) throw Error("invalid_argument", "arity must be positive");
  check_power_budget(A.n, k, budget);
  Structure Ac = with_all_constants(A);
  Structure P = power(Ac, k, budget);
  HomSolver solver(P, Ac, budget);
  solver.set_lex_order(true);
  // cells[i] = table cells whose i-th argument is x
  std::vector<std::vector<int>> cells(k);
  OpTable shape{k, A.n, {}};
  for (std::size_t c = 0; c < ipow(A.n, k); ++c) {
    Tuple a = shape.args_of(c);
    for (int i = 0; i < k; ++i)
      if (a[i] == x) cells[i].push_back(static_cast<int>(c));
  }
  // Each restricted slice must still be able to reach every value.
  solver.set_extra_check([&](const HomSolver& s) {
    for (int i = 0; i < k; ++i)
      for (int v = 1; v <= A.n; ++v) {
        bool reachable = false;
        for (int c : cells[i])
          if (s.contains(c, v)) {
            reachable = true;
            break;
          }
        if (!reachable) return false;
      }
    return true;
  });
  auto h = solver.solve();
  if (!h) return std::nullopt;
  return table_from_assignment(k, A.n, *h);
}

std::string to_string(Answer a) {
  switch (a) {
    case Answer::Yes:
      return "yes";
    case Answer::No:
      return "no";
    default:
      return "unknown";
  }
}

namespace {

// Pins of the membership problem, or nullopt if two equal columns need different values.
std::optional<HomSolver::Pins> membership_pins(const Structure& P, const std::vector<Tuple>& S,
                                               const Tuple& t) {
  std::map<int, int> pin;
  Tuple col(S.size());
  for (std::size_t j = 0; j < t.size(); ++j) {
    for (std::size_t i = 0; i < S.size(); ++i) col[i] = S[i][j];
    int e = P.element_index(col);
    auto [it, fresh] = pin.emplace(e, t[j]);
    if (!fresh && it->second != t[j]) return std::nullopt;
  }
  return HomSolver::Pins(pin.begin(), pin.end());
}

void check_generators(const Structure& A, const std::vector<Tuple>& S, std::size_t m) {
  if (S.empty()) throw Error("invalid_argument", "empty generator set");
  for (const auto& s : S) {
    if (s.size() != m) throw Error("length_mismatch", "generator length differs from the target");
    for (int v : s)
      if (v < 1 || v > A.n) throw Error("invalid_argument", "tuple entry outside the domain");
  }
}

}  // namespace

MembershipResult subpower_membership(const Structure& A, const std::vector<Tuple>& S, const Tuple& t,
                                     const Budget& budget) {
  check_generators(A, S, t.size());
  for (int v : t)
    if (v < 1 || v > A.n) throw Error("invalid_argument", "tuple entry outside the domain");
  MembershipResult r;
  for (std::size_t i = 0; i < S.size(); ++i)
    if (S[i] == t) {
      r.answer = Answer::Yes;
      r.certificate = MembershipCertificate{t, S,
                                            OpTable::projection(static_cast<int>(S.size()), A.n,
                                                                static_cast<int>(i) + 1)};
      return r;
    }
  try {
    int k = static_cast<int>(S.size());
    check_power_budget(A.n, k, budget);
    Structure P = power(A, k, budget);
    auto pins = membership_pins(P, S, t);
    if (!pins) {
      r.answer = Answer::No;
      r.note = "two equal coordinates of the generators carry different target values";
      return r;
    }
    HomSolver solver(P, A, budget);
    auto h = solver.solve(*pins);
    if (!h) {
      r.answer = Answer::No;
      return r;
    }
    r.answer = Answer::Yes;
    r.certificate = MembershipCertificate{t, S, table_from_assignment(k, A.n, *h)};
  } catch (const BudgetExceeded& e) {
    r.answer = Answer::Unknown;
    r.note = e.what();
  }
  return r;
}

bool verify_certificate(const Structure& A, const MembershipCertificate& c) {
  if (c.f.k != static_cast<int>(c.generators.size()) || c.f.n != A.n) return false;
  if (!is_polymorphism(c.f, A)) return false;
  return apply_pointwise(c.f, c.generators) == c.target;
}

std::vector<Tuple> all_tuples(int n, int m) {
  std::vector<Tuple> out;
  Tuple t(m, 1);
  for (;;) {
    out.push_back(t);
    int i = m - 1;
    while (i >= 0 && t[i] == n) t[i--] = 1;
    if (i < 0) break;
    ++t[i];
  }
  return out;
}

GenerationResult generates_full_power(const Structure& A, const std::vector<Tuple>& S, int m,
                                      const Budget& budget) {
  if (m < 1) throw Error("invalid_argument", "tuple length must be positive");
  check_generators(A, S, m);
  GenerationResult r;
  std::set<Tuple> given(S.begin(), S.end());
  try {
    int k = static_cast<int>(S.size());
    check_power_budget(A.n, k, budget);
    Structure P = power(A, k, budget);
    HomSolver solver(P, A, budget);
    for (const auto& t : all_tuples(A.n, m)) {
      if (given.count(t)) continue;
      auto pins = membership_pins(P, S, t);
      if (!pins || !solver.solve(*pins)) {
        r.answer = Answer::No;
        r.counterexample = t;
        return r;
      }
    }
    r.answer = Answer::Yes;
  } catch (const BudgetExceeded& e) {
    r.answer = Answer::Unknown;
    r.note = e.what();
  }
  return r;
}

MinGenResult min_generating_size(const Structure& A, int m, int max_size, std::size_t max_subsets,
                                 const Budget& budget) {
  if (m < 1) throw Error("invalid_argument", "tuple length must be positive");
  MinGenResult r;
  std::vector<Tuple> universe = all_tuples(A.n, m);
  const int N = static_cast<int>(universe.size());
  std::vector<std::vector<int>> perms;
  {
    std::vector<int> p(m);
    std::iota(p.begin(), p.end(), 0);
    do perms.push_back(p);
    while (std::next_permutation(p.begin(), p.end()));
  }
  std::map<Tuple, int> pos;
  for (int i = 0; i < N; ++i) pos[universe[i]] = i;
  // Skip a subset if a coordinate permutation maps it to a lexicographically smaller one.
  auto canonical = [&](const std::vector<int>& idx) {
    for (std::size_t q = 1; q < perms.size(); ++q) {
      std::vector<int> img;
      for (int i : idx) {
        Tuple t(m);
        for (int j = 0; j < m; ++j) t[j] = universe[i][perms[q][j]];
        img.push_back(pos[t]);
      }
      std::sort(img.begin(), img.end());
      if (img < idx) return false;
    }
    return true;
  };
  bool budget_hit = false;
  for (int s = 1; s <= std::min(max_size, N); ++s) {
    std::vector<int> idx(s);
    std::iota(idx.begin(), idx.end(), 0);
    for (;;) {
      if (canonical(idx)) {
        if (r.subsets_checked == max_subsets) {
          r.note = "subset budget of " + std::to_string(max_subsets) + " reached at size " +
                   std::to_string(s);
          return r;
        }
        ++r.subsets_checked;
        std::vector<Tuple> S;
        for (int i : idx) S.push_back(universe[i]);
        GenerationResult g = generates_full_power(A, S, m, budget);
        if (g.answer == Answer::Yes) {
          r.size = s;
          r.witness = S;
          return r;
        }
        if (g.answer == Answer::Unknown) {
          budget_hit = true;
          r.note = g.note;
        }
      }
      int i = s - 1;
      while (i >= 0 && idx[i] == N - s + i) --i;
      if (i < 0) break;
      ++idx[i];
      for (int j = i + 1; j < s; ++j) idx[j] = idx[j - 1] + 1;
    }
    if (budget_hit) return r;
  }
  if (r.note.empty()) r.note = "no generating set of size at most " + std::to_string(max_size);
  return r;
}

}  // namespace qca
