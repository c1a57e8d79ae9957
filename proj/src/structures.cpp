#include "qca/structures.hpp"

#include <algorithm>
#include <cctype>
#include <numeric>
#include <set>
#include <sstream>

namespace qca {

void Relation::normalize() {
  std::size_t m = size();
  if (m == 0) return;
  if (arity <= 2) {
    std::vector<uint64_t> packed(m);
    for (std::size_t i = 0; i < m; ++i) {
      uint64_t a = static_cast<uint32_t>(data[i * arity]);
      uint64_t b = arity == 2 ? static_cast<uint32_t>(data[i * arity + 1]) : 0;
      packed[i] = (a << 32) | b;
    }
    std::sort(packed.begin(), packed.end());
    packed.erase(std::unique(packed.begin(), packed.end()), packed.end());
    data.resize(packed.size() * arity);
    for (std::size_t i = 0; i < packed.size(); ++i) {
      data[i * arity] = static_cast<int>(packed[i] >> 32);
      if (arity == 2) data[i * arity + 1] = static_cast<int>(packed[i] & 0xffffffffu);
    }
    return;
  }
  std::vector<std::size_t> idx(m);
  std::iota(idx.begin(), idx.end(), 0);
  auto less = [&](std::size_t x, std::size_t y) {
    return std::lexicographical_compare(data.begin() + x * arity, data.begin() + (x + 1) * arity,
                                        data.begin() + y * arity, data.begin() + (y + 1) * arity);
  };
  std::sort(idx.begin(), idx.end(), less);
  std::vector<int> out;
  out.reserve(data.size());
  for (std::size_t k = 0; k < m; ++k) {
    if (k > 0 && !less(idx[k - 1], idx[k])) continue;
    out.insert(out.end(), data.begin() + idx[k] * arity, data.begin() + (idx[k] + 1) * arity);
  }
  data = std::move(out);
}

bool Relation::contains(std::span<const int> t) const {
  std::size_t lo = 0, hi = size();
  while (lo < hi) {
    std::size_t mid = (lo + hi) / 2;
    auto row = tuple(mid);
    if (std::lexicographical_compare(row.begin(), row.end(), t.begin(), t.end()))
      lo = mid + 1;
    else
      hi = mid;
  }
  return lo < size() && std::equal(t.begin(), t.end(), tuple(lo).begin());
}

std::vector<Tuple> Relation::tuples() const {
  std::vector<Tuple> out;
  for (std::size_t i = 0; i < size(); ++i) {
    auto t = tuple(i);
    out.emplace_back(t.begin(), t.end());
  }
  return out;
}

const Relation* Structure::find(const std::string& name) const {
  for (const auto& r : relations)
    if (r.name == name) return &r;
  return nullptr;
}

Relation* Structure::find(const std::string& name) {
  for (auto& r : relations)
    if (r.name == name) return &r;
  return nullptr;
}

const Relation& Structure::rel(const std::string& name) const {
  const Relation* r = find(name);
  if (!r) throw Error("unknown_symbol", "unknown relation symbol " + name);
  return *r;
}

Relation& Structure::add_relation(const std::string& name, int arity) {
  if (find(name)) throw Error("invalid_argument", "duplicate relation symbol " + name);
  if (arity < 1) throw Error("invalid_argument", "arity must be positive for " + name);
  relations.push_back(Relation{name, arity, {}});
  return relations.back();
}

Signature Structure::signature() const {
  Signature s;
  for (const auto& r : relations) s.relations.emplace_back(r.name, r.arity);
  for (const auto& [c, e] : constants) s.constants.push_back(c);
  return s;
}

Tuple Structure::element_tuple(int e) const {
  if (factor_sizes.empty()) return {e};
  Tuple t(factor_sizes.size());
  int rest = e - 1;
  for (std::size_t i = factor_sizes.size(); i-- > 0;) {
    t[i] = rest % factor_sizes[i] + 1;
    rest /= factor_sizes[i];
  }
  return t;
}

int Structure::element_index(std::span<const int> coords) const {
  if (factor_sizes.empty()) return coords.empty() ? 0 : coords[0];
  int idx = 0;
  for (std::size_t i = 0; i < factor_sizes.size(); ++i) idx = idx * factor_sizes[i] + coords[i] - 1;
  return idx + 1;
}

Structure make_digraph(int n, const std::vector<std::pair<int, int>>& edges) {
  Structure g;
  g.n = n;
  auto& e = g.add_relation("E", 2);
  for (auto [a, b] : edges) e.add(std::vector<int>{a, b});
  e.normalize();
  return g;
}

std::string constant_name(int element) { return "c" + std::to_string(element); }

Structure with_all_constants(const Structure& A) {
  Structure B = A;
  for (int e = 1; e <= A.n; ++e) B.constants.emplace(constant_name(e), e);
  return B;
}

namespace {

class Lexer {
 public:
  explicit Lexer(const std::string& text) : s_(text) {}

  // Returns an empty string at end of input.
  std::string next() {
    skip();
    if (pos_ >= s_.size()) return {};
    char c = s_[pos_];
    if (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-') {
      std::size_t start = pos_;
      while (pos_ < s_.size() &&
             (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_' ||
              s_[pos_] == '-'))
        ++pos_;
      return s_.substr(start, pos_ - start);
    }
    ++pos_;
    return std::string(1, c);
  }
  std::string peek() {
    std::size_t p = pos_;
    int l = line_;
    std::string t = next();
    pos_ = p;
    line_ = l;
    return t;
  }
  void expect(const std::string& tok) {
    std::string t = next();
    if (t != tok) throw ParseError(line_, "expected '" + tok + "', found '" + t + "'");
  }
  int line() const { return line_; }

 private:
  void skip() {
    while (pos_ < s_.size()) {
      char c = s_[pos_];
      if (c == '\n') {
        ++line_;
        ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else if (c == '#') {
        while (pos_ < s_.size() && s_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }
  const std::string& s_;
  std::size_t pos_ = 0;
  int line_ = 1;
};

int parse_int(const std::string& tok, int line) {
  if (tok.empty() || !std::all_of(tok.begin(), tok.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }))
    throw ParseError(line, "expected a number, found '" + tok + "'");
  if (tok.size() > 9) throw ParseError(line, "number too large: " + tok);
  return std::stoi(tok);
}

bool is_ident(const std::string& tok) {
  return !tok.empty() && (std::isalpha(static_cast<unsigned char>(tok[0])) || tok[0] == '_');
}

}  // namespace

Structure parse_structure(const std::string& text) {
  Lexer lx(text);
  Structure A;
  lx.expect("domain");
  A.n = parse_int(lx.next(), lx.line());
  if (A.n < 1) throw ParseError(lx.line(), "domain must be nonempty");
  lx.expect(";");
  for (;;) {
    std::string kw = lx.next();
    if (kw.empty()) break;
    if (kw == "rel") {
      std::string name = lx.next();
      if (!is_ident(name)) throw ParseError(lx.line(), "bad relation name '" + name + "'");
      if (A.find(name)) throw ParseError(lx.line(), "duplicate relation " + name);
      lx.expect("/");
      int arity = parse_int(lx.next(), lx.line());
      if (arity < 1) throw ParseError(lx.line(), "arity must be positive");
      Relation& r = A.add_relation(name, arity);
      lx.expect("{");
      std::vector<int> cur;
      for (;;) {
        std::string t = lx.next();
        if (t.empty()) throw ParseError(lx.line(), "unterminated relation " + name);
        if (t == ";" || t == "}") {
          if (!cur.empty()) {
            if (static_cast<int>(cur.size()) != arity)
              throw ParseError(lx.line(), "tuple of length " + std::to_string(cur.size()) +
                                              " in relation " + name + "/" + std::to_string(arity));
            r.add(cur);
            cur.clear();
          }
          if (t == "}") break;
          continue;
        }
        int v = parse_int(t, lx.line());
        if (v < 1 || v > A.n)
          throw ParseError(lx.line(), "element " + t + " out of range 1.." + std::to_string(A.n));
        cur.push_back(v);
      }
      r.normalize();
      if (lx.peek() == ";") lx.next();
    } else if (kw == "const") {
      std::string name = lx.next();
      if (!is_ident(name)) throw ParseError(lx.line(), "bad constant name '" + name + "'");
      lx.expect("=");
      std::string t = lx.next();
      int v = parse_int(t, lx.line());
      if (v < 1 || v > A.n)
        throw ParseError(lx.line(), "element " + t + " out of range 1.." + std::to_string(A.n));
      if (!A.constants.emplace(name, v).second)
        throw ParseError(lx.line(), "duplicate constant " + name);
      lx.expect(";");
    } else {
      throw ParseError(lx.line(), "unknown symbol '" + kw + "'");
    }
  }
  return A;
}

std::string serialize_structure(const Structure& A) {
  std::ostringstream os;
  os << "domain " << A.n << ";\n";
  for (const auto& r0 : A.relations) {
    Relation r = r0;
    r.normalize();
    os << "rel " << r.name << "/" << r.arity << " {";
    for (std::size_t i = 0; i < r.size(); ++i) {
      os << (i ? "; " : " ");
      auto t = r.tuple(i);
      for (int j = 0; j < r.arity; ++j) os << (j ? " " : "") << t[j];
    }
    os << (r.size() ? " }\n" : "}\n");
  }
  for (const auto& [c, e] : A.constants) os << "const " << c << " = " << e << ";\n";
  return os.str();
}

Structure power_product(const std::vector<const Structure*>& factors, const Budget& budget) {
  if (factors.empty()) throw Error("invalid_argument", "power_product needs at least one factor");
  const Structure& F0 = *factors[0];
  Signature sig = F0.signature();
  std::size_t total = 1;
  for (const Structure* f : factors) {
    if (f->signature() != sig) throw Error("signature_mismatch", "factors have different signatures");
    total *= static_cast<std::size_t>(f->n);
    if (total > budget.max_elements) throw BudgetExceeded("elements", budget.max_elements, total);
  }
  std::size_t k = factors.size();
  Structure P;
  P.n = static_cast<int>(total);
  for (const Structure* f : factors) P.factor_sizes.push_back(f->n);
  std::vector<std::size_t> stride(k, 1);
  for (std::size_t i = k - 1; i-- > 0;) stride[i] = stride[i + 1] * factors[i + 1]->n;

  for (const auto& r0 : F0.relations) {
    int ar = r0.arity;
    std::size_t count = 1;
    bool empty = false;
    for (const Structure* f : factors) {
      std::size_t m = f->rel(r0.name).size();
      if (m == 0) empty = true;
      count *= std::max<std::size_t>(m, 1);
      if (count * ar > budget.max_tuples)
        throw BudgetExceeded("tuples", budget.max_tuples, count * ar);
    }
    Relation& R = P.add_relation(r0.name, ar);
    if (empty) continue;
    R.data.reserve(count * ar);
    // contrib[i][t*ar + j] = (R_i[t][j]-1) * stride_i
    std::vector<std::vector<int>> contrib(k);
    std::vector<std::size_t> sizes(k);
    for (std::size_t i = 0; i < k; ++i) {
      const Relation& Ri = factors[i]->rel(r0.name);
      sizes[i] = Ri.size();
      contrib[i].resize(Ri.data.size());
      for (std::size_t x = 0; x < Ri.data.size(); ++x)
        contrib[i][x] = static_cast<int>((Ri.data[x] - 1) * stride[i]);
    }
    std::vector<std::size_t> idx(k, 0);
    std::vector<int> partial((k + 1) * ar, 0);  // partial[(i+1)*ar + j] = sum over factors <= i
    auto recompute = [&](std::size_t from) {
      for (std::size_t i = from; i < k; ++i)
        for (int j = 0; j < ar; ++j)
          partial[(i + 1) * ar + j] = partial[i * ar + j] + contrib[i][idx[i] * ar + j];
    };
    recompute(0);
    for (;;) {
      for (int j = 0; j < ar; ++j) R.data.push_back(partial[k * ar + j] + 1);
      std::size_t i = k;
      bool done = true;
      while (i > 0) {
        --i;
        if (++idx[i] < sizes[i]) {
          done = false;
          break;
        }
        idx[i] = 0;
      }
      if (done) break;
      recompute(i);
    }
    R.normalize();
  }
  for (const auto& [c, e0] : F0.constants) {
    std::vector<int> coords;
    for (const Structure* f : factors) coords.push_back(f->constants.at(c));
    P.constants[c] = P.element_index(coords);
  }
  return P;
}

Structure power_product(const std::vector<Structure>& factors, const Budget& budget) {
  std::vector<const Structure*> ptrs;
  for (const auto& f : factors) ptrs.push_back(&f);
  return power_product(ptrs, budget);
}

Structure power(const Structure& A, int k, const Budget& budget) {
  std::vector<const Structure*> ptrs(static_cast<std::size_t>(k), &A);
  return power_product(ptrs, budget);
}

std::optional<std::vector<int>> find_homomorphism(const PinnedHomProblem& problem,
                                                  const Budget& budget) {
  HomSolver solver(*problem.source, *problem.target, budget);
  return solver.solve(problem.pins);
}

std::string format_atom(const Atom& a) {
  if (a.rel == "=") return a.args[0].name + " = " + a.args[1].name;
  std::string s = a.rel + "(";
  for (std::size_t i = 0; i < a.args.size(); ++i) s += (i ? "," : "") + a.args[i].name;
  return s + ")";
}

std::string format_conjunction(const std::vector<Atom>& atoms) {
  std::string s;
  for (std::size_t i = 0; i < atoms.size(); ++i) s += (i ? " & " : "") + format_atom(atoms[i]);
  return s;
}

Conjunction canonical_query(const Structure& A) {
  Conjunction q;
  for (int e = 1; e <= A.n; ++e) q.vars.push_back("x" + std::to_string(e));
  for (const auto& r : A.relations) {
    for (std::size_t i = 0; i < r.size(); ++i) {
      Atom a{r.name, {}};
      for (int v : r.tuple(i)) a.args.push_back(Term{false, q.vars[v - 1]});
      q.atoms.push_back(std::move(a));
    }
  }
  for (const auto& [c, e] : A.constants) q.constant_vars[c] = q.vars[e - 1];
  return q;
}

Structure canonical_database(const Conjunction& phi, const Signature& sig) {
  std::map<std::string, int> index;
  std::vector<std::string> names;
  auto elem = [&](const std::string& key) {
    auto [it, fresh] = index.emplace(key, static_cast<int>(names.size()) + 1);
    if (fresh) names.push_back(key);
    return it->second;
  };
  for (const auto& v : phi.vars) elem("v:" + v);
  Structure D;
  for (const auto& [r, ar] : sig.relations) D.add_relation(r, ar);
  for (const auto& a : phi.atoms) {
    if (a.rel == "=") throw Error("equality_atom", "canonical_database rejects equality atoms");
    Relation* R = D.find(a.rel);
    if (!R) throw Error("unknown_symbol", "undeclared relation symbol " + a.rel);
    if (static_cast<int>(a.args.size()) != R->arity)
      throw Error("arity_mismatch", "atom " + format_atom(a) + " has wrong arity");
    std::vector<int> t;
    for (const auto& term : a.args) t.push_back(elem((term.is_const ? "c:" : "v:") + term.name));
    R->add(t);
  }
  for (const auto& [c, v] : phi.constant_vars) elem("v:" + v);
  D.n = static_cast<int>(names.size());
  for (auto& r : D.relations) r.normalize();
  for (const auto& [key, e] : index)
    if (key.rfind("c:", 0) == 0) D.constants[key.substr(2)] = e;
  for (const auto& [c, v] : phi.constant_vars) D.constants[c] = index.at("v:" + v);
  return D;
}

std::optional<int> tuple_distance(const Structure& G, const Tuple& s, const Tuple& t) {
  if (s.size() != t.size()) throw Error("length_mismatch", "tuple_distance needs equal lengths");
  if (G.relations.size() != 1 || G.relations[0].arity != 2)
    throw Error("invalid_argument", "tuple_distance needs one binary relation");
  if (s == t) return 0;
  const Relation& E = G.relations[0];
  int n = G.n;
  std::vector<std::vector<int>> succ(n + 1);
  for (std::size_t i = 0; i < E.size(); ++i) succ[E.tuple(i)[0]].push_back(E.tuple(i)[1]);
  std::size_t m = s.size();
  std::vector<std::vector<char>> reach(m, std::vector<char>(n + 1, 0));
  for (std::size_t j = 0; j < m; ++j) reach[j][s[j]] = 1;
  int bound = n * static_cast<int>(std::max<std::size_t>(m, 1));
  for (int r = 1; r <= bound; ++r) {
    bool all = true;
    for (std::size_t j = 0; j < m; ++j) {
      std::vector<char> nxt(n + 1, 0);
      for (int v = 1; v <= n; ++v)
        if (reach[j][v])
          for (int w : succ[v]) nxt[w] = 1;
      reach[j] = std::move(nxt);
      if (!reach[j][t[j]]) all = false;
    }
    if (all) return r;
  }
  return std::nullopt;
}

}  // namespace qca
