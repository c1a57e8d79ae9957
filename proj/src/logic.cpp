#include "qca/logic.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <sstream>
#include <unordered_map>

namespace qca {

int PHSentence::num_universals() const {
  return static_cast<int>(std::count_if(prefix.begin(), prefix.end(),
                                        [](const auto& q) { return q.first == Quant::Forall; }));
}

int PHSentence::num_existentials() const {
  return static_cast<int>(prefix.size()) - num_universals();
}

bool PHSentence::has_equality() const {
  return std::any_of(atoms.begin(), atoms.end(), [](const Atom& a) { return a.rel == "="; });
}

std::vector<std::string> PHSentence::universals() const {
  std::vector<std::string> out;
  for (const auto& [q, v] : prefix)
    if (q == Quant::Forall) out.push_back(v);
  return out;
}

std::string PHSentence::to_string() const {
  std::string s;
  for (const auto& [q, v] : prefix) s += (q == Quant::Forall ? "forall " : "exists ") + v + " ";
  s += ":";
  if (!atoms.empty()) s += " " + format_conjunction(atoms);
  return s;
}

namespace {

std::vector<std::string> tokenize(const std::string& text) {
  std::vector<std::string> toks;
  std::size_t i = 0;
  while (i < text.size()) {
    unsigned char c = static_cast<unsigned char>(text[i]);
    if (std::isspace(c)) {
      ++i;
    } else if (std::isalnum(c) || c == '_') {
      std::size_t j = i;
      while (j < text.size() &&
             (std::isalnum(static_cast<unsigned char>(text[j])) || text[j] == '_'))
        ++j;
      toks.push_back(text.substr(i, j - i));
      i = j;
    } else if (std::string("(),:&=").find(static_cast<char>(c)) != std::string::npos) {
      toks.emplace_back(1, static_cast<char>(c));
      ++i;
    } else {
      throw Error("parse_error", std::string("unexpected character '") + static_cast<char>(c) + "'");
    }
  }
  return toks;
}

}  // namespace

PHSentence parse_sentence(const std::string& text, const Signature& sig, bool allow_equality) {
  auto toks = tokenize(text);
  std::size_t pos = 0;
  auto peek = [&]() -> std::string { return pos < toks.size() ? toks[pos] : std::string(); };
  auto next = [&]() -> std::string {
    if (pos >= toks.size()) throw Error("parse_error", "unexpected end of sentence");
    return toks[pos++];
  };
  auto expect = [&](const std::string& t) {
    std::string got = next();
    if (got != t) throw Error("parse_error", "expected '" + t + "', found '" + got + "'");
  };
  PHSentence phi;
  std::set<std::string> vars;
  while (peek() == "forall" || peek() == "exists") {
    Quant q = next() == "forall" ? Quant::Forall : Quant::Exists;
    std::string v = next();
    if (!std::isalpha(static_cast<unsigned char>(v[0])) && v[0] != '_')
      throw Error("parse_error", "bad variable name '" + v + "'");
    if (!vars.insert(v).second) throw Error("parse_error", "variable " + v + " quantified twice");
    phi.prefix.emplace_back(q, v);
  }
  expect(":");
  std::set<std::string> consts(sig.constants.begin(), sig.constants.end());
  auto term = [&]() -> Term {
    std::string t = next();
    if (vars.count(t)) return Term{false, t};
    if (consts.count(t)) return Term{true, t};
    throw Error("free_variable", "free variable or unknown constant '" + t + "'");
  };
  if (pos == toks.size()) return phi;
  for (;;) {
    std::string first = peek();
    if (pos + 1 < toks.size() && toks[pos + 1] == "(") {
      std::string name = next();
      auto it = std::find_if(sig.relations.begin(), sig.relations.end(),
                             [&](const auto& r) { return r.first == name; });
      if (it == sig.relations.end()) throw Error("unknown_symbol", "unknown relation " + name);
      expect("(");
      Atom a{name, {}};
      if (peek() != ")") {
        a.args.push_back(term());
        while (peek() == ",") {
          next();
          a.args.push_back(term());
        }
      }
      expect(")");
      if (static_cast<int>(a.args.size()) != it->second)
        throw Error("arity_mismatch", "relation " + name + " has arity " + std::to_string(it->second));
      phi.atoms.push_back(std::move(a));
    } else {
      Term l = term();
      expect("=");
      Term r = term();
      if (!allow_equality) throw Error("equality_atom", "equality atoms are disabled");
      phi.atoms.push_back(Atom{"=", {l, r}});
    }
    if (pos == toks.size()) break;
    expect("&");
  }
  return phi;
}

Adversary Adversary::from_tuples(int m, std::vector<Tuple> tuples) {
  for (const auto& t : tuples)
    if (static_cast<int>(t.size()) != m) throw Error("length_mismatch", "adversary tuple length");
  std::sort(tuples.begin(), tuples.end());
  tuples.erase(std::unique(tuples.begin(), tuples.end()), tuples.end());
  return Adversary{m, std::move(tuples), std::nullopt};
}

Adversary Adversary::rectangular(const std::vector<std::vector<int>>& factors) {
  std::vector<Tuple> out{{}};
  for (const auto& f : factors) {
    if (f.empty()) throw Error("invalid_argument", "empty factor in rectangular adversary");
    std::vector<Tuple> nxt;
    for (const auto& t : out)
      for (int v : f) {
        Tuple u = t;
        u.push_back(v);
        nxt.push_back(std::move(u));
      }
    out = std::move(nxt);
  }
  Adversary a = from_tuples(static_cast<int>(factors.size()), std::move(out));
  std::vector<std::vector<int>> fs = factors;
  for (auto& f : fs) {
    std::sort(f.begin(), f.end());
    f.erase(std::unique(f.begin(), f.end()), f.end());
  }
  a.factors = std::move(fs);
  return a;
}

bool Adversary::contains(const Tuple& t) const {
  return std::binary_search(tuples.begin(), tuples.end(), t);
}

std::size_t AdversarySet::width() const {
  std::size_t w = 0;
  for (const auto& a : adversaries) w += a.size();
  return w;
}

std::vector<Tuple> AdversarySet::union_tuples() const {
  std::vector<Tuple> all;
  for (const auto& a : adversaries) all.insert(all.end(), a.tuples.begin(), a.tuples.end());
  std::sort(all.begin(), all.end());
  all.erase(std::unique(all.begin(), all.end()), all.end());
  return all;
}

AdversarySet full_adversary(int n, int m) {
  std::vector<int> all;
  for (int a = 1; a <= n; ++a) all.push_back(a);
  return AdversarySet{m, {Adversary::rectangular(std::vector<std::vector<int>>(m, all))}};
}

namespace {

struct VecHash {
  std::size_t operator()(const std::vector<int>& v) const {
    std::size_t h = 1469598103934665603ull;
    for (int x : v) h = (h ^ static_cast<std::size_t>(x)) * 1099511628211ull;
    return h;
  }
};

struct Trie {
  std::vector<std::vector<std::pair<int, int>>> children{{}};
  explicit Trie(const std::vector<Tuple>& tuples) {
    for (const auto& t : tuples) {
      int node = 0;
      for (int v : t) {
        auto& ch = children[node];
        auto it = std::find_if(ch.begin(), ch.end(), [&](const auto& p) { return p.first == v; });
        if (it != ch.end()) {
          node = it->second;
        } else {
          int fresh = static_cast<int>(children.size());
          children[node].push_back({v, fresh});
          children.emplace_back();
          node = fresh;
        }
      }
    }
    for (auto& ch : children) std::sort(ch.begin(), ch.end());
  }
};

// Game evaluation of a pH-sentence. Prefix positions before the trailing
// existential block are played out explicitly; the trailing block is a
// pinned CSP solved at each leaf.
class Game {
 public:
  Game(const Structure& A, const PHSentence& phi, const Budget& budget)
      : A_(A), phi_(phi), budget_(budget) {
    int V = static_cast<int>(phi.prefix.size());
    std::map<std::string, int> index;
    for (int i = 0; i < V; ++i) {
      index[phi.prefix[i].second] = i;
      universal_.push_back(phi.prefix[i].first == Quant::Forall);
    }
    L_ = 0;
    for (int i = 0; i < V; ++i)
      if (universal_[i]) L_ = i + 1;
    vals_.assign(V, 0);
    at_.resize(L_ + 1);

    for (const auto& a : phi.atoms) {
      CAtom c;
      if (a.rel != "=") {
        c.rel = &A.rel(a.rel);
        if (static_cast<int>(a.args.size()) != c.rel->arity)
          throw Error("arity_mismatch", "atom " + format_atom(a));
      }
      int maxv = -1;
      for (const auto& t : a.args) {
        if (t.is_const) {
          auto it = A.constants.find(t.name);
          if (it == A.constants.end()) throw Error("missing_constant", "constant " + t.name);
          c.var.push_back(-1);
          c.cval.push_back(it->second);
        } else {
          auto it = index.find(t.name);
          if (it == index.end()) throw Error("free_variable", "free variable " + t.name);
          c.var.push_back(it->second);
          c.cval.push_back(0);
          maxv = std::max(maxv, it->second);
        }
      }
      if (maxv >= L_) {
        trailing_.push_back(c);
      } else if (maxv < 0) {
        at_[L_].push_back(c);  // constant-only atoms are checked at the leaf
      } else {
        at_[maxv].push_back(c);
      }
      // relevance: variables mentioned by an atom stay in the memo key until maxv is assigned
      for (int v : c.var)
        if (v >= 0) relevant_until_.push_back({v, maxv});
    }
    relevant_.resize(L_ + 1);
    for (int d = 0; d <= L_; ++d) {
      std::set<int> s;
      for (auto [v, until] : relevant_until_)
        if (v < d && until >= d) s.insert(v);
      relevant_[d].assign(s.begin(), s.end());
    }
    build_leaf();
  }

  bool run(const Trie* trie) {
    trie_ = trie;
    memo_.clear();
    return rec(0, 0);
  }

  // For universal-free sentences: satisfying assignment of all variables.
  std::optional<std::map<std::string, int>> pp_witness() {
    std::vector<int> sol;
    if (!leaf(&sol)) return std::nullopt;
    std::map<std::string, int> w;
    for (int i = 0; i < static_cast<int>(phi_.prefix.size()); ++i)
      w[phi_.prefix[i].second] = sol[class_of_[i] - 1];
    return w;
  }

  std::size_t nodes() const { return nodes_; }

 private:
  struct CAtom {
    const Relation* rel = nullptr;  // null for equality
    std::vector<int> var;           // -1 for constants
    std::vector<int> cval;
  };

  int value(const CAtom& c, int j) const { return c.var[j] < 0 ? c.cval[j] : vals_[c.var[j]]; }

  bool holds(const CAtom& c) const {
    if (!c.rel) return value(c, 0) == value(c, 1);
    std::vector<int> t(c.var.size());
    for (std::size_t j = 0; j < t.size(); ++j) t[j] = value(c, static_cast<int>(j));
    return c.rel->contains(t);
  }

  void count_node(std::size_t k = 1) {
    nodes_ += k;
    if (nodes_ > budget_.max_nodes) throw BudgetExceeded("nodes", budget_.max_nodes, nodes_);
  }

  // Trailing block: union-find over trailing variables, extra elements for
  // earlier variables and constants, pins filled in per leaf.
  void build_leaf() {
    int V = static_cast<int>(phi_.prefix.size());
    std::vector<int> parent(V);
    for (int i = 0; i < V; ++i) parent[i] = i;
    std::function<int(int)> find = [&](int x) { return parent[x] == x ? x : parent[x] = find(parent[x]); };
    for (const auto& c : trailing_)
      if (!c.rel && c.var[0] >= L_ && c.var[1] >= L_) parent[find(c.var[0])] = find(c.var[1]);
    class_of_.assign(V, 0);
    int next = 0;
    for (int i = L_; i < V; ++i)
      if (find(i) == i) class_of_[i] = ++next;
    for (int i = L_; i < V; ++i) class_of_[i] = class_of_[find(i)];
    std::map<int, int> early_elem, const_elem;
    auto elem_for = [&](const CAtom& c, int j) {
      int v = c.var[j];
      if (v >= L_) return class_of_[v];
      if (v >= 0) {
        auto [it, fresh] = early_elem.emplace(v, 0);
        if (fresh) it->second = ++next;
        return it->second;
      }
      auto [it, fresh] = const_elem.emplace(c.cval[j], 0);
      if (fresh) it->second = ++next;
      return it->second;
    };
    Structure S;
    for (const auto& c : trailing_) {
      if (!c.rel) {
        // trailing var tied to an earlier variable or a constant
        int t = c.var[0] >= L_ ? 0 : 1;
        int o = 1 - t;
        if (c.var[o] >= L_) continue;
        int e = class_of_[c.var[t]];
        if (c.var[o] >= 0)
          early_pins_.push_back({e, c.var[o]});
        else
          fixed_pins_.push_back({e, c.cval[o]});
        continue;
      }
      Relation* R = S.find(c.rel->name);
      if (!R) R = &S.add_relation(c.rel->name, c.rel->arity);
      std::vector<int> t;
      for (std::size_t j = 0; j < c.var.size(); ++j) t.push_back(elem_for(c, static_cast<int>(j)));
      R->add(t);
    }
    for (auto& r : S.relations) r.normalize();
    for (auto [v, e] : early_elem) early_pins_.push_back({e, v});
    for (auto [val, e] : const_elem) fixed_pins_.push_back({e, val});
    S.n = next;
    leaf_source_ = std::move(S);
    if (leaf_source_.n > 0) solver_.emplace(leaf_source_, A_, budget_);
  }

  bool leaf(std::vector<int>* sol = nullptr) {
    for (const auto& c : at_[L_])
      if (c.var.empty() || std::all_of(c.var.begin(), c.var.end(), [](int v) { return v < 0; }))
        if (!holds(c)) return false;
    if (!solver_) return true;
    HomSolver::Pins pins = fixed_pins_;
    for (auto [e, v] : early_pins_) pins.push_back({e, vals_[v]});
    auto r = solver_->solve(pins);
    count_node(solver_->nodes());
    if (r && sol) *sol = *r;
    return r.has_value();
  }

  bool check_at(int d) const {
    for (const auto& c : at_[d])
      if (!holds(c)) return false;
    return true;
  }

  bool rec(int d, int node) {
    if (d == L_) return leaf();
    std::vector<int> key{d, node};
    for (int v : relevant_[d]) key.push_back(vals_[v]);
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;
    bool res;
    if (universal_[d]) {
      res = true;
      if (trie_) {
        for (auto [a, child] : trie_->children[node]) {
          count_node();
          vals_[d] = a;
          if (!check_at(d) || !rec(d + 1, child)) {
            res = false;
            break;
          }
        }
      } else {
        for (int a = 1; a <= A_.n && res; ++a) {
          count_node();
          vals_[d] = a;
          if (!check_at(d) || !rec(d + 1, node)) res = false;
        }
      }
    } else {
      res = false;
      for (int a = 1; a <= A_.n && !res; ++a) {
        count_node();
        vals_[d] = a;
        if (check_at(d) && rec(d + 1, node)) res = true;
      }
    }
    memo_.emplace(std::move(key), res);
    return res;
  }

  const Structure& A_;
  const PHSentence& phi_;
  Budget budget_;
  std::vector<bool> universal_;
  int L_ = 0;
  std::vector<int> vals_;
  std::vector<std::vector<CAtom>> at_;
  std::vector<CAtom> trailing_;
  std::vector<std::pair<int, int>> relevant_until_;
  std::vector<std::vector<int>> relevant_;
  std::vector<int> class_of_;
  std::vector<std::pair<int, int>> early_pins_;  // (leaf element, earlier variable)
  HomSolver::Pins fixed_pins_;
  Structure leaf_source_;
  std::optional<HomSolver> solver_;
  const Trie* trie_ = nullptr;
  std::unordered_map<std::vector<int>, bool, VecHash> memo_;
  std::size_t nodes_ = 0;
};

}  // namespace

PPResult solve_pp(const Structure& A, const PHSentence& phi, const Budget& budget) {
  if (phi.num_universals() > 0) throw Error("invalid_argument", "solve_pp needs a universal-free sentence");
  Game g(A, phi, budget);
  PPResult r;
  auto w = g.pp_witness();
  if (w) {
    r.sat = true;
    r.witness = std::move(*w);
  }
  return r;
}

bool solve_qcsp(const Structure& A, const PHSentence& phi, const Budget& budget) {
  Game g(A, phi, budget);
  return g.run(nullptr);
}

bool models_restricted(const Structure& A, const PHSentence& phi, const AdversarySet& omega,
                       const Budget& budget) {
  int m = phi.num_universals();
  if (omega.m != m) throw Error("length_mismatch", "adversary length differs from universal count");
  Game g(A, phi, budget);
  for (const auto& adv : omega.adversaries) {
    if (adv.m != m) throw Error("length_mismatch", "adversary length differs from universal count");
    if (adv.tuples.empty()) continue;  // nothing to win against
    Trie trie(adv.tuples);
    if (!g.run(&trie)) return false;
  }
  return true;
}

PHSentence instantiate_universals(const PHSentence& phi, const std::map<std::string, int>& rho) {
  std::set<std::string> uni;
  for (const auto& [q, v] : phi.prefix)
    if (q == Quant::Forall) uni.insert(v);
  for (const auto& [v, a] : rho)
    if (!uni.count(v)) throw Error("invalid_argument", v + " is not a universal variable");
  PHSentence out;
  for (const auto& qv : phi.prefix)
    if (!rho.count(qv.second)) out.prefix.push_back(qv);
  for (Atom a : phi.atoms) {
    for (auto& t : a.args) {
      if (t.is_const) continue;
      auto it = rho.find(t.name);
      if (it != rho.end()) t = Term{true, constant_name(it->second)};
    }
    out.atoms.push_back(std::move(a));
  }
  return out;
}

CSPReduct qcsp_to_csp(const Structure& A, const PHSentence& phi, const AdversarySet& omega) {
  if (phi.has_equality()) throw Error("equality_atom", "qcsp_to_csp needs equality-free sentences");
  int m = phi.num_universals();
  if (omega.m != m) throw Error("length_mismatch", "adversary length differs from universal count");
  std::map<int, std::string> name_of;
  for (const auto& [c, e] : A.constants)
    if (!name_of.count(e) || c == constant_name(e)) name_of[e] = c;
  for (const auto& t : omega.union_tuples())
    for (int v : t)
      if (!name_of.count(v))
        throw Error("missing_constant", "no constant names element " + std::to_string(v));

  // position of each universal, and number of universals preceding each existential
  std::map<std::string, int> uni_pos, ell;
  int seen = 0;
  for (const auto& [q, v] : phi.prefix) {
    if (q == Quant::Forall)
      uni_pos[v] = seen++;
    else
      ell[v] = seen;
  }
  auto copy_name = [&](const std::string& x, std::size_t k, const Tuple& t) {
    std::string s = x;
    if (k > 0) s += "__k" + std::to_string(k);
    int l = ell.at(x);
    if (l > 0) {
      s += "_";
      for (int i = 0; i < l; ++i) s += "_" + std::to_string(t[i]);
    }
    return s;
  };

  CSPReduct r;
  std::set<std::string> declared;
  for (std::size_t k = 0; k < omega.adversaries.size(); ++k) {
    const auto& adv = omega.adversaries[k];
    std::map<std::pair<std::string, Tuple>, Tuple> first_with_prefix;
    for (const auto& t : adv.tuples) {
      PHSentence inst;
      for (const auto& [q, v] : phi.prefix) {
        if (q != Quant::Exists) continue;
        std::string cn = copy_name(v, k, t);
        inst.prefix.emplace_back(Quant::Exists, cn);
        Tuple pre(t.begin(), t.begin() + ell[v]);
        auto [it, fresh] = first_with_prefix.emplace(std::make_pair(v, pre), t);
        if (!fresh) {
          int shared = 0;
          while (shared < m && it->second[shared] == t[shared]) ++shared;
          r.merges.push_back({static_cast<int>(k), v, it->second, t, shared});
        }
      }
      for (Atom a : phi.atoms) {
        for (auto& term : a.args) {
          if (term.is_const) continue;
          auto u = uni_pos.find(term.name);
          if (u != uni_pos.end())
            term = Term{true, name_of.at(t[u->second])};
          else
            term = Term{false, copy_name(term.name, k, t)};
        }
        inst.atoms.push_back(std::move(a));
      }
      for (const auto& qv : inst.prefix)
        if (declared.insert(qv.second).second) r.combined.prefix.push_back(qv);
      r.combined.atoms.insert(r.combined.atoms.end(), inst.atoms.begin(), inst.atoms.end());
      r.instances.push_back(std::move(inst));
    }
  }
  return r;
}

bool reduct_satisfiable(const Structure& A, const CSPReduct& r, const Budget& budget) {
  return solve_pp(A, r.combined, budget).sat;
}

std::string CSPReduct::serialize(const Structure& A) const {
  Conjunction c;
  for (const auto& [q, v] : combined.prefix) c.vars.push_back(v);
  c.atoms = combined.atoms;
  Structure D = canonical_database(c, A.signature());
  std::ostringstream os;
  os << serialize_structure(D);
  for (std::size_t i = 0; i < c.vars.size(); ++i) os << "# var " << (i + 1) << " = " << c.vars[i] << "\n";
  auto fmt = [](const Tuple& t) {
    std::string s = "(";
    for (std::size_t i = 0; i < t.size(); ++i) s += (i ? "," : "") + std::to_string(t[i]);
    return s + ")";
  };
  for (const auto& mg : merges)
    os << "# merged: adversary " << mg.adversary << " " << mg.var << fmt(mg.kept) << " = "
       << mg.var << fmt(mg.merged) << " shared prefix " << mg.shared_prefix << "\n";
  return os.str();
}

}  // namespace qca
