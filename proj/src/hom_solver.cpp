#include <algorithm>
#include <bit>

#include "qca/structures.hpp"

namespace qca {

namespace {

inline void set_bit(uint64_t* w, int a) { w[(a - 1) >> 6] |= uint64_t{1} << ((a - 1) & 63); }
inline bool test_bit(const uint64_t* w, int a) { return (w[(a - 1) >> 6] >> ((a - 1) & 63)) & 1; }

}  // namespace

HomSolver::HomSolver(const Structure& source, const Structure& target, const Budget& budget)
    : ns_(source.n), nt_(target.n), W_((target.n + 63) / 64), budget_(budget) {
  base_dom_.assign(static_cast<std::size_t>(ns_) * W_, 0);
  for (int v = 0; v < ns_; ++v)
    for (int a = 1; a <= nt_; ++a) set_bit(base_dom_.data() + static_cast<std::size_t>(v) * W_, a);
  watch_.resize(ns_);

  for (const auto& sr : source.relations) {
    const Relation* tr = target.find(sr.name);
    if (!tr || tr->arity != sr.arity)
      throw Error("signature_mismatch", "target lacks relation " + sr.name + "/" +
                                            std::to_string(sr.arity));
    if (sr.size() == 0) continue;
    if (tr->size() == 0) {
      unsat_ = true;
      continue;
    }
    if (sr.arity == 1) {
      std::vector<uint64_t> mask(W_, 0);
      for (std::size_t i = 0; i < tr->size(); ++i) set_bit(mask.data(), tr->tuple(i)[0]);
      for (std::size_t i = 0; i < sr.size(); ++i) {
        uint64_t* d = base_dom_.data() + static_cast<std::size_t>(sr.tuple(i)[0] - 1) * W_;
        for (int w = 0; w < W_; ++w) d[w] &= mask[w];
      }
      continue;
    }
    TargetRel T;
    T.arity = tr->arity;
    T.rel = tr;
    if (tr->arity == 2) {
      T.succ.assign(static_cast<std::size_t>(nt_ + 1) * W_, 0);
      T.pred.assign(static_cast<std::size_t>(nt_ + 1) * W_, 0);
      T.loops.assign(W_, 0);
      for (std::size_t i = 0; i < tr->size(); ++i) {
        int a = tr->tuple(i)[0], b = tr->tuple(i)[1];
        set_bit(T.succ.data() + static_cast<std::size_t>(a) * W_, b);
        set_bit(T.pred.data() + static_cast<std::size_t>(b) * W_, a);
        if (a == b) set_bit(T.loops.data(), a);
      }
    }
    int rid = static_cast<int>(trels_.size());
    trels_.push_back(std::move(T));
    for (std::size_t i = 0; i < sr.size(); ++i) {
      Constraint c{rid, static_cast<int>(scope_.size()), sr.arity};
      auto t = sr.tuple(i);
      for (int v : t) scope_.push_back(v - 1);
      int cid = static_cast<int>(cons_.size());
      cons_.push_back(c);
      for (int j = 0; j < sr.arity; ++j) {
        int v = t[j] - 1;
        if (watch_[v].empty() || watch_[v].back() != cid) watch_[v].push_back(cid);
      }
    }
  }
  for (const auto& [name, se] : source.constants) {
    auto it = target.constants.find(name);
    if (it == target.constants.end())
      throw Error("signature_mismatch", "target lacks constant " + name);
    uint64_t* d = base_dom_.data() + static_cast<std::size_t>(se - 1) * W_;
    bool had = test_bit(d, it->second);
    std::fill(d, d + W_, 0);
    if (had) set_bit(d, it->second);
  }
  dsize_.resize(ns_);
  in_queue_.assign(cons_.size(), 0);
}

bool HomSolver::contains(int var, int value) const { return test_bit(dom(var), value); }

void HomSolver::push_level() {
  level_marks_.push_back(trail_var_.size());
  cursor_marks_.push_back(cursor_);
}

void HomSolver::pop_level() {
  std::size_t mark = level_marks_.back();
  level_marks_.pop_back();
  cursor_ = cursor_marks_.back();
  cursor_marks_.pop_back();
  while (trail_var_.size() > mark) {
    int v = trail_var_.back();
    trail_var_.pop_back();
    uint64_t* d = dom(v);
    std::size_t base = trail_words_.size() - W_;
    int cnt = 0;
    for (int w = 0; w < W_; ++w) {
      d[w] = trail_words_[base + w];
      cnt += std::popcount(d[w]);
    }
    trail_words_.resize(base);
    dsize_[v] = cnt;
  }
}

// Intersects the domain of v with mask; records the old value on the trail.
// Returns false on wipe-out.
bool HomSolver::restrict_domain(int v, const uint64_t* mask) {
  uint64_t* d = dom(v);
  bool change = false;
  for (int w = 0; w < W_; ++w)
    if (d[w] & ~mask[w]) change = true;
  if (!change) return true;
  trail_var_.push_back(v);
  trail_words_.insert(trail_words_.end(), d, d + W_);
  int cnt = 0;
  for (int w = 0; w < W_; ++w) {
    d[w] &= mask[w];
    cnt += std::popcount(d[w]);
  }
  dsize_[v] = cnt;
  if (cnt == 0) return false;
  return true;
}

void HomSolver::enqueue_var(int v, int except) {
  for (int c : watch_[v]) {
    if (c == except || in_queue_[c]) continue;
    in_queue_[c] = 1;
    queue_.push_back(c);
  }
}

bool HomSolver::revise(int ci) {
  const Constraint& c = cons_[ci];
  const TargetRel& T = trels_[c.rel];
  const int* sc = scope_.data() + c.offset;
  std::vector<uint64_t> mask(W_);
  // A change can invalidate supports computed earlier in this revision, so the
  // constraint itself is requeued unless the change came from its last step.
  auto changed_then_enqueue = [&](int v, const uint64_t* m, bool last) {
    int before = dsize_[v];
    if (!restrict_domain(v, m)) return false;
    if (dsize_[v] != before) enqueue_var(v, last ? ci : -1);
    return true;
  };
  if (c.arity == 2) {
    int u = sc[0], v = sc[1];
    if (u == v) return changed_then_enqueue(u, T.loops.data(), true);
    // support for v from D(u)
    const uint64_t* du = dom(u);
    std::fill(mask.begin(), mask.end(), 0);
    for (int w = 0; w < W_; ++w) {
      uint64_t bits = du[w];
      while (bits) {
        int a = w * 64 + std::countr_zero(bits) + 1;
        bits &= bits - 1;
        const uint64_t* s = T.succ.data() + static_cast<std::size_t>(a) * W_;
        for (int x = 0; x < W_; ++x) mask[x] |= s[x];
      }
    }
    if (!changed_then_enqueue(v, mask.data(), true)) return false;
    const uint64_t* dv = dom(v);
    std::fill(mask.begin(), mask.end(), 0);
    for (int w = 0; w < W_; ++w) {
      uint64_t bits = dv[w];
      while (bits) {
        int b = w * 64 + std::countr_zero(bits) + 1;
        bits &= bits - 1;
        const uint64_t* p = T.pred.data() + static_cast<std::size_t>(b) * W_;
        for (int x = 0; x < W_; ++x) mask[x] |= p[x];
      }
    }
    return changed_then_enqueue(u, mask.data(), false);
  }
  // General arity: scan target tuples for supports.
  const Relation& R = *T.rel;
  std::vector<uint64_t> supp(static_cast<std::size_t>(c.arity) * W_, 0);
  for (std::size_t i = 0; i < R.size(); ++i) {
    auto t = R.tuple(i);
    bool ok = true;
    for (int j = 0; j < c.arity && ok; ++j) {
      if (!test_bit(dom(sc[j]), t[j])) ok = false;
      for (int l = 0; l < j && ok; ++l)
        if (sc[l] == sc[j] && t[l] != t[j]) ok = false;
    }
    if (!ok) continue;
    for (int j = 0; j < c.arity; ++j) set_bit(supp.data() + static_cast<std::size_t>(j) * W_, t[j]);
  }
  for (int j = 0; j < c.arity; ++j)
    if (!changed_then_enqueue(sc[j], supp.data() + static_cast<std::size_t>(j) * W_, false))
      return false;
  return true;
}

bool HomSolver::propagate() {
  while (!queue_.empty()) {
    int c = queue_.back();
    queue_.pop_back();
    in_queue_[c] = 0;
    if (!revise(c)) {
      for (int q : queue_) in_queue_[q] = 0;
      queue_.clear();
      return false;
    }
  }
  return true;
}

bool HomSolver::assign(int v, int value) {
  std::vector<uint64_t> mask(W_, 0);
  set_bit(mask.data(), value);
  if (!restrict_domain(v, mask.data())) return false;
  enqueue_var(v, -1);
  return propagate();
}

bool HomSolver::reset(const Pins& pins) {
  trail_var_.clear();
  trail_words_.clear();
  level_marks_.clear();
  cursor_marks_.clear();
  cursor_ = 0;
  queue_.clear();
  std::fill(in_queue_.begin(), in_queue_.end(), 0);
  nodes_ = 0;
  if (unsat_) return false;
  // Arc consistency without pins is computed once and reused by later calls.
  if (!closed_) {
    dom_ = base_dom_;
    recount();
    for (int v = 0; v < ns_; ++v)
      if (dsize_[v] == 0) unsat_ = true;
    for (std::size_t c = 0; c < cons_.size() && !unsat_; ++c) {
      in_queue_[c] = 1;
      queue_.push_back(static_cast<int>(c));
    }
    if (!unsat_ && !propagate()) unsat_ = true;
    trail_var_.clear();
    trail_words_.clear();
    closed_dom_ = dom_;
    closed_ = true;
    if (unsat_) return false;
  } else {
    dom_ = closed_dom_;
    recount();
  }
  for (auto [s, t] : pins) {
    if (s < 1 || s > ns_ || t < 1 || t > nt_)
      throw Error("invalid_argument", "pin out of range");
    std::vector<uint64_t> mask(W_, 0);
    set_bit(mask.data(), t);
    if (!restrict_domain(s - 1, mask.data())) return false;
    enqueue_var(s - 1, -1);
  }
  if (!propagate()) return false;
  return !extra_ || extra_(*this);
}

void HomSolver::recount() {
  for (int v = 0; v < ns_; ++v) {
    int cnt = 0;
    for (int w = 0; w < W_; ++w) cnt += std::popcount(dom(v)[w]);
    dsize_[v] = cnt;
  }
}

int HomSolver::choose_var() {
  // Variables before the cursor are fixed at this level and stay fixed below it.
  while (cursor_ < ns_ && dsize_[cursor_] <= 1) ++cursor_;
  if (cursor_ == ns_) return -1;
  if (lex_order_) return cursor_;
  // Smallest domain among the next few undecided variables.
  int best = -1, bs = 0, seen = 0;
  for (int v = cursor_; v < ns_ && seen < 64; ++v) {
    int s = dsize_[v];
    if (s <= 1) continue;
    ++seen;
    if (best < 0 || s < bs) {
      best = v;
      bs = s;
      if (s == 2) break;
    }
  }
  return best;
}

bool HomSolver::search(const std::function<bool(const std::vector<int>&)>& cb, bool& stop,
                       std::size_t& count) {
  // Explicit stack: sources can have tens of thousands of variables.
  struct Frame {
    int v;
    std::vector<int> values;
    std::size_t next = 0;
    bool pushed = false;
  };
  std::vector<Frame> stack;
  bool found = false;
  auto expand = [&]() {
    int v = choose_var();
    if (v < 0) {
      std::vector<int> sol(ns_);
      for (int x = 0; x < ns_; ++x) {
        const uint64_t* d = dom(x);
        for (int w = 0; w < W_; ++w)
          if (d[w]) {
            sol[x] = w * 64 + std::countr_zero(d[w]) + 1;
            break;
          }
      }
      ++count;
      found = true;
      if (!cb(sol)) stop = true;
      return;
    }
    Frame f{v, {}};
    for (int a = 1; a <= nt_; ++a)
      if (test_bit(dom(v), a)) f.values.push_back(a);
    stack.push_back(std::move(f));
  };
  expand();
  while (!stack.empty() && !stop) {
    Frame& f = stack.back();
    if (f.pushed) {
      pop_level();
      f.pushed = false;
    }
    if (f.next == f.values.size()) {
      stack.pop_back();
      continue;
    }
    int v = f.v, a = f.values[f.next++];
    if (++nodes_ > budget_.max_nodes) {
      while (!stack.empty()) {
        if (stack.back().pushed) pop_level();
        stack.pop_back();
      }
      throw BudgetExceeded("nodes", budget_.max_nodes, nodes_);
    }
    push_level();
    f.pushed = true;
    if (assign(v, a) && (!extra_ || extra_(*this))) expand();
  }
  while (!stack.empty()) {
    if (stack.back().pushed) pop_level();
    stack.pop_back();
  }
  return found;
}

std::optional<std::vector<int>> HomSolver::solve(const Pins& pins) {
  std::optional<std::vector<int>> result;
  enumerate(pins, [&](const std::vector<int>& sol) {
    result = sol;
    return false;
  });
  return result;
}

std::size_t HomSolver::enumerate(const Pins& pins,
                                 const std::function<bool(const std::vector<int>&)>& cb) {
  std::size_t count = 0;
  if (!reset(pins)) return 0;
  bool stop = false;
  search(cb, stop, count);
  return count;
}

}  // namespace qca
