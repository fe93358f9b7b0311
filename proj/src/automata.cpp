#include "sstdelay/automata.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <sstream>
#include <unordered_set>

#include "sstdelay/errors.hpp"

namespace sstdelay {

std::size_t StateVecHash::operator()(const std::vector<State>& v) const {
  std::size_t h = v.size();
  for (State s : v) h ^= std::hash<State>()(s) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  return h;
}

int ExplicitNfa::add_state(bool acc) {
  accepting_.push_back(acc);
  delta_.emplace_back(nsyms_);
  labels_.emplace_back();
  return num_states() - 1;
}

void ExplicitNfa::add_transition(int from, Symbol a, int to) {
  auto& v = delta_.at(from).at(a);
  if (std::find(v.begin(), v.end(), to) == v.end()) v.push_back(to);
}

std::vector<State> ExplicitNfa::initial() const {
  return {initial_.begin(), initial_.end()};
}

void ExplicitNfa::successors(State q, Symbol a, std::vector<State>& out) const {
  for (int t : delta_.at(q).at(a)) out.push_back(static_cast<State>(t));
}

std::string ExplicitNfa::describe(State q) const {
  const auto& l = labels_.at(q);
  return l.empty() ? std::to_string(q) : l;
}

std::string ExplicitNfa::symbol_name(Symbol a) const {
  return a < static_cast<Symbol>(symbol_names_.size()) ? symbol_names_[a] : std::to_string(a);
}

std::size_t ExplicitNfa::num_transitions() const {
  std::size_t n = 0;
  for (const auto& row : delta_)
    for (const auto& v : row) n += v.size();
  return n;
}

int Dfa::add_state(bool acc) {
  accepting_.push_back(acc);
  delta_.emplace_back(nsyms_, -1);
  labels_.emplace_back();
  return num_states() - 1;
}

bool Dfa::run(const SymWord& w) const {
  int q = start_;
  for (Symbol a : w) q = delta_[q][a];
  return accepting_[q];
}

Dfa Dfa::complement() const {
  Dfa c = *this;
  for (auto& a : c.accepting_) a = !a;
  return c;
}

std::string Dfa::describe(State q) const {
  const auto& l = labels_.at(q);
  return l.empty() ? std::to_string(q) : l;
}

std::string Dfa::symbol_name(Symbol a) const {
  return a < static_cast<Symbol>(symbol_names_.size()) ? symbol_names_[a] : std::to_string(a);
}

void require_same_symbols(const Nfa& a, const Nfa& b, const char* op) {
  if (a.num_symbols() != b.num_symbols())
    throw StructuralError(std::string(op) + ": automata over different symbol sets");
}

namespace {

class Product : public Nfa {
 public:
  Product(NfaPtr a, NfaPtr b, ProductMode mode) : a_(std::move(a)), b_(std::move(b)), mode_(mode) {}

  int num_symbols() const override { return a_->num_symbols(); }

  std::vector<State> initial() const override {
    std::vector<State> out;
    if (mode_ == ProductMode::kIntersection) {
      for (State p : a_->initial())
        for (State q : b_->initial()) out.push_back(pairs_.intern({p, q}));
    } else {
      for (State p : a_->initial()) out.push_back(pairs_.intern({0, p}));
      for (State q : b_->initial()) out.push_back(pairs_.intern({1, q}));
    }
    return out;
  }

  void successors(State s, Symbol x, std::vector<State>& out) const override {
    auto [p, q] = pairs_.key(s);
    std::vector<State> sa, sb;
    if (mode_ == ProductMode::kIntersection) {
      a_->successors(p, x, sa);
      if (sa.empty()) return;
      b_->successors(q, x, sb);
      for (State u : sa)
        for (State v : sb) out.push_back(pairs_.intern({u, v}));
    } else {
      (p == 0 ? a_ : b_)->successors(q, x, sa);
      for (State u : sa) out.push_back(pairs_.intern({p, u}));
    }
  }

  bool accepting(State s) const override {
    auto [p, q] = pairs_.key(s);
    if (mode_ == ProductMode::kIntersection) return a_->accepting(p) && b_->accepting(q);
    return (p == 0 ? a_ : b_)->accepting(q);
  }

  std::string describe(State s) const override {
    auto [p, q] = pairs_.key(s);
    if (mode_ == ProductMode::kIntersection)
      return "(" + a_->describe(p) + ", " + b_->describe(q) + ")";
    return (p == 0 ? "L:" + a_->describe(q) : "R:" + b_->describe(q));
  }

  std::string symbol_name(Symbol x) const override { return a_->symbol_name(x); }

 private:
  NfaPtr a_, b_;
  ProductMode mode_;
  Interner<std::pair<State, State>, PairHash> pairs_;
};

class Image : public Nfa {
 public:
  Image(NfaPtr a, std::vector<Symbol> h, int n) : a_(std::move(a)), n_(n), inv_(n) {
    for (Symbol s = 0; s < static_cast<Symbol>(h.size()); ++s) inv_.at(h[s]).push_back(s);
  }
  int num_symbols() const override { return n_; }
  std::vector<State> initial() const override { return a_->initial(); }
  void successors(State q, Symbol x, std::vector<State>& out) const override {
    std::size_t base = out.size();
    for (Symbol s : inv_[x]) a_->successors(q, s, out);
    std::sort(out.begin() + base, out.end());
    out.erase(std::unique(out.begin() + base, out.end()), out.end());
  }
  bool accepting(State q) const override { return a_->accepting(q); }
  std::string describe(State q) const override { return a_->describe(q); }

 private:
  NfaPtr a_;
  int n_;
  std::vector<std::vector<Symbol>> inv_;
};

class Preimage : public Nfa {
 public:
  Preimage(NfaPtr a, std::vector<Symbol> h) : a_(std::move(a)), h_(std::move(h)) {}
  int num_symbols() const override { return static_cast<int>(h_.size()); }
  std::vector<State> initial() const override { return a_->initial(); }
  void successors(State q, Symbol x, std::vector<State>& out) const override {
    a_->successors(q, h_[x], out);
  }
  bool accepting(State q) const override { return a_->accepting(q); }
  std::string describe(State q) const override { return a_->describe(q); }

 private:
  NfaPtr a_;
  std::vector<Symbol> h_;
};

class Quotient : public Nfa {
 public:
  Quotient(NfaPtr a, Symbol x) : a_(std::move(a)), x_(x) {}
  int num_symbols() const override { return a_->num_symbols(); }
  std::vector<State> initial() const override {
    std::vector<State> out;
    for (State q : a_->initial()) a_->successors(q, x_, out);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }
  void successors(State q, Symbol x, std::vector<State>& out) const override {
    a_->successors(q, x, out);
  }
  bool accepting(State q) const override { return a_->accepting(q); }
  std::string describe(State q) const override { return a_->describe(q); }
  std::string symbol_name(Symbol x) const override { return a_->symbol_name(x); }

 private:
  NfaPtr a_;
  Symbol x_;
};

std::vector<State> normalize(std::vector<State> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

std::vector<State> step(const Nfa& a, const std::vector<State>& set, Symbol x) {
  std::vector<State> out;
  for (State q : set) a.successors(q, x, out);
  return normalize(std::move(out));
}

bool any_accepting(const Nfa& a, const std::vector<State>& set) {
  return std::any_of(set.begin(), set.end(), [&](State q) { return a.accepting(q); });
}

}  // namespace

NfaPtr product(NfaPtr a, NfaPtr b, ProductMode mode) {
  require_same_symbols(*a, *b, "product");
  return std::make_shared<Product>(std::move(a), std::move(b), mode);
}

NfaPtr relabel_image(NfaPtr a, std::vector<Symbol> h, int target_nsyms) {
  if (static_cast<int>(h.size()) != a->num_symbols())
    throw StructuralError("relabel_image: morphism is not total on the symbol set");
  for (Symbol s : h)
    if (s < 0 || s >= target_nsyms) throw StructuralError("relabel_image: target out of range");
  return std::make_shared<Image>(std::move(a), std::move(h), target_nsyms);
}

NfaPtr left_quotient(NfaPtr a, Symbol x) {
  if (x < 0 || x >= a->num_symbols()) throw StructuralError("left_quotient: symbol out of range");
  return std::make_shared<Quotient>(std::move(a), x);
}

NfaPtr relabel_preimage(NfaPtr a, std::vector<Symbol> h) {
  for (Symbol s : h)
    if (s < 0 || s >= a->num_symbols())
      throw StructuralError("relabel_preimage: morphism leaves the symbol set");
  return std::make_shared<Preimage>(std::move(a), std::move(h));
}

Dfa determinize(const Nfa& a, std::size_t budget) {
  const int n = a.num_symbols();
  Dfa d(n);
  std::unordered_map<std::vector<State>, int, StateVecHash> ids;
  std::deque<std::vector<State>> queue;
  auto id_of = [&](std::vector<State> set) {
    auto it = ids.find(set);
    if (it != ids.end()) return it->second;
    if (ids.size() >= budget) throw ResourceError("determinize", budget);
    int q = d.add_state(any_accepting(a, set));
    ids.emplace(set, q);
    queue.push_back(std::move(set));
    return q;
  };
  d.set_start(id_of(normalize(a.initial())));
  while (!queue.empty()) {
    auto set = std::move(queue.front());
    queue.pop_front();
    int q = ids.at(set);
    for (Symbol x = 0; x < n; ++x) d.set_next(q, x, id_of(step(a, set, x)));
  }
  return d;
}

Dfa determinize_complement(const Nfa& a, std::size_t budget) {
  return determinize(a, budget).complement();
}

ExplicitNfa materialize(const Nfa& a, std::size_t budget) {
  ExplicitNfa e(a.num_symbols());
  std::unordered_map<State, int> ids;
  std::deque<State> queue;
  auto id_of = [&](State q) {
    auto it = ids.find(q);
    if (it != ids.end()) return it->second;
    if (ids.size() >= budget) throw ResourceError("materialize", budget);
    int i = e.add_state(a.accepting(q));
    e.set_label(i, a.describe(q));
    ids.emplace(q, i);
    queue.push_back(q);
    return i;
  };
  for (State q : a.initial()) e.set_initial(id_of(q));
  std::vector<State> succ;
  while (!queue.empty()) {
    State q = queue.front();
    queue.pop_front();
    int from = ids.at(q);
    for (Symbol x = 0; x < a.num_symbols(); ++x) {
      succ.clear();
      a.successors(q, x, succ);
      for (State t : succ) e.add_transition(from, x, id_of(t));
    }
  }
  std::vector<std::string> names;
  for (Symbol x = 0; x < a.num_symbols(); ++x) names.push_back(a.symbol_name(x));
  e.set_symbol_names(std::move(names));
  return e;
}

bool accepts(const Nfa& a, const SymWord& w) {
  auto set = normalize(a.initial());
  for (Symbol x : w) {
    if (set.empty()) return false;
    set = step(a, set, x);
  }
  return any_accepting(a, set);
}

EmptinessResult emptiness_witness(const Nfa& a, std::size_t budget) {
  EmptinessResult r;
  std::unordered_map<State, std::pair<State, Symbol>> parent;
  std::deque<State> queue;
  std::unordered_set<State> roots;
  for (State q : a.initial())
    if (roots.insert(q).second) {
      parent.emplace(q, std::make_pair(q, -1));
      queue.push_back(q);
    }
  std::vector<State> succ;
  while (!queue.empty()) {
    State q = queue.front();
    queue.pop_front();
    ++r.explored;
    if (a.accepting(q)) {
      r.empty = false;
      for (State c = q; parent.at(c).second >= 0; c = parent.at(c).first)
        r.witness.push_back(parent.at(c).second);
      std::reverse(r.witness.begin(), r.witness.end());
      return r;
    }
    for (Symbol x = 0; x < a.num_symbols(); ++x) {
      succ.clear();
      a.successors(q, x, succ);
      for (State t : succ) {
        if (parent.count(t)) continue;
        if (parent.size() >= budget) throw ResourceError("emptiness", budget);
        parent.emplace(t, std::make_pair(q, x));
        queue.push_back(t);
      }
    }
  }
  return r;
}

InclusionResult inclusion(const Nfa& a, const Nfa& b, std::size_t budget, bool naive) {
  require_same_symbols(a, b, "inclusion");
  InclusionResult r;
  struct Node {
    State p;
    std::vector<State> set;
    int parent;
    Symbol via;
  };
  std::vector<Node> nodes;
  // Per a-state antichain of b-subsets (minimal sets kept).
  std::unordered_map<State, std::vector<int>> frontier;
  std::map<std::pair<State, std::vector<State>>, int> seen;  // naive mode

  auto subsumed = [&](State p, const std::vector<State>& set) {
    if (naive) return seen.count({p, set}) > 0;
    auto it = frontier.find(p);
    if (it == frontier.end()) return false;
    for (int i : it->second) {
      const auto& s = nodes[i].set;
      if (std::includes(set.begin(), set.end(), s.begin(), s.end())) return true;
    }
    return false;
  };
  auto add = [&](State p, std::vector<State> set, int parent, Symbol via) {
    if (subsumed(p, set)) return -1;
    if (nodes.size() >= budget) throw ResourceError("inclusion", budget);
    int id = static_cast<int>(nodes.size());
    if (naive) {
      seen.emplace(std::make_pair(p, set), id);
    } else {
      auto& lst = frontier[p];
      lst.erase(std::remove_if(lst.begin(), lst.end(),
                               [&](int i) {
                                 const auto& s = nodes[i].set;
                                 return std::includes(s.begin(), s.end(), set.begin(), set.end());
                               }),
                lst.end());
      lst.push_back(id);
    }
    nodes.push_back({p, std::move(set), parent, via});
    return id;
  };

  auto init_b = normalize(b.initial());
  std::deque<int> queue;
  for (State p : normalize(a.initial())) {
    int id = add(p, init_b, -1, -1);
    if (id >= 0) queue.push_back(id);
  }
  std::vector<State> succ;
  while (!queue.empty()) {
    int id = queue.front();
    queue.pop_front();
    ++r.explored;
    // Nodes superseded after they were queued are still expanded: their
    // replacement may sit deeper, and skipping them loses the shortest word.
    if (a.accepting(nodes[id].p) && !any_accepting(b, nodes[id].set)) {
      r.included = false;
      for (int c = id; nodes[c].parent >= 0; c = nodes[c].parent)
        r.counterexample.push_back(nodes[c].via);
      std::reverse(r.counterexample.begin(), r.counterexample.end());
      return r;
    }
    for (Symbol x = 0; x < a.num_symbols(); ++x) {
      succ.clear();
      a.successors(nodes[id].p, x, succ);
      if (succ.empty()) continue;
      auto next_set = step(b, nodes[id].set, x);
      for (State p : normalize(succ)) {
        int nid = add(p, next_set, id, x);
        if (nid >= 0) queue.push_back(nid);
      }
    }
  }
  return r;
}

std::string to_dot(const Nfa& a, std::size_t budget) {
  auto e = materialize(a, budget);
  std::ostringstream out;
  out << "digraph automaton {\n  rankdir=LR;\n";
  auto esc = [](std::string s) {
    std::string r;
    for (char c : s) {
      if (c == '"' || c == '\\') r += '\\';
      r += c;
    }
    return r;
  };
  for (int q = 0; q < e.num_states(); ++q)
    out << "  s" << q << " [label=\"" << esc(e.describe(q)) << "\""
        << (e.accepting(q) ? ", shape=doublecircle" : ", shape=circle") << "];\n";
  for (State q : e.initial()) out << "  init" << q << " [shape=point];\n  init" << q << " -> s" << q << ";\n";
  std::vector<State> succ;
  for (int q = 0; q < e.num_states(); ++q)
    for (Symbol x = 0; x < e.num_symbols(); ++x) {
      succ.clear();
      e.successors(q, x, succ);
      for (State t : succ)
        out << "  s" << q << " -> s" << t << " [label=\"" << esc(e.symbol_name(x)) << "\"];\n";
    }
  out << "}\n";
  return out.str();
}

}  // namespace sstdelay
