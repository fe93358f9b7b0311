#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace sstdelay {

// States are opaque 64-bit handles; symbols are indices into the
// automaton's symbol set [0, num_symbols()).
using State = std::uint64_t;
using Symbol = int;
using SymWord = std::vector<Symbol>;

constexpr std::size_t kDefaultBudget = 1'000'000;

class Nfa {
 public:
  virtual ~Nfa() = default;
  virtual int num_symbols() const = 0;
  virtual std::vector<State> initial() const = 0;
  // Appends the successors of q on a to out.
  virtual void successors(State q, Symbol a, std::vector<State>& out) const = 0;
  virtual bool accepting(State q) const = 0;
  virtual std::string describe(State q) const { return std::to_string(q); }
  virtual std::string symbol_name(Symbol a) const { return std::to_string(a); }
};

using NfaPtr = std::shared_ptr<const Nfa>;

// Materialized automaton, states 0..n-1.
class ExplicitNfa : public Nfa {
 public:
  explicit ExplicitNfa(int nsyms) : nsyms_(nsyms) {}

  int add_state(bool accepting = false);
  void set_initial(int q) { initial_.push_back(q); }
  void set_accepting(int q, bool v = true) { accepting_.at(q) = v; }
  void add_transition(int from, Symbol a, int to);
  void set_label(int q, std::string s) { labels_.at(q) = std::move(s); }
  void set_symbol_names(std::vector<std::string> names) { symbol_names_ = std::move(names); }

  int num_states() const { return static_cast<int>(accepting_.size()); }

  int num_symbols() const override { return nsyms_; }
  std::vector<State> initial() const override;
  void successors(State q, Symbol a, std::vector<State>& out) const override;
  bool accepting(State q) const override { return accepting_.at(q); }
  std::string describe(State q) const override;
  std::string symbol_name(Symbol a) const override;

  std::size_t num_transitions() const;

 private:
  int nsyms_;
  std::vector<int> initial_;
  std::vector<char> accepting_;
  std::vector<std::vector<std::vector<int>>> delta_;  // [state][symbol] -> targets
  std::vector<std::string> labels_;
  std::vector<std::string> symbol_names_;
};

// Complete deterministic automaton; state -1 never occurs (a sink is
// materialized when needed).
class Dfa : public Nfa {
 public:
  Dfa(int nsyms) : nsyms_(nsyms) {}

  int add_state(bool accepting);
  void set_start(int q) { start_ = q; }
  void set_next(int q, Symbol a, int to) { delta_.at(q).at(a) = to; }
  int next(int q, Symbol a) const { return delta_[q][a]; }
  int start() const { return start_; }
  int num_states() const { return static_cast<int>(accepting_.size()); }
  bool is_accepting(int q) const { return accepting_[q]; }
  void set_accepting(int q, bool v) { accepting_[q] = v; }
  void set_label(int q, std::string s) { labels_.at(q) = std::move(s); }
  void set_symbol_names(std::vector<std::string> names) { symbol_names_ = std::move(names); }

  bool run(const SymWord& w) const;
  Dfa complement() const;

  int num_symbols() const override { return nsyms_; }
  std::vector<State> initial() const override { return {static_cast<State>(start_)}; }
  void successors(State q, Symbol a, std::vector<State>& out) const override {
    out.push_back(static_cast<State>(delta_[q][a]));
  }
  bool accepting(State q) const override { return accepting_[q]; }
  std::string describe(State q) const override;
  std::string symbol_name(Symbol a) const override;

 private:
  int nsyms_;
  int start_ = 0;
  std::vector<char> accepting_;
  std::vector<std::vector<int>> delta_;
  std::vector<std::string> labels_;
  std::vector<std::string> symbol_names_;
};

using DfaPtr = std::shared_ptr<const Dfa>;

// Thread-safe interning of structured keys into dense ids; used by lazy
// constructions whose states are tuples.
template <class Key, class Hash = std::hash<Key>>
class Interner {
 public:
  State intern(const Key& k) const {
    std::lock_guard<std::mutex> g(mu_);
    auto [it, fresh] = ids_.try_emplace(k, keys_.size());
    if (fresh) keys_.push_back(k);
    return it->second;
  }
  Key key(State id) const {
    std::lock_guard<std::mutex> g(mu_);
    return keys_.at(id);
  }
  std::size_t size() const {
    std::lock_guard<std::mutex> g(mu_);
    return keys_.size();
  }

 private:
  mutable std::mutex mu_;
  mutable std::unordered_map<Key, State, Hash> ids_;
  mutable std::vector<Key> keys_;
};

struct PairHash {
  std::size_t operator()(const std::pair<State, State>& p) const {
    return std::hash<State>()(p.first * 0x9e3779b97f4a7c15ULL ^ p.second);
  }
};

struct StateVecHash {
  std::size_t operator()(const std::vector<State>& v) const;
};

enum class ProductMode { kIntersection, kUnion };

// Lazy product. Union is a disjoint sum, so it also accepts automata that
// are not complete.
NfaPtr product(NfaPtr a, NfaPtr b, ProductMode mode);

// Lazy symbol morphisms. h maps source symbols to target symbols.
NfaPtr relabel_image(NfaPtr a, std::vector<Symbol> h, int target_nsyms);
NfaPtr relabel_preimage(NfaPtr a, std::vector<Symbol> h);

// x⁻¹L(a): words w with x·w ∈ L(a).
NfaPtr left_quotient(NfaPtr a, Symbol x);

// Reachable subset construction. Throws ResourceError past the budget.
Dfa determinize(const Nfa& a, std::size_t budget = kDefaultBudget);
Dfa determinize_complement(const Nfa& a, std::size_t budget = kDefaultBudget);

// Reachable part of a, as an explicit automaton.
ExplicitNfa materialize(const Nfa& a, std::size_t budget = kDefaultBudget);

bool accepts(const Nfa& a, const SymWord& w);

struct EmptinessResult {
  bool empty = true;
  SymWord witness;  // shortest accepted word when non-empty
  std::size_t explored = 0;
};
EmptinessResult emptiness_witness(const Nfa& a, std::size_t budget = kDefaultBudget);

struct InclusionResult {
  bool included = true;
  SymWord counterexample;  // shortest word in L(a) \ L(b)
  std::size_t explored = 0;
};
// L(a) ⊆ L(b) by on-the-fly subset exploration of b with antichain
// pruning. naive disables pruning (the test oracle).
InclusionResult inclusion(const Nfa& a, const Nfa& b,
                          std::size_t budget = kDefaultBudget, bool naive = false);

std::string to_dot(const Nfa& a, std::size_t budget = kDefaultBudget);

// Symbol-set equality check shared by the binary operations.
void require_same_symbols(const Nfa& a, const Nfa& b, const char* op);

}  // namespace sstdelay
