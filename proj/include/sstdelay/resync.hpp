#pragma once

#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "sstdelay/automata.hpp"
#include "sstdelay/delay.hpp"

namespace sstdelay {

// Which witness a run of the characterization automaton looks for.
//   X: i is 0 or a common cut with max-diff_i ≤ k, and the next cuts j1, j2
//      after i differ or have max-diff_{j1,j2} > k.
//   M(d): i as above and out_λ[i+d] ≠ out_μ[i+d], d ∈ [0, ℓ²] (d ≥ 1 when
//      i = 0).
struct Branch {
  bool x = true;
  int d = 0;
};

// Deterministic checker over the output word of one side, interleaved
// with marker events after letters: verifies that ⟨i⟩ sits on a cut (or
// that i = 0), that ⟨j⟩ sits on the next cut, or records the letter d
// positions after ⟨i⟩. Materialized eagerly; letters are 0..nletters-1.
class WordChecker {
 public:
  WordChecker(int nletters, int ell, Branch b);

  int num_states() const { return static_cast<int>(next_.size()); }
  int num_events() const { return nletters_ + 2; }
  int mark_i() const { return nletters_; }
  int mark_j() const { return nletters_ + 1; }
  int init(bool zero) const { return zero ? init_zero_ : init_normal_; }
  int fail() const { return fail_; }
  int next(int s, int event) const { return next_[s][event]; }
  // State reached after the end-of-word flush.
  int flush(int s) const { return flush_[s]; }
  bool accepting(int s) const { return accept_[s]; }
  // Letter recorded by an M-branch checker, or -1.
  int recorded(int s) const { return rec_[s]; }
  std::string describe(int s) const { return labels_[s]; }

 private:
  // Merges states no sequence of events and flushes can tell apart.
  void minimize();

  int nletters_;
  int init_normal_ = 0, init_zero_ = 0, fail_ = 0;
  std::vector<std::vector<int>> next_;
  std::vector<int> flush_;
  std::vector<char> accept_;
  std::vector<int> rec_;
  std::vector<std::string> labels_;
};

struct ResyncStats {
  std::size_t subsets = 0;         // distinct per-component subsets
  std::size_t dfa_states = 0;      // distinct deterministic states with computed subsets
  std::size_t transitions = 0;     // memoized deterministic transitions
  std::size_t side_configs = 0;    // per-side configurations over all branches
  std::size_t checker_states = 0;  // word-checker states over all branches
  std::size_t max_subset = 0;
};

class CharacterizationEngine;

// Deterministic automaton over S×S recognizing D_{k,ℓ,S}. Symbol s·|S|+t
// stands for the pair (S[s], S[t]). States are created on demand and
// memoized; explore() materializes the reachable part. Ids returned by
// next() stay valid but two ids may denote the same state.
class ResyncAutomaton : public Nfa {
 public:
  ResyncAutomaton(const ResyncParams& p, std::size_t budget);
  ~ResyncAutomaton() override;

  const ResyncParams& params() const { return params_; }
  int start() const { return start_; }
  int next(int q, int sym) const;
  bool is_accepting(int q) const;
  int symbol(int s, int t) const { return s * static_cast<int>(params_.s.size()) + t; }

  // Membership of a pair of S-sequences; unequal lengths are rejected.
  bool accepts_pair(const SubstSeq& l, const SubstSeq& m) const;
  // Representative id: ids of equal states map to the same representative.
  int canonical(int q) const;
  // Maps a substitution to its index in S; throws DomainError if absent.
  int index_of(const Substitution& s) const;

  // Full reachable materialization; throws ResourceError past the budget.
  Dfa explore(std::size_t budget) const;
  ResyncStats stats() const;

  int num_symbols() const override;
  std::vector<State> initial() const override { return {static_cast<State>(start_)}; }
  void successors(State q, Symbol a, std::vector<State>& out) const override {
    out.push_back(static_cast<State>(next(static_cast<int>(q), a)));
  }
  bool accepting(State q) const override { return is_accepting(static_cast<int>(q)); }
  std::string describe(State q) const override;
  std::string symbol_name(Symbol a) const override;

 private:
  ResyncParams params_;
  std::size_t budget_;
  std::unique_ptr<CharacterizationEngine> engine_;
  int start_ = 0;
  mutable std::mutex mu_;
  // A node's acceptance depends only on its parent, so subsets are
  // computed on first use; nodes with equal subsets are then merged.
  struct Node {
    int parent = -1;
    int sym = -1;
    bool accepting = true;
    bool ready = false;
    std::vector<int> subs;  // per-component subset ids
  };
  static std::string node_key(const Node& n);
  int resolve(int q) const;

  mutable std::vector<Node> nodes_;
  mutable std::vector<int> alias_;
  mutable std::unordered_map<std::string, int> canon_;
  mutable std::unordered_map<std::uint64_t, int> delta_;
  mutable std::size_t ready_states_ = 1;
};

std::shared_ptr<ResyncAutomaton> build_resync(const ResyncParams& p,
                                              std::size_t budget = kDefaultBudget);

// Endmarking: Φ(σ) appends ⊣ (letter index nletters) to the image of the
// output variable.
Substitution endmark(const Substitution& s, int out_var, int nletters);

// The nondeterministic characterization layer over S'×S', S' = S ∪ Φ(S),
// exposed for the endmarker-transparency check: symbol s·|S'|+t, where
// indices ≥ |S| denote Φ(S[index − |S|]). Accepts endmarked pairs outside
// D⊣_{k,ℓ,S'}.
NfaPtr characterization_engine_nfa(const ResyncParams& p, std::size_t budget = kDefaultBudget);

}  // namespace sstdelay
