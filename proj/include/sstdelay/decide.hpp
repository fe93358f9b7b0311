#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "sstdelay/automata.hpp"
#include "sstdelay/core.hpp"
#include "sstdelay/delay.hpp"
#include "sstdelay/resync.hpp"

namespace sstdelay {

enum class Outcome { kHolds, kFails };

struct Counterexample {
  Word input;
  SubstSeq run;             // |input| updates then the final output
  std::vector<int> states;  // |input|+1 states of the run
  std::string direction;    // "A ⊆ B" for equivalence checks
};

struct VerdictStats {
  std::size_t explored = 0;        // search nodes or game positions
  std::size_t resync_states = 0;   // deterministic resynchronizer states touched
  std::size_t substitutions = 0;   // |S|
  double seconds = 0;
};

struct Verdict {
  Outcome outcome = Outcome::kHolds;
  std::optional<Counterexample> counterexample;
  VerdictStats stats;
  // What counterexample.run is expressed over.
  Alphabet alphabet;
  VarSet vars;

  bool holds() const { return outcome == Outcome::kHolds; }
};

struct DecideOptions {
  std::size_t budget = kDefaultBudget;
  int max_r = 3;  // cap on letters per step of candidate substitutions
  int max_m = 2;  // cap on candidate variable count
  double time_limit = 0;  // seconds per search, 0 for none
  // Inclusion in an SST with at most one run per input is proved by
  // reachability instead of the resynchronizer search.
  bool single_run_shortcut = true;
};

// D^in over (Σ ∪ {end}) × S × S: symbol (a·|S| + s)·|S| + t, with a = |Σ|
// the end tag carried by the final-output step. Accepts (u⊗λ, u⊗μ) with
// (λ, μ) ∈ D_{k,ℓ,S}.
class DInAutomaton : public Nfa {
 public:
  DInAutomaton(const ResyncParams& p, int input_letters, std::size_t budget);

  int input_letters() const { return nin_; }
  int end_tag() const { return nin_; }
  int symbol(int a, int s, int t) const;
  const ResyncAutomaton& resync() const { return *d_; }

  // Mismatched inputs are rejected without consulting the substitutions.
  bool accepts(const Word& u1, const SubstSeq& l, const Word& u2, const SubstSeq& m) const;

  int num_symbols() const override;
  std::vector<State> initial() const override;
  void successors(State q, Symbol a, std::vector<State>& out) const override;
  bool accepting(State q) const override;
  std::string describe(State q) const override;

 private:
  int nin_, ns_;
  std::shared_ptr<ResyncAutomaton> d_;
};

std::shared_ptr<DInAutomaton> build_d_in(const ResyncParams& p, const Alphabet& sigma,
                                         std::size_t budget = kDefaultBudget);

// Both SSTs are unified first (shared alphabet, union of variables with
// the outputs identified); S is the union of their substitutions.
// The counterexample is the shortest input, ties broken by the least
// input and then the least run (substitution indices in S).
Verdict check_inclusion(const Sst& t1, const Sst& t2, int k, int ell,
                        const DecideOptions& opt = {});
Verdict check_equivalence(const Sst& t1, const Sst& t2, int k, int ell,
                          const DecideOptions& opt = {});

// S_{r,m}: copyless substitutions over nvars variables in which only
// vars [0, m) occur and every other variable is left unchanged, with at
// most r letter occurrences in total. Variable 0 is the output. m = 0
// gives {σ_ε}.
std::vector<Substitution> candidate_substitutions(int nletters, int nvars, int r, int m);

// Letters per step r = 2k + p, p the most letters t emits in one step.
int candidate_letter_bound(const Sst& t, int k);

// L(t) ⊆ D^in(L) with L every input paired with every S_{r,m}-sequence.
Verdict varmin_nondet(const Sst& t, int k, int ell, int m, const DecideOptions& opt = {});
// Safety game on the resynchronizer runs of t against one candidate
// sequence chosen letter by letter.
Verdict varmin_det(const Sst& t, int k, int ell, int m, const DecideOptions& opt = {});

// Two-player safety game. Player 0 (reachability, the input side) owns
// some positions, player 1 (safety, the output side) the others. A
// position without moves loses for its owner if it is a player-1 position
// and is safe if it is a player-0 position.
struct SafetyGame {
  std::vector<int> owner;               // 0 or 1
  std::vector<std::vector<int>> moves;  // successors
  std::vector<char> unsafe;

  int add_position(int player, bool is_unsafe = false);
  void add_move(int from, int to);
  int size() const { return static_cast<int>(owner.size()); }
};

// Positions from which player 1 keeps the play out of unsafe positions
// forever (complement of player 0's attractor).
std::vector<char> solve_safety(const SafetyGame& g);

// Bounded oracles, independent of the automata.

// First (u, λ) in shortlex order of u with |u| ≤ max_len and λ a run of
// t1 on u such that no run μ of t2 on u has (λ, μ) ∈ D_{k,ℓ}.
std::optional<Counterexample> bounded_inclusion_violation(const Sst& t1, const Sst& t2, int k,
                                                          int ell, int max_len);
// Whether some μ over S_{r,m} of length |l| has (l, μ) ∈ D_{k,ℓ}; l is a
// run of t (over t's own variables). Exhaustive with pruning on output
// length and on the letters of out(l) each prefix of μ must already hold.
bool bounded_candidate_exists(const SubstSeq& l, int out_var, int nletters, int k, int ell,
                              int m, int r);
std::optional<Counterexample> bounded_varmin_violation(const Sst& t, int k, int ell, int m,
                                                       int r, int max_len);

}  // namespace sstdelay
