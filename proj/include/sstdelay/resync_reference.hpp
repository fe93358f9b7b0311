#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "sstdelay/automata.hpp"
#include "sstdelay/delay.hpp"
#include "sstdelay/marked.hpp"

namespace sstdelay {

// Staged construction over marked words and marked substitution sequences.
// build_resync does not go through it; it is the reference the compact
// engine is checked against on small instances.

// P_h = ⋃_{|v|=h} v* over letters 0..nletters-1. State 0 is the start
// state (ε), state 1 the rejecting sink. Throws ResourceError for h > max_h.
Dfa period_dfa(int nletters, int h, int max_h = 4);

// Deterministic, over symbols letter·2 + c: accepts u with c set exactly
// on the positions of cut_ℓ(u). Checks that every c-position closes a
// factor in some P_h (h ≤ ℓ), that no such factor could have been longer,
// and that the last position carries c.
NfaPtr cut_marking_nfa(int nletters, int ell, int max_ell = 4);

// Word predicates over annotated letters wsym(x, bits), x ∈ [0, nletters]
// where x = nletters is the start symbol ⊢: it may only come first and
// stands for output position 0. It is not part of the factorization.
enum class WordPredKind {
  kCut,        // mark 1 exactly once, on a cut
  kNextCut,    // marks 1 and 2 once each; mark 2 on the first cut after mark 1
  kMism,       // marks 1 and 2 once each, mark 2 `d` positions later, on `letter`
  kLabel,      // a labelling (see is_labelling)
  kEndmarked,  // unannotated (letters other than nletters-1)* (nletters-1)
};
NfaPtr word_predicate(WordPredKind kind, int nletters, int ell, int letter = 0, int d = 0);

// Sequences ν over m (symbols = variant indices) whose output lies in L(p),
// p over annotated letters. Annotated letters must reach the output: a run
// that discards one is rejected.
NfaPtr inverse_sst(std::shared_ptr<const MarkedSubstAlphabet> m, int out_var, const Nfa& p,
                   std::size_t budget = kDefaultBudget);

enum class MdKind { kLe, kGt, kLeEq, kLeNeq };

// Predicate automata over one substitution set (letters 0..nletters-1).
// Pair symbols are a·|M| + b for the relevant marked alphabet M.
class ReferencePipeline {
 public:
  ReferencePipeline(std::vector<Substitution> s, int nletters, int out_var, int ell);

  const MarkedSubstAlphabet& plain() const { return *plain_; }
  const MarkedSubstAlphabet& marked1() const { return *m1_; }
  const MarkedSubstAlphabet& marked2() const { return *m2_; }
  const MarkedSubstAlphabet& labelled() const { return *lab_; }
  int nletters() const { return nletters_; }
  int out_var() const { return out_; }
  int ell() const { return ell_; }

  // Over 1-marked sequences: the mark sits on a cut of the output.
  NfaPtr cut_predicate() const;
  // Over 2-marked sequences: mark 2 on the next cut after mark 1. With
  // from_zero, mark 1 is on the virtual position 0 and no letter carries it.
  NfaPtr nextcut_predicate(bool from_zero = false) const;
  // Over 1-marked pairs: max-diff at the two marks compared with alpha.
  NfaPtr md_predicate(int alpha, MdKind kind) const;
  // Over 2-marked pairs: equal offsets d from mark 1 to mark 2 with
  // d ∈ [0, ℓ²] (d ≥ 1 and mark 1 at position 0 with from_zero) and
  // different letters under mark 2.
  NfaPtr mism_predicate(bool from_zero = false) const;

  // Side predicates and 1-marked pair predicates lifted to 2-marked pairs.
  NfaPtr left(NfaPtr side) const;
  NfaPtr right(NfaPtr side) const;
  NfaPtr lift_mark(NfaPtr pair1, int mark) const;
  NfaPtr lift_side_mark(NfaPtr side1, int mark) const;

 private:
  int nletters_, out_, ell_;
  std::shared_ptr<const MarkedSubstAlphabet> plain_, m1_, m2_, lab_;
};

// Accepts λ⊗μ over S'×S' (symbol s·|S'|+t; S' = S followed by Φ(S)) for
// endmarked λ, μ with (λ, μ) ∉ D_{k,ℓ,S'}. Assembled from the predicates
// as the union of the six witness combinations, marks projected away.
NfaPtr characterization_nfa(const ResyncParams& p);

// The predicate automata the characterization is assembled from, over
// S' = S followed by Φ(S). Sides and pairs are over 2-marked sequences.
struct CharacterizationAtoms {
  std::unique_ptr<ReferencePipeline> r;
  int ns = 0;  // |S'|
  NfaPtr cut1;                     // mark 1 on a cut
  NfaPtr nc, znc;                  // mark 2 on the next cut after mark 1 / after 0
  NfaPtr md_eq1, md_gt2, md_neq2;  // eMD≤k at mark 1, MD>k and dMD≤k at mark 2
  NfaPtr mism, zmism;
  NfaPtr te;  // T⊣, a side over S'
};

// A marked pair accepted by the characterization, with the combination
// that accepted it.
struct MarkedPair {
  std::vector<int> left, right;  // 2-marked variant indices
  std::string combination;
};

// Membership in D_{k,ℓ,S} through the characterization: the pair is
// endmarked on its last step; it lies outside D exactly when some
// 2-marking of it satisfies one of the six combinations. Markings are
// enumerated and the predicate automata consulted one by one, which is
// the projected union without materializing the product.
class ReferenceResync {
 public:
  explicit ReferenceResync(const ResyncParams& p);
  ~ReferenceResync();

  bool contains(const SubstSeq& l, const SubstSeq& m) const;
  std::vector<MarkedPair> witnesses(const SubstSeq& l, const SubstSeq& m,
                                    std::size_t limit = SIZE_MAX) const;
  // The assembled automaton over S'×S' (lazy; only tiny instances explore).
  const Nfa& characterization() const { return *nfa_; }
  const CharacterizationAtoms& atoms() const { return *atoms_; }
  // Indices over S' = S followed by Φ(S), the last step endmarked.
  std::vector<int> endmarked_indices(const SubstSeq& l) const;

 private:
  ResyncParams p_;
  std::shared_ptr<CharacterizationAtoms> atoms_;
  NfaPtr nfa_;
};

}  // namespace sstdelay
