#pragma once

#include <map>
#include <vector>

#include "sstdelay/core.hpp"

namespace sstdelay {

// Word-level annotated letters: letter·4 + bits. In marked words bit 0 is
// mark 1 and bit 1 is mark 2; in labelled words bit 1 is the label and
// bit 0 the mark.
constexpr int kAnnot = 4;
inline int wsym(int letter, int bits) { return letter * kAnnot + bits; }
inline int wletter(int s) { return s / kAnnot; }
inline int wbits(int s) { return s % kAnnot; }

// Each mark occurs at most once (exactly once when complete is set).
bool is_marking(const Word& w, int arity, bool complete = true);
// Labelled positions form a non-empty prefix whose last letter carries the
// mark and no other position is marked.
bool is_labelling(const Word& w);

// Every way of annotating the letter occurrences of a substitution set.
//   kPlain:    no annotation (the set itself, letters re-encoded).
//   kMarked1:  mark 1 on at most one occurrence.
//   kMarked2:  marks 1 and 2 each on at most one occurrence (possibly the same).
//   kLabelled: any subset of occurrences labelled, the mark on at most one
//              labelled occurrence.
class MarkedSubstAlphabet {
 public:
  enum class Kind { kPlain, kMarked1, kMarked2, kLabelled };

  MarkedSubstAlphabet(std::vector<Substitution> base, Kind kind);

  Kind kind() const { return kind_; }
  int size() const { return static_cast<int>(variants_.size()); }
  const Substitution& variant(int i) const { return variants_.at(i); }
  int base_of(int i) const { return base_of_.at(i); }
  const std::vector<Substitution>& base() const { return base_; }
  // Index of an annotated substitution, or -1.
  int find(const Substitution& v) const;
  // Index of base[b] with no annotation.
  int plain(int b) const;

 private:
  Kind kind_;
  std::vector<Substitution> base_;
  std::vector<Substitution> variants_;
  std::vector<int> base_of_;
  std::map<Substitution, int> index_;
};

// Rewrites the annotation bits of every letter occurrence.
template <class F>
Substitution map_bits(const Substitution& v, F f) {
  Substitution r = v;
  for (auto& img : r.images)
    for (auto& tok : img)
      if (!is_var(tok)) {
        int s = token_letter(tok);
        tok = letter_token(wsym(wletter(s), f(wbits(s))));
      }
  return r;
}

// Drops every annotation.
Substitution strip_marks(const Substitution& v);

// λ▷x̄: marks output positions positions[m] (1-based; 0 leaves mark m+1
// unplaced) on the occurrences that produce them. l ranges over M.base().
std::vector<int> mark_sequence(const MarkedSubstAlphabet& m, const SubstSeq& l, int out_var,
                               const std::vector<int>& positions);
// Labels output positions 1..i and marks position i (i ≥ 1).
std::vector<int> label_sequence(const MarkedSubstAlphabet& m, const SubstSeq& l, int out_var,
                                int i);

// Output of an annotated sequence as a word of annotated letters.
Word marked_output(const MarkedSubstAlphabet& m, const std::vector<int>& seq, int out_var);

}  // namespace sstdelay
