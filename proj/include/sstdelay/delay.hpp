#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sstdelay/core.hpp"
#include "sstdelay/errors.hpp"

namespace sstdelay {

// origin[j-1] is the 1-based time whose substitution produced output
// position j.
using OriginMap = std::vector<int>;

OriginMap origin_map(const SubstSeq& l, int out_var);

// Positions ≤ min(j, |out|) with origin ≤ t. t = 0 gives 0.
int weight(const OriginMap& origins, int j, int t);
int weight(const SubstSeq& l, int out_var, int j, int t);

// max over t ∈ [1, |l|] of |weight(l, j1, t) − weight(m, j2, t)|.
int max_diff(const SubstSeq& l, const SubstSeq& m, int out_var, int j1, int j2);
int max_diff(const OriginMap& ol, const OriginMap& om, int len, int j1, int j2);

// Mutation-testing hook: added to every max-diff value. 0 in normal use.
void set_max_diff_fault(int offset);

// Shortest w with u = w^k. Throws DomainError on the empty word.
Word primitive_root(const Word& u);

struct Factorization {
  std::vector<Word> factors;
  std::vector<int> cuts;  // running end positions, 1-based
};

// Greedy ℓ-factorization: each factor is the longest prefix of the rest
// whose primitive root has length ≤ ℓ.
Factorization factorize(const Word& u, int ell);
std::optional<int> next_cut(const Word& u, int ell, int i);

struct ResyncParams {
  int k = 0;
  int ell = 1;
  std::vector<Substitution> s;
  int out_var = 0;
  // |Σ|; letters of s are below it. 0 means "infer from s".
  int nletters = 0;

  // Throws StructuralError when ell < 1, k < 0 or s mixes variable sets.
  void validate() const;
  bool contains(const Substitution& sub) const;
  int num_vars() const { return s.empty() ? 1 : s.front().num_vars(); }
  int letters() const;
};

// Thrown by delay_ell when the measure is undefined for the pair.
struct Discrepancy {
  enum Kind { kLength, kOutput } kind;
  int position;  // first differing output position (1-based), or |l|
};

class UndefinedDelay : public PreconditionError {
 public:
  explicit UndefinedDelay(Discrepancy d);
  const Discrepancy& discrepancy() const { return d_; }

 private:
  Discrepancy d_;
};

int delay_ell(const SubstSeq& l, const SubstSeq& m, int out_var, int ell);

// (l, m) ∈ D_{k,ℓ,S}. Items outside p.s throw DomainError.
bool oracle_in_resync(const SubstSeq& l, const SubstSeq& m, const ResyncParams& p);

enum class LegacyKind { kPositional, kSymmetric, kSize };
int delay_legacy(const SubstSeq& l, const SubstSeq& m, int out_var, LegacyKind kind);

// Everything the membership oracle needs about one sequence, computed once.
struct SeqProfile {
  Word out;
  OriginMap origins;
  std::vector<int> cuts;
  int length = 0;

  static SeqProfile of(const SubstSeq& l, int out_var, int ell);
};

// Membership in D_{k,ℓ,S} from two profiles built with the same ℓ.
bool profile_in_resync(const SeqProfile& a, const SeqProfile& b, int k);

}  // namespace sstdelay
