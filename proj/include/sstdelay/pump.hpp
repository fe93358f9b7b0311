#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "sstdelay/core.hpp"
#include "sstdelay/delay.hpp"

namespace sstdelay {

// Half-open interval of times [s, t), 1 ≤ s < t < |λ|.
struct PumpInterval {
  int s = 1;
  int t = 2;
};

// λ↑[s,t) = σ1…σ(t−1) σs…σn: the block σs…σ(t−1) occurs twice.
SubstSeq pump_interval(const SubstSeq& l, PumpInterval iv);

// The interval (s, s'] of the proof arguments, as [s+1, s'+1).
inline PumpInterval interval_after(int s, int s_prime) { return {s + 1, s_prime + 1}; }

// u[i] = u[i+p] wherever both exist. p ≥ 1.
bool is_p_periodic(const Word& u, int p);

enum class FineWilf { kNotApplicable, kPeriodic, kNotPeriodic };
// Applicable when uv is p-periodic, vw is q-periodic and
// |v| ≥ p + q − gcd(p, q); then reports whether uvw is gcd(p,q)-periodic.
FineWilf fine_wilf(const Word& u, const Word& v, const Word& w, int p, int q);

// Tokens over variables (≥ 0) and letters (~c), as in substitution images.
using TokenWord = std::vector<int>;

// σ(s,n](O) = αβγ with σ[0,s] mapping β onto out[j1', j2'], j1' ≤ j1 and
// j2' ≥ j2, β minimal.
struct AbcDecomposition {
  TokenWord alpha, beta, gamma;
  int j1p = 0, j2p = 0;
};

// σ(s,n](O), with σ(n,n](O) = O.
TokenWord suffix_word(const SubstSeq& l, int s, int out_var);
AbcDecomposition decompose_abc(const SubstSeq& l, int s, int j1, int j2, int out_var);
// The variables of w in order (letters erased).
TokenWord variables_of(const TokenWord& w);

// Puts `count` padding letters at both ends of the output by rewriting
// the last substitution.
SubstSeq pad_output(const SubstSeq& l, int out_var, int count, int pad_letter);

struct Conditions {
  bool c1 = false, c2 = false, c3 = false;
  bool all() const { return c1 && c2 && c3; }
};

// The three conditions on the times s < s' for the window
// [j − 2Cℓ, j + Cℓ] around a Cℓ-cut j of the (padded) common output.
Conditions check_conditions(const SubstSeq& l, const SubstSeq& m, int s, int s_prime, int j,
                            int c, int ell, int out_var);

struct PropertyP {
  bool holds = false;
  int x = 0, y = 0;
};

// Shifts x, y at which both pumped outputs contain out[j1, j2], with
// 0 < |x − y| ≤ Cℓ. The least such (x, y) is reported.
PropertyP check_property_p(const SubstSeq& l, const SubstSeq& m, PumpInterval iv, int j, int c,
                           int ell, int out_var);

// Shift of the window start under pumping (s, s']: the output positions
// before j1 produced in the repeated block.
int pump_shift(const SubstSeq& l, int s, int s_prime, int j1, int out_var);

// u[pos, pos + |pattern|) = pattern, pos 1-based.
bool occurs_at(const Word& u, int pos, const Word& pattern);

struct WitnessSearch {
  std::optional<std::vector<int>> times;  // t1 < … < tC
  std::size_t pairs_checked = 0;
};

// Times 1 ≤ t1 < … < tC < |λ| such that pumping [ti, tj) makes the
// outputs differ for every i < j. Searched directly over time tuples.
// Throws PreconditionError unless |l| = |m|, out(l) = out(m) and
// delay_{Cℓ}(l, m) > C²k.
WitnessSearch find_pump_witnesses(const SubstSeq& l, const SubstSeq& m, int c, int k, int ell,
                                  int out_var);

struct CompletenessConstants {
  std::uint64_t m1 = 0;  // most letters in one substitution
  std::uint64_t m2 = 0;  // (|X|+1)^(|X|+1)·|X|!
  std::uint64_t ell = 0;
  std::uint64_t k = 0;
  int c = 0;
};

// Throws DomainError when a constant does not fit in 64 bits.
CompletenessConstants completeness_constants(const std::vector<Substitution>& s, int c = 2);
CompletenessConstants completeness_constants(std::uint64_t m1, int nvars, int c = 2);

}  // namespace sstdelay
