#include "sstdelay/pump.hpp"

#include <algorithm>
#include <cstdlib>
#include <functional>
#include <map>
#include <numeric>
#include <string>

#include "sstdelay/errors.hpp"

namespace sstdelay {

namespace {

int nvars_of(const SubstSeq& l) {
  if (l.empty()) throw DomainError("empty substitution sequence");
  return l.front().num_vars();
}

void require_same_output(const SubstSeq& l, const SubstSeq& m, int out_var) {
  if (l.size() != m.size()) throw PreconditionError("sequences have different lengths");
  if (out_word(l, out_var, nvars_of(l)) != out_word(m, out_var, nvars_of(m)))
    throw PreconditionError("sequences have different outputs");
}

std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b) {
  std::uint64_t r;
  if (__builtin_mul_overflow(a, b, &r)) throw DomainError("completeness constant overflows 64 bits");
  return r;
}

std::uint64_t checked_add(std::uint64_t a, std::uint64_t b) {
  std::uint64_t r;
  if (__builtin_add_overflow(a, b, &r)) throw DomainError("completeness constant overflows 64 bits");
  return r;
}

}  // namespace

SubstSeq pump_interval(const SubstSeq& l, PumpInterval iv) {
  const int n = static_cast<int>(l.size());
  if (!(1 <= iv.s && iv.s < iv.t && iv.t < n))
    throw DomainError("pump interval [" + std::to_string(iv.s) + "," + std::to_string(iv.t) +
                      ") outside [1," + std::to_string(n) + ")");
  SubstSeq r(l.begin(), l.begin() + (iv.t - 1));
  r.insert(r.end(), l.begin() + (iv.s - 1), l.end());
  return r;
}

bool is_p_periodic(const Word& u, int p) {
  if (p < 1) throw DomainError("period must be positive");
  for (std::size_t i = 0; i + p < u.size(); ++i)
    if (u[i] != u[i + p]) return false;
  return true;
}

FineWilf fine_wilf(const Word& u, const Word& v, const Word& w, int p, int q) {
  if (p < 1 || q < 1) throw DomainError("period must be positive");
  const int g = std::gcd(p, q);
  if (static_cast<int>(v.size()) < p + q - g) return FineWilf::kNotApplicable;
  Word uv = u, vw = v, uvw;
  uv.insert(uv.end(), v.begin(), v.end());
  vw.insert(vw.end(), w.begin(), w.end());
  if (!is_p_periodic(uv, p) || !is_p_periodic(vw, q)) return FineWilf::kNotApplicable;
  uvw = uv;
  uvw.insert(uvw.end(), w.begin(), w.end());
  return is_p_periodic(uvw, g) ? FineWilf::kPeriodic : FineWilf::kNotPeriodic;
}

TokenWord suffix_word(const SubstSeq& l, int s, int out_var) {
  const int n = static_cast<int>(l.size());
  if (s < 0 || s > n) throw DomainError("time outside [0, |λ|]");
  TokenWord w{out_var};
  for (int t = n; t > s; --t) {
    TokenWord next;
    for (int tok : w) {
      if (!is_var(tok)) {
        next.push_back(tok);
        continue;
      }
      const auto& img = l[t - 1].images.at(tok);
      next.insert(next.end(), img.begin(), img.end());
    }
    w.swap(next);
  }
  return w;
}

TokenWord variables_of(const TokenWord& w) {
  TokenWord r;
  for (int tok : w)
    if (is_var(tok)) r.push_back(tok);
  return r;
}

AbcDecomposition decompose_abc(const SubstSeq& l, int s, int j1, int j2, int out_var) {
  const int nv = nvars_of(l);
  TokenWord w = suffix_word(l, s, out_var);
  auto c = contents(SubstSeq(l.begin(), l.begin() + s), nv);

  // Span [lo, hi] of output positions covered by each token.
  std::vector<int> lo(w.size()), hi(w.size());
  int pos = 0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    int len = is_var(w[i]) ? static_cast<int>(c[w[i]].size()) : 1;
    lo[i] = pos + 1;
    hi[i] = pos + len;
    pos += len;
  }
  if (j1 < 1 || j1 > j2 || j2 > pos)
    throw DomainError("window [" + std::to_string(j1) + "," + std::to_string(j2) +
                      "] outside the output");

  std::size_t a = 0, b = 0;
  while (!(lo[a] <= j1 && j1 <= hi[a])) ++a;
  b = a;
  while (!(lo[b] <= j2 && j2 <= hi[b])) ++b;

  AbcDecomposition d;
  d.alpha.assign(w.begin(), w.begin() + a);
  d.beta.assign(w.begin() + a, w.begin() + b + 1);
  d.gamma.assign(w.begin() + b + 1, w.end());
  d.j1p = lo[a];
  d.j2p = hi[b];
  return d;
}

SubstSeq pad_output(const SubstSeq& l, int out_var, int count, int pad_letter) {
  SubstSeq r = l;
  if (r.empty()) throw DomainError("empty substitution sequence");
  auto& img = r.back().images.at(out_var);
  std::vector<int> pad(count, letter_token(pad_letter));
  std::vector<int> padded = pad;
  padded.insert(padded.end(), img.begin(), img.end());
  padded.insert(padded.end(), pad.begin(), pad.end());
  img.swap(padded);
  return r;
}

Conditions check_conditions(const SubstSeq& l, const SubstSeq& m, int s, int s_prime, int j,
                            int c, int ell, int out_var) {
  require_same_output(l, m, out_var);
  const int n = static_cast<int>(l.size());
  if (!(0 <= s && s < s_prime && s_prime <= n)) throw DomainError("need 0 ≤ s < s' ≤ |λ|");
  const int cl = c * ell;
  const int j1 = j - 2 * cl, j2 = j + cl;

  auto ol = origin_map(l, out_var), om = origin_map(m, out_var);
  auto diff = [&](int t) { return std::abs(weight(ol, j1, t) - weight(om, j1, t)); };

  Conditions r;
  int d0 = diff(s), d1 = diff(s_prime);
  r.c1 = d0 < d1 && d1 < d0 + cl;

  auto la = decompose_abc(l, s, j1, j2, out_var), lb = decompose_abc(l, s_prime, j1, j2, out_var);
  auto ma = decompose_abc(m, s, j1, j2, out_var), mb = decompose_abc(m, s_prime, j1, j2, out_var);
  r.c2 = la.beta == lb.beta && ma.beta == mb.beta;
  r.c3 = variables_of(la.alpha) == variables_of(lb.alpha) &&
         variables_of(ma.alpha) == variables_of(mb.alpha);
  return r;
}

bool occurs_at(const Word& u, int pos, const Word& pattern) {
  if (pos < 1 || pos - 1 + pattern.size() > u.size()) return false;
  return std::equal(pattern.begin(), pattern.end(), u.begin() + (pos - 1));
}

int pump_shift(const SubstSeq& l, int s, int s_prime, int j1, int out_var) {
  auto o = origin_map(l, out_var);
  return weight(o, j1, s_prime) - weight(o, j1, s);
}

PropertyP check_property_p(const SubstSeq& l, const SubstSeq& m, PumpInterval iv, int j, int c,
                           int ell, int out_var) {
  require_same_output(l, m, out_var);
  const int nv = nvars_of(l);
  const int cl = c * ell;
  const int j1 = j - 2 * cl, j2 = j + cl;
  Word out = out_word(l, out_var, nv);
  if (j1 < 1 || j2 > static_cast<int>(out.size())) throw DomainError("window outside the output");
  Word window(out.begin() + (j1 - 1), out.begin() + j2);

  auto shifts = [&](const SubstSeq& seq) {
    Word w = out_word(pump_interval(seq, iv), out_var, nv);
    std::vector<int> xs;
    for (int x = 0; j1 + x + (j2 - j1) <= static_cast<int>(w.size()); ++x)
      if (occurs_at(w, j1 + x, window)) xs.push_back(x);
    return xs;
  };
  auto xs = shifts(l), ys = shifts(m);
  for (int x : xs)
    for (int y : ys)
      if (x != y && std::abs(x - y) <= cl) return {true, x, y};
  return {};
}

WitnessSearch find_pump_witnesses(const SubstSeq& l, const SubstSeq& m, int c, int k, int ell,
                                  int out_var) {
  require_same_output(l, m, out_var);
  if (c < 2) throw DomainError("need at least two witness times");
  if (delay_ell(l, m, out_var, c * ell) <= c * c * k)
    throw PreconditionError("delay does not exceed C²k");

  const int nv = nvars_of(l);
  const int n = static_cast<int>(l.size());
  WitnessSearch r;
  std::map<std::pair<int, int>, bool> cache;
  auto differs = [&](int a, int b) {
    auto [it, fresh] = cache.try_emplace({a, b}, false);
    if (fresh) {
      ++r.pairs_checked;
      it->second = out_word(pump_interval(l, {a, b}), out_var, nv) !=
                   out_word(pump_interval(m, {a, b}), out_var, nv);
    }
    return it->second;
  };

  std::vector<int> times;
  std::function<bool(int)> extend = [&](int from) {
    if (static_cast<int>(times.size()) == c) return true;
    for (int t = from; t < n; ++t) {
      bool ok = true;
      for (int p : times)
        if (!differs(p, t)) {
          ok = false;
          break;
        }
      if (!ok) continue;
      times.push_back(t);
      if (extend(t + 1)) return true;
      times.pop_back();
    }
    return false;
  };
  if (extend(1)) r.times = times;
  return r;
}

CompletenessConstants completeness_constants(std::uint64_t m1, int nvars, int c) {
  if (nvars < 1) throw DomainError("need at least one variable");
  CompletenessConstants r;
  r.m1 = m1;
  r.c = c;
  const std::uint64_t x = static_cast<std::uint64_t>(nvars);
  std::uint64_t m2 = 1;
  for (std::uint64_t i = 0; i <= x; ++i) m2 = checked_mul(m2, x + 1);
  for (std::uint64_t i = 2; i <= x; ++i) m2 = checked_mul(m2, i);
  r.m2 = m2;
  const std::uint64_t base = checked_mul(m1, checked_mul(m2, m2));
  r.ell = base;
  r.k = checked_mul(checked_add(checked_mul(6, r.ell), 3), base);
  return r;
}

CompletenessConstants completeness_constants(const std::vector<Substitution>& s, int c) {
  if (s.empty()) throw DomainError("empty substitution set");
  std::uint64_t m1 = 0;
  for (const auto& sub : s) m1 = std::max<std::uint64_t>(m1, sub.letter_count());
  return completeness_constants(m1, s.front().num_vars(), c);
}

}  // namespace sstdelay
