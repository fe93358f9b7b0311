#include "sstdelay/delay.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <set>

namespace sstdelay {

namespace {

// Empty sequences have empty output whatever the variable set.
int nvars_of(const SubstSeq& l, int out_var) { return l.empty() ? out_var + 1 : l.front().num_vars(); }

// Evaluates l with every letter of σ_t replaced by t.
OriginMap annotated_output(const SubstSeq& l, int out_var) {
  std::vector<std::vector<int>> cur(nvars_of(l, out_var));
  for (std::size_t t = 0; t < l.size(); ++t) {
    const auto& s = l[t];
    std::vector<std::vector<int>> next(cur.size());
    for (int x = 0; x < s.num_vars(); ++x)
      for (int tok : s.images[x]) {
        if (is_var(tok))
          next[x].insert(next[x].end(), cur[tok].begin(), cur[tok].end());
        else
          next[x].push_back(static_cast<int>(t) + 1);
      }
    cur = std::move(next);
  }
  if (cur.empty()) return {};
  return cur.at(out_var);
}

void check_comparable(const SubstSeq& l, const SubstSeq& m, const Word& wl,
                      const Word& wm) {
  if (l.size() != m.size())
    throw UndefinedDelay({Discrepancy::kLength, static_cast<int>(std::min(l.size(), m.size()))});
  if (wl != wm) {
    std::size_t p = 0;
    while (p < wl.size() && p < wm.size() && wl[p] == wm[p]) ++p;
    throw UndefinedDelay({Discrepancy::kOutput, static_cast<int>(p) + 1});
  }
}

// Running per-time weights up to position j, one entry per t ∈ [0, len].
std::vector<int> weight_profile(const OriginMap& origins, int len, int j) {
  std::vector<int> w(len + 1, 0);
  int upto = std::min<int>(j, static_cast<int>(origins.size()));
  for (int i = 0; i < upto; ++i) ++w[origins[i]];
  for (int t = 1; t <= len; ++t) w[t] += w[t - 1];
  return w;
}

}  // namespace

UndefinedDelay::UndefinedDelay(Discrepancy d)
    : PreconditionError(d.kind == Discrepancy::kLength
                            ? "delay undefined: sequences have different lengths"
                            : "delay undefined: outputs differ at position " +
                                  std::to_string(d.position)),
      d_(d) {}

OriginMap origin_map(const SubstSeq& l, int out_var) {
  return annotated_output(l, out_var);
}

int weight(const OriginMap& origins, int j, int t) {
  if (t <= 0 || j <= 0) return 0;
  int upto = std::min<int>(j, static_cast<int>(origins.size()));
  int n = 0;
  for (int i = 0; i < upto; ++i)
    if (origins[i] <= t) ++n;
  return n;
}

int weight(const SubstSeq& l, int out_var, int j, int t) {
  return weight(origin_map(l, out_var), j, t);
}

namespace {
std::atomic<int> max_diff_fault{0};
}  // namespace

void set_max_diff_fault(int offset) { max_diff_fault = offset; }

int max_diff(const OriginMap& ol, const OriginMap& om, int len, int j1, int j2) {
  auto a = weight_profile(ol, len, j1);
  auto b = weight_profile(om, len, j2);
  int best = 0;
  for (int t = 1; t <= len; ++t) best = std::max(best, std::abs(a[t] - b[t]));
  return best + max_diff_fault;
}

int max_diff(const SubstSeq& l, const SubstSeq& m, int out_var, int j1, int j2) {
  if (l.size() != m.size())
    throw StructuralError("max_diff: sequences of different lengths");
  return max_diff(origin_map(l, out_var), origin_map(m, out_var),
                  static_cast<int>(l.size()), j1, j2);
}

Word primitive_root(const Word& u) {
  if (u.empty()) throw DomainError("primitive root of the empty word");
  const int n = static_cast<int>(u.size());
  std::vector<int> border(n + 1, 0);
  border[0] = -1;
  for (int i = 1, b = -1; i <= n; ++i) {
    while (b >= 0 && u[b] != u[i - 1]) b = border[b];
    border[i] = ++b;
  }
  int p = n - border[n];
  if (n % p != 0) p = n;
  return Word(u.begin(), u.begin() + p);
}

Factorization factorize(const Word& u, int ell) {
  if (ell < 1) throw DomainError("factorize: ell must be at least 1");
  Factorization f;
  const int n = static_cast<int>(u.size());
  int s = 0;
  while (s < n) {
    int best = 0;
    for (int p = 1; p <= ell; ++p) {
      // Longest p-periodic run starting at s.
      int r = std::min(p, n - s);
      while (s + r < n && u[s + r] == u[s + r - p]) ++r;
      if (r >= p) best = std::max(best, r / p * p);
    }
    f.factors.emplace_back(u.begin() + s, u.begin() + s + best);
    s += best;
    f.cuts.push_back(s);
  }
  return f;
}

std::optional<int> next_cut(const Word& u, int ell, int i) {
  for (int c : factorize(u, ell).cuts)
    if (c > i) return c;
  return std::nullopt;
}

void ResyncParams::validate() const {
  if (ell < 1) throw StructuralError("ell must be at least 1");
  if (k < 0) throw StructuralError("k must be non-negative");
  for (const auto& sub : s) {
    if (sub.num_vars() != s.front().num_vars())
      throw StructuralError("substitution set mixes variable sets");
    if (validate_copyless(sub)) throw StructuralError("substitution set is not copyless");
  }
  if (!s.empty() && (out_var < 0 || out_var >= s.front().num_vars()))
    throw StructuralError("output variable out of range");
}

int ResyncParams::letters() const {
  int n = nletters;
  for (const auto& sub : s)
    for (const auto& img : sub.images)
      for (int tok : img)
        if (!is_var(tok)) n = std::max(n, token_letter(tok) + 1);
  return std::max(n, 1);
}

bool ResyncParams::contains(const Substitution& sub) const {
  return std::find(s.begin(), s.end(), sub) != s.end();
}

int delay_ell(const SubstSeq& l, const SubstSeq& m, int out_var, int ell) {
  Word wl = out_word(l, out_var, nvars_of(l, out_var));
  Word wm = out_word(m, out_var, nvars_of(m, out_var));
  check_comparable(l, m, wl, wm);
  auto ol = origin_map(l, out_var);
  auto om = origin_map(m, out_var);
  int len = static_cast<int>(l.size());
  int d = 0;
  for (int j : factorize(wl, ell).cuts) d = std::max(d, max_diff(ol, om, len, j, j));
  return d;
}

bool oracle_in_resync(const SubstSeq& l, const SubstSeq& m, const ResyncParams& p) {
  for (const auto* seq : {&l, &m})
    for (const auto& sub : *seq)
      if (!p.contains(sub)) throw DomainError("substitution outside the resynchronizer's set");
  if (l.size() != m.size()) return false;
  int nv = p.s.empty() ? nvars_of(l, p.out_var) : p.s.front().num_vars();
  if (out_word(l, p.out_var, nv) != out_word(m, p.out_var, nv)) return false;
  return delay_ell(l, m, p.out_var, p.ell) <= p.k;
}

int delay_legacy(const SubstSeq& l, const SubstSeq& m, int out_var, LegacyKind kind) {
  Word wl = out_word(l, out_var, nvars_of(l, out_var));
  Word wm = out_word(m, out_var, nvars_of(m, out_var));
  check_comparable(l, m, wl, wm);
  auto ol = origin_map(l, out_var);
  auto om = origin_map(m, out_var);
  const int len = static_cast<int>(l.size());
  int best = 0;
  for (int t = 1; t <= len; ++t) {
    // Partial outputs at time t: (position, letter) pairs with origin ≤ t.
    std::set<std::pair<int, int>> pl, pm;
    Word ul, um;
    for (std::size_t j = 0; j < wl.size(); ++j) {
      if (ol[j] <= t) {
        pl.emplace(static_cast<int>(j), wl[j]);
        ul.push_back(wl[j]);
      }
      if (om[j] <= t) {
        pm.emplace(static_cast<int>(j), wm[j]);
        um.push_back(wm[j]);
      }
    }
    int v = 0;
    switch (kind) {
      case LegacyKind::kPositional: {
        std::size_t lcp = 0;
        while (lcp < ul.size() && lcp < um.size() && ul[lcp] == um[lcp]) ++lcp;
        v = static_cast<int>(ul.size() + um.size() - 2 * lcp);
        break;
      }
      case LegacyKind::kSymmetric: {
        for (const auto& e : pl) v += pm.count(e) ? 0 : 1;
        for (const auto& e : pm) v += pl.count(e) ? 0 : 1;
        break;
      }
      case LegacyKind::kSize:
        v = std::abs(static_cast<int>(pl.size()) - static_cast<int>(pm.size()));
        break;
    }
    best = std::max(best, v);
  }
  return best;
}

SeqProfile SeqProfile::of(const SubstSeq& l, int out_var, int ell) {
  SeqProfile p;
  p.origins = origin_map(l, out_var);
  p.out = out_word(l, out_var, nvars_of(l, out_var));
  p.cuts = factorize(p.out, ell).cuts;
  p.length = static_cast<int>(l.size());
  return p;
}

bool profile_in_resync(const SeqProfile& a, const SeqProfile& b, int k) {
  if (a.length != b.length || a.out != b.out) return false;
  const int len = a.length;
  std::vector<int> wa(len + 1), wb(len + 1);
  std::size_t next = 0;
  std::fill(wa.begin(), wa.end(), 0);
  std::fill(wb.begin(), wb.end(), 0);
  // Sweep positions once, checking each cut on the cumulative histograms.
  for (int c : a.cuts) {
    for (; next < static_cast<std::size_t>(c); ++next) {
      ++wa[a.origins[next]];
      ++wb[b.origins[next]];
    }
    int sa = 0, sb = 0;
    for (int t = 1; t <= len; ++t) {
      sa += wa[t];
      sb += wb[t];
      if (std::abs(sa - sb) > k) return false;
    }
  }
  return true;
}

}  // namespace sstdelay
