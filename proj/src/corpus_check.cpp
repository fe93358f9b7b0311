#include "sstdelay/corpus_check.hpp"

#include <algorithm>
#include <chrono>
#include <functional>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "sstdelay/decide.hpp"
#include "sstdelay/delay.hpp"
#include "sstdelay/errors.hpp"
#include "sstdelay/pump.hpp"
#include "sstdelay/resync.hpp"
#include "sstdelay/sst_format.hpp"

namespace sstdelay {

const char* status_name(CheckStatus s) {
  switch (s) {
    case CheckStatus::kPass: return "pass";
    case CheckStatus::kFail: return "fail";
    case CheckStatus::kResource: return "resource";
  }
  return "?";
}

namespace {

using Clock = std::chrono::steady_clock;
using Result = std::pair<bool, std::string>;

template <class T>
std::string str(const T& v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

std::string join(const std::vector<int>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s;
}

Word word_of(const Alphabet& a, std::string_view text) {
  Word w;
  for (char c : text) {
    auto x = a.find(std::string(1, c));
    if (!x) throw DomainError(std::string("letter ") + c + " not in the alphabet");
    w.push_back(*x);
  }
  return w;
}

class Runner {
 public:
  explicit Runner(const CheckOptions& o) : opt(o) {}

  bool wanted(int c) const {
    return opt.criteria.empty() ||
           std::find(opt.criteria.begin(), opt.criteria.end(), c) != opt.criteria.end();
  }

  // limit: wall-clock seconds the check may take, 0 for none.
  void check(int crit, const std::string& name, double limit, const std::function<Result()>& fn) {
    CheckItem it;
    it.criterion = crit;
    it.name = name;
    auto t0 = Clock::now();
    try {
      auto [ok, detail] = fn();
      it.status = ok ? CheckStatus::kPass : CheckStatus::kFail;
      it.detail = detail;
    } catch (const ResourceError& e) {
      it.status = CheckStatus::kResource;
      it.detail = e.what();
    } catch (const std::exception& e) {
      it.status = CheckStatus::kFail;
      it.detail = std::string("exception: ") + e.what();
    }
    it.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
    if (limit > 0 && it.seconds > limit && it.status == CheckStatus::kPass) {
      it.status = CheckStatus::kFail;
      it.detail += " (took " + str(it.seconds) + " s, limit " + str(limit) + " s)";
    }
    if (opt.on_item) opt.on_item(it);
    items.push_back(std::move(it));
  }

  Sst sst(const std::string& name) const { return load_sst(opt.corpus / (name + ".sst")); }
  SeqFile seq(const std::string& name) const { return load_seq(opt.corpus / (name + ".seq")); }

  const CheckOptions& opt;
  std::vector<CheckItem> items;
};

// The run of t on u through the given state names.
SubstSeq run_through(const Sst& t, const Word& u, const std::vector<std::string>& states) {
  for (const auto& r : enumerate_runs(t, u)) {
    std::vector<std::string> names;
    for (int q : r.states) names.push_back(t.states[q]);
    if (names == states) return r.seq;
  }
  throw DomainError("no run of " + t.name + " through the requested states");
}

// The run of t on u with output w (t is functional on the corpus).
SubstSeq run_with_output(const Sst& t, const Word& u, const Word& w) {
  for (const auto& r : enumerate_runs(t, u))
    if (out_word(r.seq, t.vars.output(), t.vars.size()) == w) return r.seq;
  throw DomainError("no run of " + t.name + " with the requested output");
}

DecideOptions decide_opts(const CheckOptions& o) {
  DecideOptions d;
  d.budget = o.max_states;
  d.time_limit = o.quick ? std::min(o.time_limit, 10.0) : o.time_limit;
  return d;
}

// ------------------------------------------------------------ criterion 1

void pinned_facts(Runner& R) {
  const int C = 1;
  R.check(C, "2-cuts of aaababcbabaaaaa", 1, [] {
    Alphabet a({"a", "b", "c"});
    auto f = factorize(word_of(a, "aaababcbabaaaaa"), 2);
    return Result{f.cuts == std::vector<int>{3, 5, 7, 11, 15}, "cuts " + join(f.cuts)};
  });
  R.check(C, "1-factorization of aaabaaa", 1, [] {
    Alphabet a({"a", "b"});
    auto f = factorize(word_of(a, "aaabaaa"), 1);
    std::string s;
    for (const auto& w : f.factors) s += (s.empty() ? "" : "|") + a.render(w);
    return Result{s == "aaa|b|aaa", s};
  });

  // Runs of t3 and t4 on a^7 with each loop taken three times.
  auto runs = [&R] {
    Sst t3 = R.sst("t3"), t4 = R.sst("t4");
    Word u(7, *t3.alphabet.find("a"));
    std::vector<std::string> st{"p", "p", "p", "p", "q", "q", "q", "q"};
    return std::pair{run_through(t3, u, st), run_through(t4, u, st)};
  };
  R.check(C, "origins of the first output position", 1, [&] {
    auto [l, m] = runs();
    auto ol = origin_map(l, 0), om = origin_map(m, 0);
    return Result{ol.at(0) == 5 && om.at(0) == 1,
                  "t3 " + std::to_string(ol.at(0)) + ", t4 " + std::to_string(om.at(0))};
  });
  R.check(C, "weight at position 2, time 3", 1, [&] {
    auto [l, m] = runs();
    int a = weight(l, 0, 2, 3), b = weight(m, 0, 2, 3);
    return Result{a == 0 && b == 2, "t3 " + std::to_string(a) + ", t4 " + std::to_string(b)};
  });
  R.check(C, "max-diff at positions 4, 6, 8", 1, [&] {
    auto [l, m] = runs();
    std::vector<int> v{max_diff(l, m, 0, 4, 4), max_diff(l, m, 0, 6, 6), max_diff(l, m, 0, 8, 8)};
    return Result{v == std::vector<int>{3, 1, 0}, join(v)};
  });
  R.check(C, "1-delay of the t3/t4 runs", 1, [&] {
    auto [l, m] = runs();
    int d = delay_ell(l, m, 0, 1);
    auto f3 = R.seq("t3_run"), f4 = R.seq("t4_run");
    bool files = f3.seq == l && f4.seq == m;
    return Result{d == 3 && files,
                  "delay " + std::to_string(d) + (files ? "" : ", run files differ from the SST runs")};
  });
  R.check(C, "composition example", 1, [] {
    Alphabet a({"a", "b", "c"});
    VarSet v({"X"}, 0);
    auto s1 = parse_substitution("X =", a, v);
    auto s2 = parse_substitution("X = a X", a, v);
    auto s3 = parse_substitution("X = b X c", a, v);
    auto c = compose(s1, compose(s2, s3));
    Word w;
    for (int tok : c.images[0])
      if (!is_var(tok)) w.push_back(token_letter(tok));
    bool ok = w == word_of(a, "bac") && c.images[0].size() == 3;
    return Result{ok, a.render(w)};
  });
  R.check(C, "legacy measures on rho1..rho5", 1, [&R] {
    std::vector<SubstSeq> rho;
    for (int i = 1; i <= 5; ++i) rho.push_back(R.seq("rho" + std::to_string(i)).seq);
    auto pos = [&](int i, int j) { return delay_legacy(rho[i - 1], rho[j - 1], 0, LegacyKind::kPositional); };
    auto sym = [&](int i, int j) { return delay_legacy(rho[i - 1], rho[j - 1], 0, LegacyKind::kSymmetric); };
    auto siz = [&](int i, int j) { return delay_legacy(rho[i - 1], rho[j - 1], 0, LegacyKind::kSize); };
    bool ok = pos(1, 2) == 2 && sym(2, 3) == 8 && sym(4, 5) == 8 && sym(2, 4) == 4 && sym(3, 5) == 4;
    int worst = 0;
    for (int i = 2; i <= 5; ++i)
      for (int j = 2; j <= 5; ++j) worst = std::max(worst, siz(i, j));
    ok = ok && worst == 0;
    return Result{ok, "positional(1,2)=" + std::to_string(pos(1, 2)) +
                          " symmetric(2,3)=" + std::to_string(sym(2, 3)) +
                          " (4,5)=" + std::to_string(sym(4, 5)) + " (2,4)=" + std::to_string(sym(2, 4)) +
                          " (3,5)=" + std::to_string(sym(3, 5)) + " size max=" + std::to_string(worst)};
  });
}

// ------------------------------------------------------------ criterion 2

std::vector<Substitution> union_set(const std::vector<Sst>& ssts) {
  std::set<Substitution> s;
  for (const auto& t : ssts)
    for (const auto& x : substitution_set(t)) s.insert(x);
  return {s.begin(), s.end()};
}

// Copyless substitution over nvars variables and letters {0, 1} with at
// most two letters.
Substitution random_substitution(std::mt19937_64& rng, int nvars) {
  std::vector<std::vector<int>> images(nvars);
  std::vector<int> vars(nvars);
  std::iota(vars.begin(), vars.end(), 0);
  std::shuffle(vars.begin(), vars.end(), rng);
  for (int v : vars) {
    int target = static_cast<int>(rng() % (nvars + 1));
    if (target < nvars) images[target].push_back(v);
  }
  int letters = static_cast<int>(rng() % 3);
  for (int i = 0; i < letters; ++i) {
    auto& img = images[rng() % nvars];
    img.insert(img.begin() + static_cast<long>(rng() % (img.size() + 1)),
               letter_token(static_cast<int>(rng() % 2)));
  }
  return Substitution(images);
}

std::vector<Substitution> random_set(std::mt19937_64& rng, int nvars, int size) {
  std::set<Substitution> s;
  while (static_cast<int>(s.size()) < size) s.insert(random_substitution(rng, nvars));
  return {s.begin(), s.end()};
}

// Disagreements between the automaton and the membership oracle over all
// pairs of sequences of length ≤ max_len.
std::size_t agreement_sweep(const ResyncParams& p, int max_len, std::size_t budget,
                            std::size_t& pairs) {
  auto d = build_resync(p, budget);
  const int ns = static_cast<int>(p.s.size());
  SubstSeq l, m;
  std::size_t bad = 0;
  std::function<void(int)> go = [&](int q) {
    ++pairs;
    if (d->is_accepting(q) != oracle_in_resync(l, m, p)) ++bad;
    if (static_cast<int>(l.size()) == max_len) return;
    for (int a = 0; a < ns; ++a)
      for (int b = 0; b < ns; ++b) {
        l.push_back(p.s[a]);
        m.push_back(p.s[b]);
        go(d->next(q, d->symbol(a, b)));
        l.pop_back();
        m.pop_back();
      }
  };
  go(d->start());
  return bad;
}

void automaton_oracle(Runner& R) {
  const int C = 2;
  struct Named {
    std::string name;
    std::vector<Substitution> s;
    int nletters;
  };
  std::vector<Named> sets;
  {
    auto u = unify({R.sst("t1"), R.sst("t2")});
    sets.push_back({"t1+t2", union_set(u), u[0].alphabet.size()});
  }
  {
    auto u = unify({R.sst("t3"), R.sst("t4")});
    sets.push_back({"t3+t4", union_set(u), u[0].alphabet.size()});
  }
  std::mt19937_64 rng(R.opt.seed);
  for (int i = 0; i < 3; ++i) {
    int nvars = i == 0 ? 1 : 2;
    int size = 2 + static_cast<int>(rng() % 2);
    sets.push_back({"random#" + std::to_string(i + 1), random_set(rng, nvars, size), 2});
  }
  const int max_len = R.opt.quick ? 3 : 4;
  std::vector<int> ks = R.opt.quick ? std::vector<int>{0, 1} : std::vector<int>{0, 1, 2};
  auto t0 = Clock::now();
  for (const auto& st : sets)
    for (int k : ks)
      for (int ell : {1, 2}) {
        R.check(C, "D(" + st.name + ", k=" + std::to_string(k) + ", l=" + std::to_string(ell) + ")", 0,
                [&] {
                  ResyncParams p;
                  p.k = k;
                  p.ell = ell;
                  p.s = st.s;
                  p.nletters = st.nletters;
                  std::size_t pairs = 0;
                  auto bad = agreement_sweep(p, max_len, R.opt.max_states * 10, pairs);
                  return Result{bad == 0, std::to_string(pairs) + " pairs, " + std::to_string(bad) +
                                              " disagreements, |S|=" + std::to_string(p.s.size())};
                });
      }
  double total = std::chrono::duration<double>(Clock::now() - t0).count();
  R.check(C, "sweep total under 10 minutes", 0,
          [&] { return Result{total < 600, str(total) + " s"}; });
}

// ------------------------------------------------------------ criterion 3

void decision_procedures(Runner& R) {
  const int C = 3;
  const auto dopt = decide_opts(R.opt);
  R.check(C, "t1 equivalent to t2 (k=0, l=1)", 120, [&] {
    auto v = check_equivalence(R.sst("t1"), R.sst("t2"), 0, 1, dopt);
    return Result{v.holds(), std::to_string(v.stats.explored) + " nodes"};
  });
  const int kmax = R.opt.quick ? 1 : 3;
  for (int k = 0; k <= kmax; ++k)
    R.check(C, "t3 not included in t4 (k=" + std::to_string(k) + ", l=1)", 120, [&, k] {
      Sst t3 = R.sst("t3"), t4 = R.sst("t4");
      auto v = check_inclusion(t3, t4, k, 1, dopt);
      if (v.holds() || !v.counterexample) return Result{false, "no counterexample"};
      const auto& ce = *v.counterexample;
      auto u = unify({t3, t4});
      ResyncParams p;
      p.k = k;
      p.ell = 1;
      p.s = union_set(u);
      p.out_var = u[0].vars.output();
      p.nletters = u[0].alphabet.size();
      bool is_run = false;
      for (const auto& r : enumerate_runs(u[0], ce.input)) is_run |= r.seq == ce.run;
      bool unmatched = true;
      for (const auto& r : enumerate_runs(u[1], ce.input))
        unmatched &= !oracle_in_resync(ce.run, r.seq, p);
      auto o = bounded_inclusion_violation(t3, t4, k, 1, 8);
      bool shortest = o && o->input.size() == ce.input.size();
      return Result{is_run && unmatched && shortest,
                    "u=" + v.alphabet.render(ce.input) + (is_run ? "" : " (not a run)") +
                        (unmatched ? "" : " (matched)") +
                        (o ? ", oracle u=" + v.alphabet.render(o->input) : ", oracle none")};
    });

  std::vector<std::string> names{"t1", "t2", "t3", "t4", "reverse"};
  for (int i = 1; i <= 5; ++i)
    for (auto side : {"_a", "_b"}) names.push_back("rat" + std::to_string(i) + side);
  for (const auto& n : names)
    R.check(C, "reflexive " + n, 120, [&, n] {
      auto t = R.sst(n);
      auto v = check_equivalence(t, t, 0, 1, dopt);
      return Result{v.holds(), std::to_string(v.stats.explored) + " nodes"};
    });

  std::vector<std::pair<std::string, std::string>> pairs{
      {"t1", "t2"}, {"t2", "t1"}, {"t3", "t4"}, {"t4", "t3"}};
  for (int i = 1; i <= 5; ++i) {
    std::string a = "rat" + std::to_string(i) + "_a", b = "rat" + std::to_string(i) + "_b";
    pairs.push_back({a, b});
    pairs.push_back({b, a});
  }
  // rat5_b in rat5_a at k=3 needs more than 3M search nodes.
  const int mono_kmax = R.opt.quick ? 1 : 2;
  for (const auto& [a, b] : pairs)
    R.check(C, "monotone in k: " + a + " in " + b, 0, [&, a = a, b = b] {
      std::string trace;
      bool ok = true, held = false;
      for (int k = 0; k <= mono_kmax; ++k) {
        auto t0 = Clock::now();
        bool h = check_inclusion(R.sst(a), R.sst(b), k, 1, dopt).holds();
        double s = std::chrono::duration<double>(Clock::now() - t0).count();
        if (s > 120) ok = false;
        if (held && !h) ok = false;
        held = held || h;
        trace += h ? 'H' : 'F';
      }
      return Result{ok, "k=0.." + std::to_string(mono_kmax) + ": " + trace};
    });
}

// ------------------------------------------------------------ criterion 4

void rational_consistency(Runner& R) {
  const int C = 4;
  const auto dopt = decide_opts(R.opt);
  const int ellmax = R.opt.quick ? 2 : 3;
  const int kmax = R.opt.quick ? 1 : 2;
  for (int i = 1; i <= 5; ++i) {
    std::string a = "rat" + std::to_string(i) + "_a", b = "rat" + std::to_string(i) + "_b";
    R.check(C, a + " in " + b, 0, [&, a, b] {
      Sst ta = R.sst(a), tb = R.sst(b);
      bool ok = true;
      std::string trace;
      for (int k = 0; k <= kmax; ++k) {
        trace += (k ? " k" : "k") + std::to_string(k) + ":";
        int first = -1;
        for (int ell = 1; ell <= ellmax; ++ell) {
          int h = check_inclusion(ta, tb, k, ell, dopt).holds() ? 1 : 0;
          if (first < 0) first = h;
          ok &= h == first;
          trace += h ? 'H' : 'F';
        }
      }
      return Result{ok, trace};
    });
  }
}

// ------------------------------------------------------------ criterion 5

void variable_minimization(Runner& R) {
  const int C = 5;
  const auto dopt = decide_opts(R.opt);
  R.check(C, "t2 to 1 variable, nondeterministic (k=0, l=1)", 0, [&] {
    auto v = varmin_nondet(R.sst("t2"), 0, 1, 1, dopt);
    return Result{v.holds(), std::to_string(v.stats.explored) + " nodes, |S|=" +
                                 std::to_string(v.stats.substitutions)};
  });
  R.check(C, "t2 to 1 variable, game (k=0, l=1)", 0, [&] {
    auto v = varmin_det(R.sst("t2"), 0, 1, 1, dopt);
    return Result{v.holds(), std::to_string(v.stats.explored) + " positions"};
  });
  const int kmax = R.opt.quick ? 0 : 2;
  for (int k = 0; k <= kmax; ++k)
    R.check(C, "reverse to 1 variable fails (k=" + std::to_string(k) + ", l=1)", 0, [&, k] {
      Sst t = R.sst("reverse");
      int r = candidate_letter_bound(t, k);
      auto o = bounded_varmin_violation(t, k, 1, 1, r, 5);
      std::string detail = "r=" + std::to_string(r) + ", oracle " +
                           (o ? "u=" + t.alphabet.render(o->input) : std::string("none up to |u|=5"));
      DecideOptions d = dopt;
      d.max_r = r;
      try {
        auto v = varmin_nondet(t, k, 1, 1, d);
        detail += ", automaton " + std::string(v.holds() ? "holds" : "fails");
        if (v.counterexample) detail += " u=" + v.alphabet.render(v.counterexample->input);
        return Result{o && !v.holds(), detail};
      } catch (const ResourceError& e) {
        throw ResourceError::with_context(e, detail);
      }
    });
}

// ------------------------------------------------------------ criterion 6

// All words over {0,1} of the given length.
std::vector<Word> words_of_length(int n) {
  std::vector<Word> r;
  for (int x = 0; x < (1 << n); ++x) {
    Word w(n);
    for (int i = 0; i < n; ++i) w[i] = (x >> i) & 1;
    r.push_back(w);
  }
  return r;
}

struct T34 {
  Sst t3, t4;
  int nv;
  // Runs of t3 and t4 with output a^m1 b a^m2.
  std::pair<SubstSeq, SubstSeq> runs(int m1, int m2) const {
    Word u(m1 + m2 + 1, 0), w(m1, 0);
    w.push_back(1);
    w.insert(w.end(), m2, 0);
    return {run_with_output(t3, u, w), run_with_output(t4, u, w)};
  }
};

T34 load_t34(Runner& R) {
  auto u = unify({R.sst("t3"), R.sst("t4")});
  return {u[0], u[1], u[0].vars.size()};
}

void completeness(Runner& R) {
  const int C = 6;
  R.check(C, "Fine-Wilf, total length <= 10", 0, [] {
    std::size_t applicable = 0, bad = 0;
    for (int n = 0; n <= 10; ++n)
      for (const auto& all : words_of_length(n))
        for (int i = 0; i <= n; ++i)
          for (int j = i; j <= n; ++j) {
            Word u(all.begin(), all.begin() + i), v(all.begin() + i, all.begin() + j),
                w(all.begin() + j, all.end());
            for (int p = 1; p <= 3; ++p)
              for (int q = 1; q <= 3; ++q) {
                auto r = fine_wilf(u, v, w, p, q);
                if (r == FineWilf::kNotApplicable) continue;
                ++applicable;
                bad += r == FineWilf::kNotPeriodic;
              }
          }
    return Result{bad == 0 && applicable > 0,
                  std::to_string(applicable) + " applicable, " + std::to_string(bad) + " violations"};
  });
  R.check(C, "Fine-Wilf bound is tight", 0, [] {
    // |v| = p + q − gcd − 1: both periodicities hold, the merged one fails.
    std::string found;
    for (int p = 1; p <= 3; ++p)
      for (int q = p + 1; q <= 3; ++q) {
        const int g = std::gcd(p, q), lv = p + q - g - 1;
        bool hit = false;
        for (int n = lv; n <= lv + 4 && !hit; ++n)
          for (const auto& all : words_of_length(n)) {
            for (int i = 0; i + lv <= n && !hit; ++i) {
              Word uv(all.begin(), all.begin() + i + lv), vw(all.begin() + i, all.end());
              hit = is_p_periodic(uv, p) && is_p_periodic(vw, q) && !is_p_periodic(all, g);
            }
            if (hit) {
              found += "(" + std::to_string(p) + "," + std::to_string(q) + "):" + std::string(all.size(), ' ');
              for (std::size_t k = 0; k < all.size(); ++k) found[found.size() - all.size() + k] = "ab"[all[k]];
              found += " ";
              break;
            }
          }
      }
    return Result{found.find("(2,3)") != std::string::npos, "near misses " + found};
  });

  const int nmax = 8;
  R.check(C, "conditions imply P, P implies distinct outputs (t3/t4, n<=8, C=2)", 0, [&R] {
    T34 t = load_t34(R);
    const int c = 2, ell = 1, cl = c * ell;
    const int pad = t.t3.alphabet.padding();
    std::size_t passing = 0, p_instances = 0, bad = 0;
    int max_shift = 0;
    for (int n = 2; n <= nmax; ++n) {
      auto [l0, m0] = t.runs(n, n);
      auto l = pad_output(l0, 0, 2 * cl, pad), m = pad_output(m0, 0, 2 * cl, pad);
      Word out = out_word(l, 0, t.nv);
      const int len = static_cast<int>(l.size());
      auto ol = origin_map(l, 0), om = origin_map(m, 0);
      for (int j : factorize(out, cl).cuts) {
        int j1 = j - 2 * cl, j2 = j + cl;
        if (j1 < 1 || j2 > static_cast<int>(out.size())) continue;
        Word window(out.begin() + (j1 - 1), out.begin() + j2);
        for (int s = 0; s < len; ++s)
          for (int s2 = s + 1; s2 + 1 < len; ++s2) {
            auto iv = interval_after(s, s2);
            Word pl = out_word(pump_interval(l, iv), 0, t.nv);
            Word pm = out_word(pump_interval(m, iv), 0, t.nv);
            auto P = check_property_p(l, m, iv, j, c, ell, 0);
            if (P.holds) {
              ++p_instances;
              if (pl == pm) ++bad;
            }
            if (!check_conditions(l, m, s, s2, j, c, ell, 0).all()) continue;
            ++passing;
            int x = pump_shift(l, s, s2, j1, 0), y = pump_shift(m, s, s2, j1, 0);
            int d0 = std::abs(weight(ol, j1, s) - weight(om, j1, s));
            int d1 = std::abs(weight(ol, j1, s2) - weight(om, j1, s2));
            bool shift_ok = occurs_at(pl, j1 + x, window) && occurs_at(pm, j1 + y, window) &&
                            std::abs(x - y) == d1 - d0 && x != y && std::abs(x - y) <= cl;
            if (!P.holds || !shift_ok) ++bad;
            max_shift = std::max(max_shift, std::abs(x - y));
          }
      }
    }
    return Result{bad == 0 && passing > 0,
                  std::to_string(passing) + " intervals pass the conditions, " +
                      std::to_string(p_instances) + " satisfy P, " + std::to_string(bad) +
                      " violations, max |x-y| " + std::to_string(max_shift)};
  });
  R.check(C, "pump witnesses on high-delay t3/t4 pairs", 0, [&R] {
    T34 t = load_t34(R);
    std::size_t pairs = 0, found = 0, bad = 0;
    for (int m1 = 0; m1 + 1 <= nmax; ++m1)
      for (int m2 = 0; m1 + m2 + 1 <= nmax + 1; ++m2) {
        auto [l, m] = t.runs(m1, m2);
        if (delay_ell(l, m, 0, 2) <= 0) continue;
        ++pairs;
        auto w = find_pump_witnesses(l, m, 2, 0, 1, 0);
        if (!w.times) continue;
        ++found;
        const auto& ts = *w.times;
        for (std::size_t i = 0; i < ts.size(); ++i)
          for (std::size_t j = i + 1; j < ts.size(); ++j)
            if (out_word(pump_interval(l, {ts[i], ts[j]}), 0, t.nv) ==
                out_word(pump_interval(m, {ts[i], ts[j]}), 0, t.nv))
              ++bad;
      }
    return Result{pairs > 0 && found == pairs && bad == 0,
                  std::to_string(found) + "/" + std::to_string(pairs) + " pairs with witnesses, " +
                      std::to_string(bad) + " invalid"};
  });
  R.check(C, "completeness constants", 0, [&R] {
    auto a = completeness_constants(1, 1);
    auto b = completeness_constants(2, 2);
    auto c = completeness_constants(substitution_set(R.sst("t1")));
    bool ok = a.m2 == 4 && a.ell == 16 && a.k == 1584 && b.m2 == 54 && b.ell == 5832 &&
              b.k == 204090840ULL && c.ell == 16 && c.k == 1584;
    return Result{ok, "|X|=1,M1=1: " + std::to_string(a.ell) + "/" + std::to_string(a.k) +
                          "; |X|=2,M1=2: " + std::to_string(b.ell) + "/" + std::to_string(b.k)};
  });
}

// ------------------------------------------------------------ criterion 7

// Delay recomputed from per-time annotated contents, with its own
// factorization.
int independent_delay(const SubstSeq& l, const SubstSeq& m, int ell) {
  using Tagged = std::vector<std::pair<int, int>>;  // (letter, time)
  auto annotate = [](const SubstSeq& s) {
    std::vector<Tagged> c(s.front().num_vars());
    for (std::size_t t = 0; t < s.size(); ++t) {
      std::vector<Tagged> n(c.size());
      for (std::size_t x = 0; x < c.size(); ++x)
        for (int tok : s[t].images[x]) {
          if (is_var(tok))
            n[x].insert(n[x].end(), c[tok].begin(), c[tok].end());
          else
            n[x].push_back({token_letter(tok), static_cast<int>(t) + 1});
        }
      c.swap(n);
    }
    return c[0];
  };
  Tagged a = annotate(l), b = annotate(m);
  Word w;
  for (auto [x, t] : a) w.push_back(x);
  auto root_len = [](const Word& u) {
    for (std::size_t p = 1; p <= u.size(); ++p) {
      if (u.size() % p) continue;
      bool ok = true;
      for (std::size_t i = p; i < u.size() && ok; ++i) ok = u[i] == u[i - p];
      if (ok) return static_cast<int>(p);
    }
    return static_cast<int>(u.size());
  };
  std::vector<int> cuts;
  std::size_t at = 0;
  while (at < w.size()) {
    std::size_t best = at + 1;
    for (std::size_t e = at + 1; e <= w.size(); ++e)
      if (root_len(Word(w.begin() + at, w.begin() + e)) <= ell) best = e;
    cuts.push_back(static_cast<int>(best));
    at = best;
  }
  int d = 0;
  for (int j : cuts)
    for (std::size_t t = 1; t <= l.size(); ++t) {
      int wa = 0, wb = 0;
      for (int i = 0; i < j; ++i) {
        wa += a[i].second <= static_cast<int>(t);
        wb += b[i].second <= static_cast<int>(t);
      }
      d = std::max(d, std::abs(wa - wb));
    }
  return d;
}

void delay_cross_check(Runner& R) {
  const int C = 7;
  R.check(C, "delay against annotated recomputation, 1000 random pairs", 0, [&R] {
    std::mt19937_64 rng(R.opt.seed + 7);
    int bad = 0, nonzero = 0;
    const int total = 1000;
    for (int i = 0; i < total; ++i) {
      int n = 1 + static_cast<int>(rng() % 6);
      SubstSeq l;
      for (int t = 0; t < n; ++t) l.push_back(random_substitution(rng, 2));
      Word w = out_word(l, 0, 2);
      // The same output emitted left to right in random chunks.
      std::vector<int> cut(n + 1, 0);
      cut[n] = static_cast<int>(w.size());
      for (int t = 1; t < n; ++t) cut[t] = static_cast<int>(rng() % (w.size() + 1));
      std::sort(cut.begin(), cut.end());
      SubstSeq m;
      for (int t = 0; t < n; ++t) {
        std::vector<int> img{0};
        for (int p = cut[t]; p < cut[t + 1]; ++p) img.push_back(letter_token(w[p]));
        m.push_back(Substitution({img, {1}}));
      }
      if (rng() % 2) std::swap(l, m);
      int ell = 1 + static_cast<int>(rng() % 3);
      int a = delay_ell(l, m, 0, ell), b = independent_delay(l, m, ell);
      bad += a != b;
      nonzero += a > 0;
    }
    return Result{bad == 0, std::to_string(bad) + " disagreements, " + std::to_string(nonzero) +
                                " pairs with positive delay"};
  });
}

}  // namespace

std::vector<CheckItem> run_checks(const CheckOptions& opt) {
  Runner R(opt);
  if (R.wanted(1)) pinned_facts(R);
  if (R.wanted(2)) automaton_oracle(R);
  if (R.wanted(3)) decision_procedures(R);
  if (R.wanted(4)) rational_consistency(R);
  if (R.wanted(5)) variable_minimization(R);
  if (R.wanted(6)) completeness(R);
  if (R.wanted(7)) delay_cross_check(R);
  return R.items;
}

}  // namespace sstdelay
