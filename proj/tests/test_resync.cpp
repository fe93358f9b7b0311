#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>

#include "sstdelay/errors.hpp"
#include "sstdelay/resync.hpp"
#include "sstdelay/resync_reference.hpp"
#include "support.hpp"

using namespace sstdelay;
using namespace testing;

namespace {

ResyncParams params_of(const std::vector<Sst>& ts, int k, int ell) {
  auto u = unify(ts);
  std::set<Substitution> s;
  for (const auto& t : u)
    for (const auto& x : substitution_set(t)) s.insert(x);
  ResyncParams p;
  p.k = k;
  p.ell = ell;
  p.s.assign(s.begin(), s.end());
  p.nletters = u[0].alphabet.size();
  return p;
}

ResyncParams random_params(std::mt19937& rng, int k, int ell) {
  ResyncParams p;
  p.k = k;
  p.ell = ell;
  p.nletters = 2;
  int nvars = 1 + static_cast<int>(rng() % 2);
  std::set<Substitution> s;
  while (s.size() < 2 + rng() % 2) s.insert(random_substitution(rng, nvars, 2));
  p.s.assign(s.begin(), s.end());
  return p;
}

// Indices over S' = S followed by its endmarked copies, last step endmarked.
std::vector<int> endmarked(const ResyncAutomaton& d, const SubstSeq& l) {
  std::vector<int> r;
  for (const auto& x : l) r.push_back(d.index_of(x));
  r.back() += static_cast<int>(d.params().s.size());
  return r;
}

bool engine_rejects(const Nfa& a, const ResyncAutomaton& d, const SubstSeq& l, const SubstSeq& m) {
  auto x = endmarked(d, l), y = endmarked(d, m);
  const int ns = 2 * static_cast<int>(d.params().s.size());
  SymWord w;
  for (std::size_t i = 0; i < x.size(); ++i) w.push_back(x[i] * ns + y[i]);
  return accepts(a, w);
}

std::pair<SubstSeq, SubstSeq> t34_runs(int m1, int m2) {
  auto u = unify({corpus_sst("t3"), corpus_sst("t4")});
  Word in(m1 + m2 + 1, 0), out(m1, 0);
  out.push_back(1);
  out.insert(out.end(), m2, 0);
  auto pick = [&](const Sst& t) {
    for (const auto& r : enumerate_runs(t, in))
      if (out_word(r.seq, 0, t.vars.size()) == out) return r.seq;
    FAIL("no run");
    return SubstSeq{};
  };
  return {pick(u[0]), pick(u[1])};
}

}  // namespace

TEST_CASE("automaton agrees with the membership oracle") {
  for (int k : {0, 1, 3})
    for (int ell : {1, 2}) {
      CAPTURE(k);
      CAPTURE(ell);
      auto p = params_of({corpus_sst("t3"), corpus_sst("t4")}, k, ell);
      auto d = build_resync(p);
      for (int n = 1; n <= 3; ++n) {
        auto seqs = all_seqs(p.s, n);
        for (const auto& l : seqs)
          for (const auto& m : seqs) REQUIRE(d->accepts_pair(l, m) == oracle_in_resync(l, m, p));
      }
    }
}

TEST_CASE("automaton agrees with the oracle on random sets") {
  std::mt19937 rng(21);
  for (int i = 0; i < 12; ++i) {
    auto p = random_params(rng, i % 3, 1 + i % 2);
    auto d = build_resync(p);
    for (int n = 1; n <= 4; ++n) {
      auto seqs = all_seqs(p.s, n);
      for (const auto& l : seqs)
        for (const auto& m : seqs) REQUIRE(d->accepts_pair(l, m) == oracle_in_resync(l, m, p));
    }
  }
}

TEST_CASE("membership is symmetric and monotone in k") {
  std::mt19937 rng(22);
  for (int i = 0; i < 6; ++i) {
    auto p = random_params(rng, 0, 1 + i % 2);
    std::vector<std::shared_ptr<ResyncAutomaton>> ds;
    for (int k = 0; k <= 2; ++k) {
      p.k = k;
      ds.push_back(build_resync(p));
    }
    for (int n = 1; n <= 3; ++n) {
      auto seqs = all_seqs(p.s, n);
      for (const auto& l : seqs)
        for (const auto& m : seqs)
          for (int k = 0; k <= 2; ++k) {
            bool in = ds[k]->accepts_pair(l, m);
            REQUIRE(in == ds[k]->accepts_pair(m, l));
            if (k < 2 && in) REQUIRE(ds[k + 1]->accepts_pair(l, m));
          }
    }
  }
}

TEST_CASE("the t3/t4 runs need delay bound 3") {
  auto [l, m] = t34_runs(3, 3);
  for (int k = 0; k <= 4; ++k) {
    auto d = build_resync(params_of({corpus_sst("t3"), corpus_sst("t4")}, k, 1));
    CHECK(d->accepts_pair(l, m) == (k >= 3));
    CHECK(d->accepts_pair(l, l));
  }
}

TEST_CASE("pairs with different outputs or lengths are rejected") {
  auto p = params_of({corpus_sst("t3"), corpus_sst("t4")}, 5, 1);
  auto d = build_resync(p);
  auto [l, m] = t34_runs(2, 1);
  auto [l2, m2] = t34_runs(1, 2);
  CHECK(d->accepts_pair(l, m));
  CHECK_FALSE(d->accepts_pair(l, m2));
  auto [s, t] = t34_runs(2, 2);
  CHECK_FALSE(d->accepts_pair(l, s));
}

TEST_CASE("explored automaton agrees with lazy membership") {
  // Full exploration only closes for small append-only sets.
  std::vector<ResyncParams> ps;
  for (int i = 0; i < 4; ++i) ps.push_back(params_of({corpus_sst("rat3_a"), corpus_sst("rat3_b")}, i / 2, 1 + i % 2));
  ps.push_back(params_of({corpus_sst("rat2_a"), corpus_sst("rat2_b")}, 0, 1));
  for (const auto& p : ps) {
    auto d = build_resync(p);
    Dfa e = d->explore(kDefaultBudget);
    CHECK(e.num_states() >= 1);
    for (int n = 1; n <= 3; ++n) {
      auto seqs = all_seqs(p.s, n);
      for (const auto& l : seqs)
        for (const auto& m : seqs) {
          SymWord w;
          for (int j = 0; j < n; ++j) w.push_back(d->symbol(d->index_of(l[j]), d->index_of(m[j])));
          REQUIRE(e.run(w) == d->accepts_pair(l, m));
        }
    }
  }
}

TEST_CASE("endmarked characterization is the complement of membership") {
  std::mt19937 rng(24);
  for (int i = 0; i < 8; ++i) {
    auto p = random_params(rng, i % 2, 1 + i % 2);
    auto d = build_resync(p);
    auto c = characterization_engine_nfa(p);
    for (int n = 1; n <= 3; ++n) {
      auto seqs = all_seqs(p.s, n);
      for (const auto& l : seqs)
        for (const auto& m : seqs) REQUIRE(engine_rejects(*c, *d, l, m) == !oracle_in_resync(l, m, p));
    }
  }
}

TEST_CASE("staged reference construction agrees on tiny sets") {
  VarSet x({"X"}, 0);
  Alphabet ab({"a", "b"});
  ResyncParams p;
  p.ell = 1;
  p.nletters = 2;
  p.s = {parse_substitution("X = X a", ab, x), parse_substitution("X = a X", ab, x),
         parse_substitution("X = X b", ab, x)};
  for (int k : {0, 1}) {
    p.k = k;
    ReferenceResync ref(p);
    auto d = build_resync(p);
    for (int n = 1; n <= 3; ++n) {
      auto seqs = all_seqs(p.s, n);
      for (const auto& l : seqs)
        for (const auto& m : seqs) {
          bool in = oracle_in_resync(l, m, p);
          REQUIRE(ref.contains(l, m) == in);
          REQUIRE(d->accepts_pair(l, m) == in);
          if (!in) REQUIRE_FALSE(ref.witnesses(l, m, 1).empty());
        }
    }
  }
}

TEST_CASE("endmarking") {
  VarSet xy({"X", "Y"}, 0);
  Alphabet ab({"a", "b"});
  auto s = parse_substitution("X = X a ; Y = b Y", ab, xy);
  auto e = endmark(s, 0, 2);
  CHECK(e.images[0].back() == letter_token(2));
  CHECK(e.images[0].size() == s.images[0].size() + 1);
  CHECK(e.images[1] == s.images[1]);
}

TEST_CASE("parameter validation") {
  auto p = params_of({corpus_sst("t1")}, 0, 1);
  p.ell = 0;
  CHECK_THROWS_AS(build_resync(p), StructuralError);
  p.ell = 1;
  p.k = -1;
  CHECK_THROWS_AS(build_resync(p), StructuralError);
  p.k = 0;
  auto d = build_resync(p);
  VarSet x({"X"}, 0);
  CHECK_THROWS_AS(d->index_of(Substitution({{0, letter_token(5)}})), DomainError);
}

namespace {

// Runs the checker over the letters of w with mark i after i letters and
// mark j after j letters (i = 0 uses the zero start, j = 0 omits it).
bool checker_accepts(const WordChecker& c, const Word& w, int i, int j) {
  int s = c.init(i == 0);
  for (int p = 1; p <= static_cast<int>(w.size()); ++p) {
    s = c.next(s, w[p - 1]);
    if (p == i) s = c.next(s, c.mark_i());
    if (p == j) s = c.next(s, c.mark_j());
  }
  return c.accepting(c.flush(s));
}

}  // namespace

TEST_CASE("cut checker marks consecutive cuts") {
  Alphabet ab({"a", "b"});
  for (int ell : {1, 2}) {
    WordChecker c(2, ell, Branch{true, 0});
    for (const auto& w : all_words(2, 6)) {
      auto cuts = factorize(w, ell).cuts;
      std::vector<int> with_zero{0};
      with_zero.insert(with_zero.end(), cuts.begin(), cuts.end());
      for (std::size_t x = 0; x + 1 < with_zero.size(); ++x) {
        CAPTURE(ab.render(w));
        REQUIRE(checker_accepts(c, w, with_zero[x], with_zero[x + 1]));
        // Any other position for the second mark is rejected.
        for (int j = 1; j <= static_cast<int>(w.size()); ++j)
          if (j != with_zero[x + 1] && j > with_zero[x])
            REQUIRE_FALSE(checker_accepts(c, w, with_zero[x], j));
      }
    }
  }
}
