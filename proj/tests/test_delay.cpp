#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <optional>

#include "sstdelay/delay.hpp"
#include "support.hpp"

using namespace sstdelay;
using namespace testing;

namespace {

const Alphabet kAbc({"a", "b", "c"});

SubstSeq run_through(const Sst& t, const Word& u, const std::vector<std::string>& states) {
  for (const auto& r : enumerate_runs(t, u)) {
    std::vector<std::string> names;
    for (int q : r.states) names.push_back(t.states[q]);
    if (names == states) return r.seq;
  }
  FAIL("no such run");
  return {};
}

// Runs of t3 and t4 with output a^m1 b a^m2 (each loop m1 resp. m2 times).
std::pair<SubstSeq, SubstSeq> t34(int m1, int m2) {
  Sst t3 = corpus_sst("t3"), t4 = corpus_sst("t4");
  Word u(m1 + m2 + 1, 0);
  std::vector<std::string> s3(m2 + 1, "p"), s4(m1 + 1, "p");
  s3.insert(s3.end(), m1 + 1, "q");
  s4.insert(s4.end(), m2 + 1, "q");
  return {run_through(t3, u, s3), run_through(t4, u, s4)};
}

// Shortest w with u = w^n, by trying every divisor length.
Word brute_root(const Word& u) {
  for (std::size_t p = 1; p <= u.size(); ++p) {
    if (u.size() % p) continue;
    bool ok = true;
    for (std::size_t i = p; i < u.size() && ok; ++i) ok = u[i] == u[i - p];
    if (ok) return Word(u.begin(), u.begin() + p);
  }
  return u;
}

}  // namespace

TEST_CASE("origins") {
  auto [l, m] = t34(3, 3);
  CHECK(origin_map(l, 0).at(0) == 5);
  CHECK(origin_map(m, 0).at(0) == 1);

  VarSet o({"O"}, 0);
  auto s = parse_substitution("O = a b", kAbc, o);
  CHECK(origin_map({s}, 0) == OriginMap{1, 1});
}

TEST_CASE("weights") {
  auto [l, m] = t34(3, 3);
  CHECK(weight(l, 0, 2, 3) == 0);
  CHECK(weight(m, 0, 2, 3) == 2);
  const int n = static_cast<int>(l.size());
  for (int j = 0; j <= 9; ++j) CHECK(weight(l, 0, j, n) == std::min(j, 7));
}

TEST_CASE("weights are monotone in position and time") {
  std::mt19937 rng(5);
  for (int i = 0; i < 500; ++i) {
    std::vector<Substitution> s;
    for (int j = 0; j < 3; ++j) s.push_back(random_substitution(rng, 2, 2));
    auto l = random_seq(rng, s, 1 + i % 6);
    auto o = origin_map(l, 0);
    const int len = static_cast<int>(o.size()), n = static_cast<int>(l.size());
    for (int j = 0; j <= len; ++j)
      for (int t = 0; t <= n; ++t) {
        if (j < len) REQUIRE(weight(o, j, t) <= weight(o, j + 1, t));
        if (t < n) REQUIRE(weight(o, j, t) <= weight(o, j, t + 1));
        // Independent count over the origin list.
        int c = 0;
        for (int p = 0; p < j; ++p) c += o[p] <= t;
        REQUIRE(weight(o, j, t) == c);
      }
  }
}

TEST_CASE("max-diff") {
  auto [l, m] = t34(3, 3);
  CHECK(max_diff(l, m, 0, 4, 4) == 3);
  CHECK(max_diff(l, m, 0, 6, 6) == 1);
  CHECK(max_diff(l, m, 0, 8, 8) == 0);
  CHECK(max_diff(l, m, 0, 0, 0) == 0);
  for (int j = 0; j <= 7; ++j) CHECK(max_diff(l, l, 0, j, j) == 0);
}

TEST_CASE("fault hook shifts max-diff") {
  auto [l, m] = t34(3, 3);
  set_max_diff_fault(1);
  int shifted = max_diff(l, m, 0, 4, 4);
  set_max_diff_fault(0);
  CHECK(shifted == 4);
  CHECK(max_diff(l, m, 0, 4, 4) == 3);
}

TEST_CASE("primitive roots") {
  CHECK(primitive_root(word(kAbc, "abab")) == word(kAbc, "ab"));
  CHECK(primitive_root(word(kAbc, "abc")) == word(kAbc, "abc"));
  std::mt19937 rng(6);
  for (int i = 0; i < 1000; ++i) {
    int n = std::uniform_int_distribution<int>(1, 12)(rng);
    // Bias towards periodic words.
    int p = std::uniform_int_distribution<int>(1, n)(rng);
    Word base(p);
    for (auto& c : base) c = std::uniform_int_distribution<int>(0, 1)(rng);
    Word u;
    while (static_cast<int>(u.size()) < n) u.insert(u.end(), base.begin(), base.end());
    if (i % 2) u.resize(n);
    REQUIRE(primitive_root(u) == brute_root(u));
  }
}

TEST_CASE("factorization") {
  auto f = factorize(word(kAbc, "aaababcbabaaaaa"), 2);
  std::vector<std::string> parts;
  for (const auto& w : f.factors) parts.push_back(kAbc.render(w));
  CHECK(parts == std::vector<std::string>{"aaa", "ba", "bc", "baba", "aaaa"});
  CHECK(f.cuts == std::vector<int>{3, 5, 7, 11, 15});

  auto g = factorize(word(kAbc, "aaabaaa"), 1);
  CHECK(g.cuts == std::vector<int>{3, 4, 7});

  for (int n = 1; n <= 8; ++n)
    for (int ell = 1; ell <= 3; ++ell) CHECK(factorize(Word(n, 0), ell).cuts == std::vector<int>{n});
}

TEST_CASE("next cut") {
  Word u = word(kAbc, "aaababcbabaaaaa");
  CHECK(next_cut(u, 2, 5) == std::optional<int>(7));
  CHECK_FALSE(next_cut(u, 2, 15).has_value());
  CHECK(next_cut(u, 2, 0) == std::optional<int>(3));
}

TEST_CASE("delay of the t3/t4 runs") {
  auto [l, m] = t34(3, 3);
  CHECK(delay_ell(l, m, 0, 1) == 3);
  CHECK(delay_ell(l, l, 0, 1) == 0);
  auto f3 = load_seq(corpus("t3_run.seq")), f4 = load_seq(corpus("t4_run.seq"));
  CHECK(f3.seq == l);
  CHECK(f4.seq == m);
}

TEST_CASE("delay is symmetric on the t3/t4 family") {
  for (int m1 = 0; m1 <= 5; ++m1)
    for (int m2 = 0; m2 <= 5; ++m2) {
      auto [l, m] = t34(m1, m2);
      for (int ell = 1; ell <= 3; ++ell) REQUIRE(delay_ell(l, m, 0, ell) == delay_ell(m, l, 0, ell));
    }
}

TEST_CASE("appending and prepending one variable never drift at cuts") {
  // Interior weights differ by up to n, but a^n has a single cut, at its end.
  VarSet x({"X"}, 0);
  auto app = parse_substitution("X = X a", kAbc, x), pre = parse_substitution("X = a X", kAbc, x),
       fin = parse_substitution("X = X", kAbc, x);
  for (int n = 0; n <= 10; ++n) {
    SubstSeq l(n, app), m(n, pre);
    l.push_back(fin);
    m.push_back(fin);
    CHECK(delay_ell(l, m, 0, 1) == 0);
  }
}

TEST_CASE("delay is undefined on different outputs") {
  VarSet x({"X"}, 0);
  auto a = parse_substitution("X = X a", kAbc, x), b = parse_substitution("X = X b", kAbc, x);
  try {
    delay_ell({a, a}, {a, b}, 0, 1);
    FAIL("expected UndefinedDelay");
  } catch (const UndefinedDelay& e) {
    CHECK(e.discrepancy().kind == Discrepancy::kOutput);
    CHECK(e.discrepancy().position == 2);
  }
}

TEST_CASE("resynchronizer membership by the oracle") {
  auto [l, m] = t34(3, 3);
  Sst t3 = corpus_sst("t3"), t4 = corpus_sst("t4");
  ResyncParams p;
  p.ell = 1;
  p.out_var = 0;
  p.nletters = 2;
  std::set<Substitution> s;
  for (const auto& t : {t3, t4})
    for (const auto& x : substitution_set(t)) s.insert(x);
  p.s.assign(s.begin(), s.end());
  p.k = 3;
  CHECK(oracle_in_resync(l, m, p));
  p.k = 2;
  CHECK_FALSE(oracle_in_resync(l, m, p));
  p.k = 0;
  CHECK(oracle_in_resync(l, l, p));

  VarSet x({"X"}, 0);
  auto a = parse_substitution("X = X a", kAbc, x), b = parse_substitution("X = X b", kAbc, x);
  ResyncParams q;
  q.k = 5;
  q.ell = 1;
  q.s = {a, b};
  q.nletters = 2;
  CHECK_FALSE(oracle_in_resync({a}, {b}, q));
}

TEST_CASE("legacy measures on the five drawn runs") {
  std::vector<SubstSeq> rho;
  for (int i = 1; i <= 5; ++i) rho.push_back(load_seq(corpus("rho" + std::to_string(i) + ".seq")).seq);
  auto r = [&](int i) { return rho[i - 1]; };
  CHECK(delay_legacy(r(1), r(2), 0, LegacyKind::kPositional) == 2);
  CHECK(delay_legacy(r(2), r(3), 0, LegacyKind::kSymmetric) == 8);
  CHECK(delay_legacy(r(4), r(5), 0, LegacyKind::kSymmetric) == 8);
  CHECK(delay_legacy(r(2), r(4), 0, LegacyKind::kSymmetric) == 4);
  CHECK(delay_legacy(r(3), r(5), 0, LegacyKind::kSymmetric) == 4);
  for (int i = 2; i <= 5; ++i)
    for (int j = 2; j <= 5; ++j) CHECK(delay_legacy(r(i), r(j), 0, LegacyKind::kSize) == 0);
}
