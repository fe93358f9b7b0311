#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numeric>

#include "sstdelay/errors.hpp"
#include "sstdelay/pump.hpp"
#include "support.hpp"

using namespace sstdelay;
using namespace testing;

namespace {

struct T34 {
  Sst t3, t4;
  int nv;
};

T34 t34() {
  auto u = unify({corpus_sst("t3"), corpus_sst("t4")});
  return {u[0], u[1], u[0].vars.size()};
}

SubstSeq run_with(const Sst& t, int m1, int m2) {
  Word in(m1 + m2 + 1, 0), out(m1, 0);
  out.push_back(1);
  out.insert(out.end(), m2, 0);
  for (const auto& r : enumerate_runs(t, in))
    if (out_word(r.seq, 0, t.vars.size()) == out) return r.seq;
  FAIL("no run");
  return {};
}

bool brute_periodic(const Word& u, int p) {
  for (std::size_t i = 0; i + p < u.size(); ++i)
    if (u[i] != u[i + p]) return false;
  return true;
}

Word random_word(std::mt19937& rng, int n) {
  Word w(n);
  for (auto& c : w) c = static_cast<int>(rng() % 2);
  return w;
}

}  // namespace

TEST_CASE("pumping one step repeats its letters") {
  auto t = t34();
  Alphabet ab = t.t3.alphabet;
  auto l = run_with(t.t3, 2, 2);
  CHECK(ab.render(out_word(l, 0, t.nv)) == "aabaa");
  // The first steps of t3 fill the right block.
  auto p = pump_interval(l, {1, 2});
  CHECK(p.size() == l.size() + 1);
  CHECK(ab.render(out_word(p, 0, t.nv)) == "aabaaa");
  auto q = pump_interval(l, {1, 3});
  CHECK(ab.render(out_word(q, 0, t.nv)) == "aabaaaa");
  CHECK_THROWS(pump_interval(l, {0, 1}));
  CHECK_THROWS(pump_interval(l, {3, 3}));
  CHECK_THROWS(pump_interval(l, {2, static_cast<int>(l.size())}));
}

TEST_CASE("pumping is the doubled block") {
  std::mt19937 rng(31);
  for (int i = 0; i < 300; ++i) {
    std::vector<Substitution> s;
    for (int j = 0; j < 3; ++j) s.push_back(random_substitution(rng, 2, 2));
    int n = 3 + i % 5;
    auto l = random_seq(rng, s, n);
    int a = 1 + static_cast<int>(rng() % (n - 2));
    int b = a + 1 + static_cast<int>(rng() % (n - 1 - a));
    auto p = pump_interval(l, {a, b});
    SubstSeq expected(l.begin(), l.begin() + (b - 1));
    expected.insert(expected.end(), l.begin() + (a - 1), l.end());
    REQUIRE(p == expected);
  }
}

TEST_CASE("decomposition at the last time is the output variable") {
  auto t = t34();
  auto l = run_with(t.t3, 3, 3);
  const int n = static_cast<int>(l.size());
  CHECK(suffix_word(l, n, 0) == TokenWord{0});
  auto d = decompose_abc(l, n, 2, 4, 0);
  CHECK(d.alpha.empty());
  CHECK(d.gamma.empty());
  CHECK(d.beta == TokenWord{0});
  CHECK(d.j1p == 1);
  CHECK(d.j2p == 7);
  // At time 0 every variable is still empty, so the letters spell the output.
  auto z = decompose_abc(l, 0, 4, 4, 0);
  Word letters;
  for (int tok : suffix_word(l, 0, 0))
    if (!is_var(tok)) letters.push_back(token_letter(tok));
  CHECK(letters == out_word(l, 0, t.nv));
  CHECK(z.beta.size() == 1);
  CHECK(z.j1p == 4);
  CHECK(z.j2p == 4);
  CHECK_THROWS_AS(decompose_abc(l, n, 0, 3, 0), DomainError);
  CHECK_THROWS_AS(decompose_abc(l, n, 3, 8, 0), DomainError);
}

TEST_CASE("decomposition covers the window") {
  std::mt19937 rng(32);
  for (int i = 0; i < 300; ++i) {
    std::vector<Substitution> s;
    for (int j = 0; j < 3; ++j) s.push_back(random_substitution(rng, 2, 2, 3));
    auto l = random_seq(rng, s, 2 + i % 5);
    const int len = static_cast<int>(out_word(l, 0, 2).size());
    if (len == 0) continue;
    const int n = static_cast<int>(l.size());
    int j1 = 1 + static_cast<int>(rng() % len);
    int j2 = j1 + static_cast<int>(rng() % (len - j1 + 1));
    for (int t = 0; t <= n; ++t) {
      auto d = decompose_abc(l, t, j1, j2, 0);
      TokenWord all = d.alpha;
      all.insert(all.end(), d.beta.begin(), d.beta.end());
      all.insert(all.end(), d.gamma.begin(), d.gamma.end());
      REQUIRE(all == suffix_word(l, t, 0));
      REQUIRE(d.j1p <= j1);
      REQUIRE(d.j2p >= j2);
      REQUIRE_FALSE(d.beta.empty());
    }
  }
}

TEST_CASE("identical runs never satisfy the first condition") {
  auto t = t34();
  auto l = run_with(t.t3, 4, 4);
  auto p = pad_output(l, 0, 4, 2);
  const int n = static_cast<int>(p.size());
  const int len = static_cast<int>(out_word(p, 0, t.nv).size());
  for (int s = 0; s < n; ++s)
    for (int s2 = s + 1; s2 <= n; ++s2)
      for (int j = 5; j + 2 <= len; ++j) REQUIRE_FALSE(check_conditions(p, p, s, s2, j, 2, 1, 0).c1);
}

TEST_CASE("padding") {
  auto t = t34();
  auto l = run_with(t.t3, 1, 1);
  auto p = pad_output(l, 0, 2, 2);
  Word w = out_word(p, 0, t.nv);
  CHECK(w == Word{2, 2, 0, 1, 0, 2, 2});
  CHECK(p.size() == l.size());
  CHECK_THROWS_AS(pad_output({}, 0, 1, 2), DomainError);
}

TEST_CASE("periodicity") {
  Alphabet ab({"a", "b"});
  CHECK(is_p_periodic(word(ab, "abab"), 2));
  CHECK(is_p_periodic(word(ab, "aba"), 2));
  CHECK_FALSE(is_p_periodic(word(ab, "abb"), 2));
  CHECK(is_p_periodic(word(ab, "ab"), 3));
  std::mt19937 rng(33);
  for (int i = 0; i < 2000; ++i) {
    Word w = random_word(rng, static_cast<int>(rng() % 9));
    int p = 1 + static_cast<int>(rng() % 4);
    REQUIRE(is_p_periodic(w, p) == brute_periodic(w, p));
  }
}

TEST_CASE("Fine-Wilf on random factorizations") {
  std::mt19937 rng(34);
  int applicable = 0;
  for (int i = 0; i < 20000; ++i) {
    int p = 1 + static_cast<int>(rng() % 3), q = 1 + static_cast<int>(rng() % 3);
    // Periodic seeds make the premises hold often.
    Word seed = random_word(rng, std::gcd(p, q) + static_cast<int>(rng() % 2));
    Word all;
    int n = static_cast<int>(rng() % 11);
    while (static_cast<int>(all.size()) < n) all.insert(all.end(), seed.begin(), seed.end());
    all.resize(n);
    if (rng() % 4 == 0 && n) all[rng() % n] ^= 1;
    int i1 = n ? static_cast<int>(rng() % (n + 1)) : 0;
    int i2 = i1 + (n - i1 ? static_cast<int>(rng() % (n - i1 + 1)) : 0);
    Word u(all.begin(), all.begin() + i1), v(all.begin() + i1, all.begin() + i2),
        w(all.begin() + i2, all.end());
    auto r = fine_wilf(u, v, w, p, q);
    Word uv(all.begin(), all.begin() + i2), vw(all.begin() + i1, all.end());
    bool premises = brute_periodic(uv, p) && brute_periodic(vw, q) &&
                    static_cast<int>(v.size()) >= p + q - std::gcd(p, q);
    REQUIRE((r != FineWilf::kNotApplicable) == premises);
    if (premises) {
      ++applicable;
      REQUIRE(r == FineWilf::kPeriodic);
      REQUIRE(brute_periodic(all, std::gcd(p, q)));
    }
  }
  CHECK(applicable > 1000);
}

TEST_CASE("pump witnesses on the t3/t4 runs") {
  auto t = t34();
  auto l = run_with(t.t3, 3, 3), m = run_with(t.t4, 3, 3);
  auto w = find_pump_witnesses(l, m, 2, 0, 1, 0);
  REQUIRE(w.times);
  const auto& ts = *w.times;
  REQUIRE(ts.size() == 2);
  CHECK(ts[0] >= 1);
  CHECK(ts[0] < ts[1]);
  CHECK(ts[1] < static_cast<int>(l.size()));
  CHECK(out_word(pump_interval(l, {ts[0], ts[1]}), 0, t.nv) !=
        out_word(pump_interval(m, {ts[0], ts[1]}), 0, t.nv));

  // Low delay, or outputs that differ, are refused.
  CHECK_THROWS_AS(find_pump_witnesses(l, l, 2, 0, 1, 0), PreconditionError);
  auto other = run_with(t.t4, 2, 4);
  CHECK_THROWS_AS(find_pump_witnesses(l, other, 2, 0, 1, 0), PreconditionError);
}

TEST_CASE("pumped windows shift apart on a t3/t4 pair") {
  auto t = t34();
  auto l = pad_output(run_with(t.t3, 8, 0), 0, 4, 2), m = pad_output(run_with(t.t4, 8, 0), 0, 4, 2);
  int found = 0;
  const int n = static_cast<int>(l.size()), len = static_cast<int>(out_word(l, 0, t.nv).size());
  for (int s = 0; s + 1 <= n - 2; ++s)
    for (int s2 = s + 1; s2 <= n - 2; ++s2)
      for (int j = 5; j + 2 <= len; ++j) {
        if (!check_conditions(l, m, s, s2, j, 2, 1, 0).all()) continue;
        ++found;
        auto p = check_property_p(l, m, interval_after(s, s2), j, 2, 1, 0);
        REQUIRE(p.holds);
        REQUIRE(p.x != p.y);
        REQUIRE(std::abs(p.x - p.y) <= 2);
      }
  CHECK(found > 0);
}

TEST_CASE("completeness constants") {
  auto a = completeness_constants(1, 1);
  CHECK(a.m2 == 4);
  CHECK(a.ell == 16);
  CHECK(a.k == 1584);
  auto b = completeness_constants(2, 2);
  CHECK(b.m2 == 54);
  CHECK(b.ell == 5832);
  CHECK(b.k == 204090840ULL);
  auto c = completeness_constants(substitution_set(corpus_sst("t1")));
  CHECK(c.m1 == 1);
  CHECK(c.k == 1584);
  CHECK_THROWS_AS(completeness_constants(1000, 6), DomainError);
}

TEST_CASE("occurrence") {
  Alphabet ab({"a", "b"});
  Word u = word(ab, "abba");
  CHECK(occurs_at(u, 2, word(ab, "bb")));
  CHECK_FALSE(occurs_at(u, 3, word(ab, "bb")));
  CHECK_FALSE(occurs_at(u, 0, word(ab, "a")));
  CHECK_FALSE(occurs_at(u, 4, word(ab, "ab")));
  CHECK(occurs_at(u, 5, Word{}));
}
