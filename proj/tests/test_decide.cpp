#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>

#include "sstdelay/decide.hpp"
#include "sstdelay/errors.hpp"
#include "support.hpp"

using namespace sstdelay;
using namespace testing;

namespace {

bool is_run_of(const Sst& t, const Word& u, const SubstSeq& run) {
  for (const auto& r : enumerate_runs(t, u))
    if (r.seq == run) return true;
  return false;
}

const std::vector<std::pair<std::string, std::string>> kPairs{
    {"t1", "t2"},         {"t3", "t4"},         {"t4", "t3"},         {"rat1_a", "rat1_b"},
    {"rat2_b", "rat2_a"}, {"rat3_a", "rat3_b"}, {"rat3_b", "rat3_a"}, {"rat4_a", "rat4_b"},
    {"rat4_b", "rat4_a"}, {"rat5_a", "rat5_b"}};

}  // namespace

TEST_CASE("the two sorting transducers are equivalent") {
  auto v = check_equivalence(corpus_sst("t1"), corpus_sst("t2"), 0, 1);
  CHECK(v.holds());
  CHECK_FALSE(v.counterexample.has_value());
  CHECK(v.stats.substitutions > 0);
}

TEST_CASE("t3 is not included in t4 for small delay bounds") {
  Sst t3 = corpus_sst("t3"), t4 = corpus_sst("t4");
  for (int k = 0; k <= 2; ++k) {
    CAPTURE(k);
    auto v = check_inclusion(t3, t4, k, 1);
    REQUIRE_FALSE(v.holds());
    REQUIRE(v.counterexample);
    const auto& ce = *v.counterexample;
    auto u = unify({t3, t4});
    CHECK(is_run_of(u[0], ce.input, ce.run));
    CHECK(ce.states.size() == ce.input.size() + 1);
    auto o = bounded_inclusion_violation(t3, t4, k, 1, 8);
    REQUIRE(o);
    CHECK(o->input == ce.input);
  }
}

TEST_CASE("verdicts agree with the bounded oracle") {
  for (const auto& [a, b] : kPairs)
    for (int k = 0; k <= 1; ++k) {
      CAPTURE(a);
      CAPTURE(b);
      CAPTURE(k);
      Sst ta = corpus_sst(a), tb = corpus_sst(b);
      auto v = check_inclusion(ta, tb, k, 1);
      auto o = bounded_inclusion_violation(ta, tb, k, 1, 6);
      if (v.holds()) {
        REQUIRE_FALSE(o.has_value());
      } else {
        // Every corpus counterexample is short.
        REQUIRE(o.has_value());
        REQUIRE(v.counterexample);
        CHECK(o->input == v.counterexample->input);
      }
    }
}

TEST_CASE("single-run shortcut and the general search agree") {
  DecideOptions off;
  off.single_run_shortcut = false;
  for (const auto& [a, b] : kPairs) {
    if (a == "rat2_b" || a == "rat5_a") continue;  // the general search needs millions of nodes
    for (int k = 0; k <= 1; ++k) {
      CAPTURE(a);
      CAPTURE(k);
      auto x = check_inclusion(corpus_sst(a), corpus_sst(b), k, 1);
      auto y = check_inclusion(corpus_sst(a), corpus_sst(b), k, 1, off);
      REQUIRE(x.holds() == y.holds());
      if (!x.holds()) {
        REQUIRE(x.counterexample);
        REQUIRE(y.counterexample);
        CHECK(x.counterexample->input == y.counterexample->input);
        CHECK(x.counterexample->run == y.counterexample->run);
      }
    }
  }
}

TEST_CASE("reflexivity") {
  for (const char* n : {"t1", "t2", "t3", "t4", "reverse", "rat1_a", "rat2_b", "rat5_a"}) {
    CAPTURE(n);
    CHECK(check_equivalence(corpus_sst(n), corpus_sst(n), 0, 1).holds());
  }
}

TEST_CASE("failed equivalence names the direction") {
  auto v = check_equivalence(corpus_sst("t3"), corpus_sst("t4"), 0, 1);
  REQUIRE_FALSE(v.holds());
  REQUIRE(v.counterexample);
  CHECK_FALSE(v.counterexample->direction.empty());
}

TEST_CASE("search budget") {
  DecideOptions tiny;
  tiny.budget = 3;
  tiny.single_run_shortcut = false;
  CHECK_THROWS_AS(check_inclusion(corpus_sst("t1"), corpus_sst("t2"), 0, 1, tiny), ResourceError);
}

TEST_CASE("safety games") {
  SUBCASE("player 1 avoids the unsafe position through a cycle") {
    SafetyGame g;
    int a = g.add_position(1), b = g.add_position(0), bad = g.add_position(0, true);
    g.add_move(a, b);
    g.add_move(a, bad);
    g.add_move(b, a);
    auto w = solve_safety(g);
    CHECK(w[a]);
    CHECK(w[b]);
    CHECK_FALSE(w[bad]);
  }
  SUBCASE("player 0 forces the unsafe position") {
    SafetyGame g;
    int a = g.add_position(0), b = g.add_position(1), c = g.add_position(1),
        bad = g.add_position(1, true);
    g.add_move(a, b);
    g.add_move(a, c);
    g.add_move(b, bad);
    g.add_move(c, c);
    auto w = solve_safety(g);
    CHECK_FALSE(w[a]);
    CHECK_FALSE(w[b]);
    CHECK(w[c]);
  }
  SUBCASE("dead ends") {
    SafetyGame g;
    int p0 = g.add_position(0), p1 = g.add_position(1);
    auto w = solve_safety(g);
    CHECK(w[p0]);
    CHECK_FALSE(w[p1]);
  }
  SUBCASE("six positions, two rounds of attraction") {
    // 0 -> {1, 2}; 1 (p1) -> {3}; 2 (p1) -> {3, 4}; 3 (p0) -> {5}; 4 loops; 5 unsafe.
    SafetyGame g;
    int q[6];
    int owner[6] = {0, 1, 1, 0, 1, 1};
    for (int i = 0; i < 6; ++i) q[i] = g.add_position(owner[i], i == 5);
    g.add_move(q[0], q[1]);
    g.add_move(q[0], q[2]);
    g.add_move(q[1], q[3]);
    g.add_move(q[2], q[3]);
    g.add_move(q[2], q[4]);
    g.add_move(q[3], q[5]);
    g.add_move(q[4], q[4]);
    g.add_move(q[5], q[5]);
    auto w = solve_safety(g);
    CHECK(std::vector<char>(w.begin(), w.end()) == std::vector<char>{0, 0, 1, 0, 1, 0});
  }
}

TEST_CASE("candidate substitutions") {
  auto none = candidate_substitutions(2, 2, 3, 0);
  REQUIRE(none.size() == 1);
  CHECK(none[0].images[0].empty());

  // One variable, one letter, at most one letter: ε, a, X, Xa, aX.
  auto one = candidate_substitutions(1, 1, 1, 1);
  CHECK(one.size() == 5);
  for (const auto& s : candidate_substitutions(2, 2, 2, 2)) {
    REQUIRE_FALSE(validate_copyless(s).has_value());
    int letters = 0;
    for (const auto& img : s.images)
      for (int tok : img) letters += !is_var(tok);
    REQUIRE(letters <= 2);
  }
  // Variables outside [0, m) are left unchanged.
  for (const auto& s : candidate_substitutions(2, 3, 2, 1)) {
    CHECK(s.images[1] == std::vector<int>{1});
    CHECK(s.images[2] == std::vector<int>{2});
  }
}

TEST_CASE("candidate letter bound") {
  CHECK(candidate_letter_bound(corpus_sst("reverse"), 0) == 2);
  CHECK(candidate_letter_bound(corpus_sst("reverse"), 2) == 6);
}

TEST_CASE("variable minimization") {
  Sst t2 = corpus_sst("t2");
  CHECK(varmin_nondet(t2, 0, 1, 1).holds());
  CHECK(varmin_det(t2, 0, 1, 1).holds());

  // The reverse copy needs its second variable.
  Sst rev = corpus_sst("reverse");
  DecideOptions d;
  d.max_r = candidate_letter_bound(rev, 0);
  auto v = varmin_nondet(rev, 0, 1, 1, d);
  REQUIRE_FALSE(v.holds());
  REQUIRE(v.counterexample);
  CHECK(v.alphabet.render(v.counterexample->input) == "ab");
  auto o = bounded_varmin_violation(rev, 0, 1, 1, d.max_r, 4);
  REQUIRE(o);
  CHECK(o->input == v.counterexample->input);

  // With no variable the output is always empty.
  CHECK_FALSE(varmin_nondet(t2, 0, 1, 0).holds());
  CHECK_FALSE(varmin_det(t2, 0, 1, 0).holds());
}

TEST_CASE("input-annotated resynchronizer") {
  Sst t3 = corpus_sst("t3"), t4 = corpus_sst("t4");
  auto u = unify({t3, t4});
  ResyncParams p;
  p.k = 3;
  p.ell = 1;
  p.nletters = u[0].alphabet.size();
  std::set<Substitution> s;
  for (const auto& t : u)
    for (const auto& x : substitution_set(t)) s.insert(x);
  p.s.assign(s.begin(), s.end());
  auto d = build_d_in(p, u[0].alphabet);
  Word in(7, 0);
  SubstSeq l, m;
  for (const auto& r : enumerate_runs(u[0], in))
    if (u[0].alphabet.render(out_word(r.seq, 0, u[0].vars.size())) == "aaabaaa") l = r.seq;
  for (const auto& r : enumerate_runs(u[1], in))
    if (u[1].alphabet.render(out_word(r.seq, 0, u[1].vars.size())) == "aaabaaa") m = r.seq;
  REQUIRE_FALSE(l.empty());
  REQUIRE_FALSE(m.empty());
  CHECK(d->accepts(in, l, in, m));
  Word other = in;
  other[0] = 1;
  CHECK_FALSE(d->accepts(in, l, other, m));
  CHECK(d->end_tag() == d->input_letters());
}
