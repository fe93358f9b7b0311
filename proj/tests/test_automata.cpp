#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <memory>
#include <random>
#include <set>

#include "sstdelay/automata.hpp"
#include "sstdelay/errors.hpp"

using namespace sstdelay;

namespace {

std::shared_ptr<ExplicitNfa> random_nfa(std::mt19937& rng, int nstates, int nsyms, double density) {
  auto a = std::make_shared<ExplicitNfa>(nsyms);
  std::bernoulli_distribution edge(density), acc(0.3);
  for (int q = 0; q < nstates; ++q) a->add_state(acc(rng));
  a->set_initial(0);
  if (nstates > 2 && edge(rng)) a->set_initial(nstates - 1);
  for (int q = 0; q < nstates; ++q)
    for (int s = 0; s < nsyms; ++s)
      for (int r = 0; r < nstates; ++r)
        if (edge(rng)) a->add_transition(q, s, r);
  return a;
}

std::vector<SymWord> words_upto(int nsyms, int n) {
  std::vector<SymWord> all{{}}, layer{{}};
  for (int len = 1; len <= n; ++len) {
    std::vector<SymWord> next;
    for (const auto& w : layer)
      for (int s = 0; s < nsyms; ++s) {
        next.push_back(w);
        next.back().push_back(s);
      }
    all.insert(all.end(), next.begin(), next.end());
    layer.swap(next);
  }
  return all;
}

// Direct simulation on the explicit transition table.
bool simulate(const ExplicitNfa& a, const SymWord& w) {
  std::set<State> cur;
  for (State q : a.initial()) cur.insert(q);
  for (Symbol s : w) {
    std::set<State> next;
    for (State q : cur) {
      std::vector<State> out;
      a.successors(q, s, out);
      next.insert(out.begin(), out.end());
    }
    cur.swap(next);
  }
  for (State q : cur)
    if (a.accepting(q)) return true;
  return false;
}

}  // namespace

TEST_CASE("subset construction preserves the language") {
  std::mt19937 rng(11);
  auto words = words_upto(2, 7);
  for (int i = 0; i < 200; ++i) {
    auto a = random_nfa(rng, 1 + i % 6, 2, 0.25);
    Dfa d = determinize(*a);
    Dfa c = d.complement();
    Dfa dc = determinize_complement(*a);
    for (const auto& w : words) {
      bool in = simulate(*a, w);
      REQUIRE(accepts(*a, w) == in);
      REQUIRE(d.run(w) == in);
      REQUIRE(c.run(w) == !in);
      REQUIRE(dc.run(w) == !in);
    }
  }
}

TEST_CASE("products") {
  std::mt19937 rng(12);
  auto words = words_upto(2, 6);
  for (int i = 0; i < 100; ++i) {
    auto a = random_nfa(rng, 1 + i % 4, 2, 0.3), b = random_nfa(rng, 1 + (i / 4) % 4, 2, 0.3);
    auto both = product(a, b, ProductMode::kIntersection);
    auto either = product(a, b, ProductMode::kUnion);
    for (const auto& w : words) {
      bool x = simulate(*a, w), y = simulate(*b, w);
      REQUIRE(accepts(*both, w) == (x && y));
      REQUIRE(accepts(*either, w) == (x || y));
    }
  }
  auto a = random_nfa(rng, 2, 2, 0.5), b = random_nfa(rng, 2, 3, 0.5);
  CHECK_THROWS_AS(product(a, b, ProductMode::kUnion), StructuralError);
}

TEST_CASE("emptiness gives a shortest witness") {
  std::mt19937 rng(13);
  auto words = words_upto(2, 8);
  for (int i = 0; i < 300; ++i) {
    auto a = random_nfa(rng, 1 + i % 6, 2, 0.15);
    auto e = emptiness_witness(*a);
    std::optional<SymWord> first;
    for (const auto& w : words)
      if (simulate(*a, w)) {
        first = w;
        break;
      }
    if (e.empty) {
      // Six states: a shortest word has length below six.
      REQUIRE_FALSE(first.has_value());
    } else {
      REQUIRE(first.has_value());
      REQUIRE(simulate(*a, e.witness));
      REQUIRE(e.witness.size() == first->size());
    }
  }
}

TEST_CASE("inclusion agrees with enumeration and the unpruned search") {
  std::mt19937 rng(14);
  auto words = words_upto(2, 8);
  int included = 0, not_included = 0;
  for (int i = 0; i < 300; ++i) {
    auto a = random_nfa(rng, 1 + i % 4, 2, 0.3), b = random_nfa(rng, 1 + (i / 3) % 4, 2, 0.35);
    auto r = inclusion(*a, *b);
    auto n = inclusion(*a, *b, kDefaultBudget, true);
    REQUIRE(r.included == n.included);
    std::optional<SymWord> first;
    for (const auto& w : words)
      if (simulate(*a, w) && !simulate(*b, w)) {
        first = w;
        break;
      }
    // Four by four states: a shortest counterexample is below length 8.
    REQUIRE(r.included == !first.has_value());
    if (r.included) {
      ++included;
      continue;
    }
    ++not_included;
    REQUIRE(simulate(*a, r.counterexample));
    REQUIRE_FALSE(simulate(*b, r.counterexample));
    REQUIRE(r.counterexample.size() == first->size());
    REQUIRE(n.counterexample.size() == first->size());
    CHECK(r.explored <= n.explored);
  }
  CHECK(included > 10);
  CHECK(not_included > 10);
}

TEST_CASE("inclusion into itself and into the universal language") {
  std::mt19937 rng(15);
  auto all = std::make_shared<ExplicitNfa>(2);
  all->add_state(true);
  all->set_initial(0);
  all->add_transition(0, 0, 0);
  all->add_transition(0, 1, 0);
  for (int i = 0; i < 50; ++i) {
    auto a = random_nfa(rng, 5, 2, 0.3);
    CHECK(inclusion(*a, *a).included);
    CHECK(inclusion(*a, *all).included);
  }
}

TEST_CASE("symbol morphisms and quotients") {
  std::mt19937 rng(16);
  auto words3 = words_upto(3, 5), words2 = words_upto(2, 5);
  for (int i = 0; i < 60; ++i) {
    auto a = random_nfa(rng, 1 + i % 4, 2, 0.3);
    // b over three symbols; the third is read as a 0.
    std::vector<Symbol> h{0, 1, 0};
    auto pre = relabel_preimage(a, h);
    for (const auto& w : words3) {
      SymWord hw;
      for (Symbol s : w) hw.push_back(h[s]);
      REQUIRE(accepts(*pre, w) == simulate(*a, hw));
    }
    // Collapsing both symbols onto one.
    auto img = relabel_image(a, {0, 0}, 1);
    for (int n = 0; n <= 5; ++n) {
      bool some = false;
      for (const auto& w : words2) some |= static_cast<int>(w.size()) == n && simulate(*a, w);
      REQUIRE(accepts(*img, SymWord(n, 0)) == some);
    }
    for (Symbol x : {0, 1}) {
      auto q = left_quotient(a, x);
      for (const auto& w : words2) {
        SymWord xw{x};
        xw.insert(xw.end(), w.begin(), w.end());
        REQUIRE(accepts(*q, w) == simulate(*a, xw));
      }
    }
  }
  auto a = random_nfa(rng, 2, 2, 0.5);
  CHECK_THROWS_AS(relabel_image(a, {0}, 1), StructuralError);
  CHECK_THROWS_AS(relabel_preimage(a, {0, 2}), StructuralError);
  CHECK_THROWS_AS(left_quotient(a, 2), StructuralError);
}

TEST_CASE("materialize keeps the reachable part") {
  std::mt19937 rng(17);
  auto words = words_upto(2, 6);
  for (int i = 0; i < 50; ++i) {
    auto a = random_nfa(rng, 6, 2, 0.15);
    ExplicitNfa m = materialize(*a);
    CHECK(m.num_states() <= a->num_states());
    for (const auto& w : words) REQUIRE(simulate(m, w) == simulate(*a, w));
  }
}

TEST_CASE("budgets are enforced") {
  // (a|b)* a (a|b)^n needs 2^(n+1) subsets.
  const int n = 12;
  ExplicitNfa a(2);
  for (int q = 0; q <= n + 1; ++q) a.add_state(q == n + 1);
  a.set_initial(0);
  a.add_transition(0, 0, 0);
  a.add_transition(0, 1, 0);
  a.add_transition(0, 0, 1);
  for (int q = 1; q <= n; ++q) {
    a.add_transition(q, 0, q + 1);
    a.add_transition(q, 1, q + 1);
  }
  CHECK_THROWS_AS(determinize(a, 1000), ResourceError);
  CHECK(determinize(a, 1 << 16).num_states() == (1 << (n + 1)));
  try {
    determinize(a, 100);
  } catch (const ResourceError& e) {
    CHECK(e.budget() == 100);
  }
}

TEST_CASE("dot output names every state") {
  ExplicitNfa a(2);
  a.add_state(false);
  a.add_state(true);
  a.set_initial(0);
  a.add_transition(0, 1, 1);
  a.set_label(1, "done");
  a.set_symbol_names({"a", "b"});
  std::string dot = to_dot(a);
  CHECK(dot.find("digraph") != std::string::npos);
  CHECK(dot.find("done") != std::string::npos);
  CHECK(dot.find("\"b\"") != std::string::npos);
}
