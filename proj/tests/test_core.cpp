#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>

#include "sstdelay/errors.hpp"
#include "support.hpp"

using namespace sstdelay;
using namespace testing;

namespace {

const Alphabet kAb({"a", "b", "c"});
const VarSet kX({"X"}, 0);

Substitution sub(const std::string& text, const VarSet& vars = kX, const Alphabet& a = kAb) {
  return parse_substitution(text, a, vars);
}

std::set<Word> outputs(const Sst& t, const Word& u) {
  std::set<Word> r;
  for (const auto& run : enumerate_runs(t, u)) r.insert(out_word(run.seq, t.vars.output(), t.vars.size()));
  return r;
}

}  // namespace

TEST_CASE("composition applies its second argument first") {
  auto s = compose(sub("X ="), compose(sub("X = a X"), sub("X = b X c")));
  Word w;
  for (int tok : s.images[0]) {
    REQUIRE_FALSE(is_var(tok));
    w.push_back(token_letter(tok));
  }
  CHECK(kAb.render(w) == "bac");
}

TEST_CASE("composition with the identity") {
  std::mt19937 rng(1);
  for (int i = 0; i < 200; ++i) {
    auto s = random_substitution(rng, 3, 2);
    CHECK(compose(Substitution::identity(3), s) == s);
    CHECK(compose(s, Substitution::identity(3)) == s);
  }
}

TEST_CASE("composition is associative and keeps copylessness") {
  std::mt19937 rng(2);
  for (int i = 0; i < 1000; ++i) {
    auto a = random_substitution(rng, 3, 2), b = random_substitution(rng, 3, 2),
         c = random_substitution(rng, 3, 2);
    auto left = compose(compose(a, b), c), right = compose(a, compose(b, c));
    REQUIRE(left == right);
    REQUIRE_FALSE(validate_copyless(left).has_value());
  }
}

TEST_CASE("copyless validation") {
  VarSet xy({"X", "Y"}, 0);
  CHECK_FALSE(validate_copyless(sub("X = X Y ; Y =", xy)).has_value());

  Substitution twice({{0, 0}});
  auto v = validate_copyless(twice);
  REQUIRE(v.has_value());
  CHECK(v->var == 0);
  CHECK(v->position == 1);

  Substitution y_twice({{letter_token(0), 1}, {1, letter_token(1)}});
  v = validate_copyless(y_twice);
  REQUIRE(v.has_value());
  CHECK(v->var == 1);
  CHECK(v->image == 1);
}

TEST_CASE("output of a sequence") {
  CHECK(out_word({}, 0, 1).empty());
  std::mt19937 rng(3);
  for (int i = 0; i < 500; ++i) {
    std::vector<Substitution> s;
    for (int j = 0; j < 3; ++j) s.push_back(random_substitution(rng, 2, 2));
    auto l = random_seq(rng, s, 1 + i % 6);
    REQUIRE(out_word(l, 0, 2) == out_word_by_composition(l, 0, 2));
  }
}

TEST_CASE("sorting transducers") {
  Sst t1 = corpus_sst("t1"), t2 = corpus_sst("t2");
  CHECK(outputs(t1, word(t1.alphabet, "aaaa")) == std::set<Word>{word(t1.alphabet, "aaaa")});
  auto runs = enumerate_runs(t1, word(t1.alphabet, "abab"));
  REQUIRE(runs.size() == 1);
  CHECK(t1.alphabet.render(out_word(runs[0].seq, 0, 1)) == "aabb");
  CHECK(runs[0].seq.size() == 5);
  CHECK(runs[0].states.size() == 5);

  for (const auto& u : all_words(2, 6)) {
    Word sorted = u;
    std::sort(sorted.begin(), sorted.end());
    REQUIRE(outputs(t1, u) == std::set<Word>{sorted});
  }
  CHECK(relation(t1, 6) == relation(t2, 6));
}

TEST_CASE("nondeterministic split of a block") {
  Sst t3 = corpus_sst("t3");
  // The bridge letter can sit at any of the seven positions.
  CHECK(enumerate_runs(t3, word(t3.alphabet, "aaaaaaa")).size() == 7);
  CHECK(enumerate_runs(t3, word(t3.alphabet, "b")).empty());

  auto lang = sst_language(t3, 2);
  std::set<Word> inputs;
  for (const auto& it : lang) inputs.insert(it.input);
  CHECK(inputs == std::set<Word>{word(t3.alphabet, "a"), word(t3.alphabet, "aa")});
  CHECK(sst_language(t3, 7).size() == 28);

  std::set<std::pair<Word, Word>> expected;
  for (auto [u, w] : std::vector<std::pair<std::string, std::string>>{
           {"a", "b"}, {"aa", "ab"}, {"aa", "ba"}, {"aaa", "aab"}, {"aaa", "aba"}, {"aaa", "baa"}})
    expected.insert({word(t3.alphabet, u), word(t3.alphabet, w)});
  CHECK(relation(t3, 3) == expected);
}

TEST_CASE("language of the empty input") {
  Sst t1 = corpus_sst("t1");
  auto lang = sst_language(t1, 0);
  REQUIRE(lang.size() == 1);
  CHECK(lang[0].input.empty());
  CHECK(lang[0].seq.size() == 1);
}

TEST_CASE("transducer without final states") {
  Sst t = parse_sst(
      "sst dead\nalphabet a\nvars X\noutput X\nstates q\ninitial q\n"
      "trans q a q : X = X a\n");
  CHECK(relation(t, 4).empty());
}

TEST_CASE("parse errors carry the line") {
  const char* missing = "sst t\nalphabet a\nvars X Y\noutput X\nstates q\ninitial q\ntrans q a q : X = X a\n";
  try {
    parse_sst(missing);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 7);
  }
  CHECK_THROWS(parse_sst("sst t\nalphabet a\nvars X\noutput X\nstates q\ninitial q\ntrans q a q : X = X X\n"));
  CHECK_THROWS(parse_sst("sst t\nalphabet a\nvars X\noutput X\nstates q\ninitial r\n"));
}

TEST_CASE("corpus round-trips through the text format") {
  int seen = 0;
  for (const auto& e : std::filesystem::directory_iterator(SSTDELAY_CORPUS_DIR)) {
    if (e.path().extension() != ".sst") continue;
    ++seen;
    CAPTURE(e.path().string());
    Sst a = load_sst(e.path());
    std::string text = serialize_sst(a);
    Sst b = parse_sst(text);
    CHECK(b.name == a.name);
    CHECK(b.alphabet == a.alphabet);
    CHECK(b.vars == a.vars);
    CHECK(b.states == a.states);
    CHECK(b.initial == a.initial);
    CHECK(b.final_states == a.final_states);
    CHECK(b.final_output == a.final_output);
    REQUIRE(b.transitions.size() == a.transitions.size());
    for (std::size_t i = 0; i < a.transitions.size(); ++i) {
      CHECK(b.transitions[i].from == a.transitions[i].from);
      CHECK(b.transitions[i].letter == a.transitions[i].letter);
      CHECK(b.transitions[i].to == a.transitions[i].to);
      CHECK(b.transitions[i].update == a.transitions[i].update);
    }
    CHECK(serialize_sst(b) == text);
  }
  CHECK(seen >= 15);
}

TEST_CASE("sequence files round-trip") {
  for (const auto& e : std::filesystem::directory_iterator(SSTDELAY_CORPUS_DIR)) {
    if (e.path().extension() != ".seq") continue;
    CAPTURE(e.path().string());
    SeqFile a = load_seq(e.path());
    SeqFile b = parse_seq(serialize_seq(a), [](const std::string& name) -> std::optional<Sst> {
      return corpus_sst(name);
    });
    CHECK(b.vars == a.vars);
    CHECK(b.alphabet == a.alphabet);
    CHECK(b.seq == a.seq);
  }
}

TEST_CASE("unification identifies the outputs") {
  auto u = unify({corpus_sst("t3"), corpus_sst("t4")});
  REQUIRE(u.size() == 2);
  CHECK(u[0].vars == u[1].vars);
  CHECK(u[0].alphabet == u[1].alphabet);
  CHECK(u[0].vars.output() == 0);
  for (const auto& t : u)
    for (int n = 1; n <= 5; ++n) {
      Word in(n, 0);
      std::set<Word> before, after = outputs(t, in);
      before = outputs(t.name == u[0].name ? corpus_sst("t3") : corpus_sst("t4"), in);
      CHECK(before == after);
    }
}
