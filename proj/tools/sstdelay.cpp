// Command-line front end. Results go to stdout, diagnostics to stderr.
// Exit codes: 0 success / holds, 1 fails / rejected, 2 usage or resource error.

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <iostream>
#include <numeric>
#include <sstream>
#include <set>
#include <string>

#include "sstdelay/corpus_check.hpp"
#include "sstdelay/decide.hpp"
#include "sstdelay/delay.hpp"
#include "sstdelay/errors.hpp"
#include "sstdelay/pump.hpp"
#include "sstdelay/resync.hpp"
#include "sstdelay/sst_format.hpp"

#ifndef SSTDELAY_CORPUS_DIR
#define SSTDELAY_CORPUS_DIR "corpus"
#endif

using json = nlohmann::json;
using namespace sstdelay;

namespace {

struct Global {
  bool json = false;
  std::size_t max_states = kDefaultBudget;
  std::uint64_t seed = 20240521;
};

// Letter-by-letter when every letter is one character, else split on spaces.
Word parse_word(const Alphabet& a, const std::string& text) {
  bool single = true;
  for (const auto& l : a.letters()) single &= l.size() == 1;
  Word w;
  auto add = [&](const std::string& tok) {
    auto x = a.find(tok);
    if (!x) throw DomainError("unknown letter '" + tok + "'");
    w.push_back(*x);
  };
  if (single) {
    for (char c : text)
      if (c != ' ') add(std::string(1, c));
  } else {
    std::istringstream is(text);
    for (std::string tok; is >> tok;) add(tok);
  }
  return w;
}

json stats_json(const VerdictStats& s) {
  return {{"explored", s.explored},
          {"resync_states", s.resync_states},
          {"substitutions", s.substitutions},
          {"seconds", s.seconds}};
}

json verdict_json(const Verdict& v, const Sst& first) {
  json j;
  j["outcome"] = v.holds() ? "holds" : "fails";
  j["stats"] = stats_json(v.stats);
  if (v.counterexample) {
    const auto& c = *v.counterexample;
    json run = json::array();
    for (const auto& s : c.run) run.push_back(render_substitution(s, v.vars, v.alphabet));
    json states = json::array();
    for (int q : c.states)
      states.push_back(q >= 0 && q < static_cast<int>(first.states.size()) ? json(first.states[q])
                                                                            : json(q));
    j["counterexample"] = {{"input", v.alphabet.render(c.input)},
                           {"run", run},
                           {"states", states},
                           {"direction", c.direction}};
  } else {
    j["counterexample"] = nullptr;
  }
  return j;
}

int emit_verdict(const Verdict& v, const Sst& first) {
  std::cout << verdict_json(v, first).dump(2) << "\n";
  return v.holds() ? 0 : 1;
}

// Puts two sequences over one variable set and alphabet: outputs are
// identified, other variables are matched by name.
void align(SeqFile& a, SeqFile& b) {
  if (a.vars == b.vars && a.alphabet == b.alphabet) return;
  std::vector<std::string> names = a.vars.names(), letters = a.alphabet.letters();
  std::vector<int> vmap(b.vars.size()), lmap(b.alphabet.size());
  for (int v = 0; v < b.vars.size(); ++v) {
    if (v == b.vars.output()) {
      vmap[v] = a.vars.output();
      continue;
    }
    auto it = std::find(names.begin(), names.end(), b.vars.name(v));
    if (it == names.end() || it - names.begin() == a.vars.output())
      it = names.insert(names.end(), b.vars.name(v));
    vmap[v] = static_cast<int>(it - names.begin());
  }
  for (int c = 0; c < b.alphabet.size(); ++c) {
    auto it = std::find(letters.begin(), letters.end(), b.alphabet.name(c));
    if (it == letters.end()) it = letters.insert(letters.end(), b.alphabet.name(c));
    lmap[c] = static_cast<int>(it - letters.begin());
  }
  const int nv = static_cast<int>(names.size());
  std::vector<int> avmap(a.vars.size()), almap(a.alphabet.size());
  std::iota(avmap.begin(), avmap.end(), 0);
  std::iota(almap.begin(), almap.end(), 0);
  for (auto& s : a.seq) s = remap(s, avmap, almap, nv);
  for (auto& s : b.seq) s = remap(s, vmap, lmap, nv);
  a.vars = b.vars = VarSet(names, a.vars.output());
  a.alphabet = b.alphabet = Alphabet(letters);
}

std::vector<Substitution> union_of(const std::vector<Sst>& ssts) {
  std::set<Substitution> s;
  for (const auto& t : ssts)
    for (const auto& x : substitution_set(t)) s.insert(x);
  return {s.begin(), s.end()};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Delay resynchronizers for streaming string transducers"};
  app.require_subcommand(1);
  Global g;
  app.add_flag("--json", g.json, "Machine-readable output")->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.add_option("--max-states", g.max_states, "State budget for automata and searches");
  app.add_option("--seed", g.seed, "Seed for randomized sweeps");
  app.fallthrough();

  std::function<int()> action;

  // eval
  std::string sst_path, input;
  auto* eval = app.add_subcommand("eval", "Outputs of an SST on one input");
  eval->add_option("sst", sst_path, "SST file")->required()->check(CLI::ExistingFile);
  eval->add_option("--input", input, "Input word")->required();
  eval->callback([&] {
    action = [&] {
      Sst t = load_sst(sst_path);
      Word u = parse_word(t.alphabet, input);
      std::set<Word> outs;
      for (const auto& r : enumerate_runs(t, u)) outs.insert(out_word(r.seq, t.vars.output(), t.vars.size()));
      if (g.json) {
        json a = json::array();
        for (const auto& w : outs) a.push_back(t.alphabet.render(w));
        std::cout << json{{"input", t.alphabet.render(u)}, {"outputs", a}}.dump(2) << "\n";
      } else {
        for (const auto& w : outs) std::cout << t.alphabet.render(w) << "\n";
      }
      if (outs.empty()) std::cerr << "no accepting run\n";
      return outs.empty() ? 1 : 0;
    };
  });

  // runs
  auto* runs = app.add_subcommand("runs", "Accepting runs of an SST on one input");
  runs->add_option("sst", sst_path, "SST file")->required()->check(CLI::ExistingFile);
  runs->add_option("--input", input, "Input word")->required();
  runs->callback([&] {
    action = [&] {
      Sst t = load_sst(sst_path);
      Word u = parse_word(t.alphabet, input);
      auto rs = enumerate_runs(t, u);
      json a = json::array();
      for (const auto& r : rs) {
        json states = json::array(), seq = json::array();
        for (int q : r.states) states.push_back(t.states[q]);
        for (const auto& s : r.seq) seq.push_back(format_substitution(s, t.vars, t.alphabet));
        a.push_back({{"states", states},
                     {"updates", seq},
                     {"output", t.alphabet.render(out_word(r.seq, t.vars.output(), t.vars.size()))}});
      }
      if (g.json) {
        std::cout << a.dump(2) << "\n";
      } else {
        for (const auto& r : a) {
          std::string st;
          for (const auto& s : r["states"]) st += (st.empty() ? "" : " ") + s.get<std::string>();
          std::cout << st << "  ->  " << r["output"].get<std::string>() << "\n";
          for (const auto& s : r["updates"]) std::cout << "  " << s.get<std::string>() << "\n";
        }
      }
      return rs.empty() ? 1 : 0;
    };
  });

  // delay
  std::string seq1, seq2, measure = "ell";
  int ell = 1, k = 0;
  auto* delay = app.add_subcommand("delay", "Delay between two substitution sequences");
  delay->add_option("--seq1", seq1, "First sequence file")->required()->check(CLI::ExistingFile);
  delay->add_option("--seq2", seq2, "Second sequence file")->required()->check(CLI::ExistingFile);
  delay->add_option("--ell", ell, "Period bound")->check(CLI::PositiveNumber);
  delay->add_option("--measure", measure, "ell | positional | symmetric | size")
      ->check(CLI::IsMember({"ell", "positional", "symmetric", "size"}));
  delay->callback([&] {
    action = [&] {
      auto a = load_seq(seq1), b = load_seq(seq2);
      align(a, b);
      int out = a.vars.output(), d;
      if (measure == "ell")
        d = delay_ell(a.seq, b.seq, out, ell);
      else
        d = delay_legacy(a.seq, b.seq, out,
                         measure == "positional" ? LegacyKind::kPositional
                         : measure == "symmetric" ? LegacyKind::kSymmetric
                                                  : LegacyKind::kSize);
      if (g.json)
        std::cout << json{{"measure", measure}, {"ell", ell}, {"delay", d}}.dump(2) << "\n";
      else
        std::cout << d << "\n";
      return 0;
    };
  });

  // factorize
  std::string word, letters;
  auto* fact = app.add_subcommand("factorize", "Greedy factorization into periodic factors");
  fact->add_option("--word", word, "Word to factorize")->required();
  fact->add_option("--ell", ell, "Period bound")->check(CLI::PositiveNumber);
  fact->add_option("--alphabet", letters, "Letters, comma separated (default: those of the word)");
  fact->callback([&] {
    action = [&] {
      std::vector<std::string> ls;
      if (letters.empty()) {
        std::set<char> cs(word.begin(), word.end());
        for (char c : cs) ls.emplace_back(1, c);
      } else {
        std::stringstream ss(letters);
        for (std::string x; std::getline(ss, x, ',');) ls.push_back(x);
      }
      Alphabet a(ls);
      auto f = factorize(parse_word(a, word), ell);
      std::vector<std::string> parts;
      for (const auto& w : f.factors) parts.push_back(a.render(w));
      if (g.json) {
        std::cout << json{{"factors", parts}, {"cuts", f.cuts}}.dump(2) << "\n";
      } else {
        std::string s, c;
        for (const auto& p : parts) s += (s.empty() ? "" : "|") + p;
        for (int x : f.cuts) c += (c.empty() ? "" : " ") + std::to_string(x);
        std::cout << s << "\ncuts: " << c << "\n";
      }
      return 0;
    };
  });

  // resync
  std::vector<std::string> ssts;
  std::string emit;
  auto* resync = app.add_subcommand("resync", "Deterministic resynchronizer over the SSTs' substitutions");
  resync->add_option("sst", ssts, "SST files")->required()->check(CLI::ExistingFile);
  resync->add_option("--k", k, "Delay bound")->check(CLI::NonNegativeNumber);
  resync->add_option("--ell", ell, "Period bound")->check(CLI::PositiveNumber);
  resync->add_option("--emit", emit, "dot")->check(CLI::IsMember({"dot"}));
  resync->callback([&] {
    action = [&] {
      std::vector<Sst> ts;
      for (const auto& p : ssts) ts.push_back(load_sst(p));
      auto u = unify(ts);
      ResyncParams p;
      p.k = k;
      p.ell = ell;
      p.s = union_of(u);
      p.out_var = u[0].vars.output();
      p.nletters = u[0].alphabet.size();
      auto d = build_resync(p, g.max_states);
      Dfa dfa = d->explore(g.max_states);
      if (emit == "dot") {
        std::cout << to_dot(dfa, g.max_states);
        return 0;
      }
      auto st = d->stats();
      json j{{"substitutions", p.s.size()},
             {"states", dfa.num_states()},
             {"side_configurations", st.side_configs},
             {"checker_states", st.checker_states},
             {"subsets", st.subsets}};
      json subs = json::array();
      for (const auto& s : p.s) subs.push_back(render_substitution(s, u[0].vars, u[0].alphabet));
      j["alphabet"] = subs;
      if (g.json) {
        std::cout << j.dump(2) << "\n";
      } else {
        std::cout << "states " << dfa.num_states() << ", |S| " << p.s.size() << "\n";
        for (std::size_t i = 0; i < p.s.size(); ++i) std::cout << "  s" << i << ": " << subs[i].get<std::string>() << "\n";
      }
      return 0;
    };
  });

  // include / equiv
  std::string a_path, b_path;
  auto decide_opts = [&] {
    DecideOptions o;
    o.budget = g.max_states;
    return o;
  };
  auto* inc = app.add_subcommand("include", "(k,ell)-inclusion of the first SST in the second");
  inc->add_option("first", a_path, "SST file")->required()->check(CLI::ExistingFile);
  inc->add_option("second", b_path, "SST file")->required()->check(CLI::ExistingFile);
  inc->add_option("--k", k, "Delay bound")->check(CLI::NonNegativeNumber);
  inc->add_option("--ell", ell, "Period bound")->check(CLI::PositiveNumber);
  inc->callback([&] {
    action = [&] {
      Sst a = load_sst(a_path), b = load_sst(b_path);
      return emit_verdict(check_inclusion(a, b, k, ell, decide_opts()), a);
    };
  });
  auto* eq = app.add_subcommand("equiv", "(k,ell)-equivalence of two SSTs");
  eq->add_option("first", a_path, "SST file")->required()->check(CLI::ExistingFile);
  eq->add_option("second", b_path, "SST file")->required()->check(CLI::ExistingFile);
  eq->add_option("--k", k, "Delay bound")->check(CLI::NonNegativeNumber);
  eq->add_option("--ell", ell, "Period bound")->check(CLI::PositiveNumber);
  eq->callback([&] {
    action = [&] {
      Sst a = load_sst(a_path), b = load_sst(b_path);
      return emit_verdict(check_equivalence(a, b, k, ell, decide_opts()), a);
    };
  });

  // minvars
  int m = 1, max_r = -1;
  bool det = false;
  auto* mv = app.add_subcommand("minvars", "Is the SST (k,ell)-equivalent to one with m variables?");
  mv->add_option("sst", sst_path, "SST file")->required()->check(CLI::ExistingFile);
  mv->add_option("--k", k, "Delay bound")->check(CLI::NonNegativeNumber);
  mv->add_option("--ell", ell, "Period bound")->check(CLI::PositiveNumber);
  mv->add_option("--m", m, "Variable count")->check(CLI::NonNegativeNumber);
  mv->add_option("--max-r", max_r, "Cap on letters per candidate step (default: 2k + p)");
  mv->add_flag("--det", det, "Letter-by-letter game instead of the nondeterministic check");
  mv->callback([&] {
    action = [&] {
      Sst t = load_sst(sst_path);
      auto o = decide_opts();
      o.max_r = max_r >= 0 ? max_r : candidate_letter_bound(t, k);
      o.max_m = std::max(o.max_m, m);
      return emit_verdict(det ? varmin_det(t, k, ell, m, o) : varmin_nondet(t, k, ell, m, o), t);
    };
  });

  // pump
  int c = 2;
  auto* pump = app.add_subcommand("pump", "Pump witnesses for two sequences with equal output");
  pump->add_option("--seq1", seq1, "First sequence file")->required()->check(CLI::ExistingFile);
  pump->add_option("--seq2", seq2, "Second sequence file")->required()->check(CLI::ExistingFile);
  pump->add_option("--C", c, "Number of witness times")->check(CLI::Range(2, 16));
  pump->add_option("--k", k, "Delay bound")->check(CLI::NonNegativeNumber);
  pump->add_option("--ell", ell, "Period bound")->check(CLI::PositiveNumber);
  pump->callback([&] {
    action = [&] {
      auto a = load_seq(seq1), b = load_seq(seq2);
      align(a, b);
      int out = a.vars.output(), nv = a.vars.size();
      auto w = find_pump_witnesses(a.seq, b.seq, c, k, ell, out);
      json j{{"pairs_checked", w.pairs_checked}};
      if (!w.times) {
        j["times"] = nullptr;
        std::cout << (g.json ? j.dump(2) : std::string("no witness times")) << "\n";
        return 1;
      }
      j["times"] = *w.times;
      json pumps = json::array();
      const auto& ts = *w.times;
      for (std::size_t i = 0; i < ts.size(); ++i)
        for (std::size_t x = i + 1; x < ts.size(); ++x) {
          Word u1 = out_word(pump_interval(a.seq, {ts[i], ts[x]}), out, nv);
          Word u2 = out_word(pump_interval(b.seq, {ts[i], ts[x]}), out, nv);
          std::size_t p = 0;
          while (p < u1.size() && p < u2.size() && u1[p] == u2[p]) ++p;
          pumps.push_back({{"interval", {ts[i], ts[x]}},
                           {"output1", a.alphabet.render(u1)},
                           {"output2", a.alphabet.render(u2)},
                           {"first_mismatch", p + 1}});
        }
      j["pumped"] = pumps;
      if (g.json) {
        std::cout << j.dump(2) << "\n";
      } else {
        std::string s;
        for (int t : ts) s += (s.empty() ? "" : " ") + std::to_string(t);
        std::cout << "times " << s << "\n";
        for (const auto& p : pumps)
          std::cout << "[" << p["interval"][0] << "," << p["interval"][1] << "): "
                    << p["output1"].get<std::string>() << " vs " << p["output2"].get<std::string>()
                    << ", first mismatch at " << p["first_mismatch"] << "\n";
      }
      return 0;
    };
  });

  // corpus-check
  bool quick = false;
  std::string corpus = SSTDELAY_CORPUS_DIR, inject;
  std::vector<int> criteria;
  std::size_t check_budget = 300000;
  auto* cc = app.add_subcommand("corpus-check", "Pinned facts and oracle sweeps over the corpus");
  cc->add_flag("--quick", quick, "Reduced sweep sizes");
  cc->add_option("--corpus", corpus, "Corpus directory")->check(CLI::ExistingDirectory);
  cc->add_option("--criteria", criteria, "Only these criteria (1-7)")->delimiter(',')->check(CLI::Range(1, 7));
  cc->add_option("--inject", inject, "Fault to inject: max-diff")->check(CLI::IsMember({"max-diff"}));
  cc->add_option("--budget", check_budget, "State budget per decision call");
  cc->callback([&] {
    action = [&] {
      if (inject == "max-diff") set_max_diff_fault(1);
      CheckOptions o;
      o.corpus = corpus;
      o.quick = quick;
      o.seed = g.seed;
      o.max_states = check_budget;
      o.criteria = criteria;
      if (!g.json)
        o.on_item = [](const CheckItem& it) {
          std::cout << "[" << it.criterion << "] " << status_name(it.status) << "  " << it.name
                    << "  (" << it.detail << ", " << it.seconds << " s)" << std::endl;
        };
      auto items = run_checks(o);
      int failed = 0, resource = 0;
      json a = json::array();
      for (const auto& it : items) {
        failed += it.status == CheckStatus::kFail;
        resource += it.status == CheckStatus::kResource;
        a.push_back({{"criterion", it.criterion},
                     {"name", it.name},
                     {"status", status_name(it.status)},
                     {"detail", it.detail},
                     {"seconds", it.seconds}});
      }
      if (g.json)
        std::cout << json{{"checks", a}, {"failed", failed}, {"resource", resource}}.dump(2) << "\n";
      for (const auto& it : items)
        if (it.status == CheckStatus::kFail) std::cerr << "FAILED: " << it.name << ": " << it.detail << "\n";
      return failed ? 1 : 0;
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  auto fail = [&](const char* kind, const std::exception& e, int code) {
    std::cerr << kind << ": " << e.what() << "\n";
    if (g.json) std::cout << json{{"error", kind}, {"message", e.what()}}.dump(2) << "\n";
    return code;
  };
  try {
    return action ? action() : 2;
  } catch (const ResourceError& e) {
    return fail("resource", e, 2);
  } catch (const PreconditionError& e) {
    return fail("rejected", e, 1);
  } catch (const std::exception& e) {
    return fail("error", e, 2);
  }
}
