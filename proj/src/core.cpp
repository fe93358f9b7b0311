#include "sstdelay/core.hpp"

#include <algorithm>
#include <functional>

#include "sstdelay/errors.hpp"

namespace sstdelay {

Alphabet::Alphabet(std::vector<std::string> letters)
    : letters_(std::move(letters)) {
  std::set<std::string> seen;
  for (const auto& l : letters_) {
    if (l.empty()) throw StructuralError("empty letter name");
    if (!seen.insert(l).second) throw StructuralError("duplicate letter " + l);
  }
}

std::string Alphabet::name(int c) const {
  if (c >= 0 && c < size()) return letters_[c];
  if (c == endmarker()) return "⊣";
  if (c == padding()) return "#";
  return "?" + std::to_string(c);
}

std::optional<int> Alphabet::find(std::string_view n) const {
  for (int i = 0; i < size(); ++i)
    if (letters_[i] == n) return i;
  return std::nullopt;
}

std::string Alphabet::render(const Word& w) const {
  // Single-character letters are juxtaposed, longer ones space-separated.
  bool compact = std::all_of(letters_.begin(), letters_.end(),
                             [](const std::string& l) { return l.size() == 1; });
  std::string out;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (!compact && i > 0) out += ' ';
    out += name(w[i]);
  }
  return out;
}

VarSet::VarSet(std::vector<std::string> names, int output)
    : names_(std::move(names)), output_(output) {
  if (output_ < 0 || output_ >= size())
    throw StructuralError("output variable outside the variable set");
  std::set<std::string> seen;
  for (const auto& n : names_)
    if (!seen.insert(n).second) throw StructuralError("duplicate variable " + n);
}

std::optional<int> VarSet::find(std::string_view n) const {
  for (int i = 0; i < size(); ++i)
    if (names_[i] == n) return i;
  return std::nullopt;
}

Substitution Substitution::identity(int nvars) {
  std::vector<std::vector<int>> imgs(nvars);
  for (int v = 0; v < nvars; ++v) imgs[v] = {v};
  return Substitution(std::move(imgs));
}

Substitution Substitution::empty(int nvars) {
  return Substitution(std::vector<std::vector<int>>(nvars));
}

int Substitution::letter_count() const {
  int n = 0;
  for (const auto& img : images)
    for (int tok : img)
      if (!is_var(tok)) ++n;
  return n;
}

std::size_t SubstitutionHash::operator()(const Substitution& s) const {
  std::size_t h = 0x9e3779b97f4a7c15ULL;
  for (const auto& img : s.images) {
    h ^= img.size() + 0x51ed27 + (h << 6) + (h >> 2);
    for (int tok : img)
      h ^= std::hash<int>()(tok) + 0x9e3779b9 + (h << 6) + (h >> 2);
  }
  return h;
}

std::optional<CopylessViolation> validate_copyless(const Substitution& s) {
  std::vector<char> seen(s.num_vars(), 0);
  for (int x = 0; x < s.num_vars(); ++x) {
    const auto& img = s.images[x];
    for (int p = 0; p < static_cast<int>(img.size()); ++p) {
      int tok = img[p];
      if (!is_var(tok)) continue;
      if (tok >= s.num_vars())
        throw StructuralError("variable index out of range in substitution");
      if (seen[tok]) return CopylessViolation{tok, x, p};
      seen[tok] = 1;
    }
  }
  return std::nullopt;
}

Substitution compose(const Substitution& s1, const Substitution& s2) {
  if (s1.num_vars() != s2.num_vars())
    throw StructuralError("compose: substitutions over different variable sets");
  Substitution r;
  r.images.resize(s2.num_vars());
  for (int x = 0; x < s2.num_vars(); ++x) {
    auto& out = r.images[x];
    for (int tok : s2.images[x]) {
      if (is_var(tok)) {
        const auto& sub = s1.images[tok];
        out.insert(out.end(), sub.begin(), sub.end());
      } else {
        out.push_back(tok);
      }
    }
  }
  return r;
}

std::vector<Word> step_contents(const std::vector<Word>& cur,
                                const Substitution& s) {
  if (static_cast<int>(cur.size()) != s.num_vars())
    throw StructuralError("substitution over a different variable set");
  std::vector<Word> next(cur.size());
  for (int x = 0; x < s.num_vars(); ++x) {
    auto& w = next[x];
    for (int tok : s.images[x]) {
      if (is_var(tok))
        w.insert(w.end(), cur[tok].begin(), cur[tok].end());
      else
        w.push_back(token_letter(tok));
    }
  }
  return next;
}

std::vector<Word> contents(const SubstSeq& seq, int nvars) {
  std::vector<Word> cur(nvars);
  for (const auto& s : seq) cur = step_contents(cur, s);
  return cur;
}

Word out_word(const SubstSeq& seq, int out_var, int nvars) {
  return contents(seq, nvars).at(out_var);
}

Word out_word_by_composition(const SubstSeq& seq, int out_var, int nvars) {
  Substitution acc = Substitution::empty(nvars);
  for (const auto& s : seq) acc = compose(acc, s);
  Word w;
  for (int tok : acc.images.at(out_var)) {
    // σ_ε was composed first, so no variable survives.
    if (!is_var(tok)) w.push_back(token_letter(tok));
  }
  return w;
}

std::string render_substitution(const Substitution& s, const VarSet& vars,
                                 const Alphabet& alpha) {
  std::string out;
  for (int x = 0; x < s.num_vars(); ++x) {
    if (x > 0) out += " ; ";
    out += vars.name(x) + " =";
    for (int tok : s.images[x]) {
      out += ' ';
      out += is_var(tok) ? vars.name(tok) : alpha.name(token_letter(tok));
    }
  }
  return out;
}

void Sst::validate() const {
  const int nq = static_cast<int>(states.size());
  auto check = [&](const Substitution& s, const std::string& where) {
    if (s.num_vars() != vars.size())
      throw StructuralError(where + ": update does not assign every variable");
    for (const auto& img : s.images)
      for (int tok : img) {
        if (is_var(tok) && tok >= vars.size())
          throw StructuralError(where + ": unknown variable");
        if (!is_var(tok) && (token_letter(tok) < 0 ||
                             token_letter(tok) >= alphabet.total()))
          throw StructuralError(where + ": unknown letter");
      }
    if (auto v = validate_copyless(s))
      throw StructuralError(where + ": variable " + vars.name(v->var) +
                            " occurs twice");
  };
  for (int q : initial)
    if (q < 0 || q >= nq) throw StructuralError("initial state out of range");
  for (int q : final_states)
    if (!is_final(q)) throw StructuralError("final state without output");
  for (const auto& [q, s] : final_output) {
    if (q < 0 || q >= nq) throw StructuralError("final state out of range");
    check(s, "finalout " + states[q]);
  }
  for (const auto& tr : transitions) {
    if (tr.from < 0 || tr.from >= nq || tr.to < 0 || tr.to >= nq)
      throw StructuralError("transition state out of range");
    if (tr.letter < 0 || tr.letter >= alphabet.size())
      throw StructuralError("transition letter outside the alphabet");
    check(tr.update, "trans " + states[tr.from]);
  }
}

std::optional<int> Sst::find_state(std::string_view n) const {
  for (int i = 0; i < static_cast<int>(states.size()); ++i)
    if (states[i] == n) return i;
  return std::nullopt;
}

std::vector<Run> enumerate_runs(const Sst& t, const Word& u) {
  std::vector<Run> runs;
  std::vector<int> path;
  SubstSeq seq;
  std::function<void(int, std::size_t)> go = [&](int q, std::size_t pos) {
    if (pos == u.size()) {
      auto it = t.final_output.find(q);
      if (it == t.final_output.end()) return;
      Run r{path, u, seq};
      r.seq.push_back(it->second);
      runs.push_back(std::move(r));
      return;
    }
    for (const auto& tr : t.transitions) {
      if (tr.from != q || tr.letter != u[pos]) continue;
      path.push_back(tr.to);
      seq.push_back(tr.update);
      go(tr.to, pos + 1);
      seq.pop_back();
      path.pop_back();
    }
  };
  for (int q0 : t.initial) {
    path.assign(1, q0);
    go(q0, 0);
  }
  return runs;
}

std::vector<Word> all_words(int nletters, int max_len) {
  std::vector<Word> out{Word{}};
  std::size_t begin = 0;
  for (int len = 1; len <= max_len; ++len) {
    std::size_t end = out.size();
    for (std::size_t i = begin; i < end; ++i)
      for (int c = 0; c < nletters; ++c) {
        Word w = out[i];
        w.push_back(c);
        out.push_back(std::move(w));
      }
    begin = end;
  }
  return out;
}

std::vector<LanguageItem> sst_language(const Sst& t, int max_len) {
  std::set<LanguageItem> items;
  for (const auto& u : all_words(t.alphabet.size(), max_len))
    for (auto& r : enumerate_runs(t, u))
      items.insert(LanguageItem{u, std::move(r.seq)});
  return {items.begin(), items.end()};
}

std::set<std::pair<Word, Word>> relation(const Sst& t, int max_len) {
  std::set<std::pair<Word, Word>> rel;
  for (const auto& u : all_words(t.alphabet.size(), max_len))
    for (const auto& r : enumerate_runs(t, u))
      rel.emplace(u, out_word(r.seq, t.vars.output(), t.vars.size()));
  return rel;
}

std::vector<Substitution> substitution_set(const Sst& t) {
  std::set<Substitution> s;
  for (const auto& tr : t.transitions) s.insert(tr.update);
  for (const auto& [q, f] : t.final_output) s.insert(f);
  return {s.begin(), s.end()};
}

Substitution remap(const Substitution& s, const std::vector<int>& var_map,
                   const std::vector<int>& letter_map, int target_nvars) {
  Substitution r = Substitution::identity(target_nvars);
  for (int x = 0; x < s.num_vars(); ++x) {
    std::vector<int> img;
    img.reserve(s.images[x].size());
    for (int tok : s.images[x]) {
      if (is_var(tok))
        img.push_back(var_map.at(tok));
      else
        img.push_back(letter_token(letter_map.at(token_letter(tok))));
    }
    r.images.at(var_map.at(x)) = std::move(img);
  }
  return r;
}

std::vector<Sst> unify(const std::vector<Sst>& ssts) {
  if (ssts.empty()) return {};
  std::vector<std::string> letters;
  for (const auto& t : ssts)
    for (const auto& l : t.alphabet.letters())
      if (std::find(letters.begin(), letters.end(), l) == letters.end())
        letters.push_back(l);
  Alphabet alpha(letters);

  const std::string& out_name = ssts[0].vars.name(ssts[0].vars.output());
  std::vector<std::string> names{out_name};
  std::vector<std::vector<int>> var_maps;
  for (const auto& t : ssts) {
    std::vector<int> m(t.vars.size());
    for (int x = 0; x < t.vars.size(); ++x) {
      if (x == t.vars.output()) {
        m[x] = 0;
        continue;
      }
      std::string n = t.vars.name(x);
      // A non-output variable may not share the common output's name.
      while (n == out_name) n += "'";
      auto it = std::find(names.begin(), names.end(), n);
      if (it == names.end()) {
        m[x] = static_cast<int>(names.size());
        names.push_back(n);
      } else {
        m[x] = static_cast<int>(it - names.begin());
      }
    }
    var_maps.push_back(std::move(m));
  }
  VarSet vars(names, 0);

  std::vector<Sst> out;
  for (std::size_t i = 0; i < ssts.size(); ++i) {
    const Sst& t = ssts[i];
    std::vector<int> lmap(t.alphabet.total());
    for (int c = 0; c < t.alphabet.size(); ++c)
      lmap[c] = *alpha.find(t.alphabet.letters()[c]);
    lmap[t.alphabet.endmarker()] = alpha.endmarker();
    lmap[t.alphabet.padding()] = alpha.padding();
    auto conv = [&](const Substitution& s) {
      return remap(s, var_maps[i], lmap, vars.size());
    };
    Sst u;
    u.name = t.name;
    u.alphabet = alpha;
    u.vars = vars;
    u.states = t.states;
    u.initial = t.initial;
    u.final_states = t.final_states;
    for (const auto& tr : t.transitions)
      u.transitions.push_back({tr.from, lmap[tr.letter], tr.to, conv(tr.update)});
    for (const auto& [q, f] : t.final_output) u.final_output[q] = conv(f);
    out.push_back(std::move(u));
  }
  return out;
}

}  // namespace sstdelay
