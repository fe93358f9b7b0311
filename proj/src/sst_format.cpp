#include "sstdelay/sst_format.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "sstdelay/errors.hpp"

namespace sstdelay {

namespace {

std::vector<std::string> split_ws(std::string_view s) {
  std::vector<std::string> out;
  std::istringstream in{std::string(s)};
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

// A comment starts at a '#' that begins a token.
std::string_view strip_comment(std::string_view line) {
  for (std::size_t p = 0; p < line.size(); ++p)
    if (line[p] == '#' && (p == 0 || line[p - 1] == ' ' || line[p - 1] == '\t'))
      return line.substr(0, p);
  return line;
}

struct Lines {
  std::vector<std::pair<int, std::string>> items;  // (line number, content)
};

Lines lines_of(std::string_view text) {
  Lines ls;
  int n = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto nl = text.find('\n', pos);
    auto raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos
                                                             : nl - pos);
    ++n;
    auto body = strip_comment(raw);
    if (!split_ws(body).empty()) ls.items.emplace_back(n, std::string(body));
    if (nl == std::string_view::npos) break;
    pos = nl + 1;
  }
  return ls;
}

int state_index(const std::vector<std::string>& states, const std::string& n,
                int line) {
  for (int i = 0; i < static_cast<int>(states.size()); ++i)
    if (states[i] == n) return i;
  throw ParseError(line, "unknown state " + n);
}

void check_names(const Alphabet& alpha, const VarSet& vars, int line) {
  for (const auto& v : vars.names())
    if (alpha.find(v)) throw ParseError(line, "name " + v + " is both a letter and a variable");
  for (const auto& l : alpha.letters())
    if (l == "=" || l == ";" || l == ":" || l == "⊣")
      throw ParseError(line, "reserved letter name " + l);
}

}  // namespace

Substitution parse_substitution(std::string_view text, const Alphabet& alpha,
                                const VarSet& vars, int line) {
  Substitution s = Substitution::empty(vars.size());
  std::vector<char> assigned(vars.size(), 0);
  std::string body(text);
  std::size_t pos = 0;
  while (true) {
    auto semi = body.find(';', pos);
    std::string part = body.substr(pos, semi == std::string::npos ? std::string::npos
                                                                   : semi - pos);
    auto eq = part.find('=');
    if (eq == std::string::npos) {
      if (split_ws(part).empty() && semi == std::string::npos && pos > 0) break;
      throw ParseError(line, "expected 'VAR = ...' in '" + part + "'");
    }
    auto lhs = split_ws(part.substr(0, eq));
    if (lhs.size() != 1) throw ParseError(line, "malformed left-hand side");
    auto v = vars.find(lhs[0]);
    if (!v) throw ParseError(line, "unknown variable " + lhs[0]);
    if (assigned[*v]) throw ParseError(line, "variable " + lhs[0] + " assigned twice");
    assigned[*v] = 1;
    for (const auto& tok : split_ws(part.substr(eq + 1))) {
      if (auto x = vars.find(tok)) {
        s.images[*v].push_back(*x);
      } else if (auto c = alpha.find(tok)) {
        s.images[*v].push_back(letter_token(*c));
      } else if (tok == "⊣") {
        s.images[*v].push_back(letter_token(alpha.endmarker()));
      } else {
        throw ParseError(line, "unknown symbol " + tok);
      }
    }
    if (semi == std::string::npos) break;
    pos = semi + 1;
  }
  for (int x = 0; x < vars.size(); ++x)
    if (!assigned[x]) throw ParseError(line, "variable " + vars.name(x) + " not assigned");
  if (auto viol = validate_copyless(s))
    throw ParseError(line, "not copyless: " + vars.name(viol->var) + " occurs twice");
  return s;
}

std::string format_substitution(const Substitution& s, const VarSet& vars,
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

Sst parse_sst(std::string_view text) {
  Sst t;
  std::optional<std::vector<std::string>> letters, var_names;
  std::optional<std::string> output;
  bool have_states = false;
  struct PendingUpdate {
    int line;
    std::vector<std::string> head;
    std::string rhs;
    bool final;
  };
  std::vector<PendingUpdate> updates;
  std::vector<std::pair<int, std::vector<std::string>>> initial_lines, final_lines;

  for (const auto& [ln, content] : lines_of(text).items) {
    auto colon = content.find(':');
    auto words = split_ws(content.substr(0, colon));
    const std::string& kw = words[0];
    std::vector<std::string> args(words.begin() + 1, words.end());
    if (kw == "trans" || kw == "finalout") {
      if (colon == std::string::npos) throw ParseError(ln, "missing ':' in " + kw);
      updates.push_back({ln, args, content.substr(colon + 1), kw == "finalout"});
      continue;
    }
    if (colon != std::string::npos) throw ParseError(ln, "unexpected ':'");
    if (kw == "sst") {
      if (args.size() != 1) throw ParseError(ln, "sst takes one name");
      t.name = args[0];
    } else if (kw == "alphabet") {
      if (args.empty()) throw ParseError(ln, "empty alphabet");
      letters = args;
    } else if (kw == "vars") {
      if (args.empty()) throw ParseError(ln, "no variables");
      var_names = args;
    } else if (kw == "output") {
      if (args.size() != 1) throw ParseError(ln, "output takes one variable");
      output = args[0];
    } else if (kw == "states") {
      t.states = args;
      have_states = true;
    } else if (kw == "initial") {
      initial_lines.emplace_back(ln, args);
    } else if (kw == "final") {
      final_lines.emplace_back(ln, args);
    } else {
      throw ParseError(ln, "unknown keyword " + kw);
    }
  }
  if (!letters) throw ParseError(0, "missing alphabet");
  if (!var_names) throw ParseError(0, "missing vars");
  if (!output) throw ParseError(0, "missing output");
  if (!have_states) throw ParseError(0, "missing states");
  try {
    t.alphabet = Alphabet(*letters);
  } catch (const StructuralError& e) {
    throw ParseError(0, e.what());
  }
  int out_idx = -1;
  for (int i = 0; i < static_cast<int>(var_names->size()); ++i)
    if ((*var_names)[i] == *output) out_idx = i;
  if (out_idx < 0) throw ParseError(0, "output " + *output + " is not a variable");
  try {
    t.vars = VarSet(*var_names, out_idx);
  } catch (const StructuralError& e) {
    throw ParseError(0, e.what());
  }
  check_names(t.alphabet, t.vars, 0);

  for (const auto& [ln, args] : initial_lines)
    for (const auto& q : args) t.initial.push_back(state_index(t.states, q, ln));
  for (const auto& [ln, args] : final_lines)
    for (const auto& q : args) t.final_states.push_back(state_index(t.states, q, ln));

  for (const auto& u : updates) {
    Substitution s = parse_substitution(u.rhs, t.alphabet, t.vars, u.line);
    if (u.final) {
      if (u.head.size() != 1) throw ParseError(u.line, "finalout takes one state");
      int q = state_index(t.states, u.head[0], u.line);
      if (t.final_output.count(q)) throw ParseError(u.line, "duplicate finalout");
      t.final_output[q] = std::move(s);
    } else {
      if (u.head.size() != 3) throw ParseError(u.line, "trans takes FROM LETTER TO");
      int from = state_index(t.states, u.head[0], u.line);
      int to = state_index(t.states, u.head[2], u.line);
      auto c = t.alphabet.find(u.head[1]);
      if (!c) throw ParseError(u.line, "unknown letter " + u.head[1]);
      t.transitions.push_back({from, *c, to, std::move(s)});
    }
  }
  // A final state without an explicit output reads the output variable.
  for (int q : t.final_states)
    if (!t.final_output.count(q)) t.final_output[q] = Substitution::identity(t.vars.size());
  for (const auto& [q, s] : t.final_output)
    if (std::find(t.final_states.begin(), t.final_states.end(), q) == t.final_states.end())
      t.final_states.push_back(q);
  try {
    t.validate();
  } catch (const StructuralError& e) {
    throw ParseError(0, e.what());
  }
  return t;
}

std::string serialize_sst(const Sst& t) {
  std::ostringstream out;
  out << "sst " << (t.name.empty() ? "unnamed" : t.name) << "\n";
  out << "alphabet";
  for (const auto& l : t.alphabet.letters()) out << ' ' << l;
  out << "\nvars";
  for (const auto& v : t.vars.names()) out << ' ' << v;
  out << "\noutput " << t.vars.name(t.vars.output()) << "\nstates";
  for (const auto& q : t.states) out << ' ' << q;
  out << "\ninitial";
  for (int q : t.initial) out << ' ' << t.states[q];
  out << "\nfinal";
  for (int q : t.final_states) out << ' ' << t.states[q];
  out << "\n";
  for (const auto& tr : t.transitions)
    out << "trans " << t.states[tr.from] << ' ' << t.alphabet.name(tr.letter) << ' '
        << t.states[tr.to] << " : "
        << format_substitution(tr.update, t.vars, t.alphabet) << "\n";
  for (const auto& [q, s] : t.final_output)
    out << "finalout " << t.states[q] << " : "
        << format_substitution(s, t.vars, t.alphabet) << "\n";
  return out.str();
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Sst load_sst(const std::filesystem::path& path) { return parse_sst(read_file(path)); }

SeqFile parse_seq(std::string_view text, const SstResolver& resolve) {
  SeqFile f;
  auto ls = lines_of(text).items;
  if (ls.empty()) throw ParseError(0, "empty sequence file");
  auto head = split_ws(ls[0].second);
  if (head.size() != 3 || head[0] != "seq" || head[1] != "over")
    throw ParseError(ls[0].first, "expected 'seq over <sst-name|inline>'");
  f.over = head[2];
  std::size_t i = 1;
  if (f.over == "inline") {
    std::optional<std::vector<std::string>> letters, names;
    std::optional<std::string> output;
    for (; i < ls.size(); ++i) {
      auto w = split_ws(ls[i].second);
      if (w[0] == "alphabet")
        letters = std::vector<std::string>(w.begin() + 1, w.end());
      else if (w[0] == "vars")
        names = std::vector<std::string>(w.begin() + 1, w.end());
      else if (w[0] == "output" && w.size() == 2)
        output = w[1];
      else
        break;
    }
    if (!letters || !names || !output)
      throw ParseError(ls[0].first, "inline header needs alphabet, vars and output");
    f.alphabet = Alphabet(*letters);
    auto it = std::find(names->begin(), names->end(), *output);
    if (it == names->end()) throw ParseError(ls[0].first, "output is not a variable");
    f.vars = VarSet(*names, static_cast<int>(it - names->begin()));
  } else {
    std::optional<Sst> t = resolve ? resolve(f.over) : std::nullopt;
    if (!t) throw ParseError(ls[0].first, "cannot resolve SST " + f.over);
    f.alphabet = t->alphabet;
    f.vars = t->vars;
  }
  check_names(f.alphabet, f.vars, ls[0].first);
  for (; i < ls.size(); ++i)
    f.seq.push_back(parse_substitution(ls[i].second, f.alphabet, f.vars, ls[i].first));
  return f;
}

std::string serialize_seq(const SeqFile& f) {
  std::ostringstream out;
  out << "seq over " << f.over << "\n";
  if (f.over == "inline") {
    out << "alphabet";
    for (const auto& l : f.alphabet.letters()) out << ' ' << l;
    out << "\nvars";
    for (const auto& v : f.vars.names()) out << ' ' << v;
    out << "\noutput " << f.vars.name(f.vars.output()) << "\n";
  }
  for (const auto& s : f.seq) out << format_substitution(s, f.vars, f.alphabet) << "\n";
  return out.str();
}

SeqFile load_seq(const std::filesystem::path& path) {
  auto dir = path.parent_path();
  return parse_seq(read_file(path), [&](const std::string& name) -> std::optional<Sst> {
    auto p = dir / (name + ".sst");
    if (!std::filesystem::exists(p)) return std::nullopt;
    return load_sst(p);
  });
}

}  // namespace sstdelay
