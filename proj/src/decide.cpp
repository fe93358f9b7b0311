#include "sstdelay/decide.hpp"

#include <algorithm>
#include <chrono>
#include <deque>
#include <functional>
#include <map>
#include <set>
#include <tuple>
#include <unordered_map>
#include <unordered_set>

#include "sstdelay/errors.hpp"

namespace sstdelay {

// ---------------------------------------------------------------- D^in

DInAutomaton::DInAutomaton(const ResyncParams& p, int input_letters, std::size_t budget)
    : nin_(input_letters), ns_(static_cast<int>(p.s.size())), d_(build_resync(p, budget)) {}

int DInAutomaton::symbol(int a, int s, int t) const { return (a * ns_ + s) * ns_ + t; }

int DInAutomaton::num_symbols() const { return (nin_ + 1) * ns_ * ns_; }

// State 2·q + ended, q a resynchronizer state.
std::vector<State> DInAutomaton::initial() const {
  return {static_cast<State>(d_->start()) << 1};
}

void DInAutomaton::successors(State q, Symbol a, std::vector<State>& out) const {
  if (q & 1) return;
  const int letter = a / (ns_ * ns_);
  const int pair = a % (ns_ * ns_);
  State d = static_cast<State>(d_->next(static_cast<int>(q >> 1), pair));
  out.push_back(d << 1 | (letter == nin_ ? 1 : 0));
}

bool DInAutomaton::accepting(State q) const {
  return (q & 1) && d_->is_accepting(static_cast<int>(q >> 1));
}

std::string DInAutomaton::describe(State q) const {
  return d_->describe(q >> 1) + ((q & 1) ? "⊣" : "");
}

bool DInAutomaton::accepts(const Word& u1, const SubstSeq& l, const Word& u2,
                           const SubstSeq& m) const {
  if (u1 != u2) return false;
  if (l.size() != u1.size() + 1 || m.size() != u1.size() + 1) return false;
  std::vector<State> cur = initial(), nxt;
  for (std::size_t t = 0; t < l.size(); ++t) {
    int a = t < u1.size() ? u1[t] : nin_;
    if (a < 0 || a >= nin_ + 1) return false;
    nxt.clear();
    for (State q : cur)
      successors(q, symbol(a, d_->index_of(l[t]), d_->index_of(m[t])), nxt);
    cur.swap(nxt);
  }
  for (State q : cur)
    if (accepting(q)) return true;
  return false;
}

std::shared_ptr<DInAutomaton> build_d_in(const ResyncParams& p, const Alphabet& sigma,
                                         std::size_t budget) {
  return std::make_shared<DInAutomaton>(p, sigma.size(), budget);
}

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Substitutions interned into one set S.
struct SubstIndex {
  std::vector<Substitution> s;
  std::map<Substitution, int> ids;
  int intern(const Substitution& x) {
    auto [it, fresh] = ids.try_emplace(x, static_cast<int>(s.size()));
    if (fresh) s.push_back(x);
    return it->second;
  }
};

// An SST's underlying automaton with substitutions replaced by their
// index in S.
struct Side {
  int nstates = 0;
  std::vector<int> initial;
  std::vector<std::vector<std::vector<std::pair<int, int>>>> delta;  // [q][a] -> (q', s)
  std::vector<std::vector<int>> finals;                              // [q] -> s
};

Side side_of(const Sst& t, SubstIndex& idx) {
  Side sd;
  sd.nstates = static_cast<int>(t.states.size());
  sd.initial = t.initial;
  sd.delta.assign(sd.nstates, std::vector<std::vector<std::pair<int, int>>>(t.alphabet.size()));
  sd.finals.assign(sd.nstates, {});
  for (const auto& tr : t.transitions)
    sd.delta[tr.from][tr.letter].emplace_back(tr.to, idx.intern(tr.update));
  for (const auto& [q, f] : t.final_output) sd.finals[q].push_back(idx.intern(f));
  for (auto& row : sd.delta)
    for (auto& v : row) std::sort(v.begin(), v.end());
  for (auto& f : sd.finals) std::sort(f.begin(), f.end());
  return sd;
}

// One state reading every letter with every candidate.
Side universal_side(int nletters, const std::vector<int>& cands) {
  Side sd;
  sd.nstates = 1;
  sd.initial = {0};
  sd.delta.assign(1, std::vector<std::vector<std::pair<int, int>>>(nletters));
  for (int a = 0; a < nletters; ++a)
    for (int c : cands) sd.delta[0][a].emplace_back(0, c);
  sd.finals = {cands};
  return sd;
}

inline std::uint64_t pack(int q, int d) {
  return static_cast<std::uint64_t>(q) << 40 | static_cast<std::uint64_t>(d);
}
inline int pq(std::uint64_t e) { return static_cast<int>(e >> 40); }
inline int pd(std::uint64_t e) { return static_cast<int>(e & ((1ULL << 40) - 1)); }

using PairSet = std::vector<std::uint64_t>;

PairSet step_set(const ResyncAutomaton& d, const Side& b, const PairSet& set, int a, int s) {
  const int ns = static_cast<int>(d.params().s.size());
  PairSet out;
  for (std::uint64_t e : set)
    for (auto [q2, t] : b.delta[pq(e)][a])
      out.push_back(pack(q2, d.canonical(d.next(pd(e), s * ns + t))));
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

// Some element of set can close with a final output of b next to s.
bool closes(const ResyncAutomaton& d, const Side& b, const PairSet& set, int s) {
  const int ns = static_cast<int>(d.params().s.size());
  for (std::uint64_t e : set)
    for (int t : b.finals[pq(e)])
      if (d.is_accepting(d.next(pd(e), s * ns + t))) return true;
  return false;
}

struct Violation {
  Word input;
  std::vector<int> subs;  // indices into S, final output last
  std::vector<int> states;
};

// Least (|u|, u, λ) with (u, λ) ∈ L(a) and no (u, μ) ∈ L(b) next to it in
// d. Level-synchronous search: every level is sorted by (input, run)
// before antichain insertion, so a node is only ever pruned in favour of
// one that is not larger.
std::optional<Violation> search(const ResyncAutomaton& d, const Side& a, const Side& b,
                                int nletters, const DecideOptions& opt, std::size_t& explored) {
  const std::size_t budget = opt.budget;
  const auto t0 = Clock::now();
  std::size_t attempts = 0;
  struct Node {
    int parent, letter, sub, p;
    PairSet set;
  };
  std::vector<Node> nodes;
  std::vector<int> urank, rank;
  // Antichain per a-state. Live members are indexed by their least
  // element (a subset of a set starts with one of its elements) and by
  // every element (a superset of a set contains its least element).
  struct Antichain {
    std::unordered_map<std::uint64_t, std::vector<int>> by_first, by_elem;
    std::vector<int> empties;
  };
  std::unordered_map<int, Antichain> antichain;
  std::vector<char> alive;

  auto subsumed = [&](int p, const PairSet& set) {
    auto it = antichain.find(p);
    if (it == antichain.end()) return false;
    const auto& ac = it->second;
    for (int i : ac.empties)
      if (alive[i]) return true;
    for (std::uint64_t e : set) {
      auto b = ac.by_first.find(e);
      if (b == ac.by_first.end()) continue;
      for (int i : b->second) {
        const auto& s = nodes[i].set;
        if (alive[i] && std::includes(set.begin(), set.end(), s.begin(), s.end())) return true;
      }
    }
    return false;
  };
  auto violated = [&](int id) -> int {
    for (int s : a.finals[nodes[id].p])
      if (!closes(d, b, nodes[id].set, s)) return s;
    return -1;
  };
  auto report = [&](int id, int s) {
    Violation v;
    for (int c = id; c >= 0; c = nodes[c].parent) {
      v.states.push_back(nodes[c].p);
      if (nodes[c].parent >= 0) {
        v.input.push_back(nodes[c].letter);
        v.subs.push_back(nodes[c].sub);
      }
    }
    std::reverse(v.states.begin(), v.states.end());
    std::reverse(v.input.begin(), v.input.end());
    std::reverse(v.subs.begin(), v.subs.end());
    v.subs.push_back(s);
    return v;
  };
  auto insert = [&](Node n) -> int {
    if (opt.time_limit > 0 && ++attempts % 64 == 0 && since(t0) > opt.time_limit)
      throw ResourceError::time_limit("inclusion search", opt.time_limit);
    if (subsumed(n.p, n.set)) return -1;
    if (nodes.size() >= budget) throw ResourceError("inclusion search", budget);
    int id = static_cast<int>(nodes.size());
    auto& ac = antichain[n.p];
    // Drop live members that contain the new set.
    auto drop = [&](std::vector<int>& ids) {
      for (int i : ids) {
        const auto& s = nodes[i].set;
        if (alive[i] && std::includes(s.begin(), s.end(), n.set.begin(), n.set.end())) alive[i] = 0;
      }
      ids.erase(std::remove_if(ids.begin(), ids.end(), [&](int i) { return !alive[i]; }), ids.end());
    };
    if (n.set.empty()) {
      for (auto& [e, ids] : ac.by_first) drop(ids);
      drop(ac.empties);
    } else {
      drop(ac.by_elem[n.set.front()]);
    }
    if (n.set.empty()) {
      ac.empties.push_back(id);
    } else {
      ac.by_first[n.set.front()].push_back(id);
      for (std::uint64_t e : n.set) ac.by_elem[e].push_back(id);
    }
    alive.push_back(1);
    nodes.push_back(std::move(n));
    urank.push_back(0);
    rank.push_back(0);
    ++explored;
    return id;
  };

  PairSet init;
  for (int q : b.initial) init.push_back(pack(q, d.start()));
  std::sort(init.begin(), init.end());
  init.erase(std::unique(init.begin(), init.end()), init.end());

  std::vector<int> level;
  std::vector<int> starts = a.initial;
  std::sort(starts.begin(), starts.end());
  starts.erase(std::unique(starts.begin(), starts.end()), starts.end());
  for (int p : starts) {
    int id = insert(Node{-1, -1, -1, p, init});
    if (id < 0) continue;
    if (int s = violated(id); s >= 0) return report(id, s);
    level.push_back(id);
  }
  for (std::size_t i = 0; i < level.size(); ++i) urank[level[i]] = 0, rank[level[i]] = 0;

  struct Cand {
    int ur, letter, r, sub, p, parent;
    bool operator<(const Cand& o) const {
      return std::tie(ur, letter, r, sub, p) < std::tie(o.ur, o.letter, o.r, o.sub, o.p);
    }
  };
  while (!level.empty()) {
    std::vector<Cand> cands;
    for (int id : level)
      for (int x = 0; x < nletters; ++x)
        for (auto [p2, s] : a.delta[nodes[id].p][x])
          cands.push_back({urank[id], x, rank[id], s, p2, id});
    std::sort(cands.begin(), cands.end());
    std::vector<int> next;
    int last_parent = -1, last_letter = -1, last_sub = -1;
    PairSet set;
    int ur = -1, r = 0;
    std::pair<int, int> last_u{-1, -1};
    for (const auto& c : cands) {
      if (c.parent != last_parent || c.letter != last_letter || c.sub != last_sub) {
        set = step_set(d, b, nodes[c.parent].set, c.letter, c.sub);
        last_parent = c.parent;
        last_letter = c.letter;
        last_sub = c.sub;
      }
      if (std::make_pair(c.ur, c.letter) != last_u) {
        ++ur;
        last_u = {c.ur, c.letter};
      }
      int id = insert(Node{c.parent, c.letter, c.sub, c.p, set});
      if (id < 0) continue;
      urank[id] = ur;
      rank[id] = r++;
      if (int s = violated(id); s >= 0) return report(id, s);
      next.push_back(id);
    }
    level.swap(next);
  }
  return std::nullopt;
}

Counterexample to_counterexample(const Violation& v, const std::vector<Substitution>& s) {
  Counterexample c;
  c.input = v.input;
  c.states = v.states;
  for (int i : v.subs) c.run.push_back(s[i]);
  return c;
}

int letters_of(const Sst& t) { return t.alphabet.size(); }

// At most one run per input.
bool single_run(const Side& b) {
  if (b.initial.size() > 1) return false;
  for (int q = 0; q < b.nstates; ++q) {
    if (b.finals[q].size() > 1) return false;
    for (const auto& v : b.delta[q])
      if (v.size() > 1) return false;
  }
  return true;
}

// With b single-run, λ has a partner only if it is b's run on the same
// input, so a violation is an input in dom(a) \ dom(b) or a pair of runs
// the characterization NFA (outside D, endmarked) accepts. Reachability
// over a × b × N, breadth first; no determinization.
bool violation_reachable(const Nfa& n, const Side& a, const Side& b, int ns, int nletters,
                         const DecideOptions& opt, std::size_t& explored) {
  const int wide = 2 * ns;
  const auto t0 = Clock::now();
  using Key = std::tuple<int, int, State>;
  std::set<Key> seen;
  std::deque<Key> queue;
  auto push = [&](int pa, int pb, State q) {
    if (!seen.insert({pa, pb, q}).second) return;
    if (seen.size() >= opt.budget) throw ResourceError("single-run inclusion", opt.budget);
    if (opt.time_limit > 0 && seen.size() % 256 == 0 && since(t0) > opt.time_limit)
      throw ResourceError::time_limit("single-run inclusion", opt.time_limit);
    queue.emplace_back(pa, pb, q);
  };
  const int pb0 = b.initial.empty() ? -1 : b.initial[0];
  for (int pa : a.initial) {
    if (pb0 < 0) {
      push(pa, -1, 0);
      continue;
    }
    for (State q : n.initial()) push(pa, pb0, q);
  }
  std::vector<State> succ;
  while (!queue.empty()) {
    auto [pa, pb, q] = queue.front();
    queue.pop_front();
    if (!a.finals[pa].empty()) {
      if (pb < 0 || b.finals[pb].empty()) return true;
      const int t = b.finals[pb][0];
      for (int s : a.finals[pa]) {
        succ.clear();
        n.successors(q, (ns + s) * wide + ns + t, succ);
        for (State q2 : succ)
          if (n.accepting(q2)) return true;
      }
    }
    for (int x = 0; x < nletters; ++x)
      for (auto [pa2, s] : a.delta[pa][x]) {
        if (pb < 0 || b.delta[pb][x].empty()) {
          push(pa2, -1, 0);
          continue;
        }
        auto [pb2, t] = b.delta[pb][x][0];
        succ.clear();
        n.successors(q, s * wide + t, succ);
        for (State q2 : succ) push(pa2, pb2, q2);
      }
  }
  explored += seen.size();
  return false;
}

}  // namespace

// ---------------------------------------------------------- inclusion

Verdict check_inclusion(const Sst& t1, const Sst& t2, int k, int ell, const DecideOptions& opt) {
  auto t0 = Clock::now();
  t1.validate();
  t2.validate();
  auto u = unify({t1, t2});
  SubstIndex idx;
  Side a = side_of(u[0], idx);
  Side b = side_of(u[1], idx);
  ResyncParams p;
  p.k = k;
  p.ell = ell;
  p.s = idx.s;
  p.out_var = u[0].vars.output();
  p.nletters = letters_of(u[0]);
  Verdict v;
  v.alphabet = u[0].alphabet;
  v.vars = u[0].vars;
  v.stats.substitutions = idx.s.size();
  // A reachability proof suffices when it holds; otherwise the search
  // below still produces the least counterexample.
  if (opt.single_run_shortcut && single_run(b)) {
    auto n = characterization_engine_nfa(p, opt.budget);
    if (!violation_reachable(*n, a, b, static_cast<int>(idx.s.size()), letters_of(u[0]), opt,
                             v.stats.explored)) {
      v.stats.seconds = since(t0);
      return v;
    }
  }
  auto d = build_resync(p, opt.budget);
  auto viol = search(*d, a, b, letters_of(u[0]), opt, v.stats.explored);
  if (viol) {
    v.outcome = Outcome::kFails;
    v.counterexample = to_counterexample(*viol, idx.s);
  }
  v.stats.resync_states = d->stats().dfa_states;
  v.stats.seconds = since(t0);
  return v;
}

Verdict check_equivalence(const Sst& t1, const Sst& t2, int k, int ell,
                          const DecideOptions& opt) {
  auto t0 = Clock::now();
  Verdict fwd = check_inclusion(t1, t2, k, ell, opt);
  if (!fwd.holds()) {
    fwd.counterexample->direction = t1.name + " ⊆ " + t2.name;
    fwd.stats.seconds = since(t0);
    return fwd;
  }
  Verdict bwd = check_inclusion(t2, t1, k, ell, opt);
  if (!bwd.holds()) bwd.counterexample->direction = t2.name + " ⊆ " + t1.name;
  bwd.stats.explored += fwd.stats.explored;
  bwd.stats.resync_states += fwd.stats.resync_states;
  bwd.stats.seconds = since(t0);
  return bwd;
}

// ---------------------------------------------------- variable bounds

std::vector<Substitution> candidate_substitutions(int nletters, int nvars, int r, int m) {
  if (m < 0 || m > nvars) throw DomainError("candidate variable count outside [0, nvars]");
  if (m == 0) return {Substitution::empty(nvars)};
  std::vector<Substitution> out;
  Substitution cur = Substitution::identity(nvars);
  std::function<void(int, unsigned, int)> image;
  // Image of variable x grows token by token; `used` marks variables
  // already placed somewhere.
  image = [&](int x, unsigned used, int left) {
    if (x == m) {
      out.push_back(cur);
      return;
    }
    image(x + 1, used, left);
    auto& img = cur.images[x];
    if (left > 0)
      for (int c = 0; c < nletters; ++c) {
        img.push_back(letter_token(c));
        image(x, used, left - 1);
        img.pop_back();
      }
    for (int y = 0; y < m; ++y) {
      if ((used >> y) & 1) continue;
      img.push_back(y);
      image(x, used | (1u << y), left);
      img.pop_back();
    }
  };
  for (int x = 0; x < m; ++x) cur.images[x].clear();
  image(0, 0, r);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

int candidate_letter_bound(const Sst& t, int k) {
  int p = 0;
  for (const auto& tr : t.transitions) p = std::max(p, tr.update.letter_count());
  for (const auto& [q, f] : t.final_output) p = std::max(p, f.letter_count());
  return 2 * k + p;
}

namespace {

// t over variables [output, X2..Xm, t's other variables], so that the
// candidates' variables are [0, m).
Sst with_candidate_vars(const Sst& t, int m) {
  std::vector<std::string> names{t.vars.name(t.vars.output())};
  for (int i = 2; i <= m; ++i) {
    std::string n = "X" + std::to_string(i);
    while (t.vars.find(n) || std::find(names.begin(), names.end(), n) != names.end()) n += "'";
    names.push_back(n);
  }
  std::vector<int> vmap(t.vars.size());
  for (int x = 0; x < t.vars.size(); ++x) {
    if (x == t.vars.output()) {
      vmap[x] = 0;
      continue;
    }
    vmap[x] = static_cast<int>(names.size());
    names.push_back(t.vars.name(x));
  }
  std::vector<int> lmap(t.alphabet.total());
  for (int c = 0; c < t.alphabet.total(); ++c) lmap[c] = c;
  Sst r = t;
  r.vars = VarSet(names, 0);
  const int nv = static_cast<int>(names.size());
  for (auto& tr : r.transitions) tr.update = remap(tr.update, vmap, lmap, nv);
  for (auto& [q, f] : r.final_output) f = remap(f, vmap, lmap, nv);
  return r;
}

struct VarminSetup {
  Sst t;
  SubstIndex idx;
  Side a;
  std::vector<int> cands;
  std::shared_ptr<ResyncAutomaton> d;
};

VarminSetup varmin_setup(const Sst& t, int k, int ell, int m, const DecideOptions& opt) {
  t.validate();
  if (m < 0) throw DomainError("negative variable count");
  if (m > opt.max_m) throw ResourceError("candidate variables (m ≤ " + std::to_string(opt.max_m) + ")", opt.max_m);
  const int r = candidate_letter_bound(t, k);
  if (r > opt.max_r) throw ResourceError("candidate letters per step (r ≤ " + std::to_string(opt.max_r) + ")", opt.max_r);
  VarminSetup s;
  s.t = with_candidate_vars(t, std::max(m, 1));
  s.a = side_of(s.t, s.idx);
  for (const auto& c : candidate_substitutions(t.alphabet.size(), s.t.vars.size(), r, m))
    s.cands.push_back(s.idx.intern(c));
  ResyncParams p;
  p.k = k;
  p.ell = ell;
  p.s = s.idx.s;
  p.out_var = 0;
  p.nletters = t.alphabet.size();
  s.d = build_resync(p, opt.budget);
  return s;
}

}  // namespace

Verdict varmin_nondet(const Sst& t, int k, int ell, int m, const DecideOptions& opt) {
  auto t0 = Clock::now();
  VarminSetup s = varmin_setup(t, k, ell, m, opt);
  Side b = universal_side(t.alphabet.size(), s.cands);
  Verdict v;
  v.alphabet = s.t.alphabet;
  v.vars = s.t.vars;
  auto viol = search(*s.d, s.a, b, t.alphabet.size(), opt, v.stats.explored);
  if (viol) {
    v.outcome = Outcome::kFails;
    v.counterexample = to_counterexample(*viol, s.idx.s);
  }
  v.stats.resync_states = s.d->stats().dfa_states;
  v.stats.substitutions = s.idx.s.size();
  v.stats.seconds = since(t0);
  return v;
}

Verdict varmin_det(const Sst& t, int k, int ell, int m, const DecideOptions& opt) {
  auto t0 = Clock::now();
  VarminSetup s = varmin_setup(t, k, ell, m, opt);
  const ResyncAutomaton& d = *s.d;
  const int ns = static_cast<int>(s.idx.s.size());
  const int nin = t.alphabet.size();

  // Input positions are the sets of (t-state, resynchronizer state) over
  // all runs of t on the input so far, against the candidate sequence
  // chosen so far. Output positions are (input position, letter).
  SafetyGame g;
  std::map<PairSet, int> ids;
  std::vector<PairSet> sets;
  auto unsafe = [&](const PairSet& set) {
    bool in_dom = false;
    for (std::uint64_t e : set)
      if (!s.a.finals[pq(e)].empty()) in_dom = true;
    if (!in_dom) return false;
    for (int c : s.cands) {
      bool ok = true;
      for (std::uint64_t e : set)
        for (int f : s.a.finals[pq(e)])
          if (ok && !d.is_accepting(d.next(pd(e), f * ns + c))) ok = false;
      if (ok) return false;
    }
    return true;
  };
  auto position = [&](PairSet set) {
    auto it = ids.find(set);
    if (it != ids.end()) return it->second;
    if (static_cast<std::size_t>(g.size()) >= opt.budget)
      throw ResourceError("varmin safety game", opt.budget);
    int id = g.add_position(0, unsafe(set));
    ids.emplace(set, id);
    sets.push_back(std::move(set));
    return id;
  };

  PairSet init;
  for (int q : s.a.initial) init.push_back(pack(q, d.start()));
  std::sort(init.begin(), init.end());
  init.erase(std::unique(init.begin(), init.end()), init.end());
  const int start = position(init);
  std::vector<int> input_ids{start};
  std::vector<int> set_of(1, 0);  // game position -> index in sets (input positions)
  for (std::size_t w = 0; w < input_ids.size(); ++w) {
    const int pos = input_ids[w];
    const PairSet cur = sets[set_of[pos]];
    if (cur.empty()) continue;
    for (int a = 0; a < nin; ++a) {
      int out = g.add_position(1);
      set_of.push_back(-1);
      g.add_move(pos, out);
      for (int c : s.cands) {
        PairSet nx;
        for (std::uint64_t e : cur)
          for (auto [q2, sub] : s.a.delta[pq(e)][a])
            nx.push_back(pack(q2, d.canonical(d.next(pd(e), sub * ns + c))));
        std::sort(nx.begin(), nx.end());
        nx.erase(std::unique(nx.begin(), nx.end()), nx.end());
        const std::size_t before = sets.size();
        int id = position(std::move(nx));
        if (sets.size() > before) {
          set_of.push_back(static_cast<int>(sets.size()) - 1);
          input_ids.push_back(id);
        }
        g.add_move(out, id);
      }
    }
  }
  auto win = solve_safety(g);

  Verdict v;
  v.alphabet = s.t.alphabet;
  v.vars = s.t.vars;
  v.stats.explored = static_cast<std::size_t>(g.size());
  if (!win[start]) {
    v.outcome = Outcome::kFails;
    // A single input witnesses the failure when no candidate sequence at
    // all stays close to some run; otherwise the input side needs to
    // adapt and there is no word counterexample.
    Side b = universal_side(nin, s.cands);
    std::size_t extra = 0;
    if (auto viol = search(d, s.a, b, nin, opt, extra))
      v.counterexample = to_counterexample(*viol, s.idx.s);
  }
  v.stats.resync_states = d.stats().dfa_states;
  v.stats.substitutions = s.idx.s.size();
  v.stats.seconds = since(t0);
  return v;
}

// --------------------------------------------------------- safety game

int SafetyGame::add_position(int player, bool is_unsafe) {
  owner.push_back(player);
  moves.emplace_back();
  unsafe.push_back(is_unsafe);
  return static_cast<int>(owner.size()) - 1;
}

void SafetyGame::add_move(int from, int to) { moves.at(from).push_back(to); }

std::vector<char> solve_safety(const SafetyGame& g) {
  const int n = g.size();
  std::vector<std::vector<int>> pred(n);
  std::vector<int> pending(n, 0);
  for (int v = 0; v < n; ++v) {
    for (int w : g.moves[v]) pred[w].push_back(v);
    pending[v] = static_cast<int>(g.moves[v].size());
  }
  std::vector<char> attr(n, 0);
  std::vector<int> work;
  for (int v = 0; v < n; ++v)
    if (g.unsafe[v] || (g.owner[v] == 1 && g.moves[v].empty())) {
      attr[v] = 1;
      work.push_back(v);
    }
  while (!work.empty()) {
    int w = work.back();
    work.pop_back();
    for (int v : pred[w]) {
      if (attr[v]) continue;
      // Duplicate edges count once per copy, matching pending.
      if (g.owner[v] == 0 || --pending[v] == 0) {
        attr[v] = 1;
        work.push_back(v);
      }
    }
  }
  std::vector<char> win(n);
  for (int v = 0; v < n; ++v) win[v] = !attr[v];
  return win;
}

// ------------------------------------------------------ bounded oracles

std::optional<Counterexample> bounded_inclusion_violation(const Sst& t1, const Sst& t2, int k,
                                                          int ell, int max_len) {
  auto u = unify({t1, t2});
  const int out = u[0].vars.output();
  for (const auto& w : all_words(u[0].alphabet.size(), max_len)) {
    auto r2 = enumerate_runs(u[1], w);
    std::vector<SeqProfile> prof2;
    for (const auto& r : r2) prof2.push_back(SeqProfile::of(r.seq, out, ell));
    for (const auto& r1 : enumerate_runs(u[0], w)) {
      auto p1 = SeqProfile::of(r1.seq, out, ell);
      bool matched = false;
      for (const auto& p2 : prof2)
        if (profile_in_resync(p1, p2, k)) {
          matched = true;
          break;
        }
      if (!matched) return Counterexample{w, r1.seq, r1.states, ""};
    }
  }
  return std::nullopt;
}

bool bounded_candidate_exists(const SubstSeq& l, int out_var, int nletters, int k, int ell,
                              int m, int r) {
  const SeqProfile pl = SeqProfile::of(l, out_var, ell);
  const int len = pl.length;
  const int n = static_cast<int>(pl.out.size());
  const int nv = std::max(m, 1);
  const auto cands = candidate_substitutions(nletters, nv, r, m);
  // Output letters l has produced by time t.
  std::vector<int> produced(len + 1, 0);
  for (int o : pl.origins) ++produced[o];
  for (int t = 1; t <= len; ++t) produced[t] += produced[t - 1];

  // Factors of out(l), for the survival test.
  std::unordered_set<std::string> factors;
  {
    std::string w(pl.out.begin(), pl.out.end());
    for (int i = 0; i <= n; ++i)
      for (int j = i; j <= n; ++j) factors.insert(w.substr(i, j - i));
  }
  auto as_string = [](const std::vector<std::pair<int, int>>& v) {
    std::string s;
    for (auto [c, t] : v) s.push_back(static_cast<char>(c));
    return s;
  };

  // Contents annotated with production times; the rest of a candidate's
  // fate depends on nothing else, so failed states are memoized.
  using Contents = std::vector<std::vector<std::pair<int, int>>>;
  std::set<std::pair<int, Contents>> failed;
  SubstSeq mu;
  std::function<bool(int, const Contents&)> go = [&](int t, const Contents& cur) -> bool {
    // A variable's content reaches the output whole or not at all.
    int held = 0, total = 0;
    for (const auto& v : cur) {
      total += static_cast<int>(v.size());
      if (!v.empty() && factors.count(as_string(v))) held += static_cast<int>(v.size());
    }
    if (total + r * (len - t) < n) return false;
    if (n > 0 && held < produced[t] - k) return false;
    if (t == len) {
      if (!std::equal(cur[0].begin(), cur[0].end(), pl.out.begin(), pl.out.end(),
                      [](const std::pair<int, int>& a, int c) { return a.first == c; }) ||
          static_cast<int>(cur[0].size()) != n)
        return false;
      return profile_in_resync(pl, SeqProfile::of(mu, 0, ell), k);
    }
    if (failed.count({t, cur})) return false;
    for (const auto& c : cands) {
      Contents nx(nv);
      for (int x = 0; x < nv; ++x)
        for (int tok : c.images[x]) {
          if (is_var(tok))
            nx[x].insert(nx[x].end(), cur[tok].begin(), cur[tok].end());
          else
            nx[x].emplace_back(token_letter(tok), t + 1);
        }
      mu.push_back(c);
      bool ok = go(t + 1, nx);
      mu.pop_back();
      if (ok) return true;
    }
    failed.insert({t, cur});
    return false;
  };
  return go(0, Contents(nv));
}

std::optional<Counterexample> bounded_varmin_violation(const Sst& t, int k, int ell, int m,
                                                       int r, int max_len) {
  for (const auto& w : all_words(t.alphabet.size(), max_len))
    for (const auto& run : enumerate_runs(t, w))
      if (!bounded_candidate_exists(run.seq, t.vars.output(), t.alphabet.size(), k, ell, m, r))
        return Counterexample{w, run.seq, run.states, ""};
  return std::nullopt;
}

}  // namespace sstdelay
