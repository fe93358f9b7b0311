#include "sstdelay/resync_reference.hpp"

#include <algorithm>
#include <array>
#include <map>
#include <sstream>

#include "sstdelay/errors.hpp"
#include "sstdelay/resync.hpp"

namespace sstdelay {

Dfa period_dfa(int nletters, int h, int max_h) {
  if (h < 1) throw DomainError("period_dfa: h must be at least 1");
  if (h > max_h) throw ResourceError("period_dfa", static_cast<std::size_t>(max_h));
  Dfa d(nletters);
  int start = d.add_state(true);
  int sink = d.add_state(false);
  for (int a = 0; a < nletters; ++a) d.set_next(sink, a, sink);
  // Prefixes shorter than h, then (v, position mod h).
  std::map<Word, int> prefix{{Word{}, start}};
  std::map<std::pair<Word, int>, int> cyc;
  std::vector<std::pair<Word, int>> work;
  auto cyc_state = [&](const Word& v, int pos) {
    auto [it, fresh] = cyc.try_emplace({v, pos}, 0);
    if (fresh) {
      it->second = d.add_state(pos == 0);
      work.emplace_back(v, pos);
    }
    return it->second;
  };
  std::vector<Word> frontier{Word{}};
  for (int len = 0; len < h; ++len) {
    std::vector<Word> next;
    for (const auto& w : frontier)
      for (int a = 0; a < nletters; ++a) {
        Word w2 = w;
        w2.push_back(a);
        int to;
        if (len + 1 < h) {
          to = d.add_state(false);
          prefix.emplace(w2, to);
          next.push_back(w2);
        } else {
          to = cyc_state(w2, 0);
        }
        d.set_next(prefix.at(w), a, to);
      }
    frontier = std::move(next);
  }
  while (!work.empty()) {
    auto [v, pos] = work.back();
    work.pop_back();
    int from = cyc.at({v, pos});
    for (int a = 0; a < nletters; ++a)
      d.set_next(from, a, a == v[pos] ? cyc_state(v, (pos + 1) % h) : sink);
  }
  return d;
}

namespace {

class CutMarking : public Nfa {
 public:
  CutMarking(int nletters, int ell) : nletters_(nletters), ell_(ell) {
    for (int h = 1; h <= ell; ++h) periods_.push_back(period_dfa(nletters, h));
  }

  int num_symbols() const override { return nletters_ * 2; }

  // Key layout: [last marked, D_h states for h = 1..ℓ, (h, state) obligations...].
  std::vector<State> initial() const override {
    std::vector<State> k{1};
    for (int h = 0; h < ell_; ++h) k.push_back(0);
    return {states_.intern(k)};
  }

  void successors(State q, Symbol sym, std::vector<State>& out) const override {
    auto k = states_.key(q);
    const int x = sym / 2, c = sym % 2;
    std::vector<State> obl;
    for (std::size_t o = 1 + ell_; o < k.size(); o += 2) {
      int h = static_cast<int>(k[o]);
      int s = periods_[h].next(static_cast<int>(k[o + 1]), x);
      if (s == 1) continue;  // died: the longer factor is impossible
      if (periods_[h].is_accepting(s)) return;  // the factor was not maximal
      obl.push_back(h);
      obl.push_back(s);
    }
    std::vector<State> n{static_cast<State>(c)};
    for (int h = 0; h < ell_; ++h) n.push_back(periods_[h].next(static_cast<int>(k[1 + h]), x));
    if (c) {
      bool in_p = false;
      for (int h = 0; h < ell_; ++h) in_p |= periods_[h].is_accepting(static_cast<int>(n[1 + h]));
      if (!in_p) return;
      for (int h = 0; h < ell_; ++h) {
        if (n[1 + h] != 1) {
          obl.push_back(h);
          obl.push_back(n[1 + h]);
        }
        n[1 + h] = 0;
      }
    }
    // Canonical order of the obligations.
    std::vector<std::pair<State, State>> ps;
    for (std::size_t o = 0; o < obl.size(); o += 2) ps.emplace_back(obl[o], obl[o + 1]);
    std::sort(ps.begin(), ps.end());
    ps.erase(std::unique(ps.begin(), ps.end()), ps.end());
    for (auto [h, s] : ps) {
      n.push_back(h);
      n.push_back(s);
    }
    out.push_back(states_.intern(n));
  }

  bool accepting(State q) const override { return states_.key(q)[0] == 1; }

  std::string describe(State q) const override {
    auto k = states_.key(q);
    std::ostringstream o;
    o << (k[0] ? "c" : "-") << " f=";
    for (int h = 0; h < ell_; ++h) o << k[1 + h] << (h + 1 < ell_ ? "," : "");
    for (std::size_t i = 1 + ell_; i < k.size(); i += 2) o << " o" << k[i] + 1 << ":" << k[i + 1];
    return o.str();
  }

 private:
  int nletters_, ell_;
  std::vector<Dfa> periods_;
  Interner<std::vector<State>, StateVecHash> states_;
};

constexpr int kDead = -1;
constexpr int kDone = 1 << 20;

class WordPredicate : public Nfa {
 public:
  WordPredicate(WordPredKind kind, int nletters, int ell, int letter, int d)
      : kind_(kind), nletters_(nletters), letter_(letter), d_(d) {
    if (kind == WordPredKind::kCut || kind == WordPredKind::kNextCut)
      cut_ = std::make_shared<CutMarking>(nletters, ell);
  }

  int num_symbols() const override { return (nletters_ + 1) * kAnnot; }

  // Key: [cut state, logic state, started].
  std::vector<State> initial() const override {
    State c = cut_ ? cut_->initial().front() : 0;
    return {states_.intern({c, 0, 0})};
  }

  void successors(State q, Symbol sym, std::vector<State>& out) const override {
    auto k = states_.key(q);
    const int x = wletter(sym), bits = wbits(sym);
    const int logic = static_cast<int>(k[1]);
    if (x == nletters_) {
      if (k[2]) return;
      int l = start_symbol(logic, bits);
      if (l != kDead) out.push_back(states_.intern({k[0], static_cast<State>(l), 1}));
      return;
    }
    if (!cut_) {
      int l = step(logic, 0, bits, x);
      if (l != kDead) out.push_back(states_.intern({0, static_cast<State>(l), 1}));
      return;
    }
    for (int c = 0; c <= 1; ++c) {
      int l = step(logic, c, bits, x);
      if (l == kDead) continue;
      std::vector<State> cs;
      cut_->successors(k[0], x * 2 + c, cs);
      for (State s : cs) out.push_back(states_.intern({s, static_cast<State>(l), 1}));
    }
  }

  bool accepting(State q) const override {
    auto k = states_.key(q);
    if (cut_ && !cut_->accepting(k[0])) return false;
    switch (kind_) {
      case WordPredKind::kCut:
        return k[1] == 1;
      case WordPredKind::kNextCut:
        return k[1] == 2;
      case WordPredKind::kMism:
        return k[1] == kDone;
      case WordPredKind::kLabel:
      case WordPredKind::kEndmarked:
        return k[1] == 1;
    }
    return false;
  }

  std::string describe(State q) const override {
    auto k = states_.key(q);
    std::string s = "L" + std::to_string(k[1]);
    if (cut_) s += " " + cut_->describe(k[0]);
    return s;
  }

 private:
  int start_symbol(int logic, int bits) const {
    const bool m1 = bits & 1, m2 = bits & 2;
    switch (kind_) {
      case WordPredKind::kCut:
        return bits ? kDead : logic;
      case WordPredKind::kNextCut:
        if (m2) return kDead;
        return m1 ? 1 : logic;
      case WordPredKind::kMism:
        if (m2) return kDead;
        if (!m1) return logic;
        return d_ >= 1 ? 2 : kDead;  // position 0 carries no letter
      case WordPredKind::kLabel:
      case WordPredKind::kEndmarked:
        return kDead;
    }
    return kDead;
  }

  // c: whether the current position is a cut.
  int step(int logic, int c, int bits, int x) const {
    const bool m1 = bits & 1, m2 = bits & 2;
    switch (kind_) {
      case WordPredKind::kCut:
        if (!m1) return logic;
        return logic == 0 && c ? 1 : kDead;
      case WordPredKind::kNextCut:
        if (logic == 0) {
          if (m2) return kDead;
          return m1 ? 1 : 0;
        }
        if (logic == 1) {
          if (m1) return kDead;
          if (c) return m2 ? 2 : kDead;
          return m2 ? kDead : 1;
        }
        return bits ? kDead : 2;
      case WordPredKind::kMism: {
        // 0: before mark 1; 2 + n: n letters read after mark 1.
        if (logic == kDone) return bits ? kDead : kDone;
        if (logic == 0) {
          if (!m1) return m2 ? kDead : 0;
          if (d_ == 0) return m2 && x == letter_ ? kDone : kDead;
          return m2 ? kDead : 2;
        }
        if (m1) return kDead;
        int n = logic - 2 + 1;
        if (n == d_) return m2 && x == letter_ ? kDone : kDead;
        return m2 ? kDead : logic + 1;
      }
      case WordPredKind::kLabel:
        if (bits == 2) return logic == 0 ? 0 : kDead;
        if (bits == 3) return logic == 0 ? 1 : kDead;
        if (bits == 0) return logic == 1 ? 1 : kDead;
        return kDead;
      case WordPredKind::kEndmarked:
        if (bits || logic == 1) return kDead;
        return x == nletters_ - 1 ? 1 : 0;
    }
    return kDead;
  }

  WordPredKind kind_;
  int nletters_, letter_, d_;
  std::shared_ptr<CutMarking> cut_;
  Interner<std::vector<State>, StateVecHash> states_;
};

// Runs of p assigned to variable contents: (from, to) per variable plus
// a mask of variables holding annotated letters.
class InverseSst : public Nfa {
 public:
  InverseSst(std::shared_ptr<const MarkedSubstAlphabet> m, int out_var, ExplicitNfa p)
      : m_(std::move(m)), out_(out_var), p_(std::move(p)) {
    nv_ = m_->base().empty() ? out_ + 1 : m_->base().front().num_vars();
    if (nv_ > 62) throw ResourceError("inverse_sst variables", 62);
    q_ = p_.num_states();
    for (State s : p_.initial()) init_.push_back(static_cast<int>(s));
  }

  int num_symbols() const override { return m_->size(); }

  // Every variable starts empty: value q_ stands for all diagonal runs
  // (p, p) at once, which is what the empty content admits.
  std::vector<State> initial() const override {
    std::vector<State> k(2 * nv_ + 1, static_cast<State>(q_));
    k[2 * nv_] = 0;
    return {states_.intern(k)};
  }

  void successors(State q, Symbol sym, std::vector<State>& out) const override {
    auto k = states_.key(q);
    const Substitution& v = m_->variant(sym);
    const State taint = k[2 * nv_];
    std::vector<char> used(nv_, 0);
    for (const auto& img : v.images)
      for (int tok : img)
        if (is_var(tok)) used[tok] = 1;
    for (int y = 0; y < nv_; ++y)
      if (!used[y] && ((taint >> y) & 1)) return;
    std::vector<std::vector<std::pair<int, int>>> opts(nv_);
    State taint2 = 0;
    std::vector<State> cur, nxt;
    const State empty = static_cast<State>(q_);
    for (int x = 0; x < nv_; ++x) {
      const auto& img = v.images[x];
      bool still_empty = true;
      for (int tok : img) {
        if (is_var(tok) ? ((taint >> tok) & 1) : wbits(token_letter(tok)) != 0)
          taint2 |= State{1} << x;
        still_empty &= is_var(tok) && k[2 * tok] == empty;
      }
      if (still_empty) {
        opts[x].emplace_back(q_, q_);
        continue;
      }
      for (int a = 0; a < q_; ++a) {
        cur.assign(1, static_cast<State>(a));
        for (int tok : img) {
          nxt.clear();
          if (is_var(tok) && k[2 * tok] == empty) {
            nxt = cur;
          } else if (is_var(tok)) {
            if (std::find(cur.begin(), cur.end(), k[2 * tok]) != cur.end())
              nxt.push_back(k[2 * tok + 1]);
          } else {
            for (State s : cur) p_.successors(s, token_letter(tok), nxt);
            std::sort(nxt.begin(), nxt.end());
            nxt.erase(std::unique(nxt.begin(), nxt.end()), nxt.end());
          }
          cur.swap(nxt);
          if (cur.empty()) break;
        }
        for (State b : cur) opts[x].emplace_back(a, static_cast<int>(b));
      }
      if (opts[x].empty()) return;
    }
    std::vector<std::size_t> pick(nv_, 0);
    std::vector<State> n(2 * nv_ + 1);
    n[2 * nv_] = taint2;
    while (true) {
      for (int x = 0; x < nv_; ++x) {
        n[2 * x] = opts[x][pick[x]].first;
        n[2 * x + 1] = opts[x][pick[x]].second;
      }
      out.push_back(states_.intern(n));
      int x = 0;
      while (x < nv_ && ++pick[x] == opts[x].size()) pick[x++] = 0;
      if (x == nv_) break;
    }
  }

  bool accepting(State q) const override {
    auto k = states_.key(q);
    if ((k[2 * nv_] & ~(State{1} << out_)) != 0) return false;
    if (k[2 * out_] == static_cast<State>(q_)) {
      for (int i : init_)
        if (p_.accepting(i)) return true;
      return false;
    }
    bool init = std::find(init_.begin(), init_.end(), static_cast<int>(k[2 * out_])) != init_.end();
    return init && p_.accepting(k[2 * out_ + 1]);
  }

  std::string describe(State q) const override {
    auto k = states_.key(q);
    std::ostringstream o;
    for (int x = 0; x < nv_; ++x) {
      o << (x ? " " : "");
      if (k[2 * x] == static_cast<State>(q_))
        o << "ε";
      else
        o << k[2 * x] << "->" << k[2 * x + 1];
    }
    if (k[2 * nv_]) o << " t" << k[2 * nv_];
    return o.str();
  }

 private:
  std::shared_ptr<const MarkedSubstAlphabet> m_;
  int out_, nv_, q_;
  ExplicitNfa p_;
  std::vector<int> init_;
  Interner<std::vector<State>, StateVecHash> states_;
};

// Running difference of labelled letters per step, saturating at ±alpha.
class DiffCounter : public Nfa {
 public:
  DiffCounter(std::shared_ptr<const MarkedSubstAlphabet> lab, int alpha, MdKind kind)
      : lab_(std::move(lab)), alpha_(alpha), kind_(kind) {
    for (int i = 0; i < lab_->size(); ++i) {
      int n = 0;
      for (const auto& img : lab_->variant(i).images)
        for (int tok : img)
          if (!is_var(tok) && (wbits(token_letter(tok)) & 2)) ++n;
      counts_.push_back(n);
    }
  }
  int num_symbols() const override { return lab_->size() * lab_->size(); }
  std::vector<State> initial() const override { return {static_cast<State>(alpha_)}; }
  void successors(State q, Symbol sym, std::vector<State>& out) const override {
    const State ovf = 2 * alpha_ + 1;
    if (q == ovf) {
      out.push_back(ovf);
      return;
    }
    const int n = lab_->size();
    int v = static_cast<int>(q) - alpha_ + counts_[sym / n] - counts_[sym % n];
    if (v > alpha_ || v < -alpha_) {
      if (kind_ == MdKind::kGt) out.push_back(ovf);
      return;
    }
    out.push_back(static_cast<State>(v + alpha_));
  }
  bool accepting(State q) const override {
    const State ovf = 2 * alpha_ + 1;
    switch (kind_) {
      case MdKind::kGt:
        return q == ovf;
      case MdKind::kLe:
        return q != ovf;
      case MdKind::kLeEq:
        return q == static_cast<State>(alpha_);
      case MdKind::kLeNeq:
        return q != ovf && q != static_cast<State>(alpha_);
    }
    return false;
  }
  std::string describe(State q) const override {
    return q == static_cast<State>(2 * alpha_ + 1) ? "ovf" : std::to_string(int(q) - alpha_);
  }

 private:
  std::shared_ptr<const MarkedSubstAlphabet> lab_;
  int alpha_;
  MdKind kind_;
  std::vector<int> counts_;
};

NfaPtr intersect_all(std::vector<NfaPtr> parts) {
  NfaPtr r = parts.at(0);
  for (std::size_t i = 1; i < parts.size(); ++i)
    r = product(r, parts[i], ProductMode::kIntersection);
  return r;
}

NfaPtr unite_all(std::vector<NfaPtr> parts) {
  NfaPtr r = parts.at(0);
  for (std::size_t i = 1; i < parts.size(); ++i) r = product(r, parts[i], ProductMode::kUnion);
  return r;
}

// Index in `to` of the variant of `from` after rewriting its bits.
template <class F>
std::vector<Symbol> project(const MarkedSubstAlphabet& from, const MarkedSubstAlphabet& to, F f) {
  std::vector<Symbol> h(from.size());
  for (int i = 0; i < from.size(); ++i) {
    h[i] = to.find(map_bits(from.variant(i), f));
    if (h[i] < 0) throw StructuralError("annotation projection leaves the target alphabet");
  }
  return h;
}

std::vector<Symbol> pair_morphism(const std::vector<Symbol>& h, int target) {
  const int n = static_cast<int>(h.size());
  std::vector<Symbol> r(n * n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) r[a * n + b] = h[a] * target + h[b];
  return r;
}

}  // namespace

NfaPtr cut_marking_nfa(int nletters, int ell, int max_ell) {
  if (ell < 1) throw DomainError("cut_marking_nfa: ell must be at least 1");
  if (ell > max_ell) throw ResourceError("cut_marking_nfa", static_cast<std::size_t>(max_ell));
  return std::make_shared<CutMarking>(nletters, ell);
}

NfaPtr word_predicate(WordPredKind kind, int nletters, int ell, int letter, int d) {
  return std::make_shared<WordPredicate>(kind, nletters, ell, letter, d);
}

NfaPtr inverse_sst(std::shared_ptr<const MarkedSubstAlphabet> m, int out_var, const Nfa& p,
                   std::size_t budget) {
  for (const auto& v : m->base())
    for (const auto& img : v.images)
      for (int tok : img)
        if (!is_var(tok) && wsym(token_letter(tok), kAnnot - 1) >= p.num_symbols())
          throw StructuralError("inverse_sst: letters outside the predicate's alphabet");
  return std::make_shared<InverseSst>(std::move(m), out_var, materialize(p, budget));
}

ReferencePipeline::ReferencePipeline(std::vector<Substitution> s, int nletters, int out_var,
                                     int ell)
    : nletters_(nletters), out_(out_var), ell_(ell) {
  using K = MarkedSubstAlphabet::Kind;
  plain_ = std::make_shared<MarkedSubstAlphabet>(s, K::kPlain);
  m1_ = std::make_shared<MarkedSubstAlphabet>(s, K::kMarked1);
  m2_ = std::make_shared<MarkedSubstAlphabet>(s, K::kMarked2);
  lab_ = std::make_shared<MarkedSubstAlphabet>(std::move(s), K::kLabelled);
}

NfaPtr ReferencePipeline::cut_predicate() const {
  return inverse_sst(m1_, out_, *word_predicate(WordPredKind::kCut, nletters_, ell_));
}

NfaPtr ReferencePipeline::nextcut_predicate(bool from_zero) const {
  NfaPtr w = word_predicate(WordPredKind::kNextCut, nletters_, ell_);
  if (from_zero) w = left_quotient(w, wsym(nletters_, 1));
  return inverse_sst(m2_, out_, *w);
}

NfaPtr ReferencePipeline::md_predicate(int alpha, MdKind kind) const {
  if (alpha < 0) throw DomainError("md_predicate: alpha must be non-negative");
  const int nl = lab_->size();
  NfaPtr side = inverse_sst(lab_, out_, *word_predicate(WordPredKind::kLabel, nletters_, ell_));
  std::vector<Symbol> hl(nl * nl), hr(nl * nl);
  for (int a = 0; a < nl; ++a)
    for (int b = 0; b < nl; ++b) {
      hl[a * nl + b] = a;
      hr[a * nl + b] = b;
    }
  NfaPtr labelled = intersect_all({relabel_preimage(side, hl), relabel_preimage(side, hr),
                                   std::make_shared<DiffCounter>(lab_, alpha, kind)});
  auto h = project(*lab_, *m1_, [](int bits) { return bits & 1; });
  return relabel_image(labelled, pair_morphism(h, m1_->size()), m1_->size() * m1_->size());
}

NfaPtr ReferencePipeline::left(NfaPtr side) const {
  const int n = m2_->size();
  std::vector<Symbol> h(n * n);
  for (int a = 0; a < n * n; ++a) h[a] = a / n;
  return relabel_preimage(std::move(side), std::move(h));
}

NfaPtr ReferencePipeline::right(NfaPtr side) const {
  const int n = m2_->size();
  std::vector<Symbol> h(n * n);
  for (int a = 0; a < n * n; ++a) h[a] = a % n;
  return relabel_preimage(std::move(side), std::move(h));
}

NfaPtr ReferencePipeline::lift_side_mark(NfaPtr side1, int mark) const {
  auto h = project(*m2_, *m1_, [mark](int bits) { return (bits >> (mark - 1)) & 1; });
  return relabel_preimage(std::move(side1), std::move(h));
}

NfaPtr ReferencePipeline::lift_mark(NfaPtr pair1, int mark) const {
  auto h = project(*m2_, *m1_, [mark](int bits) { return (bits >> (mark - 1)) & 1; });
  const int n = m2_->size(), t = m1_->size();
  std::vector<Symbol> hp(n * n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) hp[a * n + b] = h[a] * t + h[b];
  return relabel_preimage(std::move(pair1), std::move(hp));
}

NfaPtr ReferencePipeline::mism_predicate(bool from_zero) const {
  std::vector<NfaPtr> parts;
  for (int d = from_zero ? 1 : 0; d <= ell_ * ell_; ++d) {
    std::vector<NfaPtr> side(nletters_);
    for (int x = 0; x < nletters_; ++x) {
      NfaPtr w = word_predicate(WordPredKind::kMism, nletters_, ell_, x, d);
      if (from_zero) w = left_quotient(w, wsym(nletters_, 1));
      side[x] = inverse_sst(m2_, out_, *w);
    }
    for (int x = 0; x < nletters_; ++x)
      for (int y = 0; y < nletters_; ++y)
        if (x != y) parts.push_back(product(left(side[x]), right(side[y]), ProductMode::kIntersection));
  }
  return unite_all(std::move(parts));
}

namespace {

std::shared_ptr<CharacterizationAtoms> make_atoms(const ResyncParams& p) {
  p.validate();
  auto at = std::make_shared<CharacterizationAtoms>();
  const int nl = p.letters() + 1;  // with ⊣
  std::vector<Substitution> sp;
  for (const auto& s : p.s) sp.push_back(s);
  for (const auto& s : p.s) sp.push_back(endmark(s, p.out_var, p.letters()));
  at->ns = static_cast<int>(sp.size());
  at->r = std::make_unique<ReferencePipeline>(sp, nl, p.out_var, p.ell);
  auto& r = *at->r;
  at->cut1 = r.lift_side_mark(r.cut_predicate(), 1);
  at->nc = r.nextcut_predicate(false);
  at->znc = r.nextcut_predicate(true);
  at->md_eq1 = r.lift_mark(r.md_predicate(p.k, MdKind::kLeEq), 1);
  at->md_gt2 = r.lift_mark(r.md_predicate(p.k, MdKind::kGt), 2);
  at->md_neq2 = r.lift_mark(r.md_predicate(p.k, MdKind::kLeNeq), 2);
  at->mism = r.mism_predicate(false);
  at->zmism = r.mism_predicate(true);
  NfaPtr te = inverse_sst(std::make_shared<MarkedSubstAlphabet>(r.plain()), p.out_var,
                          *word_predicate(WordPredKind::kEndmarked, nl, p.ell));
  std::vector<Symbol> to_plain(at->ns);
  for (int b = 0; b < at->ns; ++b) to_plain[b] = r.plain().plain(b);
  at->te = relabel_preimage(te, to_plain);
  return at;
}

NfaPtr assemble(const CharacterizationAtoms& at) {
  const auto& r = *at.r;
  NfaPtr c1 = intersect_all({r.left(at.cut1), r.right(at.cut1), at.md_eq1});
  NfaPtr c2 = intersect_all({r.left(at.nc), r.right(at.nc)});
  NfaPtr z1 = intersect_all({r.left(at.znc), r.right(at.znc)});
  NfaPtr u = unite_all({intersect_all({c1, c2, at.md_gt2}), intersect_all({c1, c2, at.md_neq2}),
                        intersect_all({c1, at.mism}), intersect_all({z1, at.md_gt2}),
                        intersect_all({z1, at.md_neq2}), at.zmism});
  const int n2 = r.marked2().size();
  const int ns = at.ns;
  std::vector<Symbol> pi(n2 * n2);
  for (int a = 0; a < n2; ++a)
    for (int b = 0; b < n2; ++b)
      pi[a * n2 + b] = r.marked2().base_of(a) * ns + r.marked2().base_of(b);
  NfaPtr img = relabel_image(u, std::move(pi), ns * ns);
  std::vector<Symbol> hl(ns * ns), hr(ns * ns);
  for (int a = 0; a < ns; ++a)
    for (int b = 0; b < ns; ++b) {
      hl[a * ns + b] = a;
      hr[a * ns + b] = b;
    }
  return intersect_all({img, relabel_preimage(at.te, hl), relabel_preimage(at.te, hr)});
}

// Every 2-marking of a sequence over S' as 2-marked variant indices; each
// mark is on one letter occurrence or absent.
std::vector<std::vector<int>> all_markings(const MarkedSubstAlphabet& m2,
                                           const std::vector<Substitution>& base,
                                           const std::vector<int>& seq) {
  std::vector<std::array<int, 3>> occ;  // time, image, token
  for (int t = 0; t < static_cast<int>(seq.size()); ++t) {
    const auto& s = base[seq[t]];
    for (int x = 0; x < s.num_vars(); ++x)
      for (int p = 0; p < static_cast<int>(s.images[x].size()); ++p)
        if (!is_var(s.images[x][p])) occ.push_back({t, x, p});
  }
  std::vector<std::vector<int>> out;
  const int n = static_cast<int>(occ.size());
  for (int o1 = -1; o1 < n; ++o1)
    for (int o2 = -1; o2 < n; ++o2) {
      std::vector<int> marked;
      for (int t = 0; t < static_cast<int>(seq.size()); ++t) {
        Substitution v = base[seq[t]];
        for (auto& img : v.images)
          for (auto& tok : img)
            if (!is_var(tok)) tok = letter_token(wsym(token_letter(tok), 0));
        for (int k = 0; k < 2; ++k) {
          int o = k == 0 ? o1 : o2;
          if (o < 0 || occ[o][0] != t) continue;
          auto& tok = v.images[occ[o][1]][occ[o][2]];
          int sym = token_letter(tok);
          tok = letter_token(wsym(wletter(sym), wbits(sym) | (1 << k)));
        }
        int id = m2.find(v);
        if (id < 0) throw StructuralError("marking outside the 2-marked alphabet");
        marked.push_back(id);
      }
      out.push_back(std::move(marked));
    }
  return out;
}

}  // namespace

NfaPtr characterization_nfa(const ResyncParams& p) { return assemble(*make_atoms(p)); }

ReferenceResync::ReferenceResync(const ResyncParams& p) : p_(p), atoms_(make_atoms(p)) {
  nfa_ = assemble(*atoms_);
}

ReferenceResync::~ReferenceResync() = default;

std::vector<int> ReferenceResync::endmarked_indices(const SubstSeq& l) const {
  const int ns = static_cast<int>(p_.s.size());
  std::vector<int> seq;
  for (std::size_t t = 0; t < l.size(); ++t) {
    auto it = std::find(p_.s.begin(), p_.s.end(), l[t]);
    if (it == p_.s.end()) throw DomainError("substitution outside the resynchronizer's set");
    int i = static_cast<int>(it - p_.s.begin());
    seq.push_back(t + 1 == l.size() ? i + ns : i);
  }
  return seq;
}

bool ReferenceResync::contains(const SubstSeq& l, const SubstSeq& m) const {
  if (l.size() != m.size()) return false;
  if (l.empty()) return true;
  return witnesses(l, m).empty();
}

std::vector<MarkedPair> ReferenceResync::witnesses(const SubstSeq& l, const SubstSeq& m,
                                                   std::size_t limit) const {
  const auto& at = *atoms_;
  const auto& m2 = at.r->marked2();
  auto la = endmarked_indices(l), ma = endmarked_indices(m);
  std::vector<MarkedPair> found;
  if (la.size() != ma.size() || la.empty()) return found;
  if (!accepts(*at.te, la) || !accepts(*at.te, ma)) return found;
  const auto& base = at.r->marked2().base();
  auto ml = all_markings(m2, base, la), mm = all_markings(m2, base, ma);
  struct Side {
    bool cut1, nc, znc;
  };
  auto side = [&](const std::vector<int>& w) {
    return Side{accepts(*at.cut1, w), accepts(*at.nc, w), accepts(*at.znc, w)};
  };
  std::vector<Side> sl, sm;
  for (const auto& w : ml) sl.push_back(side(w));
  for (const auto& w : mm) sm.push_back(side(w));
  const int n2 = m2.size();
  for (std::size_t i = 0; i < ml.size(); ++i)
    for (std::size_t j = 0; j < mm.size(); ++j) {
      SymWord pw;
      for (std::size_t t = 0; t < la.size(); ++t) pw.push_back(ml[i][t] * n2 + mm[j][t]);
      auto pair = [&](const NfaPtr& a) { return accepts(*a, pw); };
      bool c1 = sl[i].cut1 && sm[j].cut1 && pair(at.md_eq1);
      bool c2 = sl[i].nc && sm[j].nc;
      bool z1 = sl[i].znc && sm[j].znc;
      const char* why = nullptr;
      if (c1 && c2 && pair(at.md_gt2))
        why = "C1C2C3";
      else if (c1 && c2 && pair(at.md_neq2))
        why = "C1C2C4";
      else if (c1 && pair(at.mism))
        why = "C1C5";
      else if (z1 && pair(at.md_gt2))
        why = "Z1Z2";
      else if (z1 && pair(at.md_neq2))
        why = "Z1Z3";
      else if (pair(at.zmism))
        why = "Z4";
      if (!why) continue;
      found.push_back({ml[i], mm[j], why});
      if (found.size() >= limit) return found;
    }
  return found;
}

}  // namespace sstdelay
