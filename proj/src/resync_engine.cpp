// Compact characterization engine behind build_resync.
//
// A run guesses a witness branch and, per side, tracks for every variable
// (a) the effect of its content on a WordChecker (a function on checker
// states) and (b) on which side of the marked output positions i and j
// its letters will land. The latter gives the per-step weights, so two
// bounded counters suffice for max-diff_i and max-diff_{j1,j2}.

#include <algorithm>
#include <map>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include "sstdelay/errors.hpp"
#include "sstdelay/resync.hpp"

namespace sstdelay {

namespace {

enum Mark : std::int8_t { kUnseen = 0, kPending = 1, kConfirmed = 2 };

struct FState {
  bool fail = false;
  bool started = false;
  bool factor = true;  // false once the factorization no longer matters
  std::vector<std::int8_t> pre;   // first min(n, ℓ) letters of the open factor
  int n = 0;                      // its length, capped
  std::uint32_t alive = 0;        // periods p (bit p-1) the open factor has
  std::vector<std::int8_t> pend;  // letters after its longest valid prefix
  std::int8_t mi = -1, mj = -1;   // marker offsets inside pend
  std::int8_t ist = kUnseen, jst = kUnseen;
  bool need_j = false;  // the next cut must carry ⟨j⟩
  std::int8_t cnt = -1;  // letters since ⟨i⟩ (M branch)
  std::int8_t rec = -1;
  std::int8_t last = -1;

  std::string key() const {
    if (fail) return "F";
    std::string k;
    k.reserve(24 + pre.size() + pend.size());
    k.push_back(static_cast<char>(started | (factor << 1) | (need_j << 2)));
    k.push_back(static_cast<char>(ist));
    k.push_back(static_cast<char>(jst));
    k.push_back(static_cast<char>(mi));
    k.push_back(static_cast<char>(mj));
    k.push_back(static_cast<char>(cnt));
    k.push_back(static_cast<char>(rec));
    k.push_back(static_cast<char>(last));
    k.push_back(static_cast<char>(n));
    k.push_back(static_cast<char>(alive));
    k.push_back(static_cast<char>(pre.size()));
    for (auto c : pre) k.push_back(static_cast<char>(c));
    k.push_back(static_cast<char>(pend.size()));
    for (auto c : pend) k.push_back(static_cast<char>(c));
    return k;
  }

  std::string label() const {
    if (fail) return "fail";
    std::ostringstream o;
    o << "i" << int(ist) << "j" << int(jst);
    if (factor) {
      o << " f=";
      for (auto c : pre) o << int(c);
      o << "/" << n << " p" << alive << " r=";
      for (auto c : pend) o << int(c);
      if (mi >= 0) o << " mi" << int(mi);
      if (mj >= 0) o << " mj" << int(mj);
    }
    if (need_j) o << " needj";
    if (cnt >= 0) o << " cnt" << int(cnt);
    if (rec >= 0) o << " rec" << int(rec);
    return o.str();
  }
};

class FCore {
 public:
  FCore(int ell, Branch b) : ell_(ell), b_(b) {
    lcm_ = 1;
    for (int p = 1; p <= ell; ++p) lcm_ = std::lcm(lcm_, p);
    all_ = (1u << ell) - 1;
  }

  FState initial(bool zero) const {
    FState f;
    f.alive = all_;
    if (zero) {
      f.ist = kConfirmed;
      f.need_j = b_.x;
      if (!b_.x) f.cnt = 0;
    }
    canonicalize(f);
    return f;
  }

  void letter(FState& f, int x) const {
    if (f.fail) return;
    f.started = true;
    if (!b_.x && b_.d == 0) f.last = static_cast<std::int8_t>(x);
    if (!b_.x && f.cnt >= 0 && f.cnt < b_.d) {
      ++f.cnt;
      if (f.cnt == b_.d) f.rec = static_cast<std::int8_t>(x);
    }
    if (f.factor) core_letter(f, x);
    canonicalize(f);
  }

  void marker(FState& f, bool is_i) const {
    if (f.fail) return;
    if (is_i) {
      if (f.ist != kUnseen || !f.started) return set_fail(f);
      if (!b_.x) {
        if (b_.d == 0) f.rec = f.last;
        f.cnt = 0;
      }
      core_marker(f, true);
    } else {
      if (!b_.x || f.jst != kUnseen || f.ist == kUnseen) return set_fail(f);
      core_marker(f, false);
    }
    canonicalize(f);
  }

  void flush(FState& f) const {
    while (!f.fail && f.factor && f.n > 0) finalize(f);
    canonicalize(f);
  }

  bool accepts(const FState& f) const {
    if (f.fail || f.ist != kConfirmed) return false;
    return b_.x ? f.jst == kConfirmed : f.rec >= 0;
  }

 private:
  static void set_fail(FState& f) { f = FState{}, f.fail = true; }

  int cap(int n) const {
    int bound = ell_ + lcm_;
    return n < bound ? n : bound + (n - ell_) % lcm_;
  }

  // Drops whatever can no longer influence acceptance.
  void canonicalize(FState& f) const {
    if (f.fail) return set_fail(f);
    bool factor_needed = b_.x ? f.jst != kConfirmed : f.ist != kConfirmed;
    if (!factor_needed && f.factor) {
      f.factor = false;
      f.pre.clear();
      f.pend.clear();
      f.n = 0;
      f.alive = 0;
      f.mi = f.mj = -1;
      f.need_j = false;
    }
    if (f.ist != kUnseen) f.started = true;
    if (f.ist != kUnseen || b_.x || b_.d != 0) f.last = -1;
    if (!b_.x && f.rec >= 0) f.cnt = -1;
  }

  void core_marker(FState& f, bool is_i) const {
    auto off = static_cast<std::int8_t>(f.pend.size());
    if (is_i) {
      f.ist = kPending;
      f.mi = off;
    } else {
      f.jst = kPending;
      f.mj = off;
    }
  }

  void core_letter(FState& f, int x) const {
    std::uint32_t alive = 0;
    for (int p = 1; p <= ell_; ++p)
      if ((f.alive >> (p - 1)) & 1u)
        if (f.n < p || x == f.pre[f.n % p]) alive |= 1u << (p - 1);
    if (alive == 0) {
      finalize(f);
      if (!f.fail) core_letter(f, x);
      return;
    }
    if (f.n < ell_) f.pre.push_back(static_cast<std::int8_t>(x));
    int n2 = f.n + 1;
    bool valid = false;
    for (int p = 1; p <= ell_; ++p)
      if (((alive >> (p - 1)) & 1u) && n2 % p == 0) valid = true;
    f.n = cap(n2);
    f.alive = alive;
    if (valid) {
      if (f.mi >= 0 || f.mj >= 0) return set_fail(f);
      f.pend.clear();
    } else {
      f.pend.push_back(static_cast<std::int8_t>(x));
    }
  }

  // Closes the open factor at its longest valid prefix and re-reads the rest.
  void finalize(FState& f) const {
    bool i_here = f.ist == kPending && f.mi == 0;
    bool j_here = f.jst == kPending && f.mj == 0;
    int ri = f.ist == kPending && f.mi > 0 ? f.mi : -1;
    int rj = f.jst == kPending && f.mj > 0 ? f.mj : -1;
    if (i_here && j_here) return set_fail(f);
    if (f.need_j && !j_here) return set_fail(f);
    if (j_here) {
      if (f.ist != kConfirmed) return set_fail(f);
      f.jst = kConfirmed;
      f.need_j = false;
    }
    if (i_here) {
      f.ist = kConfirmed;
      if (b_.x) f.need_j = true;
    }
    auto pend = std::move(f.pend);
    f.pre.clear();
    f.pend.clear();
    f.n = 0;
    f.alive = all_;
    f.mi = f.mj = -1;
    if (ri > 0) f.ist = kUnseen;
    if (rj > 0) f.jst = kUnseen;
    for (int idx = 0; idx < static_cast<int>(pend.size()); ++idx) {
      core_letter(f, pend[idx]);
      if (f.fail) return;
      if (ri == idx + 1) core_marker(f, true);
      if (rj == idx + 1) core_marker(f, false);
    }
  }

  int ell_;
  Branch b_;
  int lcm_;
  std::uint32_t all_;
};

}  // namespace

WordChecker::WordChecker(int nletters, int ell, Branch b) : nletters_(nletters) {
  FCore core(ell, b);
  std::unordered_map<std::string, int> ids;
  std::vector<FState> states;
  auto id_of = [&](const FState& f) {
    auto key = f.key();
    auto it = ids.find(key);
    if (it != ids.end()) return it->second;
    int id = static_cast<int>(states.size());
    if (id >= 65535) throw ResourceError("word checker", 65535);
    ids.emplace(std::move(key), id);
    states.push_back(f);
    return id;
  };
  FState failed;
  failed.fail = true;
  fail_ = id_of(failed);
  init_normal_ = id_of(core.initial(false));
  init_zero_ = id_of(core.initial(true));
  const int nev = nletters + 2;
  for (std::size_t s = 0; s < states.size(); ++s) {
    std::vector<int> row(nev);
    for (int e = 0; e < nev; ++e) {
      FState f = states[s];
      if (e < nletters)
        core.letter(f, e);
      else
        core.marker(f, e == nletters);
      row[e] = id_of(f);
    }
    FState f = states[s];
    core.flush(f);
    int fl = id_of(f);
    next_.push_back(std::move(row));
    flush_.push_back(fl);
  }
  for (const auto& f : states) {
    FState g = f;
    accept_.push_back(core.accepts(g));
    rec_.push_back(g.fail ? -1 : g.rec);
    labels_.push_back(g.label());
  }
  minimize();
}

void WordChecker::minimize() {
  const int n = num_states();
  const int nev = num_events();
  // Moore refinement; the flush acts as one more event.
  std::vector<int> cls(n);
  {
    std::map<std::tuple<bool, int, bool>, int> ids;
    for (int s = 0; s < n; ++s)
      cls[s] = ids.try_emplace({accept_[s] != 0, rec_[s], s == fail_}, ids.size()).first->second;
  }
  std::size_t count = 0;
  for (;;) {
    std::map<std::vector<int>, int> ids;
    std::vector<int> next(n);
    for (int s = 0; s < n; ++s) {
      std::vector<int> sig{cls[s]};
      for (int e = 0; e < nev; ++e) sig.push_back(cls[next_[s][e]]);
      sig.push_back(cls[flush_[s]]);
      next[s] = ids.try_emplace(std::move(sig), ids.size()).first->second;
    }
    cls.swap(next);
    if (ids.size() == count) break;
    count = ids.size();
  }
  const int m = static_cast<int>(count);
  if (m == n) return;
  std::vector<int> rep(m, -1);
  for (int s = 0; s < n; ++s)
    if (rep[cls[s]] < 0) rep[cls[s]] = s;
  std::vector<std::vector<int>> nx(m, std::vector<int>(nev));
  std::vector<int> fl(m), rec(m);
  std::vector<char> acc(m);
  std::vector<std::string> lab(m);
  for (int c = 0; c < m; ++c) {
    int s = rep[c];
    for (int e = 0; e < nev; ++e) nx[c][e] = cls[next_[s][e]];
    fl[c] = cls[flush_[s]];
    acc[c] = accept_[s];
    rec[c] = rec_[s];
    lab[c] = labels_[s];
  }
  next_.swap(nx);
  flush_.swap(fl);
  accept_.swap(acc);
  rec_.swap(rec);
  labels_.swap(lab);
  init_normal_ = cls[init_normal_];
  init_zero_ = cls[init_zero_];
  fail_ = cls[fail_];
}

Substitution endmark(const Substitution& s, int out_var, int nletters) {
  Substitution r = s;
  r.images.at(out_var).push_back(letter_token(nletters));
  return r;
}

// ---------------------------------------------------------------------------

namespace {

enum Cls : std::uint8_t { kE = 0, kL = 1, kN = 2, kM = 3 };

struct VecHash {
  template <class T>
  std::size_t operator()(const std::vector<T>& v) const {
    std::size_t h = v.size();
    for (auto x : v) h ^= std::hash<std::int64_t>()(x) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    return h;
  }
};

class SubsetTable {
 public:
  int intern(std::vector<std::uint64_t> set, std::size_t budget) {
    auto it = ids_.find(set);
    if (it != ids_.end()) return it->second;
    if (sets_.size() >= budget) throw ResourceError("resync subset construction", budget);
    int id = static_cast<int>(sets_.size());
    max_ = std::max(max_, set.size());
    ids_.emplace(set, id);
    sets_.push_back(std::move(set));
    return id;
  }
  const std::vector<std::uint64_t>& get(int id) const { return sets_[id]; }
  std::size_t size() const { return sets_.size(); }
  std::size_t max_size() const { return max_; }

 private:
  std::unordered_map<std::vector<std::uint64_t>, int, VecHash> ids_;
  std::vector<std::vector<std::uint64_t>> sets_;
  std::size_t max_ = 0;
};

struct SideSucc {
  int cfg;
  int ni, nj;
  bool operator==(const SideSucc& o) const { return cfg == o.cfg && ni == o.ni && nj == o.nj; }
  bool operator<(const SideSucc& o) const {
    return std::tie(cfg, ni, nj) < std::tie(o.cfg, o.ni, o.nj);
  }
};

// Accepting continuation of one side after its final substitution.
struct SideFinal {
  int ni, nj, rec;
};

struct Cfg {
  std::vector<int> summ;          // per variable: summary id
  std::vector<std::uint8_t> ci;   // per variable: class w.r.t. i
  std::vector<std::uint8_t> cj;   // per variable: class w.r.t. j
  std::uint8_t flags = 0;         // 1 zero, 2 i placed, 4 j placed

  std::vector<int> key() const {
    std::vector<int> k(summ);
    for (auto c : ci) k.push_back(c);
    for (auto c : cj) k.push_back(c);
    k.push_back(flags);
    return k;
  }
};

}  // namespace

class CharacterizationEngine {
 public:
  CharacterizationEngine(const ResyncParams& p, std::size_t budget)
      : k_(p.k), ell_(p.ell), out_(p.out_var), nvars_(p.num_vars()),
        nletters_(p.letters() + 1), budget_(budget) {
    p.validate();
    if (k_ > 60) throw ResourceError("resync counters (k ≤ 60)", 60);
    if (ell_ > 4) throw ResourceError("resync period bound (ℓ ≤ 4)", 4);
    ns_ = static_cast<int>(p.s.size());
    for (const auto& s : p.s) subst_.push_back(s);
    for (const auto& s : p.s) subst_.push_back(endmark(s, out_, p.letters()));
    out_first_ = true;
    for (const auto& s : p.s)
      for (int x = 0; x < nvars_; ++x)
        for (std::size_t i = 0; i < s.images[x].size(); ++i)
          if (s.images[x][i] == out_ && (x != out_ || i != 0)) out_first_ = false;
    branches_.push_back(std::make_unique<BranchData>(Branch{true, 0}, nletters_, ell_));
    for (int d = 0; d <= ell_ * ell_; ++d)
      branches_.push_back(std::make_unique<BranchData>(Branch{false, d}, nletters_, ell_));
    if (branches_.size() > 63) throw ResourceError("resync branches", 63);
    for (std::uint64_t e : initial()) comps_.push_back(Component{e, {}, {}, {}});
  }

  int num_subst() const { return 2 * ns_; }
  int num_plain() const { return ns_; }

  std::vector<std::uint64_t> initial() {
    std::vector<std::uint64_t> out;
    for (int b = 0; b < static_cast<int>(branches_.size()); ++b)
      for (int zero = 0; zero <= 1; ++zero) {
        auto& B = *branches_[b];
        if (zero && !B.b.x && B.b.d == 0) continue;
        Cfg c;
        c.summ.assign(nvars_, B.id_sum);
        if (out_first_) c.summ[out_] = B.constant(B.w.init(zero));
        c.ci.assign(nvars_, kE);
        c.cj.assign(nvars_, kE);
        c.flags = zero ? 1 : 0;
        int id = intern_cfg(B, c);
        out.push_back(pack(b, id, id, 0, 0));
      }
    std::sort(out.begin(), out.end());
    return out;
  }

  void successors(std::uint64_t e, int si, int ti, std::vector<std::uint64_t>& out) {
    auto [b, ca, cb, ci, cj] = unpack(e);
    auto& B = *branches_[b];
    const auto& la = side_step(B, ca, si);
    if (la.empty()) return;
    const auto& lb = side_step(B, cb, ti);
    for (const auto& x : la)
      for (const auto& y : lb) {
        int ci2 = ci + x.ni - y.ni;
        if (ci2 > k_ || ci2 < -k_) continue;
        int cj2 = kOvf;
        if (cj != kOvf) {
          cj2 = cj + x.nj - y.nj;
          if (cj2 > k_ || cj2 < -k_) cj2 = kOvf;
        }
        out.push_back(pack(b, x.cfg, y.cfg, ci2, cj2));
      }
  }

  bool accepting(std::uint64_t e) {
    auto [b, ca, cb, ci, cj] = unpack(e);
    auto& B = *branches_[b];
    int ra = side_final(B, ca), rb = side_final(B, cb);
    if (ra == kReject || rb == kReject) return false;
    return pair_accepts(B, ci, cj, ra, rb);
  }

  // Some element reaches acceptance by reading (Φ(S[si]), Φ(S[ti])).
  bool any_accepting_after(const std::vector<std::uint64_t>& set, int si, int ti) {
    for (std::uint64_t e : set) {
      auto [b, ca, cb, ci, cj] = unpack(e);
      auto& B = *branches_[b];
      const auto& fa = final_step(B, ca, ns_ + si);
      if (fa.empty()) continue;
      const auto& fb = final_step(B, cb, ns_ + ti);
      for (const auto& x : fa)
        for (const auto& y : fb) {
          int ci2 = ci + x.ni - y.ni;
          if (ci2 != 0) continue;  // the final counter value must be 0 anyway
          int cj2 = kOvf;
          if (cj != kOvf) {
            cj2 = cj + x.nj - y.nj;
            if (cj2 > k_ || cj2 < -k_) cj2 = kOvf;
          }
          if (pair_accepts(B, ci2, cj2, x.rec, y.rec)) return true;
        }
    }
    return false;
  }

  // Runs that start from different initial elements never meet, so the
  // subset construction is done per component (one per initial element).
  int num_components() { return static_cast<int>(comps_.size()); }

  int component_start(int c) { return comps_[c].table.intern({comps_[c].seed}, SIZE_MAX); }

  int component_step(int c, int sub, int si, int ti) {
    auto& C = comps_[c];
    const std::uint64_t key = memo_key(sub, si, ti);
    auto it = C.step.find(key);
    if (it != C.step.end()) return it->second;
    std::vector<std::uint64_t> next;
    for (std::uint64_t e : C.table.get(sub)) successors(e, si, ti, next);
    std::sort(next.begin(), next.end());
    next.erase(std::unique(next.begin(), next.end()), next.end());
    if (total_subsets_ >= budget_) throw ResourceError("resync subset construction", budget_);
    std::size_t before = C.table.size();
    int sub2 = C.table.intern(std::move(next), SIZE_MAX);
    total_subsets_ += C.table.size() - before;
    return C.step.emplace(key, sub2).first->second;
  }

  // si, ti range over plain and endmarked indices.
  std::uint64_t memo_key(int sub, int si, int ti) const {
    const std::uint64_t n = 2 * static_cast<std::uint64_t>(ns_);
    return (static_cast<std::uint64_t>(sub) * n + si) * n + ti;
  }

  // Some element of the subset accepts after the endmarked step.
  bool component_accepts_after(int c, int sub, int si, int ti) {
    auto& C = comps_[c];
    const std::uint64_t key = memo_key(sub, si, ti);
    auto it = C.accept_after.find(key);
    if (it != C.accept_after.end()) return it->second;
    bool r = any_accepting_after(C.table.get(sub), si, ti);
    C.accept_after.emplace(key, r);
    return r;
  }

  std::size_t num_subsets() const { return total_subsets_; }
  std::size_t max_subset() const {
    std::size_t m = 0;
    for (const auto& c : comps_) m = std::max(m, c.table.max_size());
    return m;
  }

  std::string describe(std::uint64_t e) const {
    auto [b, ca, cb, ci, cj] = unpack(e);
    const auto& B = *branches_[b];
    std::ostringstream o;
    o << (B.b.x ? "X" : "M" + std::to_string(B.b.d)) << " cfg(" << ca << "," << cb
      << ") ci=" << ci << " cj=" << (cj == kOvf ? std::string("ovf") : std::to_string(cj));
    return o.str();
  }

  std::size_t num_configs() const {
    std::size_t n = 0;
    for (const auto& B : branches_) n += B->cfgs.size();
    return n;
  }
  std::size_t num_checker_states() const {
    std::size_t n = 0;
    for (const auto& B : branches_) n += B->w.num_states();
    return n;
  }

 private:
  static constexpr int kOvf = 1000;
  static constexpr int kReject = -2;
  static constexpr int kNoLetter = -1;

  struct BranchData {
    BranchData(Branch br, int nletters, int ell) : b(br), w(nletters, ell, br) {
      const int n = w.num_states();
      std::vector<std::uint16_t> id(n);
      for (int s = 0; s < n; ++s) id[s] = static_cast<std::uint16_t>(s);
      id_sum = intern_sum(std::move(id));
      for (int e = 0; e < w.num_events(); ++e) {
        std::vector<std::uint16_t> f(n);
        for (int s = 0; s < n; ++s) f[s] = static_cast<std::uint16_t>(w.next(s, e));
        event_sum.push_back(intern_sum(std::move(f)));
      }
    }

    int intern_sum(std::vector<std::uint16_t> f) {
      auto it = sum_ids.find(f);
      if (it != sum_ids.end()) return it->second;
      int id = static_cast<int>(sums.size());
      bool dead = std::all_of(f.begin(), f.end(), [&](std::uint16_t s) { return s == w.fail(); });
      sum_ids.emplace(f, id);
      sums.push_back(std::move(f));
      all_fail.push_back(dead);
      return id;
    }

    // Function with the single value s.
    int constant(int s) {
      if (const_ids.empty()) const_ids.assign(w.num_states(), -1);
      if (const_ids[s] < 0)
        const_ids[s] = intern_sum(std::vector<std::uint16_t>(w.num_states(), static_cast<std::uint16_t>(s)));
      return const_ids[s];
    }

    // "a then b".
    int then(int a, int c) {
      if (a == id_sum) return c;
      if (c == id_sum) return a;
      std::uint64_t key = (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint32_t>(c);
      auto it = comp.find(key);
      if (it != comp.end()) return it->second;
      const auto& fa = sums[a];
      const auto& fc = sums[c];
      std::vector<std::uint16_t> r(fa.size());
      for (std::size_t s = 0; s < fa.size(); ++s) r[s] = fc[fa[s]];
      int id = intern_sum(std::move(r));
      comp.emplace(key, id);
      return id;
    }

    Branch b;
    WordChecker w;
    int id_sum = 0;
    std::vector<int> event_sum;
    std::vector<int> const_ids;
    std::vector<std::vector<std::uint16_t>> sums;
    std::vector<char> all_fail;
    std::unordered_map<std::vector<std::uint16_t>, int, VecHash> sum_ids;
    std::unordered_map<std::uint64_t, int> comp;
    std::vector<Cfg> cfgs;
    std::unordered_map<std::vector<int>, int, VecHash> cfg_ids;
    std::unordered_map<std::uint64_t, std::vector<SideSucc>> steps;
    std::unordered_map<std::uint64_t, std::vector<SideFinal>> finals;
    std::vector<int> final_memo;  // per cfg; kReject, or recorded letter
  };

  std::uint64_t pack(int b, int ca, int cb, int ci, int cj) const {
    int cjc = cj == kOvf ? 2 * k_ + 1 : cj + k_;
    return (static_cast<std::uint64_t>(b) << 58) | (static_cast<std::uint64_t>(ca) << 36) |
           (static_cast<std::uint64_t>(cb) << 14) |
           (static_cast<std::uint64_t>(ci + k_) << 7) | static_cast<std::uint64_t>(cjc);
  }

  std::tuple<int, int, int, int, int> unpack(std::uint64_t e) const {
    int b = static_cast<int>(e >> 58);
    int ca = static_cast<int>((e >> 36) & ((1u << 22) - 1));
    int cb = static_cast<int>((e >> 14) & ((1u << 22) - 1));
    int ci = static_cast<int>((e >> 7) & 127) - k_;
    int cjc = static_cast<int>(e & 127);
    int cj = cjc == 2 * k_ + 1 ? kOvf : cjc - k_;
    return {b, ca, cb, ci, cj};
  }

  bool pair_accepts(const BranchData& B, int ci, int cj, int ra, int rb) const {
    if (ci != 0) return false;
    if (B.b.x) return cj == kOvf || cj != 0;
    return ra != rb;
  }

  int intern_cfg(BranchData& B, const Cfg& c) {
    auto key = c.key();
    auto it = B.cfg_ids.find(key);
    if (it != B.cfg_ids.end()) return it->second;
    int id = static_cast<int>(B.cfgs.size());
    if (id >= (1 << 22) || num_configs() >= budget_)
      throw ResourceError("resync side configurations", budget_);
    B.cfg_ids.emplace(std::move(key), id);
    B.cfgs.push_back(c);
    B.final_memo.push_back(kReject - 1);
    return id;
  }

  // Result of the end-of-sequence check for one side configuration.
  int side_final(BranchData& B, int cfg) {
    int& memo = B.final_memo[cfg];
    if (memo != kReject - 1) return memo;
    const Cfg& c = B.cfgs[cfg];
    memo = kReject;
    for (int x = 0; x < nvars_; ++x) {
      if (x == out_) continue;
      if (c.ci[x] == kL || c.ci[x] == kM || c.cj[x] == kL || c.cj[x] == kM) return memo;
    }
    int s = B.sums[c.summ[out_]][B.w.init(c.flags & 1)];
    s = B.w.flush(s);
    if (!B.w.accepting(s)) return memo;
    memo = B.b.x ? kNoLetter : B.w.recorded(s);
    return memo;
  }

  const std::vector<SideFinal>& final_step(BranchData& B, int cfg, int sidx) {
    std::uint64_t key = (static_cast<std::uint64_t>(cfg) << 8) | static_cast<std::uint64_t>(sidx);
    auto it = B.finals.find(key);
    if (it != B.finals.end()) return it->second;
    std::vector<SideFinal> out;
    for (const auto& s : side_step(B, cfg, sidx)) {
      int r = side_final(B, s.cfg);
      if (r != kReject) out.push_back({s.ni, s.nj, r});
    }
    return B.finals.emplace(key, std::move(out)).first->second;
  }

  // Outcome of one image in one dimension.
  struct DimOut {
    std::uint8_t cls;
    int counted;
  };

  // Classifies an image w.r.t. one marker. mark_tok is the index of the
  // fresh letter carrying the newly placed marker, or -1. Returns the
  // possible outcomes (empty when inconsistent).
  std::vector<DimOut> classify(const std::vector<int>& img, const std::vector<std::uint8_t>& cls,
                               int mark_tok, bool zero_dim) const {
    int split = -1;
    for (int p = 0; p < static_cast<int>(img.size()); ++p) {
      if (is_var(img[p]) && cls[img[p]] == kM) {
        if (split >= 0) return {};
        split = p;
      }
    }
    if (mark_tok >= 0) {
      if (split >= 0) return {};
      split = mark_tok;
    }
    int letters = 0;
    for (int tok : img) letters += is_var(tok) ? 0 : 1;
    if (split >= 0) {
      int counted = 0;
      for (int p = 0; p < static_cast<int>(img.size()); ++p) {
        int tok = img[p];
        if (p < split) {
          if (is_var(tok)) {
            if (cls[tok] != kE && cls[tok] != kL) return {};
          } else {
            ++counted;
          }
        } else if (p == split) {
          if (!is_var(tok)) ++counted;
        } else if (is_var(tok) && cls[tok] != kE && cls[tok] != kN) {
          return {};
        }
      }
      return {{kM, counted}};
    }
    bool has_l = false, has_n = false;
    for (int tok : img)
      if (is_var(tok)) {
        has_l |= cls[tok] == kL;
        has_n |= cls[tok] == kN;
      }
    if (has_l && has_n) return {};
    if (has_l) return {{kL, letters}};
    if (has_n) return {{kN, 0}};
    if (letters == 0) return {{kE, 0}};
    if (zero_dim) return {{kN, 0}};
    return {{kL, letters}, {kN, 0}};
  }

  const std::vector<SideSucc>& side_step(BranchData& B, int cfg, int sidx) {
    std::uint64_t key = (static_cast<std::uint64_t>(cfg) << 8) | static_cast<std::uint64_t>(sidx);
    auto it = B.steps.find(key);
    if (it != B.steps.end()) return it->second;
    std::vector<SideSucc> out = compute_side_step(B, cfg, sidx);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return B.steps.emplace(key, std::move(out)).first->second;
  }

  std::vector<SideSucc> compute_side_step(BranchData& B, int cfg, int sidx) {
    const Cfg c = B.cfgs[cfg];
    const Substitution& s = subst_[sidx];
    const bool zero = c.flags & 1;
    const bool iplaced = c.flags & 2;
    const bool jplaced = c.flags & 4;
    const bool xb = B.b.x;

    std::vector<std::pair<int, int>> occ;  // (image, token index) of fresh letters
    for (int x = 0; x < nvars_; ++x)
      for (int p = 0; p < static_cast<int>(s.images[x].size()); ++p)
        if (!is_var(s.images[x][p])) occ.emplace_back(x, p);

    std::vector<char> used(nvars_, 0);
    for (const auto& img : s.images)
      for (int tok : img)
        if (is_var(tok)) used[tok] = 1;
    for (int y = 0; y < nvars_; ++y)
      if (!used[y] && (c.ci[y] == kL || c.ci[y] == kM || c.cj[y] == kL || c.cj[y] == kM))
        return {};

    std::vector<int> iopts{-1}, jopts{-1};
    if (!zero && !iplaced)
      for (int o = 0; o < static_cast<int>(occ.size()); ++o) iopts.push_back(o);
    if (xb && !jplaced)
      for (int o = 0; o < static_cast<int>(occ.size()); ++o) jopts.push_back(o);

    std::vector<SideSucc> out;
    for (int io : iopts)
      for (int jo : jopts) {
        if (io >= 0 && io == jo) continue;
        if (io >= 0 && jo >= 0 && occ[io].first == occ[jo].first && occ[jo].second < occ[io].second)
          continue;
        // Per image: summaries and the options for the two dimensions.
        std::vector<int> summ(nvars_);
        std::vector<std::vector<std::pair<DimOut, DimOut>>> opts(nvars_);
        bool dead = false;
        for (int x = 0; x < nvars_ && !dead; ++x) {
          const auto& img = s.images[x];
          int mi = io >= 0 && occ[io].first == x ? occ[io].second : -1;
          int mj = jo >= 0 && occ[jo].first == x ? occ[jo].second : -1;
          int f = B.id_sum;
          for (int p = 0; p < static_cast<int>(img.size()); ++p) {
            int tok = img[p];
            f = B.then(f, is_var(tok) ? c.summ[tok] : B.event_sum[token_letter(tok)]);
            if (p == mi) f = B.then(f, B.event_sum[B.w.mark_i()]);
            if (p == mj) f = B.then(f, B.event_sum[B.w.mark_j()]);
          }
          if (x == out_ && out_first_) f = B.constant(B.sums[f][B.w.init(zero)]);
          summ[x] = f;
          auto oi = classify(img, c.ci, mi, zero);
          std::vector<DimOut> oj{{kE, 0}};
          if (xb) oj = classify(img, c.cj, mj, false);
          if (oi.empty() || oj.empty()) {
            dead = true;
            break;
          }
          bool free_i = oi.size() == 2, free_j = oj.size() == 2;
          for (const auto& a : oi)
            for (const auto& bj : oj) {
              // Positions ≤ i are ≤ j: a fresh block cannot be before i but after j.
              if (free_i && free_j && a.cls == kL && bj.cls == kN) continue;
              opts[x].emplace_back(a, bj);
            }
          if (!xb)
            for (auto& o : opts[x]) o.second = {kE, 0};
          // Content that must reach the output yet can never be accepted.
          if (B.all_fail[f]) {
            bool kept = true;
            for (const auto& a : oi) kept &= a.cls == kM || a.cls == kL;
            bool kept_j = xb;
            for (const auto& bj : oj) kept_j &= bj.cls == kM || bj.cls == kL;
            if (kept || kept_j) dead = true;
          }
        }
        if (dead) continue;
        // Cartesian product over the images' options.
        std::vector<int> pick(nvars_, 0);
        while (true) {
          Cfg n;
          n.summ = summ;
          n.ci.resize(nvars_);
          n.cj.resize(nvars_);
          int ni = 0, nj = 0;
          for (int x = 0; x < nvars_; ++x) {
            const auto& [a, bj] = opts[x][pick[x]];
            n.ci[x] = a.cls;
            n.cj[x] = bj.cls;
            ni += a.counted;
            nj += bj.counted;
          }
          n.flags = static_cast<std::uint8_t>(c.flags | (io >= 0 ? 2 : 0) | (jo >= 0 ? 4 : 0));
          out.push_back({intern_cfg(B, n), ni, nj});
          int x = 0;
          while (x < nvars_ && ++pick[x] == static_cast<int>(opts[x].size())) pick[x++] = 0;
          if (x == nvars_) break;
        }
      }
    return out;
  }

  int k_, ell_, out_, nvars_, nletters_;
  std::size_t budget_;
  // The output variable only ever occurs first in its own image, so its
  // content is always read from the checker's initial state and only the
  // value of its summary there matters.
  bool out_first_ = false;
  int ns_ = 0;
  std::vector<Substitution> subst_;
  std::vector<std::unique_ptr<BranchData>> branches_;
  struct Component {
    std::uint64_t seed;
    SubsetTable table;
    std::unordered_map<std::uint64_t, int> step;
    std::unordered_map<std::uint64_t, bool> accept_after;
  };
  std::vector<Component> comps_;
  std::size_t total_subsets_ = 0;
};

// ---------------------------------------------------------------------------

ResyncAutomaton::ResyncAutomaton(const ResyncParams& p, std::size_t budget)
    : params_(p), budget_(budget), engine_(std::make_unique<CharacterizationEngine>(p, budget)) {
  Node root;
  root.accepting = true;  // (ε, ε) ∈ D
  root.ready = true;
  for (int c = 0; c < engine_->num_components(); ++c)
    root.subs.push_back(engine_->component_start(c));
  canon_.emplace(node_key(root), 0);
  nodes_.push_back(std::move(root));
  alias_.push_back(0);
  start_ = 0;
}

ResyncAutomaton::~ResyncAutomaton() = default;

int ResyncAutomaton::num_symbols() const {
  return static_cast<int>(params_.s.size() * params_.s.size());
}

std::string ResyncAutomaton::node_key(const Node& n) {
  std::string k(reinterpret_cast<const char*>(n.subs.data()), n.subs.size() * sizeof(int));
  k.push_back(n.accepting ? '+' : '-');
  return k;
}

// Computes the subsets of a node created by next() and merges it with an
// equal node if there is one. Caller holds mu_.
int ResyncAutomaton::resolve(int q) const {
  q = alias_[q];
  if (nodes_[q].ready) return q;
  const int ns = static_cast<int>(params_.s.size());
  const int parent = nodes_[q].parent, sym = nodes_[q].sym;
  std::vector<int> subs(engine_->num_components());
  for (int c = 0; c < engine_->num_components(); ++c)
    subs[c] = engine_->component_step(c, nodes_[parent].subs[c], sym / ns, sym % ns);
  Node& n = nodes_[q];
  n.subs = std::move(subs);
  n.ready = true;
  auto [it, fresh] = canon_.try_emplace(node_key(n), q);
  if (!fresh) {
    alias_[q] = it->second;
    n.subs.clear();
    n.subs.shrink_to_fit();
  } else {
    ++ready_states_;
  }
  return alias_[q];
}

int ResyncAutomaton::next(int q, int sym) const {
  std::lock_guard<std::mutex> g(mu_);
  q = resolve(q);
  const int nsym = num_symbols();
  std::uint64_t key = static_cast<std::uint64_t>(q) * nsym + sym;
  auto it = delta_.find(key);
  if (it != delta_.end()) return alias_[it->second];
  const int ns = static_cast<int>(params_.s.size());
  bool outside = false;
  for (int c = 0; c < engine_->num_components() && !outside; ++c)
    outside = engine_->component_accepts_after(c, nodes_[q].subs[c], sym / ns, sym % ns);
  if (nodes_.size() >= budget_ * 64) throw ResourceError("resync automaton states", budget_ * 64);
  Node n;
  n.parent = q;
  n.sym = sym;
  n.accepting = !outside;
  int id = static_cast<int>(nodes_.size());
  nodes_.push_back(std::move(n));
  alias_.push_back(id);
  delta_.emplace(key, id);
  return id;
}

bool ResyncAutomaton::is_accepting(int q) const {
  std::lock_guard<std::mutex> g(mu_);
  return nodes_.at(q).accepting;
}

int ResyncAutomaton::canonical(int q) const {
  std::lock_guard<std::mutex> g(mu_);
  return resolve(q);
}

int ResyncAutomaton::index_of(const Substitution& s) const {
  auto it = std::find(params_.s.begin(), params_.s.end(), s);
  if (it == params_.s.end()) throw DomainError("substitution outside the resynchronizer's set");
  return static_cast<int>(it - params_.s.begin());
}

bool ResyncAutomaton::accepts_pair(const SubstSeq& l, const SubstSeq& m) const {
  if (l.size() != m.size()) return false;
  int q = start_;
  for (std::size_t t = 0; t < l.size(); ++t) q = next(q, symbol(index_of(l[t]), index_of(m[t])));
  return is_accepting(q);
}

Dfa ResyncAutomaton::explore(std::size_t budget) const {
  const int nsym = num_symbols();
  Dfa d(nsym);
  std::unordered_map<int, int> ids;
  std::vector<int> order;
  auto id_of = [&](int q) {
    auto it = ids.find(q);
    if (it != ids.end()) return it->second;
    if (ids.size() >= budget) throw ResourceError("resync exploration", budget);
    int i = d.add_state(is_accepting(q));
    ids.emplace(q, i);
    order.push_back(q);
    return i;
  };
  d.set_start(id_of(start_));
  for (std::size_t idx = 0; idx < order.size(); ++idx) {
    int q = order[idx];
    int from = ids.at(q);
    for (int a = 0; a < nsym; ++a) d.set_next(from, a, id_of(canonical(next(q, a))));
  }
  std::vector<std::string> names;
  for (int a = 0; a < nsym; ++a) names.push_back(symbol_name(a));
  d.set_symbol_names(std::move(names));
  for (int i = 0; i < d.num_states(); ++i) d.set_label(i, describe(order[i]));
  return d;
}

ResyncStats ResyncAutomaton::stats() const {
  std::lock_guard<std::mutex> g(mu_);
  ResyncStats s;
  s.subsets = engine_->num_subsets();
  s.max_subset = engine_->max_subset();
  s.dfa_states = ready_states_;
  s.transitions = delta_.size();
  s.side_configs = engine_->num_configs();
  s.checker_states = engine_->num_checker_states();
  return s;
}

std::string ResyncAutomaton::describe(State q) const {
  std::lock_guard<std::mutex> g(mu_);
  int c = resolve(static_cast<int>(q));
  const auto& n = nodes_[c];
  std::string r = "[";
  for (std::size_t i = 0; i < n.subs.size(); ++i) r += (i ? "," : "") + std::to_string(n.subs[i]);
  return r + (n.accepting ? "]+" : "]-");
}

std::string ResyncAutomaton::symbol_name(Symbol a) const {
  const int ns = static_cast<int>(params_.s.size());
  return "s" + std::to_string(a / ns) + "/s" + std::to_string(a % ns);
}

std::shared_ptr<ResyncAutomaton> build_resync(const ResyncParams& p, std::size_t budget) {
  return std::make_shared<ResyncAutomaton>(p, budget);
}

namespace {

class EngineNfa : public Nfa {
 public:
  EngineNfa(const ResyncParams& p, std::size_t budget)
      : engine_(std::make_unique<CharacterizationEngine>(p, budget)) {}
  int num_symbols() const override { return engine_->num_subst() * engine_->num_subst(); }
  std::vector<State> initial() const override {
    std::lock_guard<std::mutex> g(mu_);
    return engine_->initial();
  }
  void successors(State q, Symbol a, std::vector<State>& out) const override {
    std::lock_guard<std::mutex> g(mu_);
    const int n = engine_->num_subst();
    engine_->successors(q, a / n, a % n, out);
  }
  bool accepting(State q) const override {
    std::lock_guard<std::mutex> g(mu_);
    return engine_->accepting(q);
  }
  std::string describe(State q) const override {
    std::lock_guard<std::mutex> g(mu_);
    return engine_->describe(q);
  }

 private:
  mutable std::mutex mu_;
  std::unique_ptr<CharacterizationEngine> engine_;
};

}  // namespace

NfaPtr characterization_engine_nfa(const ResyncParams& p, std::size_t budget) {
  return std::make_shared<EngineNfa>(p, budget);
}

}  // namespace sstdelay
