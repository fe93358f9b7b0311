#include "sstdelay/marked.hpp"

#include "sstdelay/errors.hpp"

namespace sstdelay {

bool is_marking(const Word& w, int arity, bool complete) {
  std::vector<int> seen(arity, 0);
  for (int s : w)
    for (int m = 0; m < arity; ++m)
      if ((wbits(s) >> m) & 1)
        if (++seen[m] > 1) return false;
  if (complete)
    for (int c : seen)
      if (c != 1) return false;
  return true;
}

bool is_labelling(const Word& w) {
  std::size_t p = 0;
  while (p < w.size() && wbits(w[p]) == 2) ++p;
  if (p >= w.size() || wbits(w[p]) != 3) return false;
  for (++p; p < w.size(); ++p)
    if (wbits(w[p]) != 0) return false;
  return true;
}

namespace {

// (image, token index) of every letter occurrence.
std::vector<std::pair<int, int>> occurrences(const Substitution& s) {
  std::vector<std::pair<int, int>> occ;
  for (int x = 0; x < s.num_vars(); ++x)
    for (int p = 0; p < static_cast<int>(s.images[x].size()); ++p)
      if (!is_var(s.images[x][p])) occ.emplace_back(x, p);
  return occ;
}

Substitution annotate(const Substitution& s, const std::vector<std::pair<int, int>>& occ,
                      const std::vector<int>& bits) {
  Substitution r = s;
  for (std::size_t o = 0; o < occ.size(); ++o) {
    auto& tok = r.images[occ[o].first][occ[o].second];
    tok = letter_token(wsym(token_letter(tok), bits[o]));
  }
  return r;
}

}  // namespace

MarkedSubstAlphabet::MarkedSubstAlphabet(std::vector<Substitution> base, Kind kind)
    : kind_(kind), base_(std::move(base)) {
  for (int b = 0; b < static_cast<int>(base_.size()); ++b) {
    const auto& s = base_[b];
    auto occ = occurrences(s);
    const int n = static_cast<int>(occ.size());
    std::vector<std::vector<int>> choices;
    std::vector<int> bits(n, 0);
    switch (kind_) {
      case Kind::kPlain:
        choices.push_back(bits);
        break;
      case Kind::kMarked1:
        choices.push_back(bits);
        for (int o = 0; o < n; ++o) {
          auto c = bits;
          c[o] = 1;
          choices.push_back(c);
        }
        break;
      case Kind::kMarked2:
        for (int o1 = -1; o1 < n; ++o1)
          for (int o2 = -1; o2 < n; ++o2) {
            auto c = bits;
            if (o1 >= 0) c[o1] |= 1;
            if (o2 >= 0) c[o2] |= 2;
            choices.push_back(c);
          }
        break;
      case Kind::kLabelled:
        if (n > 16) throw ResourceError("labelled substitution variants", 1 << 16);
        for (int mask = 0; mask < (1 << n); ++mask)
          for (int mo = -1; mo < n; ++mo) {
            if (mo >= 0 && !((mask >> mo) & 1)) continue;
            auto c = bits;
            for (int o = 0; o < n; ++o) c[o] = ((mask >> o) & 1) ? 2 : 0;
            if (mo >= 0) c[mo] |= 1;
            choices.push_back(c);
          }
        break;
    }
    for (const auto& c : choices) {
      Substitution v = annotate(s, occ, c);
      if (index_.count(v)) continue;
      index_.emplace(v, static_cast<int>(variants_.size()));
      variants_.push_back(std::move(v));
      base_of_.push_back(b);
    }
  }
}

int MarkedSubstAlphabet::find(const Substitution& v) const {
  auto it = index_.find(v);
  return it == index_.end() ? -1 : it->second;
}

int MarkedSubstAlphabet::plain(int b) const {
  return find(annotate(base_.at(b), occurrences(base_[b]),
                       std::vector<int>(occurrences(base_[b]).size(), 0)));
}

Substitution strip_marks(const Substitution& v) {
  return map_bits(v, [](int) { return 0; });
}

namespace {

struct Origin {
  int time;
  int image;
  int token;
};

// Output positions of l traced back to the occurrence producing them.
std::vector<Origin> trace(const SubstSeq& l, int out_var) {
  const int nv = l.empty() ? out_var + 1 : l.front().num_vars();
  std::vector<std::vector<Origin>> cur(nv);
  for (int t = 0; t < static_cast<int>(l.size()); ++t) {
    std::vector<std::vector<Origin>> next(nv);
    for (int x = 0; x < nv; ++x)
      for (int p = 0; p < static_cast<int>(l[t].images[x].size()); ++p) {
        int tok = l[t].images[x][p];
        if (is_var(tok))
          next[x].insert(next[x].end(), cur[tok].begin(), cur[tok].end());
        else
          next[x].push_back({t, x, p});
      }
    cur = std::move(next);
  }
  return cur.at(out_var);
}

std::vector<int> lookup(const MarkedSubstAlphabet& m, const SubstSeq& l,
                        const std::vector<std::vector<std::pair<std::pair<int, int>, int>>>& bits) {
  std::vector<int> seq;
  for (std::size_t t = 0; t < l.size(); ++t) {
    Substitution v = l[t];
    for (auto& img : v.images)
      for (auto& tok : img)
        if (!is_var(tok)) tok = letter_token(wsym(token_letter(tok), 0));
    for (const auto& [pos, b] : bits[t]) {
      auto& tok = v.images[pos.first][pos.second];
      tok = letter_token(wsym(wletter(token_letter(tok)), wbits(token_letter(tok)) | b));
    }
    int id = m.find(v);
    if (id < 0) throw DomainError("annotation not available in this alphabet");
    seq.push_back(id);
  }
  return seq;
}

}  // namespace

std::vector<int> mark_sequence(const MarkedSubstAlphabet& m, const SubstSeq& l, int out_var,
                               const std::vector<int>& positions) {
  auto origins = trace(l, out_var);
  std::vector<std::vector<std::pair<std::pair<int, int>, int>>> bits(l.size());
  for (std::size_t k = 0; k < positions.size(); ++k) {
    int i = positions[k];
    if (i == 0) continue;
    if (i < 0 || i > static_cast<int>(origins.size()))
      throw DomainError("marked position outside the output");
    const auto& o = origins[i - 1];
    bits[o.time].push_back({{o.image, o.token}, 1 << k});
  }
  return lookup(m, l, bits);
}

std::vector<int> label_sequence(const MarkedSubstAlphabet& m, const SubstSeq& l, int out_var,
                                int i) {
  auto origins = trace(l, out_var);
  if (i < 1 || i > static_cast<int>(origins.size()))
    throw DomainError("labelled prefix outside the output");
  std::vector<std::vector<std::pair<std::pair<int, int>, int>>> bits(l.size());
  for (int p = 1; p <= i; ++p) {
    const auto& o = origins[p - 1];
    bits[o.time].push_back({{o.image, o.token}, p == i ? 3 : 2});
  }
  return lookup(m, l, bits);
}

Word marked_output(const MarkedSubstAlphabet& m, const std::vector<int>& seq, int out_var) {
  SubstSeq l;
  for (int i : seq) l.push_back(m.variant(i));
  const int nv = m.base().empty() ? out_var + 1 : m.base().front().num_vars();
  return out_word(l, out_var, nv);
}

}  // namespace sstdelay
