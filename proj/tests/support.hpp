#pragma once

#include <algorithm>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "sstdelay/core.hpp"
#include "sstdelay/sst_format.hpp"

#ifndef SSTDELAY_CORPUS_DIR
#define SSTDELAY_CORPUS_DIR "corpus"
#endif

namespace testing {

using namespace sstdelay;

inline std::filesystem::path corpus(const std::string& file) {
  return std::filesystem::path(SSTDELAY_CORPUS_DIR) / file;
}

inline Sst corpus_sst(const std::string& name) { return load_sst(corpus(name + ".sst")); }

inline Word word(const Alphabet& a, const std::string& s) {
  Word w;
  for (char c : s) w.push_back(*a.find(std::string(1, c)));
  return w;
}

// Random copyless substitution: each variable lands in at most one image,
// with up to max_letters letters sprinkled in.
inline Substitution random_substitution(std::mt19937& rng, int nvars, int nletters,
                                        int max_letters = 2) {
  Substitution s = Substitution::empty(nvars);
  std::vector<int> vars(nvars);
  for (int v = 0; v < nvars; ++v) vars[v] = v;
  std::shuffle(vars.begin(), vars.end(), rng);
  std::uniform_int_distribution<int> target(-1, nvars - 1), letter(0, nletters - 1),
      count(0, max_letters);
  for (int v : vars) {
    int t = target(rng);
    if (t >= 0) s.images[t].push_back(v);
  }
  for (int i = count(rng); i > 0; --i) {
    auto& img = s.images[std::uniform_int_distribution<int>(0, nvars - 1)(rng)];
    img.insert(img.begin() + std::uniform_int_distribution<int>(0, img.size())(rng),
               letter_token(letter(rng)));
  }
  return s;
}

inline SubstSeq random_seq(std::mt19937& rng, const std::vector<Substitution>& s, int n) {
  SubstSeq r;
  for (int i = 0; i < n; ++i)
    r.push_back(s[std::uniform_int_distribution<int>(0, s.size() - 1)(rng)]);
  return r;
}

// All sequences of length n over s.
inline std::vector<SubstSeq> all_seqs(const std::vector<Substitution>& s, int n) {
  std::vector<SubstSeq> r{{}};
  for (int i = 0; i < n; ++i) {
    std::vector<SubstSeq> next;
    for (const auto& p : r)
      for (const auto& x : s) {
        next.push_back(p);
        next.back().push_back(x);
      }
    r.swap(next);
  }
  return r;
}

}  // namespace testing
