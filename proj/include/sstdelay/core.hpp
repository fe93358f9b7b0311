#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <vector>

namespace sstdelay {

// Letters are small integers. A word over Σ is a vector of letter indices.
using Word = std::vector<int>;

// Σ plus two reserved symbols that never occur in user input: the
// endmarker (index size()) and the padding symbol (index size() + 1).
class Alphabet {
 public:
  Alphabet() = default;
  explicit Alphabet(std::vector<std::string> letters);

  int size() const { return static_cast<int>(letters_.size()); }
  int endmarker() const { return size(); }
  int padding() const { return size() + 1; }
  // Number of letter codes including the reserved ones.
  int total() const { return size() + 2; }

  const std::vector<std::string>& letters() const { return letters_; }
  std::string name(int c) const;
  std::optional<int> find(std::string_view name) const;

  std::string render(const Word& w) const;

  bool operator==(const Alphabet& o) const { return letters_ == o.letters_; }

 private:
  std::vector<std::string> letters_;
};

class VarSet {
 public:
  VarSet() = default;
  VarSet(std::vector<std::string> names, int output);

  int size() const { return static_cast<int>(names_.size()); }
  int output() const { return output_; }
  const std::string& name(int v) const { return names_.at(v); }
  const std::vector<std::string>& names() const { return names_; }
  std::optional<int> find(std::string_view name) const;

  bool operator==(const VarSet& o) const {
    return names_ == o.names_ && output_ == o.output_;
  }

 private:
  std::vector<std::string> names_;
  int output_ = 0;
};

// Right-hand-side tokens: variables are non-negative, letters are ~c.
inline bool is_var(int tok) { return tok >= 0; }
inline int letter_token(int c) { return -c - 1; }
inline int token_letter(int tok) { return -tok - 1; }

struct Substitution {
  std::vector<std::vector<int>> images;

  Substitution() = default;
  explicit Substitution(std::vector<std::vector<int>> imgs)
      : images(std::move(imgs)) {}

  static Substitution identity(int nvars);
  // σ_ε: every variable is mapped to the empty word.
  static Substitution empty(int nvars);

  int num_vars() const { return static_cast<int>(images.size()); }
  // Number of letter occurrences over all images.
  int letter_count() const;

  bool operator==(const Substitution& o) const { return images == o.images; }
  bool operator!=(const Substitution& o) const { return images != o.images; }
  bool operator<(const Substitution& o) const { return images < o.images; }
};

struct SubstitutionHash {
  std::size_t operator()(const Substitution& s) const;
};

using SubstSeq = std::vector<Substitution>;

struct CopylessViolation {
  int var;       // the repeated variable
  int image;     // image in which the second occurrence was found
  int position;  // 0-based token index inside that image
};

std::optional<CopylessViolation> validate_copyless(const Substitution& s);

// s1 ∘ s2: apply s2 first, then s1.
Substitution compose(const Substitution& s1, const Substitution& s2);

// Variable contents after applying σ_ε then the items of seq in order.
std::vector<Word> contents(const SubstSeq& seq, int nvars);
// One step of the left-to-right evaluation.
std::vector<Word> step_contents(const std::vector<Word>& cur,
                                const Substitution& s);

Word out_word(const SubstSeq& seq, int out_var, int nvars);
// Same value computed by composing the whole sequence first.
Word out_word_by_composition(const SubstSeq& seq, int out_var, int nvars);

std::string render_substitution(const Substitution& s, const VarSet& vars,
                                 const Alphabet& alpha);

struct Transition {
  int from = 0;
  int letter = 0;
  int to = 0;
  Substitution update;
};

struct Sst {
  std::string name;
  Alphabet alphabet;
  VarSet vars;
  std::vector<std::string> states;
  std::vector<int> initial;
  std::vector<int> final_states;
  std::vector<Transition> transitions;
  std::map<int, Substitution> final_output;

  // Copylessness, totality, alphabet closure; throws StructuralError.
  void validate() const;
  bool is_final(int q) const { return final_output.count(q) > 0; }
  std::optional<int> find_state(std::string_view n) const;
};

struct Run {
  std::vector<int> states;
  Word input;
  SubstSeq seq;  // |input| transition updates followed by κ_F(q_n)
};

std::vector<Run> enumerate_runs(const Sst& t, const Word& u);

// An element u ⊗ τ(ρ) of L(T); the last item of seq is the final output.
struct LanguageItem {
  Word input;
  SubstSeq seq;
  bool operator<(const LanguageItem& o) const {
    return std::tie(input, seq) < std::tie(o.input, o.seq);
  }
  bool operator==(const LanguageItem& o) const {
    return input == o.input && seq == o.seq;
  }
};

std::vector<LanguageItem> sst_language(const Sst& t, int max_len);
std::set<std::pair<Word, Word>> relation(const Sst& t, int max_len);

// All words over n letters with length ≤ max_len, shortest first.
std::vector<Word> all_words(int nletters, int max_len);

// Structurally deduplicated set of every update and final output of t.
std::vector<Substitution> substitution_set(const Sst& t);

// Re-expresses several SSTs over one alphabet and one variable set. Output
// variables are identified with the first SST's output; other variables
// are matched by name; updates act as the identity on foreign variables.
std::vector<Sst> unify(const std::vector<Sst>& ssts);

// Renames variables and letters of s; target variables that are not the
// image of any source variable are mapped to themselves.
Substitution remap(const Substitution& s, const std::vector<int>& var_map,
                   const std::vector<int>& letter_map, int target_nvars);

}  // namespace sstdelay
