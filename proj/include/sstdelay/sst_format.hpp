#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>

#include "sstdelay/core.hpp"

namespace sstdelay {

// Line-oriented SST format:
//
//   sst <name>
//   alphabet a b
//   vars X Y
//   output X
//   states q0 q1
//   initial q0
//   final q1
//   trans q0 a q0 : X = X a ; Y = Y
//   finalout q1 : X = X Y ; Y =
//
// '#' starts a comment. Every update assigns every variable exactly once.
Sst parse_sst(std::string_view text);
std::string serialize_sst(const Sst& t);
Sst load_sst(const std::filesystem::path& path);

// Parses "X = X a ; Y = Y" against the given alphabet and variables.
// line is only used for error messages.
Substitution parse_substitution(std::string_view text, const Alphabet& alpha,
                                const VarSet& vars, int line = 0);
std::string format_substitution(const Substitution& s, const VarSet& vars,
                                const Alphabet& alpha);

// A substitution sequence with the alphabet and variables it lives over.
struct SeqFile {
  std::string over;  // SST name, or "inline"
  Alphabet alphabet;
  VarSet vars;
  SubstSeq seq;
};

// Header "seq over <sst-name>" resolves alphabet and variables through
// `resolve`; "seq over inline" expects alphabet/vars/output lines first.
// Remaining lines hold one substitution each.
using SstResolver = std::function<std::optional<Sst>(const std::string&)>;
SeqFile parse_seq(std::string_view text, const SstResolver& resolve = {});
std::string serialize_seq(const SeqFile& f);
// Resolves "seq over NAME" to NAME.sst next to the file.
SeqFile load_seq(const std::filesystem::path& path);

std::string read_file(const std::filesystem::path& path);

}  // namespace sstdelay
