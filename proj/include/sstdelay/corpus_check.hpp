#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "sstdelay/automata.hpp"

namespace sstdelay {

enum class CheckStatus { kPass, kFail, kResource };

struct CheckItem {
  int criterion = 0;
  std::string name;
  CheckStatus status = CheckStatus::kPass;
  std::string detail;
  double seconds = 0;
};

struct CheckOptions {
  std::filesystem::path corpus = "corpus";
  bool quick = false;
  std::uint64_t seed = 20240521;
  std::size_t max_states = 300000;
  double time_limit = 60;  // seconds per decision search
  std::vector<int> criteria;  // empty: 1..7
  std::function<void(const CheckItem&)> on_item;  // called as each check finishes
};

// Runs the pinned facts and oracle sweeps against the corpus, grouped by
// acceptance criterion. Exceptions inside a check become kFail items,
// except ResourceError, which becomes kResource.
std::vector<CheckItem> run_checks(const CheckOptions& opt);

const char* status_name(CheckStatus s);

}  // namespace sstdelay
