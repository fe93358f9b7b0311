// One line per acceptance criterion: "criterion N: PASS|FAIL ...".
// Criteria 1-7 run the corpus checks in process at full size; criterion 8
// drives the command-line tool (its path is the first argument).

#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "sstdelay/corpus_check.hpp"

#ifndef SSTDELAY_CORPUS_DIR
#define SSTDELAY_CORPUS_DIR "corpus"
#endif

namespace fs = std::filesystem;
using namespace sstdelay;

namespace {

// Fixed size of every sweep; the per-item time limits live with the checks
// (1 s per pinned fact, 120 s per decision call, 600 s for the criterion-2
// sweep).
constexpr std::uint64_t kSeed = 20240521;
constexpr std::size_t kMaxStates = 300000;
constexpr double kSearchSeconds = 60;

int run_tool(const std::string& cmd) {
  int rc = std::system((cmd + " > /dev/null 2>&1").c_str());
  if (rc == -1 || !WIFEXITED(rc)) return -1;
  return WEXITSTATUS(rc);
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

// Copies the corpus and replaces one line of one file.
fs::path mutated_corpus(const fs::path& root, const std::string& tag, const std::string& file,
                        const std::string& from, const std::string& to) {
  fs::path dir = root / tag;
  fs::remove_all(dir);
  fs::create_directories(dir);
  for (const auto& e : fs::directory_iterator(SSTDELAY_CORPUS_DIR)) fs::copy(e.path(), dir / e.path().filename());
  std::string text = read_file(dir / file);
  auto at = text.find(from);
  if (at == std::string::npos) throw std::runtime_error(file + ": no line '" + from + "'");
  text.replace(at, from.size(), to);
  std::ofstream(dir / file) << text;
  return dir;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << "usage: acceptance <path to sstdelay>\n";
    return 2;
  }
  const std::string tool = argv[1];
  bool all_pass = true;

  for (int c = 1; c <= 7; ++c) {
    CheckOptions opt;
    opt.corpus = SSTDELAY_CORPUS_DIR;
    opt.seed = kSeed;
    opt.max_states = kMaxStates;
    opt.time_limit = kSearchSeconds;
    opt.criteria = {c};
    auto t0 = std::chrono::steady_clock::now();
    auto items = run_checks(opt);
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::size_t passed = 0;
    for (const auto& it : items) passed += it.status == CheckStatus::kPass;
    bool ok = !items.empty() && passed == items.size();
    all_pass &= ok;
    std::printf("criterion %d: %s (%zu/%zu checks, %.1f s)\n", c, ok ? "PASS" : "FAIL", passed,
                items.size(), secs);
    for (const auto& it : items)
      if (it.status != CheckStatus::kPass)
        std::printf("    %s  %s: %s\n", status_name(it.status), it.name.c_str(), it.detail.c_str());
    std::fflush(stdout);
  }

  // Criterion 8: the clean corpus passes; every single mutation fails.
  {
    auto t0 = std::chrono::steady_clock::now();
    fs::path scratch = fs::temp_directory_path() / ("sstdelay_acceptance_" + std::to_string(::getpid()));
    std::vector<std::string> notes;
    bool ok = true;
    int clean = run_tool(tool + " corpus-check --corpus " + std::string(SSTDELAY_CORPUS_DIR));
    ok &= clean == 0;
    notes.push_back("clean " + std::to_string(clean));

    struct Mutation {
      std::string tag, file, from, to;
    };
    const std::vector<Mutation> mutations{
        {"t4_bridge", "t4.sst", "trans p a q : Y1 = Y1 ; Y2 = Y2", "trans p a q : Y1 = Y1 a ; Y2 = Y2"},
        {"t1_append", "t1.sst", "trans q a q : X = a X", "trans q a q : X = X a"},
        {"rho2_letter", "rho2.seq", "O = O b b ; X = X ; Y = Y\n", "O = O b a ; X = X ; Y = Y\n"},
    };
    try {
      for (const auto& m : mutations) {
        fs::path dir = mutated_corpus(scratch, m.tag, m.file, m.from, m.to);
        int rc = run_tool(tool + " corpus-check --quick --corpus " + dir.string());
        ok &= rc == 1;
        notes.push_back(m.tag + " " + std::to_string(rc));
      }
    } catch (const std::exception& e) {
      ok = false;
      notes.push_back(std::string("setup failed: ") + e.what());
    }
    int injected = run_tool(tool + " corpus-check --quick --inject max-diff --corpus " +
                            std::string(SSTDELAY_CORPUS_DIR));
    ok &= injected == 1;
    notes.push_back("max-diff fault " + std::to_string(injected));
    fs::remove_all(scratch);

    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::string joined;
    for (const auto& n : notes) joined += (joined.empty() ? "" : ", ") + n;
    all_pass &= ok;
    std::printf("criterion 8: %s (exit codes: %s; %.1f s)\n", ok ? "PASS" : "FAIL", joined.c_str(), secs);
  }
  return all_pass ? 0 : 1;
}
