// Acceptance suite: one quantitative or property check per criterion, each
// printed as a single PASS/FAIL line. Run with no arguments for the full
// suite or with criterion numbers to select.

#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include "criteria.hpp"

namespace {

using specmpc::acceptance::CriterionResult;

struct Entry {
  int number;
  const char* title;
  CriterionResult (*fn)();
};

const Entry kCriteria[] = {
    {1, "sliding-DFT oracle equivalence", specmpc::acceptance::criterion_1},
    {2, "controller oracle equivalence", specmpc::acceptance::criterion_2},
    {3, "spectral spreading vs PWM", specmpc::acceptance::criterion_3},
    {4, "99-101 kHz spectral gap", specmpc::acceptance::criterion_4},
    {5, "horizon trends M=1..4", specmpc::acceptance::criterion_5},
    {6, "lambda2 switching/ripple trade-off", specmpc::acceptance::criterion_6},
    {7, "k_max hard bound and trade-off", specmpc::acceptance::criterion_7},
    {8, "load-step regulation with gaps", specmpc::acceptance::criterion_8},
    {9, "moving spectral gap", specmpc::acceptance::criterion_9},
    {10, "plant integrator correctness", specmpc::acceptance::criterion_10},
    {11, "determinism across reruns/threads", specmpc::acceptance::criterion_11},
};

}  // namespace

int main(int argc, char** argv) {
  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) selected.push_back(std::atoi(argv[i]));

  int failures = 0;
  for (const Entry& entry : kCriteria) {
    if (!selected.empty()) {
      bool wanted = false;
      for (int n : selected) wanted |= n == entry.number;
      if (!wanted) continue;
    }
    CriterionResult result;
    try {
      result = entry.fn();
    } catch (const std::exception& e) {
      result.pass = false;
      result.detail = std::string("exception: ") + e.what();
    }
    std::printf("%s criterion %d: %s (%s)\n", result.pass ? "PASS" : "FAIL",
                entry.number, entry.title, result.detail.c_str());
    std::fflush(stdout);
    failures += result.pass ? 0 : 1;
  }
  return failures == 0 ? 0 : 1;
}
