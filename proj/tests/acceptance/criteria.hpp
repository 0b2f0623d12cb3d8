#pragma once

#include <string>

namespace specmpc::acceptance {

struct CriterionResult {
  bool pass = false;
  std::string detail;
};

// engine/plant properties
CriterionResult criterion_1();   // sliding DFT vs direct DFT
CriterionResult criterion_2();   // controller vs exhaustive enumeration
CriterionResult criterion_10();  // plant discretization vs sub-stepped oracle

// scenario-driven
CriterionResult criterion_3();   // spectral spreading vs PWM
CriterionResult criterion_4();   // 99-101 kHz spectral gap
CriterionResult criterion_5();   // horizon trends M = 1..4
CriterionResult criterion_6();   // lambda2 trade-off
CriterionResult criterion_7();   // k_max hard bound and ripple trade-off
CriterionResult criterion_8();   // load-step regulation with persistent gaps
CriterionResult criterion_9();   // moving gap spectrogram
CriterionResult criterion_11();  // determinism across reruns and threads

}  // namespace specmpc::acceptance
