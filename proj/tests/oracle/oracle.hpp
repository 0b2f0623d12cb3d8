#pragma once

// Slow, obviously-correct reference implementations for the test suites.
// Nothing here is reachable from scenario runs; the whole point is an
// independent code path to check the fast engine against.

#include <complex>
#include <vector>

#include "specmpc/controller.hpp"
#include "specmpc/plant.hpp"

namespace specmpc::oracle {

/// Textbook O(N^2) DFT, bins 0..floor(N/2), sample 0 = oldest. Evaluates
/// exp(-j*2*pi*n*m/N) term by term; shares no code with the engine.
std::vector<std::complex<double>> direct_dft(
    const std::vector<double>& samples_oldest_first);

std::vector<std::complex<double>> direct_dft(const SwitchingWindow& window);

/// Adjacent-unequal count over a raw state sequence.
int recount_transitions(const std::vector<int>& raw_oldest_first);

/// Exhaustive candidate search: enumerates all 2^M paths in lexicographic
/// order, rebuilds every end-of-horizon window explicitly, recomputes its
/// spectrum with direct_dft and its transitions by recount, and applies the
/// same cost and tie-break rules as the controller.
int brute_force_choice(const ControllerState& state,
                       const FilterWeights& weights,
                       const ReferenceSpectrum& reference,
                       const CostWeights& cw, HorizonConfig horizon,
                       double duty_ref);

/// Classical 4th-order one-step integration of the buck dynamics with
/// dt/substeps increments.
PlantState substep_plant(const PlantState& x, int switch_state,
                         const PlantParams& params, int substeps);

}  // namespace specmpc::oracle
