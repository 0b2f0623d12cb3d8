#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "specmpc/sliding_spectrum.hpp"
#include "specmpc/spectral_filter.hpp"

namespace specmpc {

enum class NormOrder { one, two, inf };

/// Knobs of the per-candidate cost: lambda1 scales the weighted spectral
/// deviation, lambda2 the window transition count, and k_max (when set)
/// forces a switching action before any run of identical outputs reaches
/// k_max cycles, which bounds the output voltage ripple.
///
/// dc_weight enters the spectral norm as the weight of bin 0. The DC shift
/// makes the bin-0 target zero, so this term is what holds the pulse
/// density of the switching signal onto the duty reference; without it the
/// cheapest spectrum is simply not switching at all and the output voltage
/// is uncontrolled. Typically set to the filter's lowest-bin weight.
struct CostWeights {
  double lambda1 = 1.0;
  double lambda2 = 0.0;
  NormOrder norm = NormOrder::inf;
  std::optional<std::int32_t> k_max;  ///< nullopt = unlimited
  double dc_weight = 0.0;

  void validate() const;
};

/// Prediction horizon in control steps. Candidate count doubles per step,
/// so the search tree has 2^(steps+1) - 2 nodes.
struct HorizonConfig {
  int steps = 1;

  void validate() const;
  std::uint32_t path_count() const { return 1u << steps; }
};

/// Everything the receding-horizon search reads and the commit updates.
struct ControllerState {
  SwitchingWindow window;
  SpectrumState spectrum;
  int consecutive_hold = 0;  ///< control cycles since the last toggle
  int last_output = 0;

  explicit ControllerState(const EngineConfig& cfg)
      : window(cfg.window_samples), spectrum(cfg.window_samples) {}
};

/// Weighted p-norm of the rectified per-bin deviation
///   t[n] = weights[n] * max(|bins[n]| - targets[n], 0),  n = 1..floor(N/2),
/// plus dc_weight * |bins[0]| folded into the same norm (the DC shift makes
/// zero the right bin-0 target). With dc_weight = 0 bin 0 never contributes.
double spectral_cost(const SpectrumState& spectrum,
                     const FilterWeights& weights,
                     const ReferenceSpectrum& reference, NormOrder p,
                     double dc_weight = 0.0);

/// Transition count of the window as it would read after appending the
/// candidate path (oldest samples expelled). Costs O(path length) thanks to
/// the maintained count.
int switching_cost(const SwitchingWindow& window,
                   std::span<const int> candidate_path);

/// Walks the path from last_output keeping the running no-switch counter;
/// false as soon as the counter would hit k_max without a toggle at that
/// step. Paths that keep toggling are always feasible.
bool ripple_feasible(int consecutive_hold, std::span<const int> candidate_path,
                     int last_output, std::optional<std::int32_t> k_max);

/// Relative tolerance under which two candidate costs count as tied. Binary
/// windows produce exact cost ties (the non-DC energy depends only on the
/// pulse count), and the recursive and direct spectrum routes round those
/// ties in opposite directions; anything inside this band is handed to the
/// deterministic tie-break instead of the noise.
inline constexpr double kCostTieRel = 1e-9;

inline bool costs_tie(double a, double b) {
  return std::abs(a - b) <= kCostTieRel * std::max(std::abs(a), std::abs(b));
}

/// Depth-M binary tree search over all candidate switching paths. Each edge
/// slides a copy of the parent spectrum with the candidate's shifted sample;
/// leaves are scored
///   lambda1 * spectral_cost(end-of-horizon spectrum)
///   + lambda2 * switching_cost(end-of-horizon window)
/// and infeasible paths (ripple bound) are skipped. Ties prefer keeping the
/// present output, then state 0, then the lexicographically first path, so
/// the argmin is a total order and independent of evaluation order.
class CandidateEvaluator {
 public:
  explicit CandidateEvaluator(const EngineConfig& cfg);

  /// Returns the first bit of the argmin path.
  int choose(const ControllerState& state, const FilterWeights& weights,
             const ReferenceSpectrum& reference, const CostWeights& cw,
             HorizonConfig horizon, double duty_ref);

  /// Evaluate the two top-level subtrees on separate threads. Results are
  /// identical to the sequential mode by construction.
  void set_parallel(bool enabled) { parallel_ = enabled; }

  std::uint64_t slide_count() const { return slides_; }
  void reset_slide_count() { slides_ = 0; }

  const ShiftVector& shift() const { return shift_; }

 private:
  struct PathScore {
    double cost = 0.0;
    int tie_rank = 0;        // 0 keeps last_output, 1 toggles; then the bit
    std::uint32_t path = 0;  // MSB-first bits, doubles as lexicographic index
    bool valid = false;

    bool better_than(const PathScore& other) const;
  };

  struct Frame {
    SpectrumState spectrum;
  };

  struct SubtreeContext {
    std::vector<Frame> stack;
    PathScore best;
    std::uint64_t slides = 0;
  };

  void descend(SubtreeContext& ctx, const ControllerState& state,
               const FilterWeights& weights, const ReferenceSpectrum& reference,
               const CostWeights& cw, int horizon, double duty_ref, int depth,
               int prev_raw, int hold, int transitions, std::uint32_t bits);

  ShiftVector shift_;
  int window_samples_;
  SubtreeContext main_;
  SubtreeContext aux_;
  bool parallel_ = false;
  std::uint64_t slides_ = 0;
};

/// Receding-horizon spectral controller: owns the window/spectrum state,
/// asks the evaluator for the next output once per control cycle, commits
/// it, and periodically resynchronizes the recursive spectrum.
class Controller {
 public:
  Controller(const EngineConfig& cfg, FilterWeights weights,
             ReferenceSpectrum reference, CostWeights cost_weights,
             HorizonConfig horizon);

  /// One control cycle; returns the applied switch state.
  int step(double duty_ref);

  const ControllerState& state() const { return state_; }
  const EngineConfig& config() const { return cfg_; }
  CandidateEvaluator& evaluator() { return evaluator_; }

  void set_filter(FilterWeights weights);
  void set_reference(ReferenceSpectrum reference);
  void set_cost_weights(const CostWeights& cw);
  const CostWeights& cost_weights() const { return cost_weights_; }
  const FilterWeights& filter() const { return weights_; }

  std::uint64_t resync_count() const { return resyncs_; }

 private:
  EngineConfig cfg_;
  FilterWeights weights_;
  ReferenceSpectrum reference_;
  CostWeights cost_weights_;
  HorizonConfig horizon_;
  CandidateEvaluator evaluator_;
  ControllerState state_;
  std::uint64_t resyncs_ = 0;
};

}  // namespace specmpc
