#include "specmpc/controller.hpp"

#include <cmath>
#include <future>
#include <limits>
#include <stdexcept>

namespace specmpc {

void CostWeights::validate() const {
  if (!(lambda1 >= 0.0) || !std::isfinite(lambda1) || !(lambda2 >= 0.0) ||
      !std::isfinite(lambda2)) {
    throw std::invalid_argument("CostWeights: lambdas must be finite and >= 0");
  }
  if (!(dc_weight >= 0.0) || !std::isfinite(dc_weight)) {
    throw std::invalid_argument(
        "CostWeights: dc_weight must be finite and >= 0");
  }
  if (k_max.has_value() && *k_max < 1) {
    throw std::invalid_argument("CostWeights: k_max must be >= 1 when finite");
  }
}

void HorizonConfig::validate() const {
  if (steps < 1 || steps > 8) {
    throw std::invalid_argument("HorizonConfig: steps must be in [1, 8]");
  }
}

double spectral_cost(const SpectrumState& spectrum,
                     const FilterWeights& weights,
                     const ReferenceSpectrum& reference, NormOrder p,
                     double dc_weight) {
  const int nb = weights.bin_count();
  const auto* bins = spectrum.bins.data() + 1;  // bins 1..floor(N/2)
  const auto w = weights.values();
  const double dc2 =
      dc_weight * dc_weight * std::norm(spectrum.bins.front());

  if (reference.is_zero()) {
    // Deviation reduces to the plain weighted magnitude; p = 2 and p = inf
    // can stay on squared magnitudes with a single square root at the end.
    switch (p) {
      case NormOrder::one: {
        double acc = std::sqrt(dc2);
        for (int i = 0; i < nb; ++i) {
          acc += w[static_cast<std::size_t>(i)] * std::sqrt(std::norm(bins[i]));
        }
        return acc;
      }
      case NormOrder::two: {
        double acc = dc2;
        for (int i = 0; i < nb; ++i) {
          const double wi = w[static_cast<std::size_t>(i)];
          acc += wi * wi * std::norm(bins[i]);
        }
        return std::sqrt(acc);
      }
      case NormOrder::inf: {
        double peak = dc2;
        for (int i = 0; i < nb; ++i) {
          const double wi = w[static_cast<std::size_t>(i)];
          const double t2 = wi * wi * std::norm(bins[i]);
          if (t2 > peak) peak = t2;
        }
        return std::sqrt(peak);
      }
    }
  }

  const auto t = reference.values();
  double acc = 0.0;
  double peak = dc2;
  if (p == NormOrder::one) acc = std::sqrt(dc2);
  if (p == NormOrder::two) acc = dc2;
  for (int i = 0; i < nb; ++i) {
    const double mag = std::sqrt(std::norm(bins[i]));
    const double dev = mag - t[static_cast<std::size_t>(i)];
    const double term =
        dev > 0.0 ? w[static_cast<std::size_t>(i)] * dev : 0.0;
    switch (p) {
      case NormOrder::one:
        acc += term;
        break;
      case NormOrder::two:
        acc += term * term;
        break;
      case NormOrder::inf:
        if (term * term > peak) peak = term * term;
        break;
    }
  }
  switch (p) {
    case NormOrder::one:
      return acc;
    case NormOrder::two:
      return std::sqrt(acc);
    case NormOrder::inf:
      return std::sqrt(peak);
  }
  return 0.0;
}

int switching_cost(const SwitchingWindow& window,
                   std::span<const int> candidate_path) {
  if (candidate_path.empty()) {
    throw std::invalid_argument("switching_cost: path must not be empty");
  }
  int count = window.transition_count();
  int prev = window.newest_raw();
  const int m = static_cast<int>(candidate_path.size());
  for (int d = 0; d < m; ++d) {
    count -= window.raw_at(d) != window.raw_at(d + 1);
    count += prev != candidate_path[static_cast<std::size_t>(d)];
    prev = candidate_path[static_cast<std::size_t>(d)];
  }
  return count;
}

bool ripple_feasible(int consecutive_hold, std::span<const int> candidate_path,
                     int last_output, std::optional<std::int32_t> k_max) {
  if (!k_max.has_value()) return true;
  int hold = consecutive_hold;
  int prev = last_output;
  for (int bit : candidate_path) {
    if (bit == prev) {
      if (++hold >= *k_max) return false;
    } else {
      hold = 0;
    }
    prev = bit;
  }
  return true;
}

bool CandidateEvaluator::PathScore::better_than(const PathScore& other) const {
  if (!other.valid) return valid;
  if (!valid) return false;
  if (!costs_tie(cost, other.cost)) return cost < other.cost;
  if (tie_rank != other.tie_rank) return tie_rank < other.tie_rank;
  return path < other.path;
}

CandidateEvaluator::CandidateEvaluator(const EngineConfig& cfg)
    : shift_(cfg.window_samples), window_samples_(cfg.window_samples) {
  const int max_depth = 9;  // horizon cap + root
  main_.stack.resize(max_depth);
  aux_.stack.resize(max_depth);
  for (int i = 0; i < max_depth; ++i) {
    main_.stack[static_cast<std::size_t>(i)].spectrum =
        SpectrumState(window_samples_);
    aux_.stack[static_cast<std::size_t>(i)].spectrum =
        SpectrumState(window_samples_);
  }
}

void CandidateEvaluator::descend(SubtreeContext& ctx,
                                 const ControllerState& state,
                                 const FilterWeights& weights,
                                 const ReferenceSpectrum& reference,
                                 const CostWeights& cw, int horizon,
                                 double duty_ref, int depth, int prev_raw,
                                 int hold, int transitions,
                                 std::uint32_t bits) {
  if (depth == horizon) {
    PathScore score;
    score.cost = cw.lambda1 * spectral_cost(
                                  ctx.stack[static_cast<std::size_t>(depth)]
                                      .spectrum,
                                  weights, reference, cw.norm, cw.dc_weight) +
                 cw.lambda2 * transitions;
    const int first_bit =
        static_cast<int>((bits >> (horizon - 1)) & 1u);
    score.tie_rank = (first_bit == state.last_output ? 0 : 2) + first_bit;
    score.path = bits;
    score.valid = true;
    if (score.better_than(ctx.best)) ctx.best = score;
    return;
  }
  const double oldest = state.window.shifted_at(depth);
  const int seam_expelled =
      state.window.raw_at(depth) != state.window.raw_at(depth + 1);
  for (int bit = 0; bit <= 1; ++bit) {
    int next_hold;
    if (bit == prev_raw) {
      next_hold = hold + 1;
      if (cw.k_max.has_value() && next_hold >= *cw.k_max) continue;
    } else {
      next_hold = 0;
    }
    slide_into(ctx.stack[static_cast<std::size_t>(depth)].spectrum,
               ctx.stack[static_cast<std::size_t>(depth + 1)].spectrum, shift_,
               oldest, shifted_value(bit, duty_ref));
    ++ctx.slides;
    descend(ctx, state, weights, reference, cw, horizon, duty_ref, depth + 1,
            bit, next_hold, transitions - seam_expelled + (bit != prev_raw),
            (bits << 1) | static_cast<std::uint32_t>(bit));
  }
}

int CandidateEvaluator::choose(const ControllerState& state,
                               const FilterWeights& weights,
                               const ReferenceSpectrum& reference,
                               const CostWeights& cw, HorizonConfig horizon,
                               double duty_ref) {
  horizon.validate();
  cw.validate();
  if (weights.bin_count() != window_samples_ / 2) {
    throw std::invalid_argument("choose: filter size does not match window");
  }
  if (reference.bin_count() != weights.bin_count()) {
    throw std::invalid_argument("choose: reference size does not match filter");
  }

  const int m = horizon.steps;
  main_.best = PathScore{};
  main_.slides = 0;
  main_.stack[0].spectrum = state.spectrum;

  if (parallel_ && m >= 2) {
    aux_.best = PathScore{};
    aux_.slides = 0;
    aux_.stack[0].spectrum = state.spectrum;
    // subtree of first bit 0 on the async thread, first bit 1 here
    auto task = std::async(std::launch::async, [&]() {
      SubtreeContext& ctx = aux_;
      const int bit = 0;
      int hold;
      bool feasible = true;
      if (bit == state.last_output) {
        hold = state.consecutive_hold + 1;
        feasible = !(cw.k_max.has_value() && hold >= *cw.k_max);
      } else {
        hold = 0;
      }
      if (!feasible) return;
      slide_into(ctx.stack[0].spectrum, ctx.stack[1].spectrum, shift_,
                 state.window.shifted_at(0), shifted_value(bit, duty_ref));
      ++ctx.slides;
      const int seam = state.window.raw_at(0) != state.window.raw_at(1);
      descend(ctx, state, weights, reference, cw, m, duty_ref, 1, bit, hold,
              state.window.transition_count() - seam +
                  (bit != state.last_output),
              static_cast<std::uint32_t>(bit));
    });
    {
      SubtreeContext& ctx = main_;
      const int bit = 1;
      int hold;
      bool feasible = true;
      if (bit == state.last_output) {
        hold = state.consecutive_hold + 1;
        feasible = !(cw.k_max.has_value() && hold >= *cw.k_max);
      } else {
        hold = 0;
      }
      if (feasible) {
        slide_into(ctx.stack[0].spectrum, ctx.stack[1].spectrum, shift_,
                   state.window.shifted_at(0), shifted_value(bit, duty_ref));
        ++ctx.slides;
        const int seam = state.window.raw_at(0) != state.window.raw_at(1);
        descend(ctx, state, weights, reference, cw, m, duty_ref, 1, bit, hold,
                state.window.transition_count() - seam +
                    (bit != state.last_output),
                static_cast<std::uint32_t>(bit));
      }
    }
    task.get();
    slides_ += main_.slides + aux_.slides;
    const PathScore& winner =
        aux_.best.better_than(main_.best) ? aux_.best : main_.best;
    if (!winner.valid) {
      throw std::logic_error("choose: no feasible path (cannot happen)");
    }
    return static_cast<int>((winner.path >> (m - 1)) & 1u);
  }

  descend(main_, state, weights, reference, cw, m, duty_ref, 0,
          state.last_output, state.consecutive_hold,
          state.window.transition_count(), 0u);
  slides_ += main_.slides;
  if (!main_.best.valid) {
    throw std::logic_error("choose: no feasible path (cannot happen)");
  }
  return static_cast<int>((main_.best.path >> (m - 1)) & 1u);
}

Controller::Controller(const EngineConfig& cfg, FilterWeights weights,
                       ReferenceSpectrum reference, CostWeights cost_weights,
                       HorizonConfig horizon)
    : cfg_(cfg),
      weights_(std::move(weights)),
      reference_(std::move(reference)),
      cost_weights_(cost_weights),
      horizon_(horizon),
      evaluator_(cfg),
      state_(cfg) {
  cfg_.validate();
  cost_weights_.validate();
  horizon_.validate();
}

int Controller::step(double duty_ref) {
  const int bit = evaluator_.choose(state_, weights_, reference_,
                                    cost_weights_, horizon_, duty_ref);
  slide(state_.spectrum, evaluator_.shift(), state_.window.oldest_shifted(),
        shifted_value(bit, duty_ref));
  state_.window.push(bit, shifted_value(bit, duty_ref));
  state_.consecutive_hold =
      bit == state_.last_output ? state_.consecutive_hold + 1 : 0;
  state_.last_output = bit;
  if (state_.spectrum.age >= cfg_.resync_interval) {
    state_.spectrum = resync(state_.window, evaluator_.shift());
    ++resyncs_;
  }
  return bit;
}

void Controller::set_filter(FilterWeights weights) {
  if (weights.bin_count() != cfg_.window_samples / 2) {
    throw std::invalid_argument("set_filter: size mismatch");
  }
  weights_ = std::move(weights);
}

void Controller::set_reference(ReferenceSpectrum reference) {
  if (reference.bin_count() != cfg_.window_samples / 2) {
    throw std::invalid_argument("set_reference: size mismatch");
  }
  reference_ = std::move(reference);
}

void Controller::set_cost_weights(const CostWeights& cw) {
  cw.validate();
  cost_weights_ = cw;
}

}  // namespace specmpc
