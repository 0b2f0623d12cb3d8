#include "specmpc/spectral_filter.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace specmpc {

namespace {

bool nonneg_finite(double v) { return std::isfinite(v) && v >= 0.0; }

// Segment joins are compared with a relative slack so that values written
// out to text and read back still line up.
bool close(double a, double b, double scale) {
  return std::abs(a - b) <= 1e-9 * std::max(1.0, std::abs(scale));
}

}  // namespace

FilterWeights::FilterWeights(std::vector<double> bins_one_up)
    : w_(std::move(bins_one_up)) {
  for (double v : w_) {
    if (!nonneg_finite(v)) {
      throw std::invalid_argument(
          "FilterWeights: weights must be finite and >= 0");
    }
  }
}

ReferenceSpectrum::ReferenceSpectrum(std::vector<double> targets_one_up)
    : t_(std::move(targets_one_up)) {
  is_zero_ = true;
  for (double v : t_) {
    if (!nonneg_finite(v)) {
      throw std::invalid_argument(
          "ReferenceSpectrum: targets must be finite and >= 0");
    }
    if (v != 0.0) is_zero_ = false;
  }
}

ReferenceSpectrum ReferenceSpectrum::zero(int bin_count) {
  return ReferenceSpectrum(
      std::vector<double>(static_cast<std::size_t>(bin_count), 0.0));
}

ReferenceSpectrum ReferenceSpectrum::flat(int bin_count, double bin_hz,
                                          double f_start_hz, double level) {
  std::vector<double> t(static_cast<std::size_t>(bin_count), 0.0);
  for (int n = 1; n <= bin_count; ++n) {
    if (n * bin_hz >= f_start_hz) t[static_cast<std::size_t>(n - 1)] = level;
  }
  return ReferenceSpectrum(std::move(t));
}

std::vector<std::string> check_filter_spec(const FilterSpec& spec,
                                           double fc_hz) {
  std::vector<std::string> errs;
  const double nyquist = fc_hz / 2.0;
  if (spec.segments.empty()) {
    errs.push_back("filter.segments: empty, must cover [0, fc/2]");
    return errs;
  }
  auto segs = spec.segments;
  std::sort(segs.begin(), segs.end(),
            [](const FilterSegment& a, const FilterSegment& b) {
              return a.f_start_hz < b.f_start_hz;
            });
  if (!close(segs.front().f_start_hz, 0.0, fc_hz) ||
      segs.front().f_start_hz < 0.0) {
    errs.push_back("filter.segments: coverage must start at 0 Hz");
  }
  for (std::size_t i = 0; i < segs.size(); ++i) {
    const auto& s = segs[i];
    if (!(s.f_end_hz > s.f_start_hz)) {
      errs.push_back("filter.segments[" + std::to_string(i) +
                     "]: f_end_hz must exceed f_start_hz");
    }
    if (!nonneg_finite(s.magnitude)) {
      errs.push_back("filter.segments[" + std::to_string(i) +
                     "]: magnitude must be finite and >= 0");
    }
    if (i + 1 < segs.size()) {
      const double gap = segs[i + 1].f_start_hz - s.f_end_hz;
      if (gap > 1e-9 * std::max(1.0, fc_hz)) {
        errs.push_back("filter.segments: hole between " +
                       std::to_string(s.f_end_hz) + " Hz and " +
                       std::to_string(segs[i + 1].f_start_hz) + " Hz");
      } else if (gap < -1e-9 * std::max(1.0, fc_hz)) {
        errs.push_back("filter.segments: overlap at " +
                       std::to_string(segs[i + 1].f_start_hz) + " Hz");
      }
    }
  }
  if (segs.back().f_end_hz < nyquist * (1.0 - 1e-12)) {
    errs.push_back("filter.segments: coverage ends at " +
                   std::to_string(segs.back().f_end_hz) +
                   " Hz, below fc/2 = " + std::to_string(nyquist) + " Hz");
  }
  for (std::size_t i = 0; i < spec.gaps.size(); ++i) {
    const auto& g = spec.gaps[i];
    if (!nonneg_finite(g.weight)) {
      errs.push_back("filter.gaps[" + std::to_string(i) +
                     "]: weight must be finite and >= 0");
    }
    if (!(g.width_hz > 0.0) || !std::isfinite(g.width_hz)) {
      errs.push_back("filter.gaps[" + std::to_string(i) +
                     "]: width_hz must be positive");
    } else if (g.f_center_hz - g.width_hz / 2.0 < 0.0 ||
               g.f_center_hz + g.width_hz / 2.0 > nyquist) {
      errs.push_back("filter.gaps[" + std::to_string(i) +
                     "]: band exceeds [0, fc/2]");
    }
  }
  return errs;
}

FilterWeights compile(const FilterSpec& spec, int window_samples,
                      double fc_hz) {
  auto errs = check_filter_spec(spec, fc_hz);
  if (!errs.empty()) {
    std::string msg = "compile: invalid filter spec";
    for (const auto& e : errs) msg += "\n  " + e;
    throw std::invalid_argument(msg);
  }
  auto segs = spec.segments;
  std::sort(segs.begin(), segs.end(),
            [](const FilterSegment& a, const FilterSegment& b) {
              return a.f_start_hz < b.f_start_hz;
            });

  const double bin_width = fc_hz / window_samples;
  const int half = window_samples / 2;
  std::vector<double> w(static_cast<std::size_t>(half), 0.0);
  for (int n = 1; n <= half; ++n) {
    const double f = n * bin_width;
    // last segment is closed at its upper end so bin N/2 lands somewhere
    const FilterSegment* seg = &segs.back();
    for (const auto& s : segs) {
      if (f >= s.f_start_hz && f < s.f_end_hz) {
        seg = &s;
        break;
      }
    }
    double v = 0.0;
    switch (seg->shape) {
      case SegmentShape::constant:
        v = seg->magnitude;
        break;
      case SegmentShape::linear_in_f:
        v = seg->magnitude * (f / seg->f_end_hz);
        break;
      case SegmentShape::inverse_in_f: {
        const double f_ref = std::max(seg->f_start_hz, bin_width);
        v = seg->magnitude * (f_ref / f);
        break;
      }
    }
    for (const auto& g : spec.gaps) {
      if (std::abs(f - g.f_center_hz) <= g.width_hz / 2.0) v = g.weight;
    }
    w[static_cast<std::size_t>(n - 1)] = v;
  }
  return FilterWeights(std::move(w));
}

FilterSpec move_gap(const FilterSpec& spec, int gap_index,
                    double new_center_hz, double fc_hz) {
  if (gap_index < 0 || gap_index >= static_cast<int>(spec.gaps.size())) {
    throw std::out_of_range("move_gap: no gap with index " +
                            std::to_string(gap_index));
  }
  FilterSpec out = spec;
  auto& g = out.gaps[static_cast<std::size_t>(gap_index)];
  const double lo = new_center_hz - g.width_hz / 2.0;
  const double hi = new_center_hz + g.width_hz / 2.0;
  if (!(lo > 0.0) || !(hi < fc_hz / 2.0)) {
    throw std::invalid_argument("move_gap: band [" + std::to_string(lo) +
                                ", " + std::to_string(hi) +
                                "] Hz not inside (0, fc/2)");
  }
  g.f_center_hz = new_center_hz;
  return out;
}

}  // namespace specmpc
