#pragma once

#include <span>
#include <string>
#include <vector>

namespace specmpc {

enum class SegmentShape { constant, linear_in_f, inverse_in_f };

/// One piece of the piecewise weighting curve over [f_start_hz, f_end_hz).
/// constant:     w(f) = magnitude
/// linear_in_f:  w(f) = magnitude * f / f_end_hz
/// inverse_in_f: w(f) = magnitude * f_ref / f, f_ref = max(f_start_hz, one bin)
struct FilterSegment {
  double f_start_hz = 0.0;
  double f_end_hz = 0.0;
  SegmentShape shape = SegmentShape::constant;
  double magnitude = 0.0;
};

/// Band [f_center - width/2, f_center + width/2] whose weight overrides the
/// underlying segment. A high weight here keeps the band free of switching
/// distortion, carving a valley into the produced spectrum.
struct GapBand {
  double f_center_hz = 0.0;
  double width_hz = 0.0;
  double weight = 0.0;
};

/// Declarative description of the per-bin spectral weighting. Segments must
/// cover [0, fc/2] without overlap; gaps may sit anywhere inside that range.
struct FilterSpec {
  std::vector<FilterSegment> segments;
  std::vector<GapBand> gaps;
};

/// Compiled nonnegative weights for bins 1..floor(N/2); bin 0 carries no
/// weight by construction (the DC shift handles the mean).
class FilterWeights {
 public:
  FilterWeights() = default;
  explicit FilterWeights(std::vector<double> bins_one_up);

  int bin_count() const { return static_cast<int>(w_.size()); }
  /// Weight of spectrum bin n, n in 1..bin_count().
  double at_bin(int n) const { return w_[static_cast<std::size_t>(n - 1)]; }
  std::span<const double> values() const { return w_; }

 private:
  std::vector<double> w_;
};

/// Magnitude targets for bins 1..floor(N/2). All-zero by default: for a
/// DC-DC converter the only desirable energy sits at 0 Hz.
class ReferenceSpectrum {
 public:
  ReferenceSpectrum() = default;
  explicit ReferenceSpectrum(std::vector<double> targets_one_up);

  static ReferenceSpectrum zero(int bin_count);
  /// Constant level for bins at or above f_start_hz, zero below.
  static ReferenceSpectrum flat(int bin_count, double bin_hz,
                                double f_start_hz, double level);

  bool is_zero() const { return is_zero_; }
  int bin_count() const { return static_cast<int>(t_.size()); }
  double at_bin(int n) const { return t_[static_cast<std::size_t>(n - 1)]; }
  std::span<const double> values() const { return t_; }

 private:
  std::vector<double> t_;
  bool is_zero_ = true;
};

/// Validates segment coverage/ordering and all magnitudes; returns one
/// message per violation, empty when the spec is well formed.
std::vector<std::string> check_filter_spec(const FilterSpec& spec,
                                           double fc_hz);

/// Evaluates the spec at every bin frequency n*fc/N. Throws
/// std::invalid_argument when check_filter_spec() reports problems.
FilterWeights compile(const FilterSpec& spec, int window_samples,
                      double fc_hz);

/// Returns a copy of the spec with one gap recentered. The new band must
/// stay inside (0, fc/2). Recompilation is the caller's business.
FilterSpec move_gap(const FilterSpec& spec, int gap_index,
                    double new_center_hz, double fc_hz);

}  // namespace specmpc
