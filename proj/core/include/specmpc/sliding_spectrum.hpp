#pragma once

#include <complex>
#include <cstdint>
#include <vector>

namespace specmpc {

/// Static configuration of the sliding-spectrum engine.
///
/// The switching signal is sampled once per control cycle, so bin n of the
/// window spectrum sits at n * control_hz / window_samples. Only bins
/// 0..floor(N/2) are kept; for a real signal the upper half of the spectrum
/// is the conjugate mirror of the lower half.
struct EngineConfig {
  int window_samples = 2048;      ///< N, samples in the sliding analysis window
  double control_hz = 400'000.0;  ///< fc, control rate in Hz
  int resync_interval = 65536;    ///< slides between full recomputations

  void validate() const;  ///< throws std::invalid_argument on bad values

  double bin_hz() const { return control_hz / window_samples; }
  int stored_bins() const { return window_samples / 2 + 1; }
};

/// Unit-modulus rotation table: twiddle(q) = exp(j*2*pi*q/N).
///
/// The sliding update rotates every stored bin by twiddle(n) once per
/// sample; the full-length table also serves the direct summation in
/// resync() via the index (n*m) mod N.
class ShiftVector {
 public:
  explicit ShiftVector(int window_samples);

  int window_samples() const { return static_cast<int>(twiddles_.size()); }
  std::complex<double> twiddle(int q) const { return twiddles_[q]; }

 private:
  std::vector<std::complex<double>> twiddles_;
};

/// Maps a raw half-bridge state {0,1} to its DC-shifted sample value
/// raw - duty_ref, i.e. one of {-duty_ref, 1 - duty_ref}. With duty_ref
/// equal to the output-voltage reference ratio Vo/Vin the window mean is
/// driven to zero, which is what lets the cost ignore bin 0 entirely.
/// duty_ref outside [0,1] is clamped (logged once).
double shifted_value(int raw_state, double duty_ref);

/// Ring buffer of the last N switch samples: DC-shifted values for the
/// spectrum, raw states for the switching-rate bookkeeping. The count of
/// adjacent unequal raw states is maintained incrementally on every push.
class SwitchingWindow {
 public:
  explicit SwitchingWindow(int window_samples);

  int size() const { return static_cast<int>(shifted_.size()); }
  int transition_count() const { return transitions_; }

  /// Sample at chronological position i, 0 = oldest.
  double shifted_at(int i) const { return shifted_[physical(i)]; }
  int raw_at(int i) const { return raw_[physical(i)]; }

  double oldest_shifted() const { return shifted_[head_]; }
  int newest_raw() const { return raw_[physical(size() - 1)]; }

  /// Appends one sample, expelling the oldest.
  void push(int raw_state, double shifted);

  std::vector<double> shifted_chronological() const;
  std::vector<int> raw_chronological() const;

 private:
  int physical(int i) const { return (head_ + i) % size(); }

  std::vector<double> shifted_;
  std::vector<std::uint8_t> raw_;
  int head_ = 0;  // index of the oldest sample
  int transitions_ = 0;
};

/// Complex spectrum of the current window, bins 0..floor(N/2).
///
/// Maintained recursively by slide(); the stored values equal the direct
/// DFT of the window with the oldest sample at index 0 (see resync()).
/// Plain value semantics: copying and sliding both copies identically is
/// bit-identical, which is what the candidate tree relies on.
struct SpectrumState {
  std::vector<std::complex<double>> bins;
  std::int64_t age = 0;  ///< slides since the last full recomputation

  SpectrumState() = default;
  explicit SpectrumState(int window_samples)
      : bins(static_cast<std::size_t>(window_samples / 2 + 1)) {}

  int bin_count() const { return static_cast<int>(bins.size()); }
};

/// One recursive window advance: for every stored bin n,
///   bins[n] <- (bins[n] - oldest_shifted + fresh_shifted) * twiddle(n).
/// In exact arithmetic the result equals the direct DFT of the window
/// after the oldest sample is replaced by the new one.
void slide(SpectrumState& spectrum, const ShiftVector& shift,
           double oldest_shifted, double fresh_shifted);

/// Out-of-place slide used by the candidate tree: dst gets the slid copy
/// of src in a single pass, src is untouched. dst must have matching size.
void slide_into(const SpectrumState& src, SpectrumState& dst,
                const ShiftVector& shift, double oldest_shifted,
                double fresh_shifted);

/// Direct O(N^2) recomputation of the window spectrum:
///   bins[n] = sum_m shifted(m) * exp(-j*2*pi*n*m/N), m = 0 at the oldest
/// sample. Bounds the slow floating-point drift of the recursive update;
/// the sliding update reproduces exactly this convention, so no phase
/// correction is applied. Resets age to 0.
SpectrumState resync(const SwitchingWindow& window, const ShiftVector& shift);

}  // namespace specmpc
