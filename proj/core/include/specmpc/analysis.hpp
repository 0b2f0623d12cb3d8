#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace specmpc {

/// One-sided power spectrum normalized to the power of the 0 Hz component:
/// 0 dB is the DC power, values are floored at -120 dB for serialization.
struct PowerSpectrum {
  std::vector<double> freq_hz;
  std::vector<double> power_rel;  ///< linear, relative to DC power
  double dc_power = 0.0;          ///< absolute DC power (mean squared)

  std::vector<double> power_db() const;
  double bin_hz() const {
    return freq_hz.size() > 1 ? freq_hz[1] - freq_hz[0] : 0.0;
  }
};

struct RippleStats {
  double variance_v2 = 0.0;
  double peak_to_peak_v = 0.0;
  double variance_factor = 1.0;      ///< vs the named baseline run
  double peak_to_peak_factor = 1.0;
};

struct Spectrogram {
  std::vector<double> time_s;     ///< column centers
  std::vector<double> freq_hz;    ///< row frequencies
  std::vector<double> power;      ///< linear, column-major [col*rows + row]
  int rows = 0;
  int cols = 0;

  double at(int col, int row) const {
    return power[static_cast<std::size_t>(col) * rows + row];
  }
};

enum class SpectralWindow { hann, rectangular };

/// Averaged-periodogram estimate (Welch). Defaults: Hann window, 50%
/// overlap. The trace mean is removed before windowing and re-reported as
/// the DC bin, so DC leakage cannot mask nearby bins; with the rectangular
/// window and a single segment the bin powers sum exactly to the trace
/// mean square.
PowerSpectrum welch_spectrum(std::span<const double> trace, double sample_hz,
                             int segment_length, double overlap = 0.5,
                             SpectralWindow window = SpectralWindow::hann);

/// Ratio in dB between the largest and second-largest distinct local maxima
/// of the spectrum, DC excluded. A bin is a peak when it strictly dominates
/// every bin within +-neighborhood. Throws when fewer than two peaks exist.
double sfdr(const PowerSpectrum& spectrum, int neighborhood = 3);

/// Largest non-DC bin in dB relative to DC.
double peak_power_db(const PowerSpectrum& spectrum);

/// Mean flank power minus mean in-gap power, in dB (means taken on linear
/// power). Throws when a band contains no bins.
double gap_depth(const PowerSpectrum& spectrum,
                 std::pair<double, double> gap_band_hz,
                 std::span<const std::pair<double, double>> flank_bands_hz);

/// Rising edges divided by duration.
double avg_switching_frequency(std::span<const std::int8_t> switch_trace,
                               double duration_s);
std::int64_t rising_edge_count(std::span<const std::int8_t> switch_trace);

/// Variance and peak-to-peak of the trailing steady-state window, plus
/// factors relative to a baseline trace treated the same way.
RippleStats ripple_stats(std::span<const double> trace,
                         std::span<const double> baseline,
                         double discard_fraction = 0.2);
double trace_variance(std::span<const double> trace, double discard_fraction);
double trace_peak_to_peak(std::span<const double> trace,
                          double discard_fraction);

/// Short-time Fourier transform, Hann window, magnitude squared.
Spectrogram spectrogram(std::span<const double> trace, double sample_hz,
                        int window_length, int hop);

/// Sum of linear (DC-normalized) bin powers inside the band, DC excluded.
double distortion_power(const PowerSpectrum& spectrum,
                        std::pair<double, double> band_hz);

}  // namespace specmpc
