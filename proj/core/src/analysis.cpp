#include "specmpc/analysis.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace specmpc {

namespace {

constexpr double kDbFloor = -120.0;

double to_db(double rel_power) {
  if (!(rel_power > 0.0)) return kDbFloor;
  return std::max(10.0 * std::log10(rel_power), kDbFloor);
}

// FFTW planning is not thread safe; executing distinct plans is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

/// Real-to-complex FFT of a fixed size with FFTW-owned aligned buffers.
class RealFft {
 public:
  explicit RealFft(int n) : n_(n) {
    in_ = fftw_alloc_real(static_cast<std::size_t>(n));
    out_ = fftw_alloc_complex(static_cast<std::size_t>(n / 2 + 1));
    std::lock_guard<std::mutex> lock(planner_mutex());
    plan_ = fftw_plan_dft_r2c_1d(n, in_, out_, FFTW_ESTIMATE);
  }
  ~RealFft() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(plan_);
    fftw_free(in_);
    fftw_free(out_);
  }
  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;

  int size() const { return n_; }
  double* input() { return in_; }

  /// |X[k]|^2 for k = 0..n/2.
  void power(std::vector<double>& out) {
    fftw_execute(plan_);
    const int half = n_ / 2;
    out.resize(static_cast<std::size_t>(half) + 1);
    for (int k = 0; k <= half; ++k) {
      const double re = out_[k][0];
      const double im = out_[k][1];
      out[static_cast<std::size_t>(k)] = re * re + im * im;
    }
  }

 private:
  int n_;
  double* in_;
  fftw_complex* out_;
  fftw_plan plan_;
};

std::vector<double> make_window(SpectralWindow kind, int n) {
  std::vector<double> w(static_cast<std::size_t>(n), 1.0);
  if (kind == SpectralWindow::hann) {
    for (int i = 0; i < n; ++i) {
      w[static_cast<std::size_t>(i)] =
          0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * i / n));
    }
  }
  return w;
}

}  // namespace

std::vector<double> PowerSpectrum::power_db() const {
  std::vector<double> db(power_rel.size());
  for (std::size_t i = 0; i < power_rel.size(); ++i) {
    db[i] = to_db(power_rel[i]);
  }
  return db;
}

PowerSpectrum welch_spectrum(std::span<const double> trace, double sample_hz,
                             int segment_length, double overlap,
                             SpectralWindow window) {
  if (segment_length < 2) {
    throw std::invalid_argument("welch_spectrum: segment_length must be >= 2");
  }
  if (static_cast<int>(trace.size()) < segment_length) {
    throw std::invalid_argument(
        "welch_spectrum: trace shorter than one segment");
  }
  if (!(overlap >= 0.0 && overlap < 1.0)) {
    throw std::invalid_argument("welch_spectrum: overlap must be in [0,1)");
  }

  double mean = 0.0;
  for (double v : trace) mean += v;
  mean /= static_cast<double>(trace.size());
  const double dc_power = mean * mean;

  const int hop =
      std::max(1, static_cast<int>(std::lround(segment_length * (1.0 - overlap))));
  const auto win = make_window(window, segment_length);
  double win_sq = 0.0;
  for (double v : win) win_sq += v * v;

  RealFft fft(segment_length);
  std::vector<double> seg_power;
  const int half = segment_length / 2;
  std::vector<double> acc(static_cast<std::size_t>(half) + 1, 0.0);
  int segments = 0;
  for (int start = 0;
       start + segment_length <= static_cast<int>(trace.size());
       start += hop) {
    for (int i = 0; i < segment_length; ++i) {
      fft.input()[i] = (trace[static_cast<std::size_t>(start + i)] - mean) *
                       win[static_cast<std::size_t>(i)];
    }
    fft.power(seg_power);
    for (std::size_t k = 0; k < acc.size(); ++k) acc[k] += seg_power[k];
    ++segments;
  }

  // per-segment normalization |X|^2 / (L * sum w^2) makes the two-sided bin
  // powers sum to the mean square; folding keeps that identity one-sided
  const double norm =
      1.0 / (segments * static_cast<double>(segment_length) * win_sq);

  PowerSpectrum out;
  out.dc_power = dc_power;
  out.freq_hz.resize(acc.size());
  out.power_rel.resize(acc.size());
  const double bin_hz = sample_hz / segment_length;
  const bool even = segment_length % 2 == 0;
  for (std::size_t k = 0; k < acc.size(); ++k) {
    out.freq_hz[k] = bin_hz * static_cast<double>(k);
    double fold = 2.0;
    if (k == 0 || (even && k == acc.size() - 1)) fold = 1.0;
    out.power_rel[k] = fold * acc[k] * norm;
  }
  // the demeaned residual at bin 0 is noise; the DC reference is the mean
  out.power_rel[0] = 1.0;
  if (dc_power > 0.0) {
    for (std::size_t k = 1; k < out.power_rel.size(); ++k) {
      out.power_rel[k] /= dc_power;
    }
  }
  return out;
}

double sfdr(const PowerSpectrum& spectrum, int neighborhood) {
  const int n = static_cast<int>(spectrum.power_rel.size());
  if (n <= 2) {
    throw std::invalid_argument("sfdr: spectrum must have more than one bin");
  }
  double best = 0.0, second = 0.0;
  int peaks = 0;
  for (int i = 1; i < n; ++i) {
    const double p = spectrum.power_rel[static_cast<std::size_t>(i)];
    bool is_peak = true;
    for (int d = -neighborhood; d <= neighborhood && is_peak; ++d) {
      const int m = i + d;
      if (d == 0 || m < 1 || m >= n) continue;
      if (spectrum.power_rel[static_cast<std::size_t>(m)] >= p) is_peak = false;
    }
    if (!is_peak) continue;
    ++peaks;
    if (p > best) {
      second = best;
      best = p;
    } else if (p > second) {
      second = p;
    }
  }
  if (peaks < 2 || !(second > 0.0)) {
    throw std::runtime_error("sfdr: fewer than two identifiable peaks");
  }
  return 10.0 * std::log10(best / second);
}

double peak_power_db(const PowerSpectrum& spectrum) {
  double best = 0.0;
  for (std::size_t i = 1; i < spectrum.power_rel.size(); ++i) {
    best = std::max(best, spectrum.power_rel[i]);
  }
  return to_db(best);
}

namespace {

double band_mean(const PowerSpectrum& s, std::pair<double, double> band) {
  double acc = 0.0;
  int count = 0;
  for (std::size_t i = 1; i < s.freq_hz.size(); ++i) {
    if (s.freq_hz[i] >= band.first && s.freq_hz[i] <= band.second) {
      acc += s.power_rel[i];
      ++count;
    }
  }
  if (count == 0) {
    throw std::invalid_argument("gap_depth: band contains no bins");
  }
  return acc / count;
}

}  // namespace

double gap_depth(const PowerSpectrum& spectrum,
                 std::pair<double, double> gap_band_hz,
                 std::span<const std::pair<double, double>> flank_bands_hz) {
  if (flank_bands_hz.empty()) {
    throw std::invalid_argument("gap_depth: no flank bands given");
  }
  const double gap = band_mean(spectrum, gap_band_hz);
  double flank = 0.0;
  for (const auto& b : flank_bands_hz) flank += band_mean(spectrum, b);
  flank /= static_cast<double>(flank_bands_hz.size());
  if (!(gap > 0.0)) return -kDbFloor;
  return 10.0 * std::log10(flank / gap);
}

std::int64_t rising_edge_count(std::span<const std::int8_t> switch_trace) {
  std::int64_t edges = 0;
  for (std::size_t i = 1; i < switch_trace.size(); ++i) {
    edges += switch_trace[i - 1] == 0 && switch_trace[i] == 1;
  }
  return edges;
}

double avg_switching_frequency(std::span<const std::int8_t> switch_trace,
                               double duration_s) {
  if (!(duration_s > 0.0)) {
    throw std::invalid_argument(
        "avg_switching_frequency: duration must be positive");
  }
  return static_cast<double>(rising_edge_count(switch_trace)) / duration_s;
}

namespace {

std::span<const double> steady_window(std::span<const double> trace,
                                      double discard_fraction) {
  const auto skip = static_cast<std::size_t>(
      static_cast<double>(trace.size()) * discard_fraction);
  return trace.subspan(std::min(skip, trace.size()));
}

}  // namespace

double trace_variance(std::span<const double> trace, double discard_fraction) {
  const auto w = steady_window(trace, discard_fraction);
  if (w.empty()) return 0.0;
  double mean = 0.0;
  for (double v : w) mean += v;
  mean /= static_cast<double>(w.size());
  double acc = 0.0;
  for (double v : w) acc += (v - mean) * (v - mean);
  return acc / static_cast<double>(w.size());
}

double trace_peak_to_peak(std::span<const double> trace,
                          double discard_fraction) {
  const auto w = steady_window(trace, discard_fraction);
  if (w.empty()) return 0.0;
  const auto [lo, hi] = std::minmax_element(w.begin(), w.end());
  return *hi - *lo;
}

RippleStats ripple_stats(std::span<const double> trace,
                         std::span<const double> baseline,
                         double discard_fraction) {
  RippleStats out;
  out.variance_v2 = trace_variance(trace, discard_fraction);
  out.peak_to_peak_v = trace_peak_to_peak(trace, discard_fraction);
  const double base_var = trace_variance(baseline, discard_fraction);
  const double base_p2p = trace_peak_to_peak(baseline, discard_fraction);
  out.variance_factor = base_var > 0.0 ? out.variance_v2 / base_var : 1.0;
  out.peak_to_peak_factor =
      base_p2p > 0.0 ? out.peak_to_peak_v / base_p2p : 1.0;
  return out;
}

Spectrogram spectrogram(std::span<const double> trace, double sample_hz,
                        int window_length, int hop) {
  if (window_length < 2 || hop < 1) {
    throw std::invalid_argument("spectrogram: bad window/hop");
  }
  if (static_cast<int>(trace.size()) < window_length) {
    throw std::invalid_argument("spectrogram: trace shorter than one window");
  }
  const auto win = make_window(SpectralWindow::hann, window_length);
  RealFft fft(window_length);
  std::vector<double> col;

  Spectrogram out;
  out.rows = window_length / 2 + 1;
  const double bin_hz = sample_hz / window_length;
  out.freq_hz.resize(static_cast<std::size_t>(out.rows));
  for (int k = 0; k < out.rows; ++k) {
    out.freq_hz[static_cast<std::size_t>(k)] = bin_hz * k;
  }
  for (int start = 0; start + window_length <= static_cast<int>(trace.size());
       start += hop) {
    for (int i = 0; i < window_length; ++i) {
      fft.input()[i] = trace[static_cast<std::size_t>(start + i)] *
                       win[static_cast<std::size_t>(i)];
    }
    fft.power(col);
    out.power.insert(out.power.end(), col.begin(), col.end());
    out.time_s.push_back((start + window_length / 2.0) / sample_hz);
    ++out.cols;
  }
  return out;
}

double distortion_power(const PowerSpectrum& spectrum,
                        std::pair<double, double> band_hz) {
  if (!(band_hz.second > band_hz.first)) {
    throw std::invalid_argument("distortion_power: empty band");
  }
  double acc = 0.0;
  int count = 0;
  for (std::size_t i = 1; i < spectrum.freq_hz.size(); ++i) {
    if (spectrum.freq_hz[i] >= band_hz.first &&
        spectrum.freq_hz[i] <= band_hz.second) {
      acc += spectrum.power_rel[i];
      ++count;
    }
  }
  if (count == 0) {
    throw std::invalid_argument("distortion_power: band contains no bins");
  }
  return acc;
}

}  // namespace specmpc
