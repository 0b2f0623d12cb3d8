#include "specmpc/sliding_spectrum.hpp"

#include <cmath>
#include <iostream>
#include <numbers>
#include <stdexcept>

namespace specmpc {

void EngineConfig::validate() const {
  if (window_samples < 2) {
    throw std::invalid_argument("EngineConfig: window_samples must be >= 2");
  }
  if (!(control_hz > 0.0) || !std::isfinite(control_hz)) {
    throw std::invalid_argument("EngineConfig: control_hz must be positive");
  }
  if (resync_interval < 1) {
    throw std::invalid_argument("EngineConfig: resync_interval must be >= 1");
  }
}

ShiftVector::ShiftVector(int window_samples) {
  if (window_samples < 2) {
    throw std::invalid_argument("ShiftVector: window length must be >= 2");
  }
  twiddles_.resize(static_cast<std::size_t>(window_samples));
  const double step = 2.0 * std::numbers::pi / window_samples;
  for (int q = 0; q < window_samples; ++q) {
    twiddles_[static_cast<std::size_t>(q)] = std::polar(1.0, step * q);
  }
}

double shifted_value(int raw_state, double duty_ref) {
  if (duty_ref < 0.0 || duty_ref > 1.0) {
    static bool warned = false;
    if (!warned) {
      std::cerr << "specmpc: duty reference " << duty_ref
                << " outside [0,1], clamping\n";
      warned = true;
    }
    duty_ref = duty_ref < 0.0 ? 0.0 : 1.0;
  }
  return static_cast<double>(raw_state) - duty_ref;
}

SwitchingWindow::SwitchingWindow(int window_samples) {
  if (window_samples < 2) {
    throw std::invalid_argument("SwitchingWindow: window length must be >= 2");
  }
  shifted_.assign(static_cast<std::size_t>(window_samples), 0.0);
  raw_.assign(static_cast<std::size_t>(window_samples), 0);
}

void SwitchingWindow::push(int raw_state, double shifted) {
  const int n = size();
  const int second = (head_ + 1) % n;
  const int newest = (head_ + n - 1) % n;
  transitions_ -= raw_[head_] != raw_[second];
  transitions_ += raw_[newest] != raw_state;
  raw_[static_cast<std::size_t>(head_)] = static_cast<std::uint8_t>(raw_state);
  shifted_[static_cast<std::size_t>(head_)] = shifted;
  head_ = second;
}

std::vector<double> SwitchingWindow::shifted_chronological() const {
  std::vector<double> out(static_cast<std::size_t>(size()));
  for (int i = 0; i < size(); ++i) out[static_cast<std::size_t>(i)] = shifted_at(i);
  return out;
}

std::vector<int> SwitchingWindow::raw_chronological() const {
  std::vector<int> out(static_cast<std::size_t>(size()));
  for (int i = 0; i < size(); ++i) out[static_cast<std::size_t>(i)] = raw_at(i);
  return out;
}

void slide(SpectrumState& spectrum, const ShiftVector& shift,
           double oldest_shifted, double fresh_shifted) {
  const double delta = fresh_shifted - oldest_shifted;
  const int nb = spectrum.bin_count();
  for (int n = 0; n < nb; ++n) {
    const std::complex<double> tw = shift.twiddle(n);
    const std::complex<double> v = spectrum.bins[static_cast<std::size_t>(n)];
    spectrum.bins[static_cast<std::size_t>(n)] =
        std::complex<double>(v.real() + delta, v.imag()) * tw;
  }
  ++spectrum.age;
}

void slide_into(const SpectrumState& src, SpectrumState& dst,
                const ShiftVector& shift, double oldest_shifted,
                double fresh_shifted) {
  const double delta = fresh_shifted - oldest_shifted;
  const int nb = src.bin_count();
  dst.bins.resize(static_cast<std::size_t>(nb));
  for (int n = 0; n < nb; ++n) {
    const std::complex<double> tw = shift.twiddle(n);
    const std::complex<double> v = src.bins[static_cast<std::size_t>(n)];
    dst.bins[static_cast<std::size_t>(n)] =
        std::complex<double>(v.real() + delta, v.imag()) * tw;
  }
  dst.age = src.age + 1;
}

SpectrumState resync(const SwitchingWindow& window, const ShiftVector& shift) {
  const int n_samples = window.size();
  SpectrumState out(n_samples);
  for (int n = 0; n < out.bin_count(); ++n) {
    std::complex<double> acc{0.0, 0.0};
    for (int m = 0; m < n_samples; ++m) {
      const int q = static_cast<int>(
          (static_cast<std::int64_t>(n) * m) % n_samples);
      acc += window.shifted_at(m) * std::conj(shift.twiddle(q));
    }
    out.bins[static_cast<std::size_t>(n)] = acc;
  }
  out.age = 0;
  return out;
}

}  // namespace specmpc
