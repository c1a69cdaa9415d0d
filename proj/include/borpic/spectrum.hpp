#pragma once

#include <span>
#include <vector>

namespace borpic {

// One-sided amplitude spectrum of a Hann-windowed series. A sinusoid of
// amplitude A centered on a bin reads A in that bin.
struct Spectrum {
  double bin_spacing = 0.0;  // Hz
  std::vector<double> frequency;
  std::vector<double> amplitude;
};

// throws std::invalid_argument for fewer than 16 samples
Spectrum fft_spectrum(std::span<const double> samples, double sample_interval);

struct SpectralPeak {
  double frequency = 0.0;  // Hz, parabolic interpolation on log amplitude
  double amplitude = 0.0;
  std::size_t bin = 0;
};

// strongest bin at or above min_bin
SpectralPeak find_peak(const Spectrum& spectrum, std::size_t min_bin = 1);

}  // namespace borpic
