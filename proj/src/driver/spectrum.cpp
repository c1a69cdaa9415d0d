#include "borpic/spectrum.hpp"

#include <fftw3.h>

#include <cmath>
#include <memory>
#include <stdexcept>

#include "borpic/constants.hpp"

namespace borpic {

Spectrum fft_spectrum(std::span<const double> samples, double sample_interval) {
  const std::size_t n = samples.size();
  if (n < 16) throw std::invalid_argument("spectrum needs at least 16 samples");
  if (!(sample_interval > 0.0)) throw std::invalid_argument("sample interval must be positive");
  const std::size_t bins = n / 2 + 1;
  auto in = std::unique_ptr<double, decltype(&fftw_free)>(fftw_alloc_real(n), fftw_free);
  auto out = std::unique_ptr<fftw_complex, decltype(&fftw_free)>(fftw_alloc_complex(bins),
                                                                  fftw_free);
  fftw_plan plan =
      fftw_plan_dft_r2c_1d(static_cast<int>(n), in.get(), out.get(), FFTW_ESTIMATE);
  double wsum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    // periodic Hann
    double w = 0.5 * (1.0 - std::cos(two_pi * static_cast<double>(i) / static_cast<double>(n)));
    in.get()[i] = w * samples[i];
    wsum += w;
  }
  fftw_execute(plan);
  fftw_destroy_plan(plan);

  Spectrum s;
  s.bin_spacing = 1.0 / (static_cast<double>(n) * sample_interval);
  s.frequency.resize(bins);
  s.amplitude.resize(bins);
  for (std::size_t k = 0; k < bins; ++k) {
    double mag = std::hypot(out.get()[k][0], out.get()[k][1]);
    bool edge = k == 0 || (n % 2 == 0 && k == bins - 1);
    s.frequency[k] = static_cast<double>(k) * s.bin_spacing;
    s.amplitude[k] = (edge ? 1.0 : 2.0) * mag / wsum;
  }
  return s;
}

SpectralPeak find_peak(const Spectrum& s, std::size_t min_bin) {
  SpectralPeak peak;
  if (s.amplitude.size() <= min_bin) return peak;
  std::size_t best = min_bin;
  for (std::size_t k = min_bin; k < s.amplitude.size(); ++k)
    if (s.amplitude[k] > s.amplitude[best]) best = k;
  peak.bin = best;
  peak.amplitude = s.amplitude[best];
  peak.frequency = s.frequency[best];
  if (best > 0 && best + 1 < s.amplitude.size()) {
    double a = s.amplitude[best - 1], b = s.amplitude[best], c = s.amplitude[best + 1];
    if (a > 0 && b > 0 && c > 0) {
      double la = std::log(a), lb = std::log(b), lc = std::log(c);
      double denom = la - 2.0 * lb + lc;
      if (denom < 0.0) {
        double offset = 0.5 * (la - lc) / denom;
        peak.frequency = (static_cast<double>(best) + offset) * s.bin_spacing;
      }
    }
  }
  return peak;
}

}  // namespace borpic
