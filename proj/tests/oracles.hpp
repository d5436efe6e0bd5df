#pragma once

// Brute-force reference computations. These deliberately avoid the library's
// algorithm code paths (no FFT, no prepared spectra, no interpolate_width) so
// they can serve as independent oracles.

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "cvo/feature_map.hpp"

namespace cvo::oracle {

/// Circular linear interpolation written element by element.
inline FeatureMapd interpolate(const FeatureMapd& f, int scale) {
  const int w = f.width();
  FeatureMapd out(f.height(), w * scale, f.channels());
  for (int h = 0; h < f.height(); ++h)
    for (int x = 0; x < w * scale; ++x)
      for (int c = 0; c < f.channels(); ++c) {
        const int k = x / scale;
        const double t = static_cast<double>(x % scale) / scale;
        out.at(h, x, c) = (x % scale == 0) ? f.at(h, k, c) : (1 - t) * f.at(h, k, c) + t * f.at(h, (k + 1) % w, c);
      }
  return out;
}

/// sum over m < W_g, h, c of g[h, m, c] * s[h, (m + w) mod W_s, c]
inline std::vector<double> correlate(const FeatureMapd& g, const FeatureMapd& s) {
  std::vector<double> curve(s.width(), 0.0);
  for (int w = 0; w < s.width(); ++w) {
    double sum = 0.0;
    for (int m = 0; m < g.width(); ++m)
      for (int h = 0; h < g.height(); ++h)
        for (int c = 0; c < g.channels(); ++c) sum += g.at(h, m, c) * s.at(h, (m + w) % s.width(), c);
    curve[w] = sum;
  }
  return curve;
}

inline int argmax(const std::vector<double>& v) {
  int best = 0;
  for (int i = 1; i < static_cast<int>(v.size()); ++i)
    if (v[i] > v[best]) best = i;
  return best;
}

/// Exhaustive FI: fine-grid argmax of the correlation of interpolated maps.
inline int fi_fine_argmax(const FeatureMapd& g, const FeatureMapd& s, int scale) {
  return argmax(correlate(interpolate(g, scale), interpolate(s, scale)));
}

/// Trigonometric interpolant of a real periodic sequence evaluated at
/// fractional position x, from an O(W^2) DFT. For even W the Nyquist term
/// contributes X_{W/2} cos(pi x).
inline double trig_interpolate(const std::vector<double>& v, double x) {
  const int n = static_cast<int>(v.size());
  std::vector<std::complex<double>> spectrum(n);
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j) spectrum[k] += v[j] * std::polar(1.0, -2.0 * M_PI * k * j / n);
  double y = spectrum[0].real();
  for (int k = 1; 2 * k < n; ++k) y += 2.0 * (spectrum[k] * std::polar(1.0, 2.0 * M_PI * k * x / n)).real();
  if (n % 2 == 0) y += spectrum[n / 2].real() * std::cos(M_PI * x);
  return y / n;
}

/// Band-limited feature pair: street(m) = f(m), satellite(j) = f(j - shift),
/// f a sum of harmonics 1..max_harmonic with 1/k amplitudes plus a DC term.
struct BandLimitedPair {
  FeatureMapd street;
  FeatureMapd satellite;
  double shift;
};

inline BandLimitedPair band_limited_pair(std::mt19937_64& rng, double shift, int height = 4, int width = 64,
                                         int channels = 16, int max_harmonic = 6) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * M_PI);
  BandLimitedPair p{FeatureMapd(height, width, channels), FeatureMapd(height, width, channels), shift};
  for (int h = 0; h < height; ++h)
    for (int c = 0; c < channels; ++c) {
      const double dc = normal(rng);
      for (int x = 0; x < width; ++x) {
        p.street.at(h, x, c) += dc;
        p.satellite.at(h, x, c) += dc;
      }
      for (int k = 1; k <= max_harmonic; ++k) {
        const double a = normal(rng) / k;
        const double phi = phase(rng);
        for (int x = 0; x < width; ++x) {
          p.street.at(h, x, c) += a * std::cos(2.0 * M_PI * k * x / width + phi);
          p.satellite.at(h, x, c) += a * std::cos(2.0 * M_PI * k * (x - shift) / width + phi);
        }
      }
    }
  return p;
}

inline FeatureMapd random_map(std::mt19937_64& rng, int height, int width, int channels) {
  std::normal_distribution<double> normal(0.0, 1.0);
  FeatureMapd f(height, width, channels);
  for (int h = 0; h < height; ++h)
    for (int x = 0; x < width; ++x)
      for (int c = 0; c < channels; ++c) f.at(h, x, c) = normal(rng);
  return f;
}

/// Circular distance between fractional positions on a ring of `width`.
inline double ring_distance(double a, double b, double width) {
  const double d = std::fmod(std::abs(a - b), width);
  return std::min(d, width - d);
}

/// Central finite-difference gradient of f with respect to every entry of x.
template <typename F>
FeatureMapd numeric_gradient(F&& f, FeatureMapd x, double h) {
  FeatureMapd g(x.height(), x.width(), x.channels());
  for (int hh = 0; hh < x.height(); ++hh)
    for (int w = 0; w < x.width(); ++w)
      for (int c = 0; c < x.channels(); ++c) {
        const double saved = x.at(hh, w, c);
        x.at(hh, w, c) = saved + h;
        const double up = f(x);
        x.at(hh, w, c) = saved - h;
        const double down = f(x);
        x.at(hh, w, c) = saved;
        g.at(hh, w, c) = (up - down) / (2 * h);
      }
  return g;
}

}  // namespace cvo::oracle
