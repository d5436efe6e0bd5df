#pragma once

// Orientation estimation by circular cross-correlation of feature maps.
//
//   curve[w] = sum_{m < W_g} <F_g[m], F_s[(m + w) mod W_s]>
//
// The peak position w is the clockwise shift of the street view relative to
// the south-aligned satellite view, in feature bins. Two sub-bin refinements:
//   FI: interpolate both maps by S along width, correlate, argmax / S.
//   CS: correlate at coarse resolution, band-limit-interpolate the curve by S
//       through spectral zero-padding, argmax / S.
// Argmax ties resolve to the lowest index.

#include <unsupported/Eigen/FFT>

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <complex>
#include <string>
#include <string_view>

#include "cvo/angles.hpp"
#include "cvo/feature_map.hpp"

namespace cvo {

template <typename Scalar>
using CorrelationCurve = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

enum class Method { fi, cs };

inline std::string_view to_string(Method method) { return method == Method::fi ? "fi" : "cs"; }

inline Method parse_method(std::string_view name) {
  if (name == "fi" || name == "FI") return Method::fi;
  if (name == "cs" || name == "CS") return Method::cs;
  throw std::invalid_argument("unknown method '" + std::string(name) + "' (expected fi or cs)");
}

struct OrientationEstimate {
  double w_est = 0.0;  ///< fractional bins in [0, width)
  SouthAlignedAngle theta_est;
  double peak_score = 0.0;
  Method method = Method::fi;
  int scale = 1;
  int width = 0;       ///< coarse satellite feature width
  int fine_index = 0;  ///< argmax on the S * width grid; w_est = fine_index / scale
};

namespace detail {

template <typename Scalar>
Eigen::FFT<Scalar>& fft_engine() {
  thread_local Eigen::FFT<Scalar> engine;
  return engine;
}

template <typename Scalar>
using Spectrum = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, Eigen::Dynamic>;

/// Column-wise DFT of the slices of `map`, zero-padded to `length` rows.
template <typename Scalar>
Spectrum<Scalar> column_spectra(const typename FeatureMap<Scalar>::Columns& columns, int length) {
  auto& fft = fft_engine<Scalar>();
  Spectrum<Scalar> out(length, columns.cols());
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> padded = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>::Zero(length);
  Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, 1> spectrum;
  for (Eigen::Index c = 0; c < columns.cols(); ++c) {
    padded.head(columns.rows()) = columns.col(c);
    fft.fwd(spectrum, padded);
    out.col(c) = spectrum;
  }
  return out;
}

/// curve[w] = sum_c sum_m q[m, c] * s[(m + w) mod N, c] via conj(Q) * S.
template <typename Scalar>
CorrelationCurve<Scalar> correlate_spectra(const Spectrum<Scalar>& query, const Spectrum<Scalar>& candidate) {
  Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, 1> cross =
      query.conjugate().cwiseProduct(candidate).rowwise().sum();
  Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, 1> time;
  fft_engine<Scalar>().inv(time, cross);
  return time.real();
}

/// Exact Eq. (2) term for a single shift.
template <typename Scalar>
Scalar correlation_at(const typename FeatureMap<Scalar>::Columns& query,
                      const typename FeatureMap<Scalar>::Columns& candidate, Eigen::Index shift) {
  const Eigen::Index n = candidate.rows();
  Scalar sum(0);
  for (Eigen::Index m = 0; m < query.rows(); ++m) sum += query.row(m).dot(candidate.row((m + shift) % n));
  return sum;
}

template <typename Derived>
Eigen::Index argmax_lowest(const Eigen::MatrixBase<Derived>& values) {
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < values.size(); ++i)
    if (values[i] > values[best]) best = i;
  return best;
}

}  // namespace detail

template <typename Scalar>
void check_correlation_shapes(const FeatureMap<Scalar>& street, const FeatureMap<Scalar>& satellite) {
  require(street.height() == satellite.height() && street.channels() == satellite.channels(),
          "feature maps differ in height or channel count");
  require(street.width() <= satellite.width(), "street feature width exceeds satellite feature width");
}

/// Direct evaluation of the circular cross-correlation; length W_s.
template <typename Scalar>
CorrelationCurve<Scalar> cross_correlate(const FeatureMap<Scalar>& street, const FeatureMap<Scalar>& satellite) {
  check_correlation_shapes(street, satellite);
  CorrelationCurve<Scalar> curve(satellite.width());
  for (int w = 0; w < satellite.width(); ++w)
    curve[w] = detail::correlation_at<Scalar>(street.columns(), satellite.columns(), w);
  return curve;
}

/// Band-limited interpolation of a circular curve by `scale` through
/// zero-padding its spectrum in the middle. For even widths the Nyquist bin is
/// halved and placed at both symmetric positions so the result is real and
/// passes through every input sample: out[S*k] == in[k].
template <typename Scalar>
CorrelationCurve<Scalar> spectral_zero_pad(const CorrelationCurve<Scalar>& curve, int scale) {
  require(scale >= 1, "invalid scaling factor: must be >= 1");
  const Eigen::Index width = curve.size();
  require(width >= 2, "curve must have at least two samples");
  using Complex = std::complex<Scalar>;
  auto& fft = detail::fft_engine<Scalar>();

  Eigen::Matrix<Complex, Eigen::Dynamic, 1> spectrum;
  CorrelationCurve<Scalar> input = curve;
  fft.fwd(spectrum, input);

  const Eigen::Index length = width * scale;
  Eigen::Matrix<Complex, Eigen::Dynamic, 1> padded = Eigen::Matrix<Complex, Eigen::Dynamic, 1>::Zero(length);
  const Eigen::Index half = width / 2;
  if (width % 2 == 0) {
    padded.head(half) = spectrum.head(half);
    padded[half] += spectrum[half] / Scalar(2);
    padded[length - half] += spectrum[half] / Scalar(2);
    padded.tail(half - 1) = spectrum.tail(half - 1);
  } else {
    padded.head(half + 1) = spectrum.head(half + 1);
    padded.tail(half) = spectrum.tail(half);
  }

  Eigen::Matrix<Complex, Eigen::Dynamic, 1> smooth;
  fft.inv(smooth, padded);
  return smooth.real() * static_cast<Scalar>(scale);
}

/// Feature map plus cached spectra for repeated correlation.
///
/// A candidate (satellite) is prepared against its own width. A query (street)
/// is prepared against the candidate width it will be correlated with; when it
/// is narrower (limited FOV) its interpolated map ends at the last real column
/// instead of wrapping back to the first.
template <typename Scalar>
class PreparedFeatures {
 public:
  PreparedFeatures() = default;

  static PreparedFeatures candidate(const FeatureMap<Scalar>& map, int scale) {
    return PreparedFeatures(map, scale, map.width());
  }
  static PreparedFeatures query(const FeatureMap<Scalar>& map, int scale, int candidate_width) {
    return PreparedFeatures(map, scale, candidate_width);
  }

  const FeatureMap<Scalar>& coarse() const { return coarse_; }
  const typename FeatureMap<Scalar>::Columns& fine() const { return fine_; }
  const detail::Spectrum<Scalar>& coarse_spectrum() const { return coarse_spectrum_; }
  const detail::Spectrum<Scalar>& fine_spectrum() const { return fine_spectrum_; }
  int scale() const { return scale_; }
  int correlation_width() const { return correlation_width_; }

 private:
  PreparedFeatures(const FeatureMap<Scalar>& map, int scale, int correlation_width)
      : coarse_(map), scale_(scale), correlation_width_(correlation_width) {
    require(scale >= 1, "invalid scaling factor: must be >= 1");
    require(map.width() <= correlation_width, "street feature width exceeds satellite feature width");
    fine_ = interpolate_width(map, scale).columns();
    if (map.width() < correlation_width) fine_.conservativeResize((map.width() - 1) * scale + 1, Eigen::NoChange);
    coarse_spectrum_ = detail::column_spectra<Scalar>(map.columns(), correlation_width);
    fine_spectrum_ = detail::column_spectra<Scalar>(fine_, correlation_width * scale);
  }

  FeatureMap<Scalar> coarse_;
  typename FeatureMap<Scalar>::Columns fine_;
  detail::Spectrum<Scalar> coarse_spectrum_;
  detail::Spectrum<Scalar> fine_spectrum_;
  int scale_ = 1;
  int correlation_width_ = 0;
};

template <typename Scalar>
void check_prepared(const PreparedFeatures<Scalar>& street, const PreparedFeatures<Scalar>& satellite) {
  check_correlation_shapes(street.coarse(), satellite.coarse());
  require(street.scale() == satellite.scale(), "prepared features use different scaling factors");
  require(street.correlation_width() == satellite.coarse().width(),
          "street features were prepared for a different satellite width");
}

template <typename Scalar>
OrientationEstimate make_estimate(Eigen::Index fine_index, Scalar peak, Method method, int scale, int width) {
  OrientationEstimate e;
  e.fine_index = static_cast<int>(fine_index);
  e.w_est = static_cast<double>(fine_index) / scale;
  e.theta_est = bins_to_degrees(e.w_est, width);
  e.peak_score = static_cast<double>(peak);
  e.method = method;
  e.scale = scale;
  e.width = width;
  return e;
}

/// Feature interpolation. The fine curve is computed spectrally; every shift
/// within rounding distance of the maximum is re-evaluated exactly, so the
/// result is the argmax of the direct sum.
template <typename Scalar>
OrientationEstimate estimate_fi(const PreparedFeatures<Scalar>& street, const PreparedFeatures<Scalar>& satellite) {
  check_prepared(street, satellite);
  const CorrelationCurve<Scalar> curve = detail::correlate_spectra(street.fine_spectrum(), satellite.fine_spectrum());
  const Scalar top = curve.maxCoeff();
  const Scalar bound = street.fine().norm() * satellite.fine().norm();
  const Scalar slack = bound * Scalar(std::is_same_v<Scalar, float> ? 1e-4 : 1e-9);

  Eigen::Index best = -1;
  Scalar best_value(0);
  for (Eigen::Index w = 0; w < curve.size(); ++w) {
    if (curve[w] < top - slack) continue;
    const Scalar exact = detail::correlation_at<Scalar>(street.fine(), satellite.fine(), w);
    if (best < 0 || exact > best_value) {
      best = w;
      best_value = exact;
    }
  }
  return make_estimate(best, best_value, Method::fi, street.scale(), satellite.coarse().width());
}

template <typename Scalar>
OrientationEstimate estimate_cs(const PreparedFeatures<Scalar>& street, const PreparedFeatures<Scalar>& satellite) {
  check_prepared(street, satellite);
  const CorrelationCurve<Scalar> coarse =
      detail::correlate_spectra(street.coarse_spectrum(), satellite.coarse_spectrum());
  const CorrelationCurve<Scalar> smooth = spectral_zero_pad(coarse, street.scale());
  const Eigen::Index best = detail::argmax_lowest(smooth);
  return make_estimate(best, smooth[best], Method::cs, street.scale(), satellite.coarse().width());
}

template <typename Scalar>
OrientationEstimate estimate(const PreparedFeatures<Scalar>& street, const PreparedFeatures<Scalar>& satellite,
                             Method method) {
  return method == Method::fi ? estimate_fi(street, satellite) : estimate_cs(street, satellite);
}

template <typename Scalar>
OrientationEstimate estimate(const FeatureMap<Scalar>& street, const FeatureMap<Scalar>& satellite, Method method,
                             int scale) {
  check_correlation_shapes(street, satellite);
  return estimate(PreparedFeatures<Scalar>::query(street, scale, satellite.width()),
                  PreparedFeatures<Scalar>::candidate(satellite, scale), method);
}

template <typename Scalar>
OrientationEstimate estimate_fi(const FeatureMap<Scalar>& street, const FeatureMap<Scalar>& satellite, int scale) {
  return estimate(street, satellite, Method::fi, scale);
}

template <typename Scalar>
OrientationEstimate estimate_cs(const FeatureMap<Scalar>& street, const FeatureMap<Scalar>& satellite, int scale) {
  return estimate(street, satellite, Method::cs, scale);
}

/// Output width for a field of view on `width` bins: round(fov/360 * width), at least 1.
inline int fov_bins(int width, double fov_degrees) {
  require(fov_degrees > 0.0 && fov_degrees <= 360.0, "invalid field of view: must be in (0, 360]");
  return std::max(1, static_cast<int>(std::lround(fov_degrees / 360.0 * width)));
}

/// Rolls satellite features left by w_est bins so they line up with the
/// street features, then keeps the first fov/360 * W_s bins.
template <typename Scalar>
FeatureMap<Scalar> align_and_crop(const FeatureMap<Scalar>& satellite, double w_est, double fov_degrees) {
  const int width = fov_bins(satellite.width(), fov_degrees);
  require(w_est >= 0.0 && w_est < satellite.width(), "alignment shift out of range [0, width)");
  return sample_columns(satellite, w_est, width);
}

/// Cosine similarity in [-1, 1].
template <typename Scalar>
Scalar similarity(const FeatureMap<Scalar>& street, const FeatureMap<Scalar>& satellite_aligned) {
  const Scalar na = frobenius_norm(street);
  const Scalar nb = frobenius_norm(satellite_aligned);
  if (!(na > Scalar(0)) || !(nb > Scalar(0))) throw DegenerateInput("degenerate features: zero norm");
  const Scalar cosine = dot(street, satellite_aligned) / (na * nb);
  return std::clamp(cosine, Scalar(-1), Scalar(1));
}

}  // namespace cvo
