#pragma once

// Linear array model: geometry, excitations, failure masks, far-field
// pattern evaluation and the pattern metrics built on it.
//
// Positions are expressed in wavelengths, so the phase of element n at
// direction u = sin(theta) is 2*pi*x_n*u.

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace arrayfix {

using Complex = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;

/// Floor used in place of -inf when a pattern value is exactly zero.
inline constexpr double kDbFloor = -300.0;

/// Relative power threshold (dB) defining the half-power beamwidth.
inline constexpr double kHalfPowerDb = -3.0103;

class ArrayGeometry {
 public:
  /// Throws InvalidArgument unless positions has at least two strictly
  /// increasing finite entries.
  explicit ArrayGeometry(std::vector<double> positions);

  std::size_t size() const { return positions_.size(); }
  std::span<const double> positions() const { return positions_; }
  double position(std::size_t n) const { return positions_[n]; }

  /// exp(j*2*pi*x_n*u)
  Complex steering(std::size_t n, double u) const;

  bool operator==(const ArrayGeometry&) const = default;

 private:
  std::vector<double> positions_;
};

/// Uniform spacing, centered on the origin: x_n = (n - (N+1)/2) * spacing.
ArrayGeometry uniform_positions(int element_count, double spacing = 0.5);

/// Complex excitation vector. Used for original, faulty, corrected weights
/// and for correction vectors alike.
class Excitations {
 public:
  Excitations() = default;
  explicit Excitations(std::vector<Complex> weights);
  static Excitations zeros(std::size_t n);
  static Excitations from_real(std::span<const double> weights);

  std::size_t size() const { return weights_.size(); }
  std::span<const Complex> weights() const { return weights_; }
  const Complex& operator[](std::size_t n) const { return weights_[n]; }
  void set(std::size_t n, Complex value);

  bool is_real() const;

  Excitations operator+(const Excitations& other) const;
  Excitations operator-(const Excitations& other) const;
  Excitations scaled(Complex factor) const;

  bool operator==(const Excitations&) const = default;

 private:
  std::vector<Complex> weights_;
};

/// Binary failure mask. Internally 0-based; I/O layers convert from the
/// 1-based indices used in scenario files.
class FailureScenario {
 public:
  explicit FailureScenario(std::vector<std::uint8_t> mask);
  /// Builds a mask of size n from 0-based faulty indices.
  static FailureScenario from_indices(std::size_t n, std::span<const std::size_t> faulty);
  static FailureScenario none(std::size_t n);

  std::size_t size() const { return mask_.size(); }
  bool is_faulty(std::size_t n) const { return mask_[n] != 0; }
  std::span<const std::uint8_t> mask() const { return mask_; }

  std::size_t failed_count() const;       // N_F
  std::size_t reconfigurable_count() const;  // N_C
  std::vector<std::size_t> faulty_indices() const;
  std::vector<std::size_t> working_indices() const;

  /// Throws InvalidArgument when every element is faulty.
  void require_reconfigurable() const;

 private:
  std::vector<std::uint8_t> mask_;
};

/// Sorted, deduplicated set of u samples in [-1, 1].
class AngularRegion {
 public:
  AngularRegion() = default;
  explicit AngularRegion(std::vector<double> samples);
  /// num_points uniform samples over [-1, 1].
  static AngularRegion uniform_grid(int num_points);

  std::size_t size() const { return samples_.size(); }
  bool empty() const { return samples_.empty(); }
  std::span<const double> samples() const { return samples_; }

  /// True if u in region <=> -u in region.
  bool is_symmetric(double tol = 1e-12) const;

 private:
  std::vector<double> samples_;
};

enum class MetricKind { kMaxSidelobe };

struct MetricSpec {
  MetricKind kind = MetricKind::kMaxSidelobe;
  AngularRegion region;
  double target_db = 0.0;

  void validate() const;
};

/// F(u) = sum_n w_n exp(j 2 pi x_n u).
Complex array_factor(const ArrayGeometry& geometry, const Excitations& weights, double u);

/// |F(u)|^2 / |F(0)|^2 in dB, floored at kDbFloor.
double sll_db(const ArrayGeometry& geometry, const Excitations& weights, double u);

/// Normalized pattern over a set of u values, in dB.
std::vector<double> pattern_db(const ArrayGeometry& geometry, const Excitations& weights,
                               std::span<const double> u);

double max_sll(const ArrayGeometry& geometry, const Excitations& weights,
               const AngularRegion& region);

/// Evaluates a metric for a given full (corrected) weight vector.
double evaluate_metric(const ArrayGeometry& geometry, const Excitations& weights,
                       const MetricSpec& metric);

/// Width in degrees of the contiguous interval around u = 0 where the
/// normalized pattern stays at or above threshold_db. Crossings are located
/// by linear interpolation in (u, dB) between grid samples.
double beamwidth(const ArrayGeometry& geometry, const Excitations& weights, double threshold_db,
                 const AngularRegion& grid);

double hpbw(const ArrayGeometry& geometry, const Excitations& weights, const AngularRegion& grid);

/// max over adjacent pairs of max(|a|/|b|, |b|/|a|); pairs with a zero
/// element are skipped.
double dynamic_range(const Excitations& weights);

/// Uniform u grid with |u| < sin(bw/2) removed. The two edge directions
/// +-sin(bw/2) are added explicitly so the constraint reaches the mainlobe
/// boundary exactly.
AngularRegion sidelobe_region(double bw_target_deg, int grid_density);

inline constexpr int kDefaultBeamGrid = 4001;

}  // namespace arrayfix
