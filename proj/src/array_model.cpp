#include "arrayfix/array_model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "arrayfix/errors.hpp"

namespace arrayfix {

namespace {

double power_ratio_db(double num_sq, double den_sq) {
  if (num_sq <= 0.0) return kDbFloor;
  return std::max(kDbFloor, 10.0 * std::log10(num_sq / den_sq));
}

double u_to_deg(double u) { return std::asin(std::clamp(u, -1.0, 1.0)) * 180.0 / kPi; }

}  // namespace

ArrayGeometry::ArrayGeometry(std::vector<double> positions) : positions_(std::move(positions)) {
  if (positions_.size() < 2) throw InvalidArgument("array needs at least two elements");
  for (std::size_t n = 0; n < positions_.size(); ++n) {
    if (!std::isfinite(positions_[n])) throw InvalidArgument("non-finite element position");
    if (n > 0 && positions_[n] <= positions_[n - 1]) {
      throw InvalidArgument("element positions must be strictly increasing");
    }
  }
}

Complex ArrayGeometry::steering(std::size_t n, double u) const {
  return std::polar(1.0, 2.0 * kPi * positions_[n] * u);
}

ArrayGeometry uniform_positions(int element_count, double spacing) {
  if (element_count < 2) throw InvalidArgument("uniform_positions: N must be >= 2");
  if (!(spacing > 0.0) || !std::isfinite(spacing)) {
    throw InvalidArgument("uniform_positions: spacing must be positive");
  }
  std::vector<double> x(static_cast<std::size_t>(element_count));
  const double center = (element_count + 1) / 2.0;
  for (int n = 1; n <= element_count; ++n) x[n - 1] = (n - center) * spacing;
  return ArrayGeometry(std::move(x));
}

Excitations::Excitations(std::vector<Complex> weights) : weights_(std::move(weights)) {
  for (const auto& w : weights_) {
    if (!std::isfinite(w.real()) || !std::isfinite(w.imag())) {
      throw InvalidArgument("excitations must be finite");
    }
  }
}

Excitations Excitations::zeros(std::size_t n) { return Excitations(std::vector<Complex>(n)); }

Excitations Excitations::from_real(std::span<const double> weights) {
  return Excitations(std::vector<Complex>(weights.begin(), weights.end()));
}

void Excitations::set(std::size_t n, Complex value) {
  if (!std::isfinite(value.real()) || !std::isfinite(value.imag())) {
    throw InvalidArgument("excitations must be finite");
  }
  weights_.at(n) = value;
}

bool Excitations::is_real() const {
  return std::all_of(weights_.begin(), weights_.end(),
                     [](const Complex& w) { return w.imag() == 0.0; });
}

Excitations Excitations::operator+(const Excitations& other) const {
  if (other.size() != size()) throw InvalidArgument("excitation length mismatch");
  std::vector<Complex> out(size());
  for (std::size_t n = 0; n < size(); ++n) out[n] = weights_[n] + other.weights_[n];
  return Excitations(std::move(out));
}

Excitations Excitations::operator-(const Excitations& other) const {
  if (other.size() != size()) throw InvalidArgument("excitation length mismatch");
  std::vector<Complex> out(size());
  for (std::size_t n = 0; n < size(); ++n) out[n] = weights_[n] - other.weights_[n];
  return Excitations(std::move(out));
}

Excitations Excitations::scaled(Complex factor) const {
  std::vector<Complex> out(weights_);
  for (auto& w : out) w *= factor;
  return Excitations(std::move(out));
}

FailureScenario::FailureScenario(std::vector<std::uint8_t> mask) : mask_(std::move(mask)) {
  for (auto m : mask_) {
    if (m > 1) throw InvalidArgument("failure mask entries must be 0 or 1");
  }
}

FailureScenario FailureScenario::from_indices(std::size_t n, std::span<const std::size_t> faulty) {
  std::vector<std::uint8_t> mask(n, 0);
  for (auto i : faulty) {
    if (i >= n) throw InvalidArgument("faulty index out of range");
    mask[i] = 1;
  }
  return FailureScenario(std::move(mask));
}

FailureScenario FailureScenario::none(std::size_t n) {
  return FailureScenario(std::vector<std::uint8_t>(n, 0));
}

std::size_t FailureScenario::failed_count() const {
  return static_cast<std::size_t>(std::count(mask_.begin(), mask_.end(), std::uint8_t{1}));
}

std::size_t FailureScenario::reconfigurable_count() const { return size() - failed_count(); }

std::vector<std::size_t> FailureScenario::faulty_indices() const {
  std::vector<std::size_t> out;
  for (std::size_t n = 0; n < mask_.size(); ++n) {
    if (mask_[n]) out.push_back(n);
  }
  return out;
}

std::vector<std::size_t> FailureScenario::working_indices() const {
  std::vector<std::size_t> out;
  for (std::size_t n = 0; n < mask_.size(); ++n) {
    if (!mask_[n]) out.push_back(n);
  }
  return out;
}

void FailureScenario::require_reconfigurable() const {
  if (reconfigurable_count() == 0) throw InvalidArgument("no reconfigurable elements left");
}

AngularRegion::AngularRegion(std::vector<double> samples) : samples_(std::move(samples)) {
  for (double u : samples_) {
    if (!std::isfinite(u) || u < -1.0 || u > 1.0) {
      throw InvalidArgument("angular samples must lie in [-1, 1]");
    }
  }
  std::sort(samples_.begin(), samples_.end());
  samples_.erase(std::unique(samples_.begin(), samples_.end()), samples_.end());
}

AngularRegion AngularRegion::uniform_grid(int num_points) {
  if (num_points < 2) throw InvalidArgument("grid needs at least two points");
  std::vector<double> u(static_cast<std::size_t>(num_points));
  const double step = 2.0 / (num_points - 1);
  for (int i = 0; i < num_points; ++i) u[i] = -1.0 + i * step;
  // Odd grids hit u = 0 exactly; rounding can leave a 1e-17 residue.
  if (num_points % 2 == 1) u[num_points / 2] = 0.0;
  u.back() = 1.0;
  return AngularRegion(std::move(u));
}

bool AngularRegion::is_symmetric(double tol) const {
  const std::size_t m = samples_.size();
  for (std::size_t i = 0; i < m; ++i) {
    if (std::abs(samples_[i] + samples_[m - 1 - i]) > tol) return false;
  }
  return true;
}

void MetricSpec::validate() const {
  if (!std::isfinite(target_db)) throw InvalidArgument("metric target must be finite");
  if (region.empty()) throw EmptyRegion("metric region is empty");
}

Complex array_factor(const ArrayGeometry& geometry, const Excitations& weights, double u) {
  if (weights.size() != geometry.size()) {
    throw InvalidArgument("array_factor: weights/geometry length mismatch");
  }
  Complex sum{0.0, 0.0};
  for (std::size_t n = 0; n < geometry.size(); ++n) sum += weights[n] * geometry.steering(n, u);
  return sum;
}

double sll_db(const ArrayGeometry& geometry, const Excitations& weights, double u) {
  const double ref = std::norm(array_factor(geometry, weights, 0.0));
  if (ref == 0.0) throw DegenerateBroadside("pattern vanishes at broadside");
  return power_ratio_db(std::norm(array_factor(geometry, weights, u)), ref);
}

std::vector<double> pattern_db(const ArrayGeometry& geometry, const Excitations& weights,
                               std::span<const double> u) {
  const double ref = std::norm(array_factor(geometry, weights, 0.0));
  if (ref == 0.0) throw DegenerateBroadside("pattern vanishes at broadside");
  std::vector<double> out(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    out[i] = power_ratio_db(std::norm(array_factor(geometry, weights, u[i])), ref);
  }
  return out;
}

double max_sll(const ArrayGeometry& geometry, const Excitations& weights,
               const AngularRegion& region) {
  if (region.empty()) throw InvalidArgument("max_sll: empty region");
  const auto p = pattern_db(geometry, weights, region.samples());
  return *std::max_element(p.begin(), p.end());
}

double evaluate_metric(const ArrayGeometry& geometry, const Excitations& weights,
                       const MetricSpec& metric) {
  switch (metric.kind) {
    case MetricKind::kMaxSidelobe:
      return max_sll(geometry, weights, metric.region);
  }
  throw InvalidArgument("unknown metric kind");
}

double beamwidth(const ArrayGeometry& geometry, const Excitations& weights, double threshold_db,
                 const AngularRegion& grid) {
  if (!(threshold_db < 0.0)) throw InvalidArgument("beamwidth: threshold must be negative");
  if (grid.size() < 3) throw InvalidArgument("beamwidth: grid too coarse");
  const auto u = grid.samples();
  const auto p = pattern_db(geometry, weights, u);

  // Sample nearest broadside anchors the mainlobe.
  std::size_t center = 0;
  for (std::size_t i = 1; i < u.size(); ++i) {
    if (std::abs(u[i]) < std::abs(u[center])) center = i;
  }
  if (p[center] < threshold_db) throw NoMainlobe("pattern below threshold at broadside");

  auto crossing = [&](std::size_t inside, std::size_t outside) {
    const double t = (threshold_db - p[inside]) / (p[outside] - p[inside]);
    return u[inside] + t * (u[outside] - u[inside]);
  };

  double right = u.back();
  for (std::size_t i = center + 1; i < u.size(); ++i) {
    if (p[i] < threshold_db) {
      right = crossing(i - 1, i);
      break;
    }
  }
  double left = u.front();
  for (std::size_t i = center; i-- > 0;) {
    if (p[i] < threshold_db) {
      left = crossing(i + 1, i);
      break;
    }
  }
  return u_to_deg(right) - u_to_deg(left);
}

double hpbw(const ArrayGeometry& geometry, const Excitations& weights, const AngularRegion& grid) {
  return beamwidth(geometry, weights, kHalfPowerDb, grid);
}

double dynamic_range(const Excitations& weights) {
  std::size_t nonzero = 0;
  for (const auto& w : weights.weights()) nonzero += (std::abs(w) > 0.0);
  if (nonzero < 2) throw InvalidArgument("dynamic_range: fewer than two nonzero elements");
  double dr = 1.0;
  for (std::size_t n = 0; n + 1 < weights.size(); ++n) {
    const double a = std::abs(weights[n]);
    const double b = std::abs(weights[n + 1]);
    if (a == 0.0 || b == 0.0) continue;
    dr = std::max(dr, std::max(a / b, b / a));
  }
  return dr;
}

AngularRegion sidelobe_region(double bw_target_deg, int grid_density) {
  if (!(bw_target_deg > 0.0) || !(bw_target_deg <= 180.0)) {
    std::ostringstream msg;
    msg << "sidelobe_region: beamwidth " << bw_target_deg << " deg out of (0, 180)";
    throw InvalidArgument(msg.str());
  }
  const double edge = std::sin(bw_target_deg / 2.0 * kPi / 180.0);
  const auto grid = AngularRegion::uniform_grid(grid_density);
  std::vector<double> kept;
  for (double u : grid.samples()) {
    if (std::abs(u) >= edge) kept.push_back(u);
  }
  if (kept.empty() || edge >= 1.0) throw EmptyRegion("sidelobe region excludes every sample");
  kept.push_back(edge);
  kept.push_back(-edge);
  return AngularRegion(std::move(kept));
}

}  // namespace arrayfix
