#include "arrayfix/taper.hpp"

#include <cmath>
#include <vector>

#include "arrayfix/errors.hpp"

namespace arrayfix {

namespace {

// T_order(x), valid for |x| > 1 as well.
double chebyshev_t(int order, double x) {
  if (std::abs(x) <= 1.0) return std::cos(order * std::acos(x));
  const double mag = std::cosh(order * std::acosh(std::abs(x)));
  return (x < 0.0 && order % 2 == 1) ? -mag : mag;
}

}  // namespace

Excitations dolph_chebyshev(int element_count, double sll_db) {
  if (element_count < 3) throw InvalidArgument("dolph_chebyshev: N must be >= 3");
  if (!(sll_db < 0.0) || !std::isfinite(sll_db)) {
    throw InvalidArgument("dolph_chebyshev: sidelobe level must be negative");
  }
  const int n = element_count;
  const int order = n - 1;
  const double ratio = std::pow(10.0, -sll_db / 20.0);
  const double x0 = std::cosh(std::acosh(ratio) / order);

  // With d = lambda/2 the pattern is P(psi) = sum_m w_m exp(j p_m psi),
  // psi = pi*u, p_m = m - (N-1)/2, and the Chebyshev design is
  // P(psi) = T_{N-1}(x0 cos(psi/2)). Sampling at psi_k = 2 pi k / N
  // determines the N weights exactly.
  std::vector<double> samples(static_cast<std::size_t>(n));
  std::vector<double> psi(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    psi[k] = 2.0 * kPi * k / n;
    samples[k] = chebyshev_t(order, x0 * std::cos(psi[k] / 2.0));
  }
  std::vector<double> w(static_cast<std::size_t>(n));
  for (int m = 0; m < n; ++m) {
    const double p = m - (n - 1) / 2.0;
    double acc = 0.0;
    for (int k = 0; k < n; ++k) acc += samples[k] * std::cos(p * psi[k]);
    w[m] = acc / n;
  }
  // Enforce exact symmetry before normalizing.
  for (int m = 0; m < n / 2; ++m) {
    const double avg = 0.5 * (w[m] + w[n - 1 - m]);
    w[m] = avg;
    w[n - 1 - m] = avg;
  }
  double peak = 0.0;
  for (double v : w) peak = std::max(peak, std::abs(v));
  for (double& v : w) v /= peak;
  return Excitations::from_real(w);
}

Excitations apply_failures(const Excitations& original, const FailureScenario& scenario) {
  if (original.size() != scenario.size()) {
    throw InvalidArgument("apply_failures: length mismatch");
  }
  std::vector<Complex> out(original.weights().begin(), original.weights().end());
  for (std::size_t n = 0; n < out.size(); ++n) {
    if (scenario.is_faulty(n)) out[n] = 0.0;
  }
  return Excitations(std::move(out));
}

Excitations corrected_weights(const Excitations& faulty, const Excitations& delta,
                              const FailureScenario& scenario) {
  if (faulty.size() != delta.size() || faulty.size() != scenario.size()) {
    throw InvalidArgument("corrected_weights: length mismatch");
  }
  for (std::size_t n = 0; n < delta.size(); ++n) {
    if (scenario.is_faulty(n) && delta[n] != Complex{0.0, 0.0}) {
      throw ConstraintViolation("correction applied to failed element " + std::to_string(n + 1));
    }
  }
  return faulty + delta;
}

}  // namespace arrayfix
