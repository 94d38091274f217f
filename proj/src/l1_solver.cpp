#include "arrayfix/l1_solver.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "arrayfix/errors.hpp"

namespace arrayfix {

void SolverConfig::validate() const {
  if (max_iterations <= 0) throw InvalidArgument("max_iterations must be positive");
  if (!(min_step > 0.0)) throw InvalidArgument("min_step must be positive");
  if (!(optimality_tol > 0.0)) throw InvalidArgument("optimality_tol must be positive");
  if (!(constraint_tol_db > 0.0) || constraint_tol_db >= 1.0) {
    throw InvalidArgument("constraint_tol_db must lie in (0, 1)");
  }
  if (!(zero_threshold >= 0.0)) throw InvalidArgument("zero_threshold must be non-negative");
  if (!(barrier_initial > 0.0)) throw InvalidArgument("barrier_initial must be positive");
  if (!(barrier_growth > 1.0)) throw InvalidArgument("barrier_growth must exceed 1");
  if (!(broadside_floor > 0.0) || broadside_floor >= 1.0) {
    throw InvalidArgument("broadside_floor must lie in (0, 1)");
  }
  if (max_linearizations <= 0) throw InvalidArgument("max_linearizations must be positive");
}

ZeroMask::ZeroMask(std::vector<std::uint8_t> mask) : mask_(std::move(mask)) {
  for (auto m : mask_) {
    if (m > 1) throw InvalidArgument("zero mask entries must be 0 or 1");
  }
}

ZeroMask ZeroMask::from_failures(const FailureScenario& scenario) {
  return ZeroMask(std::vector<std::uint8_t>(scenario.mask().begin(), scenario.mask().end()));
}

ZeroMask ZeroMask::allowing(std::size_t n, std::span<const std::size_t> support) {
  std::vector<std::uint8_t> mask(n, 1);
  for (auto i : support) mask.at(i) = 0;
  return ZeroMask(std::move(mask));
}

std::vector<std::size_t> ZeroMask::free_indices() const {
  std::vector<std::size_t> out;
  for (std::size_t n = 0; n < mask_.size(); ++n) {
    if (!mask_[n]) out.push_back(n);
  }
  return out;
}

std::size_t ZeroMask::free_count() const {
  return static_cast<std::size_t>(std::count(mask_.begin(), mask_.end(), std::uint8_t{0}));
}

ZeroMask ZeroMask::with_masked(std::size_t n) const {
  auto copy = mask_;
  copy.at(n) = 1;
  return ZeroMask(std::move(copy));
}

double l1_norm(const Excitations& delta) {
  double sum = 0.0;
  for (const auto& d : delta.weights()) sum += std::abs(d);
  return sum;
}

int l0_norm(const Excitations& delta, double zero_threshold) {
  int count = 0;
  for (const auto& d : delta.weights()) count += (std::abs(d) > zero_threshold);
  return count;
}

bool meets_target(const ArrayGeometry& geometry, const Excitations& faulty,
                  const Excitations& delta, const MetricSpec& metric, double constraint_tol_db) {
  try {
    return evaluate_metric(geometry, faulty + delta, metric) <= metric.target_db + constraint_tol_db;
  } catch (const DegenerateBroadside&) {
    return false;
  }
}

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

constexpr double kInf = std::numeric_limits<double>::infinity();

// Cone program in the real unknowns x (one or two per free element).
//
//   region i : (c*rho(x) + sigma)^2 - |a_i + B_i x|^2 > 0
//   floor    : rho(x) - floor + sigma > 0
//   l1 cones : t_k^2 - |x_k|^2 > 0                 (phase II only)
//   ball     : radius^2 - |x|^2 > 0                (phase I only)
//
// where rho(x) = r0 + h.x and sigma is the phase-I slack (absent in phase II).
class ConeProgram {
 public:
  ConeProgram(const ArrayGeometry& geometry, const Excitations& faulty,
              const std::vector<std::size_t>& free, const std::vector<double>& samples,
              bool complex_domain, double amplitude_limit, double floor_ratio)
      : free_(free), complex_(complex_domain) {
    const std::size_t per = complex_ ? 2 : 1;
    p_ = static_cast<int>(free_.size() * per);
    m_ = static_cast<int>(samples.size());
    ar_.resize(m_);
    ai_.resize(m_);
    Ar_.resize(m_, p_);
    Ai_.resize(m_, p_);
    for (int i = 0; i < m_; ++i) {
      const Complex a = array_factor(geometry, faulty, samples[i]);
      ar_[i] = a.real();
      ai_[i] = a.imag();
      for (std::size_t k = 0; k < free_.size(); ++k) {
        const Complex s = geometry.steering(free_[k], samples[i]);
        Ar_(i, static_cast<int>(k * per)) = s.real();
        Ai_(i, static_cast<int>(k * per)) = s.imag();
        if (complex_) {
          // d/d(imag part): j * steering
          Ar_(i, static_cast<int>(k * per + 1)) = -s.imag();
          Ai_(i, static_cast<int>(k * per + 1)) = s.real();
        }
      }
    }
    broadside_ = array_factor(geometry, faulty, 0.0);
    scale_ = 0.0;
    for (const auto& w : faulty.weights()) scale_ += std::abs(w);
    if (scale_ == 0.0) scale_ = 1.0;
    floor_ = floor_ratio * scale_;
    radius_ = amplitude_limit * scale_;
    h_.resize(p_);
    set_phase(0.0);
  }

  int num_vars() const { return p_; }
  int num_free() const { return static_cast<int>(free_.size()); }
  double scale() const { return scale_; }
  bool is_complex() const { return complex_; }

  void set_bound(double c) { c_ = c; }

  // Linearizes |F(0)| around the direction exp(j phase).
  void set_phase(double phase) {
    phase_ = phase;
    const Complex rot = std::polar(1.0, -phase);
    r0_ = (rot * broadside_).real();
    const std::size_t per = complex_ ? 2 : 1;
    for (std::size_t k = 0; k < free_.size(); ++k) {
      h_[static_cast<int>(k * per)] = rot.real();
      if (complex_) h_[static_cast<int>(k * per + 1)] = (rot * Complex{0.0, 1.0}).real();
    }
  }

  Complex broadside(const VectorXd& x) const {
    Complex f = broadside_;
    const std::size_t per = complex_ ? 2 : 1;
    for (std::size_t k = 0; k < free_.size(); ++k) {
      f += complex_ ? Complex{x[static_cast<int>(k * per)], x[static_cast<int>(k * per + 1)]}
                    : Complex{x[static_cast<int>(k)], 0.0};
    }
    return f;
  }

  double rho(const VectorXd& x) const { return r0_ + h_.dot(x); }

  // Largest region violation |y_i| - c*rho and the floor violation, in
  // amplitude units; negative when strictly feasible.
  double violation(const VectorXd& x) const {
    const double rhs = c_ * rho(x);
    const VectorXd yr = ar_ + Ar_ * x;
    const VectorXd yi = ai_ + Ai_ * x;
    double worst = floor_ - rho(x);
    for (int i = 0; i < m_; ++i) worst = std::max(worst, std::hypot(yr[i], yi[i]) - rhs);
    return worst;
  }

  // Barrier objective with gradient/Hessian. z = [x; sigma] in phase I,
  // z = [x; t] in phase II. Returns +inf outside the domain.
  double evaluate(const VectorXd& z, double weight, bool phase1, VectorXd* grad,
                  MatrixXd* hess) const {
    const int dim = static_cast<int>(z.size());
    const auto x = z.head(p_);
    const double sigma = phase1 ? z[p_] : 0.0;
    const double rho_x = r0_ + h_.dot(x);

    // Region cones.
    const VectorXd yr = ar_ + Ar_ * x;
    const VectorXd yi = ai_ + Ai_ * x;
    const double rhs = c_ * rho_x + sigma;
    if (!(rhs > 0.0)) return kInf;
    VectorXd g(m_);
    double value = 0.0;
    for (int i = 0; i < m_; ++i) {
      g[i] = rhs * rhs - yr[i] * yr[i] - yi[i] * yi[i];
      if (!(g[i] > 0.0)) return kInf;
      value -= std::log(g[i]);
    }
    // Floor on the broadside reference.
    const double slack_floor = rho_x - floor_ + sigma;
    if (!(slack_floor > 0.0)) return kInf;
    value -= std::log(slack_floor);

    double ball = 0.0;
    if (phase1) {
      ball = radius_ * radius_ - x.squaredNorm();
      if (!(ball > 0.0)) return kInf;
      value -= std::log(ball);
      value += weight * sigma;
    } else {
      const int per = complex_ ? 2 : 1;
      for (int k = 0; k < num_free(); ++k) {
        const double t = z[p_ + k];
        double xs = 0.0;
        for (int j = 0; j < per; ++j) xs += x[k * per + j] * x[k * per + j];
        const double gk = t * t - xs;
        if (!(t > 0.0) || !(gk > 0.0)) return kInf;
        value -= std::log(gk);
        value += weight * t;
      }
    }
    if (!grad) return value;

    grad->setZero(dim);
    hess->setZero(dim, dim);
    const int k_cols = phase1 ? p_ + 1 : p_;

    // v_i = grad(g_i)/g_i; contributions: grad -= sum v_i,
    // hess += sum v_i v_i^T - sum (2/g_i) e e^T + sum (2/g_i) Y_i^T Y_i.
    const VectorXd inv_g = g.cwiseInverse();
    MatrixXd v(m_, k_cols);
    v.leftCols(p_) = (2.0 * c_ * rhs) * inv_g * h_.transpose();
    v.leftCols(p_).noalias() -= 2.0 * (inv_g.cwiseProduct(yr).asDiagonal() * Ar_);
    v.leftCols(p_).noalias() -= 2.0 * (inv_g.cwiseProduct(yi).asDiagonal() * Ai_);
    if (phase1) v.col(p_) = 2.0 * rhs * inv_g;
    grad->head(k_cols).noalias() -= v.transpose() * VectorXd::Ones(m_);

    auto block = hess->topLeftCorner(k_cols, k_cols);
    block.selfadjointView<Eigen::Lower>().rankUpdate(v.transpose());
    const VectorXd root = (2.0 * inv_g).cwiseSqrt();
    const MatrixXd sr = root.asDiagonal() * Ar_;
    const MatrixXd si = root.asDiagonal() * Ai_;
    auto xx = hess->topLeftCorner(p_, p_);
    xx.selfadjointView<Eigen::Lower>().rankUpdate(sr.transpose());
    xx.selfadjointView<Eigen::Lower>().rankUpdate(si.transpose());
    VectorXd e = VectorXd::Zero(k_cols);
    e.head(p_) = c_ * h_;
    if (phase1) e[p_] = 1.0;
    block.selfadjointView<Eigen::Lower>().rankUpdate(e, -2.0 * inv_g.sum());

    // Floor.
    VectorXd ef = VectorXd::Zero(k_cols);
    ef.head(p_) = h_;
    if (phase1) ef[p_] = 1.0;
    grad->head(k_cols) -= ef / slack_floor;
    block.selfadjointView<Eigen::Lower>().rankUpdate(ef, 1.0 / (slack_floor * slack_floor));

    if (phase1) {
      grad->head(p_) += (2.0 / ball) * x;
      xx.selfadjointView<Eigen::Lower>().rankUpdate(x, 4.0 / (ball * ball));
      xx.diagonal().array() += 2.0 / ball;
      (*grad)[p_] += weight;
    } else {
      const int per = complex_ ? 2 : 1;
      for (int k = 0; k < num_free(); ++k) {
        const int ti = p_ + k;
        const double t = z[ti];
        double xs = 0.0;
        for (int j = 0; j < per; ++j) xs += x[k * per + j] * x[k * per + j];
        const double gk = t * t - xs;
        // grad g = (2t, -2x), hess g = diag(2, -2, ...)
        (*grad)[ti] += -2.0 * t / gk + weight;
        (*hess)(ti, ti) += 4.0 * t * t / (gk * gk) - 2.0 / gk;
        for (int j = 0; j < per; ++j) {
          const int xj = k * per + j;
          (*grad)[xj] += 2.0 * x[xj] / gk;
          (*hess)(ti, xj) += -4.0 * t * x[xj] / (gk * gk);
          (*hess)(xj, xj) += 2.0 / gk;
          for (int l = 0; l <= j; ++l) {
            const int xl = k * per + l;
            (*hess)(xj, xl) += 4.0 * x[xj] * x[xl] / (gk * gk);
          }
        }
      }
    }
    // Only the lower triangle was accumulated.
    *hess = hess->selfadjointView<Eigen::Lower>();
    return value;
  }

  // Barrier parameter (sum of cone degrees) used for the duality-gap bound.
  double barrier_degree(bool phase1) const {
    double theta = 2.0 * m_ + 1.0;
    theta += phase1 ? 1.0 : 2.0 * num_free();
    return theta;
  }

  Excitations to_delta(const VectorXd& x, std::size_t n) const {
    std::vector<Complex> out(n);
    const std::size_t per = complex_ ? 2 : 1;
    for (std::size_t k = 0; k < free_.size(); ++k) {
      out[free_[k]] = complex_ ? Complex{x[static_cast<int>(k * per)],
                                         x[static_cast<int>(k * per + 1)]}
                               : Complex{x[static_cast<int>(k)], 0.0};
    }
    return Excitations(std::move(out));
  }

 private:
  std::vector<std::size_t> free_;
  bool complex_;
  int p_ = 0;
  int m_ = 0;
  VectorXd ar_, ai_;
  MatrixXd Ar_, Ai_;
  VectorXd h_;
  Complex broadside_;
  double phase_ = 0.0;
  double r0_ = 0.0;
  double c_ = 1.0;
  double scale_ = 1.0;
  double floor_ = 0.0;
  double radius_ = 0.0;
};

struct NewtonBudget {
  int remaining;
  int used = 0;
};

enum class CenterExit { kCentered, kMinStep, kBudget, kEarlyStop };

// Damped Newton centering at fixed barrier weight. `stop` is checked after
// every accepted step.
template <typename Stop>
CenterExit center(const ConeProgram& program, VectorXd& z, double weight, bool phase1,
                  const SolverConfig& config, NewtonBudget& budget, Stop&& stop) {
  constexpr double kDecrementTol = 1e-10;
  constexpr double kArmijo = 0.01;
  const int dim = static_cast<int>(z.size());
  VectorXd grad(dim);
  MatrixXd hess(dim, dim);
  while (true) {
    if (budget.remaining <= 0) return CenterExit::kBudget;
    const double value = program.evaluate(z, weight, phase1, &grad, &hess);
    if (!std::isfinite(value)) throw NumericalFailure("barrier iterate left the domain");
    Eigen::LDLT<MatrixXd> ldlt(hess);
    VectorXd step = ldlt.solve(-grad);
    if (ldlt.info() != Eigen::Success || !step.allFinite() || grad.dot(step) >= 0.0) {
      // Regularize a numerically indefinite Hessian.
      const double bump = 1e-12 * std::max(1.0, hess.diagonal().cwiseAbs().maxCoeff());
      hess.diagonal().array() += bump;
      step = hess.ldlt().solve(-grad);
      if (!step.allFinite() || grad.dot(step) >= 0.0) step = -grad;
    }
    const double decrement = -grad.dot(step);
    if (decrement / 2.0 <= kDecrementTol) return CenterExit::kCentered;

    double alpha = 1.0;
    double next = kInf;
    VectorXd trial;
    while (true) {
      trial = z + alpha * step;
      next = program.evaluate(trial, weight, phase1, nullptr, nullptr);
      if (std::isfinite(next) && next <= value - kArmijo * alpha * decrement) break;
      alpha *= 0.5;
      if (alpha * step.norm() < config.min_step) return CenterExit::kMinStep;
    }
    z = std::move(trial);
    --budget.remaining;
    ++budget.used;
    if (stop(z)) return CenterExit::kEarlyStop;
  }
}

// Phase I: minimize the slack sigma until the constraints hold strictly.
// Returns a strictly feasible x or nullopt when the target is unreachable.
std::optional<VectorXd> find_feasible(const ConeProgram& program, const VectorXd& x0,
                                      const SolverConfig& config, NewtonBudget& budget) {
  const int p = program.num_vars();
  if (program.violation(x0) < 0.0) return x0;

  VectorXd z(p + 1);
  z.head(p) = x0;
  const double margin = 0.1 * program.scale();
  z[p] = program.violation(x0) + margin;
  const double theta = program.barrier_degree(true);
  // Strictly negative slack by this much ends phase I at once.
  const double enough = 1e-4 * program.scale();

  double weight = config.barrier_initial * theta / std::max(z[p], 1e-3 * program.scale());
  auto feasible = [&](const VectorXd& zz) { return zz[p] < -enough; };
  while (true) {
    const auto exit = center(program, z, weight, true, config, budget, feasible);
    if (exit == CenterExit::kEarlyStop) return VectorXd(z.head(p));
    if (exit == CenterExit::kBudget) {
      if (z[p] < 0.0) return VectorXd(z.head(p));
      return std::nullopt;
    }
    // sigma* >= sigma - theta/weight; positive lower bound proves infeasibility.
    const double gap = theta / weight;
    if (z[p] - gap > 0.0) return std::nullopt;
    if (gap < config.optimality_tol * program.scale() || exit == CenterExit::kMinStep) {
      if (z[p] < 0.0) return VectorXd(z.head(p));
      return std::nullopt;
    }
    weight *= config.barrier_growth;
  }
}

struct PhaseTwoResult {
  VectorXd x;
  SolveStatus status;
  double gap;
};

PhaseTwoResult minimize_l1(const ConeProgram& program, const VectorXd& x0,
                           const SolverConfig& config, NewtonBudget& budget) {
  const int p = program.num_vars();
  const int q = program.num_free();
  const int per = program.is_complex() ? 2 : 1;
  VectorXd z(p + q);
  z.head(p) = x0;
  for (int k = 0; k < q; ++k) {
    const double mag = x0.segment(k * per, per).norm();
    z[p + k] = 2.0 * mag + 1e-3 * program.scale();
  }
  const double theta = program.barrier_degree(false);
  double weight = config.barrier_initial * theta / std::max(z.tail(q).sum(), 1e-3 * program.scale());
  auto never = [](const VectorXd&) { return false; };
  while (true) {
    const auto exit = center(program, z, weight, false, config, budget, never);
    const double gap = theta / weight;
    if (exit == CenterExit::kBudget) return {z.head(p), SolveStatus::kIterationLimit, gap};
    if (gap <= config.optimality_tol) return {z.head(p), SolveStatus::kConverged, gap};
    if (exit == CenterExit::kMinStep && gap <= 1e3 * config.optimality_tol) {
      return {z.head(p), SolveStatus::kMinStep, gap};
    }
    weight *= config.barrier_growth;
  }
}

std::vector<double> constraint_samples(const AngularRegion& region, bool fold) {
  std::vector<double> u(region.samples().begin(), region.samples().end());
  if (fold) {
    // Real weights: |F(-u)| = |F(u)|.
    for (double& v : u) v = std::abs(v);
    std::sort(u.begin(), u.end());
    u.erase(std::unique(u.begin(), u.end()), u.end());
  }
  return u;
}

}  // namespace

SolveReport solve_constrained_l1_report(const MetricSpec& metric, const ZeroMask& mask,
                                        const Excitations& start, const SolverConfig& config,
                                        const ArrayGeometry& geometry, const Excitations& faulty) {
  config.validate();
  metric.validate();
  const std::size_t n = geometry.size();
  if (mask.size() != n || start.size() != n || faulty.size() != n) {
    throw InvalidArgument("solve_constrained_l1: length mismatch");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (mask.is_masked(i) && start[i] != Complex{0.0, 0.0}) {
      throw ConstraintViolation("start point violates the zero mask");
    }
  }
  const auto free = mask.free_indices();
  if (free.empty()) throw InvalidArgument("zero mask leaves no free entries");

  SolveReport report;
  // Zero is l1-minimal whenever it is feasible.
  if (l1_norm(start) == 0.0 && meets_target(geometry, faulty, start, metric, config.constraint_tol_db)) {
    report.delta = start;
    report.status = SolveStatus::kStartFeasible;
    report.achieved_db = evaluate_metric(geometry, faulty, metric);
    return report;
  }

  bool complex_domain = false;
  switch (config.domain) {
    case CorrectionDomain::kAutomatic:
      complex_domain = !(faulty.is_real() && start.is_real());
      break;
    case CorrectionDomain::kReal:
      complex_domain = false;
      break;
    case CorrectionDomain::kComplex:
      complex_domain = true;
      break;
  }

  constexpr double kAmplitudeLimit = 10.0;
  ConeProgram program(geometry, faulty, free, constraint_samples(metric.region, !complex_domain),
                      complex_domain, kAmplitudeLimit, config.broadside_floor);
  program.set_bound(std::pow(10.0, metric.target_db / 20.0));

  const int per = complex_domain ? 2 : 1;
  VectorXd x(program.num_vars());
  for (std::size_t k = 0; k < free.size(); ++k) {
    const Complex s = start[free[k]];
    x[static_cast<int>(k * per)] = s.real();
    if (complex_domain) x[static_cast<int>(k * per + 1)] = s.imag();
  }
  if (!x.allFinite()) throw NumericalFailure("non-finite start point");

  double phase = 0.0;
  if (complex_domain) {
    const Complex f0 = program.broadside(x);
    phase = std::abs(f0) > 0.0 ? std::arg(f0) : std::arg(program.broadside(VectorXd::Zero(x.size())));
  } else if (program.broadside(x).real() < 0.0) {
    phase = kPi;
  }
  program.set_phase(phase);

  NewtonBudget budget{config.max_iterations};
  auto feasible = find_feasible(program, x, config, budget);
  report.phase1_steps = budget.used;
  if (!feasible) {
    throw Infeasible("no correction on the allowed support meets the target");
  }
  x = *feasible;

  PhaseTwoResult best{x, SolveStatus::kConverged, 0.0};
  for (int round = 0; round < config.max_linearizations; ++round) {
    best = minimize_l1(program, x, config, budget);
    x = best.x;
    if (!x.allFinite()) throw NumericalFailure("non-finite iterate");
    if (!complex_domain) break;
    const double next_phase = std::arg(program.broadside(x));
    const double moved = std::abs(std::remainder(next_phase - phase, 2.0 * kPi));
    phase = next_phase;
    program.set_phase(phase);
    if (moved < 1e-10 || best.status == SolveStatus::kIterationLimit) break;
  }

  report.delta = program.to_delta(x, n);
  report.status = best.status;
  report.gap = best.gap;
  report.newton_steps = budget.used;
  if (!meets_target(geometry, faulty, report.delta, metric, config.constraint_tol_db)) {
    throw NumericalFailure("solver returned a point violating the target");
  }
  report.achieved_db = evaluate_metric(geometry, faulty + report.delta, metric);
  return report;
}

}  // namespace arrayfix
