#include <algorithm>
#include <cmath>
#include <string>

#include "kornkit/error.hpp"
#include "kornkit/transport.hpp"

namespace kornkit {

double operator_inf_norm(const Eigen::Ref<const Eigen::MatrixXd>& m) {
  if (m.size() == 0) return 0.0;
  return m.cwiseAbs().rowwise().sum().maxCoeff();
}

LineCoefficient LineCoefficient::constant(const Eigen::MatrixXd& g, double a, double b) {
  if (g.rows() != g.cols()) throw Error(ErrorKind::DimensionMismatch, "coefficient must be square");
  LineCoefficient c;
  c.a = a;
  c.b = b;
  c.dim = static_cast<int>(g.rows());
  c.sampler = [g](double) { return g; };
  return c;
}

// ---------------------------------------------------------------- quadrature

namespace {

constexpr double kGaussOffset = 0.57735026918962576451;  // 1 / sqrt(3)

struct QuadLeaf {
  double lo;
  double hi;
  double value;
};

class AdaptiveNormIntegral {
 public:
  AdaptiveNormIntegral(const LineCoefficient& g, const QuadratureSettings& s) : g_(g), s_(s) {}

  IntegrabilityReport run(double from, double to, std::vector<QuadLeaf>* leaves) {
    report_ = {};
    leaves_ = leaves;
    if (!(from <= to)) throw Error(ErrorKind::InvalidArgument, "quadrature needs from <= to");
    if (from == to) return report_;
    const double whole = gauss(from, to);
    if (report_.finite) refine(from, to, whole, 0);
    return report_;
  }

 private:
  double norm_at(double t) {
    ++report_.evaluations;
    const Eigen::MatrixXd m = g_.sampler(t);
    const double v = operator_inf_norm(m);
    if (!std::isfinite(v)) fail("non-finite coefficient at t = " + std::to_string(t));
    return v;
  }

  double gauss(double lo, double hi) {
    const double mid = 0.5 * (lo + hi);
    const double half = 0.5 * (hi - lo);
    return half * (norm_at(mid - half * kGaussOffset) + norm_at(mid + half * kGaussOffset));
  }

  void fail(const std::string& why) {
    if (report_.finite) {
      report_.finite = false;
      report_.reason = why;
    }
  }

  void accept(double lo, double mid, double hi, double left, double right) {
    if (leaves_) {
      leaves_->push_back({lo, mid, left});
      leaves_->push_back({mid, hi, right});
    }
    report_.integral += left + right;
    if (report_.integral > s_.value_cap) {
      fail("integral exceeds cap " + std::to_string(s_.value_cap));
    }
  }

  void refine(double lo, double hi, double whole, int depth) {
    if (!report_.finite) return;
    report_.deepest_level = std::max(report_.deepest_level, depth + 1);
    const double mid = 0.5 * (lo + hi);
    const double left = gauss(lo, mid);
    const double right = gauss(mid, hi);
    if (!report_.finite) return;
    const double fine = left + right;
    if (std::abs(whole - fine) <= std::max(s_.abs_tol, s_.rel_tol * std::abs(fine))) {
      accept(lo, mid, hi, left, right);
      return;
    }
    if (depth + 1 >= s_.max_depth) {
      if (std::abs(fine) <= s_.negligible_leaf) {
        accept(lo, mid, hi, left, right);
      } else {
        fail("no convergence after " + std::to_string(s_.max_depth) +
             " dyadic refinements near t = " + std::to_string(mid));
      }
      return;
    }
    refine(lo, mid, left, depth + 1);
    refine(mid, hi, right, depth + 1);
  }

  const LineCoefficient& g_;
  const QuadratureSettings& s_;
  IntegrabilityReport report_;
  std::vector<QuadLeaf>* leaves_ = nullptr;
};

}  // namespace

IntegrabilityReport estimate_integrability(const LineCoefficient& g, double from, double to,
                                           const QuadratureSettings& settings) {
  return AdaptiveNormIntegral(g, settings).run(from, to, nullptr);
}

// ---------------------------------------------------------------- RK4

namespace {

Eigen::MatrixXd checked_sample(const LineCoefficient& g, double t) {
  Eigen::MatrixXd m = g.sampler(t);
  if (m.rows() != g.dim || m.cols() != g.dim) {
    throw Error(ErrorKind::DimensionMismatch, "coefficient sample has the wrong shape");
  }
  if (!m.allFinite()) {
    throw Error(ErrorKind::NonFiniteCoefficient, "G(" + std::to_string(t) + ") is not finite");
  }
  return m;
}

Trajectory rk4(const LineCoefficient& g, const Eigen::VectorXd& zeta0, int steps) {
  Trajectory tr;
  tr.times.reserve(static_cast<std::size_t>(steps) + 1);
  tr.values.reserve(static_cast<std::size_t>(steps) + 1);
  const double span = g.b - g.a;
  const double h = span / steps;
  Eigen::VectorXd z = zeta0;
  Eigen::MatrixXd g_start = checked_sample(g, g.a);
  tr.times.push_back(g.a);
  tr.values.push_back(z);
  for (int k = 0; k < steps; ++k) {
    const double t = g.a + span * k / steps;
    const double t_next = (k + 1 == steps) ? g.b : g.a + span * (k + 1) / steps;
    const Eigen::MatrixXd g_mid = checked_sample(g, t + 0.5 * h);
    Eigen::MatrixXd g_end = checked_sample(g, t_next);
    const Eigen::VectorXd k1 = g_start * z;
    const Eigen::VectorXd k2 = g_mid * (z + 0.5 * h * k1);
    const Eigen::VectorXd k3 = g_mid * (z + 0.5 * h * k2);
    const Eigen::VectorXd k4 = g_end * (z + h * k3);
    z += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    g_start = std::move(g_end);
    tr.times.push_back(t_next);
    tr.values.push_back(z);
  }
  return tr;
}

}  // namespace

Trajectory integrate_line(const LineCoefficient& g, const Eigen::VectorXd& zeta0, int steps) {
  if (steps < 2) throw Error(ErrorKind::InvalidArgument, "integrate_line needs steps >= 2");
  if (!(g.b > g.a)) throw Error(ErrorKind::InvalidArgument, "integrate_line needs a < b");
  if (zeta0.size() != g.dim) {
    throw Error(ErrorKind::DimensionMismatch, "initial value does not match coefficient size");
  }
  Trajectory coarse = rk4(g, zeta0, steps);
  const Trajectory fine = rk4(g, zeta0, 2 * steps);
  coarse.error_estimates.resize(coarse.values.size());
  for (std::size_t k = 0; k < coarse.values.size(); ++k) {
    coarse.error_estimates[k] = (coarse.values[k] - fine.values[2 * k]).lpNorm<Eigen::Infinity>();
  }
  return coarse;
}

// ---------------------------------------------------------------- Gronwall

GronwallEnvelope::GronwallEnvelope(LineCoefficient g, double zeta_a_norm, QuadratureSettings settings)
    : g_(std::move(g)), zeta_a_norm_(zeta_a_norm), settings_(settings) {
  if (!(zeta_a_norm >= 0.0)) throw Error(ErrorKind::InvalidArgument, "|zeta(a)| must be >= 0");
  std::vector<QuadLeaf> leaves;
  const IntegrabilityReport rep = AdaptiveNormIntegral(g_, settings_).run(g_.a, g_.b, &leaves);
  if (!rep.finite) throw Error(ErrorKind::NotIntegrable, rep.reason);
  double running = 0.0;
  leaves_.reserve(leaves.size());
  for (const QuadLeaf& leaf : leaves) {
    leaves_.push_back({leaf.lo, leaf.hi, running});
    running += leaf.value;
  }
  total_ = running;
}

double GronwallEnvelope::integral_to(double x) const {
  if (x < g_.a || x > g_.b) throw Error(ErrorKind::InvalidArgument, "x outside [a, b]");
  if (leaves_.empty()) return 0.0;
  auto it = std::upper_bound(leaves_.begin(), leaves_.end(), x,
                             [](double v, const Leaf& leaf) { return v < leaf.hi; });
  if (it == leaves_.end()) return total_;
  if (x <= it->lo) return it->cumulative_before;
  const IntegrabilityReport partial = estimate_integrability(g_, it->lo, x, settings_);
  if (!partial.finite) throw Error(ErrorKind::NotIntegrable, partial.reason);
  return it->cumulative_before + partial.integral;
}

double GronwallEnvelope::operator()(double x) const {
  if (zeta_a_norm_ == 0.0) return 0.0;
  return zeta_a_norm_ * std::exp(integral_to(x));
}

GronwallEnvelope gronwall_bound(const LineCoefficient& g, double zeta_a_norm,
                                const QuadratureSettings& settings) {
  return GronwallEnvelope(g, zeta_a_norm, settings);
}

// ---------------------------------------------------------------- 1/t

CounterexampleReport counterexample_demo(double epsilon, int steps) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "epsilon must lie in (0, 1)");
  }
  CounterexampleReport rep;
  rep.epsilon = epsilon;

  // zeta(t) = t is a nonzero solution of zeta' = zeta / t.
  constexpr int kSamples = 1000;
  const double h = (1.0 - epsilon) / kSamples;
  std::vector<double> t(kSamples + 1);
  for (int k = 0; k <= kSamples; ++k) t[static_cast<std::size_t>(k)] = epsilon + k * h;
  for (int k = 0; k <= kSamples; ++k) {
    const double tk = t[static_cast<std::size_t>(k)];
    const double zeta = tk;
    rep.analytic_residual = std::max(rep.analytic_residual, std::abs(1.0 - zeta / tk));
    double d = 0.0;
    if (k == 0) {
      d = (-3.0 * t[0] + 4.0 * t[1] - t[2]) / (2.0 * h);
    } else if (k == kSamples) {
      d = (3.0 * t[kSamples] - 4.0 * t[kSamples - 1] + t[kSamples - 2]) / (2.0 * h);
    } else {
      d = (t[static_cast<std::size_t>(k + 1)] - t[static_cast<std::size_t>(k - 1)]) / (2.0 * h);
    }
    rep.numeric_residual = std::max(rep.numeric_residual, std::abs(d - zeta / tk));
  }

  LineCoefficient inv_t;
  inv_t.a = epsilon;
  inv_t.b = 1.0;
  inv_t.dim = 1;
  inv_t.sampler = [](double s) { return Eigen::MatrixXd::Constant(1, 1, 1.0 / s); };
  rep.integrated_final = integrate_line(inv_t, Eigen::VectorXd::Constant(1, epsilon), steps)
                             .final_value()(0);

  // The same coefficient on [0, 1] is not integrable.
  LineCoefficient singular = inv_t;
  singular.a = 0.0;
  rep.singular_integral = estimate_integrability(singular, 0.0, 1.0);

  // Truncated coefficient is in L^1, so zero data stays zero.
  LineCoefficient truncated;
  truncated.a = 0.0;
  truncated.b = 1.0;
  truncated.dim = 1;
  truncated.sampler = [epsilon](double s) {
    return Eigen::MatrixXd::Constant(1, 1, 1.0 / std::max(s, epsilon));
  };
  const IntegrabilityReport trunc = estimate_integrability(truncated, 0.0, 1.0);
  rep.truncated_integral = trunc.integral;
  const Trajectory zero = integrate_line(truncated, Eigen::VectorXd::Zero(1), steps);
  for (const Eigen::VectorXd& v : zero.values) {
    rep.truncated_zero_max = std::max(rep.truncated_zero_max, v.lpNorm<Eigen::Infinity>());
  }

  rep.pass = rep.analytic_residual <= 1e-12 && rep.numeric_residual <= 1e-12 &&
             std::abs(rep.integrated_final - 1.0) <= 1e-6 && !rep.singular_integral.finite &&
             trunc.finite && rep.truncated_zero_max <= 1e-10;
  return rep;
}

}  // namespace kornkit
