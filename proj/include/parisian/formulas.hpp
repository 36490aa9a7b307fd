#pragma once

#include <limits>
#include <memory>
#include <vector>

#include "parisian/curve_table.hpp"
#include "parisian/drawdown.hpp"
#include "parisian/flow_grid.hpp"
#include "parisian/kernels.hpp"
#include "parisian/levy_model.hpp"

namespace parisian {

struct QuadratureConfig {
  double panel = 256.0;           ///< grid intervals per unit length
  double rel_tol = 1e-7;          ///< adaptive inner integrals
  double abs_tol = 1e-10;
  double truncation_eps = 1e-10;  ///< tail budget of b = infinity problems
  double max_upper = 500.0;       ///< hard cap on the truncation point

  void validate() const;
};

struct Query {
  double x = 1.0;
  double b = std::numeric_limits<double>::infinity();
  TransformSpec transform;
  DrawdownSpec drawdown = DrawdownSpec::linear(0.8);
  ModelParams model;
  QuadratureConfig quad;

  void validate() const;
};

/// Exit transforms of the reflected process at one start point.
struct ExitValues {
  double upcross = 0.0;  ///< E_x[e^{-q kappa_b}; kappa_b < theta]
  double ruin = 0.0;     ///< E_x[e^{-q theta}; theta < kappa_b]
  [[nodiscard]] double total() const { return upcross + ruin; }
};

[[nodiscard]] double upcross_laplace(const Query& q);
[[nodiscard]] double parisian_ruin_laplace(const Query& q);
[[nodiscard]] double u_xi(const Query& q);
/// Both exit transforms at every x of `xs` from one shared grid. Finite b only.
[[nodiscard]] std::vector<ExitValues> exit_laplace_curve(const Query& base, const std::vector<double>& xs);

/// P_x(theta_lambda < infinity).
[[nodiscard]] double ruin_probability(double x, double lambda, const ModelParams& model,
                                      const DrawdownSpec& drawdown, const QuadratureConfig& quad = {});
[[nodiscard]] std::vector<double> ruin_probability_curve(const std::vector<double>& xs, double lambda,
                                                         const ModelParams& model, const DrawdownSpec& drawdown,
                                                         const QuadratureConfig& quad = {});

/// G(x; b) = E_x[e^{-q T + u U(T) - v R(T)}] with T = kappa_b ^ theta.
[[nodiscard]] double joint_laplace_g(const Query& q);
[[nodiscard]] std::vector<double> joint_laplace_curve(const Query& base, const std::vector<double>& xs);

/// V(x; b) = E_x[int_0^T e^{-qt} dR(t)], finite b or b = infinity.
[[nodiscard]] double expected_injections(const Query& q);
[[nodiscard]] std::vector<double> expected_injections_curve(const Query& base, const std::vector<double>& xs);

/// q-resolvent density of U killed at kappa_b ^ theta, started at q.x.
class ResolventDensity {
 public:
  explicit ResolventDensity(const Query& q);

  [[nodiscard]] double operator()(double u_pos) const;
  /// q times the density integrated over (lo, hi).
  [[nodiscard]] double killed_mass(double lo, double hi) const;
  /// Lowest position the killed process can occupy.
  [[nodiscard]] double support_min() const;

 private:
  Query query_;
  std::shared_ptr<const KernelContext> ctx_;
  std::shared_ptr<FlowGrid> grid_;
};

[[nodiscard]] double resolvent_u_density(const Query& q, double u_pos);
[[nodiscard]] CurveTable resolvent_u_curve(const Query& q, const std::vector<double>& grid);

}  // namespace parisian
