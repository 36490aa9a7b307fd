#pragma once

#include <functional>
#include <memory>

#include "parisian/drawdown.hpp"
#include "parisian/levy_model.hpp"
#include "parisian/scale_functions.hpp"

namespace parisian {

/// Transform arguments: discount q, Parisian clock rate lambda, tilt u on the
/// surplus and tilt v on cumulative injections.
struct TransformSpec {
  double q = 0.05;
  double lambda = 0.2;
  double u = 0.0;
  double v = 0.0;

  void validate() const;
};

/// Immutable bundle of the model, transform, draw-down function and the three
/// scale families (rates q, q + lambda, lambda) every kernel needs.
class KernelContext {
 public:
  KernelContext(const ModelParams& model, const TransformSpec& transform, DrawdownSpec drawdown);

  /// Uses caller-supplied scale families instead of the closed-form ones.
  KernelContext(const ModelParams& model, const TransformSpec& transform, DrawdownSpec drawdown,
                std::shared_ptr<const ScaleFamily> at_q, std::shared_ptr<const ScaleFamily> at_q_lambda);

  [[nodiscard]] const ModelParams& model() const { return model_; }
  [[nodiscard]] const TransformSpec& transform() const { return transform_; }
  [[nodiscard]] const DrawdownSpec& drawdown() const { return drawdown_; }
  [[nodiscard]] const ScaleFamily& scale_q() const { return *at_q_; }
  [[nodiscard]] const ScaleFamily& scale_q_lambda() const { return *at_q_lambda_; }
  [[nodiscard]] double mean_drift() const { return drift0_; }
  /// Throws PoleError unless u < Phi(q + lambda).
  void require_tilt_below_pole() const;

 private:
  ModelParams model_;
  TransformSpec transform_;
  DrawdownSpec drawdown_;
  std::shared_ptr<const ScaleFamily> at_q_, at_q_lambda_;
  double drift0_;
};

/// W_q'(s)/W_q(s) at the gap s = xi_bar(w): the killing rate of the classical draw-down.
[[nodiscard]] double drawdown_rate(double w, const KernelContext& ctx);

/// Rate of the first-passage flow: exp(-int_x^b ell1) is the upcrossing transform.
[[nodiscard]] double ell1(double w, const KernelContext& ctx);
/// Source term of the Parisian ruin transform.
[[nodiscard]] double ell1_bar(double y, const KernelContext& ctx);
/// Rate and source of the joint transform G.
[[nodiscard]] double ell2(double w, const KernelContext& ctx);
[[nodiscard]] double ell2_bar(double w, const KernelContext& ctx);
/// E[e^{-q e_lambda + u Y(e_lambda) + v min(inf X, 0)}; e_lambda < first passage of Y above z],
/// Y the process reflected at its infimum, started at 0.
[[nodiscard]] double hbar(double z, const KernelContext& ctx);
/// Occupation kernel of the resolvent: contribution of a draw-down at record y to position u.
[[nodiscard]] double ell3(double y, double u_pos, const KernelContext& ctx);
/// Source term of the expected discounted injections.
[[nodiscard]] double ell4(double y, const KernelContext& ctx);

/// E_x[e^{-q tau_xi} phi(running max at tau_xi); tau_xi < tau_b^+] for the unreflected process.
[[nodiscard]] double first_drawdown_laplace(double x, double b, const std::function<double(double)>& phi,
                                            const KernelContext& ctx, double panel = 256.0);
/// E_x[e^{-q tau_xi}(xi(running max) - X(tau_xi)); tau_xi < tau_b^+], the discounted overshoot.
[[nodiscard]] double first_drawdown_overshoot(double x, double b, const KernelContext& ctx, double panel = 256.0);

}  // namespace parisian
