#pragma once

#include <cmath>
#include <memory>
#include <vector>

#include "parisian/levy_model.hpp"

namespace parisian {

/// A positive number stored as mantissa * exp(log_scale) so that ratios of
/// exponentially large scale-function values never overflow.
struct Scaled {
  double mantissa = 0.0;
  double log_scale = 0.0;

  [[nodiscard]] double value() const { return mantissa * std::exp(log_scale); }
};

[[nodiscard]] inline double ratio(const Scaled& num, const Scaled& den) {
  return num.mantissa / den.mantissa * std::exp(num.log_scale - den.log_scale);
}

/// W_q and its companions at one point, all multiplied by exp(-log_scale).
struct ScalePoint {
  double w = 0.0;
  double w_prime = 0.0;
  double w_bar = 0.0;
  double z = 1.0;
  double z_bar = 0.0;
  double log_scale = 0.0;

  [[nodiscard]] Scaled scaled_w() const { return {w, log_scale}; }
  [[nodiscard]] Scaled scaled_z() const { return {z, log_scale}; }
};

/// Anything that can evaluate a q-scale function and the companions the kernels
/// need. Kernels only talk to this interface.
class ScaleFamily {
 public:
  virtual ~ScaleFamily() = default;

  [[nodiscard]] virtual double rate() const = 0;
  [[nodiscard]] virtual double phi() const = 0;
  /// W_q(0+).
  [[nodiscard]] virtual double w_zero() const = 0;
  /// W_q'(0+), finite for every member of the exponential-jump family.
  [[nodiscard]] virtual double w_prime_zero() const = 0;

  /// Values at x >= 0.
  [[nodiscard]] virtual ScalePoint at(double x) const = 0;

  /// Z_q(x, theta) = e^{theta x}(1 - (psi(theta) - q) int_0^x e^{-theta z} W_q(z) dz), theta >= 0.
  [[nodiscard]] virtual Scaled z_tilted(double x, double theta) const = 0;

  /// C(z) = W_q(0+) e^{u z} + int_{y<z} e^{u y + (v-u) min(y,0)} (W_q'(z-y) - phi W_q(z-y)) dy.
  /// C(0) and C(z) are the two brackets of hbar. Requires u and v above every
  /// exponent other than phi.
  [[nodiscard]] virtual Scaled compensated_integral(double z, double u, double v) const = 0;

  /// W'(s) Z(s,v) / W(s) - v Z(s,v) - (q - psi(v)) W(s) for s > 0. With v = 0 this is
  /// W'Z/W - qW. The leading exponentials of the three terms cancel, so
  /// implementations should not form the difference naively.
  [[nodiscard]] virtual double drawdown_bracket(double s, double v) const = 0;

  /// Z(s) - m W(s) - (Z_bar(s) - m W_bar(s)) W'(s)/W(s) with m = psi'(0+), for s > 0.
  [[nodiscard]] virtual double injection_bracket(double s) const = 0;
};

/// Closed-form scale function of the exponential-jump family: W_q(x) = sum_i e^{r_i x} / psi'(r_i).
class ScaleRep final : public ScaleFamily {
 public:
  struct Term {
    double exponent;
    double weight;
  };

  ScaleRep(const ModelParams& model, double q);

  [[nodiscard]] double rate() const override { return q_; }
  [[nodiscard]] double phi() const override { return roots_.phi_q; }
  [[nodiscard]] double w_zero() const override { return w0_; }
  [[nodiscard]] double w_prime_zero() const override { return w0_prime_; }
  [[nodiscard]] ScalePoint at(double x) const override;
  [[nodiscard]] Scaled z_tilted(double x, double theta) const override;
  [[nodiscard]] Scaled compensated_integral(double z, double u, double v) const override;
  [[nodiscard]] double drawdown_bracket(double s, double v) const override;
  [[nodiscard]] double injection_bracket(double s) const override;

  [[nodiscard]] const std::vector<Term>& terms() const { return terms_; }
  [[nodiscard]] const RootSet& roots() const { return roots_; }
  [[nodiscard]] const ModelParams& model() const { return model_; }

 private:
  ModelParams model_;
  double q_;
  RootSet roots_;
  std::vector<Term> terms_;  // terms_[0] carries phi
  double w0_ = 0.0;
  double w0_prime_ = 0.0;
};

[[nodiscard]] std::shared_ptr<const ScaleFamily> make_scale(const ModelParams& model, double q);

/// Plain-valued accessors. Negative x follows the conventions W = W_bar = 0,
/// Z = 1, Z_bar = x. Results may overflow to infinity for very large x; use
/// ScaleFamily::at for ratios.
[[nodiscard]] double w_q(const ScaleFamily& s, double x);
[[nodiscard]] double w_q_prime(const ScaleFamily& s, double x);
[[nodiscard]] double w_bar_q(const ScaleFamily& s, double x);
[[nodiscard]] double z_q(const ScaleFamily& s, double x);
[[nodiscard]] double z_bar_q(const ScaleFamily& s, double x);
[[nodiscard]] double z_q_theta(const ScaleFamily& s, double x, double theta);

/// E_x[e^{-q tau_b^+}; tau_b^+ < tau_c^-] for X killed on exiting (c, b).
[[nodiscard]] double classical_two_sided_exit(const ScaleFamily& s, double x, double c, double b);
/// E_x[e^{-q tau_c^-}; tau_c^- < tau_b^+], the companion downward exit.
[[nodiscard]] double classical_down_exit(const ScaleFamily& s, double x, double c, double b);
/// E_x[e^{-q sigma_b^+}] for X reflected at its running infimum below 0.
[[nodiscard]] double reflected_exit(const ScaleFamily& s, double x, double b);
/// q-resolvent density of X killed on leaving (c, b), at y.
[[nodiscard]] double resolvent_x_density(const ScaleFamily& s, double x, double y, double c, double b);
/// q-resolvent density of the reflected process killed above b, at y.
[[nodiscard]] double resolvent_y_density(const ScaleFamily& s, double x, double y, double b);

}  // namespace parisian
