#pragma once

#include <functional>
#include <string>
#include <vector>

namespace parisian {

/// Draw-down function xi with xi(x) < x, and its gap xi_bar(x) = x - xi(x).
class DrawdownSpec {
 public:
  enum class Kind { Linear, CappedLinear, Custom };

  /// xi(x) = K x with 0 < K < 1.
  static DrawdownSpec linear(double k, double domain_min = 1e-6);
  /// xi(x) = min(cap, K x).
  static DrawdownSpec capped(double cap, double k, double domain_min = 1e-6);
  /// Arbitrary nondecreasing xi, validated on 10^4 points of [domain_min, validate_upper].
  static DrawdownSpec custom(std::function<double(double)> fn, double domain_min, double validate_upper,
                             std::vector<double> kinks = {});
  /// Parses "linear:K" or "capped:cap:K".
  static DrawdownSpec parse(const std::string& text, double domain_min = 1e-6);

  [[nodiscard]] Kind kind() const { return kind_; }
  [[nodiscard]] double domain_min() const { return domain_min_; }
  [[nodiscard]] double slope() const { return k_; }
  [[nodiscard]] double cap() const { return cap_; }

  /// Throws DomainViolation below domain_min or where xi(x) >= x.
  [[nodiscard]] double xi(double x) const;
  [[nodiscard]] double xi_bar(double x) const;

  /// xi without the domain check; used by the simulator on running maxima.
  [[nodiscard]] double level(double x) const;

  /// sup{y : xi(y) < u}, the last surplus whose draw-down level lies below u.
  [[nodiscard]] double preimage_sup(double u) const;

  /// Points in (lo, hi) where xi is not smooth.
  [[nodiscard]] std::vector<double> kinks(double lo, double hi) const;

  /// Round-trippable text form, e.g. "capped:1:0.8".
  [[nodiscard]] std::string to_string() const;

 private:
  DrawdownSpec() = default;

  Kind kind_ = Kind::Linear;
  double k_ = 0.0;
  double cap_ = 0.0;
  double domain_min_ = 1e-6;
  std::function<double(double)> fn_;
  std::vector<double> custom_kinks_;
};

}  // namespace parisian
