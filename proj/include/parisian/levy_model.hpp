#pragma once

#include <vector>

namespace parisian {

/// Spectrally negative jump-diffusion
///   X_t = x + mu t + sigma B_t - sum of Exp(c) claims arriving at rate a.
/// Laplace exponent psi(theta) = mu theta + sigma^2 theta^2 / 2 - a theta / (theta + c).
struct ModelParams {
  double mu = 0.0;
  double sigma = 0.0;
  double a = 0.0;
  double c = 1.0;

  /// Throws InvalidArgument unless sigma >= 0, a >= 0, c > 0, all finite, and
  /// mu > 0 when sigma == 0.
  void validate() const;

  [[nodiscard]] bool has_jumps() const { return a > 0.0; }
  [[nodiscard]] bool has_diffusion() const { return sigma > 0.0; }
};

[[nodiscard]] double psi(const ModelParams& m, double theta);
[[nodiscard]] double psi_prime(const ModelParams& m, double theta);

/// psi'(0+) = mu - a/c, the mean drift per unit time.
[[nodiscard]] double mean_drift(const ModelParams& m);

/// Real roots of psi(theta) = q.
struct RootSet {
  double q = 0.0;
  double phi_q = 0.0;
  /// Remaining roots in decreasing order, all below phi_q.
  std::vector<double> negative_roots;

  [[nodiscard]] std::vector<double> all() const;
};

/// Solves psi(theta) = q on the real line.
/// The equation is multiplied through by (theta + c), the resulting polynomial is
/// solved in closed form and every root is polished on psi itself.
[[nodiscard]] RootSet solve_roots(const ModelParams& m, double q);

}  // namespace parisian
