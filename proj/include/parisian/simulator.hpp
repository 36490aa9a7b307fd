#pragma once

#include <cstdint>
#include <limits>
#include <random>
#include <vector>

#include "parisian/drawdown.hpp"
#include "parisian/kernels.hpp"
#include "parisian/levy_model.hpp"

namespace parisian {

struct SimConfig {
  /// How the Brownian part is discretized when sigma > 0. With sigma = 0 paths are exact.
  enum class Scheme {
    /// Fixed dt grid, crossings checked at grid points only.
    Euler,
    /// Extremes of each step drawn from the Brownian bridge; steps shrink to dt
    /// near every boundary and grow up to max_step away from them.
    Bridge,
  };

  std::size_t n_paths = 100000;
  double dt = 1e-3;
  double horizon = 1e4;
  /// Level at which a path counts as escaped when b is infinite.
  double escape_level = std::numeric_limits<double>::infinity();
  std::uint64_t seed = 1;
  unsigned workers = 1;
  Scheme scheme = Scheme::Euler;
  double max_step = 1.0;

  void validate() const;
};

enum class PathKind { UpcrossedB, ParisianRuin, HorizonCensored, Escaped };

struct PathOutcome {
  PathKind kind = PathKind::HorizonCensored;
  double event_time = 0.0;
  double position = 0.0;
  double running_max = 0.0;
  double total_injection = 0.0;
  double discounted_injection = 0.0;
  double discount_factor = 1.0;
  /// U at an independent Exp(q) time if that time precedes the event, NaN otherwise.
  double killed_position = std::numeric_limits<double>::quiet_NaN();
  /// First draw-down time and its overshoot below the draw-down level.
  double first_drawdown_time = std::numeric_limits<double>::infinity();
  double first_overshoot = 0.0;
  int episodes = 0;
};

struct Estimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t n = 0;
  std::size_t censored = 0;
  /// More than 1% of the paths were censored by the horizon.
  bool censoring_excess = false;
};

using Rng = std::mt19937_64;

/// One path of the draw-down reflected process with Parisian clocks, from U = x
/// until the first of: passage above b (or the escape level when b is infinite),
/// Parisian ruin, or the horizon.
[[nodiscard]] PathOutcome simulate_path(const ModelParams& model, const DrawdownSpec& drawdown,
                                        const TransformSpec& transform, double x, double b, const SimConfig& sim,
                                        Rng& rng);

/// sim.n_paths paths; path i uses its own stream derived from (seed, i), so the
/// result does not depend on the number of workers.
[[nodiscard]] std::vector<PathOutcome> simulate_paths(const ModelParams& model, const DrawdownSpec& drawdown,
                                                      const TransformSpec& transform, double x, double b,
                                                      const SimConfig& sim);

/// The same paths discretized with sim.dt and with sim.dt / 2. Both share claims,
/// clocks, the killing time and the Brownian path, and each has the law of a
/// plain run, so their difference isolates the discretization bias.
struct CoupledPaths {
  std::vector<PathOutcome> coarse, fine;
};

[[nodiscard]] CoupledPaths simulate_coupled_paths(const ModelParams& model, const DrawdownSpec& drawdown,
                                                  const TransformSpec& transform, double x, double b,
                                                  const SimConfig& sim);

enum class Functional {
  UpcrossLaplace,   ///< e^{-q kappa} 1{kappa < theta}
  RuinLaplace,      ///< e^{-q theta} 1{theta < kappa}
  UXi,              ///< e^{-q (kappa ^ theta)}
  RuinProb,         ///< 1{theta < inf}; escaped paths score `escape_value`
  JointG,           ///< e^{-q T + u U(T) - v R(T)}
  VXi,              ///< int e^{-qt} dR; escaped paths add e^{-q T} `escape_value`
  DrawdownLaplace,  ///< e^{-q tau_xi} 1{tau_xi < kappa}
  Overshoot,        ///< e^{-q tau_xi} (xi(max) - X(tau_xi)) 1{tau_xi < kappa}
};

[[nodiscard]] double path_value(const PathOutcome& o, Functional f, const TransformSpec& transform,
                                double escape_value = 0.0);

[[nodiscard]] Estimate summarize(const std::vector<PathOutcome>& paths, Functional f, const TransformSpec& transform,
                                 double escape_value = 0.0);

/// Mean and standard error of fine minus coarse values, path by path.
[[nodiscard]] Estimate summarize_shift(const CoupledPaths& paths, Functional f, const TransformSpec& transform,
                                       double escape_value = 0.0);

[[nodiscard]] Estimate estimate(const ModelParams& model, const DrawdownSpec& drawdown,
                                const TransformSpec& transform, double x, double b, const SimConfig& sim,
                                Functional f, double escape_value = 0.0);

/// Share of paths killed by the Exp(q) time inside each bin [edges[i], edges[i+1]).
/// Its expectation is q times the resolvent density integrated over the bin.
[[nodiscard]] std::vector<Estimate> killed_position_histogram(const std::vector<PathOutcome>& paths,
                                                              const std::vector<double>& edges);

/// E[e^{-q e + u Y(e) - v R(e)}; e < first passage of Y above z] for the process Y
/// started at 0 and reflected at 0 by injections R, with e ~ Exp(lambda).
[[nodiscard]] Estimate estimate_episode_transform(const ModelParams& model, const TransformSpec& transform, double z,
                                                  const SimConfig& sim);

}  // namespace parisian
