#pragma once

#include <functional>
#include <vector>

namespace parisian {

/// Rate l(t) and source g(t) of the linear flow F' = l F - g.
struct FlowSample {
  double rate = 0.0;
  double source = 0.0;
};

using FlowFunction = std::function<FlowSample(double)>;

/// Piecewise-uniform grid on which a rate and a source are sampled at nodes and
/// midpoints, so that
///   F(x) = A exp(-int_x^B l) + int_x^B exp(-int_x^y l) g(y) dy
/// is available at every node by a single backward sweep, and
///   L(y) = int_start^y l
/// at any point by Hermite interpolation.
class FlowGrid {
 public:
  /// `density` is the number of intervals per unit length.
  FlowGrid(FlowFunction fn, double density);

  /// Extends the grid from end() (or from `from` on an empty grid) to `to`.
  void append_segment(double from, double to);

  [[nodiscard]] bool empty() const { return t_.empty(); }
  [[nodiscard]] double start() const { return t_.front(); }
  [[nodiscard]] double end() const { return t_.back(); }
  [[nodiscard]] std::size_t size() const { return t_.size(); }
  [[nodiscard]] const std::vector<double>& nodes() const { return t_; }

  /// int_start^y l, for y in [start, end].
  [[nodiscard]] double cumulative(double y) const;
  /// Cumulative integral at node k.
  [[nodiscard]] double cumulative_at(std::size_t k) const { return cum_[k]; }

  /// F at every node for the terminal value A at end(); the source enters with
  /// weight `source_weight`.
  [[nodiscard]] std::vector<double> sweep(double terminal, double source_weight = 1.0) const;
  /// F at node `from` only.
  [[nodiscard]] double sweep_from(std::size_t from, double terminal, double source_weight = 1.0) const;

  /// Index of the node equal to x (within rounding); throws if x is not a node.
  [[nodiscard]] std::size_t index_of(double x) const;

 private:
  FlowFunction fn_;
  double density_;
  std::vector<double> t_;
  std::vector<double> rate_, source_;          // at nodes
  std::vector<double> rate_mid_, source_mid_;  // at interval midpoints
  std::vector<double> cum_;                    // at nodes

  // One backward step over interval k.
  [[nodiscard]] double step(std::size_t k, double f, double source_weight) const;
};

/// Sorted, de-duplicated breakpoints in [lo, hi] that always contain both ends.
[[nodiscard]] std::vector<double> merge_breakpoints(std::vector<double> pts, double lo, double hi);

}  // namespace parisian
