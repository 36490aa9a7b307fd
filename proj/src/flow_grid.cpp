#include "parisian/flow_grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "parisian/errors.hpp"

namespace parisian {

namespace {

bool close(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(a)); }

}  // namespace

FlowGrid::FlowGrid(FlowFunction fn, double density) : fn_(std::move(fn)), density_(density) {
  if (!(density_ > 0.0)) throw InvalidArgument("grid density must be positive");
}

void FlowGrid::append_segment(double from, double to) {
  if (t_.empty()) {
    const auto s = fn_(from);
    t_.push_back(from);
    rate_.push_back(s.rate);
    source_.push_back(s.source);
    cum_.push_back(0.0);
  } else if (!close(from, t_.back())) {
    throw InvalidArgument("grid segments must be contiguous");
  }
  from = t_.back();
  if (!(to > from)) return;
  const auto n = static_cast<std::size_t>(std::max(2.0, std::ceil((to - from) * density_)));
  const double h = (to - from) / static_cast<double>(n);
  for (std::size_t i = 1; i <= n; ++i) {
    const double t = i == n ? to : from + static_cast<double>(i) * h;
    const double hk = t - t_.back();
    const auto m = fn_(t_.back() + 0.5 * hk);
    const auto e = fn_(t);
    rate_mid_.push_back(m.rate);
    source_mid_.push_back(m.source);
    cum_.push_back(cum_.back() + hk / 6.0 * (rate_.back() + 4.0 * m.rate + e.rate));
    t_.push_back(t);
    rate_.push_back(e.rate);
    source_.push_back(e.source);
  }
}

double FlowGrid::cumulative(double y) const {
  if (y <= t_.front()) return 0.0;
  if (y >= t_.back()) return cum_.back();
  const auto it = std::upper_bound(t_.begin(), t_.end(), y);
  const std::size_t k = static_cast<std::size_t>(it - t_.begin()) - 1;
  const double h = t_[k + 1] - t_[k];
  const double s = (y - t_[k]) / h;
  // Exact integral of the quadratic through the node, midpoint and node samples.
  const double s2 = s * s, s3 = s2 * s;
  const double i0 = 2.0 * s3 / 3.0 - 1.5 * s2 + s;
  const double im = -4.0 * s3 / 3.0 + 2.0 * s2;
  const double i1 = 2.0 * s3 / 3.0 - 0.5 * s2;
  return cum_[k] + h * (rate_[k] * i0 + rate_mid_[k] * im + rate_[k + 1] * i1);
}

double FlowGrid::step(std::size_t k, double f, double source_weight) const {
  const double h = t_[k + 1] - t_[k];
  const double full = cum_[k + 1] - cum_[k];
  const double half = h / 24.0 * (5.0 * rate_[k] + 8.0 * rate_mid_[k] - rate_[k + 1]);
  const double decay = std::exp(-full);
  if (source_weight == 0.0) return decay * f;
  const double local = h / 6.0 * (source_[k] + 4.0 * std::exp(-half) * source_mid_[k] + decay * source_[k + 1]);
  return decay * f + source_weight * local;
}

double FlowGrid::sweep_from(std::size_t from, double terminal, double source_weight) const {
  double f = terminal;
  for (std::size_t k = t_.size() - 1; k-- > from;) f = step(k, f, source_weight);
  return f;
}

std::vector<double> FlowGrid::sweep(double terminal, double source_weight) const {
  std::vector<double> out(t_.size());
  out.back() = terminal;
  for (std::size_t k = t_.size() - 1; k-- > 0;) out[k] = step(k, out[k + 1], source_weight);
  return out;
}

std::size_t FlowGrid::index_of(double x) const {
  auto it = std::lower_bound(t_.begin(), t_.end(), x);
  if (it != t_.end() && close(*it, x)) return static_cast<std::size_t>(it - t_.begin());
  if (it != t_.begin() && close(*(it - 1), x)) return static_cast<std::size_t>(it - t_.begin()) - 1;
  throw InvalidArgument("point " + std::to_string(x) + " is not a grid node");
}

std::vector<double> merge_breakpoints(std::vector<double> pts, double lo, double hi) {
  pts.erase(std::remove_if(pts.begin(), pts.end(), [&](double p) { return !(p > lo && p < hi); }), pts.end());
  pts.push_back(lo);
  pts.push_back(hi);
  std::sort(pts.begin(), pts.end());
  std::vector<double> out;
  for (double p : pts) {
    if (out.empty() || !close(out.back(), p)) out.push_back(p);
  }
  if (out.back() != hi) out.back() = hi;
  return out;
}

}  // namespace parisian
