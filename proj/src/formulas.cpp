#include "parisian/formulas.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "parisian/errors.hpp"

namespace parisian {

namespace {

constexpr unsigned kMaxDepth = 18;

// Values of F(x) = A exp(-int_x^B l) + w int_x^B exp(-int_x^y l) g(y) dy at every x of xs,
// for each requested (A, w) pair, from a single sampled grid.
struct FlowRequest {
  double terminal;
  double source_weight;
};

std::vector<std::vector<double>> solve_flow(const FlowFunction& fn, const std::vector<FlowRequest>& requests,
                                            const std::vector<double>& xs, double b, const DrawdownSpec& dd,
                                            const QuadratureConfig& quad) {
  if (xs.empty()) return std::vector<std::vector<double>>(requests.size());
  const auto [lo_it, hi_it] = std::minmax_element(xs.begin(), xs.end());
  const double lo = *lo_it, hi = *hi_it;
  if (!(lo >= dd.domain_min())) throw DomainViolation("start point below the draw-down domain");
  if (!(hi <= b)) throw DomainError("start point above the barrier b");

  FlowGrid grid(fn, quad.panel);
  auto append = [&](double from, double to) {
    auto pts = dd.kinks(from, to);
    pts.insert(pts.end(), xs.begin(), xs.end());
    pts = merge_breakpoints(pts, from, to);
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) grid.append_segment(pts[i], pts[i + 1]);
  };

  if (std::isfinite(b)) {
    if (lo < b) append(lo, b);
  } else {
    double upper = std::min(std::max(2.0 * hi, hi + 8.0), quad.max_upper);
    if (!(upper > hi)) throw TruncationFailure("max_upper does not exceed the largest start point");
    append(lo, upper);
    const std::size_t hi_index = grid.index_of(hi);
    for (;;) {
      if (upper >= quad.max_upper) {
        throw TruncationFailure("tail above " + std::to_string(upper) + " still exceeds truncation_eps");
      }
      const double next = std::min(2.0 * upper, quad.max_upper);
      const std::size_t k0 = grid.size() - 1;
      append(upper, next);
      upper = next;
      const double seen = std::exp(-(grid.cumulative_at(k0) - grid.cumulative_at(hi_index)));
      const double chunk_rate = grid.cumulative_at(grid.size() - 1) - grid.cumulative_at(k0);
      double change = 0.0;
      for (const auto& r : requests) {
        change = std::max(change, std::abs(r.terminal) * -std::expm1(-chunk_rate) +
                                      std::abs(r.source_weight * grid.sweep_from(k0, 0.0)));
      }
      if (!std::isfinite(change)) throw QuadratureFailure("non-finite tail increment");
      if (seen * change < quad.truncation_eps) break;
    }
  }

  std::vector<std::vector<double>> out;
  for (const auto& r : requests) {
    std::vector<double> vals(xs.size());
    if (grid.empty()) {
      std::fill(vals.begin(), vals.end(), r.terminal);
    } else {
      const auto f = grid.sweep(r.terminal, r.source_weight);
      for (std::size_t i = 0; i < xs.size(); ++i) {
        vals[i] = xs[i] == b ? r.terminal : f[grid.index_of(xs[i])];
        if (!std::isfinite(vals[i])) throw QuadratureFailure("non-finite flow value");
      }
    }
    out.push_back(std::move(vals));
  }
  return out;
}

void require_finite_b(const Query& q, const char* what) {
  if (!std::isfinite(q.b)) throw InvalidArgument(std::string(what) + " needs a finite barrier b");
}

std::vector<double> single(const Query& q) { return {q.x}; }

template <class F>
double integrate(F&& f, double a, double b, const QuadratureConfig& quad) {
  if (!(b > a)) return 0.0;
  double err = 0.0, l1 = 0.0;
  const double v =
      boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, kMaxDepth, quad.rel_tol, &err, &l1);
  if (!std::isfinite(v)) throw QuadratureFailure("non-finite quadrature result");
  if (err > std::max(quad.abs_tol, 100.0 * quad.rel_tol * l1)) {
    throw QuadratureFailure("adaptive quadrature missed its tolerance (error " + std::to_string(err) + ")");
  }
  return v;
}

}  // namespace

void QuadratureConfig::validate() const {
  if (!(panel >= 16.0)) throw InvalidArgument("panel must be >= 16");
  if (!(rel_tol > 0.0 && abs_tol > 0.0 && truncation_eps > 0.0)) throw InvalidArgument("tolerances must be > 0");
  if (!(max_upper > 0.0)) throw InvalidArgument("max_upper must be > 0");
}

void Query::validate() const {
  model.validate();
  transform.validate();
  quad.validate();
  if (!std::isfinite(x)) throw InvalidArgument("x must be finite");
  if (!(x <= b)) throw DomainError("x must not exceed b");
  if (!(x >= drawdown.domain_min())) throw DomainViolation("x lies below the draw-down domain");
}

std::vector<ExitValues> exit_laplace_curve(const Query& base, const std::vector<double>& xs) {
  base.validate();
  require_finite_b(base, "exit transform");
  const KernelContext ctx(base.model, base.transform, base.drawdown);
  const auto res = solve_flow([&](double t) { return FlowSample{ell1(t, ctx), ell1_bar(t, ctx)}; },
                              {{1.0, 0.0}, {0.0, 1.0}}, xs, base.b, base.drawdown, base.quad);
  std::vector<ExitValues> out(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) out[i] = {res[0][i], res[1][i]};
  return out;
}

double upcross_laplace(const Query& q) { return exit_laplace_curve(q, single(q)).front().upcross; }

double parisian_ruin_laplace(const Query& q) { return exit_laplace_curve(q, single(q)).front().ruin; }

double u_xi(const Query& q) { return exit_laplace_curve(q, single(q)).front().total(); }

std::vector<double> ruin_probability_curve(const std::vector<double>& xs, double lambda, const ModelParams& model,
                                           const DrawdownSpec& drawdown, const QuadratureConfig& quad) {
  model.validate();
  quad.validate();
  TransformSpec t;
  t.q = 0.0;
  t.lambda = lambda;
  const KernelContext ctx(model, t, drawdown);
  const double inf = std::numeric_limits<double>::infinity();
  const auto res = solve_flow([&](double w) { return FlowSample{ell1(w, ctx), 0.0}; }, {{1.0, 0.0}}, xs, inf,
                              drawdown, quad);
  std::vector<double> out(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) out[i] = std::clamp(1.0 - res[0][i], 0.0, 1.0);
  return out;
}

double ruin_probability(double x, double lambda, const ModelParams& model, const DrawdownSpec& drawdown,
                        const QuadratureConfig& quad) {
  return ruin_probability_curve({x}, lambda, model, drawdown, quad).front();
}

std::vector<double> joint_laplace_curve(const Query& base, const std::vector<double>& xs) {
  base.validate();
  require_finite_b(base, "joint transform");
  const KernelContext ctx(base.model, base.transform, base.drawdown);
  ctx.require_tilt_below_pole();
  const double terminal = std::exp(base.transform.u * base.b);
  return solve_flow([&](double t) { return FlowSample{ell2(t, ctx), -ell2_bar(t, ctx)}; }, {{terminal, 1.0}}, xs,
                    base.b, base.drawdown, base.quad)
      .front();
}

double joint_laplace_g(const Query& q) { return joint_laplace_curve(q, single(q)).front(); }

std::vector<double> expected_injections_curve(const Query& base, const std::vector<double>& xs) {
  base.validate();
  const KernelContext ctx(base.model, base.transform, base.drawdown);
  return solve_flow([&](double t) { return FlowSample{ell1(t, ctx), ell4(t, ctx)}; }, {{0.0, 1.0}}, xs, base.b,
                    base.drawdown, base.quad)
      .front();
}

double expected_injections(const Query& q) { return expected_injections_curve(q, single(q)).front(); }

ResolventDensity::ResolventDensity(const Query& q) : query_(q) {
  query_.validate();
  require_finite_b(query_, "resolvent");
  ctx_ = std::make_shared<const KernelContext>(query_.model, query_.transform, query_.drawdown);
  const auto ctx = ctx_;
  grid_ = std::make_shared<FlowGrid>([ctx](double t) { return FlowSample{ell1(t, *ctx), 0.0}; }, query_.quad.panel);
  const auto pts = merge_breakpoints(query_.drawdown.kinks(query_.x, query_.b), query_.x, query_.b);
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) grid_->append_segment(pts[i], pts[i + 1]);
}

double ResolventDensity::support_min() const { return query_.drawdown.level(query_.x); }

double ResolventDensity::operator()(double u_pos) const {
  const double x = query_.x, b = query_.b;
  if (!(u_pos < b) || x == b) return 0.0;
  double value = 0.0;
  const double w0 = ctx_->scale_q().w_zero();
  if (w0 > 0.0 && u_pos > x) value += w0 * std::exp(-grid_->cumulative(u_pos));

  const double y_lo = std::max(x, u_pos);
  const double y_hi = std::min(b, query_.drawdown.preimage_sup(u_pos));
  if (y_lo < y_hi) {
    auto f = [&](double y) { return std::exp(-grid_->cumulative(y)) * ell3(y, u_pos, *ctx_); };
    const auto pts = merge_breakpoints(query_.drawdown.kinks(y_lo, y_hi), y_lo, y_hi);
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) value += integrate(f, pts[i], pts[i + 1], query_.quad);
  }
  if (value < 0.0 && value >= -1e-9) value = 0.0;
  return value;
}

double ResolventDensity::killed_mass(double lo, double hi) const {
  const auto& dd = query_.drawdown;
  std::vector<double> pts{dd.level(query_.x), query_.x, dd.level(query_.b)};
  for (double k : dd.kinks(lo, query_.b)) pts.push_back(dd.level(k));
  pts = merge_breakpoints(pts, lo, std::min(hi, query_.b));
  double mass = 0.0;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    mass += integrate([&](double u) { return (*this)(u); }, pts[i], pts[i + 1], query_.quad);
  }
  return query_.transform.q * mass;
}

double resolvent_u_density(const Query& q, double u_pos) { return ResolventDensity(q)(u_pos); }

CurveTable resolvent_u_curve(const Query& q, const std::vector<double>& grid) {
  const ResolventDensity density(q);
  CurveTable table;
  table.columns = {"u", "density"};
  for (double u : grid) table.add_row({u, density(u)});
  return table;
}

}  // namespace parisian
