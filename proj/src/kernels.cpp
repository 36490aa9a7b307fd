#include "parisian/kernels.hpp"

#include <cmath>
#include <string>

#include "parisian/errors.hpp"
#include "parisian/flow_grid.hpp"

namespace parisian {

namespace {

// Scale values of the q and q + lambda families at the gap of w.
struct GapValues {
  double s;
  ScalePoint q;
  ScalePoint p;
  double rho;  // W_q'/W_q at s
};

GapValues gap_values(double w, const KernelContext& ctx) {
  GapValues g;
  g.s = ctx.drawdown().xi_bar(w);
  g.q = ctx.scale_q().at(g.s);
  g.p = ctx.scale_q_lambda().at(g.s);
  if (!(g.q.w > 0.0)) throw BoundaryEval("W_q vanishes at the draw-down gap of w = " + std::to_string(w));
  g.rho = g.q.w_prime / g.q.w;
  return g;
}

}  // namespace

void TransformSpec::validate() const {
  if (!(q >= 0.0) || !std::isfinite(q)) throw InvalidArgument("q must be finite and >= 0");
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw InvalidArgument("lambda must be finite and > 0");
  if (!(u >= 0.0) || !std::isfinite(u)) throw InvalidArgument("u must be finite and >= 0");
  if (!(v >= 0.0) || !std::isfinite(v)) throw InvalidArgument("v must be finite and >= 0");
}

KernelContext::KernelContext(const ModelParams& model, const TransformSpec& transform, DrawdownSpec drawdown)
    : KernelContext(model, transform, std::move(drawdown), nullptr, nullptr) {}

KernelContext::KernelContext(const ModelParams& model, const TransformSpec& transform, DrawdownSpec drawdown,
                             std::shared_ptr<const ScaleFamily> at_q,
                             std::shared_ptr<const ScaleFamily> at_q_lambda)
    : model_(model), transform_(transform), drawdown_(std::move(drawdown)) {
  model_.validate();
  transform_.validate();
  at_q_ = at_q ? std::move(at_q) : make_scale(model_, transform_.q);
  at_q_lambda_ = at_q_lambda ? std::move(at_q_lambda) : make_scale(model_, transform_.q + transform_.lambda);
  drift0_ = parisian::mean_drift(model_);
}

void KernelContext::require_tilt_below_pole() const {
  if (!(transform_.u < at_q_lambda_->phi())) {
    throw PoleError("tilt u = " + std::to_string(transform_.u) + " must stay below Phi(q + lambda) = " +
                    std::to_string(at_q_lambda_->phi()));
  }
}

double drawdown_rate(double w, const KernelContext& ctx) { return gap_values(w, ctx).rho; }

double ell1(double w, const KernelContext& ctx) {
  const auto g = gap_values(w, ctx);
  const double q = ctx.transform().q;
  const double zq_zp = ratio(g.q.scaled_z(), g.p.scaled_z());
  const double wq_zp = ratio(g.q.scaled_w(), g.p.scaled_z());
  return g.rho * (1.0 - zq_zp) + q * wq_zp;
}

double ell1_bar(double y, const KernelContext& ctx) {
  const auto g = gap_values(y, ctx);
  const auto& t = ctx.transform();
  const double inv_zp = std::exp(-g.p.log_scale) / g.p.z;
  const double bracket = ctx.scale_q().drawdown_bracket(g.s, 0.0);
  return t.lambda / (t.q + t.lambda) * (1.0 - inv_zp) * bracket;
}

double ell2(double w, const KernelContext& ctx) {
  ctx.require_tilt_below_pole();
  const auto g = gap_values(w, ctx);
  const auto& t = ctx.transform();
  const Scaled zqv = ctx.scale_q().z_tilted(g.s, t.v);
  const Scaled zpv = ctx.scale_q_lambda().z_tilted(g.s, t.v);
  const double r = ratio(zqv, zpv);
  return g.rho * (1.0 - r) + t.v * r + (t.q - psi(ctx.model(), t.v)) * ratio(g.q.scaled_w(), zpv);
}

double hbar(double z, const KernelContext& ctx) {
  ctx.require_tilt_below_pole();
  if (z < 0.0) throw DomainError("hbar needs z >= 0");
  const auto& t = ctx.transform();
  const auto& sp = ctx.scale_q_lambda();
  const double c0 = sp.compensated_integral(0.0, t.u, t.v).value();
  const Scaled cz = sp.compensated_integral(z, t.u, t.v);
  const Scaled zv = sp.z_tilted(z, t.v);
  return t.lambda / (sp.phi() - t.u) * (c0 - ratio(cz, zv));
}

double ell2_bar(double w, const KernelContext& ctx) {
  ctx.require_tilt_below_pole();
  const auto& t = ctx.transform();
  const double s = ctx.drawdown().xi_bar(w);
  const double lvl = w - s;
  const double bracket = ctx.scale_q().drawdown_bracket(s, t.v);
  return -std::exp(t.u * lvl) * hbar(s, ctx) * bracket;
}

double ell3(double y, double u_pos, const KernelContext& ctx) {
  const double lvl = ctx.drawdown().xi(y);
  if (!(u_pos > lvl && u_pos < y)) throw DomainError("ell3 needs xi(y) < u < y");
  const auto g = gap_values(y, ctx);
  const double bracket = ctx.scale_q().drawdown_bracket(g.s, 0.0);
  // Occupation of one reflected excursion below the running maximum, killed at
  // rate q + lambda and stopped once it climbs past the gap. Every excursion
  // counts, including the one that ends in Parisian ruin.
  const double w_ratio = ratio(ctx.scale_q_lambda().at(y - u_pos).scaled_w(), g.p.scaled_z());
  const auto inner = ctx.scale_q().at(y - u_pos);
  const double direct = (inner.w_prime - g.rho * inner.w) * std::exp(inner.log_scale);
  return bracket * w_ratio + direct;
}

double ell4(double y, const KernelContext& ctx) {
  const auto g = gap_values(y, ctx);
  const double m = ctx.mean_drift();
  const double first = ctx.scale_q().injection_bracket(g.s);
  const double moment_ratio = (g.p.z_bar - m * g.p.w_bar) / g.p.z;
  const double bracket = ctx.scale_q().drawdown_bracket(g.s, 0.0);
  return first + moment_ratio * bracket;
}

namespace {

double drawdown_flow(double x, double b, const FlowFunction& fn, const KernelContext& ctx, double panel) {
  if (!(x <= b) || !std::isfinite(b)) throw DomainError("draw-down flow needs x <= b < inf");
  if (x == b) return 0.0;
  FlowGrid grid(fn, panel);
  const auto pts = merge_breakpoints(ctx.drawdown().kinks(x, b), x, b);
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) grid.append_segment(pts[i], pts[i + 1]);
  const double v = grid.sweep_from(0, 0.0);
  if (!std::isfinite(v)) throw QuadratureFailure("non-finite draw-down integral");
  return v;
}

}  // namespace

double first_drawdown_laplace(double x, double b, const std::function<double(double)>& phi,
                                const KernelContext& ctx, double panel) {
  return drawdown_flow(
      x, b,
      [&](double s) {
        const double gap = ctx.drawdown().xi_bar(s);
        return FlowSample{drawdown_rate(s, ctx), phi(s) * ctx.scale_q().drawdown_bracket(gap, 0.0)};
      },
      ctx, panel);
}

double first_drawdown_overshoot(double x, double b, const KernelContext& ctx, double panel) {
  return drawdown_flow(
      x, b,
      [&](double s) {
        const double gap = ctx.drawdown().xi_bar(s);
        return FlowSample{drawdown_rate(s, ctx), ctx.scale_q().injection_bracket(gap)};
      },
      ctx, panel);
}

}  // namespace parisian
