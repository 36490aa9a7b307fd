#include "parisian/scale_functions.hpp"

#include <cmath>
#include <string>

#include "parisian/errors.hpp"

namespace parisian {

namespace {

// Beyond this value of phi * x every evaluation factors out e^{phi x}.
constexpr double kScaleThreshold = 200.0;

// (e^{rx} - 1) / r, with the r = 0 limit.
double e1(double r, double x) { return r == 0.0 ? x : std::expm1(r * x) / r; }

// (e^{rx} - 1 - rx) / r^2, with a series near rx = 0.
double e2(double r, double x) {
  const double t = r * x;
  if (std::abs(t) < 0.5) {
    // x^2 * sum_k t^k / (k+2)!
    double term = 0.5;
    double sum = 0.5;
    for (int k = 1; k < 30; ++k) {
      term *= t / (k + 2);
      sum += term;
      if (std::abs(term) < 1e-18 * std::abs(sum)) break;
    }
    return x * x * sum;
  }
  return (std::expm1(t) - t) / (r * r);
}

double e1_scaled(double r, double x, double s) {
  if (r > 0.0 && r * x > 1.0) return (std::exp(r * x - s) - std::exp(-s)) / r;
  return e1(r, x) * std::exp(-s);
}

double e2_scaled(double r, double x, double s) {
  if (r > 0.0 && r * x > 1.0) return (std::exp(r * x - s) - std::exp(-s) * (1.0 + r * x)) / (r * r);
  return e2(r, x) * std::exp(-s);
}

}  // namespace

ScaleRep::ScaleRep(const ModelParams& model, double q) : model_(model), q_(q), roots_(solve_roots(model, q)) {
  for (double r : roots_.all()) terms_.push_back({r, 1.0 / psi_prime(model_, r)});
  if (!(terms_.front().weight > 0.0)) throw DegenerateModel("weight of the phi term must be positive");
  for (std::size_t i = 1; i < terms_.size(); ++i) {
    if (!(terms_[i].weight < 0.0)) throw DegenerateModel("weights of sub-phi terms must be negative");
  }
  if (model_.has_diffusion()) {
    w0_ = 0.0;
    w0_prime_ = 2.0 / (model_.sigma * model_.sigma);
  } else {
    w0_ = 1.0 / model_.mu;
    w0_prime_ = (model_.a + q_) / (model_.mu * model_.mu);
  }
}

ScalePoint ScaleRep::at(double x) const {
  ScalePoint p;
  if (x < 0.0) {
    p.w = p.w_prime = p.w_bar = 0.0;
    p.z = 1.0;
    p.z_bar = x;
    return p;
  }
  const double s = phi() * x > kScaleThreshold ? phi() * x : 0.0;
  double w = 0.0, wp = 0.0, wb = 0.0, e2sum = 0.0;
  if (s == 0.0) {
    w = w0_;
    for (const auto& t : terms_) {
      w += t.weight * std::expm1(t.exponent * x);
      wp += t.weight * t.exponent * std::exp(t.exponent * x);
      wb += t.weight * e1(t.exponent, x);
      e2sum += t.weight * e2(t.exponent, x);
    }
    p.z = 1.0 + q_ * wb;
    p.z_bar = x + q_ * e2sum;
  } else {
    for (const auto& t : terms_) {
      const double e = std::exp(t.exponent * x - s);
      w += t.weight * e;
      wp += t.weight * t.exponent * e;
      wb += t.weight * e1_scaled(t.exponent, x, s);
      e2sum += t.weight * e2_scaled(t.exponent, x, s);
    }
    const double es = std::exp(-s);
    p.z = es + q_ * wb;
    p.z_bar = x * es + q_ * e2sum;
  }
  p.w = w;
  p.w_prime = wp;
  p.w_bar = wb;
  p.log_scale = s;
  return p;
}

Scaled ScaleRep::z_tilted(double x, double theta) const {
  if (!(theta >= 0.0)) throw DomainError("Z_q(x, theta) needs theta >= 0");
  if (x <= 0.0) return {std::exp(theta * x), 0.0};
  if (theta == 0.0) return at(x).scaled_z();

  // Partial fractions of 1/(psi - q) turn Z_q(x, theta) into sum_i c_i e^{r_i x} with
  // c_i = w_i (psi(theta) - q)/(theta - r_i) = w_i * lead * prod_{j != i}(theta - r_j) / D(theta).
  // The c_i sum to one and theta = r_i needs no special case.
  const double lead = model_.has_diffusion() ? 0.5 * model_.sigma * model_.sigma : model_.mu;
  const double denom = model_.has_jumps() ? theta + model_.c : 1.0;
  const double s = phi() * x > kScaleThreshold ? phi() * x : 0.0;
  double acc = 0.0;
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    double ci = terms_[i].weight * lead / denom;
    for (std::size_t j = 0; j < terms_.size(); ++j) {
      if (j != i) ci *= theta - terms_[j].exponent;
    }
    acc += s == 0.0 ? ci * std::expm1(terms_[i].exponent * x) : ci * std::exp(terms_[i].exponent * x - s);
  }
  return {s == 0.0 ? 1.0 + acc : acc, s};
}

Scaled ScaleRep::compensated_integral(double z, double u, double v) const {
  if (z < 0.0) throw DomainError("compensated integral needs z >= 0");
  const double ph = phi();
  for (std::size_t i = 1; i < terms_.size(); ++i) {
    if (!(v > terms_[i].exponent)) {
      throw IntegralDivergence("tilt v = " + std::to_string(v) + " does not exceed exponent " +
                               std::to_string(terms_[i].exponent));
    }
  }
  const double s = u * z > kScaleThreshold ? u * z : 0.0;
  const double euz = std::exp(u * z - s);
  double acc = w0_ * euz;
  for (std::size_t i = 1; i < terms_.size(); ++i) {
    const double r = terms_[i].exponent;
    const double d = u - r;
    const double inner = d == 0.0 ? z : -std::expm1(-d * z) / d;
    acc += terms_[i].weight * (r - ph) * (std::exp(r * z - s) / (v - r) + euz * inner);
  }
  return {acc, s};
}

// Both brackets below are written as sums over root pairs. With Z = q sum_i w_i e^{r_i s}/r_i
// (valid for q > 0) the diagonal terms, which carry the e^{2 phi s} growth, vanish
// identically and every remaining pair contributes with the same sign.

double ScaleRep::drawdown_bracket(double s, double v) const {
  if (!(s > 0.0)) throw DomainError("draw-down bracket needs s > 0");
  const auto p = at(s);
  if (!(p.w > 0.0)) throw BoundaryEval("W_q vanishes at the draw-down gap");
  const double psi_v = psi(model_, v);
  if (q_ == 0.0 || !(v >= 0.0)) {
    const auto zv = z_tilted(s, v);
    const double zval = zv.value();
    return (p.w_prime / p.w - v) * zval - (q_ - psi_v) * p.w * std::exp(p.log_scale);
  }
  // d_i = (psi(v) - q)/(v - r_i), finite at v = r_i.
  const double lead = model_.has_diffusion() ? 0.5 * model_.sigma * model_.sigma : model_.mu;
  const double denom = model_.has_jumps() ? v + model_.c : 1.0;
  const std::size_t n = terms_.size();
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double di = lead / denom;
    for (std::size_t k = 0; k < n; ++k) {
      if (k != i) di *= v - terms_[k].exponent;
    }
    for (std::size_t j = i + 1; j < n; ++j) {
      const double ri = terms_[i].exponent, rj = terms_[j].exponent;
      const double e = std::exp((ri + rj) * s - p.log_scale);
      acc -= terms_[i].weight * terms_[j].weight * e * di * (ri - rj) * (ri - rj) / (v - rj);
    }
  }
  return acc / p.w;
}

double ScaleRep::injection_bracket(double s) const {
  if (!(s > 0.0)) throw DomainError("injection bracket needs s > 0");
  const auto p = at(s);
  if (!(p.w > 0.0)) throw BoundaryEval("W_q vanishes at the draw-down gap");
  const double m = mean_drift(model_);
  if (q_ == 0.0) {
    const double direct = p.z - m * p.w - (p.z_bar - m * p.w_bar) * p.w_prime / p.w;
    return direct * std::exp(p.log_scale);
  }
  const std::size_t n = terms_.size();
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double ri = terms_[i].exponent, rj = terms_[j].exponent;
      const double e = std::exp((ri + rj) * s - p.log_scale);
      const double d = ri - rj;
      acc -= terms_[i].weight * terms_[j].weight * e * d * d * (q_ * (ri + rj) - m * ri * rj) /
             (ri * ri * rj * rj);
    }
  }
  return acc / p.w;
}

std::shared_ptr<const ScaleFamily> make_scale(const ModelParams& model, double q) {
  return std::make_shared<const ScaleRep>(model, q);
}

double w_q(const ScaleFamily& s, double x) {
  if (x < 0.0) return 0.0;
  return s.at(x).scaled_w().value();
}

double w_q_prime(const ScaleFamily& s, double x) {
  if (!(x > 0.0)) throw DomainError("W_q' is defined on (0, inf)");
  const auto p = s.at(x);
  return p.w_prime * std::exp(p.log_scale);
}

double w_bar_q(const ScaleFamily& s, double x) {
  if (x <= 0.0) return 0.0;
  const auto p = s.at(x);
  return p.w_bar * std::exp(p.log_scale);
}

double z_q(const ScaleFamily& s, double x) {
  if (x <= 0.0) return 1.0;
  return s.at(x).scaled_z().value();
}

double z_bar_q(const ScaleFamily& s, double x) {
  if (x <= 0.0) return x;
  const auto p = s.at(x);
  return p.z_bar * std::exp(p.log_scale);
}

double z_q_theta(const ScaleFamily& s, double x, double theta) { return s.z_tilted(x, theta).value(); }

double classical_two_sided_exit(const ScaleFamily& s, double x, double c, double b) {
  if (!(b > c) || x < c || x > b) throw DomainError("two-sided exit needs c <= x <= b and b > c");
  return ratio(s.at(x - c).scaled_w(), s.at(b - c).scaled_w());
}

double classical_down_exit(const ScaleFamily& s, double x, double c, double b) {
  if (!(b > c) || x < c || x > b) throw DomainError("two-sided exit needs c <= x <= b and b > c");
  const auto px = s.at(x - c);
  const auto pb = s.at(b - c);
  return px.scaled_z().value() - ratio(pb.scaled_z(), pb.scaled_w()) * px.scaled_w().value();
}

double reflected_exit(const ScaleFamily& s, double x, double b) {
  if (x < 0.0 || x > b) throw DomainError("reflected exit needs 0 <= x <= b");
  return ratio(s.at(x).scaled_z(), s.at(b).scaled_z());
}

double resolvent_x_density(const ScaleFamily& s, double x, double y, double c, double b) {
  if (!(b > c) || x < c || x > b) throw DomainError("resolvent of X needs c <= x <= b");
  if (!(y > c && y < b)) return 0.0;
  const double exit_up = classical_two_sided_exit(s, x, c, b);
  return exit_up * w_q(s, b - y) - w_q(s, x - y);
}

double resolvent_y_density(const ScaleFamily& s, double x, double y, double b) {
  if (x < 0.0 || x > b) throw DomainError("resolvent of Y needs 0 <= x <= b");
  if (!(y >= 0.0 && y < b)) return 0.0;
  return reflected_exit(s, x, b) * w_q(s, b - y) - w_q(s, x - y);
}

}  // namespace parisian
