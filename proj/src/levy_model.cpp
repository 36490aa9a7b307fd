#include "parisian/levy_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "parisian/errors.hpp"

namespace parisian {

namespace {

constexpr int kMaxPolish = 200;

bool finite(double v) { return std::isfinite(v); }

void check_pole(const ModelParams& m, double theta) {
  if (m.a > 0.0 && theta + m.c == 0.0) {
    throw PoleError("psi evaluated at its pole theta = -c");
  }
}

// Real roots of a0 + a1 t + a2 t^2 (+ a3 t^3); degenerate leading terms fall through.
std::vector<double> poly_real_roots(double a0, double a1, double a2, double a3) {
  std::vector<double> out;
  if (a3 != 0.0) {
    const double b = a2 / a3;
    const double c = a1 / a3;
    const double d = a0 / a3;
    const double p = c - b * b / 3.0;
    const double qq = 2.0 * b * b * b / 27.0 - b * c / 3.0 + d;
    const double disc = qq * qq / 4.0 + p * p * p / 27.0;
    const double shift = -b / 3.0;
    if (disc < 0.0) {
      const double r = 2.0 * std::sqrt(-p / 3.0);
      const double arg = std::clamp(3.0 * qq / (p * r), -1.0, 1.0);
      const double phi = std::acos(arg) / 3.0;
      for (int k = 0; k < 3; ++k) {
        out.push_back(shift + r * std::cos(phi - 2.0 * std::numbers::pi * k / 3.0));
      }
    } else {
      const double s = std::sqrt(disc);
      out.push_back(shift + std::cbrt(-qq / 2.0 + s) + std::cbrt(-qq / 2.0 - s));
    }
    return out;
  }
  if (a2 != 0.0) {
    const double disc = a1 * a1 - 4.0 * a2 * a0;
    if (disc < 0.0) return out;
    // Stable form avoids cancellation in the smaller root.
    const double s = std::sqrt(disc);
    const double t = -0.5 * (a1 + std::copysign(s, a1));
    if (t != 0.0) {
      out.push_back(t / a2);
      out.push_back(a0 / t);
    } else {
      out.push_back(0.0);
      out.push_back(0.0);
    }
    return out;
  }
  if (a1 != 0.0) out.push_back(-a0 / a1);
  return out;
}

// Safeguarded Newton on psi - q, restricted to the pole-free interval (lo_lim, hi_lim).
double polish(const ModelParams& m, double q, double seed, double lo_lim, double hi_lim) {
  auto f = [&](double t) { return psi(m, t) - q; };
  const double tol = 1e-12 * std::max(1.0, std::abs(q));

  double f_seed = f(seed);
  if (f_seed == 0.0) return seed;

  double step = 1e-7 * (1.0 + std::abs(seed));
  double lo = seed, hi = seed;
  double flo = f_seed, fhi = f_seed;
  bool bracketed = false;
  for (int i = 0; i < 200 && !bracketed; ++i) {
    lo = seed - step > lo_lim ? seed - step : 0.5 * (lo + lo_lim);
    hi = seed + step < hi_lim ? seed + step : 0.5 * (hi + hi_lim);
    flo = f(lo);
    fhi = f(hi);
    if ((flo <= 0.0) != (f_seed <= 0.0)) {
      hi = seed;
      fhi = f_seed;
      bracketed = true;
    } else if ((fhi <= 0.0) != (f_seed <= 0.0)) {
      lo = seed;
      flo = f_seed;
      bracketed = true;
    }
    step *= 2.0;
  }
  if (!bracketed) throw NoConvergence("could not bracket root of psi(theta) = q near " + std::to_string(seed));

  double x = seed;
  for (int it = 0; it < kMaxPolish; ++it) {
    const double fx = f(x);
    if (std::abs(fx) <= tol) return x;
    if ((fx <= 0.0) == (flo <= 0.0)) {
      lo = x;
      flo = fx;
    } else {
      hi = x;
      fhi = fx;
    }
    if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(x))) {
      if (std::abs(fx) <= 1e-10 * std::max(1.0, std::abs(q))) return x;
      // Near the pole one ulp of theta moves psi by more than the tolerance; the
      // root is then as good as a double can hold.
      const double ulp = std::nextafter(std::abs(x), std::numeric_limits<double>::infinity()) - std::abs(x);
      if (std::abs(fx) <= 8.0 * std::abs(psi_prime(m, x)) * ulp) return x;
      break;
    }
    const double d = psi_prime(m, x);
    double next = d != 0.0 ? x - fx / d : lo - 1.0;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    x = next;
  }
  throw NoConvergence("root polishing did not converge near " + std::to_string(seed));
}

}  // namespace

void ModelParams::validate() const {
  if (!finite(mu) || !finite(sigma) || !finite(a) || !finite(c)) {
    throw InvalidArgument("model parameters must be finite");
  }
  if (sigma < 0.0) throw InvalidArgument("sigma must be >= 0");
  if (a < 0.0) throw InvalidArgument("a must be >= 0");
  if (c <= 0.0) throw InvalidArgument("c must be > 0");
  if (sigma == 0.0 && mu <= 0.0) {
    throw InvalidArgument("sigma = 0 requires a positive drift mu");
  }
}

double psi(const ModelParams& m, double theta) {
  check_pole(m, theta);
  double v = m.mu * theta + 0.5 * m.sigma * m.sigma * theta * theta;
  if (m.a > 0.0) v -= m.a * theta / (theta + m.c);
  return v;
}

double psi_prime(const ModelParams& m, double theta) {
  check_pole(m, theta);
  double v = m.mu + m.sigma * m.sigma * theta;
  if (m.a > 0.0) {
    const double d = theta + m.c;
    v -= m.a * m.c / (d * d);
  }
  return v;
}

double mean_drift(const ModelParams& m) { return m.a > 0.0 ? m.mu - m.a / m.c : m.mu; }

std::vector<double> RootSet::all() const {
  std::vector<double> r{phi_q};
  r.insert(r.end(), negative_roots.begin(), negative_roots.end());
  return r;
}

RootSet solve_roots(const ModelParams& m, double q) {
  m.validate();
  if (!(q >= 0.0) || !finite(q)) throw InvalidArgument("killing rate q must be finite and >= 0");

  const double s2 = 0.5 * m.sigma * m.sigma;
  const bool jumps = m.has_jumps();
  const std::size_t expected = (m.has_diffusion() ? 2u : 1u) + (jumps ? 1u : 0u);

  // (psi(theta) - q)(theta + c) when there are jumps, psi(theta) - q otherwise.
  double a0, a1, a2, a3;
  if (jumps) {
    a3 = s2;
    a2 = s2 * m.c + m.mu;
    a1 = m.mu * m.c - m.a - q;
    a0 = -q * m.c;
  } else {
    a3 = 0.0;
    a2 = s2;
    a1 = m.mu;
    a0 = -q;
  }

  const double drift0 = mean_drift(m);
  const bool zero_is_phi = q == 0.0 && drift0 > 0.0;
  if (q == 0.0 && drift0 == 0.0) {
    throw DegenerateModel("psi'(0+) = 0 gives a double root at q = 0");
  }

  std::vector<double> seeds;
  if (q == 0.0) {
    // theta = 0 is always a root; deflate it and keep it exact.
    seeds = poly_real_roots(a1, a2, a3, 0.0);
  } else {
    seeds = poly_real_roots(a0, a1, a2, a3);
  }

  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> roots;
  for (double s : seeds) {
    if (!finite(s)) continue;
    if (jumps && std::abs(s + m.c) <= 1e-12 * m.c) continue;
    double lo = -inf, hi = inf;
    if (jumps) {
      if (s < -m.c) {
        hi = -m.c;
      } else {
        lo = -m.c;
      }
    }
    if (q == 0.0) {
      // Keep the deflated roots on their side of zero.
      if (s < 0.0) hi = std::min(hi, 0.0);
      if (s > 0.0) lo = std::max(lo, 0.0);
      if (s == 0.0) continue;
    }
    roots.push_back(polish(m, q, s, lo, hi));
  }
  if (q == 0.0) roots.push_back(0.0);

  std::sort(roots.begin(), roots.end(), std::greater<>());
  for (std::size_t i = 1; i < roots.size(); ++i) {
    if (std::abs(roots[i] - roots[i - 1]) <= 1e-12 * std::max(1.0, std::abs(roots[i]))) {
      throw DegenerateModel("coincident roots of psi(theta) = q");
    }
  }
  if (roots.size() != expected) {
    throw DegenerateModel("psi(theta) = q has " + std::to_string(roots.size()) + " real roots, expected " +
                          std::to_string(expected));
  }

  RootSet out;
  out.q = q;
  out.phi_q = roots.front();
  if (zero_is_phi) out.phi_q = 0.0;
  out.negative_roots.assign(roots.begin() + 1, roots.end());
  return out;
}

}  // namespace parisian
