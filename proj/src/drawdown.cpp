#include "parisian/drawdown.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "parisian/errors.hpp"

namespace parisian {

namespace {

double parse_number(const std::string& s, const std::string& what) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw InvalidArgument("bad number '" + s + "' in " + what);
  }
  if (used != s.size()) throw InvalidArgument("bad number '" + s + "' in " + what);
  return v;
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

DrawdownSpec DrawdownSpec::linear(double k, double domain_min) {
  if (!(k > 0.0 && k < 1.0)) throw InvalidArgument("linear draw-down needs 0 < K < 1");
  if (!(domain_min > 0.0)) throw InvalidArgument("linear draw-down needs domain_min > 0");
  DrawdownSpec s;
  s.kind_ = Kind::Linear;
  s.k_ = k;
  s.domain_min_ = domain_min;
  return s;
}

DrawdownSpec DrawdownSpec::capped(double cap, double k, double domain_min) {
  if (!(k > 0.0 && k < 1.0)) throw InvalidArgument("capped draw-down needs 0 < K < 1");
  if (!(cap > 0.0) || !std::isfinite(cap)) throw InvalidArgument("capped draw-down needs a positive cap");
  if (!(domain_min > 0.0)) throw InvalidArgument("capped draw-down needs domain_min > 0");
  DrawdownSpec s;
  s.kind_ = Kind::CappedLinear;
  s.k_ = k;
  s.cap_ = cap;
  s.domain_min_ = domain_min;
  return s;
}

DrawdownSpec DrawdownSpec::custom(std::function<double(double)> fn, double domain_min, double validate_upper,
                                  std::vector<double> kinks) {
  if (!fn) throw InvalidArgument("custom draw-down needs a callable");
  if (!(validate_upper > domain_min)) throw InvalidArgument("custom draw-down needs validate_upper > domain_min");
  constexpr int kSamples = 10000;
  double prev = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < kSamples; ++i) {
    const double x = domain_min + (validate_upper - domain_min) * i / (kSamples - 1);
    const double v = fn(x);
    if (!(v < x)) throw DomainViolation("custom draw-down has xi(x) >= x at x = " + fmt(x));
    if (v < prev) throw InvalidArgument("custom draw-down must be nondecreasing");
    prev = v;
  }
  DrawdownSpec s;
  s.kind_ = Kind::Custom;
  s.domain_min_ = domain_min;
  s.fn_ = std::move(fn);
  std::sort(kinks.begin(), kinks.end());
  s.custom_kinks_ = std::move(kinks);
  return s;
}

DrawdownSpec DrawdownSpec::parse(const std::string& text, double domain_min) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ':')) parts.push_back(item);
  if (parts.size() == 2 && parts[0] == "linear") return linear(parse_number(parts[1], text), domain_min);
  if (parts.size() == 3 && parts[0] == "capped") {
    return capped(parse_number(parts[1], text), parse_number(parts[2], text), domain_min);
  }
  throw InvalidArgument("draw-down spec must be linear:K or capped:cap:K, got '" + text + "'");
}

double DrawdownSpec::level(double x) const {
  switch (kind_) {
    case Kind::Linear:
      return k_ * x;
    case Kind::CappedLinear:
      return std::min(cap_, k_ * x);
    case Kind::Custom:
      return fn_(x);
  }
  return 0.0;
}

double DrawdownSpec::xi(double x) const {
  if (!(x >= domain_min_)) throw DomainViolation("draw-down evaluated below its domain at x = " + fmt(x));
  const double v = level(x);
  if (!(v < x)) throw DomainViolation("draw-down has xi(x) >= x at x = " + fmt(x));
  return v;
}

double DrawdownSpec::xi_bar(double x) const { return x - xi(x); }

double DrawdownSpec::preimage_sup(double u) const {
  const double inf = std::numeric_limits<double>::infinity();
  switch (kind_) {
    case Kind::Linear:
      return u / k_;
    case Kind::CappedLinear:
      return u > cap_ ? inf : u / k_;
    case Kind::Custom: {
      double lo = domain_min_;
      if (!(fn_(lo) < u)) return lo;
      double hi = std::max(1.0, 2.0 * std::abs(lo));
      while (fn_(hi) < u) {
        hi *= 2.0;
        if (hi > 1e12) return inf;
      }
      for (int i = 0; i < 200 && hi - lo > 1e-14 * hi; ++i) {
        const double mid = 0.5 * (lo + hi);
        (fn_(mid) < u ? lo : hi) = mid;
      }
      return hi;
    }
  }
  return inf;
}

std::vector<double> DrawdownSpec::kinks(double lo, double hi) const {
  std::vector<double> out;
  if (kind_ == Kind::CappedLinear) {
    const double k = cap_ / k_;
    if (k > lo && k < hi) out.push_back(k);
  } else if (kind_ == Kind::Custom) {
    for (double k : custom_kinks_) {
      if (k > lo && k < hi) out.push_back(k);
    }
  }
  return out;
}

std::string DrawdownSpec::to_string() const {
  switch (kind_) {
    case Kind::Linear:
      return "linear:" + fmt(k_);
    case Kind::CappedLinear:
      return "capped:" + fmt(cap_) + ":" + fmt(k_);
    case Kind::Custom:
      return "custom";
  }
  return "custom";
}

}  // namespace parisian
