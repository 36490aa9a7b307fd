#include "parisian/cli.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "parisian/errors.hpp"
#include "parisian/formulas.hpp"
#include "parisian/simulator.hpp"

namespace parisian::cli {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double parse_double(const std::string& s, const std::string& what) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw InvalidArgument("bad number '" + s + "' for " + what);
  }
  if (used != s.size()) throw InvalidArgument("bad number '" + s + "' for " + what);
  return v;
}

double parse_barrier(const std::string& s) {
  if (s == "inf" || s == "infinity" || s == "Inf") return kInf;
  const double b = parse_double(s, "--b");
  if (!std::isfinite(b)) throw InvalidArgument("--b must be a number or inf");
  return b;
}

ModelParams model_of(const Options& o) {
  ModelParams m{o.mu, o.sigma, o.a, o.c};
  m.validate();
  return m;
}

QuadratureConfig quad_of(const Options& o) {
  QuadratureConfig q{o.panel, o.rel_tol, o.abs_tol, o.truncation_eps, o.max_upper};
  q.validate();
  return q;
}

SimConfig sim_of(const Options& o) {
  SimConfig s;
  s.n_paths = o.n_paths;
  s.dt = o.dt;
  s.horizon = o.horizon;
  s.seed = o.seed;
  s.workers = o.workers;
  if (o.scheme == "euler") {
    s.scheme = SimConfig::Scheme::Euler;
  } else if (o.scheme == "bridge") {
    s.scheme = SimConfig::Scheme::Bridge;
  } else {
    throw InvalidArgument("--scheme must be euler or bridge");
  }
  s.validate();
  return s;
}

Query query_of(const Options& o, double x, double lambda) {
  Query q;
  q.x = x;
  q.b = parse_barrier(o.b);
  q.transform = {o.q, lambda, o.u, o.v};
  q.drawdown = DrawdownSpec::parse(o.xi, o.domain_min);
  q.model = model_of(o);
  q.quad = quad_of(o);
  return q;
}

std::string join(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + format_number(v[i]);
  return s;
}

bool uses_mc(const Options& o) { return o.command == "simulate" || o.method == "mc" || o.method == "both"; }

void add_metadata(CurveTable& t, const Options& o) {
  t.add_meta("command", o.command);
  t.add_meta("mu", format_number(o.mu));
  t.add_meta("sigma", format_number(o.sigma));
  t.add_meta("a", format_number(o.a));
  t.add_meta("c", format_number(o.c));
  t.add_meta("q", format_number(o.q));
  t.add_meta("lambda", join(o.lambda));
  t.add_meta("xi", o.xi);
  t.add_meta("domain-min", format_number(o.domain_min));
  t.add_meta("b", o.b);
  t.add_meta("u", format_number(o.u));
  t.add_meta("v", format_number(o.v));
  if (o.command == "resolvent") {
    t.add_meta("x", format_number(o.x));
    t.add_meta("pos-grid", o.pos_grid);
  } else {
    t.add_meta("x-grid", o.x_grid);
  }
  t.add_meta("method", o.method);
  if (o.command == "simulate") t.add_meta("functional", o.functional);
  t.add_meta("panel", format_number(o.panel));
  t.add_meta("rel-tol", format_number(o.rel_tol));
  t.add_meta("abs-tol", format_number(o.abs_tol));
  t.add_meta("truncation-eps", format_number(o.truncation_eps));
  t.add_meta("max-upper", format_number(o.max_upper));
  if (uses_mc(o)) {
    t.add_meta("seed", std::to_string(o.seed));
    t.add_meta("workers", std::to_string(o.workers));
    t.add_meta("dt", format_number(o.dt));
    t.add_meta("n-paths", std::to_string(o.n_paths));
    t.add_meta("horizon", format_number(o.horizon));
    t.add_meta("scheme", o.scheme);
    t.add_meta("escape-offset", format_number(o.escape_offset));
  }
}

void check_method(const Options& o) {
  if (o.method != "formula" && o.method != "mc" && o.method != "both") {
    throw InvalidArgument("--method must be formula, mc or both");
  }
}

// Commands without a simulated counterpart; Monte Carlo runs go through `simulate`.
void require_formula(const Options& o) {
  check_method(o);
  if (o.method != "formula") throw InvalidArgument(o.command + " has no --method " + o.method + "; use simulate");
}

Estimate checked(const Estimate& e) {
  if (e.censoring_excess) {
    throw CensoringExcess(std::to_string(e.censored) + " of " + std::to_string(e.n) +
                          " paths hit the horizon; raise --horizon");
  }
  return e;
}

// Simulated functional at x, with the strong-Markov residual added for escaped paths when b = inf.
Estimate simulate_at(const Options& o, double x, double lambda, Functional f) {
  const Query q = query_of(o, x, lambda);
  SimConfig sim = sim_of(o);
  double escape_value = 0.0;
  if (!std::isfinite(q.b)) {
    sim.escape_level = x + o.escape_offset;
    if (f == Functional::RuinProb) {
      escape_value = ruin_probability(sim.escape_level, lambda, q.model, q.drawdown, q.quad);
    } else if (f == Functional::VXi) {
      Query at_escape = q;
      at_escape.x = sim.escape_level;
      escape_value = expected_injections(at_escape);
    } else if (f != Functional::DrawdownLaplace && f != Functional::Overshoot) {
      throw InvalidArgument("this functional needs a finite --b");
    }
  }
  return checked(estimate(q.model, q.drawdown, q.transform, x, q.b, sim, f, escape_value));
}

// Shared shape of ruin-prob and capital-injection: formula curve and/or MC per (x, lambda).
CurveTable formula_or_mc(const Options& o, Functional f,
                         const std::function<std::vector<double>(const std::vector<double>&, double)>& curve) {
  check_method(o);
  const auto xs = parse_grid(o.x_grid);
  CurveTable t;
  const bool mc = o.method != "formula";
  t.columns = mc ? std::vector<std::string>{"x", "lambda", "value", "stderr"}
                 : std::vector<std::string>{"x", "lambda", "value"};
  std::vector<std::vector<double>> formula(o.lambda.size());
  if (o.method != "mc") {
    for (std::size_t j = 0; j < o.lambda.size(); ++j) formula[j] = curve(xs, o.lambda[j]);
  }
  for (std::size_t i = 0; i < xs.size(); ++i) {
    for (std::size_t j = 0; j < o.lambda.size(); ++j) {
      if (o.method != "mc") {
        std::vector<double> row{xs[i], o.lambda[j], formula[j][i]};
        if (mc) row.push_back(0.0);
        t.add_row(row, "formula");
      }
      if (mc) {
        const auto e = simulate_at(o, xs[i], o.lambda[j], f);
        t.add_row({xs[i], o.lambda[j], e.mean, e.std_error}, "mc");
      }
    }
  }
  return t;
}

Functional functional_of(const std::string& name) {
  if (name == "upcross") return Functional::UpcrossLaplace;
  if (name == "ruin") return Functional::RuinLaplace;
  if (name == "uxi") return Functional::UXi;
  if (name == "ruin-prob") return Functional::RuinProb;
  if (name == "joint") return Functional::JointG;
  if (name == "v") return Functional::VXi;
  if (name == "drawdown") return Functional::DrawdownLaplace;
  if (name == "overshoot") return Functional::Overshoot;
  throw InvalidArgument("unknown --functional '" + name + "'");
}

CurveTable cmd_ruin_prob(const Options& o) {
  const auto model = model_of(o);
  const auto dd = DrawdownSpec::parse(o.xi, o.domain_min);
  const auto quad = quad_of(o);
  return formula_or_mc(o, Functional::RuinProb, [&](const std::vector<double>& xs, double lambda) {
    return ruin_probability_curve(xs, lambda, model, dd, quad);
  });
}

CurveTable cmd_capital_injection(const Options& o) {
  return formula_or_mc(o, Functional::VXi, [&](const std::vector<double>& xs, double lambda) {
    return expected_injections_curve(query_of(o, xs.front(), lambda), xs);
  });
}

CurveTable cmd_exit_laplace(const Options& o) {
  require_formula(o);
  const auto xs = parse_grid(o.x_grid);
  CurveTable t;
  t.columns = {"x", "lambda", "upcross", "ruin", "uxi"};
  std::vector<std::vector<ExitValues>> vals;
  for (double lambda : o.lambda) vals.push_back(exit_laplace_curve(query_of(o, xs.front(), lambda), xs));
  for (std::size_t i = 0; i < xs.size(); ++i) {
    for (std::size_t j = 0; j < o.lambda.size(); ++j) {
      const auto& e = vals[j][i];
      t.add_row({xs[i], o.lambda[j], e.upcross, e.ruin, e.total()}, "formula");
    }
  }
  return t;
}

CurveTable cmd_joint_laplace(const Options& o) {
  require_formula(o);
  const auto xs = parse_grid(o.x_grid);
  CurveTable t;
  t.columns = {"x", "lambda", "value"};
  std::vector<std::vector<double>> vals;
  for (double lambda : o.lambda) vals.push_back(joint_laplace_curve(query_of(o, xs.front(), lambda), xs));
  for (std::size_t i = 0; i < xs.size(); ++i) {
    for (std::size_t j = 0; j < o.lambda.size(); ++j) t.add_row({xs[i], o.lambda[j], vals[j][i]}, "formula");
  }
  return t;
}

CurveTable cmd_resolvent(const Options& o) {
  require_formula(o);
  if (o.pos_grid.empty()) throw InvalidArgument("resolvent needs --pos-grid lo:hi:n");
  const auto us = parse_grid(o.pos_grid);
  CurveTable t;
  t.columns = {"u", "lambda", "density"};
  for (double lambda : o.lambda) {
    const ResolventDensity density(query_of(o, o.x, lambda));
    for (double u : us) t.add_row({u, lambda, density(u)}, "formula");
  }
  return t;
}

CurveTable cmd_simulate(const Options& o) {
  if (!o.seed_given) throw InvalidArgument("simulate needs --seed");
  const Functional f = functional_of(o.functional);
  const auto xs = parse_grid(o.x_grid);
  CurveTable t;
  t.columns = {"x", "lambda", "value", "stderr"};
  for (double x : xs) {
    for (double lambda : o.lambda) {
      const auto e = simulate_at(o, x, lambda, f);
      t.add_row({x, lambda, e.mean, e.std_error}, "mc");
    }
  }
  return t;
}

}  // namespace

std::vector<double> parse_grid(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ':')) parts.push_back(item);
  if (parts.size() != 3) throw InvalidArgument("grid must be lo:hi:n, got '" + text + "'");
  const double lo = parse_double(parts[0], "grid");
  const double hi = parse_double(parts[1], "grid");
  const double nd = parse_double(parts[2], "grid");
  if (!(nd >= 1.0) || nd != std::floor(nd) || nd > 1e7) throw InvalidArgument("grid count must be a positive integer");
  if (!(hi >= lo)) throw InvalidArgument("grid needs hi >= lo");
  const auto n = static_cast<std::size_t>(nd);
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = n == 1 ? lo : (i + 1 == n ? hi : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1));
  }
  return out;
}

CurveTable run_command(const Options& o) {
  CurveTable t;
  if (o.lambda.empty()) throw InvalidArgument("--lambda needs at least one value");
  if (o.command == "ruin-prob") {
    t = cmd_ruin_prob(o);
  } else if (o.command == "capital-injection") {
    t = cmd_capital_injection(o);
  } else if (o.command == "exit-laplace") {
    t = cmd_exit_laplace(o);
  } else if (o.command == "joint-laplace") {
    t = cmd_joint_laplace(o);
  } else if (o.command == "resolvent") {
    t = cmd_resolvent(o);
  } else if (o.command == "simulate") {
    t = cmd_simulate(o);
  } else {
    throw InvalidArgument("unknown command '" + o.command + "'");
  }
  add_metadata(t, o);
  return t;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Options o;
  std::string out_file;
  CLI::App app{"Parisian ruin quantities of draw-down reflected jump-diffusions"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "key=value file; command-line flags win");
  app.allow_config_extras(CLI::config_extras_mode::ignore);

  const std::pair<const char*, const char*> commands[] = {
      {"ruin-prob", "Parisian ruin probability over an x grid"},
      {"capital-injection", "expected discounted capital injections V over an x grid"},
      {"exit-laplace", "upcrossing and Parisian ruin Laplace transforms"},
      {"joint-laplace", "joint transform of exit time, position and injections"},
      {"resolvent", "killed resolvent density over a position grid"},
      {"simulate", "Monte Carlo estimate of one functional"},
  };
  for (const auto& [name, help] : commands) app.add_subcommand(name, help);

  app.add_option("--mu", o.mu, "drift");
  app.add_option("--sigma", o.sigma, "volatility");
  app.add_option("--a", o.a, "claim arrival rate");
  app.add_option("--c", o.c, "exponential claim rate (mean claim 1/c)");
  app.add_option("--q", o.q, "discount rate");
  app.add_option("--lambda", o.lambda, "Parisian clock rate(s), comma separated")->delimiter(',');
  app.add_option("--xi", o.xi, "draw-down function: linear:K or capped:cap:K");
  app.add_option("--domain-min", o.domain_min, "lowest admissible surplus");
  app.add_option("--x-grid", o.x_grid, "start points lo:hi:n");
  app.add_option("--b", o.b, "upper barrier or inf");
  app.add_option("--u", o.u, "tilt on the exit position");
  app.add_option("--v", o.v, "tilt on injections");
  app.add_option("--x", o.x, "start point of resolvent");
  app.add_option("--pos-grid", o.pos_grid, "positions lo:hi:n of resolvent");
  app.add_option("--method", o.method, "formula, mc or both");
  app.add_option("--functional", o.functional, "upcross, ruin, uxi, ruin-prob, joint, v, drawdown, overshoot");
  auto* seed_opt = app.add_option("--seed", o.seed, "RNG seed");
  app.add_option("--workers", o.workers, "simulation threads");
  app.add_option("--dt", o.dt, "time step for sigma > 0");
  app.add_option("--n-paths", o.n_paths, "Monte Carlo paths");
  app.add_option("--horizon", o.horizon, "maximal simulated time");
  app.add_option("--scheme", o.scheme, "euler or bridge");
  app.add_option("--escape-offset", o.escape_offset, "escape level above x when b = inf");
  app.add_option("--panel", o.panel, "grid intervals per unit length");
  app.add_option("--rel-tol", o.rel_tol, "relative tolerance of adaptive integrals");
  app.add_option("--abs-tol", o.abs_tol, "absolute tolerance of adaptive integrals");
  app.add_option("--truncation-eps", o.truncation_eps, "tail budget for b = inf");
  app.add_option("--max-upper", o.max_upper, "largest truncation point for b = inf");
  app.add_option("--out", out_file, "write CSV here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
  o.command = app.get_subcommands().front()->get_name();
  o.seed_given = seed_opt->count() > 0;

  try {
    const CurveTable t = run_command(o);
    if (out_file.empty()) {
      t.write_csv(out);
    } else {
      std::ofstream f(out_file);
      if (!f) throw InvalidArgument("cannot open " + out_file);
      t.write_csv(f);
    }
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "numerical failure: " << e.what() << '\n';
    return 3;
  }
  return 0;
}

}  // namespace parisian::cli
