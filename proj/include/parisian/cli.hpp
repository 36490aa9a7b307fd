#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

#include "parisian/curve_table.hpp"

namespace parisian::cli {

/// Every flag of the command-line front end, with the numerical-study defaults.
struct Options {
  std::string command;
  double mu = 0.075;
  double sigma = 0.2;
  double a = 0.5;
  double c = 9.0;
  double q = 0.05;
  std::vector<double> lambda{0.2};
  std::string xi = "linear:0.8";
  double domain_min = 1e-6;
  std::string x_grid = "0.1:10:100";
  std::string b = "inf";
  double u = 0.0;
  double v = 0.0;
  double x = 1.0;              ///< start point of `resolvent`
  std::string pos_grid;        ///< positions of `resolvent`
  std::string method = "formula";
  std::string functional = "uxi";
  std::uint64_t seed = 1;
  bool seed_given = false;
  unsigned workers = 1;
  double dt = 1e-3;
  std::size_t n_paths = 100000;
  double horizon = 1e4;
  std::string scheme = "euler";
  double escape_offset = 5.0;  ///< escape level = x + offset when b is infinite
  double panel = 256.0;
  double rel_tol = 1e-7;
  double abs_tol = 1e-10;
  double truncation_eps = 1e-10;
  double max_upper = 500.0;
};

/// Parses "lo:hi:n" into n equally spaced points (n = 1 gives lo).
[[nodiscard]] std::vector<double> parse_grid(const std::string& text);

/// Runs one subcommand and returns its table, metadata included.
[[nodiscard]] CurveTable run_command(const Options& opts);

/// Full front end: parse, run, write CSV to `out` (or --out), report errors to `err`.
/// Returns 0, 2 for bad arguments, 3 for numerical failures.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace parisian::cli
