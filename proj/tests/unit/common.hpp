#pragma once

#include <cmath>

#include "parisian/levy_model.hpp"

namespace testing {

inline parisian::ModelParams jump_diffusion() { return {0.075, 0.2, 0.5, 9.0}; }
inline parisian::ModelParams jump_drift() { return {0.075, 0.0, 0.5, 9.0}; }
inline parisian::ModelParams pure_drift() { return {1.0, 0.0, 0.0, 9.0}; }

inline double rel_err(double got, double want) {
  return std::abs(got - want) / std::max(std::abs(want), 1e-300);
}

}  // namespace testing
