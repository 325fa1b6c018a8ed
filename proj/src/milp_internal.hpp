#pragma once

#include "inertia/milp.hpp"

#include <span>

namespace inertia::milp {

/// LP relaxation with the model's bounds replaced by `lower`/`upper`.
Solution solve_relaxation(const Model& model, std::span<const double> lower,
                          std::span<const double> upper, const LpOptions& options);

}  // namespace inertia::milp
