#pragma once

// Quantile scenario trees over wind, branching only at the current node, and
// the synthetic AR(1) wind process that feeds them.

#include "inertia/domain.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace inertia {

/// AR(1) process on the capacity factor, clipped to [0, 1].
struct WindProcess {
    double capacity = 0.0;     // MW
    double mean_cf = 0.35;
    double persistence = 0.9;  // AR(1) coefficient in [0, 1)
    double sigma_step = 0.05;  // per-hour innovation std, capacity fraction
    std::uint64_t seed = 1;
};

void validate_wind(const WindProcess& w);

struct QuantileSpec {
    std::vector<double> quantiles;
    std::vector<double> probabilities;
};

/// Midpoint partition of [0, 1]: boundaries halfway between adjacent quantiles.
std::vector<double> quantile_probabilities(std::span<const double> quantiles);

QuantileSpec make_quantile_spec(std::vector<double> quantiles);

struct ForecastDistribution {
    double mean = 0.0;  // MW, clipped to [0, capacity]
    double std = 0.0;   // MW
};

ForecastDistribution forecast_distribution(const WindProcess& process, double current_wind, int lead);

/// Quantile q of the forecast, truncated to [0, capacity].
double forecast_quantile(const WindProcess& process, const ForecastDistribution& dist, double q);

/// Realised hourly wind (MW) drawn from the process; deterministic for a seed.
std::vector<double> simulate_wind(const WindProcess& process, std::size_t hours,
                                  double initial_cf = -1.0);

class ScenarioTree {
public:
    explicit ScenarioTree(std::vector<TreeNode> nodes);

    const std::vector<TreeNode>& nodes() const { return nodes_; }
    std::size_t size() const { return nodes_.size(); }
    const TreeNode& operator[](std::size_t i) const { return nodes_[i]; }
    const std::vector<std::size_t>& children(std::size_t i) const { return children_[i]; }
    std::vector<std::size_t> leaves() const;
    /// Node `steps` generations above `n`, or nothing when that lies before the root.
    std::optional<std::size_t> ancestor(std::size_t n, int steps) const;
    /// Generations between n and the root.
    int depth(std::size_t n) const { return depth_[n]; }

private:
    std::vector<TreeNode> nodes_;
    std::vector<std::vector<std::size_t>> children_;
    std::vector<int> depth_;
};

/// Root carries the realised wind; one chain of `horizon` hourly nodes per
/// quantile with the per-lead forecast quantile as wind. Demand at lead l is
/// demand[l % demand.size()].
ScenarioTree build_tree(const WindProcess& process, double current_wind,
                        std::span<const double> demand, const QuantileSpec& spec, int horizon);

/// One node per lead with the given wind and demand.
ScenarioTree deterministic_chain(std::span<const double> wind, std::span<const double> demand);

}  // namespace inertia
