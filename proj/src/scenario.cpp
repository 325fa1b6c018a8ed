#include "inertia/scenario.hpp"

#include <boost/math/distributions/normal.hpp>

#include <algorithm>
#include <cmath>
#include <random>

namespace inertia {

void validate_wind(const WindProcess& w) {
    if (!(w.capacity >= 0.0)) throw Error("wind: capacity must be >= 0", "capacity");
    if (!(w.mean_cf >= 0.0 && w.mean_cf <= 1.0)) throw Error("wind: mean_cf must lie in [0, 1]", "mean_cf");
    if (!(w.persistence >= 0.0 && w.persistence < 1.0)) {
        throw Error("wind: persistence must lie in [0, 1)", "persistence");
    }
    if (!(w.sigma_step >= 0.0)) throw Error("wind: sigma_step must be >= 0", "sigma_step");
}

std::vector<double> quantile_probabilities(std::span<const double> quantiles) {
    if (quantiles.empty()) throw Error("quantiles: at least one quantile required", "quantiles");
    for (std::size_t i = 0; i < quantiles.size(); ++i) {
        if (!(quantiles[i] > 0.0 && quantiles[i] < 1.0)) {
            throw Error("quantiles: values must lie in (0, 1)", "quantiles");
        }
        if (i > 0 && !(quantiles[i] > quantiles[i - 1])) {
            throw Error("quantiles: values must be strictly increasing", "quantiles");
        }
    }
    std::vector<double> probs;
    probs.reserve(quantiles.size());
    double lower = 0.0;
    for (std::size_t i = 0; i < quantiles.size(); ++i) {
        const double upper = i + 1 < quantiles.size() ? 0.5 * (quantiles[i] + quantiles[i + 1]) : 1.0;
        probs.push_back(upper - lower);
        lower = upper;
    }
    return probs;
}

QuantileSpec make_quantile_spec(std::vector<double> quantiles) {
    auto probs = quantile_probabilities(quantiles);
    return {std::move(quantiles), std::move(probs)};
}

ForecastDistribution forecast_distribution(const WindProcess& process, double current_wind, int lead) {
    if (lead < 1) throw Error("forecast: lead must be >= 1", "lead");
    if (process.capacity <= 0.0) return {0.0, 0.0};
    const double cf = std::clamp(current_wind / process.capacity, 0.0, 1.0);
    const double phi = process.persistence;
    const double decay = std::pow(phi, lead);
    const double mean_cf = process.mean_cf + decay * (cf - process.mean_cf);
    // Σ_{j<lead} φ^{2j}
    const double var_sum = phi == 0.0 ? 1.0 : (1.0 - std::pow(phi * phi, lead)) / (1.0 - phi * phi);
    return {std::clamp(mean_cf, 0.0, 1.0) * process.capacity,
            process.sigma_step * std::sqrt(var_sum) * process.capacity};
}

double forecast_quantile(const WindProcess& process, const ForecastDistribution& dist, double q) {
    if (dist.std <= 0.0) return std::clamp(dist.mean, 0.0, process.capacity);
    const boost::math::normal_distribution<double> normal(dist.mean, dist.std);
    return std::clamp(boost::math::quantile(normal, q), 0.0, process.capacity);
}

std::vector<double> simulate_wind(const WindProcess& process, std::size_t hours, double initial_cf) {
    validate_wind(process);
    std::mt19937_64 rng(process.seed);
    std::normal_distribution<double> noise(0.0, 1.0);
    double cf = initial_cf >= 0.0 ? std::clamp(initial_cf, 0.0, 1.0) : process.mean_cf;
    std::vector<double> out;
    out.reserve(hours);
    for (std::size_t h = 0; h < hours; ++h) {
        out.push_back(cf * process.capacity);
        const double eps = noise(rng);
        cf = std::clamp(process.mean_cf + process.persistence * (cf - process.mean_cf) +
                            process.sigma_step * eps,
                        0.0, 1.0);
    }
    return out;
}

ScenarioTree::ScenarioTree(std::vector<TreeNode> nodes) : nodes_(std::move(nodes)) {
    if (nodes_.empty()) throw Error("scenario tree: no nodes", "nodes");
    children_.resize(nodes_.size());
    depth_.assign(nodes_.size(), 0);
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        const auto& n = nodes_[i];
        if (n.id != i) throw Error("scenario tree: node ids must be dense and ordered", "id");
        if (!(n.probability > 0.0 && n.probability <= 1.0 + 1e-12)) {
            throw Error("scenario tree: probability outside (0, 1]", "probability");
        }
        if (n.demand < 0.0) throw Error("scenario tree: negative demand", "demand");
        if (n.wind_available < 0.0) throw Error("scenario tree: negative wind", "wind_available");
        if (i == 0) {
            if (n.parent) throw Error("scenario tree: root must not have a parent", "parent");
            continue;
        }
        if (!n.parent || *n.parent >= i) {
            throw Error("scenario tree: parents must precede children", "parent");
        }
        children_[*n.parent].push_back(i);
        depth_[i] = depth_[*n.parent] + 1;
    }
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        if (children_[i].empty()) continue;
        double sum = 0.0;
        for (auto c : children_[i]) sum += nodes_[c].probability;
        if (std::abs(sum - nodes_[i].probability) > 1e-9) {
            throw Error("scenario tree: child probabilities do not sum to the parent's", "probability");
        }
    }
}

std::vector<std::size_t> ScenarioTree::leaves() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        if (children_[i].empty()) out.push_back(i);
    }
    return out;
}

std::optional<std::size_t> ScenarioTree::ancestor(std::size_t n, int steps) const {
    std::size_t cur = n;
    for (int s = 0; s < steps; ++s) {
        if (!nodes_[cur].parent) return std::nullopt;
        cur = *nodes_[cur].parent;
    }
    return cur;
}

ScenarioTree build_tree(const WindProcess& process, double current_wind,
                        std::span<const double> demand, const QuantileSpec& spec, int horizon) {
    if (horizon < 1) throw Error("scenario tree: horizon must be >= 1", "horizon");
    if (demand.size() < static_cast<std::size_t>(horizon)) {
        throw Error("scenario tree: demand profile shorter than horizon", "demand");
    }
    if (spec.quantiles.size() != spec.probabilities.size() || spec.quantiles.empty()) {
        throw Error("scenario tree: malformed quantile spec", "quantiles");
    }
    validate_wind(process);
    std::vector<TreeNode> nodes;
    nodes.reserve(1 + spec.quantiles.size() * static_cast<std::size_t>(horizon));
    const double root_wind = std::clamp(current_wind, 0.0, process.capacity);
    nodes.push_back({0, std::nullopt, 1.0, 1.0, 0.0, demand[0], root_wind});

    std::vector<ForecastDistribution> dists;
    for (int lead = 1; lead <= horizon; ++lead) {
        dists.push_back(forecast_distribution(process, root_wind, lead));
    }
    for (std::size_t b = 0; b < spec.quantiles.size(); ++b) {
        std::size_t parent = 0;
        for (int lead = 1; lead <= horizon; ++lead) {
            const std::size_t id = nodes.size();
            const double wind = forecast_quantile(process, dists[lead - 1], spec.quantiles[b]);
            nodes.push_back({id, parent, spec.probabilities[b], 1.0, double(lead),
                             demand[static_cast<std::size_t>(lead) % demand.size()], wind});
            parent = id;
        }
    }
    return ScenarioTree(std::move(nodes));
}

ScenarioTree deterministic_chain(std::span<const double> wind, std::span<const double> demand) {
    if (wind.empty() || wind.size() != demand.size()) {
        throw Error("deterministic chain: wind and demand lengths differ", "wind");
    }
    std::vector<TreeNode> nodes;
    for (std::size_t i = 0; i < wind.size(); ++i) {
        std::optional<std::size_t> parent;
        if (i > 0) parent = i - 1;
        nodes.push_back({i, parent, 1.0, 1.0, double(i), demand[i], wind[i]});
    }
    return ScenarioTree(std::move(nodes));
}

}  // namespace inertia
