#pragma once

// Shared desk-scale fixtures: the reference fleet at 1/10 of its MW ratings and
// a smooth daily demand profile in the same units.

#include "inertia/scheduler.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

namespace fixture {

inline inertia::SucConfig desk_config(double wind_capacity = 0.0, double rocof_max = 0.5) {
    inertia::SystemParams p;
    p.p_loss_max = 180.0;
    p.rocof_max = rocof_max;
    p.wind_capacity = wind_capacity;
    inertia::SucConfig c;
    c.system = inertia::validate_fleet(inertia::scale_fleet(inertia::table_one_fleet(), 0.1), p);
    c.quantiles = inertia::make_quantile_spec({0.1, 0.5, 0.9});
    c.wind = {wind_capacity, 0.35, 0.9, 0.08, 7};
    c.horizon = 5;
    c.nadir_cuts = 5;
    c.integer_recourse = false;
    return c;
}

inline std::vector<double> daily_demand(std::size_t hours, double mean = 3500.0, double swing = 900.0) {
    std::vector<double> d;
    for (std::size_t t = 0; t < hours; ++t) {
        d.push_back(mean + swing * std::sin(2.0 * std::numbers::pi * (double(t) - 9.0) / 24.0));
    }
    return d;
}


struct TinyUc {
    inertia::SucConfig config;
    inertia::ScenarioTree tree;
    inertia::FleetState state;
};

/// Random unit commitment with at most 2 classes of at most 2 units and at
/// most 3 tree nodes, integer at every node.
inline TinyUc tiny_uc(std::mt19937_64& rng) {
    using inertia::GeneratorClass;
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::uniform_int_distribution<int> pick(0, 2);
    const auto between = [&](double a, double b) { return a + (b - a) * u(rng); };

    std::vector<GeneratorClass> classes;
    const int n_classes = 1 + static_cast<int>(u(rng) < 0.7);
    for (int g = 0; g < n_classes; ++g) {
        GeneratorClass c;
        c.name = g == 0 ? "big" : "peaker";
        c.unit_count = 1 + static_cast<int>(u(rng) < 0.7);
        c.p_max = g == 0 ? between(80.0, 120.0) : between(30.0, 60.0);
        c.p_min_stable = c.p_max * between(0.2, 0.5);
        c.no_load_cost = between(100.0, 600.0);
        c.marginal_cost = g == 0 ? between(10.0, 40.0) : between(40.0, 120.0);
        c.startup_cost = between(0.0, 800.0);
        c.startup_time = pick(rng) % 2;
        c.min_up_time = pick(rng);
        c.min_down_time = pick(rng);
        c.inertia_constant = between(2.0, 6.0);
        c.max_response = between(0.0, 0.3) * c.p_max;
        c.response_slope = between(0.2, 1.0);
        c.emissions_rate = between(0.0, 800.0);
        classes.push_back(c);
    }
    inertia::SystemParams p;
    p.p_loss_max = classes[0].p_max;
    p.h_loss_max = classes[0].inertia_constant;
    p.rocof_max = between(2.0, 20.0);
    p.voll = between(500.0, 3000.0);
    p.wind_capacity = 60.0;

    inertia::SucConfig cfg;
    cfg.system = inertia::validate_fleet(classes, p);
    cfg.quantiles = inertia::make_quantile_spec({0.5});
    cfg.wind = {60.0, 0.35, 0.9, 0.05, 1};
    cfg.horizon = 2;
    cfg.rocof_constraint = u(rng) < 0.5;
    cfg.nadir_constraint = false;
    cfg.qss_constraint = false;
    cfg.integer_recourse = true;

    const int n_nodes = 1 + pick(rng);
    const bool fork = n_nodes == 3 && u(rng) < 0.5;
    std::vector<inertia::TreeNode> nodes;
    const double split = between(0.2, 0.8);
    for (int n = 0; n < n_nodes; ++n) {
        inertia::TreeNode node;
        node.id = static_cast<std::size_t>(n);
        if (n > 0) node.parent = fork ? 0 : static_cast<std::size_t>(n - 1);
        node.probability = fork && n > 0 ? (n == 1 ? split : 1.0 - split) : 1.0;
        node.lead_time = fork ? std::min(n, 1) : n;
        node.demand = between(20.0, 250.0);
        node.wind_available = between(0.0, 60.0);
        nodes.push_back(node);
    }

    std::vector<int> up;
    for (const auto& c : classes) up.push_back(std::uniform_int_distribution<int>(0, c.unit_count)(rng));
    return {cfg, inertia::ScenarioTree(std::move(nodes)), inertia::initial_state(cfg.system, up)};
}

}  // namespace fixture
