#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "inertia/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

using namespace inertia;

namespace {

std::vector<double> flat_demand(std::size_t n, double mw) { return std::vector<double>(n, mw); }

}  // namespace

TEST_CASE("midpoint probabilities for the seven-quantile fan") {
    const std::vector<double> q{0.005, 0.1, 0.3, 0.5, 0.7, 0.9, 0.995};
    const auto p = quantile_probabilities(q);
    const std::vector<double> expected{0.0525, 0.1475, 0.2, 0.2, 0.2, 0.1475, 0.0525};
    REQUIRE(p.size() == expected.size());
    for (std::size_t i = 0; i < p.size(); ++i) CHECK(p[i] == doctest::Approx(expected[i]).epsilon(1e-12));
    CHECK(std::abs(std::accumulate(p.begin(), p.end(), 0.0) - 1.0) < 1e-12);
}

TEST_CASE("single quantile carries all probability") {
    const std::vector<double> q{0.5};
    CHECK(quantile_probabilities(q) == std::vector<double>{1.0});
}

TEST_CASE("random quantile lists sum to one") {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(0.001, 0.999);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> q(1 + trial % 9);
        for (auto& v : q) v = u(rng);
        std::sort(q.begin(), q.end());
        q.erase(std::unique(q.begin(), q.end()), q.end());
        const auto p = quantile_probabilities(q);
        CHECK(std::abs(std::accumulate(p.begin(), p.end(), 0.0) - 1.0) < 1e-12);
        for (double v : p) CHECK(v > 0.0);
    }
}

TEST_CASE("quantile preconditions") {
    CHECK_THROWS_AS(quantile_probabilities(std::vector<double>{}), Error);
    CHECK_THROWS_AS(quantile_probabilities(std::vector<double>{0.3, 0.2}), Error);
    CHECK_THROWS_AS(quantile_probabilities(std::vector<double>{0.0, 0.5}), Error);
    CHECK_THROWS_AS(quantile_probabilities(std::vector<double>{0.5, 1.0}), Error);
    CHECK_THROWS_AS(quantile_probabilities(std::vector<double>{0.5, 0.5}), Error);
}

TEST_CASE("memoryless process forecasts the mean") {
    WindProcess w{1000.0, 0.4, 0.0, 0.1, 1};
    CHECK(forecast_distribution(w, 900.0, 1).mean == doctest::Approx(400.0));
    CHECK(forecast_distribution(w, 0.0, 1).mean == doctest::Approx(400.0));
    CHECK(forecast_distribution(w, 0.0, 1).std == doctest::Approx(100.0));
    CHECK_THROWS_AS(forecast_distribution(w, 0.0, 0), Error);
}

TEST_CASE("long-lead spread approaches the stationary AR(1) value") {
    WindProcess w{1000.0, 0.4, 0.8, 0.05, 1};
    const double stationary = 0.05 / std::sqrt(1.0 - 0.64) * 1000.0;
    CHECK(forecast_distribution(w, 700.0, 200).std == doctest::Approx(stationary).epsilon(1e-9));
    CHECK(forecast_distribution(w, 700.0, 200).mean == doctest::Approx(400.0).epsilon(1e-9));
}

TEST_CASE("forecast moments agree with Monte Carlo of the unclipped recursion") {
    // Small innovations keep the path far from the clip bounds.
    WindProcess w{1000.0, 0.5, 0.85, 0.01, 1};
    const double start_cf = 0.6;
    const int lead = 6;
    std::mt19937_64 rng(123);
    std::normal_distribution<double> n01(0.0, 1.0);
    const int samples = 200000;
    double sum = 0.0, sumsq = 0.0;
    for (int s = 0; s < samples; ++s) {
        double cf = start_cf;
        for (int l = 0; l < lead; ++l) cf = w.mean_cf + w.persistence * (cf - w.mean_cf) + w.sigma_step * n01(rng);
        sum += cf;
        sumsq += cf * cf;
    }
    const double mean = sum / samples;
    const double sd = std::sqrt(sumsq / samples - mean * mean);
    const auto d = forecast_distribution(w, start_cf * w.capacity, lead);
    CHECK(std::abs(d.mean - mean * w.capacity) < 0.2);
    CHECK(std::abs(d.std - sd * w.capacity) / d.std < 0.01);
}

TEST_CASE("zero innovation collapses all quantiles") {
    WindProcess w{1000.0, 0.4, 0.9, 0.0, 1};
    const auto d = forecast_distribution(w, 800.0, 3);
    CHECK(forecast_quantile(w, d, 0.005) == forecast_quantile(w, d, 0.995));
    CHECK(forecast_quantile(w, d, 0.5) == doctest::Approx(d.mean));
}

TEST_CASE("tree sizes and probabilities") {
    WindProcess w{2000.0, 0.35, 0.9, 0.05, 1};
    const auto spec = make_quantile_spec({0.005, 0.1, 0.3, 0.5, 0.7, 0.9, 0.995});
    const auto demand = flat_demand(24, 30000.0);
    const auto tree = build_tree(w, 600.0, demand, spec, 24);
    CHECK(tree.size() == 169);
    CHECK(tree.children(0).size() == 7);
    for (std::size_t b = 0; b < 7; ++b) {
        CHECK(tree[tree.children(0)[b]].probability == doctest::Approx(spec.probabilities[b]));
    }
    double leaf_sum = 0.0;
    for (auto l : tree.leaves()) leaf_sum += tree[l].probability;
    CHECK(std::abs(leaf_sum - 1.0) < 1e-12);
    for (const auto& n : tree.nodes()) {
        CHECK(n.wind_available >= 0.0);
        CHECK(n.wind_available <= w.capacity);
        CHECK(n.time_step_hours == 1.0);
        if (n.parent && *n.parent != 0) CHECK(n.probability == tree[*n.parent].probability);
    }
    CHECK(tree[0].wind_available == 600.0);

    const auto chain = build_tree(w, 600.0, demand, make_quantile_spec({0.5}), 24);
    CHECK(chain.size() == 25);
    for (const auto& n : chain.nodes()) CHECK(n.probability == 1.0);
}

TEST_CASE("branch wind is ordered by quantile at every lead") {
    WindProcess w{5000.0, 0.35, 0.9, 0.08, 1};
    const auto spec = make_quantile_spec({0.005, 0.1, 0.3, 0.5, 0.7, 0.9, 0.995});
    const auto tree = build_tree(w, 4500.0, flat_demand(24, 30000.0), spec, 24);
    const auto& heads = tree.children(0);
    for (int lead = 0; lead < 24; ++lead) {
        for (std::size_t b = 1; b < heads.size(); ++b) {
            CHECK(tree[heads[b] + lead].wind_available >= tree[heads[b - 1] + lead].wind_available);
            CHECK(tree.depth(heads[b] + lead) == lead + 1);
        }
    }
    CHECK(tree.ancestor(heads[2] + 5, 6) == std::optional<std::size_t>(0));
    CHECK_FALSE(tree.ancestor(heads[2] + 5, 7).has_value());
}

TEST_CASE("tree preconditions") {
    WindProcess w{1000.0, 0.35, 0.9, 0.05, 1};
    const auto spec = make_quantile_spec({0.5});
    CHECK_THROWS_AS(build_tree(w, 0.0, flat_demand(24, 1.0), spec, 0), Error);
    CHECK_THROWS_AS(build_tree(w, 0.0, flat_demand(5, 1.0), spec, 24), Error);
    WindProcess bad = w;
    bad.persistence = 1.0;
    CHECK_THROWS_AS(build_tree(bad, 0.0, flat_demand(24, 1.0), spec, 24), Error);
}

TEST_CASE("wind traces are clipped and reproducible") {
    WindProcess w{3000.0, 0.35, 0.9, 0.3, 42};
    const auto a = simulate_wind(w, 500);
    const auto b = simulate_wind(w, 500);
    CHECK(a == b);
    for (double v : a) {
        CHECK(v >= 0.0);
        CHECK(v <= 3000.0);
    }
    w.seed = 43;
    CHECK(simulate_wind(w, 500) != a);
}
