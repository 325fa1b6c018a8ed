// Serial reference against OpenMP kernels: wall time, speed-up and a check
// that both paths return identical numbers.
//
//   bench_kernels [--threads N] [--reps R]

#include "inertia/frequency.hpp"
#include "inertia/scenario.hpp"
#include "inertia/valuation.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>

using namespace inertia;

namespace {

SucConfig desk() {
    SystemParams p;
    p.p_loss_max = 180.0;
    SucConfig c;
    c.system = validate_fleet(scale_fleet(table_one_fleet(), 0.1), p);
    c.quantiles = make_quantile_spec({0.1, 0.5, 0.9});
    c.wind = {0.0, 0.35, 0.9, 0.08, 7};
    c.horizon = 5;
    c.nadir_cuts = 5;
    c.integer_recourse = false;
    return c;
}

template <typename R>
double best_of(int reps, const std::function<R()>& f, R& out) {
    double best = 1e300;
    for (int i = 0; i < reps; ++i) {
        const auto t0 = std::chrono::steady_clock::now();
        out = f();
        best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    }
    return best;
}

template <typename R>
void compare(const char* name, int reps, const std::function<R(Execution)>& kernel,
             const std::function<bool(const R&, const R&)>& same) {
    R serial{}, parallel{};
    const double ts = best_of<R>(reps, [&] { return kernel(Execution::Serial); }, serial);
    const double tp = best_of<R>(reps, [&] { return kernel(Execution::Parallel); }, parallel);
    std::printf("%-28s %10.4f %10.4f %8.2fx  %s\n", name, ts, tp, ts / tp, same(serial, parallel) ? "identical" : "DIFFER");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"serial vs parallel kernels"};
    int threads = 0, reps = 3;
    app.add_option("--threads", threads, "OpenMP threads (0 = default)");
    app.add_option("--reps", reps, "Repetitions; the best time is kept")->check(CLI::PositiveNumber);
    CLI11_PARSE(app, argc, argv);
    if (threads > 0) set_threads(threads);
    std::printf("threads: %d\n%-28s %10s %10s %9s\n", max_threads(), "kernel", "serial s", "parallel s", "speed-up");

    SystemParams full;
    compare<double>(
        "k* search (48-point scan)", reps,
        [&](Execution e) {
            KStarOptions o;
            o.h_lo = 500.0;
            o.h_hi = 30000.0;
            o.scan_points = 48;
            o.execution = e;
            return nadir_k_star_search(full, 30000.0, o);
        },
        [](const double& a, const double& b) { return a == b; });

    const auto cfg = desk();
    compare<std::vector<ValuationRecord>>(
        "instantaneous 6x6 grid", reps,
        [&](Execution e) {
            InstantaneousStudy st{{2500, 3000, 3500, 4000, 4500, 5000}, {0, 800, 1600, 2400, 3200, 4000}, 5.0};
            return instantaneous_value(cfg, st, e);
        },
        [](const auto& a, const auto& b) {
            for (std::size_t i = 0; i < a.size(); ++i) {
                if (a[i].baseline_cost != b[i].baseline_cost || a[i].cost_with_extra != b[i].cost_with_extra) {
                    return false;
                }
            }
            return a.size() == b.size();
        });

    compare<MarginalCurve>(
        "marginal, 6 h x 6 extras", reps,
        [&](Execution e) {
            SucConfig c = cfg;
            c.system.params.wind_capacity = 5000.0;
            MarginalStudy st;
            st.extra_grid = {0, 50, 100, 150, 200, 300};
            st.duration_hours = 6;
            st.demand_trace.clear();
            for (int t = 0; t < 12; ++t) st.demand_trace.push_back(3000.0 + 600.0 * std::sin(2.0 * std::numbers::pi * (t - 9) / 24.0));
            st.wind_cf_trace = simulate_wind(WindProcess{1.0, 0.35, 0.9, 0.08, 11}, 12);
            return marginal_value(c, st, e);
        },
        [](const MarginalCurve& a, const MarginalCurve& b) { return a.costs == b.costs; });
    return 0;
}
