#include "inertia/valuation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

namespace inertia {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Runs f(i) for i in [0, n); exceptions are captured per index and the first
// one (by index) is rethrown after the loop.
template <typename F>
void for_each_job(std::size_t n, Execution exec, F&& f) {
    std::vector<std::string> errors(n);
    const auto guarded = [&](std::size_t i) {
        try {
            f(i);
        } catch (const std::exception& e) {
            errors[i] = e.what();
            if (errors[i].empty()) errors[i] = "unknown failure";
        }
    };
    const auto count = static_cast<long>(n);
    if (exec == Execution::Parallel) {
#pragma omp parallel for schedule(dynamic)
        for (long i = 0; i < count; ++i) guarded(static_cast<std::size_t>(i));
    } else {
        for (long i = 0; i < count; ++i) guarded(static_cast<std::size_t>(i));
    }
    for (const auto& e : errors) {
        if (!e.empty()) throw Error(e);
    }
}

std::vector<double> scaled(std::span<const double> cf, double capacity) {
    std::vector<double> out(cf.begin(), cf.end());
    for (auto& v : out) v = std::clamp(v, 0.0, 1.0) * capacity;
    return out;
}

struct RunSummary {
    double cost = 0.0;
    double curtailed = 0.0;
    double response = 0.0;
    double shed = 0.0;
};

RunSummary summarise(const RunResult& run) {
    RunSummary s{run.total_cost(), run.total_curtailed(), 0.0, 0.0};
    for (const auto& h : run.hours) {
        s.response += h.response;
        s.shed += h.shed;
    }
    return s;
}

void check_traces(std::span<const double> demand, std::span<const double> cf, int duration, int horizon) {
    if (duration < 1) throw Error("valuation: duration must be >= 1", "duration_hours");
    const auto need = static_cast<std::size_t>(duration + horizon);
    if (demand.size() < need || cf.size() < need) {
        throw Error("valuation: traces shorter than duration + horizon", "trace");
    }
}

}  // namespace

const char* to_string(Binding b) {
    switch (b) {
        case Binding::None: return "none";
        case Binding::Rocof: return "rocof";
        case Binding::Nadir: return "nadir";
        case Binding::Qss: return "qss";
    }
    return "?";
}

Binding binding_constraint_probe(const StepResult& step, const SucConfig& config, double tol) {
    const auto& suc = step.suc;
    const auto& root = step.root;
    const auto& classes = config.system.classes;
    const double h = step.check.inertia;
    const double r = root.total_response();

    if (config.rocof_constraint) {
        double smallest = std::numeric_limits<double>::infinity();
        for (std::size_t g = 0; g < classes.size(); ++g) {
            if (!classes[g].must_run && root.classes[g].n_up > 0) {
                smallest = std::min(smallest, suc.inertia_coef[g]);
            }
        }
        const double slack = h - suc.rocof_floor;
        if (slack < smallest - tol * std::max(1.0, suc.rocof_floor)) return Binding::Rocof;
    }
    if (config.nadir_constraint && !suc.cuts.empty()) {
        const double bound = suc.cuts[0].bound(h);
        if (r - bound <= tol * std::max(1.0, r)) return Binding::Nadir;
    }
    if (config.qss_constraint) {
        const double floor = suc.qss_floor[0];
        if (floor > 0.0 && r - floor <= tol * std::max(1.0, r)) return Binding::Qss;
    }
    return Binding::None;
}

std::vector<ValuationRecord> annual_value(const SucConfig& config, const AnnualStudy& study, Execution exec) {
    validate_config(config);
    if (study.wind_capacities.empty()) throw Error("annual value: no wind capacities", "wind_capacities");
    if (study.rocof_levels.empty()) throw Error("annual value: no RoCoF levels", "rocof_levels");
    if (!(study.inertia_increment > 0.0)) {
        throw Error("annual value: inertia increment must be > 0", "inertia_increment");
    }
    check_traces(study.demand_trace, study.wind_cf_trace, study.duration_hours, config.horizon);

    const std::size_t nr = study.rocof_levels.size();
    const std::size_t nc = study.wind_capacities.size();
    std::vector<RunSummary> results(nr * nc * 2);
    for_each_job(results.size(), exec, [&](std::size_t job) {
        const std::size_t ri = job / (nc * 2);
        const std::size_t ci = (job / 2) % nc;
        const bool with = job % 2 == 1;
        SucConfig cfg = config;
        cfg.system.params.rocof_max = study.rocof_levels[ri];
        cfg.system.params.wind_capacity = study.wind_capacities[ci];
        cfg.max_extra_inertia = std::max(config.max_extra_inertia, study.inertia_increment);
        cfg.extra_inertia = config.extra_inertia + (with ? study.inertia_increment : 0.0);
        const auto wind = scaled(study.wind_cf_trace, study.wind_capacities[ci]);
        const auto run = rolling_run(cfg, study.demand_trace, wind, study.duration_hours);
        if (run.aborted) throw Error("annual value: run aborted (" + run.abort_reason + ")");
        results[job] = summarise(run);
    });

    std::vector<ValuationRecord> out;
    for (std::size_t ri = 0; ri < nr; ++ri) {
        for (std::size_t ci = 0; ci < nc; ++ci) {
            const auto& base = results[(ri * nc + ci) * 2];
            const auto& with = results[(ri * nc + ci) * 2 + 1];
            ValuationRecord rec;
            rec.study = "annual";
            rec.wind_capacity = study.wind_capacities[ci];
            rec.rocof_max = study.rocof_levels[ri];
            rec.extra_inertia = study.inertia_increment;
            rec.baseline_cost = base.cost;
            rec.cost_with_extra = with.cost;
            rec.curtailed_baseline = base.curtailed;
            rec.curtailed_with = with.curtailed;
            rec.response_baseline = base.response;
            rec.response_with = with.response;
            rec.shed_baseline = base.shed;
            rec.flagged = base.shed > 0.0;
            out.push_back(rec);
        }
    }
    return out;
}

std::vector<ValuationRecord> instantaneous_value(const SucConfig& config, const InstantaneousStudy& study,
                                                 Execution exec) {
    if (study.demand_grid.empty() || study.wind_grid.empty()) {
        throw Error("instantaneous value: grids must be non-empty", "grid");
    }
    if (!(study.inertia_increment > 0.0)) {
        throw Error("instantaneous value: inertia increment must be > 0", "inertia_increment");
    }
    SucConfig base_cfg = config;
    base_cfg.system.params.wind_capacity =
        std::max(config.system.params.wind_capacity,
                 *std::max_element(study.wind_grid.begin(), study.wind_grid.end()));
    base_cfg.max_extra_inertia = std::max(config.max_extra_inertia, study.inertia_increment);
    validate_config(base_cfg);

    struct Cell {
        double cost = kNaN;
        double curtailed = kNaN;
        double response = kNaN;
        double shed = kNaN;
        Binding binding = Binding::None;
        bool ok = false;
    };
    const std::size_t nw = study.wind_grid.size();
    const std::size_t cells = study.demand_grid.size() * nw;
    std::vector<Cell> results(cells * 2);
    RequirementCache cache;
    for_each_job(results.size(), exec, [&](std::size_t job) {
        const std::size_t cell = job / 2;
        const double demand = study.demand_grid[cell / nw];
        const double wind = study.wind_grid[cell % nw];
        SucConfig cfg = base_cfg;
        cfg.extra_inertia = config.extra_inertia + (job % 2 == 1 ? study.inertia_increment : 0.0);
        const auto tree = deterministic_chain(std::vector<double>{wind}, std::vector<double>{demand});
        Cell out;
        try {
            const auto step = solve_step(cfg, tree, std::nullopt, cache);
            out.cost = node_cost(step.root, cfg.system.classes, 1.0, cfg.system.params).total();
            out.curtailed = std::max(0.0, wind - step.root.wind_used);
            out.response = step.root.total_response();
            out.shed = step.root.shed;
            out.binding = binding_constraint_probe(step, cfg);
            out.ok = true;
        } catch (const Error&) {
            out.ok = false;
        }
        results[job] = out;
    });

    std::vector<ValuationRecord> out;
    for (std::size_t cell = 0; cell < cells; ++cell) {
        const auto& b = results[2 * cell];
        const auto& w = results[2 * cell + 1];
        ValuationRecord rec;
        rec.study = "instantaneous";
        rec.wind_capacity = base_cfg.system.params.wind_capacity;
        rec.demand = study.demand_grid[cell / nw];
        rec.wind = study.wind_grid[cell % nw];
        rec.rocof_max = base_cfg.system.params.rocof_max;
        rec.extra_inertia = study.inertia_increment;
        rec.baseline_cost = b.cost;
        rec.cost_with_extra = w.cost;
        rec.curtailed_baseline = b.curtailed;
        rec.curtailed_with = w.curtailed;
        rec.response_baseline = b.response;
        rec.response_with = w.response;
        rec.shed_baseline = b.shed;
        rec.binding = b.binding;
        rec.flagged = !b.ok || !w.ok || b.shed > 0.0;
        out.push_back(rec);
    }
    return out;
}

MarginalCurve marginal_from_savings(std::vector<double> extras, std::vector<double> costs, double epsilon) {
    if (extras.empty() || extras.front() != 0.0) {
        throw Error("marginal value: extra grid must start at 0", "extra_grid");
    }
    for (std::size_t i = 1; i < extras.size(); ++i) {
        if (!(extras[i] > extras[i - 1])) throw Error("marginal value: extra grid must increase", "extra_grid");
    }
    if (costs.size() != extras.size()) throw Error("marginal value: one cost per extra required", "costs");
    MarginalCurve c;
    c.extras = std::move(extras);
    c.costs = std::move(costs);
    for (double v : c.costs) c.savings.push_back(c.costs.front() - v);
    for (std::size_t i = 1; i < c.extras.size(); ++i) {
        c.marginal.push_back((c.savings[i] - c.savings[i - 1]) / (c.extras[i] - c.extras[i - 1]));
    }
    double top = 0.0;
    for (double m : c.marginal) top = std::max(top, m);
    c.epsilon = epsilon > 0.0 ? epsilon : std::max(0.01 * top, 1e-9);
    if (c.marginal.empty() || c.marginal.back() >= c.epsilon) return c;
    std::size_t i = c.marginal.size();
    while (i > 0 && c.marginal[i - 1] < c.epsilon) --i;
    c.saturation = c.extras[i];
    return c;
}

MarginalCurve marginal_value(const SucConfig& config, const MarginalStudy& study, Execution exec) {
    validate_config(config);
    if (study.extra_grid.empty()) throw Error("marginal value: empty extra grid", "extra_grid");
    check_traces(study.demand_trace, study.wind_cf_trace, study.duration_hours, config.horizon);
    // Grid checks happen before any run.
    marginal_from_savings(study.extra_grid, std::vector<double>(study.extra_grid.size(), 0.0), 1.0);

    const double capacity = config.system.params.wind_capacity;
    const auto wind = scaled(study.wind_cf_trace, capacity);
    std::vector<double> costs(study.extra_grid.size());
    for_each_job(costs.size(), exec, [&](std::size_t i) {
        SucConfig cfg = config;
        cfg.max_extra_inertia = std::max(config.max_extra_inertia, study.extra_grid.back());
        cfg.extra_inertia = config.extra_inertia + study.extra_grid[i];
        const auto run = rolling_run(cfg, study.demand_trace, wind, study.duration_hours);
        if (run.aborted) throw Error("marginal value: run aborted (" + run.abort_reason + ")");
        costs[i] = run.total_cost();
    });
    return marginal_from_savings(study.extra_grid, std::move(costs), study.epsilon);
}

void write_records_csv(std::span<const ValuationRecord> records, std::ostream& out) {
    out << "study,wind_capacity,demand,wind,rocof_max,extra_inertia,baseline_cost,cost_with_extra,value,"
           "value_per_unit,curtailed_baseline,curtailed_with,response_baseline,response_with,shed_baseline,"
           "binding,flagged\n";
    const auto old = out.precision(12);
    for (const auto& r : records) {
        out << r.study << ',' << r.wind_capacity << ',' << r.demand << ',' << r.wind << ',' << r.rocof_max << ','
            << r.extra_inertia << ',' << r.baseline_cost << ',' << r.cost_with_extra << ',' << r.value() << ','
            << r.value_per_unit() << ',' << r.curtailed_baseline << ',' << r.curtailed_with << ','
            << r.response_baseline << ',' << r.response_with << ',' << r.shed_baseline << ','
            << to_string(r.binding) << ',' << (r.flagged ? 1 : 0) << '\n';
    }
    out.precision(old);
}

void write_grid_csv(std::span<const ValuationRecord> records, const InstantaneousStudy& study,
                    std::ostream& out) {
    const std::size_t nw = study.wind_grid.size();
    if (records.size() != study.demand_grid.size() * nw) {
        throw Error("grid csv: record count does not match the grid", "records");
    }
    const auto old = out.precision(12);
    out << "demand";
    for (double w : study.wind_grid) out << ",wind_" << w;
    out << '\n';
    for (std::size_t d = 0; d < study.demand_grid.size(); ++d) {
        out << study.demand_grid[d];
        for (std::size_t w = 0; w < nw; ++w) out << ',' << records[d * nw + w].value_per_unit();
        out << '\n';
    }
    out.precision(old);
}

void write_marginal_csv(const MarginalCurve& curve, std::ostream& out) {
    const auto old = out.precision(12);
    out << "extra_inertia,cost,savings,marginal\n";
    for (std::size_t i = 0; i < curve.extras.size(); ++i) {
        out << curve.extras[i] << ',' << curve.costs[i] << ',' << curve.savings[i] << ',';
        if (i > 0) out << curve.marginal[i - 1];
        out << '\n';
    }
    out.precision(old);
}

}  // namespace inertia
