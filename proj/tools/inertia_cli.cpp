// Batch entry point: parses a study config, runs one study and writes CSV/JSON
// artifacts plus a manifest into the output directory.

#include "inertia/config.hpp"
#include "inertia/frequency.hpp"
#include "inertia/scenario.hpp"
#include "inertia/valuation.hpp"

#include <CLI11.hpp>
#include <boost/version.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#ifndef INERTIA_VERSION
#define INERTIA_VERSION "0.0.0"
#endif

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace inertia;

namespace {

struct Overrides {
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_dir;
    std::optional<double> rocof_max;
    std::optional<double> extra_inertia;
    std::optional<int> duration_hours;
    std::optional<int> threads;
};

struct Context {
    StudyConfig config;
    std::vector<ProvenanceEntry> defaults;
    std::string source = "built-in";
    fs::path base_dir;
    json overrides = json::object();
    std::vector<std::string> artifacts;
    fs::path out;

    std::ofstream open(const std::string& name) {
        std::ofstream f(out / name, std::ios::binary);
        if (!f) throw Error("cannot write '" + (out / name).string() + "'", "out_dir");
        artifacts.push_back(name);
        return f;
    }
};

// Thrown for failures that are the caller's fault (bad flags or config).
struct UsageError : Error {
    using Error::Error;
};

void apply(Context& ctx, const Overrides& o) {
    auto& c = ctx.config;
    if (o.seed) {
        c.study.seed = *o.seed;
        ctx.overrides["seed"] = *o.seed;
    }
    if (o.out_dir) {
        c.out_dir = *o.out_dir;
        ctx.overrides["out_dir"] = *o.out_dir;
    }
    if (o.rocof_max) {
        c.params.rocof_max = *o.rocof_max;
        c.study.rocof_levels = {*o.rocof_max};
        ctx.overrides["rocof_max"] = *o.rocof_max;
    }
    if (o.extra_inertia) {
        c.extra_inertia = *o.extra_inertia;
        ctx.overrides["extra_inertia"] = *o.extra_inertia;
    }
    if (o.duration_hours) {
        c.study.duration_hours = *o.duration_hours;
        ctx.overrides["duration_hours"] = *o.duration_hours;
    }
    if (o.threads) {
        c.study.threads = *o.threads;
        ctx.overrides["threads"] = *o.threads;
    }
}

std::string fmt_cap(double v) {
    std::ostringstream s;
    s << v;
    return s.str();
}

void write_manifest(Context& ctx, const std::string& subcommand, const json& summary) {
    {
        auto f = ctx.open("config.resolved.ini");
        f << serialize_config(ctx.config);
    }
    json m;
    m["tool"] = "inertia";
    m["version"] = INERTIA_VERSION;
    m["subcommand"] = subcommand;
    m["config_source"] = ctx.source;
    m["config_hash"] = config_hash(ctx.config);
    m["seed"] = ctx.config.study.seed;
    m["threads"] = ctx.config.study.threads;
    m["overrides"] = ctx.overrides;
    json d = json::object();
    for (const auto& e : ctx.defaults) d[e.key] = e.value;
    m["defaults_applied"] = d;
    m["artifacts"] = ctx.artifacts;
    m["summary"] = summary;
    m["libraries"] = {{"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                            std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                            std::to_string(NLOHMANN_JSON_VERSION_PATCH)},
                      {"CLI11", CLI11_VERSION},
                      {"boost", BOOST_LIB_VERSION},
                      {"compiler", __VERSION__}};
    std::ofstream f(ctx.out / "manifest.json", std::ios::binary);
    f << m.dump(2) << '\n';
}

StudyTraces traces(const Context& ctx, int extra_hours) {
    const auto hours = static_cast<std::size_t>(ctx.config.study.duration_hours + extra_hours);
    return study_traces(ctx.config, hours, ctx.base_dir);
}

json cmd_run(Context& ctx) {
    const auto suc = ctx.config.suc_config();
    const auto t = traces(ctx, suc.horizon + 1);
    std::vector<double> wind;
    for (double cf : t.wind_cf) wind.push_back(cf * suc.system.params.wind_capacity);
    const auto run = rolling_run(suc, t.demand, wind, ctx.config.study.duration_hours);
    {
        auto f = ctx.open("run.csv");
        write_run_csv(run, suc.system, f);
    }
    if (run.aborted) throw Error("rolling run aborted: " + run.abort_reason, "run");
    return {{"hours", run.hours.size()},
            {"total_cost", run.total_cost()},
            {"curtailed_mwh", run.total_curtailed()},
            {"startup", run.totals.startup},
            {"no_load", run.totals.no_load},
            {"marginal", run.totals.marginal},
            {"emissions", run.totals.emissions},
            {"shed", run.totals.shed}};
}

json cmd_annual(Context& ctx) {
    const auto suc = ctx.config.suc_config();
    const auto t = traces(ctx, suc.horizon + 1);
    AnnualStudy st;
    st.wind_capacities = ctx.config.study.wind_capacities;
    st.rocof_levels = ctx.config.study.rocof_levels;
    st.duration_hours = ctx.config.study.duration_hours;
    st.inertia_increment = ctx.config.study.inertia_increment;
    st.demand_trace = t.demand;
    st.wind_cf_trace = t.wind_cf;
    const auto recs = annual_value(suc, st);
    {
        auto f = ctx.open("annual.csv");
        write_records_csv(recs, f);
    }
    json rows = json::array();
    for (const auto& r : recs) {
        rows.push_back({{"rocof_max", r.rocof_max}, {"wind_capacity", r.wind_capacity},
                        {"value_per_unit", r.value_per_unit()}});
    }
    return {{"records", rows}};
}

json cmd_instantaneous(Context& ctx) {
    const auto suc = ctx.config.suc_config();
    InstantaneousStudy st{ctx.config.study.demand_grid, ctx.config.study.wind_grid,
                          ctx.config.study.inertia_increment};
    const auto recs = instantaneous_value(suc, st);
    {
        auto f = ctx.open("instantaneous.csv");
        write_records_csv(recs, f);
    }
    {
        auto f = ctx.open("instantaneous_grid.csv");
        write_grid_csv(recs, st, f);
    }
    std::size_t curtailed = 0, flagged = 0;
    for (const auto& r : recs) {
        curtailed += r.curtailed_baseline > 1e-6;
        flagged += r.flagged;
    }
    return {{"cells", recs.size()}, {"curtailment_cells", curtailed}, {"flagged_cells", flagged}};
}

json cmd_marginal(Context& ctx) {
    auto suc = ctx.config.suc_config();
    const auto t = traces(ctx, suc.horizon + 1);
    if (ctx.config.study.extra_grid.empty()) throw UsageError("study.extra_grid is empty", "study.extra_grid");
    json curves = json::array();
    auto summary = ctx.open("marginal_summary.csv");
    summary << "wind_capacity,epsilon,saturation\n";
    for (double cap : ctx.config.study.wind_capacities) {
        SucConfig cfg = suc;
        cfg.system.params.wind_capacity = cap;
        MarginalStudy st;
        st.extra_grid = ctx.config.study.extra_grid;
        st.duration_hours = ctx.config.study.duration_hours;
        st.demand_trace = t.demand;
        st.wind_cf_trace = t.wind_cf;
        st.epsilon = ctx.config.study.epsilon;
        const auto curve = marginal_value(cfg, st);
        {
            auto f = ctx.open("marginal_w" + fmt_cap(cap) + ".csv");
            write_marginal_csv(curve, f);
        }
        summary << fmt_cap(cap) << ',' << fmt_cap(curve.epsilon) << ','
                << (curve.saturation ? fmt_cap(*curve.saturation) : std::string()) << '\n';
        json c = {{"wind_capacity", cap}, {"epsilon", curve.epsilon}};
        c["saturation"] = curve.saturation ? json(*curve.saturation) : json(nullptr);
        curves.push_back(c);
    }
    return {{"curves", curves}};
}

struct FrequencyArgs {
    double inertia = 0.0;
    double response = 0.0;
    std::optional<double> demand;
    std::optional<double> p_loss;
};

json cmd_validate_frequency(Context& ctx, const FrequencyArgs& a) {
    const auto& p = ctx.config.params;
    if (!(a.inertia > 0.0)) throw UsageError("--inertia must be > 0", "inertia");
    if (!(a.response >= 0.0)) throw UsageError("--response must be >= 0", "response");
    FrequencyEvent ev;
    ev.inertia = a.inertia;
    ev.response = a.response;
    ev.t_delivery = p.t_delivery;
    ev.damping = p.damping;
    ev.demand = a.demand.value_or(ctx.config.study.demand_mean);
    ev.p_loss = a.p_loss.value_or(p.p_loss_max);
    const auto tr = simulate_frequency(ev, {ctx.config.sim_dt, ctx.config.sim_horizon});
    {
        auto f = ctx.open("frequency_trace.csv");
        f.precision(12);
        f << "time,delta_f\n";
        for (std::size_t i = 0; i < tr.time.size(); ++i) f << tr.time[i] << ',' << tr.delta_f[i] << '\n';
    }
    const bool nadir_ok = tr.nadir >= -p.delta_f_max;
    const bool rocof_ok = tr.max_rocof <= p.rocof_max + 1e-9;
    const bool qss_ok = std::abs(tr.qss_deviation) <= p.delta_f_qss_max;
    return {{"inertia", ev.inertia},
            {"response", ev.response},
            {"demand", ev.demand},
            {"p_loss", ev.p_loss},
            {"nadir", tr.nadir},
            {"nadir_time", tr.nadir_time},
            {"max_rocof", tr.max_rocof},
            {"qss_deviation", tr.qss_deviation},
            {"limits", {{"delta_f_max", p.delta_f_max}, {"rocof_max", p.rocof_max}, {"delta_f_qss_max", p.delta_f_qss_max}}},
            {"pass", {{"nadir", nadir_ok}, {"rocof", rocof_ok}, {"qss", qss_ok}}},
            {"secure", nadir_ok && rocof_ok && qss_ok}};
}

json cmd_dump_model(Context& ctx, int hour, bool solve) {
    const auto suc = ctx.config.suc_config();
    if (hour < 0) throw UsageError("--hour must be >= 0", "hour");
    const int h1 = suc.horizon + 1;
    const auto t = study_traces(ctx.config, static_cast<std::size_t>(hour + h1), ctx.base_dir);
    const std::vector<double> demand(t.demand.begin() + hour, t.demand.end());
    const WindProcess wind = effective_wind(suc);
    const auto tree = build_tree(wind, t.wind_cf[hour] * wind.capacity, demand, suc.quantiles, suc.horizon);
    RequirementCache cache;
    const auto model = build_suc(suc, tree, std::nullopt, &cache);
    {
        auto f = ctx.open("model.lp");
        milp::write_lp_format(model.model, f);
    }
    json s = {{"hour", hour},
              {"nodes", tree.size()},
              {"variables", model.model.num_variables()},
              {"integer_variables", model.model.num_integer()},
              {"constraints", model.model.num_constraints()}};
    if (solve) {
        const auto sol = milp::solve_milp(model.model, suc.solver);
        s["status"] = milp::to_string(sol.status);
        s["objective"] = sol.objective;
        s["branch_nodes"] = sol.nodes;
    }
    return s;
}

void emit_error(const std::string& type, const std::string& message, const std::string& field) {
    json e = {{"error", {{"type", type}, {"message", message}}}};
    if (!field.empty()) e["error"]["field"] = field;
    std::cerr << e.dump() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Inertia-aware stochastic unit commitment and the value of inertia"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_version_flag("--version", INERTIA_VERSION);

    std::string config_path;
    Overrides o;
    std::uint64_t seed = 0;
    std::string out_dir;
    double rocof = 0.0, extra = 0.0;
    int duration = 0, threads = 0;
    app.add_option("--config", config_path, "Study config file")->envname("INERTIA_CONFIG")->check(CLI::ExistingFile);
    auto* seed_opt = app.add_option("--seed", seed, "Wind trace seed")->envname("INERTIA_SEED");
    auto* out_opt = app.add_option("--out-dir", out_dir, "Artifact directory")->envname("INERTIA_OUT_DIR");
    auto* rocof_opt = app.add_option("--rocof-max", rocof, "RoCoF limit, Hz/s")->envname("INERTIA_ROCOF_MAX");
    auto* extra_opt =
        app.add_option("--extra-inertia", extra, "Freely provided inertia, MW·s²")->envname("INERTIA_EXTRA_INERTIA");
    auto* dur_opt = app.add_option("--duration-hours", duration, "Rolling run length")->envname("INERTIA_DURATION_HOURS");
    auto* thr_opt = app.add_option("--threads", threads, "OpenMP threads (0 = default)")->envname("INERTIA_THREADS");

    auto* run = app.add_subcommand("run", "Rolling stochastic commitment; writes run.csv");
    auto* annual = app.add_subcommand("annual", "Annual value against wind capacity; writes annual.csv");
    auto* inst = app.add_subcommand("instantaneous", "Value over a demand-wind grid");
    auto* marg = app.add_subcommand("marginal", "Marginal value against added inertia");
    auto* vf = app.add_subcommand("validate-frequency", "Simulate one loss event and check the limits");
    auto* dump = app.add_subcommand("dump-model", "Write the first commitment model in LP format");

    FrequencyArgs fa;
    double vf_demand = 0.0, vf_loss = 0.0;
    vf->add_option("--inertia", fa.inertia, "Post-fault inertia H, MW·s²")->required();
    vf->add_option("--response", fa.response, "Scheduled response R, MW")->required();
    auto* vf_demand_opt = vf->add_option("--demand", vf_demand, "Demand for load damping, MW");
    auto* vf_loss_opt = vf->add_option("--p-loss", vf_loss, "Lost generation, MW");
    int dump_hour = 0;
    bool dump_solve = false;
    dump->add_option("--hour", dump_hour, "Hour of the traces at the root");
    dump->add_flag("--solve", dump_solve, "Also solve with the built-in MILP solver");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        emit_error("usage", e.what(), "");
        return 2;
    }
    if (*seed_opt) o.seed = seed;
    if (*out_opt) o.out_dir = out_dir;
    if (*rocof_opt) o.rocof_max = rocof;
    if (*extra_opt) o.extra_inertia = extra;
    if (*dur_opt) o.duration_hours = duration;
    if (*thr_opt) o.threads = threads;
    if (*vf_demand_opt) fa.demand = vf_demand;
    if (*vf_loss_opt) fa.p_loss = vf_loss;

    Context ctx;
    try {
        if (config_path.empty()) {
            ctx.config = default_study_config();
        } else {
            auto parsed = parse_config(config_path);
            ctx.config = std::move(parsed.config);
            ctx.defaults = std::move(parsed.defaults);
            ctx.source = config_path;
            ctx.base_dir = fs::path(config_path).parent_path();
        }
        apply(ctx, o);
        (void)ctx.config.suc_config();
    } catch (const Error& e) {
        emit_error("config", e.what(), e.field());
        return 2;
    }

    std::string name;
    try {
        if (ctx.config.study.threads > 0) set_threads(ctx.config.study.threads);
        ctx.out = ctx.config.out_dir;
        fs::create_directories(ctx.out);
        json summary;
        if (*run) {
            name = "run";
            summary = cmd_run(ctx);
        } else if (*annual) {
            name = "annual";
            summary = cmd_annual(ctx);
        } else if (*inst) {
            name = "instantaneous";
            summary = cmd_instantaneous(ctx);
        } else if (*marg) {
            name = "marginal";
            summary = cmd_marginal(ctx);
        } else if (*vf) {
            name = "validate-frequency";
            summary = cmd_validate_frequency(ctx, fa);
        } else {
            name = "dump-model";
            summary = cmd_dump_model(ctx, dump_hour, dump_solve);
        }
        write_manifest(ctx, name, summary);
        std::cout << summary.dump(2) << '\n';
    } catch (const UsageError& e) {
        emit_error("usage", e.what(), e.field());
        return 2;
    } catch (const Error& e) {
        emit_error("runtime", e.what(), e.field());
        return 1;
    } catch (const std::exception& e) {
        emit_error("runtime", e.what(), "");
        return 1;
    }
    return 0;
}
