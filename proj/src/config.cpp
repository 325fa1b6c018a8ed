#include "inertia/config.hpp"

#include "inertia/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

namespace inertia {

namespace {

std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double to_double(std::string_view s, const std::string& field) {
    s = trim(s);
    double v = 0.0;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc() || p != s.data() + s.size() || !std::isfinite(v)) {
        throw Error("expected a finite number for " + field + ", got '" + std::string(s) + "'", field);
    }
    return v;
}

template <typename Int>
Int to_integer(std::string_view s, const std::string& field) {
    s = trim(s);
    Int v{};
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc() || p != s.data() + s.size()) {
        throw Error("expected an integer for " + field + ", got '" + std::string(s) + "'", field);
    }
    return v;
}

bool to_bool(std::string_view s, const std::string& field) {
    s = trim(s);
    if (s == "true" || s == "yes" || s == "1") return true;
    if (s == "false" || s == "no" || s == "0") return false;
    throw Error("expected true or false for " + field + ", got '" + std::string(s) + "'", field);
}

std::vector<double> to_list(std::string_view s, const std::string& field) {
    std::vector<double> out;
    s = trim(s);
    if (s.empty()) return out;
    while (true) {
        const auto comma = s.find(',');
        out.push_back(to_double(s.substr(0, comma), field));
        if (comma == std::string_view::npos) break;
        s = s.substr(comma + 1);
    }
    return out;
}

std::string fmt(double v) {
    char buf[64];
    const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, p);
}

std::string fmt(bool v) { return v ? "true" : "false"; }

std::string fmt(const std::vector<double>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ", ";
        out += fmt(v[i]);
    }
    return out;
}

template <typename T>
struct Field {
    std::string key;
    std::function<void(T&, std::string_view, const std::string&)> set;
    std::function<std::string(const T&)> get;
};

// Binds a member through a pointer so each key is declared once.
template <typename T, typename M>
Field<T> field_of(std::string key, M T::*member) {
    Field<T> f;
    f.key = std::move(key);
    f.set = [member](T& obj, std::string_view v, const std::string& name) {
        if constexpr (std::is_same_v<M, double>) {
            obj.*member = to_double(v, name);
        } else if constexpr (std::is_same_v<M, bool>) {
            obj.*member = to_bool(v, name);
        } else if constexpr (std::is_same_v<M, std::vector<double>>) {
            obj.*member = to_list(v, name);
        } else if constexpr (std::is_same_v<M, std::string>) {
            obj.*member = std::string(trim(v));
        } else {
            obj.*member = to_integer<M>(v, name);
        }
    };
    f.get = [member](const T& obj) {
        if constexpr (std::is_same_v<M, std::string>) {
            return obj.*member;
        } else if constexpr (std::is_same_v<M, double> || std::is_same_v<M, bool> ||
                             std::is_same_v<M, std::vector<double>>) {
            return fmt(obj.*member);
        } else {
            return std::to_string(obj.*member);
        }
    };
    return f;
}

// Sub-object members (SystemParams, StudySettings) reached from StudyConfig.
template <typename Sub, typename M>
Field<StudyConfig> bind_in(std::string key, Sub StudyConfig::*sub, M Sub::*member) {
    const auto inner = field_of<Sub, M>(key, member);
    return {key, [inner, sub](StudyConfig& c, std::string_view v, const std::string& n) { inner.set(c.*sub, v, n); },
            [inner, sub](const StudyConfig& c) { return inner.get(c.*sub); }};
}

struct Section {
    std::string name;
    std::vector<Field<StudyConfig>> fields;
};

const std::vector<Section>& schema() {
    using C = StudyConfig;
    using P = SystemParams;
    using S = StudySettings;
    static const std::vector<Section> sections = {
        {"system",
         {field_of<C>("fleet_scale", &C::fleet_scale), bind_in("f0", &C::params, &P::f0),
          bind_in("damping", &C::params, &P::damping), bind_in("rocof_max", &C::params, &P::rocof_max),
          bind_in("delta_f_max", &C::params, &P::delta_f_max),
          bind_in("delta_f_qss_max", &C::params, &P::delta_f_qss_max),
          bind_in("t_delivery", &C::params, &P::t_delivery), bind_in("p_loss_max", &C::params, &P::p_loss_max),
          bind_in("h_loss_max", &C::params, &P::h_loss_max),
          bind_in("emissions_price", &C::params, &P::emissions_price), bind_in("voll", &C::params, &P::voll),
          bind_in("wind_capacity", &C::params, &P::wind_capacity)}},
        {"scenario",
         {field_of<C>("quantiles", &C::quantiles), field_of<C>("wind_mean_cf", &C::wind_mean_cf),
          field_of<C>("wind_persistence", &C::wind_persistence), field_of<C>("wind_sigma_step", &C::wind_sigma_step)}},
        {"scheduler",
         {field_of<C>("horizon", &C::horizon), field_of<C>("extra_inertia", &C::extra_inertia),
          field_of<C>("max_extra_inertia", &C::max_extra_inertia), field_of<C>("rocof_constraint", &C::rocof_constraint),
          field_of<C>("nadir_constraint", &C::nadir_constraint), field_of<C>("qss_constraint", &C::qss_constraint),
          field_of<C>("nadir_cuts", &C::nadir_cuts), field_of<C>("integer_recourse", &C::integer_recourse),
          field_of<C>("loss_from_commitment", &C::loss_from_commitment),
          field_of<C>("refine_iterations", &C::refine_iterations), field_of<C>("verify_tolerance", &C::verify_tolerance),
          field_of<C>("sim_dt", &C::sim_dt), field_of<C>("sim_horizon", &C::sim_horizon), field_of<C>("mip_gap", &C::mip_gap),
          field_of<C>("node_limit", &C::node_limit)}},
        {"study",
         {bind_in("seed", &C::study, &S::seed), bind_in("duration_hours", &C::study, &S::duration_hours),
          bind_in("demand_mean", &C::study, &S::demand_mean), bind_in("demand_swing", &C::study, &S::demand_swing),
          bind_in("demand_csv", &C::study, &S::demand_csv), bind_in("wind_csv", &C::study, &S::wind_csv),
          bind_in("wind_capacities", &C::study, &S::wind_capacities),
          bind_in("rocof_levels", &C::study, &S::rocof_levels),
          bind_in("inertia_increment", &C::study, &S::inertia_increment),
          bind_in("demand_grid", &C::study, &S::demand_grid), bind_in("wind_grid", &C::study, &S::wind_grid),
          bind_in("extra_grid", &C::study, &S::extra_grid), bind_in("epsilon", &C::study, &S::epsilon),
          bind_in("threads", &C::study, &S::threads)}},
        {"output", {field_of<C>("out_dir", &C::out_dir)}},
    };
    return sections;
}

struct GeneratorField {
    Field<GeneratorClass> field;
    bool required;
};

const std::vector<GeneratorField>& generator_schema() {
    using G = GeneratorClass;
    static const std::vector<GeneratorField> fields = {
        {field_of<G>("unit_count", &G::unit_count), true},
        {field_of<G>("p_max", &G::p_max), true},
        {field_of<G>("p_min_stable", &G::p_min_stable), true},
        {field_of<G>("no_load_cost", &G::no_load_cost), true},
        {field_of<G>("marginal_cost", &G::marginal_cost), true},
        {field_of<G>("startup_cost", &G::startup_cost), false},
        {field_of<G>("startup_time", &G::startup_time), false},
        {field_of<G>("min_up_time", &G::min_up_time), false},
        {field_of<G>("min_down_time", &G::min_down_time), false},
        {field_of<G>("inertia_constant", &G::inertia_constant), true},
        {field_of<G>("max_response", &G::max_response), false},
        {field_of<G>("response_slope", &G::response_slope), false},
        {field_of<G>("emissions_rate", &G::emissions_rate), false},
        {field_of<G>("must_run", &G::must_run), false},
    };
    return fields;
}

[[noreturn]] void fail_at(const std::string& source, int line, const std::string& what, const std::string& field) {
    throw Error(source + ":" + std::to_string(line) + ": " + what, field);
}

// Rethrows a validation error with its field qualified by `prefix`.
template <typename F>
void qualified(const std::string& prefix, F&& check) {
    try {
        check();
    } catch (const Error& e) {
        const std::string field = e.field().empty() ? prefix : prefix + "." + e.field();
        throw Error("invalid " + field + ": " + e.what(), field);
    }
}

void validate_study(const StudyConfig& c) {
    const auto& s = c.study;
    const auto bad = [](const std::string& field, const std::string& rule) {
        throw Error("invalid " + field + ": " + rule, field);
    };
    if (!(c.fleet_scale > 0.0)) bad("system.fleet_scale", "must be > 0");
    if (s.duration_hours < 1) bad("study.duration_hours", "must be >= 1");
    if (!(s.demand_mean > 0.0)) bad("study.demand_mean", "must be > 0");
    if (!(s.demand_swing >= 0.0) || s.demand_swing >= s.demand_mean) {
        bad("study.demand_swing", "must lie in [0, demand_mean)");
    }
    for (double w : s.wind_capacities) {
        if (!(w >= 0.0)) bad("study.wind_capacities", "must be >= 0");
    }
    for (double r : s.rocof_levels) {
        if (!(r > 0.0)) bad("study.rocof_levels", "must be > 0");
    }
    if (!(s.inertia_increment > 0.0)) bad("study.inertia_increment", "must be > 0");
    for (double d : s.demand_grid) {
        if (!(d >= 0.0)) bad("study.demand_grid", "must be >= 0");
    }
    for (double w : s.wind_grid) {
        if (!(w >= 0.0)) bad("study.wind_grid", "must be >= 0");
    }
    if (!s.extra_grid.empty()) {
        if (s.extra_grid.front() != 0.0) bad("study.extra_grid", "must start at 0");
        for (std::size_t i = 1; i < s.extra_grid.size(); ++i) {
            if (!(s.extra_grid[i] > s.extra_grid[i - 1])) bad("study.extra_grid", "must be strictly increasing");
        }
    }
    if (s.threads < 0) bad("study.threads", "must be >= 0");
    if (!(c.sim_dt > 0.0) || !(c.sim_horizon > c.sim_dt)) bad("scheduler.sim_dt", "needs 0 < sim_dt < sim_horizon");
    if (!(c.mip_gap >= 0.0)) bad("scheduler.mip_gap", "must be >= 0");
    if (c.node_limit < 1) bad("scheduler.node_limit", "must be >= 1");
}

std::vector<double> daily_profile(std::size_t hours, double mean, double swing) {
    // trough in the early morning, peak in the evening
    std::vector<double> d;
    for (std::size_t t = 0; t < hours; ++t) {
        d.push_back(mean + swing * std::sin(2.0 * std::numbers::pi * (double(t) - 9.0) / 24.0));
    }
    return d;
}

}  // namespace

SucConfig StudyConfig::suc_config() const {
    SucConfig c;
    for (const auto& g : fleet) qualified("generator." + g.name, [&] { validate_class(g); });
    qualified("system", [&] { validate_params(params); });
    validate_study(*this);
    c.system = validate_fleet(scale_fleet(fleet, fleet_scale), params);
    qualified("scenario.quantiles", [&] { c.quantiles = make_quantile_spec(quantiles); });
    c.wind = {params.wind_capacity, wind_mean_cf, wind_persistence, wind_sigma_step, study.seed};
    c.horizon = horizon;
    c.extra_inertia = extra_inertia;
    c.max_extra_inertia = max_extra_inertia;
    c.rocof_constraint = rocof_constraint;
    c.nadir_constraint = nadir_constraint;
    c.qss_constraint = qss_constraint;
    c.nadir_cuts = nadir_cuts;
    c.integer_recourse = integer_recourse;
    c.loss_from_commitment = loss_from_commitment;
    c.refine_iterations = refine_iterations;
    c.verify_tolerance = verify_tolerance;
    c.k_star.sim = {sim_dt, sim_horizon};
    c.solver.gap_tol = mip_gap;
    c.solver.node_limit = node_limit;
    qualified("scheduler", [&] { validate_config(c); });
    return c;
}

ParsedConfig parse_config_text(const std::string& text, const std::string& source) {
    ParsedConfig out;
    StudyConfig& cfg = out.config;
    cfg.fleet.clear();

    std::map<std::string, std::set<std::string>> seen;  // section -> keys
    std::vector<std::set<std::string>> seen_gen;
    std::set<std::string> gen_names;
    const Section* section = nullptr;
    int gen = -1;
    std::string section_name;

    std::istringstream in(text);
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string_view line = raw;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;

        if (line.front() == '[') {
            if (line.back() != ']') fail_at(source, line_no, "unterminated section header", "");
            section_name = std::string(trim(line.substr(1, line.size() - 2)));
            section = nullptr;
            gen = -1;
            if (section_name.rfind("generator.", 0) == 0) {
                const std::string name = section_name.substr(10);
                if (name.empty()) fail_at(source, line_no, "generator section needs a name", "generator");
                if (!gen_names.insert(name).second) {
                    fail_at(source, line_no, "duplicate generator '" + name + "'", section_name);
                }
                GeneratorClass g;
                g.name = name;
                cfg.fleet.push_back(g);
                seen_gen.emplace_back();
                gen = static_cast<int>(cfg.fleet.size()) - 1;
                continue;
            }
            for (const auto& s : schema()) {
                if (s.name == section_name) section = &s;
            }
            if (!section) fail_at(source, line_no, "unknown section [" + section_name + "]", section_name);
            if (seen.count(section_name)) fail_at(source, line_no, "duplicate section [" + section_name + "]", section_name);
            seen[section_name];
            continue;
        }

        const auto eq = line.find('=');
        if (eq == std::string_view::npos) fail_at(source, line_no, "expected key = value", section_name);
        const std::string key(trim(line.substr(0, eq)));
        const std::string_view value = trim(line.substr(eq + 1));
        if (key.empty()) fail_at(source, line_no, "empty key", section_name);
        if (section_name.empty()) fail_at(source, line_no, "key '" + key + "' outside any section", key);
        const std::string field = section_name + "." + key;

        try {
            if (gen >= 0) {
                const auto& fields = generator_schema();
                const auto it = std::find_if(fields.begin(), fields.end(),
                                             [&](const GeneratorField& f) { return f.field.key == key; });
                if (it == fields.end()) fail_at(source, line_no, "unknown key '" + field + "'", field);
                if (!seen_gen[gen].insert(key).second) fail_at(source, line_no, "duplicate key '" + field + "'", field);
                it->field.set(cfg.fleet[gen], value, field);
            } else {
                const auto it = std::find_if(section->fields.begin(), section->fields.end(),
                                             [&](const Field<StudyConfig>& f) { return f.key == key; });
                if (it == section->fields.end()) fail_at(source, line_no, "unknown key '" + field + "'", field);
                if (!seen[section_name].insert(key).second) {
                    fail_at(source, line_no, "duplicate key '" + field + "'", field);
                }
                it->set(cfg, value, field);
            }
        } catch (const Error& e) {
            const std::string what = e.what();
            if (what.rfind(source + ":", 0) == 0) throw;
            fail_at(source, line_no, what, e.field());
        }
    }

    if (cfg.fleet.empty()) throw Error(source + ": at least one [generator.<name>] section is required", "generator");
    for (std::size_t g = 0; g < cfg.fleet.size(); ++g) {
        const std::string prefix = "generator." + cfg.fleet[g].name;
        for (const auto& f : generator_schema()) {
            if (seen_gen[g].count(f.field.key)) continue;
            if (f.required) {
                throw Error(source + ": missing required key '" + prefix + "." + f.field.key + "'",
                            prefix + "." + f.field.key);
            }
            out.defaults.push_back({prefix + "." + f.field.key, f.field.get(cfg.fleet[g])});
        }
    }
    for (const auto& s : schema()) {
        for (const auto& f : s.fields) {
            if (!seen[s.name].count(f.key)) out.defaults.push_back({s.name + "." + f.key, f.get(cfg)});
        }
    }
    (void)cfg.suc_config();
    return out;
}

ParsedConfig parse_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open config file '" + path.string() + "'", "config");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str(), path.string());
}

std::string serialize_config(const StudyConfig& config) {
    std::ostringstream out;
    bool first = true;
    for (const auto& s : schema()) {
        if (!first) out << '\n';
        first = false;
        out << '[' << s.name << "]\n";
        for (const auto& f : s.fields) out << f.key << " = " << f.get(config) << '\n';
        if (s.name == "system") {
            for (const auto& g : config.fleet) {
                out << "\n[generator." << g.name << "]\n";
                for (const auto& f : generator_schema()) out << f.field.key << " = " << f.field.get(g) << '\n';
            }
        }
    }
    return out.str();
}

std::string config_hash(const StudyConfig& config) {
    std::uint64_t h = 1469598103934665603ULL;
    for (const unsigned char ch : serialize_config(config)) {
        h ^= ch;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

StudyConfig default_study_config() {
    StudyConfig c;
    c.fleet = table_one_fleet();
    return c;
}

std::vector<double> read_series_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open series '" + path.string() + "'", "csv");
    std::vector<double> out;
    std::string raw;
    int line_no = 0;
    bool header = true;
    while (std::getline(in, raw)) {
        ++line_no;
        const std::string_view line = trim(raw);
        if (line.empty()) continue;
        if (header) {
            header = false;
            continue;
        }
        const auto comma = line.find(',');
        const std::string where = path.string() + ":" + std::to_string(line_no);
        if (comma == std::string_view::npos) throw Error(where + ": expected hour,MW", "csv");
        try {
            const auto hour = to_integer<long>(line.substr(0, comma), "hour");
            if (hour != static_cast<long>(out.size())) {
                throw Error("hour " + std::to_string(hour) + " out of sequence", "hour");
            }
            const double mw = to_double(line.substr(comma + 1), "MW");
            if (mw < 0.0) throw Error("MW must be >= 0", "MW");
            out.push_back(mw);
        } catch (const Error& e) {
            throw Error(where + ": " + e.what(), "csv");
        }
    }
    if (out.empty()) throw Error(path.string() + ": no data rows", "csv");
    return out;
}

StudyTraces study_traces(const StudyConfig& config, std::size_t hours, const std::filesystem::path& base_dir) {
    const auto resolve = [&](const std::string& p) {
        const std::filesystem::path f(p);
        return f.is_absolute() || base_dir.empty() ? f : base_dir / f;
    };
    StudyTraces t;
    const auto& s = config.study;
    if (s.demand_csv.empty()) {
        t.demand = daily_profile(hours, s.demand_mean, s.demand_swing);
    } else {
        t.demand = read_series_csv(resolve(s.demand_csv));
        if (t.demand.size() < hours) throw Error("demand series shorter than the study", "study.demand_csv");
        t.demand.resize(hours);
    }
    if (s.wind_csv.empty()) {
        const WindProcess unit{1.0, config.wind_mean_cf, config.wind_persistence, config.wind_sigma_step, s.seed};
        t.wind_cf = simulate_wind(unit, hours);
    } else {
        if (!(config.params.wind_capacity > 0.0)) {
            throw Error("a wind series needs system.wind_capacity > 0", "system.wind_capacity");
        }
        const auto mw = read_series_csv(resolve(s.wind_csv));
        if (mw.size() < hours) throw Error("wind series shorter than the study", "study.wind_csv");
        for (std::size_t i = 0; i < hours; ++i) {
            t.wind_cf.push_back(std::min(1.0, mw[i] / config.params.wind_capacity));
        }
    }
    return t;
}

}  // namespace inertia
