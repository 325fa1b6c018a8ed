#include "inertia/domain.hpp"

#include <cmath>
#include <numeric>

namespace inertia {

namespace {

void require(bool ok, const std::string& owner, const std::string& field, const std::string& rule) {
    if (!ok) {
        throw Error(owner + ": " + field + " " + rule, field);
    }
}

bool finite(double v) { return std::isfinite(v); }

}  // namespace

double SchedulePoint::total_response() const {
    return std::accumulate(classes.begin(), classes.end(), 0.0,
                           [](double acc, const ClassDecision& c) { return acc + c.response; });
}

double SchedulePoint::total_dispatch() const {
    return std::accumulate(classes.begin(), classes.end(), 0.0,
                           [](double acc, const ClassDecision& c) { return acc + c.dispatch; });
}

double System::full_commitment_inertia() const {
    double sum = 0.0;
    for (const auto& g : classes) sum += g.stored_energy() * g.unit_count;
    return sum / params.f0;
}

void validate_class(const GeneratorClass& g) {
    const std::string who = "generator '" + g.name + "'";
    require(!g.name.empty(), "generator", "name", "must not be empty");
    require(g.unit_count >= 0, who, "unit_count", "must be >= 0");
    require(finite(g.p_max) && g.p_max > 0.0, who, "p_max", "must be > 0");
    require(finite(g.p_min_stable) && g.p_min_stable > 0.0, who, "p_min_stable", "must be > 0");
    require(g.p_min_stable <= g.p_max, who, "p_min_stable", "must not exceed p_max");
    require(finite(g.no_load_cost) && g.no_load_cost >= 0.0, who, "no_load_cost", "must be >= 0");
    require(finite(g.marginal_cost) && g.marginal_cost >= 0.0, who, "marginal_cost", "must be >= 0");
    require(finite(g.startup_cost) && g.startup_cost >= 0.0, who, "startup_cost", "must be >= 0");
    require(g.startup_time >= 0, who, "startup_time", "must be >= 0");
    require(g.min_up_time >= 0, who, "min_up_time", "must be >= 0");
    require(g.min_down_time >= 0, who, "min_down_time", "must be >= 0");
    require(finite(g.inertia_constant) && g.inertia_constant > 0.0, who, "inertia_constant",
            "must be > 0");
    require(finite(g.max_response) && g.max_response >= 0.0, who, "max_response", "must be >= 0");
    require(g.max_response <= g.p_max, who, "max_response", "must not exceed p_max");
    require(finite(g.response_slope) && g.response_slope >= 0.0 && g.response_slope <= 1.0, who,
            "response_slope", "must lie in [0, 1]");
    require(finite(g.emissions_rate) && g.emissions_rate >= 0.0, who, "emissions_rate",
            "must be >= 0");
}

void validate_params(const SystemParams& p) {
    const std::string who = "system";
    require(finite(p.f0) && p.f0 > 0.0, who, "f0", "must be > 0");
    require(finite(p.damping) && p.damping >= 0.0, who, "damping", "must be >= 0");
    require(finite(p.rocof_max) && p.rocof_max > 0.0, who, "rocof_max", "must be > 0");
    require(finite(p.delta_f_max) && p.delta_f_max > 0.0, who, "delta_f_max", "must be > 0");
    require(finite(p.delta_f_qss_max) && p.delta_f_qss_max > 0.0, who, "delta_f_qss_max",
            "must be > 0");
    require(finite(p.t_delivery) && p.t_delivery > 0.0, who, "t_delivery", "must be > 0");
    require(finite(p.p_loss_max) && p.p_loss_max > 0.0, who, "p_loss_max", "must be > 0");
    require(finite(p.h_loss_max) && p.h_loss_max >= 0.0, who, "h_loss_max", "must be >= 0");
    require(finite(p.emissions_price) && p.emissions_price >= 0.0, who, "emissions_price",
            "must be >= 0");
    require(finite(p.voll) && p.voll >= 0.0, who, "voll", "must be >= 0");
    require(finite(p.wind_capacity) && p.wind_capacity >= 0.0, who, "wind_capacity",
            "must be >= 0");
}

System validate_fleet(std::vector<GeneratorClass> classes, const SystemParams& params) {
    if (classes.empty()) throw Error("fleet: at least one generator class is required", "fleet");
    for (const auto& g : classes) validate_class(g);
    validate_params(params);

    System system{std::move(classes), params, 0};
    for (std::size_t i = 1; i < system.classes.size(); ++i) {
        if (system.classes[i].p_max > system.classes[system.largest_class].p_max) {
            system.largest_class = i;
        }
    }
    require(params.p_loss_max >= system.largest_unit_mw() - 1e-9, "system", "p_loss_max",
            "must cover the largest unit (" + std::to_string(system.largest_unit_mw()) + " MW)");
    return system;
}

void validate_point(const SchedulePoint& point, const System& system, const TreeNode& node,
                    double tol) {
    if (point.classes.size() != system.classes.size()) {
        throw Error("schedule point: class count mismatch", "classes");
    }
    for (std::size_t g = 0; g < system.classes.size(); ++g) {
        const auto& cls = system.classes[g];
        const auto& d = point.classes[g];
        const std::string who = "schedule point (" + cls.name + ")";
        require(d.n_up >= 0 && d.n_up <= cls.unit_count, who, "n_up", "out of [0, unit_count]");
        require(d.n_start_gen >= 0, who, "n_start_gen", "must be >= 0");
        require(d.dispatch >= d.n_up * cls.p_min_stable - tol &&
                    d.dispatch <= d.n_up * cls.p_max + tol,
                who, "dispatch", "outside committed range");
        require(d.response >= -tol, who, "response", "must be >= 0");
    }
    require(point.wind_used >= -tol && point.wind_used <= node.wind_available + tol,
            "schedule point", "wind_used", "outside [0, wind_available]");
    require(point.shed >= -tol, "schedule point", "shed", "must be >= 0");
}

std::vector<GeneratorClass> table_one_fleet() {
    GeneratorClass nuclear{"nuclear", 6, 1800, 1800, 0, 10, 0, 0, 0, 0, 5, 0, 0, 0, true};
    GeneratorClass ccgt{"ccgt", 110, 500, 200, 7809, 51, 9000, 4, 4, 1, 5, 50, 0.5, 368, false};
    GeneratorClass ocgt{"ocgt", 30, 200, 50, 8000, 110, 0, 0, 0, 0, 5, 20, 0.5, 833, false};
    return {nuclear, ccgt, ocgt};
}

std::vector<GeneratorClass> scale_fleet(const std::vector<GeneratorClass>& classes, double factor) {
    if (!(factor > 0.0)) throw Error("scale factor must be > 0", "scale");
    std::vector<GeneratorClass> out = classes;
    for (auto& g : out) {
        g.p_max *= factor;
        g.p_min_stable *= factor;
        g.max_response *= factor;
        // per-unit £ quantities track unit size
        g.no_load_cost *= factor;
        g.startup_cost *= factor;
    }
    return out;
}

}  // namespace inertia
