#pragma once

// Stochastic unit commitment over a scenario tree with frequency-security
// constraints, and the rolling-planning loop that commits root decisions hour
// by hour.

#include "inertia/domain.hpp"
#include "inertia/frequency.hpp"
#include "inertia/milp.hpp"
#include "inertia/scenario.hpp"

#include <iosfwd>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <tuple>
#include <vector>

namespace inertia {

struct SucConfig {
    System system;
    QuantileSpec quantiles = make_quantile_spec({0.005, 0.1, 0.3, 0.5, 0.7, 0.9, 0.995});
    WindProcess wind;  // capacity is taken from system.params.wind_capacity
    int horizon = 24;
    double extra_inertia = 0.0;      // MW·s²
    double max_extra_inertia = 0.0;  // widens the tangent range of the nadir cuts
    bool rocof_constraint = true;
    bool nadir_constraint = true;
    bool qss_constraint = true;
    int nadir_cuts = 8;
    /// Integer online/start counts at non-root nodes. Root counts are always integer.
    bool integer_recourse = true;
    /// Size the loss from committed units instead of fixing it at p_loss_max.
    bool loss_from_commitment = false;
    int refine_iterations = 3;
    double verify_tolerance = 5e-3;  // Hz beyond Δf_max accepted at verification
    KStarOptions k_star{};           // scan range is set per model
    milp::MilpOptions solver{};
};

void validate_config(const SucConfig& config);
WindProcess effective_wind(const SucConfig& config);

struct ClassHistory {
    int n_up = 0;
    std::vector<int> starts;  // starts[i]: start decisions taken i+1 hours ago
    std::vector<int> stops;   // stops[i]: units shut down i+1 hours ago
};

struct FleetState {
    std::vector<ClassHistory> classes;
};

/// Online counts with empty histories.
FleetState initial_state(const System& system, std::span<const int> n_up);
/// Throws Error when counts exceed the fleet or histories are negative.
void validate_state(const FleetState& state, const System& system);

/// Variable layout: per node, per class {N_up, N_start, P, R}, then wind_used and shed.
struct VarIndex {
    std::size_t num_classes = 0;
    std::size_t num_nodes = 0;

    std::size_t per_node() const { return 4 * num_classes + 2; }
    std::size_t size() const { return per_node() * num_nodes; }
    std::size_t n_up(std::size_t n, std::size_t g) const { return n * per_node() + 4 * g; }
    std::size_t n_start(std::size_t n, std::size_t g) const { return n_up(n, g) + 1; }
    std::size_t dispatch(std::size_t n, std::size_t g) const { return n_up(n, g) + 2; }
    std::size_t response(std::size_t n, std::size_t g) const { return n_up(n, g) + 3; }
    std::size_t wind_used(std::size_t n) const { return n * per_node() + 4 * num_classes; }
    std::size_t shed(std::size_t n) const { return wind_used(n) + 1; }
};

/// The loss assumed for a model: its size and inertia constant.
struct LossEvent {
    double mw = 0.0;
    double h = 0.0;
};

/// k* memo shared across the steps of one run. Entries are keyed by loss size
/// and scan range; every other parameter must stay fixed for the cache's life.
class RequirementCache {
public:
    const NadirRequirement& get(const SystemParams& params, const KStarOptions& options);

private:
    std::mutex mutex_;
    std::map<std::tuple<double, double, double>, std::unique_ptr<NadirRequirement>> entries_;
};

struct SucModel {
    milp::Model model;
    VarIndex index;
    LossEvent loss;
    std::vector<double> inertia_coef;  // MW·s² per online unit of each class
    double inertia_offset = 0.0;       // −P_L·H_L/f0 + extra
    double rocof_floor = 0.0;
    std::vector<NadirCutSet> cuts;     // per node; empty when the nadir constraint is off
    std::vector<double> qss_floor;     // per node
    std::vector<double> inertia_at(const std::vector<double>& x) const;
};

/// `state` empty means no history: dynamics against the past are omitted
/// (single-node studies and the warm-up solve).
SucModel build_suc(const SucConfig& config, const ScenarioTree& tree,
                   const std::optional<FleetState>& state, RequirementCache* cache = nullptr,
                   std::optional<LossEvent> loss = std::nullopt);

/// Adds the cut R ≥ 2k*/H_t − (k*/H_t²)·H at node n.
void add_nadir_tangent(SucModel& suc, std::size_t node, double h_t);

/// Decisions at one node; counts are rounded to the nearest integer.
SchedulePoint extract_point(const SucModel& suc, const SucConfig& config, const ScenarioTree& tree,
                            const std::optional<FleetState>& state, const std::vector<double>& x,
                            std::size_t node);

struct CostBreakdown {
    double startup = 0.0;
    double no_load = 0.0;
    double marginal = 0.0;
    double emissions = 0.0;
    double shed = 0.0;

    double total() const { return startup + no_load + marginal + emissions + shed; }
    CostBreakdown& operator+=(const CostBreakdown& o);
};

CostBreakdown node_cost(const SchedulePoint& point, const std::vector<GeneratorClass>& classes,
                        double dt_hours, const SystemParams& params);

struct FrequencyCheck {
    double inertia = 0.0;
    double response = 0.0;
    double nadir = 0.0;
    double max_rocof = 0.0;
    bool ok = true;
};

/// Solved single step: root decisions after verification and refinement.
struct StepResult {
    SucModel suc;
    milp::Solution solution;
    SchedulePoint root;
    FrequencyCheck check;
    int refinements = 0;
    std::size_t milp_nodes = 0;
};

/// Builds, solves and verifies the root by simulation, adding tangents at the
/// realised inertia until the nadir check passes or the refinement budget ends.
/// `root_hints` are extra tangent points for the root cut set.
/// Throws Error when the MILP is infeasible or stops at the node limit.
StepResult solve_step(const SucConfig& config, const ScenarioTree& tree,
                      const std::optional<FleetState>& state, RequirementCache& cache,
                      std::span<const double> root_hints = {});

/// State after committing `root`.
FleetState advance_state(const FleetState& state, const System& system, const SchedulePoint& root);

struct HourRecord {
    int hour = 0;
    double demand = 0.0;
    double wind_available = 0.0;
    double wind_used = 0.0;
    double curtailed = 0.0;
    double shed = 0.0;
    double inertia = 0.0;
    double response = 0.0;
    double nadir = 0.0;
    double max_rocof = 0.0;
    int refinements = 0;
    bool frequency_ok = true;
    std::size_t milp_nodes = 0;
    SchedulePoint point;
    CostBreakdown cost;
};

struct RunResult {
    std::vector<HourRecord> hours;
    CostBreakdown totals;
    bool aborted = false;
    std::string abort_reason;

    double total_cost() const { return totals.total(); }
    double total_curtailed() const;
};

/// Pre: both traces cover duration + horizon hours.
RunResult rolling_run(const SucConfig& config, std::span<const double> demand_trace,
                      std::span<const double> wind_trace, int duration_hours);

/// hour,demand,wind_available,wind_used,curtailed,shed,H,R,nadir,max_rocof,
/// n_up_<class>...,startup,no_load,marginal,emissions,shed_cost,total
void write_run_csv(const RunResult& run, const System& system, std::ostream& out);

}  // namespace inertia
