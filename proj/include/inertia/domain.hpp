#pragma once

// Shared domain types for the inertia-aware scheduling library.

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace inertia {

/// Library error. `field` names the offending configuration field or type
/// member when there is one.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what, std::string field = {})
        : std::runtime_error(what), field_(std::move(field)) {}
    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

/// A class of identical thermal units. Units of one class are scheduled as an
/// aggregate integer online count.
struct GeneratorClass {
    std::string name;
    int unit_count = 0;
    double p_max = 0.0;             // MW per unit
    double p_min_stable = 0.0;      // MW per unit
    double no_load_cost = 0.0;      // £/h per unit
    double marginal_cost = 0.0;     // £/MWh
    double startup_cost = 0.0;      // £ per start
    int startup_time = 0;           // h between start decision and generation
    int min_up_time = 0;            // h
    int min_down_time = 0;          // h
    double inertia_constant = 0.0;  // s
    double max_response = 0.0;      // MW per unit
    double response_slope = 0.0;    // fraction of headroom deliverable as response
    double emissions_rate = 0.0;    // kgCO2/MWh
    bool must_run = false;          // never cycled: always all units online

    /// Inertia contribution of one online unit before division by f0 (MW·s).
    double stored_energy() const { return inertia_constant * p_max; }
};

struct SystemParams {
    double f0 = 50.0;              // Hz
    double damping = 0.005;        // 1/Hz, applied to demand
    double rocof_max = 0.5;        // Hz/s
    double delta_f_max = 0.8;      // Hz, nadir limit
    double delta_f_qss_max = 0.5;  // Hz
    double t_delivery = 10.0;      // s
    double p_loss_max = 1800.0;    // MW
    double h_loss_max = 5.0;       // s
    double emissions_price = 150.0;  // £/tCO2
    double voll = 30000.0;         // £/MWh
    double wind_capacity = 0.0;    // MW
};

struct TreeNode {
    std::size_t id = 0;
    std::optional<std::size_t> parent;
    double probability = 1.0;
    double time_step_hours = 1.0;
    double lead_time = 0.0;  // hours from root
    double demand = 0.0;     // MW
    double wind_available = 0.0;  // MW
};

/// Per-class decisions at one node.
struct ClassDecision {
    int n_up = 0;
    int n_start = 0;      // start decisions taken at this node
    int n_start_gen = 0;  // units that begin generating at this node
    double dispatch = 0.0;
    double response = 0.0;
};

struct SchedulePoint {
    std::size_t node = 0;
    std::vector<ClassDecision> classes;
    double wind_used = 0.0;
    double shed = 0.0;

    double total_response() const;
    double total_dispatch() const;
};

/// A fleet that passed validation.
struct System {
    std::vector<GeneratorClass> classes;
    SystemParams params;
    std::size_t largest_class = 0;  // index of the class with the largest p_max

    double largest_unit_mw() const { return classes[largest_class].p_max; }
    /// Σ H_g·P_g^max·N_g / f0 with every unit online (MW·s²).
    double full_commitment_inertia() const;
};

void validate_class(const GeneratorClass& g);
void validate_params(const SystemParams& p);

/// Checks every type invariant and returns the system with its largest unit
/// identified. Throws Error naming the first violated field.
System validate_fleet(std::vector<GeneratorClass> classes, const SystemParams& params);

/// Throws if `point` violates bounds of the fleet or the node.
void validate_point(const SchedulePoint& point, const System& system, const TreeNode& node,
                    double tol = 1e-6);

/// Reference fleet: 6 nuclear, 110 CCGT, 30 OCGT.
std::vector<GeneratorClass> table_one_fleet();

/// Unit ratings, response and per-unit £ costs (no-load, startup) multiplied by
/// `factor`; counts, £/MWh costs and time constants untouched.
std::vector<GeneratorClass> scale_fleet(const std::vector<GeneratorClass>& classes, double factor);

}  // namespace inertia
