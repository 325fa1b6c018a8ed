#pragma once

// The three valuation studies: annual value against wind capacity,
// instantaneous value over a demand-wind grid, and marginal value against the
// amount of added inertia.

#include "inertia/parallel.hpp"
#include "inertia/scheduler.hpp"

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace inertia {

enum class Binding { None, Rocof, Nadir, Qss };

const char* to_string(Binding b);

/// Which frequency constraint sets the root commitment of a solved step.
///
/// RoCoF binds when removing the smallest online flexible unit would breach
/// the inertia floor (counts are integer, so exact zero slack is rare). Nadir
/// and qss bind when their relative slack is within `tol`. RoCoF is reported
/// first, then nadir, then qss.
Binding binding_constraint_probe(const StepResult& step, const SucConfig& config, double tol = 1e-6);

struct ValuationRecord {
    std::string study;
    double wind_capacity = 0.0;  // MW
    double demand = 0.0;         // MW; instantaneous cells only
    double wind = 0.0;           // MW; instantaneous cells only
    double rocof_max = 0.0;
    double extra_inertia = 0.0;  // MW·s² added in the `with` case
    double baseline_cost = 0.0;
    double cost_with_extra = 0.0;
    double curtailed_baseline = 0.0;  // MW (instantaneous) or MWh (annual)
    double curtailed_with = 0.0;
    double response_baseline = 0.0;   // MW (instantaneous) or MW·h (annual)
    double response_with = 0.0;
    double shed_baseline = 0.0;
    Binding binding = Binding::None;
    bool flagged = false;  // shed or infeasible baseline

    double value() const { return baseline_cost - cost_with_extra; }
    /// £ per MW·s² of added inertia.
    double value_per_unit() const { return extra_inertia > 0.0 ? value() / extra_inertia : 0.0; }
};

struct AnnualStudy {
    std::vector<double> wind_capacities;         // MW, increasing
    std::vector<double> rocof_levels{0.25, 0.5};  // Hz/s
    int duration_hours = 168;
    double inertia_increment = 1.0;              // MW·s²
    std::vector<double> demand_trace;            // MW, duration + horizon hours
    std::vector<double> wind_cf_trace;           // capacity factor, duration + horizon hours
};

/// One record per (rocof level, capacity): rolling runs with and without the
/// increment on identical traces. Throws Error when any run aborts.
std::vector<ValuationRecord> annual_value(const SucConfig& config, const AnnualStudy& study,
                                          Execution exec = Execution::Parallel);

struct InstantaneousStudy {
    std::vector<double> demand_grid;  // MW
    std::vector<double> wind_grid;    // MW
    double inertia_increment = 1.0;   // MW·s²
};

/// Row-major over demand then wind. Each cell is a single-node commitment with
/// no history; cells that cannot be solved are flagged with NaN costs.
std::vector<ValuationRecord> instantaneous_value(const SucConfig& config, const InstantaneousStudy& study,
                                                 Execution exec = Execution::Parallel);

struct MarginalStudy {
    std::vector<double> extra_grid;  // MW·s², strictly increasing from 0
    int duration_hours = 48;
    std::vector<double> demand_trace;
    std::vector<double> wind_cf_trace;
    /// Saturation threshold on the marginal value (£ per MW·s²). Non-positive
    /// means 1% of the largest marginal value.
    double epsilon = 0.0;
};

struct MarginalCurve {
    std::vector<double> extras;
    std::vector<double> costs;
    std::vector<double> savings;   // cost(0) − cost(extra)
    std::vector<double> marginal;  // one per segment between consecutive extras
    double epsilon = 0.0;
    /// Smallest grid extra from which every later marginal value is below epsilon.
    std::optional<double> saturation;
};

MarginalCurve marginal_value(const SucConfig& config, const MarginalStudy& study,
                             Execution exec = Execution::Parallel);

/// Marginal values and saturation from a savings curve.
MarginalCurve marginal_from_savings(std::vector<double> extras, std::vector<double> costs, double epsilon);

/// study,wind_capacity,demand,wind,rocof_max,extra_inertia,baseline_cost,cost_with_extra,
/// value,value_per_unit,curtailed_baseline,curtailed_with,response_baseline,response_with,
/// shed_baseline,binding,flagged
void write_records_csv(std::span<const ValuationRecord> records, std::ostream& out);

/// Value per unit as a demand-by-wind matrix; first row holds the wind grid.
void write_grid_csv(std::span<const ValuationRecord> records, const InstantaneousStudy& study,
                    std::ostream& out);

void write_marginal_csv(const MarginalCurve& curve, std::ostream& out);

}  // namespace inertia
