#pragma once

// File-backed study configuration: a sectioned key = value text format.
//
//   [system]            SystemParams plus fleet_scale
//   [generator.<name>]  one block per class, in file order
//   [scenario]          quantiles and the wind process
//   [scheduler]         horizon, constraint toggles, cut and solver settings
//   [study]             traces, grids, durations, seed
//   [output]            out_dir
//
// '#' starts a comment. Lists are comma separated. Unknown sections or keys
// are errors; omitted optional keys take their default and are logged.

#include "inertia/scheduler.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace inertia {

struct StudySettings {
    std::uint64_t seed = 1;
    int duration_hours = 168;
    double demand_mean = 35000.0;   // MW, synthetic daily profile
    double demand_swing = 9000.0;   // MW
    std::string demand_csv;         // (hour, MW); replaces the synthetic profile
    std::string wind_csv;           // (hour, MW) at the configured wind capacity
    std::vector<double> wind_capacities{15000.0, 30000.0, 50000.0, 60000.0};
    std::vector<double> rocof_levels{0.25, 0.5};
    double inertia_increment = 1.0;  // MW·s²
    std::vector<double> demand_grid{20000.0, 30000.0, 40000.0, 50000.0, 60000.0};
    std::vector<double> wind_grid{0.0, 10000.0, 20000.0, 30000.0, 40000.0};
    std::vector<double> extra_grid{0.0, 1000.0, 2000.0, 3000.0, 4000.0, 5000.0, 6000.0, 7000.0, 8000.0};
    double epsilon = 0.0;            // £ per MW·s²; 0 selects 1% of the largest marginal
    int threads = 0;                 // 0 keeps the OpenMP default
};

struct StudyConfig {
    std::vector<GeneratorClass> fleet;  // as written; fleet_scale is applied by suc_config()
    double fleet_scale = 1.0;
    SystemParams params;
    std::vector<double> quantiles{0.005, 0.1, 0.3, 0.5, 0.7, 0.9, 0.995};
    double wind_mean_cf = 0.35;
    double wind_persistence = 0.9;
    double wind_sigma_step = 0.05;
    int horizon = 24;
    double extra_inertia = 0.0;
    double max_extra_inertia = 0.0;
    bool rocof_constraint = true;
    bool nadir_constraint = true;
    bool qss_constraint = true;
    int nadir_cuts = 8;
    bool integer_recourse = true;
    bool loss_from_commitment = false;
    int refine_iterations = 3;
    double verify_tolerance = 5e-3;
    double sim_dt = 0.01;
    double sim_horizon = 60.0;
    double mip_gap = 1e-6;
    std::size_t node_limit = 100000;
    StudySettings study;
    std::string out_dir = "out";

    /// Validated scheduler configuration; the wind seed is study.seed.
    SucConfig suc_config() const;
};

struct ProvenanceEntry {
    std::string key;    // "section.key"
    std::string value;  // serialised default
};

struct ParsedConfig {
    StudyConfig config;
    std::vector<ProvenanceEntry> defaults;  // keys that were omitted, in schema order
};

/// Throws Error with "<source>:<line>: ..." messages for syntax problems and a
/// field name ("section.key") for invalid values or violated invariants.
ParsedConfig parse_config_text(const std::string& text, const std::string& source = "<config>");
ParsedConfig parse_config(const std::filesystem::path& path);

/// Every key, in schema order, with shortest round-trip number formatting.
std::string serialize_config(const StudyConfig& config);

/// Stable 64-bit FNV-1a hash of the serialised config, as 16 hex digits.
std::string config_hash(const StudyConfig& config);

/// Desk-scale and full-scale defaults, the latter with the reference fleet.
StudyConfig default_study_config();

/// (hour, MW) rows with a header line; hours must be 0, 1, 2, ... in order.
std::vector<double> read_series_csv(const std::filesystem::path& path);

struct StudyTraces {
    std::vector<double> demand;   // MW
    std::vector<double> wind_cf;  // capacity factor
};

/// Demand from the CSV or the synthetic daily profile; wind capacity factor
/// from the CSV (divided by the configured capacity) or simulated with the
/// study seed. Both cover `hours` entries.
StudyTraces study_traces(const StudyConfig& config, std::size_t hours,
                         const std::filesystem::path& base_dir = {});

}  // namespace inertia
