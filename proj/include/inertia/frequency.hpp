#pragma once

// Uniform (single lumped mass) frequency model after the loss of a generator:
//
//   2H·dΔf/dt + D·P^D·Δf = ΔP(t) − P_L,   ΔP(t) = R·min(t/T_d, 1)
//
// plus the scheduling requirements derived from it: the RoCoF inertia floor,
// the nadir requirement H·R ≥ k*, its tangent-cut linearisation, and the
// quasi-steady-state response floor.

#include "inertia/domain.hpp"
#include "inertia/parallel.hpp"

#include <map>
#include <mutex>
#include <span>
#include <vector>

namespace inertia {

struct FrequencyEvent {
    double inertia = 0.0;     // H after the loss, MW·s²
    double response = 0.0;    // R, MW
    double t_delivery = 10.0; // T_d, s
    double damping = 0.0;     // D, 1/Hz
    double demand = 0.0;      // P^D, MW
    double p_loss = 0.0;      // P_L, MW
};

struct SimulationSettings {
    double dt = 0.01;
    double horizon = 60.0;
};

struct FrequencyTrajectory {
    std::vector<double> time;
    std::vector<double> delta_f;
    double nadir = 0.0;
    double nadir_time = 0.0;
    double max_rocof = 0.0;      // largest |dΔf/dt| on the grid, Hz/s
    double qss_deviation = 0.0;  // Δf at the end of the horizon
};

/// H = (Σ H_g·P_g^max·N_g − loss_mw·loss_h)/f0 + extra. Throws when negative.
double post_fault_inertia(const System& system, std::span<const int> online, double extra_inertia,
                          double loss_mw, double loss_h);

/// Minimum post-fault inertia for a RoCoF limit: |P_L / (2·RoCoF_max)|.
double rocof_inertia_floor(double p_loss, double rocof_max);

/// Fixed-step RK4 integration; steps are aligned so that T_d falls on the grid.
FrequencyTrajectory simulate_frequency(const FrequencyEvent& event,
                                       const SimulationSettings& settings = {});

/// Same integration as simulate_frequency but only tracks the minimum, and
/// stops once the response is fully delivered and frequency is recovering.
double simulate_nadir(const FrequencyEvent& event, const SimulationSettings& settings = {});

/// R_min = max(0, P_L^max − D·P^D·Δf_qss_max).
double qss_response_floor(const SystemParams& params, double demand);

struct KStarOptions {
    double h_lo = 1.0;        // scan range for H along H·R = k
    double h_hi = 1e6;
    int scan_points = 6;
    double rel_tol = 1e-7;
    SimulationSettings sim{};
    Execution execution = Execution::Parallel;
};

/// Zero-damping nadir requirement P_L²·T_d / (4·Δf_max).
double nadir_k_star_undamped(const SystemParams& params);

/// Worst simulated nadir over the points (H, k/H) of the scan grid that also
/// satisfy the quasi-steady-state response floor.
double worst_nadir_on_curve(const SystemParams& params, double demand, double k,
                            const KStarOptions& options);

/// Bisection on k using worst_nadir_on_curve. No closed-form shortcut.
double nadir_k_star_search(const SystemParams& params, double demand, const KStarOptions& options);

/// k*(demand): closed form when damping or demand is zero, search otherwise.
double nadir_k_star(const SystemParams& params, double demand, const KStarOptions& options = {});

/// Memoised k*(demand) for one parameter set; safe to share between threads.
class NadirRequirement {
public:
    NadirRequirement(SystemParams params, KStarOptions options)
        : params_(params), options_(options) {}

    double k_star(double demand) const;
    const SystemParams& params() const { return params_; }
    const KStarOptions& options() const { return options_; }

private:
    SystemParams params_;
    KStarOptions options_;
    mutable std::mutex mutex_;
    mutable std::map<double, double> cache_;
};

struct NadirCut {
    double tangent_h;  // H_i
    double a;          // 2k*/H_i
    double b;          // k*/H_i²
    double value(double h) const { return a - b * h; }
};

/// Tangent outer approximation of {H·R ≥ k*}: each cut reads R ≥ a − b·H.
struct NadirCutSet {
    double k_star = 0.0;
    double h_floor = 0.0;
    std::vector<NadirCut> cuts;

    /// max over cuts of a − b·H.
    double bound(double h) const;
    void add_tangent(double h);
};

/// n_cuts tangents at geometrically spaced H_i on [h_floor, h_max].
NadirCutSet build_nadir_cuts(double k_star, double h_floor, double h_max, int n_cuts);

}  // namespace inertia
