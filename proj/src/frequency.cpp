#include "inertia/frequency.hpp"

#include <algorithm>
#include <cmath>
#include <omp.h>

namespace inertia {

namespace {

void check_event(const FrequencyEvent& ev, const SimulationSettings& s) {
    if (!(ev.inertia > 0.0)) throw Error("frequency: inertia must be > 0", "inertia");
    if (!(s.dt > 0.0)) throw Error("frequency: dt must be > 0", "dt");
    if (!(ev.t_delivery > 0.0)) throw Error("frequency: t_delivery must be > 0", "t_delivery");
    if (s.horizon < ev.t_delivery) {
        throw Error("frequency: horizon shorter than response delivery time", "horizon");
    }
}

// RK4 over [0, T_d] and [T_d, horizon] with step sizes adjusted so the ramp
// corner lands on a grid point. `visit(t, x, dxdt, after_delivery)` returns
// false to stop early.
template <typename Visit>
void integrate(const FrequencyEvent& ev, const SimulationSettings& s, Visit&& visit) {
    const double two_h = 2.0 * ev.inertia;
    const double damp = ev.damping * ev.demand;
    const double ramp = ev.response / ev.t_delivery;
    auto rhs = [&](double t, double x) {
        const double delivered = t < ev.t_delivery ? ramp * t : ev.response;
        return (delivered - ev.p_loss - damp * x) / two_h;
    };

    double t = 0.0;
    double x = 0.0;
    if (!visit(t, x, rhs(t, x), false)) return;
    const auto segment = [&](double t_end, bool after) {
        const double span = t_end - t;
        if (span <= 0.0) return true;
        const auto steps = static_cast<long>(std::max(1.0, std::ceil(span / s.dt - 1e-9)));
        const double h = span / static_cast<double>(steps);
        const double t0 = t;
        for (long i = 1; i <= steps; ++i) {
            const double k1 = rhs(t, x);
            const double k2 = rhs(t + 0.5 * h, x + 0.5 * h * k1);
            const double k3 = rhs(t + 0.5 * h, x + 0.5 * h * k2);
            const double k4 = rhs(t + h, x + h * k3);
            x += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            t = i == steps ? t_end : t0 + h * static_cast<double>(i);
            if (!std::isfinite(x)) throw Error("frequency: non-finite state during integration");
            if (!visit(t, x, rhs(t, x), after || t >= ev.t_delivery)) return false;
        }
        return true;
    };
    if (segment(ev.t_delivery, false)) segment(s.horizon, true);
}

}  // namespace

double post_fault_inertia(const System& system, std::span<const int> online, double extra_inertia,
                          double loss_mw, double loss_h) {
    if (online.size() != system.classes.size()) {
        throw Error("post_fault_inertia: one online count per class required", "online");
    }
    double stored = 0.0;
    double capacity = 0.0;
    for (std::size_t g = 0; g < online.size(); ++g) {
        const auto& cls = system.classes[g];
        if (online[g] < 0 || online[g] > cls.unit_count) {
            throw Error("post_fault_inertia: online count out of range for " + cls.name, cls.name);
        }
        stored += cls.stored_energy() * online[g];
        capacity += cls.p_max * online[g];
    }
    if (loss_mw > capacity + 1e-9) {
        throw Error("post_fault_inertia: loss exceeds committed capacity", "loss_mw");
    }
    const double h = (stored - loss_mw * loss_h) / system.params.f0 + extra_inertia;
    if (h < 0.0) throw Error("post_fault_inertia: loss exceeds committed inertia", "loss_h");
    return h;
}

double rocof_inertia_floor(double p_loss, double rocof_max) {
    if (!(rocof_max > 0.0)) throw Error("rocof_max must be > 0", "rocof_max");
    return std::abs(p_loss / (2.0 * rocof_max));
}

FrequencyTrajectory simulate_frequency(const FrequencyEvent& event,
                                       const SimulationSettings& settings) {
    check_event(event, settings);
    FrequencyTrajectory out;
    out.time.reserve(static_cast<std::size_t>(settings.horizon / settings.dt) + 2);
    out.delta_f.reserve(out.time.capacity());
    integrate(event, settings, [&](double t, double x, double dxdt, bool) {
        out.time.push_back(t);
        out.delta_f.push_back(x);
        if (x < out.nadir) {
            out.nadir = x;
            out.nadir_time = t;
        }
        out.max_rocof = std::max(out.max_rocof, std::abs(dxdt));
        return true;
    });
    out.qss_deviation = out.delta_f.back();
    return out;
}

double simulate_nadir(const FrequencyEvent& event, const SimulationSettings& settings) {
    check_event(event, settings);
    double nadir = 0.0;
    integrate(event, settings, [&](double, double x, double dxdt, bool after_delivery) {
        nadir = std::min(nadir, x);
        // Past T_d the forcing is constant: once Δf rises it keeps rising.
        return !(after_delivery && dxdt >= 0.0);
    });
    return nadir;
}

double qss_response_floor(const SystemParams& params, double demand) {
    return std::max(0.0, params.p_loss_max - params.damping * demand * params.delta_f_qss_max);
}

double nadir_k_star_undamped(const SystemParams& params) {
    return params.p_loss_max * params.p_loss_max * params.t_delivery / (4.0 * params.delta_f_max);
}

double worst_nadir_on_curve(const SystemParams& params, double demand, double k,
                            const KStarOptions& options) {
    const double r_floor = qss_response_floor(params, demand);
    double h_top = options.h_hi;
    if (r_floor > 0.0) h_top = std::min(h_top, k / r_floor);

    std::vector<double> grid;
    if (h_top <= options.h_lo || options.scan_points < 2) {
        grid.push_back(h_top);
    } else {
        const int n = options.scan_points;
        const double ratio = h_top / options.h_lo;
        for (int i = 0; i < n; ++i) {
            grid.push_back(i == n - 1 ? h_top : options.h_lo * std::pow(ratio, double(i) / (n - 1)));
        }
    }

    std::vector<double> nadirs(grid.size());
    const auto eval = [&](std::size_t i) {
        const FrequencyEvent ev{grid[i], k / grid[i], params.t_delivery, params.damping, demand,
                                params.p_loss_max};
        nadirs[i] = simulate_nadir(ev, options.sim);
    };
    const auto n = static_cast<long>(grid.size());
    if (options.execution == Execution::Parallel && !omp_in_parallel()) {
#pragma omp parallel for schedule(static)
        for (long i = 0; i < n; ++i) eval(static_cast<std::size_t>(i));
    } else {
        for (long i = 0; i < n; ++i) eval(static_cast<std::size_t>(i));
    }
    return *std::min_element(nadirs.begin(), nadirs.end());
}

double nadir_k_star_search(const SystemParams& params, double demand,
                           const KStarOptions& options) {
    if (demand < 0.0) throw Error("nadir_k_star: demand must be >= 0", "demand");
    const double limit = -params.delta_f_max;
    const auto feasible = [&](double k) {
        return worst_nadir_on_curve(params, demand, k, options) >= limit;
    };
    double hi = nadir_k_star_undamped(params);
    int doublings = 0;
    while (!feasible(hi)) {
        if (++doublings > 40) throw Error("nadir_k_star: no feasible k within search bounds");
        hi *= 2.0;
    }
    double lo = 0.0;
    while (hi - lo > options.rel_tol * hi) {
        const double mid = 0.5 * (lo + hi);
        if (feasible(mid)) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    return hi;
}

double nadir_k_star(const SystemParams& params, double demand, const KStarOptions& options) {
    if (demand < 0.0) throw Error("nadir_k_star: demand must be >= 0", "demand");
    if (params.damping * demand == 0.0) return nadir_k_star_undamped(params);
    return nadir_k_star_search(params, demand, options);
}

double NadirRequirement::k_star(double demand) const {
    {
        std::lock_guard lock(mutex_);
        if (auto it = cache_.find(demand); it != cache_.end()) return it->second;
    }
    const double k = nadir_k_star(params_, demand, options_);
    std::lock_guard lock(mutex_);
    cache_.emplace(demand, k);
    return k;
}

double NadirCutSet::bound(double h) const {
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& c : cuts) best = std::max(best, c.value(h));
    return best;
}

void NadirCutSet::add_tangent(double h) {
    if (!(h > 0.0)) throw Error("nadir cut: tangent point must be > 0", "h");
    cuts.push_back({h, 2.0 * k_star / h, k_star / (h * h)});
}

NadirCutSet build_nadir_cuts(double k_star, double h_floor, double h_max, int n_cuts) {
    if (!(h_floor > 0.0) || !(h_max > h_floor)) {
        throw Error("nadir cuts: need 0 < h_floor < h_max", "h_floor");
    }
    if (n_cuts < 2) throw Error("nadir cuts: at least two cuts required", "n_cuts");
    if (!(k_star >= 0.0)) throw Error("nadir cuts: k* must be >= 0", "k_star");
    NadirCutSet set{k_star, h_floor, {}};
    const double ratio = h_max / h_floor;
    for (int i = 0; i < n_cuts; ++i) {
        const double h = i == n_cuts - 1 ? h_max : h_floor * std::pow(ratio, double(i) / (n_cuts - 1));
        set.add_tangent(h);
    }
    return set;
}

int max_threads() { return omp_get_max_threads(); }
void set_threads(int n) {
    if (n > 0) omp_set_num_threads(n);
}

}  // namespace inertia
