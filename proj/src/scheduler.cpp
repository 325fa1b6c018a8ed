#include "inertia/scheduler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <ostream>

namespace inertia {

namespace {

using milp::Relation;
using milp::Term;
using milp::VarKind;

struct Expr {
    std::vector<Term> terms;
    double constant = 0.0;

    void add(std::size_t var, double coef) { terms.push_back({var, coef}); }
    void add(const Expr& e, double scale) {
        for (const auto& t : e.terms) terms.push_back({t.var, t.coef * scale});
        constant += e.constant * scale;
    }
    double eval(const std::vector<double>& x) const {
        double v = constant;
        for (const auto& t : terms) v += t.coef * x[t.var];
        return v;
    }
};

void add_row(milp::Model& m, std::string name, const Expr& e, Relation rel, double rhs) {
    std::map<std::size_t, double> merged;
    for (const auto& t : e.terms) merged[t.var] += t.coef;
    std::vector<Term> terms;
    for (const auto& [v, c] : merged) {
        if (c != 0.0) terms.push_back({v, c});
    }
    const double r = rhs - e.constant;
    if (terms.empty()) {
        const bool ok = rel == Relation::LessEqual      ? 0.0 <= r + 1e-9
                        : rel == Relation::GreaterEqual ? 0.0 >= r - 1e-9
                                                        : std::abs(r) <= 1e-9;
        if (!ok) throw Error("scheduler: fleet history violates " + name, "fleet_state");
        return;
    }
    m.add_constraint(std::move(name), std::move(terms), rel, r);
}

int history_at(const std::vector<int>& h, std::size_t i) { return i < h.size() ? h[i] : 0; }

// Commitment quantities along the ancestor chain of a node, reaching into the
// fleet history for steps before the root.
class Chain {
public:
    Chain(const System& system, const ScenarioTree& tree, const std::optional<FleetState>& state,
          const VarIndex& index)
        : system_(system), tree_(tree), state_(state), index_(index) {}

    // Start decisions of class g taken k steps before node n.
    Expr starts(std::size_t n, std::size_t g, int k) const {
        Expr e;
        const int depth = tree_.depth(n);
        if (k <= depth) {
            e.add(index_.n_start(*tree_.ancestor(n, k), g), 1.0);
        } else if (state_) {
            e.constant = history_at(state_->classes[g].starts, static_cast<std::size_t>(k - depth - 1));
        }
        return e;
    }

    // Units of class g that begin generating j steps before node n.
    Expr start_gen(std::size_t n, std::size_t g, int j) const {
        return starts(n, g, j + system_.classes[g].startup_time);
    }

    // Units of class g shut down j steps before node n. Zero for the root
    // when there is no history.
    Expr stops(std::size_t n, std::size_t g, int j) const {
        Expr e;
        const int depth = tree_.depth(n);
        if (j > depth) {
            if (state_) e.constant = history_at(state_->classes[g].stops, static_cast<std::size_t>(j - depth - 1));
            return e;
        }
        const std::size_t x = *tree_.ancestor(n, j);
        const auto parent = tree_[x].parent;
        if (parent) {
            e.add(index_.n_up(*parent, g), 1.0);
        } else if (state_) {
            e.constant = state_->classes[g].n_up;
        } else {
            return e;
        }
        e.add(start_gen(x, g, 0), 1.0);
        e.add(index_.n_up(x, g), -1.0);
        return e;
    }

    // Units of class g started but not yet generating at node n.
    Expr pipeline(std::size_t n, std::size_t g) const {
        Expr e;
        for (int j = 0; j < system_.classes[g].startup_time; ++j) e.add(starts(n, g, j), 1.0);
        return e;
    }

private:
    const System& system_;
    const ScenarioTree& tree_;
    const std::optional<FleetState>& state_;
    const VarIndex& index_;
};

std::size_t history_length(const GeneratorClass& g) {
    return static_cast<std::size_t>(std::max(g.startup_time + g.min_up_time, g.min_down_time) + 1);
}

LossEvent default_loss(const SucConfig& config) {
    return {config.system.params.p_loss_max, config.system.params.h_loss_max};
}

// Largest unit among classes with committed units, or the largest installed
// unit when nothing is committed.
LossEvent loss_from_counts(const System& system, const std::vector<int>& counts) {
    std::optional<std::size_t> best;
    for (std::size_t g = 0; g < system.classes.size(); ++g) {
        if (counts[g] <= 0) continue;
        if (!best || system.classes[g].p_max > system.classes[*best].p_max) best = g;
    }
    const auto& cls = system.classes[best.value_or(system.largest_class)];
    return {cls.p_max, cls.inertia_constant};
}

}  // namespace

void validate_config(const SucConfig& config) {
    validate_fleet(config.system.classes, config.system.params);
    if (config.horizon < 1) throw Error("config: horizon must be >= 1", "horizon");
    if (!(config.extra_inertia >= 0.0)) throw Error("config: extra_inertia must be >= 0", "extra_inertia");
    if (!(config.max_extra_inertia >= 0.0)) {
        throw Error("config: max_extra_inertia must be >= 0", "max_extra_inertia");
    }
    if (config.nadir_cuts < 2) throw Error("config: nadir_cuts must be >= 2", "nadir_cuts");
    if (config.refine_iterations < 0) {
        throw Error("config: refine_iterations must be >= 0", "refine_iterations");
    }
    if (!(config.verify_tolerance >= 0.0)) {
        throw Error("config: verify_tolerance must be >= 0", "verify_tolerance");
    }
    const auto probs = quantile_probabilities(config.quantiles.quantiles);
    if (probs.size() != config.quantiles.probabilities.size()) {
        throw Error("config: quantile probabilities do not match quantiles", "quantiles");
    }
    validate_wind(effective_wind(config));
}

WindProcess effective_wind(const SucConfig& config) {
    WindProcess w = config.wind;
    w.capacity = config.system.params.wind_capacity;
    return w;
}

FleetState initial_state(const System& system, std::span<const int> n_up) {
    if (n_up.size() != system.classes.size()) {
        throw Error("fleet state: one count per class required", "n_up");
    }
    FleetState s;
    for (std::size_t g = 0; g < n_up.size(); ++g) {
        ClassHistory h;
        h.n_up = n_up[g];
        h.starts.assign(history_length(system.classes[g]), 0);
        h.stops.assign(history_length(system.classes[g]), 0);
        s.classes.push_back(std::move(h));
    }
    validate_state(s, system);
    return s;
}

void validate_state(const FleetState& state, const System& system) {
    if (state.classes.size() != system.classes.size()) {
        throw Error("fleet state: class count mismatch", "fleet_state");
    }
    for (std::size_t g = 0; g < system.classes.size(); ++g) {
        const auto& cls = system.classes[g];
        const auto& h = state.classes[g];
        int pending = 0;
        for (int j = 0; j + 1 < cls.startup_time; ++j) pending += history_at(h.starts, static_cast<std::size_t>(j));
        if (h.n_up < 0 || h.n_up + pending > cls.unit_count) {
            throw Error("fleet state: online and starting units exceed the fleet for " + cls.name, cls.name);
        }
        for (int v : h.starts) {
            if (v < 0) throw Error("fleet state: negative start history for " + cls.name, cls.name);
        }
        for (int v : h.stops) {
            if (v < 0) throw Error("fleet state: negative stop history for " + cls.name, cls.name);
        }
    }
}

const NadirRequirement& RequirementCache::get(const SystemParams& params, const KStarOptions& options) {
    std::lock_guard lock(mutex_);
    auto& slot = entries_[{params.p_loss_max, options.h_lo, options.h_hi}];
    if (!slot) slot = std::make_unique<NadirRequirement>(params, options);
    return *slot;
}

std::vector<double> SucModel::inertia_at(const std::vector<double>& x) const {
    std::vector<double> h(index.num_nodes, inertia_offset);
    for (std::size_t n = 0; n < index.num_nodes; ++n) {
        for (std::size_t g = 0; g < index.num_classes; ++g) h[n] += inertia_coef[g] * x[index.n_up(n, g)];
    }
    return h;
}

SucModel build_suc(const SucConfig& config, const ScenarioTree& tree,
                   const std::optional<FleetState>& state, RequirementCache* cache,
                   std::optional<LossEvent> loss) {
    const System& sys = config.system;
    const SystemParams& params = sys.params;
    if (state) validate_state(*state, sys);
    const std::size_t G = sys.classes.size();

    SucModel suc;
    suc.index = {G, tree.size()};
    suc.loss = loss.value_or(default_loss(config));
    const VarIndex& ix = suc.index;
    auto& m = suc.model;
    const Chain chain(sys, tree, state, ix);

    for (std::size_t n = 0; n < tree.size(); ++n) {
        const auto& node = tree[n];
        const double pi = node.probability;
        const double dt = node.time_step_hours;
        const VarKind count_kind = n == 0 || config.integer_recourse ? VarKind::Integer : VarKind::Continuous;
        const std::string tag = "_" + std::to_string(n);
        for (std::size_t g = 0; g < G; ++g) {
            const auto& c = sys.classes[g];
            const double n_lo = c.must_run ? c.unit_count : 0.0;
            const double start_hi = c.must_run ? 0.0 : c.unit_count;
            const bool can_respond = c.max_response > 0.0 && c.response_slope > 0.0;
            const double energy_price = c.marginal_cost + params.emissions_price * c.emissions_rate / 1000.0;
            m.add_variable("nup_" + c.name + tag, count_kind, n_lo, c.unit_count, pi * dt * c.no_load_cost);
            m.add_variable("nst_" + c.name + tag, count_kind, 0.0, start_hi, pi * c.startup_cost);
            // Must-run output is pinned by bounds instead of rows.
            m.add_variable("p_" + c.name + tag, VarKind::Continuous,
                           c.must_run ? c.unit_count * c.p_min_stable : 0.0, c.unit_count * c.p_max,
                           pi * dt * energy_price);
            m.add_variable("r_" + c.name + tag, VarKind::Continuous, 0.0,
                           can_respond ? c.unit_count * c.max_response : 0.0);
        }
        m.add_variable("wind" + tag, VarKind::Continuous, 0.0, node.wind_available);
        m.add_variable("shed" + tag, VarKind::Continuous, 0.0, node.demand, pi * dt * params.voll);
    }

    for (std::size_t n = 0; n < tree.size(); ++n) {
        const auto& node = tree[n];
        const std::string tag = "_" + std::to_string(n);

        Expr balance;
        for (std::size_t g = 0; g < G; ++g) balance.add(ix.dispatch(n, g), 1.0);
        balance.add(ix.wind_used(n), 1.0);
        balance.add(ix.shed(n), 1.0);
        add_row(m, "balance" + tag, balance, Relation::Equal, node.demand);

        for (std::size_t g = 0; g < G; ++g) {
            const auto& c = sys.classes[g];
            const std::string ct = "_" + c.name + tag;
            const std::size_t N = ix.n_up(n, g), P = ix.dispatch(n, g), R = ix.response(n, g);

            const bool can_respond = c.max_response > 0.0 && c.response_slope > 0.0;
            if (!c.must_run) {
                Expr lo;
                lo.add(P, 1.0);
                lo.add(N, -c.p_min_stable);
                add_row(m, "pmin" + ct, lo, Relation::GreaterEqual, 0.0);
            }
            if (!c.must_run || can_respond) {
                Expr head;
                head.add(P, 1.0);
                head.add(R, 1.0);
                head.add(N, -c.p_max);
                add_row(m, "headroom" + ct, head, Relation::LessEqual, 0.0);
            }
            if (can_respond) {
                Expr rmax;
                rmax.add(R, 1.0);
                rmax.add(N, -c.max_response);
                add_row(m, "rmax" + ct, rmax, Relation::LessEqual, 0.0);
                Expr slope;
                slope.add(R, 1.0);
                slope.add(P, c.response_slope);
                slope.add(N, -c.response_slope * c.p_max);
                add_row(m, "rslope" + ct, slope, Relation::LessEqual, 0.0);
            }
            if (c.must_run) continue;

            if (n != 0 || state) {
                add_row(m, "dyn" + ct, chain.stops(n, g, 0), Relation::GreaterEqual, 0.0);
            }
            if (c.min_up_time > 0) {
                Expr mut;
                mut.add(N, 1.0);
                for (int j = 0; j < c.min_up_time; ++j) mut.add(chain.start_gen(n, g, j), -1.0);
                add_row(m, "minup" + ct, mut, Relation::GreaterEqual, 0.0);
            }
            if (c.startup_time > 0 || c.min_down_time > 0) {
                Expr mdt;
                mdt.add(N, 1.0);
                mdt.add(chain.pipeline(n, g), 1.0);
                for (int j = 0; j < c.min_down_time; ++j) mdt.add(chain.stops(n, g, j), 1.0);
                add_row(m, "mindown" + ct, mdt, Relation::LessEqual, c.unit_count);
            }
        }
    }

    // Frequency security.
    suc.inertia_coef.resize(G);
    double h_full = 0.0;
    double r_fleet = 0.0;
    for (std::size_t g = 0; g < G; ++g) {
        const auto& c = sys.classes[g];
        suc.inertia_coef[g] = c.stored_energy() / params.f0;
        h_full += suc.inertia_coef[g] * c.unit_count;
        if (c.response_slope > 0.0) r_fleet += c.max_response * c.unit_count;
    }
    suc.inertia_offset = -suc.loss.mw * suc.loss.h / params.f0 + config.extra_inertia;
    suc.rocof_floor = rocof_inertia_floor(suc.loss.mw, params.rocof_max);
    const double h_max = h_full - suc.loss.mw * suc.loss.h / params.f0 +
                         std::max(config.extra_inertia, config.max_extra_inertia);
    SystemParams loss_params = params;
    loss_params.p_loss_max = suc.loss.mw;
    loss_params.h_loss_max = suc.loss.h;

    const auto inertia_expr = [&](std::size_t n) {
        Expr h;
        for (std::size_t g = 0; g < G; ++g) h.add(ix.n_up(n, g), suc.inertia_coef[g]);
        h.constant = suc.inertia_offset;
        return h;
    };
    const auto response_expr = [&](std::size_t n) {
        Expr r;
        for (std::size_t g = 0; g < G; ++g) r.add(ix.response(n, g), 1.0);
        return r;
    };

    RequirementCache local_cache;
    RequirementCache& req_cache = cache ? *cache : local_cache;
    KStarOptions kopt = config.k_star;
    if (config.nadir_constraint) {
        if (!(h_max > 0.0)) throw Error("scheduler: fleet cannot supply post-fault inertia", "fleet");
        kopt.h_hi = h_max;
        kopt.h_lo = config.rocof_constraint ? std::min(suc.rocof_floor, 0.5 * h_max) : 1e-3 * h_max;
        if (!(kopt.h_lo > 0.0)) kopt.h_lo = 1e-3 * h_max;
    }

    suc.cuts.resize(config.nadir_constraint ? tree.size() : 0);
    suc.qss_floor.assign(tree.size(), 0.0);
    for (std::size_t n = 0; n < tree.size(); ++n) {
        const std::string tag = "_" + std::to_string(n);
        const double demand = tree[n].demand;
        if (config.rocof_constraint) {
            add_row(m, "rocof" + tag, inertia_expr(n), Relation::GreaterEqual, suc.rocof_floor);
        }
        if (config.nadir_constraint) {
            const double k = req_cache.get(loss_params, kopt).k_star(demand);
            double h_floor = kopt.h_lo;
            if (r_fleet > 0.0) h_floor = std::max(h_floor, k / r_fleet);
            h_floor = std::min(h_floor, 0.5 * h_max);
            suc.cuts[n] = build_nadir_cuts(k, h_floor, h_max, config.nadir_cuts);
            const auto& cuts = suc.cuts[n].cuts;
            for (std::size_t i = 0; i < cuts.size(); ++i) {
                Expr row = response_expr(n);
                row.add(inertia_expr(n), cuts[i].b);
                add_row(m, "nadir" + tag + "_" + std::to_string(i), row, Relation::GreaterEqual, cuts[i].a);
            }
        }
        if (config.qss_constraint) {
            suc.qss_floor[n] = qss_response_floor(loss_params, demand);
            add_row(m, "qss" + tag, response_expr(n), Relation::GreaterEqual, suc.qss_floor[n]);
        }
    }
    return suc;
}

void add_nadir_tangent(SucModel& suc, std::size_t node, double h_t) {
    if (node >= suc.cuts.size()) throw Error("nadir tangent: node has no cut set", "node");
    auto& set = suc.cuts[node];
    set.add_tangent(h_t);
    const auto& cut = set.cuts.back();
    const auto& ix = suc.index;
    Expr row;
    for (std::size_t g = 0; g < ix.num_classes; ++g) {
        row.add(ix.response(node, g), 1.0);
        row.add(ix.n_up(node, g), cut.b * suc.inertia_coef[g]);
    }
    row.constant = cut.b * suc.inertia_offset;
    add_row(suc.model, "nadir_" + std::to_string(node) + "_" + std::to_string(set.cuts.size() - 1), row,
            Relation::GreaterEqual, cut.a);
}

SchedulePoint extract_point(const SucModel& suc, const SucConfig& config, const ScenarioTree& tree,
                            const std::optional<FleetState>& state, const std::vector<double>& x,
                            std::size_t node) {
    const auto& ix = suc.index;
    const Chain chain(config.system, tree, state, ix);
    SchedulePoint p;
    p.node = node;
    for (std::size_t g = 0; g < ix.num_classes; ++g) {
        ClassDecision d;
        d.n_up = static_cast<int>(std::lround(x[ix.n_up(node, g)]));
        d.n_start = static_cast<int>(std::lround(x[ix.n_start(node, g)]));
        d.n_start_gen = static_cast<int>(std::lround(chain.start_gen(node, g, 0).eval(x)));
        d.dispatch = std::max(0.0, x[ix.dispatch(node, g)]);
        d.response = std::max(0.0, x[ix.response(node, g)]);
        p.classes.push_back(d);
    }
    p.wind_used = std::clamp(x[ix.wind_used(node)], 0.0, tree[node].wind_available);
    p.shed = std::max(0.0, x[ix.shed(node)]);
    return p;
}

CostBreakdown& CostBreakdown::operator+=(const CostBreakdown& o) {
    startup += o.startup;
    no_load += o.no_load;
    marginal += o.marginal;
    emissions += o.emissions;
    shed += o.shed;
    return *this;
}

CostBreakdown node_cost(const SchedulePoint& point, const std::vector<GeneratorClass>& classes,
                        double dt_hours, const SystemParams& params) {
    if (point.classes.size() != classes.size()) throw Error("node_cost: class count mismatch", "classes");
    CostBreakdown c;
    for (std::size_t g = 0; g < classes.size(); ++g) {
        const auto& cls = classes[g];
        const auto& d = point.classes[g];
        c.startup += cls.startup_cost * d.n_start;
        c.no_load += dt_hours * cls.no_load_cost * d.n_up;
        c.marginal += dt_hours * cls.marginal_cost * d.dispatch;
        c.emissions += dt_hours * params.emissions_price * cls.emissions_rate / 1000.0 * d.dispatch;
    }
    c.shed = dt_hours * params.voll * point.shed;
    return c;
}

namespace {

FrequencyCheck verify_root(const SucConfig& config, const SucModel& suc, const SchedulePoint& root,
                           double demand) {
    const auto& params = config.system.params;
    FrequencyCheck chk;
    chk.inertia = suc.inertia_offset;
    for (std::size_t g = 0; g < root.classes.size(); ++g) chk.inertia += suc.inertia_coef[g] * root.classes[g].n_up;
    chk.response = root.total_response();
    if (!(chk.inertia > 0.0)) {
        chk.nadir = -std::numeric_limits<double>::infinity();
        chk.max_rocof = std::numeric_limits<double>::infinity();
        chk.ok = !config.nadir_constraint && !config.rocof_constraint;
        return chk;
    }
    const FrequencyEvent ev{chk.inertia, chk.response, params.t_delivery, params.damping, demand,
                            suc.loss.mw};
    const auto traj = simulate_frequency(ev, config.k_star.sim);
    chk.nadir = traj.nadir;
    chk.max_rocof = traj.max_rocof;
    const bool nadir_ok = !config.nadir_constraint ||
                          chk.nadir >= -params.delta_f_max - config.verify_tolerance;
    const bool rocof_ok = !config.rocof_constraint || chk.max_rocof <= params.rocof_max + 1e-6;
    chk.ok = nadir_ok && rocof_ok;
    return chk;
}

}  // namespace

StepResult solve_step(const SucConfig& config, const ScenarioTree& tree,
                      const std::optional<FleetState>& state, RequirementCache& cache,
                      std::span<const double> root_hints) {
    const auto& sys = config.system;
    std::optional<LossEvent> loss;
    if (config.loss_from_commitment) {
        std::vector<int> counts(sys.classes.size(), 0);
        for (std::size_t g = 0; g < sys.classes.size(); ++g) {
            if (sys.classes[g].must_run) counts[g] = sys.classes[g].unit_count;
            if (state) counts[g] = std::max(counts[g], state->classes[g].n_up);
        }
        loss = loss_from_counts(sys, counts);
    }

    std::size_t total_nodes = 0;
    for (std::size_t attempt = 0;; ++attempt) {
        StepResult step{build_suc(config, tree, state, &cache, loss), {}, {}, {}, 0, 0};
        if (config.nadir_constraint) {
            for (double h : root_hints) {
                if (h > step.suc.cuts[0].h_floor) add_nadir_tangent(step.suc, 0, h);
            }
        }
        for (;;) {
            step.solution = milp::solve_milp(step.suc.model, config.solver);
            total_nodes += step.solution.nodes;
            if (step.solution.status != milp::Status::Optimal) {
                throw Error(std::string("scheduler: step solve ended with status ") +
                                milp::to_string(step.solution.status),
                            "solver");
            }
            step.root = extract_point(step.suc, config, tree, state, step.solution.values, 0);
            step.check = verify_root(config, step.suc, step.root, tree[0].demand);
            if (step.check.ok || !config.nadir_constraint || step.refinements >= config.refine_iterations ||
                !(step.check.inertia > 0.0)) {
                break;
            }
            add_nadir_tangent(step.suc, 0, step.check.inertia);
            ++step.refinements;
        }
        step.milp_nodes = total_nodes;
        if (!config.loss_from_commitment || attempt >= sys.classes.size()) return step;
        std::vector<int> counts;
        for (const auto& d : step.root.classes) counts.push_back(d.n_up);
        const LossEvent committed = loss_from_counts(sys, counts);
        if (committed.mw <= loss->mw) return step;
        loss = committed;
    }
}

FleetState advance_state(const FleetState& state, const System& system, const SchedulePoint& root) {
    FleetState next = state;
    for (std::size_t g = 0; g < system.classes.size(); ++g) {
        auto& h = next.classes[g];
        const auto& d = root.classes[g];
        const int stopped = h.n_up + d.n_start_gen - d.n_up;
        if (stopped < 0) throw Error("fleet state: root decisions break commitment dynamics", system.classes[g].name);
        h.starts.insert(h.starts.begin(), d.n_start);
        h.stops.insert(h.stops.begin(), stopped);
        const std::size_t len = history_length(system.classes[g]);
        h.starts.resize(len, 0);
        h.stops.resize(len, 0);
        h.n_up = d.n_up;
    }
    return next;
}

double RunResult::total_curtailed() const {
    double s = 0.0;
    for (const auto& h : hours) s += h.curtailed;
    return s;
}

RunResult rolling_run(const SucConfig& config, std::span<const double> demand_trace,
                      std::span<const double> wind_trace, int duration_hours) {
    validate_config(config);
    if (duration_hours < 1) throw Error("rolling run: duration must be >= 1", "duration_hours");
    const auto need = static_cast<std::size_t>(duration_hours + config.horizon);
    if (demand_trace.size() < need || wind_trace.size() < need) {
        throw Error("rolling run: traces must cover duration + horizon hours", "trace");
    }
    const auto& sys = config.system;
    const WindProcess wind = effective_wind(config);
    const auto h1 = static_cast<std::size_t>(config.horizon) + 1;
    RequirementCache cache;
    RunResult run;

    // Warm-up: the first horizon seen with perfect foresight and no history.
    FleetState state;
    try {
        std::vector<double> w(wind_trace.begin(), wind_trace.begin() + static_cast<long>(h1));
        for (auto& v : w) v = std::clamp(v, 0.0, wind.capacity);
        const auto warm_tree = deterministic_chain(w, demand_trace.subspan(0, h1));
        const auto warm = solve_step(config, warm_tree, std::nullopt, cache);
        std::vector<int> counts;
        for (const auto& d : warm.root.classes) counts.push_back(d.n_up);
        state = initial_state(sys, counts);
    } catch (const Error& e) {
        run.aborted = true;
        run.abort_reason = std::string("warm-up: ") + e.what();
        return run;
    }

    // Realised inertia of the previous hour, offered as a root tangent.
    std::vector<double> hints;
    for (int t = 0; t < duration_hours; ++t) {
        const auto ts = static_cast<std::size_t>(t);
        try {
            const auto tree = build_tree(wind, wind_trace[ts], demand_trace.subspan(ts, h1), config.quantiles,
                                         config.horizon);
            const auto step = solve_step(config, tree, state, cache, hints);
            if (step.check.inertia > 0.0) hints.assign(1, step.check.inertia);
            validate_point(step.root, sys, tree[0]);
            HourRecord rec;
            rec.hour = t;
            rec.demand = tree[0].demand;
            rec.wind_available = tree[0].wind_available;
            rec.wind_used = step.root.wind_used;
            rec.curtailed = std::max(0.0, rec.wind_available - rec.wind_used);
            rec.shed = step.root.shed;
            rec.inertia = step.check.inertia;
            rec.response = step.check.response;
            rec.nadir = step.check.nadir;
            rec.max_rocof = step.check.max_rocof;
            rec.refinements = step.refinements;
            rec.frequency_ok = step.check.ok;
            rec.milp_nodes = step.milp_nodes;
            rec.point = step.root;
            rec.cost = node_cost(step.root, sys.classes, tree[0].time_step_hours, sys.params);
            run.totals += rec.cost;
            state = advance_state(state, sys, step.root);
            run.hours.push_back(std::move(rec));
        } catch (const Error& e) {
            run.aborted = true;
            run.abort_reason = "hour " + std::to_string(t) + ": " + e.what();
            break;
        }
    }
    return run;
}

void write_run_csv(const RunResult& run, const System& system, std::ostream& out) {
    out << "hour,demand,wind_available,wind_used,curtailed,shed,H,R,nadir,max_rocof";
    for (const auto& c : system.classes) out << ",n_up_" << c.name;
    out << ",startup,no_load,marginal,emissions,shed_cost,total\n";
    const auto old_precision = out.precision(10);
    for (const auto& h : run.hours) {
        out << h.hour << ',' << h.demand << ',' << h.wind_available << ',' << h.wind_used << ','
            << h.curtailed << ',' << h.shed << ',' << h.inertia << ',' << h.response << ',' << h.nadir << ','
            << h.max_rocof;
        for (const auto& d : h.point.classes) out << ',' << d.n_up;
        out << ',' << h.cost.startup << ',' << h.cost.no_load << ',' << h.cost.marginal << ','
            << h.cost.emissions << ',' << h.cost.shed << ',' << h.cost.total() << '\n';
    }
    out.precision(old_precision);
}

}  // namespace inertia
