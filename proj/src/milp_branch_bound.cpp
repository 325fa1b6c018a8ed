#include "inertia/milp.hpp"
#include "milp_internal.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

namespace inertia::milp {

namespace {

struct Node {
    double bound;
    std::size_t seq;
    std::vector<double> lower;
    std::vector<double> upper;
};

struct WorseBound {
    bool operator()(const Node& a, const Node& b) const {
        if (a.bound != b.bound) return a.bound > b.bound;
        return a.seq > b.seq;
    }
};

// Most fractional integer variable; ties go to the lowest index.
std::size_t branching_variable(const Model& model, const std::vector<double>& x, double tol) {
    std::size_t pick = model.num_variables();
    double best = tol;
    for (std::size_t j = 0; j < model.num_variables(); ++j) {
        if (model.variables()[j].kind != VarKind::Integer) continue;
        const double frac = x[j] - std::floor(x[j]);
        const double dist = std::min(frac, 1.0 - frac);
        if (dist > best + 1e-12) {
            best = dist;
            pick = j;
        }
    }
    return pick;
}

double relative_gap(double incumbent, double bound) {
    return (incumbent - bound) / std::max(1.0, std::abs(incumbent));
}

}  // namespace

Solution solve_milp(const Model& model, const MilpOptions& options) {
    model.validate();
    const std::size_t n = model.num_variables();
    std::vector<double> lower(n), upper(n);
    for (std::size_t j = 0; j < n; ++j) {
        const auto& v = model.variables()[j];
        if (v.kind == VarKind::Integer) {
            lower[j] = std::ceil(v.lower - options.integrality_tol);
            upper[j] = std::floor(v.upper + options.integrality_tol);
        } else {
            lower[j] = v.lower;
            upper[j] = v.upper;
        }
    }

    Solution best;
    best.status = Status::Infeasible;
    double incumbent = kInf;
    std::size_t iterations = 0;
    std::size_t solved = 0;
    std::size_t seq = 0;

    auto root = solve_relaxation(model, lower, upper, options.lp);
    iterations += root.iterations;
    ++solved;
    if (root.status != Status::Optimal) {
        root.iterations = iterations;
        root.nodes = solved;
        return root;
    }
    const double root_bound = root.objective;

    std::priority_queue<Node, std::vector<Node>, WorseBound> open;
    open.push({root.objective, seq++, lower, upper});
    Solution pending = std::move(root);
    bool have_pending = true;

    while (!open.empty()) {
        Node node = open.top();
        if (node.bound >= incumbent - options.gap_tol * std::max(1.0, std::abs(incumbent))) {
            // Best-first: every remaining node is at least this bad.
            break;
        }
        if (solved >= options.node_limit) {
            best.status = Status::GapLimit;
            best.gap = incumbent < kInf ? relative_gap(incumbent, node.bound) : kInf;
            best.iterations = iterations;
            best.nodes = solved;
            best.relaxation_bound = root_bound;
            return best;
        }
        open.pop();

        Solution lp;
        if (have_pending) {
            lp = std::move(pending);
            have_pending = false;
        } else {
            lp = solve_relaxation(model, node.lower, node.upper, options.lp);
            iterations += lp.iterations;
            ++solved;
        }
        if (lp.status != Status::Optimal) continue;
        if (lp.objective >= incumbent - options.gap_tol * std::max(1.0, std::abs(incumbent))) continue;

        const std::size_t j = branching_variable(model, lp.values, options.integrality_tol);
        if (j == n) {
            // Integral relaxation: polish by fixing the integers exactly.
            std::vector<double> lo = node.lower, hi = node.upper;
            for (std::size_t k = 0; k < n; ++k) {
                if (model.variables()[k].kind != VarKind::Integer) continue;
                lo[k] = hi[k] = std::round(lp.values[k]);
            }
            auto fixed = solve_relaxation(model, lo, hi, options.lp);
            iterations += fixed.iterations;
            const auto& cand = fixed.status == Status::Optimal ? fixed : lp;
            if (cand.objective < incumbent) {
                incumbent = cand.objective;
                best = cand;
                best.status = Status::Optimal;
            }
            continue;
        }

        const double v = lp.values[j];
        Node down{lp.objective, seq++, node.lower, node.upper};
        down.upper[j] = std::floor(v);
        Node up{lp.objective, seq++, std::move(node.lower), std::move(node.upper)};
        up.lower[j] = std::ceil(v);
        open.push(std::move(down));
        open.push(std::move(up));
    }

    if (incumbent == kInf) {
        Solution none;
        none.status = Status::Infeasible;
        none.iterations = iterations;
        none.nodes = solved;
        none.relaxation_bound = root_bound;
        return none;
    }
    const double bound = open.empty() ? incumbent : std::min(incumbent, open.top().bound);
    best.gap = std::max(0.0, relative_gap(incumbent, bound));
    best.iterations = iterations;
    best.nodes = solved;
    best.relaxation_bound = root_bound;
    return best;
}

}  // namespace inertia::milp
