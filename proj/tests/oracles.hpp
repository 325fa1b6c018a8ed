#pragma once

// Brute-force reference solvers used only by tests. They share no code with
// the simplex or branch-and-bound paths they check.

#include "inertia/milp.hpp"

#include <cmath>
#include <functional>
#include <optional>
#include <vector>

namespace oracle {

using inertia::milp::Model;
using inertia::milp::Relation;
using inertia::milp::VarKind;

// Gaussian elimination with partial pivoting; nullopt when singular.
inline std::optional<std::vector<double>> solve_dense(std::vector<std::vector<double>> a,
                                                      std::vector<double> b) {
    const std::size_t n = b.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r) {
            if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
        }
        if (std::abs(a[piv][col]) < 1e-10) return std::nullopt;
        std::swap(a[piv], a[col]);
        std::swap(b[piv], b[col]);
        for (std::size_t r = 0; r < n; ++r) {
            if (r == col) continue;
            const double f = a[r][col] / a[col][col];
            if (f == 0.0) continue;
            for (std::size_t c = col; c < n; ++c) a[r][c] -= f * a[col][c];
            b[r] -= f * b[col];
        }
    }
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = b[i] / a[i][i];
    return x;
}

// Optimal objective of a bounded LP by enumerating every vertex.
inline std::optional<double> vertex_enumeration(const Model& m, double tol = 1e-7) {
    const std::size_t n = m.num_variables();
    std::vector<std::vector<double>> planes;
    std::vector<double> rhs;
    for (const auto& c : m.constraints()) {
        std::vector<double> row(n, 0.0);
        for (const auto& t : c.terms) row[t.var] += t.coef;
        planes.push_back(row);
        rhs.push_back(c.rhs);
    }
    for (std::size_t j = 0; j < n; ++j) {
        for (double bound : {m.variables()[j].lower, m.variables()[j].upper}) {
            if (!std::isfinite(bound)) continue;
            std::vector<double> row(n, 0.0);
            row[j] = 1.0;
            planes.push_back(row);
            rhs.push_back(bound);
        }
    }
    std::optional<double> best;
    std::vector<std::size_t> pick(n);
    std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t depth, std::size_t start) {
        if (depth == n) {
            std::vector<std::vector<double>> a;
            std::vector<double> b;
            for (auto p : pick) {
                a.push_back(planes[p]);
                b.push_back(rhs[p]);
            }
            const auto x = solve_dense(a, b);
            if (!x || m.max_violation(*x) > tol) return;
            const double obj = m.evaluate_objective(*x);
            if (!best || obj < *best) best = obj;
            return;
        }
        for (std::size_t p = start; p < planes.size(); ++p) {
            pick[depth] = p;
            rec(depth + 1, p + 1);
        }
    };
    rec(0, 0);
    return best;
}

// Exhaustive enumeration over every integer assignment. Rows that involve
// only integer variables are checked directly; the remaining continuous part
// is dispatched with an LP per surviving assignment.
inline std::optional<double> enumerate_milp(const Model& m) {
    const std::size_t n = m.num_variables();
    std::vector<std::size_t> ints;
    for (std::size_t j = 0; j < n; ++j) {
        if (m.variables()[j].kind == VarKind::Integer) ints.push_back(j);
    }
    std::vector<bool> pure(m.num_constraints(), true);
    bool any_continuous = ints.size() != n;
    for (std::size_t i = 0; i < m.num_constraints(); ++i) {
        for (const auto& t : m.constraints()[i].terms) {
            if (m.variables()[t.var].kind != VarKind::Integer) pure[i] = false;
        }
    }
    std::vector<double> x(n, 0.0);
    std::optional<double> best;
    std::function<void(std::size_t)> rec = [&](std::size_t k) {
        if (k == ints.size()) {
            for (std::size_t i = 0; i < m.num_constraints(); ++i) {
                if (!pure[i]) continue;
                const auto& c = m.constraints()[i];
                double lhs = 0.0;
                for (const auto& t : c.terms) lhs += t.coef * x[t.var];
                if (c.relation == Relation::LessEqual && lhs > c.rhs + 1e-9) return;
                if (c.relation == Relation::GreaterEqual && lhs < c.rhs - 1e-9) return;
                if (c.relation == Relation::Equal && std::abs(lhs - c.rhs) > 1e-9) return;
            }
            double obj;
            if (any_continuous) {
                Model fixed = m;
                for (auto j : ints) fixed.set_bounds(j, x[j], x[j]);
                const auto sol = inertia::milp::solve_lp(fixed);
                if (sol.status != inertia::milp::Status::Optimal) return;
                obj = sol.objective;
            } else {
                obj = m.evaluate_objective(x);
            }
            if (!best || obj < *best) best = obj;
            return;
        }
        const auto& v = m.variables()[ints[k]];
        for (double val = std::ceil(v.lower); val <= v.upper + 1e-9; val += 1.0) {
            x[ints[k]] = val;
            rec(k + 1);
        }
    };
    rec(0);
    return best;
}

}  // namespace oracle
