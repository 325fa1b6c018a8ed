#include "inertia/domain.hpp"
#include "inertia/milp.hpp"
#include "milp_internal.hpp"

#include <algorithm>
#include <cmath>

namespace inertia::milp {

namespace {

// Dense bounded-variable primal simplex over the tableau B^-1 [A | I | Art].
// Columns: structurals [0, n), row slacks [n, n+m), artificials after that.
// Row i reads a_i·x + s_i = b_i; slack bounds encode the relation.
class Tableau {
public:
    Tableau(const Model& model, std::span<const double> lower, std::span<const double> upper,
            const LpOptions& opt)
        : opt_(opt), n_(model.num_variables()), m_(model.num_constraints()) {
        const auto& rows = model.constraints();
        lb_.assign(lower.begin(), lower.end());
        ub_.assign(upper.begin(), upper.end());
        for (const auto& c : rows) {
            switch (c.relation) {
                case Relation::LessEqual: lb_.push_back(0.0); ub_.push_back(kInf); break;
                case Relation::GreaterEqual: lb_.push_back(-kInf); ub_.push_back(0.0); break;
                case Relation::Equal: lb_.push_back(0.0); ub_.push_back(0.0); break;
            }
        }
        x_.assign(n_ + m_, 0.0);
        for (std::size_t j = 0; j < n_; ++j) x_[j] = initial_value(j);

        // Residuals decide which rows need an artificial.
        std::vector<double> slack(m_);
        std::vector<int> art_sign(m_, 0);
        double rhs_scale = 1.0;
        for (std::size_t i = 0; i < m_; ++i) {
            double lhs = 0.0;
            for (const auto& t : rows[i].terms) lhs += t.coef * x_[t.var];
            slack[i] = rows[i].rhs - lhs;
            rhs_scale = std::max(rhs_scale, std::abs(rows[i].rhs));
            const std::size_t s = n_ + i;
            if (slack[i] < lb_[s] - opt_.feas_tol) {
                art_sign[i] = -1;
            } else if (slack[i] > ub_[s] + opt_.feas_tol) {
                art_sign[i] = 1;
            }
        }
        infeas_tol_ = 1e-7 * rhs_scale;
        std::size_t n_art = 0;
        for (int s : art_sign) n_art += (s != 0);
        cols_ = n_ + m_ + n_art;
        lb_.resize(cols_, 0.0);
        ub_.resize(cols_, kInf);
        x_.resize(cols_, 0.0);
        first_art_ = n_ + m_;

        t_.assign(m_ * cols_, 0.0);
        beta_.assign(m_, 0.0);
        basis_.assign(m_, 0);
        row_of_.assign(cols_, kNonBasic);
        std::size_t next_art = first_art_;
        for (std::size_t i = 0; i < m_; ++i) {
            double* row = &t_[i * cols_];
            for (const auto& t : rows[i].terms) row[t.var] += t.coef;
            row[n_ + i] = 1.0;
            if (art_sign[i] == 0) {
                basis_[i] = n_ + i;
                beta_[i] = slack[i];
            } else {
                const std::size_t s = n_ + i;
                x_[s] = art_sign[i] > 0 ? ub_[s] : lb_[s];
                const double residual = slack[i] - x_[s];
                row[next_art] = art_sign[i];
                if (art_sign[i] < 0) {
                    for (std::size_t j = 0; j < cols_; ++j) row[j] = -row[j];
                }
                basis_[i] = next_art;
                beta_[i] = std::abs(residual);
                ++next_art;
            }
            row_of_[basis_[i]] = i;
        }
    }

    Solution run(const std::vector<double>& cost) {
        Solution sol;
        if (cols_ > first_art_) {
            std::vector<double> phase1(cols_, 0.0);
            for (std::size_t j = first_art_; j < cols_; ++j) phase1[j] = 1.0;
            const auto st = iterate(phase1);
            sol.iterations = iterations_;
            if (st == Status::Unbounded) {
                sol.status = Status::Infeasible;
                return sol;
            }
            double infeas = 0.0;
            for (std::size_t i = 0; i < m_; ++i) {
                if (basis_[i] >= first_art_) infeas += beta_[i];
            }
            if (infeas > infeas_tol_) {
                sol.status = Status::Infeasible;
                return sol;
            }
            drive_out_artificials();
        }
        std::vector<double> phase2(cols_, 0.0);
        std::copy(cost.begin(), cost.end(), phase2.begin());
        const auto st = iterate(phase2);
        sol.iterations = iterations_;
        if (st != Status::Optimal) {
            sol.status = st;
            return sol;
        }
        sol.status = Status::Optimal;
        sol.values.resize(n_);
        for (std::size_t j = 0; j < n_; ++j) {
            sol.values[j] = row_of_[j] == kNonBasic ? x_[j] : beta_[row_of_[j]];
        }
        return sol;
    }

private:
    static constexpr std::size_t kNonBasic = static_cast<std::size_t>(-1);

    double initial_value(std::size_t j) const {
        if (std::isfinite(lb_[j])) return lb_[j];
        if (std::isfinite(ub_[j])) return ub_[j];
        return 0.0;
    }

    Status iterate(const std::vector<double>& cost) {
        // Reduced costs d_j = c_j - c_B^T B^-1 a_j.
        d_.assign(cost.begin(), cost.end());
        for (std::size_t i = 0; i < m_; ++i) {
            const double cb = cost[basis_[i]];
            if (cb == 0.0) continue;
            const double* row = &t_[i * cols_];
            for (std::size_t j = 0; j < cols_; ++j) d_[j] -= cb * row[j];
        }
        std::size_t degenerate_run = 0;
        while (true) {
            if (iterations_ >= opt_.max_iterations) {
                throw Error("simplex iteration limit reached");
            }
            const bool bland = degenerate_run >= opt_.degenerate_switch;
            int dir = 0;
            const std::size_t q = price(bland, dir);
            if (q == kNonBasic) return Status::Optimal;

            // Ratio test.
            double best = kInf;
            std::size_t leave = kNonBasic;
            double best_alpha = 0.0;
            for (std::size_t i = 0; i < m_; ++i) {
                const double alpha = t_[i * cols_ + q];
                if (std::abs(alpha) <= opt_.pivot_tol) continue;
                const double rate = -dir * alpha;
                const std::size_t k = basis_[i];
                double limit;
                if (rate < 0.0) {
                    if (!std::isfinite(lb_[k])) continue;
                    limit = (beta_[i] - lb_[k]) / -rate;
                } else {
                    if (!std::isfinite(ub_[k])) continue;
                    limit = (ub_[k] - beta_[i]) / rate;
                }
                limit = std::max(limit, 0.0);
                bool take = false;
                const double tie = 1e-12 * (1.0 + best);
                if (leave == kNonBasic || limit < best - tie) {
                    take = true;
                } else if (limit <= best + tie) {
                    take = bland ? (k < basis_[leave]) : (std::abs(alpha) > std::abs(best_alpha));
                }
                if (take) {
                    best = limit;
                    leave = i;
                    best_alpha = alpha;
                }
            }
            const double flip = ub_[q] - lb_[q];
            if (std::isfinite(flip) && flip <= best) {
                apply_step(q, dir, flip);
                x_[q] = dir > 0 ? ub_[q] : lb_[q];
                degenerate_run = flip <= 1e-12 ? degenerate_run + 1 : 0;
                ++iterations_;
                continue;
            }
            if (leave == kNonBasic) return Status::Unbounded;
            const std::size_t k = basis_[leave];
            const double rate = -dir * best_alpha;
            const double entering_value = x_[q] + dir * best;
            apply_step(q, dir, best);
            x_[k] = rate < 0.0 ? lb_[k] : ub_[k];
            pivot(leave, q);
            beta_[leave] = entering_value;
            degenerate_run = best <= 1e-12 ? degenerate_run + 1 : 0;
            ++iterations_;
        }
    }

    std::size_t price(bool bland, int& dir) const {
        std::size_t q = kNonBasic;
        double score = 0.0;
        for (std::size_t j = 0; j < cols_; ++j) {
            if (row_of_[j] != kNonBasic || lb_[j] == ub_[j]) continue;
            const bool can_up = x_[j] < ub_[j];
            const bool can_down = x_[j] > lb_[j];
            int cand = 0;
            double s = 0.0;
            if (can_up && d_[j] < -opt_.opt_tol) {
                cand = 1;
                s = -d_[j];
            } else if (can_down && d_[j] > opt_.opt_tol) {
                cand = -1;
                s = d_[j];
            }
            if (cand == 0) continue;
            if (bland) {
                dir = cand;
                return j;
            }
            if (s > score) {
                score = s;
                q = j;
                dir = cand;
            }
        }
        return q;
    }

    void apply_step(std::size_t q, int dir, double theta) {
        if (theta == 0.0) return;
        for (std::size_t i = 0; i < m_; ++i) {
            const double alpha = t_[i * cols_ + q];
            if (alpha != 0.0) beta_[i] -= dir * theta * alpha;
        }
    }

    void pivot(std::size_t r, std::size_t q) {
        double* prow = &t_[r * cols_];
        const double inv = 1.0 / prow[q];
        nz_.clear();
        for (std::size_t j = 0; j < cols_; ++j) {
            if (prow[j] != 0.0) {
                prow[j] *= inv;
                nz_.push_back(j);
            }
        }
        prow[q] = 1.0;
        for (std::size_t i = 0; i < m_; ++i) {
            if (i == r) continue;
            double* row = &t_[i * cols_];
            const double f = row[q];
            if (f == 0.0) continue;
            for (std::size_t j : nz_) row[j] -= f * prow[j];
            row[q] = 0.0;
        }
        const double fd = d_[q];
        if (fd != 0.0) {
            for (std::size_t j : nz_) d_[j] -= fd * prow[j];
            d_[q] = 0.0;
        }
        row_of_[basis_[r]] = kNonBasic;
        basis_[r] = q;
        row_of_[q] = r;
    }

    void drive_out_artificials() {
        for (std::size_t i = 0; i < m_; ++i) {
            if (basis_[i] < first_art_) continue;
            std::size_t best = kNonBasic;
            double mag = 1e-7;
            for (std::size_t j = 0; j < first_art_; ++j) {
                if (row_of_[j] != kNonBasic) continue;
                const double a = std::abs(t_[i * cols_ + j]);
                if (a > mag) {
                    mag = a;
                    best = j;
                }
            }
            if (best == kNonBasic) continue;  // redundant row
            const std::size_t art = basis_[i];
            const double value = x_[best];
            // Degenerate pivot: the artificial sits at (numerically) zero.
            const double shift = beta_[i];
            const double alpha = t_[i * cols_ + best];
            if (shift != 0.0) {
                for (std::size_t k = 0; k < m_; ++k) {
                    const double a = t_[k * cols_ + best];
                    if (a != 0.0) beta_[k] -= shift * a / alpha;
                }
            }
            d_.assign(cols_, 0.0);
            pivot(i, best);
            beta_[i] = value + shift / alpha;
            x_[art] = 0.0;
        }
        for (std::size_t j = first_art_; j < cols_; ++j) {
            lb_[j] = 0.0;
            ub_[j] = 0.0;
            if (row_of_[j] == kNonBasic) x_[j] = 0.0;
        }
    }

    LpOptions opt_;
    std::size_t n_, m_, cols_ = 0, first_art_ = 0;
    std::vector<double> lb_, ub_, x_;
    std::vector<double> t_, beta_, d_;
    std::vector<std::size_t> basis_, row_of_, nz_;
    std::size_t iterations_ = 0;
    double infeas_tol_ = 1e-7;
};

}  // namespace

Solution solve_relaxation(const Model& model, std::span<const double> lower,
                          std::span<const double> upper, const LpOptions& options) {
    for (std::size_t j = 0; j < lower.size(); ++j) {
        if (lower[j] > upper[j] + options.feas_tol) {
            Solution sol;
            sol.status = Status::Infeasible;
            return sol;
        }
    }
    Tableau tableau(model, lower, upper, options);
    auto sol = tableau.run(model.objective());
    if (sol.status == Status::Optimal) {
        // Clamp round-off onto bounds so callers see exact bound containment.
        for (std::size_t j = 0; j < sol.values.size(); ++j) {
            sol.values[j] = std::clamp(sol.values[j], lower[j], upper[j]);
        }
        sol.objective = model.evaluate_objective(sol.values);
    }
    return sol;
}

Solution solve_lp(const Model& model, const LpOptions& options) {
    model.validate();
    std::vector<double> lower, upper;
    lower.reserve(model.num_variables());
    upper.reserve(model.num_variables());
    for (const auto& v : model.variables()) {
        lower.push_back(v.lower);
        upper.push_back(v.upper);
    }
    auto sol = solve_relaxation(model, lower, upper, options);
    sol.relaxation_bound = sol.objective;
    return sol;
}

}  // namespace inertia::milp
