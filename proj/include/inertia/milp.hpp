#pragma once

// Solver-independent MILP representation and the built-in exact solver:
// bounded primal simplex for relaxations, best-first branch-and-bound for
// integer variables.

#include <cstddef>
#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

namespace inertia::milp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class VarKind { Continuous, Integer };
enum class Relation { LessEqual, Equal, GreaterEqual };

struct Term {
    std::size_t var;
    double coef;
};

struct Variable {
    std::string name;
    VarKind kind = VarKind::Continuous;
    double lower = 0.0;
    double upper = kInf;
};

struct Constraint {
    std::string name;
    std::vector<Term> terms;
    Relation relation = Relation::LessEqual;
    double rhs = 0.0;
};

/// Minimisation model. Built incrementally; treat as immutable once handed to
/// a solver.
class Model {
public:
    std::size_t add_variable(std::string name, VarKind kind, double lower, double upper,
                             double objective = 0.0);
    std::size_t add_constraint(std::string name, std::vector<Term> terms, Relation relation,
                               double rhs);
    void set_objective(std::size_t var, double coef);
    void add_objective(std::size_t var, double coef);
    void set_bounds(std::size_t var, double lower, double upper);

    const std::vector<Variable>& variables() const { return variables_; }
    const std::vector<Constraint>& constraints() const { return constraints_; }
    const std::vector<double>& objective() const { return objective_; }
    std::size_t num_variables() const { return variables_.size(); }
    std::size_t num_constraints() const { return constraints_.size(); }
    std::size_t num_integer() const;

    /// Throws inertia::Error on dangling ids, NaN coefficients, crossed bounds
    /// or unbounded integer variables.
    void validate() const;

    double evaluate_objective(const std::vector<double>& x) const;
    /// Largest absolute violation over rows and bounds.
    double max_violation(const std::vector<double>& x) const;

private:
    std::vector<Variable> variables_;
    std::vector<Constraint> constraints_;
    std::vector<double> objective_;
};

enum class Status { Optimal, Infeasible, Unbounded, GapLimit };

const char* to_string(Status s);

struct Solution {
    Status status = Status::Infeasible;
    double objective = 0.0;
    std::vector<double> values;
    double gap = 0.0;
    std::size_t iterations = 0;   // simplex pivots, summed over B&B nodes
    std::size_t nodes = 0;        // branch-and-bound nodes solved
    double relaxation_bound = 0.0;  // root relaxation objective
};

struct LpOptions {
    double pivot_tol = 1e-9;
    double feas_tol = 1e-9;
    double opt_tol = 1e-9;
    std::size_t max_iterations = 200000;
    /// Consecutive degenerate pivots before switching to Bland's rule.
    std::size_t degenerate_switch = 50;
};

/// Solves the continuous relaxation (integrality ignored).
Solution solve_lp(const Model& model, const LpOptions& options = {});

struct MilpOptions {
    double gap_tol = 1e-6;
    std::size_t node_limit = 100000;
    double integrality_tol = 1e-6;
    LpOptions lp;
};

Solution solve_milp(const Model& model, const MilpOptions& options = {});

/// CPLEX-style LP text, readable by common external solvers.
void write_lp_format(const Model& model, std::ostream& out);

}  // namespace inertia::milp
