#include "inertia/domain.hpp"
#include "inertia/milp.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <ostream>

namespace inertia::milp {

std::size_t Model::add_variable(std::string name, VarKind kind, double lower, double upper,
                                double objective) {
    variables_.push_back({std::move(name), kind, lower, upper});
    objective_.push_back(objective);
    return variables_.size() - 1;
}

std::size_t Model::add_constraint(std::string name, std::vector<Term> terms, Relation relation,
                                  double rhs) {
    constraints_.push_back({std::move(name), std::move(terms), relation, rhs});
    return constraints_.size() - 1;
}

void Model::set_objective(std::size_t var, double coef) { objective_.at(var) = coef; }
void Model::add_objective(std::size_t var, double coef) { objective_.at(var) += coef; }

void Model::set_bounds(std::size_t var, double lower, double upper) {
    auto& v = variables_.at(var);
    v.lower = lower;
    v.upper = upper;
}

std::size_t Model::num_integer() const {
    return static_cast<std::size_t>(std::count_if(variables_.begin(), variables_.end(), [](const auto& v) {
        return v.kind == VarKind::Integer;
    }));
}

void Model::validate() const {
    for (std::size_t j = 0; j < variables_.size(); ++j) {
        const auto& v = variables_[j];
        if (std::isnan(v.lower) || std::isnan(v.upper) || v.lower > v.upper) {
            throw Error("variable '" + v.name + "' has invalid bounds", v.name);
        }
        if (v.kind == VarKind::Integer && (!std::isfinite(v.lower) || !std::isfinite(v.upper))) {
            throw Error("integer variable '" + v.name + "' needs finite bounds", v.name);
        }
        if (!std::isfinite(objective_[j])) {
            throw Error("objective coefficient of '" + v.name + "' is not finite", v.name);
        }
    }
    for (const auto& c : constraints_) {
        if (!std::isfinite(c.rhs)) throw Error("constraint '" + c.name + "' has non-finite rhs", c.name);
        for (const auto& t : c.terms) {
            if (t.var >= variables_.size()) {
                throw Error("constraint '" + c.name + "' references unknown variable", c.name);
            }
            if (!std::isfinite(t.coef)) {
                throw Error("constraint '" + c.name + "' has non-finite coefficient", c.name);
            }
        }
    }
}

double Model::evaluate_objective(const std::vector<double>& x) const {
    double sum = 0.0;
    for (std::size_t j = 0; j < objective_.size(); ++j) sum += objective_[j] * x[j];
    return sum;
}

double Model::max_violation(const std::vector<double>& x) const {
    double worst = 0.0;
    for (std::size_t j = 0; j < variables_.size(); ++j) {
        worst = std::max({worst, variables_[j].lower - x[j], x[j] - variables_[j].upper});
    }
    for (const auto& c : constraints_) {
        double lhs = 0.0;
        for (const auto& t : c.terms) lhs += t.coef * x[t.var];
        switch (c.relation) {
            case Relation::LessEqual: worst = std::max(worst, lhs - c.rhs); break;
            case Relation::GreaterEqual: worst = std::max(worst, c.rhs - lhs); break;
            case Relation::Equal: worst = std::max(worst, std::abs(lhs - c.rhs)); break;
        }
    }
    return worst;
}

const char* to_string(Status s) {
    switch (s) {
        case Status::Optimal: return "optimal";
        case Status::Infeasible: return "infeasible";
        case Status::Unbounded: return "unbounded";
        case Status::GapLimit: return "gap_limit";
    }
    return "unknown";
}

namespace {

std::string lp_name(const std::string& raw, char prefix, std::size_t index) {
    std::string out;
    for (char ch : raw) {
        out += (std::isalnum(static_cast<unsigned char>(ch)) || ch == '_' || ch == '.') ? ch : '_';
    }
    if (out.empty() || std::isdigit(static_cast<unsigned char>(out.front())) || out.front() == '.') {
        out = std::string(1, prefix) + std::to_string(index) + "_" + out;
    }
    return out;
}

void write_coef(std::ostream& out, double coef, const std::string& name, bool first) {
    if (coef < 0) {
        out << (first ? "- " : " - ");
    } else if (!first) {
        out << " + ";
    }
    out << std::abs(coef) << ' ' << name;
}

}  // namespace

void write_lp_format(const Model& model, std::ostream& out) {
    const auto old_precision = out.precision(17);
    std::vector<std::string> names;
    names.reserve(model.num_variables());
    for (std::size_t j = 0; j < model.num_variables(); ++j) {
        names.push_back(lp_name(model.variables()[j].name, 'x', j));
    }

    out << "\\ inertia SUC model: " << model.num_variables() << " variables, "
        << model.num_constraints() << " constraints\n";
    out << "Minimize\n obj:";
    bool first = true;
    for (std::size_t j = 0; j < model.num_variables(); ++j) {
        if (model.objective()[j] == 0.0) continue;
        out << ' ';
        write_coef(out, model.objective()[j], names[j], first);
        first = false;
    }
    if (first) out << " 0 " << names.front();
    out << "\nSubject To\n";
    for (std::size_t i = 0; i < model.num_constraints(); ++i) {
        const auto& c = model.constraints()[i];
        out << ' ' << lp_name(c.name, 'c', i) << ':';
        bool first_term = true;
        for (const auto& t : c.terms) {
            if (t.coef == 0.0) continue;
            out << ' ';
            write_coef(out, t.coef, names[t.var], first_term);
            first_term = false;
        }
        if (first_term) out << " 0 " << names.front();
        switch (c.relation) {
            case Relation::LessEqual: out << " <= "; break;
            case Relation::GreaterEqual: out << " >= "; break;
            case Relation::Equal: out << " = "; break;
        }
        out << c.rhs << '\n';
    }
    out << "Bounds\n";
    for (std::size_t j = 0; j < model.num_variables(); ++j) {
        const auto& v = model.variables()[j];
        const bool lo = std::isfinite(v.lower);
        const bool hi = std::isfinite(v.upper);
        if (!lo && !hi) {
            out << ' ' << names[j] << " free\n";
        } else if (lo && hi && v.lower == v.upper) {
            out << ' ' << names[j] << " = " << v.lower << '\n';
        } else {
            out << ' ' << (lo ? "" : "-inf <= ");
            if (lo) out << v.lower << " <= ";
            out << names[j];
            if (hi) out << " <= " << v.upper;
            out << '\n';
        }
    }
    bool any_int = false;
    for (std::size_t j = 0; j < model.num_variables(); ++j) {
        if (model.variables()[j].kind != VarKind::Integer) continue;
        if (!any_int) out << "General\n";
        any_int = true;
        out << ' ' << names[j] << '\n';
    }
    out << "End\n";
    out.precision(old_precision);
}

}  // namespace inertia::milp
