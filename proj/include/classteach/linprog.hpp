#pragma once

// Dense two-phase tableau simplex for
//
//     maximize    c . v
//     subject to  G v >= h,   lower <= v <= upper
//
// Bland's rule is used for both the entering and the leaving variable, so the
// returned vertex is a deterministic function of the input.

#include "classteach/errors.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace classteach {

inline constexpr double kDefaultFeasTol = 1e-9;
inline constexpr double kPivotTol = 1e-12;

struct LinearProgram {
    Eigen::VectorXd objective;
    Eigen::MatrixXd inequalities; // G
    Eigen::VectorXd rhs;          // h
    Eigen::VectorXd lower_bounds;
    Eigen::VectorXd upper_bounds;

    Eigen::Index n_variables() const { return objective.size(); }
    Eigen::Index n_rows() const { return inequalities.rows(); }

    /// Box-only program with n variables in [lower, upper].
    static LinearProgram box(Eigen::VectorXd objective, double lower, double upper) {
        const auto n = objective.size();
        return {std::move(objective), Eigen::MatrixXd(0, n), Eigen::VectorXd(0),
                Eigen::VectorXd::Constant(n, lower), Eigen::VectorXd::Constant(n, upper)};
    }

    void add_row(const Eigen::RowVectorXd& g, double h) {
        if (g.size() != n_variables()) throw ContractViolation("constraint row has wrong length");
        inequalities.conservativeResize(n_rows() + 1, n_variables());
        inequalities.row(n_rows() - 1) = g;
        rhs.conservativeResize(rhs.size() + 1);
        rhs(rhs.size() - 1) = h;
    }

    LinearProgram without_row(Eigen::Index k) const {
        LinearProgram out{objective, Eigen::MatrixXd(n_rows() - 1, n_variables()), Eigen::VectorXd(n_rows() - 1),
                          lower_bounds, upper_bounds};
        for (Eigen::Index i = 0, j = 0; i < n_rows(); ++i) {
            if (i == k) continue;
            out.inequalities.row(j) = inequalities.row(i);
            out.rhs(j++) = rhs(i);
        }
        return out;
    }
};

enum class LPStatus { optimal, infeasible, unbounded };

inline const char* to_string(LPStatus s) {
    switch (s) {
    case LPStatus::optimal: return "optimal";
    case LPStatus::infeasible: return "infeasible";
    case LPStatus::unbounded: return "unbounded";
    }
    return "?";
}

struct LPSolution {
    LPStatus status = LPStatus::infeasible;
    std::optional<Eigen::VectorXd> point;
    std::optional<double> objective_value;
};

/// Pivot breakdown; carries the basis at the time of failure.
class SimplexBreakdown : public SolverFailure {
public:
    SimplexBreakdown(const std::string& what, std::vector<int> basis)
        : SolverFailure(what), basis_(std::move(basis)) {}
    const std::vector<int>& basis() const { return basis_; }

private:
    std::vector<int> basis_;
};

namespace detail {

class Tableau {
public:
    // rows: a_i . x <= b_i, x >= 0.
    Tableau(const Eigen::MatrixXd& a, const Eigen::VectorXd& b) : m_(a.rows()), n_(a.cols()) {
        n_artificial_ = 0;
        for (Eigen::Index i = 0; i < m_; ++i)
            if (b(i) < 0.0) ++n_artificial_;
        cols_ = n_ + m_ + n_artificial_;
        t_ = Eigen::MatrixXd::Zero(m_, cols_ + 1);
        basis_.resize(static_cast<std::size_t>(m_));
        Eigen::Index art = n_ + m_;
        for (Eigen::Index i = 0; i < m_; ++i) {
            const double sign = b(i) < 0.0 ? -1.0 : 1.0;
            t_.row(i).head(n_) = sign * a.row(i);
            t_(i, n_ + i) = sign;
            t_(i, cols_) = sign * b(i);
            if (b(i) < 0.0) {
                t_(i, art) = 1.0;
                basis_[static_cast<std::size_t>(i)] = static_cast<int>(art++);
            } else {
                basis_[static_cast<std::size_t>(i)] = static_cast<int>(n_ + i);
            }
        }
    }

    Eigen::Index columns() const { return cols_; }
    Eigen::Index first_artificial() const { return n_ + m_; }
    bool has_artificials() const { return n_artificial_ > 0; }

    enum class Outcome { optimal, unbounded };

    // Maximizes cost . z over the current tableau; columns >= allowed_cols never enter.
    Outcome maximize(const Eigen::VectorXd& cost, Eigen::Index allowed_cols) {
        constexpr double opt_tol = 1e-10;
        for (int iter = 0; iter < 100000; ++iter) {
            Eigen::Index entering = -1;
            for (Eigen::Index j = 0; j < allowed_cols && entering < 0; ++j) {
                if (is_basic(j)) continue;
                double reduced = cost(j);
                for (Eigen::Index i = 0; i < m_; ++i) reduced -= cost(basis_[static_cast<std::size_t>(i)]) * t_(i, j);
                if (reduced > opt_tol) entering = j;
            }
            if (entering < 0) return Outcome::optimal;

            Eigen::Index leaving = -1;
            double best_ratio = std::numeric_limits<double>::infinity();
            bool tiny_pivot = false;
            for (Eigen::Index i = 0; i < m_; ++i) {
                const double coef = t_(i, entering);
                if (coef <= 0.0) continue;
                if (coef <= kPivotTol) {
                    tiny_pivot = true;
                    continue;
                }
                const double ratio = std::max(t_(i, cols_), 0.0) / coef;
                const bool better = ratio < best_ratio - 1e-12;
                const bool tie = !better && ratio <= best_ratio + 1e-12 &&
                                 basis_[static_cast<std::size_t>(i)] < basis_[static_cast<std::size_t>(leaving)];
                if (leaving < 0 || better || tie) {
                    leaving = i;
                    best_ratio = std::min(best_ratio, ratio);
                }
            }
            if (leaving < 0) {
                if (tiny_pivot)
                    throw SimplexBreakdown("simplex pivot below " + std::to_string(kPivotTol) +
                                               " with no alternative (entering column " +
                                               std::to_string(entering) + ")",
                                           basis_);
                return Outcome::unbounded;
            }
            pivot(leaving, entering);
        }
        throw SimplexBreakdown("simplex iteration limit reached", basis_);
    }

    // After phase one: pivot zero-valued artificials out of the basis where possible.
    void drive_out_artificials() {
        for (Eigen::Index i = 0; i < m_; ++i) {
            if (basis_[static_cast<std::size_t>(i)] < first_artificial()) continue;
            for (Eigen::Index j = 0; j < first_artificial(); ++j) {
                if (!is_basic(j) && std::abs(t_(i, j)) > kPivotTol) {
                    pivot(i, j);
                    break;
                }
            }
        }
    }

    double objective(const Eigen::VectorXd& cost) const {
        double value = 0.0;
        for (Eigen::Index i = 0; i < m_; ++i) value += cost(basis_[static_cast<std::size_t>(i)]) * t_(i, cols_);
        return value;
    }

    Eigen::VectorXd primal(Eigen::Index n) const {
        Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
        for (Eigen::Index i = 0; i < m_; ++i) {
            const int var = basis_[static_cast<std::size_t>(i)];
            if (var < n) x(var) = t_(i, cols_);
        }
        return x;
    }

private:
    bool is_basic(Eigen::Index j) const {
        for (int b : basis_)
            if (b == j) return true;
        return false;
    }

    void pivot(Eigen::Index row, Eigen::Index col) {
        t_.row(row) /= t_(row, col);
        for (Eigen::Index i = 0; i < m_; ++i) {
            if (i == row) continue;
            const double factor = t_(i, col);
            if (factor != 0.0) t_.row(i) -= factor * t_.row(row);
        }
        basis_[static_cast<std::size_t>(row)] = static_cast<int>(col);
    }

    Eigen::Index m_, n_, n_artificial_ = 0, cols_ = 0;
    Eigen::MatrixXd t_;
    std::vector<int> basis_;
};

inline void validate(const LinearProgram& lp) {
    const auto n = lp.n_variables();
    if (lp.inequalities.cols() != n && lp.n_rows() > 0)
        throw ContractViolation("constraint matrix column count does not match the objective");
    if (lp.rhs.size() != lp.n_rows()) throw ContractViolation("right-hand side length does not match rows");
    if (lp.lower_bounds.size() != n || lp.upper_bounds.size() != n)
        throw ContractViolation("bound vectors do not match the variable count");
    if (!lp.objective.allFinite() || !lp.inequalities.allFinite() || !lp.rhs.allFinite())
        throw ContractViolation("linear program has non-finite coefficients");
    for (Eigen::Index j = 0; j < n; ++j) {
        if (!std::isfinite(lp.lower_bounds(j)))
            throw ContractViolation("lower bound of variable " + std::to_string(j) + " must be finite");
        if (std::isnan(lp.upper_bounds(j)) || lp.lower_bounds(j) > lp.upper_bounds(j))
            throw ContractViolation("bounds of variable " + std::to_string(j) + " are inconsistent");
    }
}

} // namespace detail

/// Vertex-optimal solution of a box-bounded LP. An infinite upper bound is
/// accepted and is the only way to obtain LPStatus::unbounded.
inline LPSolution solve_lp(const LinearProgram& lp, double feas_tol = kDefaultFeasTol) {
    detail::validate(lp);
    if (!(feas_tol > 0.0)) throw ContractViolation("feasibility tolerance must be positive");

    const auto n = lp.n_variables();
    const Eigen::VectorXd& lower = lp.lower_bounds;
    const Eigen::VectorXd span = lp.upper_bounds - lower;

    // Shift x = v - lower, so x >= 0; write everything as a . x <= b.
    Eigen::Index finite_upper = 0;
    for (Eigen::Index j = 0; j < n; ++j)
        if (std::isfinite(span(j))) ++finite_upper;
    const Eigen::Index m = lp.n_rows() + finite_upper;
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(m, n);
    Eigen::VectorXd b(m);
    if (lp.n_rows() > 0) {
        a.topRows(lp.n_rows()) = -lp.inequalities;
        b.head(lp.n_rows()) = -(lp.rhs - lp.inequalities * lower);
    }
    for (Eigen::Index j = 0, i = lp.n_rows(); j < n; ++j) {
        if (!std::isfinite(span(j))) continue;
        a(i, j) = 1.0;
        b(i++) = span(j);
    }

    detail::Tableau tableau(a, b);
    const auto cols = tableau.columns();

    if (tableau.has_artificials()) {
        Eigen::VectorXd phase1 = Eigen::VectorXd::Zero(cols);
        phase1.tail(cols - tableau.first_artificial()).setConstant(-1.0);
        tableau.maximize(phase1, cols);
        if (tableau.objective(phase1) < -feas_tol) return {LPStatus::infeasible, std::nullopt, std::nullopt};
        tableau.drive_out_artificials();
    }

    Eigen::VectorXd phase2 = Eigen::VectorXd::Zero(cols);
    phase2.head(n) = lp.objective;
    if (tableau.maximize(phase2, tableau.first_artificial()) == detail::Tableau::Outcome::unbounded) {
        if (finite_upper == n)
            throw SolverFailure("simplex reported an unbounded direction on a bounded program");
        return {LPStatus::unbounded, std::nullopt, std::nullopt};
    }

    Eigen::VectorXd v = lower + tableau.primal(n);
    v = v.cwiseMax(lp.lower_bounds).cwiseMin(lp.upper_bounds);
    const double value = lp.objective.dot(v);
    return {LPStatus::optimal, std::move(v), value};
}

/// True iff row `row_index` of G is implied by the other rows and the box:
/// the maximal violation h_k - g_k . v over the remaining region is <= feas_tol.
inline bool is_redundant(Eigen::Index row_index, const LinearProgram& lp, double feas_tol = kDefaultFeasTol) {
    if (row_index < 0 || row_index >= lp.n_rows())
        throw ContractViolation("row index " + std::to_string(row_index) + " out of range");
    LinearProgram probe = lp.without_row(row_index);
    probe.objective = -lp.inequalities.row(row_index).transpose();
    const LPSolution sol = solve_lp(probe, feas_tol);
    switch (sol.status) {
    case LPStatus::infeasible: return true;
    case LPStatus::unbounded: return false;
    case LPStatus::optimal: break;
    }
    const double max_violation = lp.rhs(row_index) + *sol.objective_value;
    return max_violation <= feas_tol;
}

} // namespace classteach
