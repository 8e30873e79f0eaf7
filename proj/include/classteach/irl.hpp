#pragma once

// Value-space inverse reinforcement learning.
//
// A demonstration D = {(s_n, a_n)} asserts that a_n is optimal in s_n. The
// learner solves
//
//     max 1'v   s.t.  (p(s_n, a_n) - p(s_n, b)) v >= eps   for all b != a_n
//                     0 <= v <= r_max / (1 - gamma)
//
// and recovers the reward as r = v - gamma * max_a P_a v, which makes v the
// optimal value function of r.

#include "classteach/linprog.hpp"
#include "classteach/mdp.hpp"

#include <algorithm>
#include <compare>
#include <initializer_list>
#include <sstream>
#include <string>
#include <vector>

namespace classteach {

struct StateAction {
    State state = 0;
    Action action = 0;
    friend auto operator<=>(const StateAction&, const StateAction&) = default;
};

/// Ordered set of (state, action) pairs. Duplicates are dropped on insertion;
/// first-insertion order is kept for reporting.
class Demonstration {
public:
    Demonstration() = default;
    Demonstration(std::initializer_list<StateAction> pairs) {
        for (const auto& p : pairs) add(p);
    }
    explicit Demonstration(const std::vector<StateAction>& pairs) {
        for (const auto& p : pairs) add(p);
    }

    /// Returns false when the pair was already present.
    bool add(StateAction p) {
        if (contains(p)) return false;
        pairs_.push_back(p);
        return true;
    }

    void add_all(const Demonstration& other) {
        for (const auto& p : other.pairs_) add(p);
    }

    bool contains(StateAction p) const { return std::find(pairs_.begin(), pairs_.end(), p) != pairs_.end(); }

    bool covers(State s) const {
        return std::any_of(pairs_.begin(), pairs_.end(), [s](const StateAction& p) { return p.state == s; });
    }

    Demonstration without(StateAction p) const {
        Demonstration out;
        for (const auto& q : pairs_)
            if (q != p) out.pairs_.push_back(q);
        return out;
    }

    std::size_t size() const { return pairs_.size(); }
    bool empty() const { return pairs_.empty(); }
    std::vector<StateAction>::const_iterator begin() const { return pairs_.begin(); }
    std::vector<StateAction>::const_iterator end() const { return pairs_.end(); }
    const std::vector<StateAction>& pairs() const { return pairs_; }

    friend bool operator==(const Demonstration&, const Demonstration&) = default;

private:
    std::vector<StateAction> pairs_;
};

inline Demonstration merge(const Demonstration& x, const Demonstration& y) {
    Demonstration out = x;
    out.add_all(y);
    return out;
}

inline std::string to_string(const Demonstration& d) {
    std::ostringstream out;
    out << "{";
    bool first = true;
    for (const auto& p : d) {
        out << (first ? "" : ",") << "(" << p.state << "," << p.action << ")";
        first = false;
    }
    out << "}";
    return out.str();
}

struct IRLConfig {
    double epsilon = 0.01;
    double r_max = 1.0;

    /// epsilon = 0.1 * r_max * (1 - gamma).
    static IRLConfig for_gamma(double gamma, double r_max = 1.0) { return {0.1 * r_max * (1.0 - gamma), r_max}; }
};

/// Linear inequalities G v >= eps induced by a demonstration; `source[i]` is
/// the demonstrated pair that produced row i.
struct ConstraintSet {
    Eigen::MatrixXd rows;
    std::vector<StateAction> source;

    Eigen::Index size() const { return rows.rows(); }
};

inline void validate_demo(const RewardlessMDP& m, const Demonstration& d) {
    for (const auto& p : d)
        if (!m.valid_state(p.state) || !m.valid_action(p.action))
            throw ContractViolation("demonstration pair (" + std::to_string(p.state) + "," +
                                    std::to_string(p.action) + ") out of range");
}

/// One row (p(s,a) - p(s,b)) per demonstrated pair and competitor b; all-zero rows are dropped.
inline ConstraintSet constraints_from_demo(const RewardlessMDP& m, const Demonstration& d) {
    validate_demo(m, d);
    ConstraintSet out{Eigen::MatrixXd(0, m.n_states()), {}};
    std::vector<Eigen::RowVectorXd> rows;
    for (const auto& p : d) {
        for (Action b = 0; b < m.n_actions(); ++b) {
            if (b == p.action) continue;
            Eigen::RowVectorXd g = m.row(p.state, p.action) - m.row(p.state, b);
            if (g.cwiseAbs().maxCoeff() == 0.0) continue;
            rows.push_back(std::move(g));
            out.source.push_back(p);
        }
    }
    out.rows.resize(static_cast<Eigen::Index>(rows.size()), m.n_states());
    for (std::size_t i = 0; i < rows.size(); ++i) out.rows.row(static_cast<Eigen::Index>(i)) = rows[i];
    return out;
}

inline double value_ceiling(const RewardlessMDP& m, const IRLConfig& cfg) { return cfg.r_max / (1.0 - m.gamma()); }

inline void validate_config(const RewardlessMDP& m, const IRLConfig& cfg) {
    if (!(cfg.r_max > 0.0)) throw ContractViolation("r_max must be positive");
    if (!(cfg.epsilon > 0.0)) throw ContractViolation("epsilon must be positive");
    if (!(cfg.epsilon < value_ceiling(m, cfg)))
        throw ContractViolation("epsilon must be below r_max / (1 - gamma) = " + std::to_string(value_ceiling(m, cfg)));
}

/// The learner's linear program for demonstration d.
inline LinearProgram irl_program(const RewardlessMDP& m, const Demonstration& d, const IRLConfig& cfg) {
    validate_config(m, cfg);
    const ConstraintSet cs = constraints_from_demo(m, d);
    const auto n = m.n_states();
    return {Eigen::VectorXd::Ones(n), cs.rows, Eigen::VectorXd::Constant(cs.size(), cfg.epsilon),
            Eigen::VectorXd::Zero(n), Eigen::VectorXd::Constant(n, value_ceiling(m, cfg))};
}

/// r = v - gamma * max_a P_a v.
inline Reward recover_reward(const RewardlessMDP& m, const ValueFunction& v) {
    Eigen::MatrixXd next(m.n_states(), m.n_actions());
    for (Action a = 0; a < m.n_actions(); ++a) next.col(a) = m.transition(a) * v;
    return v - m.gamma() * next.rowwise().maxCoeff();
}

struct IRLResult {
    ValueFunction value;
    Reward reward;
    bool feasible = false;
};

/// Solves the learner's LP. An infeasible program (a demonstration that
/// contradicts this learner's dynamics) is reported, not repaired.
inline IRLResult irl_solve(const RewardlessMDP& m, const Demonstration& d, const IRLConfig& cfg,
                           double feas_tol = kDefaultFeasTol) {
    const LPSolution sol = solve_lp(irl_program(m, d, cfg), feas_tol);
    if (sol.status != LPStatus::optimal) return {ValueFunction(), Reward(), false};
    ValueFunction v = *sol.point;
    Reward r = recover_reward(m, v);
    return {std::move(v), std::move(r), true};
}

/// Optimal-action sets of the learner under its recovered reward.
inline OptimalActionSets learned_policy(const RewardlessMDP& m, const IRLResult& res,
                                        double tie_tol = kDefaultTieTol) {
    if (!res.feasible) throw ContractViolation("learned_policy requires a feasible IRL result");
    return solve_optimal(m, res.reward, kDefaultValueTol, tie_tol).action_sets;
}

} // namespace classteach
