#pragma once

// Finite rewardless MDPs with state-based rewards.
//
// Reward convention: V(s) = E[ sum_t gamma^t r(S_t) | S_0 = s ], so r(S_0) is
// collected at t = 0 and Q(s, a) = r(s) + gamma * P_a(s, .) v.

#include "classteach/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace classteach {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Per-state reward r(s).
using Reward = Vector;
/// Per-state value V(s).
using ValueFunction = Vector;

using State = int;
using Action = int;

inline constexpr double kStochasticTol = 1e-12;
inline constexpr double kDefaultTieTol = 1e-8;
inline constexpr double kDefaultValueTol = 1e-10;

/// (S, A, P, gamma). One row-stochastic |S| x |S| matrix per action.
class RewardlessMDP {
public:
    RewardlessMDP(std::vector<Matrix> transitions, double gamma)
        : transitions_(std::move(transitions)), gamma_(gamma) {
        if (transitions_.empty()) throw ContractViolation("MDP needs at least one action");
        const auto n = transitions_.front().rows();
        if (n < 1) throw ContractViolation("MDP needs at least one state");
        if (!(gamma_ >= 0.0 && gamma_ < 1.0))
            throw ContractViolation("discount must lie in [0, 1), got " + std::to_string(gamma_));
        for (std::size_t a = 0; a < transitions_.size(); ++a) {
            const Matrix& p = transitions_[a];
            if (p.rows() != n || p.cols() != n)
                throw ContractViolation("transition matrix of action " + std::to_string(a) +
                                        " is not " + std::to_string(n) + "x" + std::to_string(n));
            for (Eigen::Index s = 0; s < n; ++s) {
                double sum = 0.0;
                for (Eigen::Index t = 0; t < n; ++t) {
                    const double x = p(s, t);
                    if (!std::isfinite(x) || x < 0.0 || x > 1.0)
                        throw ContractViolation(location(s, a) + " has probability outside [0,1]");
                    sum += x;
                }
                if (std::abs(sum - 1.0) > kStochasticTol)
                    throw ContractViolation(location(s, a) + " sums to " + std::to_string(sum));
            }
        }
    }

    int n_states() const { return static_cast<int>(transitions_.front().rows()); }
    int n_actions() const { return static_cast<int>(transitions_.size()); }
    double gamma() const { return gamma_; }

    const Matrix& transition(Action a) const { return transitions_.at(static_cast<std::size_t>(a)); }
    const std::vector<Matrix>& transitions() const { return transitions_; }

    /// P(. | s, a) as a row vector.
    auto row(State s, Action a) const { return transition(a).row(s); }

    /// Every action self-loops with probability one.
    bool is_absorbing(State s) const {
        for (const auto& p : transitions_)
            if (p(s, s) != 1.0) return false;
        return true;
    }

    bool valid_state(State s) const { return s >= 0 && s < n_states(); }
    bool valid_action(Action a) const { return a >= 0 && a < n_actions(); }

    friend bool operator==(const RewardlessMDP& x, const RewardlessMDP& y) {
        if (x.gamma_ != y.gamma_ || x.transitions_.size() != y.transitions_.size()) return false;
        for (std::size_t a = 0; a < x.transitions_.size(); ++a) {
            if (x.transitions_[a].rows() != y.transitions_[a].rows()) return false;
            if (x.transitions_[a] != y.transitions_[a]) return false;
        }
        return true;
    }

private:
    static std::string location(Eigen::Index s, std::size_t a) {
        return "row (state " + std::to_string(s) + ", action " + std::to_string(a) + ")";
    }

    std::vector<Matrix> transitions_;
    double gamma_;
};

/// Per-state sets of actions judged optimal; each set is sorted, unique and nonempty.
class OptimalActionSets {
public:
    OptimalActionSets() = default;

    OptimalActionSets(std::vector<std::vector<Action>> sets, int n_actions) : sets_(std::move(sets)) {
        for (std::size_t s = 0; s < sets_.size(); ++s) {
            auto& set = sets_[s];
            if (set.empty())
                throw ContractViolation("empty optimal-action set at state " + std::to_string(s));
            std::sort(set.begin(), set.end());
            set.erase(std::unique(set.begin(), set.end()), set.end());
            if (set.front() < 0 || set.back() >= n_actions)
                throw ContractViolation("action out of range at state " + std::to_string(s));
        }
    }

    int n_states() const { return static_cast<int>(sets_.size()); }
    const std::vector<Action>& at(State s) const { return sets_.at(static_cast<std::size_t>(s)); }

    bool contains(State s, Action a) const {
        const auto& set = at(s);
        return std::binary_search(set.begin(), set.end(), a);
    }

    /// Per-state set inclusion.
    bool is_subset_of(const OptimalActionSets& other) const {
        if (other.n_states() != n_states())
            throw ContractViolation("action-set state counts differ");
        for (State s = 0; s < n_states(); ++s)
            if (!std::includes(other.at(s).begin(), other.at(s).end(), at(s).begin(), at(s).end()))
                return false;
        return true;
    }

    friend bool operator==(const OptimalActionSets&, const OptimalActionSets&) = default;

private:
    std::vector<std::vector<Action>> sets_;
};

/// Stochastic policy pi(a | s) stored as an |S| x |A| matrix.
class Policy {
public:
    explicit Policy(Matrix probabilities) : probs_(std::move(probabilities)) {
        for (Eigen::Index s = 0; s < probs_.rows(); ++s) {
            for (Eigen::Index a = 0; a < probs_.cols(); ++a)
                if (!std::isfinite(probs_(s, a)) || probs_(s, a) < 0.0)
                    throw ContractViolation("negative policy probability at state " + std::to_string(s));
            if (std::abs(probs_.row(s).sum() - 1.0) > kStochasticTol)
                throw ContractViolation("policy distribution at state " + std::to_string(s) +
                                        " does not sum to 1");
        }
    }

    static Policy deterministic(std::span<const Action> choice, int n_actions) {
        Matrix p = Matrix::Zero(static_cast<Eigen::Index>(choice.size()), n_actions);
        for (std::size_t s = 0; s < choice.size(); ++s) {
            if (choice[s] < 0 || choice[s] >= n_actions)
                throw ContractViolation("policy action out of range at state " + std::to_string(s));
            p(static_cast<Eigen::Index>(s), choice[s]) = 1.0;
        }
        return Policy(std::move(p));
    }

    /// Uniform mixture over each state's optimal set.
    static Policy uniform_over(const OptimalActionSets& sets, int n_actions) {
        Matrix p = Matrix::Zero(sets.n_states(), n_actions);
        for (State s = 0; s < sets.n_states(); ++s) {
            const auto& set = sets.at(s);
            for (Action a : set) p(s, a) = 1.0 / static_cast<double>(set.size());
        }
        return Policy(std::move(p));
    }

    int n_states() const { return static_cast<int>(probs_.rows()); }
    int n_actions() const { return static_cast<int>(probs_.cols()); }
    double operator()(State s, Action a) const { return probs_(s, a); }
    const Matrix& probabilities() const { return probs_; }

private:
    Matrix probs_;
};

namespace detail {

inline void require_reward(const RewardlessMDP& m, const Vector& r, const char* what) {
    if (r.size() != m.n_states())
        throw ContractViolation(std::string(what) + " has length " + std::to_string(r.size()) +
                                ", expected " + std::to_string(m.n_states()));
}

inline void require_policy(const RewardlessMDP& m, const Policy& pi) {
    if (pi.n_states() != m.n_states() || pi.n_actions() != m.n_actions())
        throw ContractViolation("policy dimensions do not match the MDP");
}

} // namespace detail

/// [P_pi]_{ss'} = sum_a pi(a|s) P(s'|s,a).
inline Matrix policy_matrix(const RewardlessMDP& m, const Policy& pi) {
    detail::require_policy(m, pi);
    Matrix p = Matrix::Zero(m.n_states(), m.n_states());
    for (Action a = 0; a < m.n_actions(); ++a)
        p += pi.probabilities().col(a).asDiagonal() * m.transition(a);
    return p;
}

/// Solves (I - gamma P_pi) v = r directly.
inline ValueFunction evaluate_policy(const RewardlessMDP& m, const Reward& r, const Policy& pi) {
    detail::require_reward(m, r, "reward");
    const Matrix system = Matrix::Identity(m.n_states(), m.n_states()) - m.gamma() * policy_matrix(m, pi);
    return system.partialPivLu().solve(r);
}

/// Q(s, a) = r(s) + gamma * P_a(s, .) v, as an |S| x |A| matrix.
inline Matrix q_values(const RewardlessMDP& m, const Reward& r, const ValueFunction& v) {
    detail::require_reward(m, r, "reward");
    detail::require_reward(m, v, "value function");
    Matrix q(m.n_states(), m.n_actions());
    for (Action a = 0; a < m.n_actions(); ++a) q.col(a) = r + m.gamma() * (m.transition(a) * v);
    return q;
}

/// Actions whose Q-value is within tie_tol of the state's maximum.
inline OptimalActionSets action_sets_from_q(const Matrix& q, double tie_tol) {
    std::vector<std::vector<Action>> sets(static_cast<std::size_t>(q.rows()));
    for (Eigen::Index s = 0; s < q.rows(); ++s) {
        const double best = q.row(s).maxCoeff();
        for (Eigen::Index a = 0; a < q.cols(); ++a)
            if (q(s, a) >= best - tie_tol) sets[static_cast<std::size_t>(s)].push_back(static_cast<Action>(a));
    }
    return OptimalActionSets(std::move(sets), static_cast<int>(q.cols()));
}

struct OptimalSolution {
    ValueFunction values;
    OptimalActionSets action_sets;
    /// Greedy deterministic policy (lowest-index action among the optimal set).
    std::vector<Action> greedy;
};

/// Value iteration to a sup-norm residual of tol * (1 - gamma) / (2 gamma),
/// followed by exact policy-evaluation/improvement sweeps until the greedy
/// policy is stable. Final values always come from a direct linear solve.
inline OptimalSolution solve_optimal(const RewardlessMDP& m, const Reward& r, double tol = kDefaultValueTol,
                                     double tie_tol = kDefaultTieTol) {
    detail::require_reward(m, r, "reward");
    if (!(tol > 0.0)) throw ContractViolation("value-iteration tolerance must be positive");
    if (!(tie_tol >= 0.0)) throw ContractViolation("tie tolerance must be nonnegative");

    const double gamma = m.gamma();
    const int n = m.n_states();
    ValueFunction v = ValueFunction::Zero(n);
    if (gamma > 0.0) {
        const double threshold = tol * (1.0 - gamma) / (2.0 * gamma);
        for (int it = 0; it < 10'000'000; ++it) {
            const ValueFunction next = q_values(m, r, v).rowwise().maxCoeff();
            const double residual = (next - v).lpNorm<Eigen::Infinity>();
            v = next;
            if (residual <= threshold) break;
        }
    }

    std::vector<Action> greedy(static_cast<std::size_t>(n));
    Matrix q = q_values(m, r, v);
    for (State s = 0; s < n; ++s) q.row(s).maxCoeff(&greedy[static_cast<std::size_t>(s)]);

    // Policy-iteration polish; each switch strictly improves, so this terminates.
    const int max_sweeps = 1 + n * m.n_actions();
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        v = evaluate_policy(m, r, Policy::deterministic(greedy, m.n_actions()));
        q = q_values(m, r, v);
        const double improve_tol = 1e-12 * (1.0 + v.lpNorm<Eigen::Infinity>());
        bool changed = false;
        for (State s = 0; s < n; ++s) {
            auto& current = greedy[static_cast<std::size_t>(s)];
            Eigen::Index best = 0;
            const double best_q = q.row(s).maxCoeff(&best);
            if (best_q > q(s, current) + improve_tol) {
                current = static_cast<Action>(best);
                changed = true;
            }
        }
        if (!changed) break;
    }

    OptimalActionSets sets = action_sets_from_q(q, tie_tol);
    for (State s = 0; s < n; ++s) greedy[static_cast<std::size_t>(s)] = sets.at(s).front();
    return {std::move(v), std::move(sets), std::move(greedy)};
}

/// Per-state set equality.
inline bool action_sets_equal(const OptimalActionSets& x, const OptimalActionSets& y) {
    if (x.n_states() != y.n_states()) throw ContractViolation("action-set state counts differ");
    return x == y;
}

/// Every policy optimal for r_learned is also optimal for r_star: the learned
/// optimal-action sets are per-state subsets of the target ones.
inline bool reward_compatible(const RewardlessMDP& m, const Reward& r_learned, const Reward& r_star,
                              double tie_tol = kDefaultTieTol) {
    const auto learned = solve_optimal(m, r_learned, kDefaultValueTol, tie_tol).action_sets;
    const auto target = solve_optimal(m, r_star, kDefaultValueTol, tie_tol).action_sets;
    return learned.is_subset_of(target);
}

inline std::string to_string(const OptimalActionSets& sets) {
    std::ostringstream out;
    for (State s = 0; s < sets.n_states(); ++s) {
        out << (s ? " " : "") << s << ":{";
        for (std::size_t i = 0; i < sets.at(s).size(); ++i) out << (i ? "," : "") << sets.at(s)[i];
        out << "}";
    }
    return out.str();
}

} // namespace classteach
