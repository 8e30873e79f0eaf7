#pragma once

// Teaching a heterogeneous class of value-space IRL learners.
//
// A class shares state and action spaces; learners may differ in dynamics and
// discount. A learner is taught when the optimal-action sets of its recovered
// reward are per-state subsets of the sets of the target reward under its own
// model. Class teaching with one shared demonstration is possible exactly when
// all learners have the same optimal-action sets under the target reward.

#include "classteach/irl.hpp"
#include "classteach/mdp.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

namespace classteach {

struct ClassSpec {
    std::vector<RewardlessMDP> learners;
    Reward r_star;
    std::vector<State> initial_states;

    int n_states() const { return learners.front().n_states(); }
    int n_actions() const { return learners.front().n_actions(); }
    std::size_t n_learners() const { return learners.size(); }

    void validate() const {
        if (learners.empty()) throw ContractViolation("class needs at least one learner");
        for (const auto& m : learners)
            if (m.n_states() != n_states() || m.n_actions() != n_actions())
                throw ContractViolation("learners must share state and action spaces");
        if (r_star.size() != n_states()) throw ContractViolation("target reward length does not match |S|");
        if (initial_states.empty()) throw ContractViolation("class needs at least one initial state");
        for (State s : initial_states)
            if (!learners.front().valid_state(s))
                throw ContractViolation("initial state " + std::to_string(s) + " out of range");
    }

    friend bool operator==(const ClassSpec& x, const ClassSpec& y) {
        return x.learners == y.learners && x.r_star.size() == y.r_star.size() && x.r_star == y.r_star &&
               x.initial_states == y.initial_states;
    }
};

/// One demonstration for everybody plus per-learner additions.
struct TeachingPlan {
    Demonstration class_demo;
    std::vector<Demonstration> extra_demos;
    bool teachable = false;

    /// Everything learner `l` is shown.
    Demonstration demo_for(std::size_t l) const { return merge(class_demo, extra_demos.at(l)); }
};

/// (|class_demo| + sum of extras) / |S|. A shared pair is paid for once.
inline double effort(const TeachingPlan& plan, int n_states) {
    std::size_t pairs = plan.class_demo.size();
    for (const auto& extra : plan.extra_demos) pairs += extra.size();
    return static_cast<double>(pairs) / static_cast<double>(n_states);
}

/// Optimal-action sets of every learner under the target reward.
inline std::vector<OptimalActionSets> target_action_sets(const ClassSpec& c, double tie_tol = kDefaultTieTol) {
    c.validate();
    std::vector<OptimalActionSets> out;
    out.reserve(c.n_learners());
    for (const auto& m : c.learners) out.push_back(solve_optimal(m, c.r_star, kDefaultValueTol, tie_tol).action_sets);
    return out;
}

/// True iff all learners' optimal-action sets under r_star coincide.
inline bool is_class_teachable(const ClassSpec& c, double tie_tol = kDefaultTieTol) {
    const auto sets = target_action_sets(c, tie_tol);
    return std::all_of(sets.begin(), sets.end(),
                       [&](const OptimalActionSets& s) { return action_sets_equal(s, sets.front()); });
}

namespace detail {

inline Demonstration rollout(const RewardlessMDP& m, const OptimalActionSets& sets, State s0, int cap) {
    Demonstration d;
    std::vector<bool> visited(static_cast<std::size_t>(m.n_states()), false);
    State s = s0;
    while (!m.is_absorbing(s) && !visited[static_cast<std::size_t>(s)]) {
        visited[static_cast<std::size_t>(s)] = true;
        const Action a = sets.at(s).front();
        if (static_cast<int>(sets.at(s).size()) < m.n_actions()) {
            d.add({s, a});
            if (static_cast<int>(d.size()) >= cap) break;
        }
        // Most likely successor, lowest index on ties.
        State next = 0;
        for (State t = 1; t < m.n_states(); ++t)
            if (m.row(s, a)(t) > m.row(s, a)(next)) next = t;
        s = next;
    }
    return d;
}

/// Learned sets for `d`, or nothing when the learner's program is infeasible.
inline std::optional<OptimalActionSets> learned_sets(const RewardlessMDP& m, const Demonstration& d,
                                                     const IRLConfig& cfg, double tie_tol) {
    const IRLResult res = irl_solve(m, d, cfg);
    if (!res.feasible) return std::nullopt;
    return learned_policy(m, res, tie_tol);
}

inline OptimalActionSets full_action_sets(int n_states, int n_actions) {
    std::vector<Action> all(static_cast<std::size_t>(n_actions));
    for (Action a = 0; a < n_actions; ++a) all[static_cast<std::size_t>(a)] = a;
    return OptimalActionSets(std::vector<std::vector<Action>>(static_cast<std::size_t>(n_states), all), n_actions);
}

inline std::optional<State> first_violation(const OptimalActionSets& learned, const OptimalActionSets& target) {
    for (State s = 0; s < learned.n_states(); ++s)
        if (!std::includes(target.at(s).begin(), target.at(s).end(), learned.at(s).begin(), learned.at(s).end()))
            return s;
    return std::nullopt;
}

inline OptimalActionSets require_learned(const RewardlessMDP& m, const Demonstration& d, const IRLConfig& cfg,
                                         double tie_tol) {
    auto sets = learned_sets(m, d, cfg, tie_tol);
    if (!sets) throw InfeasibleDemonstration("demonstration " + to_string(d) + " is infeasible for this learner");
    return *sets;
}

/// True iff every constraint row of `pair` is implied by the rows of `rest` and the box.
inline bool group_redundant(const RewardlessMDP& m, const Demonstration& rest, StateAction pair, const IRLConfig& cfg) {
    LinearProgram lp = irl_program(m, rest, cfg);
    const ConstraintSet group = constraints_from_demo(m, Demonstration{pair});
    for (Eigen::Index i = 0; i < group.size(); ++i) {
        LinearProgram probe = lp;
        probe.add_row(group.rows.row(i), cfg.epsilon);
        if (!is_redundant(probe.n_rows() - 1, probe)) return false;
    }
    return true;
}

/// Greedy reverse-order pruning of `candidates` with `fixed` always shown.
/// With a target, a pair goes when the remaining demonstration still leaves the
/// learner's sets inside the target. Without one, a pair goes when its rows are
/// implied by the rest and the learned sets stay inside those of the full demo.
inline Demonstration prune(const RewardlessMDP& m, const Demonstration& fixed, const Demonstration& candidates,
                           const IRLConfig& cfg, const std::optional<OptimalActionSets>& target, double tie_tol) {
    const OptimalActionSets reference =
        target ? *target : require_learned(m, merge(fixed, candidates), cfg, tie_tol);
    if (target) require_learned(m, merge(fixed, candidates), cfg, tie_tol);

    Demonstration kept = candidates;
    for (auto it = candidates.pairs().rbegin(); it != candidates.pairs().rend(); ++it) {
        const Demonstration trial = kept.without(*it);
        const Demonstration shown = merge(fixed, trial);
        if (!target && !group_redundant(m, shown, *it, cfg)) continue;
        const auto sets = learned_sets(m, shown, cfg, tie_tol);
        if (sets && sets->is_subset_of(reference)) kept = trial;
    }
    return kept;
}

/// Adds single target-optimal pairs at the lowest offending state until the
/// learner is compatible. Every added pair pins a new state, so this ends.
inline void complete(const RewardlessMDP& m, Demonstration& d, const OptimalActionSets& target, const IRLConfig& cfg,
                     double tie_tol) {
    for (;;) {
        const auto violation = first_violation(require_learned(m, d, cfg, tie_tol), target);
        if (!violation) return;
        d.add({*violation, target.at(*violation).front()});
    }
}

} // namespace detail

/// Rollout of the learner's optimal policy under r_star from s0, following the
/// most likely successor. Ties pick the lowest action/state index. Stops at an
/// absorbing or revisited state or after `cap` pairs. States where every
/// action is optimal are traversed but not recorded.
inline Demonstration generate_trajectory(const RewardlessMDP& m, const Reward& r_star, State s0, int cap,
                                         double tie_tol = kDefaultTieTol) {
    if (cap < 1) throw ContractViolation("trajectory cap must be at least 1");
    if (!m.valid_state(s0)) throw ContractViolation("start state out of range");
    const auto sets = solve_optimal(m, r_star, kDefaultValueTol, tie_tol).action_sets;
    return detail::rollout(m, sets, s0, cap);
}

/// Drops pairs (last inserted first) that the learner does not need.
///
/// Without `target`, a pair is removed only when its whole row group is
/// redundant given the remaining rows and the box, and the learned sets stay
/// within those of the full demonstration. With `target`, a pair is removed
/// whenever the learned sets stay within `target`.
inline Demonstration minimize_demo(const RewardlessMDP& m, const Demonstration& d, const IRLConfig& cfg,
                                   double tie_tol = kDefaultTieTol,
                                   const std::optional<OptimalActionSets>& target = std::nullopt) {
    return detail::prune(m, Demonstration{}, d, cfg, target, tie_tol);
}

/// Most concise demonstration found for one learner: rollouts from S0,
/// completed at any state the learner would still get wrong, then pruned.
inline Demonstration teach_single(const RewardlessMDP& m, const Reward& r_star, const std::vector<State>& initial_states,
                                  const IRLConfig& cfg, int cap, double tie_tol = kDefaultTieTol) {
    const auto target = solve_optimal(m, r_star, kDefaultValueTol, tie_tol).action_sets;
    Demonstration pool;
    for (State s0 : initial_states) {
        if (!m.valid_state(s0)) throw ContractViolation("initial state out of range");
        for (const auto& p : detail::rollout(m, target, s0, std::max(cap, 1)))
            if (!pool.covers(p.state)) pool.add(p);
    }
    detail::complete(m, pool, target, cfg, tie_tol);
    return detail::prune(m, Demonstration{}, pool, cfg, target, tie_tol);
}

namespace detail {

inline TeachingPlan plan_from_required(const ClassSpec& c, const std::vector<Demonstration>& required,
                                       const std::vector<OptimalActionSets>& targets, const IRLConfig& cfg,
                                       double tie_tol) {
    const std::size_t L = c.n_learners();
    auto optimal_for_all = [&](StateAction p) {
        return std::all_of(targets.begin(), targets.end(),
                           [&](const OptimalActionSets& t) { return t.contains(p.state, p.action); });
    };

    TeachingPlan plan;
    for (const auto& d : required)
        for (const auto& p : d)
            if (!plan.class_demo.covers(p.state) && optimal_for_all(p)) plan.class_demo.add(p);

    plan.extra_demos.resize(L);
    for (std::size_t l = 0; l < L; ++l) {
        Demonstration candidates;
        for (const auto& p : required[l])
            if (!plan.class_demo.covers(p.state)) candidates.add(p);
        plan.extra_demos[l] = prune(c.learners[l], plan.class_demo, candidates, cfg, targets[l], tie_tol);
    }

    // Repair any learner left incompatible by the shared pairs.
    for (bool progress = true; progress;) {
        progress = false;
        for (std::size_t l = 0; l < L; ++l) {
            const auto learned = require_learned(c.learners[l], plan.demo_for(l), cfg, tie_tol);
            const auto s = first_violation(learned, targets[l]);
            if (!s) continue;
            progress = true;
            std::optional<Action> shared;
            for (Action a : targets[l].at(*s))
                if (optimal_for_all({*s, a})) {
                    shared = a;
                    break;
                }
            const bool clash = shared && std::any_of(plan.extra_demos.begin(), plan.extra_demos.end(),
                                                     [&](const Demonstration& e) {
                                                         return std::any_of(e.begin(), e.end(), [&](StateAction p) {
                                                             return p.state == *s && p.action != *shared;
                                                         });
                                                     });
            if (shared && !clash) {
                plan.class_demo.add({*s, *shared});
                for (auto& e : plan.extra_demos) e = e.without({*s, *shared});
            } else {
                plan.extra_demos[l].add({*s, targets[l].at(*s).front()});
            }
        }
    }
    return plan;
}

} // namespace detail

/// Class teaching plan:
///  1. per learner, the concise single-learner demonstration from S0;
///  2. optimal-action sets of each learner under r_star;
///  3. the class demonstration collects every such pair whose action is optimal
///     for all learners (one pair per state);
///  4. each learner additionally gets its own remaining pairs, pruned given the
///     class demonstration.
/// Postcondition: every learner ends compatible with r_star.
inline TeachingPlan plan_teaching(const ClassSpec& c, const IRLConfig& cfg, int cap, double tie_tol = kDefaultTieTol) {
    const auto targets = target_action_sets(c, tie_tol);
    std::vector<Demonstration> required;
    for (const auto& m : c.learners) required.push_back(teach_single(m, c.r_star, c.initial_states, cfg, cap, tie_tol));
    TeachingPlan plan = detail::plan_from_required(c, required, targets, cfg, tie_tol);
    plan.teachable = std::all_of(targets.begin(), targets.end(),
                                 [&](const OptimalActionSets& t) { return t == targets.front(); });
    return plan;
}

/// (sum_s V^mix(s) - sum_s V*(s)) / sum_s V*(s) under r_star, where "mix" picks
/// uniformly among `learned` in every state.
inline double relative_loss_of_sets(const RewardlessMDP& m, const OptimalActionSets& learned, const Reward& r_star,
                                    double tie_tol = kDefaultTieTol) {
    const ValueFunction optimal = solve_optimal(m, r_star, kDefaultValueTol, tie_tol).values;
    const ValueFunction mixed = evaluate_policy(m, r_star, Policy::uniform_over(learned, m.n_actions()));
    const double denom = optimal.sum();
    const double numer = mixed.sum() - denom;
    if (denom <= 1e-12) {
        if (std::abs(numer) <= 1e-12) return 0.0;
        throw DegenerateScenario("relative loss undefined: optimal value sums to " + std::to_string(denom));
    }
    return std::min(numer / denom, 0.0);
}

/// Relative loss of the worst tie-mixed policy optimal for r_learned.
inline double relative_loss(const RewardlessMDP& m, const Reward& r_learned, const Reward& r_star,
                            double tie_tol = kDefaultTieTol) {
    return relative_loss_of_sets(m, solve_optimal(m, r_learned, kDefaultValueTol, tie_tol).action_sets, r_star,
                                 tie_tol);
}

/// Largest singular value by power iteration on M'M.
inline double spectral_norm(const Eigen::MatrixXd& m, double tol = 1e-10) {
    if (m.size() == 0 || m.cwiseAbs().maxCoeff() == 0.0) return 0.0;
    const Eigen::MatrixXd gram = m.transpose() * m;
    Eigen::VectorXd x(gram.rows());
    for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = 1.0 + 0.5 * std::sin(1.0 + static_cast<double>(i));
    x.normalize();
    double lambda = 0.0;
    for (int it = 0; it < 1'000'000; ++it) {
        const Eigen::VectorXd y = gram * x;
        const double next = y.norm();
        if (next == 0.0) return 0.0;
        x = y / next;
        const bool converged = std::abs(next - lambda) <= tol * std::max(1.0, next);
        lambda = next;
        if (converged) break;
    }
    return std::sqrt(lambda);
}

struct ValueGap {
    double gap = 0.0;
    double bound = 0.0;
};

/// gap = ||v_A - v_B||_2 for one policy run on both models under r_star;
/// bound = gamma / (1 - gamma) * ||P_A,pi - P_B,pi||_2 * ||(v_A + v_B) / 2||_2.
inline ValueGap value_gap_bound(const RewardlessMDP& a, const RewardlessMDP& b, const Policy& pi, const Reward& r_star) {
    if (a.gamma() != b.gamma()) throw ContractViolation("value-gap bound needs a common discount");
    if (a.n_states() != b.n_states() || a.n_actions() != b.n_actions())
        throw ContractViolation("value-gap bound needs matching state and action spaces");
    const ValueFunction va = evaluate_policy(a, r_star, pi);
    const ValueFunction vb = evaluate_policy(b, r_star, pi);
    const double gamma = a.gamma();
    const double sigma = spectral_norm(policy_matrix(a, pi) - policy_matrix(b, pi));
    return {(va - vb).norm(), gamma / (1.0 - gamma) * sigma * (0.5 * (va + vb)).norm()};
}

// ---------------------------------------------------------------------------
// Teaching strategies compared in the benchmark.

enum class StrategyKind { class_of, individual, algorithm1 };

struct StrategyResult {
    StrategyKind kind = StrategyKind::algorithm1;
    std::size_t class_learner = 0; // only for class_of
    double effort = 0.0;
    std::vector<double> relative_loss;
    std::vector<bool> compatible;

    double mean_loss() const {
        double sum = 0.0;
        for (double x : relative_loss) sum += x;
        return relative_loss.empty() ? 0.0 : sum / static_cast<double>(relative_loss.size());
    }
};

/// "class_a", "class_b", ... for class_of; "individual"; "algorithm1".
inline std::string strategy_name(StrategyKind kind, std::size_t class_learner = 0) {
    switch (kind) {
    case StrategyKind::class_of:
        return class_learner < 26 ? std::string("class_") + static_cast<char>('a' + class_learner)
                                  : "class_" + std::to_string(class_learner);
    case StrategyKind::individual: return "individual";
    case StrategyKind::algorithm1: return "algorithm1";
    }
    return "?";
}

/// Shows demos[l] to learner l and scores the outcome. A learner whose program
/// is infeasible learns nothing and behaves uniformly at random.
inline StrategyResult score_demonstrations(const ClassSpec& c, const std::vector<Demonstration>& demos,
                                           const IRLConfig& cfg, double tie_tol = kDefaultTieTol) {
    const auto targets = target_action_sets(c, tie_tol);
    StrategyResult out;
    for (std::size_t l = 0; l < c.n_learners(); ++l) {
        const auto& m = c.learners[l];
        const auto sets = detail::learned_sets(m, demos.at(l), cfg, tie_tol)
                              .value_or(detail::full_action_sets(m.n_states(), m.n_actions()));
        out.compatible.push_back(sets.is_subset_of(targets[l]));
        out.relative_loss.push_back(relative_loss_of_sets(m, sets, c.r_star, tie_tol));
    }
    return out;
}

/// teach_single for every learner of the class.
inline std::vector<Demonstration> single_learner_demos(const ClassSpec& c, const IRLConfig& cfg, int cap,
                                                       double tie_tol = kDefaultTieTol) {
    c.validate();
    std::vector<Demonstration> out;
    for (const auto& m : c.learners) out.push_back(teach_single(m, c.r_star, c.initial_states, cfg, cap, tie_tol));
    return out;
}

/// Everybody is shown learner l's own concise demonstration.
inline StrategyResult class_of_strategy(const ClassSpec& c, const std::vector<Demonstration>& singles, std::size_t l,
                                        const IRLConfig& cfg, double tie_tol = kDefaultTieTol) {
    auto r = score_demonstrations(c, std::vector<Demonstration>(c.n_learners(), singles.at(l)), cfg, tie_tol);
    r.kind = StrategyKind::class_of;
    r.class_learner = l;
    r.effort = static_cast<double>(singles[l].size()) / static_cast<double>(c.n_states());
    return r;
}

/// Every learner gets its own concise demonstration; efforts add up.
inline StrategyResult individual_strategy(const ClassSpec& c, const std::vector<Demonstration>& singles,
                                          const IRLConfig& cfg, double tie_tol = kDefaultTieTol) {
    auto r = score_demonstrations(c, singles, cfg, tie_tol);
    r.kind = StrategyKind::individual;
    std::size_t total = 0;
    for (const auto& d : singles) total += d.size();
    r.effort = static_cast<double>(total) / static_cast<double>(c.n_states());
    return r;
}

/// The class plan built from the learners' concise demonstrations.
inline StrategyResult algorithm1_strategy(const ClassSpec& c, const std::vector<Demonstration>& singles,
                                          const IRLConfig& cfg, double tie_tol = kDefaultTieTol) {
    const TeachingPlan plan = detail::plan_from_required(c, singles, target_action_sets(c, tie_tol), cfg, tie_tol);
    std::vector<Demonstration> shown;
    for (std::size_t l = 0; l < c.n_learners(); ++l) shown.push_back(plan.demo_for(l));
    auto r = score_demonstrations(c, shown, cfg, tie_tol);
    r.kind = StrategyKind::algorithm1;
    r.effort = effort(plan, c.n_states());
    return r;
}

/// class_of(l) for every learner, then individual, then algorithm1.
inline std::vector<StrategyResult> compare_strategies(const ClassSpec& c, const IRLConfig& cfg, int cap,
                                                      double tie_tol = kDefaultTieTol) {
    const auto singles = single_learner_demos(c, cfg, cap, tie_tol);
    std::vector<StrategyResult> out;
    for (std::size_t l = 0; l < c.n_learners(); ++l) out.push_back(class_of_strategy(c, singles, l, cfg, tie_tol));
    out.push_back(individual_strategy(c, singles, cfg, tie_tol));
    out.push_back(algorithm1_strategy(c, singles, cfg, tie_tol));
    return out;
}

} // namespace classteach
