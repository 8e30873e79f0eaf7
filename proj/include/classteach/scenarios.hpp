#pragma once

// Built-in teaching scenarios.
//
// State and action indices are zero-based everywhere. In the two-agent chain,
// states 0..4 correspond to the diagram's states 1..5 and actions 0/1 to a/b.

#include "classteach/teacher.hpp"

#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace classteach {

struct ScenarioBundle {
    std::string name;
    ClassSpec class_spec;
    std::string notes;

    friend bool operator==(const ScenarioBundle&, const ScenarioBundle&) = default;
};

namespace detail {

/// Kernel for a deterministic successor function next(s, a).
template <typename Next>
std::vector<Matrix> deterministic_kernel(int n_states, int n_actions, Next next) {
    std::vector<Matrix> p(static_cast<std::size_t>(n_actions), Matrix::Zero(n_states, n_states));
    for (Action a = 0; a < n_actions; ++a)
        for (State s = 0; s < n_states; ++s) p[static_cast<std::size_t>(a)](s, next(s, a)) = 1.0;
    return p;
}

inline void require_open_unit(double x, const char* what) {
    if (!(x > 0.0 && x < 1.0)) throw ContractViolation(std::string(what) + " must lie in (0, 1)");
}

} // namespace detail

// ---------------------------------------------------------------------------
// Two-agent chain

namespace chain {
inline constexpr Action a = 0;
inline constexpr Action b = 1;
} // namespace chain

/// Agent A of the chain; in state 0, action a reaches state 1 with probability
/// p and otherwise stays put (p = 1 gives the deterministic agent).
inline RewardlessMDP chain_learner(double gamma, double p) {
    if (!(p > 0.0 && p <= 1.0)) throw ContractViolation("success probability must lie in (0, 1]");
    detail::require_open_unit(gamma, "discount");
    auto kernel = detail::deterministic_kernel(5, 2, [](State s, Action act) -> State {
        switch (s) {
        case 0: return act == chain::a ? 1 : 2;
        case 1: return act == chain::a ? 3 : 4;
        default: return s;
        }
    });
    kernel[chain::a](0, 1) = p;
    kernel[chain::a](0, 0) = 1.0 - p;
    return RewardlessMDP(std::move(kernel), gamma);
}

inline Reward chain_reward() { return (Reward(5) << 0.0, 0.0, 1.0, 0.0, 2.0).finished(); }

/// Agent A (deterministic) and agent B (state-0 action a succeeds with probability p).
inline ScenarioBundle two_agent_chain(double gamma, double p) {
    return {"chain",
            {{chain_learner(gamma, 1.0), chain_learner(gamma, p)}, chain_reward(), {0, 1}},
            "5-state chain; B's action a in state 0 succeeds w.p. " + std::to_string(p) +
                " and self-loops on failure; r* = [0 0 1 0 2]; S0 = {0,1}"};
}

/// Same chain dynamics (agent A) for both learners; only the discount differs.
inline ScenarioBundle gamma_variant_scenario(double gamma_a, double gamma_b) {
    detail::require_open_unit(gamma_a, "gamma_a");
    detail::require_open_unit(gamma_b, "gamma_b");
    return {"gamma",
            {{chain_learner(gamma_a, 1.0), chain_learner(gamma_b, 1.0)}, chain_reward(), {0, 1}},
            "chain agent A dynamics for both learners; gamma_A = " + std::to_string(gamma_a) +
                ", gamma_B = " + std::to_string(gamma_b)};
}

struct Thresholds {
    double convention_threshold = 0.0; // (1 - gamma) / gamma
    double paper_threshold = 0.0;      // (1 - gamma) / (gamma (2 gamma - 1))
    double bisection_estimate = 0.0;
};

/// p at which agent B switches from b to a in state 0 (a strictly preferred above).
inline double bisect_switch_point(double gamma, int iterations = 80) {
    auto a_strictly_best = [gamma](double p) {
        const auto sets = solve_optimal(chain_learner(gamma, p), chain_reward(), 1e-12, 0.0).action_sets;
        return sets.at(0).size() == 1 && sets.at(0).front() == chain::a;
    };
    double lo = 1e-12, hi = 1.0;
    if (!a_strictly_best(hi)) throw DomainError("action a is never strictly preferred for this discount");
    for (int i = 0; i < iterations; ++i) {
        const double mid = 0.5 * (lo + hi);
        (a_strictly_best(mid) ? hi : lo) = mid;
    }
    return 0.5 * (lo + hi);
}

/// Both indifference thresholds of the chain for a discount above 1/2. The
/// convention threshold is checked against bisection on solve_optimal.
inline Thresholds success_threshold(double gamma) {
    if (!(gamma > 0.5 && gamma < 1.0)) throw DomainError("threshold needs 0.5 < gamma < 1");
    Thresholds t;
    t.convention_threshold = (1.0 - gamma) / gamma;
    t.paper_threshold = (1.0 - gamma) / (gamma * (2.0 * gamma - 1.0));
    t.bisection_estimate = bisect_switch_point(gamma);
    if (std::abs(t.bisection_estimate - t.convention_threshold) > 1e-6)
        throw SolverFailure("bisection threshold " + std::to_string(t.bisection_estimate) +
                            " disagrees with analytic value " + std::to_string(t.convention_threshold));
    return t;
}

// ---------------------------------------------------------------------------
// Brushing teeth

namespace brushing {
// State bits.
inline constexpr int paste = 1;   // P: holding paste
inline constexpr int brush = 2;   // B: holding brush
inline constexpr int filled = 4;  // F: brush has paste
inline constexpr int clean = 8;   // C: teeth clean
inline constexpr int n_states = 16;

enum Act : Action { take_paste = 0, take_brush = 1, apply_paste = 2, brush_teeth = 3, idle = 4 };
inline constexpr int n_actions = 5;

/// Holding paste and an empty brush at once.
inline bool two_objects(State s) { return (s & paste) && (s & brush) && !(s & filled) && !(s & clean); }
} // namespace brushing

struct BrushingParams {
    double gamma = 0.9;
};

inline ScenarioBundle brushing_scenario(const BrushingParams& params = {}) {
    using namespace brushing;
    detail::require_open_unit(params.gamma, "discount");

    auto learner_a = [](State s, Action act) -> State {
        if (s & clean) return s;
        switch (act) {
        case take_paste: return s | paste;
        case take_brush: return s | brush;
        case apply_paste: return (s & paste) && (s & brush) ? (s | filled) & ~paste : s;
        case brush_teeth: return (s & brush) && (s & filled) ? s | clean : s;
        default: return s;
        }
    };
    auto learner_b = [](State s, Action act) -> State {
        if ((s & clean) || two_objects(s)) return s;
        auto guarded = [s](State t) { return two_objects(t) ? s : t; };
        switch (act) {
        case take_paste: return guarded(s | paste);
        case take_brush: return guarded(s | brush);
        case apply_paste: return (s & paste) ? (s | filled) & ~paste : s;
        case brush_teeth: return (s & brush) && (s & filled) ? s | clean : s;
        default: return s;
        }
    };

    Reward r = Reward::Zero(n_states);
    for (State s = 0; s < n_states; ++s)
        if (s & clean) r(s) = 1.0;

    return {"brushing",
            {{RewardlessMDP(detail::deterministic_kernel(n_states, n_actions, learner_a), params.gamma),
              RewardlessMDP(detail::deterministic_kernel(n_states, n_actions, learner_b), params.gamma)},
             r,
             {0}},
            "state bits P=1 B=2 F=4 C=8; actions take_paste, take_brush, apply_paste, brush, idle; "
            "A: apply_paste needs P&B, sets F, clears P; brush needs B&F, sets C. "
            "B: transitions into P&B&!F self-loop (state unreachable, absorbing); apply_paste needs P only. "
            "C states absorbing with r* = 1; S0 = {0}; gamma = " +
                std::to_string(params.gamma)};
}

// ---------------------------------------------------------------------------
// Two-digit addition with a carry

namespace addition {
enum St : State {
    start = 0,
    carry_pending = 1,
    carry_memorized = 2,
    carry_written = 3,
    carry_forgotten = 4,
    tens_with_written_carry = 5,
    correct = 6,
    wrong = 7
};
inline constexpr int n_states = 8;

enum Act : Action { add_column = 0, memorize_carry = 1, write_carry = 2 };
inline constexpr int n_actions = 3;
} // namespace addition

struct AdditionParams {
    double gamma = 0.9;
    double memorize_success_a = 1.0;
    double memorize_success_b = 0.5;
};

inline RewardlessMDP addition_learner(double gamma, double memorize_success) {
    using namespace addition;
    if (!(memorize_success >= 0.0 && memorize_success <= 1.0))
        throw ContractViolation("memorize success probability must lie in [0, 1]");
    auto kernel = detail::deterministic_kernel(n_states, n_actions, [](State s, Action act) -> State {
        switch (s) {
        case start: return act == add_column ? carry_pending : s;
        case carry_pending:
            if (act == add_column) return carry_forgotten;
            return act == memorize_carry ? carry_memorized : carry_written;
        case carry_memorized: return act == add_column ? correct : s;
        case carry_written: return act == add_column ? tens_with_written_carry : s;
        case tens_with_written_carry: return act == add_column ? correct : s;
        case carry_forgotten: return act == add_column ? wrong : s;
        default: return s;
        }
    });
    auto& memorize = kernel[memorize_carry];
    memorize(carry_pending, carry_memorized) = memorize_success;
    memorize(carry_pending, carry_forgotten) = 1.0 - memorize_success;
    return RewardlessMDP(std::move(kernel), gamma);
}

inline ScenarioBundle addition_scenario(const AdditionParams& params = {}) {
    using namespace addition;
    detail::require_open_unit(params.gamma, "discount");
    Reward r = Reward::Zero(n_states);
    r(correct) = 1.0;
    return {"addition",
            {{addition_learner(params.gamma, params.memorize_success_a),
              addition_learner(params.gamma, params.memorize_success_b)},
             r,
             {start}},
            "states start, carry_pending, carry_memorized, carry_written, carry_forgotten, "
            "tens_with_written_carry, correct, wrong; actions add_column, memorize_carry, write_carry; "
            "memorize succeeds w.p. " +
                std::to_string(params.memorize_success_a) + " (A) / " + std::to_string(params.memorize_success_b) +
                " (B), failing to carry_forgotten; writing costs one extra step; r*(correct) = 1; S0 = {start}"};
}

// ---------------------------------------------------------------------------
// Random classes

struct RandomSpec {
    int n_states = 10;
    int n_actions = 3;
    std::uint64_t seed = 0;
    int n_learners = 2;
    double gamma = 0.9;
};

namespace detail {
/// Uniform double in [0, 1) from the top 53 bits of a 64-bit draw.
inline double unit_draw(std::mt19937_64& gen) { return static_cast<double>(gen() >> 11) * 0x1.0p-53; }
} // namespace detail

/// Sizes drawn from the seed: |S| in [5, 20], |A| in [3, 5].
inline RandomSpec random_spec_from_seed(std::uint64_t seed, int n_learners = 2, double gamma = 0.9) {
    std::mt19937_64 gen(seed ^ 0x9e3779b97f4a7c15ULL);
    RandomSpec spec;
    spec.n_states = 5 + static_cast<int>(gen() % 16);
    spec.n_actions = 3 + static_cast<int>(gen() % 3);
    spec.seed = seed;
    spec.n_learners = n_learners;
    spec.gamma = gamma;
    return spec;
}

/// Independent uniform-simplex-normalized kernels per learner and a shared
/// uniform [0,1] reward, all from one std::mt19937_64 stream seeded with
/// spec.seed (reward first, then learner-major, action, state, successor).
inline ScenarioBundle random_class(const RandomSpec& spec) {
    if (spec.n_states < 5 || spec.n_states > 20) throw ContractViolation("random class needs 5..20 states");
    if (spec.n_actions < 3 || spec.n_actions > 5) throw ContractViolation("random class needs 3..5 actions");
    if (spec.n_learners < 1) throw ContractViolation("random class needs at least one learner");
    detail::require_open_unit(spec.gamma, "discount");

    std::mt19937_64 gen(spec.seed);
    Reward r(spec.n_states);
    for (State s = 0; s < spec.n_states; ++s) r(s) = detail::unit_draw(gen);

    std::vector<RewardlessMDP> learners;
    for (int l = 0; l < spec.n_learners; ++l) {
        std::vector<Matrix> kernel(static_cast<std::size_t>(spec.n_actions), Matrix(spec.n_states, spec.n_states));
        for (auto& p : kernel) {
            for (State s = 0; s < spec.n_states; ++s) {
                for (State t = 0; t < spec.n_states; ++t) p(s, t) = detail::unit_draw(gen);
                const double sum = p.row(s).sum();
                if (sum > 0.0)
                    p.row(s) /= sum;
                else
                    p.row(s).setConstant(1.0 / spec.n_states);
            }
        }
        learners.emplace_back(std::move(kernel), spec.gamma);
    }

    std::vector<State> all(static_cast<std::size_t>(spec.n_states));
    for (State s = 0; s < spec.n_states; ++s) all[static_cast<std::size_t>(s)] = s;
    return {"random-" + std::to_string(spec.seed),
            {std::move(learners), std::move(r), std::move(all)},
            "random class: |S| = " + std::to_string(spec.n_states) + ", |A| = " + std::to_string(spec.n_actions) +
                ", learners = " + std::to_string(spec.n_learners) + ", seed = " + std::to_string(spec.seed) +
                ", mt19937_64 stream, rows uniform then normalized, r* ~ U[0,1], S0 = all states"};
}

// ---------------------------------------------------------------------------
// Two agents that disagree after an incomplete demonstration

struct DivergentPair {
    RewardlessMDP a;
    RewardlessMDP b;
    State undemonstrated;
    Action action_a;
    Action action_b;
};

/// Builds two learners for which `demo` (missing some state s0) yields
/// different learned actions at s0: demonstrated actions lead to s0, all other
/// actions to a second state s1; other undemonstrated states are absorbing; in
/// s0 learner A reaches s0 only via action 0 and learner B only via action 1.
inline DivergentPair divergent_pair(int n_states, int n_actions, const Demonstration& demo, double gamma) {
    if (n_states < 2 || n_actions < 2) throw ContractViolation("need at least two states and two actions");
    State s0 = -1;
    for (State s = 0; s < n_states && s0 < 0; ++s)
        if (!demo.covers(s)) s0 = s;
    if (s0 < 0) throw ContractViolation("demonstration is complete");
    const State s1 = s0 == 0 ? 1 : 0;
    const Action a0 = 0, a1 = 1;

    auto build = [&](Action preferred) {
        std::vector<Matrix> p(static_cast<std::size_t>(n_actions), Matrix::Zero(n_states, n_states));
        for (State s = 0; s < n_states; ++s) {
            std::optional<Action> shown;
            for (const auto& pair : demo)
                if (pair.state == s) {
                    shown = pair.action;
                    break;
                }
            for (Action act = 0; act < n_actions; ++act) {
                auto& row = p[static_cast<std::size_t>(act)];
                if (shown)
                    row(s, act == *shown ? s0 : s1) = 1.0;
                else if (s == s0)
                    row(s, act == preferred ? s0 : s1) = 1.0;
                else
                    row(s, s) = 1.0;
            }
        }
        return RewardlessMDP(std::move(p), gamma);
    };
    return {build(a0), build(a1), s0, a0, a1};
}

} // namespace classteach
