#include "classteach/scenarios.hpp"

#include <gtest/gtest.h>

#include <cstdio>
#include <queue>
#include <set>

using namespace classteach;

namespace {

/// States reachable from `from` with positive probability under any actions.
std::set<State> reachable(const RewardlessMDP& m, const std::vector<State>& from) {
    std::set<State> seen(from.begin(), from.end());
    std::queue<State> todo;
    for (State s : from) todo.push(s);
    while (!todo.empty()) {
        const State s = todo.front();
        todo.pop();
        for (Action a = 0; a < m.n_actions(); ++a)
            for (State t = 0; t < m.n_states(); ++t)
                if (m.transition(a)(s, t) > 0 && seen.insert(t).second) todo.push(t);
    }
    return seen;
}

/// Fewest steps from s0 to a state satisfying `goal` on a deterministic model.
int shortest_path(const RewardlessMDP& m, State s0, auto goal) {
    std::vector<int> dist(static_cast<std::size_t>(m.n_states()), -1);
    std::queue<State> todo;
    dist[static_cast<std::size_t>(s0)] = 0;
    todo.push(s0);
    while (!todo.empty()) {
        const State s = todo.front();
        todo.pop();
        if (goal(s)) return dist[static_cast<std::size_t>(s)];
        for (Action a = 0; a < m.n_actions(); ++a)
            for (State t = 0; t < m.n_states(); ++t)
                if (m.transition(a)(s, t) > 0 && dist[static_cast<std::size_t>(t)] < 0) {
                    dist[static_cast<std::size_t>(t)] = dist[static_cast<std::size_t>(s)] + 1;
                    todo.push(t);
                }
    }
    return -1;
}

std::vector<ScenarioBundle> builtins() {
    return {two_agent_chain(0.9, 0.05), two_agent_chain(0.9, 1.0), brushing_scenario(), addition_scenario(),
            gamma_variant_scenario(0.9, 0.01), random_class(random_spec_from_seed(0)),
            random_class({20, 5, 17, 4, 0.8})};
}

} // namespace

TEST(Chain, TargetReward) { EXPECT_EQ(two_agent_chain(0.9, 0.05).class_spec.r_star, chain_reward()); }

TEST(Chain, Teachability) {
    EXPECT_TRUE(is_class_teachable(two_agent_chain(0.9, 1.0).class_spec));
    EXPECT_FALSE(is_class_teachable(two_agent_chain(0.9, 0.05).class_spec));
    EXPECT_THROW(two_agent_chain(0.9, 0.0), ContractViolation);
    EXPECT_THROW(two_agent_chain(1.0, 0.5), ContractViolation);
}

TEST(Threshold, BothConventions) {
    const auto t = success_threshold(0.9);
    EXPECT_NEAR(t.paper_threshold, 0.1 / (0.9 * 0.8), 1e-15);
    EXPECT_NEAR(t.paper_threshold, 0.138888888, 1e-8);
    EXPECT_NEAR(t.convention_threshold, 1.0 / 9.0, 1e-15);
    EXPECT_NEAR(t.bisection_estimate, t.convention_threshold, 1e-6);
    EXPECT_THROW(success_threshold(0.5), DomainError);
    EXPECT_THROW(success_threshold(0.2), DomainError);
}

TEST(Threshold, VanishesAsDiscountApproachesOne) {
    const auto t = success_threshold(0.999);
    EXPECT_LT(t.paper_threshold, 2e-3);
    EXPECT_LT(t.convention_threshold, 2e-3);
}

TEST(Brushing, AgentAReachesCleanTeethInFourSteps) {
    const auto s = brushing_scenario();
    EXPECT_EQ(shortest_path(s.class_spec.learners[0], 0, [](State x) { return (x & brushing::clean) != 0; }), 4);
}

TEST(Brushing, AgentBNeverHoldsTwoObjects) {
    const auto s = brushing_scenario();
    for (State x : reachable(s.class_spec.learners[1], s.class_spec.initial_states))
        EXPECT_FALSE(brushing::two_objects(x)) << x;
    // Agent A does pass through such a state.
    bool seen = false;
    for (State x : reachable(s.class_spec.learners[0], s.class_spec.initial_states)) seen |= brushing::two_objects(x);
    EXPECT_TRUE(seen);
}

TEST(Brushing, NotTeachableButPlansHaveNoLoss) {
    const auto c = brushing_scenario().class_spec;
    EXPECT_FALSE(is_class_teachable(c));
    EXPECT_EQ(c.r_star.sum(), 8.0);
    const auto results = compare_strategies(c, IRLConfig::for_gamma(0.9), 1000);
    for (double loss : results.back().relative_loss) EXPECT_NEAR(loss, 0.0, 1e-9);
}

TEST(Addition, RoutesDiffer) {
    using namespace addition;
    const auto c = addition_scenario().class_spec;
    const auto sa = solve_optimal(c.learners[0], c.r_star).action_sets;
    const auto sb = solve_optimal(c.learners[1], c.r_star).action_sets;
    EXPECT_EQ(sa.at(carry_pending), std::vector<Action>{memorize_carry});
    EXPECT_EQ(sb.at(carry_pending), std::vector<Action>{write_carry});
    EXPECT_FALSE(is_class_teachable(c));
}

TEST(GammaVariant, Examples) {
    const auto c = gamma_variant_scenario(0.9, 0.01).class_spec;
    EXPECT_FALSE(is_class_teachable(c));
    EXPECT_EQ(solve_optimal(c.learners[1], c.r_star).action_sets.at(0), std::vector<Action>{chain::b});
    EXPECT_TRUE(is_class_teachable(gamma_variant_scenario(0.9, 0.9).class_spec));
    EXPECT_TRUE(is_class_teachable(gamma_variant_scenario(0.9, 0.89).class_spec));
}

TEST(GammaVariant, SwitchesOnlyBelowOneHalf) {
    // In state 0, a is worth 2 g^2 / (1-g) and b is worth g / (1-g): the switch sits at g = 1/2.
    for (double gb = 0.05; gb < 0.999; gb += 0.05) {
        const bool same = is_class_teachable(gamma_variant_scenario(0.9, gb).class_spec);
        if (gb < 0.49 || gb > 0.51) EXPECT_EQ(same, gb > 0.5) << gb;
    }
}

TEST(RandomClass, DeterministicAndSeedSensitive) {
    EXPECT_EQ(random_class(random_spec_from_seed(5)), random_class(random_spec_from_seed(5)));
    EXPECT_FALSE(random_class(random_spec_from_seed(5)) == random_class(random_spec_from_seed(6)));
    const auto single = random_class(random_spec_from_seed(5, 1));
    EXPECT_TRUE(is_class_teachable(single.class_spec));
    EXPECT_EQ(single.class_spec.initial_states.size(), static_cast<std::size_t>(single.class_spec.n_states()));
    EXPECT_THROW(random_class({4, 3, 0, 2, 0.9}), ContractViolation);
    EXPECT_THROW(random_class({10, 3, 0, 0, 0.9}), ContractViolation);
}

TEST(RandomClass, HeterogeneousPairsAreRarelyTeachable) {
    int teachable = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed)
        teachable += is_class_teachable(random_class(random_spec_from_seed(seed)).class_spec) ? 1 : 0;
    std::printf("random two-learner classes teachable: %d / 100\n", teachable);
    EXPECT_LE(teachable, 10);
}

TEST(Scenarios, KernelsAreStochasticAndConstructionDeterministic) {
    const auto again = builtins();
    const auto first = builtins();
    ASSERT_EQ(first.size(), again.size());
    for (std::size_t i = 0; i < first.size(); ++i) {
        EXPECT_EQ(first[i], again[i]) << first[i].name;
        EXPECT_FALSE(first[i].notes.empty());
        for (const auto& m : first[i].class_spec.learners)
            for (const auto& p : m.transitions()) {
                EXPECT_LE((p.rowwise().sum().array() - 1.0).abs().maxCoeff(), 1e-12);
                EXPECT_GE(p.minCoeff(), 0.0);
            }
    }
}

TEST(DivergentPair, RequiresIncompleteDemo) {
    EXPECT_THROW(divergent_pair(2, 2, {{0, 0}, {1, 1}}, 0.9), ContractViolation);
    EXPECT_THROW(divergent_pair(1, 2, {}, 0.9), ContractViolation);
}
