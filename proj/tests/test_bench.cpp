#include "classteach/bench.hpp"

#include <gtest/gtest.h>

#include <clocale>
#include <cstdio>
#include <filesystem>
#include <fstream>

using namespace classteach;

namespace {

std::string temp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / ("classteach_test_" + name)).string();
}

std::vector<std::string> lines(const std::string& text) {
    std::vector<std::string> out;
    std::string line;
    std::istringstream in(text);
    while (std::getline(in, line)) out.push_back(line);
    return out;
}

nlohmann::json chain_json() { return scenario_to_json(two_agent_chain(0.9, 0.05)); }

template <typename E>
std::string message_of(const nlohmann::json& j) {
    try {
        scenario_from_json(j);
    } catch (const E& e) {
        return e.what();
    }
    return "<no error>";
}

} // namespace

TEST(ScenarioIo, RoundTripIsLossless) {
    for (const auto& s : {two_agent_chain(0.9, 0.05), brushing_scenario(), addition_scenario(),
                          gamma_variant_scenario(0.9, 0.01), random_class(random_spec_from_seed(11))}) {
        const auto path = temp_path(s.name + ".json");
        save_scenario(s, path);
        std::vector<std::string> warnings;
        const auto back = load_scenario(path, &warnings);
        EXPECT_EQ(back, s) << s.name;
        EXPECT_TRUE(warnings.empty());
        std::filesystem::remove(path);
    }
}

TEST(ScenarioIo, NonStochasticRowCitesLocation) {
    auto j = chain_json();
    j["learners"][1]["transitions"][0][3] = {0.0, 0.0, 0.0, 0.9, 0.0};
    const auto msg = message_of<ValidationError>(j);
    EXPECT_NE(msg.find("learner 1, state 3, action 0"), std::string::npos) << msg;
}

TEST(ScenarioIo, UnknownFieldsWarn) {
    auto j = chain_json();
    j["author"] = "someone";
    j["learners"][0]["label"] = "A";
    std::vector<std::string> warnings;
    EXPECT_NO_THROW(scenario_from_json(j, &warnings));
    ASSERT_EQ(warnings.size(), 2u);
    EXPECT_NE(warnings[0].find("author"), std::string::npos);
    EXPECT_NE(warnings[1].find("learners[0].label"), std::string::npos);
}

TEST(ScenarioIo, ParseErrorsNameTheField) {
    auto missing = chain_json();
    missing.erase("r_star");
    EXPECT_NE(message_of<ParseError>(missing).find("r_star"), std::string::npos);

    auto wrong_type = chain_json();
    wrong_type["learners"][0]["gamma"] = "high";
    EXPECT_NE(message_of<ParseError>(wrong_type).find("learners[0].gamma"), std::string::npos);

    auto short_row = chain_json();
    short_row["learners"][0]["transitions"][1][2] = {0.0, 1.0};
    EXPECT_NE(message_of<ParseError>(short_row).find("learners[0].transitions[1][2]"), std::string::npos);

    auto bad_count = chain_json();
    bad_count["n_states"] = 4;
    EXPECT_NE(message_of<ParseError>(bad_count).find("transitions"), std::string::npos);

    EXPECT_THROW(scenario_from_json(nlohmann::json::array()), ParseError);

    const auto path = temp_path("broken.json");
    std::ofstream(path) << "{ \"name\": ";
    EXPECT_THROW(load_scenario(path), ParseError);
    std::filesystem::remove(path);
    EXPECT_THROW(load_scenario(temp_path("does_not_exist.json")), ParseError);
}

TEST(ScenarioIo, RangeErrorsAreValidationErrors) {
    auto j = chain_json();
    j["initial_states"] = {7};
    EXPECT_THROW(scenario_from_json(j), ValidationError);
    auto g = chain_json();
    g["learners"][0]["gamma"] = 1.0;
    EXPECT_THROW(scenario_from_json(g), ValidationError);
}

TEST(Emit, EmptyTableIsHeaderOnly) {
    EXPECT_EQ(emit(ResultTable{}, OutputFormat::csv),
              "scenario,strategy,learner,relative_loss,effort,teachable,epsilon,seed_count\n");
}

TEST(Emit, SixDecimalsAndNoNegativeZero) {
    ResultTable t;
    t.rows.push_back({"x", "algorithm1", 0, -0.0, 0.4, true, 0.01, 1});
    t.rows.push_back({"x", "class_a", 1, -0.1234567, 1.0 / 3.0, false, 0.01, 3});
    const auto out = lines(emit(t, OutputFormat::csv));
    ASSERT_EQ(out.size(), 3u);
    EXPECT_EQ(out[1], "x,algorithm1,0,0.000000,0.400000,true,0.01,1");
    EXPECT_EQ(out[2], "x,class_a,1,-0.123457,0.333333,false,0.01,3");
}

TEST(Emit, LocaleIndependent) {
    ResultTable t;
    t.rows.push_back({"x", "individual", 0, -0.5, 0.25, true, 0.01, 1});
    const auto reference = emit(t, OutputFormat::csv);
    const char* old = std::setlocale(LC_ALL, nullptr);
    const std::string saved = old ? old : "C";
    bool switched = false;
    for (const char* name : {"de_DE.UTF-8", "fr_FR.UTF-8", "de_DE", "C.UTF-8"})
        if (std::setlocale(LC_ALL, name)) {
            switched = true;
            break;
        }
    EXPECT_EQ(emit(t, OutputFormat::csv), reference);
    std::setlocale(LC_ALL, saved.c_str());
    if (!switched) GTEST_SKIP() << "no alternative locale installed";
}

TEST(RunBenchmark, ChainGivesEightRowsInCanonicalOrder) {
    BenchConfig cfg;
    cfg.scenarios = {"chain"};
    cfg.strategies = {"algorithm1", "individual", "class_b", "class_a"};
    const auto table = run_benchmark(cfg);
    ASSERT_EQ(table.rows.size(), 8u);
    const std::vector<std::string> order{"class_a", "class_a", "class_b", "class_b",
                                         "individual", "individual", "algorithm1", "algorithm1"};
    for (std::size_t i = 0; i < 8; ++i) {
        EXPECT_EQ(table.rows[i].strategy, order[i]);
        EXPECT_EQ(table.rows[i].learner, i % 2);
    }
    EXPECT_NEAR(table.rows[6].effort, 0.6, 1e-12);
    EXPECT_NEAR(table.rows[4].effort, 0.8, 1e-12);
    EXPECT_LT(table.rows[1].relative_loss, 0.0);
    EXPECT_LT(table.rows[2].relative_loss, 0.0);
    EXPECT_EQ(lines(emit(table, OutputFormat::csv)).size(), 9u);
}

TEST(RunBenchmark, HomogeneousClassHasIdenticalLosses) {
    BenchConfig cfg;
    cfg.scenarios = {"chain_homogeneous"};
    const auto table = run_benchmark(cfg);
    for (const auto& r : table.rows) {
        EXPECT_EQ(r.relative_loss, 0.0);
        EXPECT_TRUE(r.teachable);
    }
    EXPECT_EQ(table.rows.front().effort, table.rows.back().effort);
}

TEST(RunBenchmark, RandomAveragesOverSeeds) {
    BenchConfig cfg;
    cfg.scenarios = {"random"};
    cfg.seeds = {1, 2, 3};
    cfg.strategies = {"individual"};
    const auto table = run_benchmark(cfg);
    ASSERT_EQ(table.rows.size(), 2u);
    EXPECT_EQ(table.rows[0].seed_count, 3);

    double effort_sum = 0.0;
    for (std::uint64_t seed : cfg.seeds) {
        const auto c = random_class(random_spec_from_seed(seed)).class_spec;
        const auto irl = bench_irl_config(c, cfg);
        effort_sum += individual_strategy(c, single_learner_demos(c, irl, cfg.cap), irl).effort;
    }
    EXPECT_NEAR(table.rows[0].effort, effort_sum / 3.0, 1e-12);
}

TEST(RunBenchmark, UsageErrors) {
    BenchConfig cfg;
    cfg.scenarios = {"nowhere"};
    EXPECT_THROW(run_benchmark(cfg), UsageError);
    cfg.scenarios = {"chain"};
    cfg.strategies = {"class_z"};
    EXPECT_THROW(run_benchmark(cfg), UsageError);
    cfg.strategies = {"best"};
    EXPECT_THROW(run_benchmark(cfg), UsageError);
    cfg.strategies = {};
    EXPECT_THROW(run_benchmark(cfg), UsageError);
    cfg.strategies = {"individual"};
    cfg.cap = 0;
    EXPECT_THROW(run_benchmark(cfg), UsageError);
}

TEST(RunBenchmark, FailuresNameScenarioAndStrategy) {
    auto bundle = two_agent_chain(0.9, 0.05);
    bundle.name = "shifted";
    bundle.class_spec.r_star.array() -= 3.0; // optimal values sum below zero
    const auto path = temp_path("shifted.json");
    save_scenario(bundle, path);
    BenchConfig cfg;
    cfg.scenarios = {path};
    try {
        run_benchmark(cfg);
        ADD_FAILURE() << "expected a failure";
    } catch (const BenchFailure& e) {
        EXPECT_EQ(e.scenario(), "shifted");
        EXPECT_EQ(e.strategy(), "class_a");
    }
    std::filesystem::remove(path);
}

TEST(RunBenchmark, ByteIdenticalAcrossRuns) {
    BenchConfig cfg;
    cfg.scenarios = {"table1", "chain"};
    cfg.seeds = {0, 1};
    EXPECT_EQ(emit(run_benchmark(cfg), OutputFormat::csv), emit(run_benchmark(cfg), OutputFormat::csv));
    const auto text = emit(run_benchmark(cfg), OutputFormat::text);
    EXPECT_NE(text.find("# epsilon: auto"), std::string::npos);
}
