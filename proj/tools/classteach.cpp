// classteach: command-line front end.
//
//   classteach bench     --scenario table1 --seed 0 --seed 1 --format csv
//   classteach teach     --scenario brushing
//   classteach check     --scenario addition
//   classteach irl       --scenario chain --learner 0 --demo 2:1
//   classteach threshold --gamma 0.9
//   classteach export    --scenario chain --out chain.json
//
// Exit codes: 0 ok, 2 usage/validation, 3 numerical failure.

#include "classteach/bench.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

using namespace classteach;

namespace {

struct Knobs {
    std::optional<double> epsilon;
    double r_max = 1.0;
    double tie_tol = kDefaultTieTol;
    int cap = 1000;
    std::vector<std::uint64_t> seeds;
    std::string format = "text";
    std::string out;
};

void add_knobs(CLI::App* cmd, Knobs& k, bool many_seeds) {
    cmd->add_option("--epsilon", k.epsilon, "IRL margin (default 0.1*rmax*(1-gamma_max))");
    cmd->add_option("--rmax", k.r_max, "reward bound")->capture_default_str();
    cmd->add_option("--tie-tol", k.tie_tol, "tolerance for optimal-action ties")->capture_default_str();
    cmd->add_option("--cap", k.cap, "rollout length cap")->capture_default_str();
    auto* seed = cmd->add_option("--seed", k.seeds, many_seeds ? "seeds for random scenarios (repeatable)"
                                                               : "seed for the random scenario");
    if (!many_seeds) seed->expected(1);
    else seed->delimiter(',');
    cmd->add_option("--format", k.format, "output format")->check(CLI::IsMember({"csv", "text"}))->capture_default_str();
    cmd->add_option("--out", k.out, "write output to this path instead of stdout");
}

void write(const Knobs& k, const std::string& text) {
    if (k.out.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream f(k.out);
    if (!f) throw UsageError("cannot open '" + k.out + "' for writing");
    f << text;
}

IRLConfig irl_config(const ClassSpec& c, const Knobs& k) {
    BenchConfig b;
    b.epsilon = k.epsilon;
    b.r_max = k.r_max;
    b.tie_tol = k.tie_tol;
    b.cap = k.cap;
    b.validate();
    return bench_irl_config(c, b);
}

ScenarioBundle single_scenario(const std::string& name, const Knobs& k) {
    if (name == "table1") throw UsageError("'table1' names several scenarios; pick one");
    const std::vector<std::uint64_t> seeds = k.seeds.empty() ? std::vector<std::uint64_t>{0} : k.seeds;
    auto inst = resolve_scenario(name, {seeds.front()});
    return inst.front().bundles.front();
}

Demonstration parse_demo(const std::string& text) {
    Demonstration d;
    std::stringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        if (item.empty()) continue;
        const auto colon = item.find(':');
        if (colon == std::string::npos) throw UsageError("demo pair '" + item + "' is not of the form state:action");
        try {
            std::size_t used = 0;
            const int s = std::stoi(item.substr(0, colon), &used);
            const std::string rest = item.substr(colon + 1);
            std::size_t used2 = 0;
            const int a = std::stoi(rest, &used2);
            if (used != colon || used2 != rest.size()) throw std::invalid_argument(item);
            d.add({s, a});
        } catch (const std::logic_error&) {
            throw UsageError("demo pair '" + item + "' is not of the form state:action");
        }
    }
    return d;
}

std::string vec(const Eigen::VectorXd& v) {
    std::string out = "[";
    for (Eigen::Index i = 0; i < v.size(); ++i) out += (i ? ", " : "") + detail::fixed6(v(i));
    return out + "]";
}

std::string demo_text(const Demonstration& d) {
    std::string out;
    for (const auto& p : d) out += (out.empty() ? "" : ",") + std::to_string(p.state) + ":" + std::to_string(p.action);
    return out.empty() ? "-" : out;
}

int run(int argc, char** argv) {
    CLI::App app{"Machine teaching of sequential tasks to classes of IRL learners"};
    app.require_subcommand(1);

    Knobs k;
    BenchConfig bench_cfg;
    bench_cfg.seeds.clear();
    auto* bench = app.add_subcommand("bench", "run teaching strategies and print a result table");
    bench->add_option("--scenario", bench_cfg.scenarios,
                      "chain, chain_homogeneous, brushing, addition, gamma, random, table1 or a .json file")
        ->delimiter(',');
    bench->add_option("--strategy", bench_cfg.strategies, "class_a, class_b, ..., individual, algorithm1")
        ->delimiter(',');
    add_knobs(bench, k, true);

    std::string scenario = "chain";
    auto* teach = app.add_subcommand("teach", "build a class teaching plan");
    auto* check = app.add_subcommand("check", "decide class teachability and print optimal-action sets");
    auto* irl = app.add_subcommand("irl", "recover a reward from a demonstration for one learner");
    auto* exp = app.add_subcommand("export", "write a built-in scenario as JSON");
    for (auto* cmd : {teach, check, irl, exp}) {
        cmd->add_option("--scenario", scenario, "scenario name or .json file")->capture_default_str();
        add_knobs(cmd, k, false);
    }
    std::size_t learner = 0;
    std::string demo;
    irl->add_option("--learner", learner, "learner index")->capture_default_str();
    irl->add_option("--demo", demo, "pairs state:action separated by commas")->required();

    double gamma = 0.9;
    auto* threshold = app.add_subcommand("threshold", "success-probability thresholds of the chain");
    threshold->add_option("--gamma", gamma, "discount in (0.5, 1)")->capture_default_str();
    threshold->add_option("--out", k.out, "write output to this path instead of stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    if (*bench) {
        bench_cfg.epsilon = k.epsilon;
        bench_cfg.r_max = k.r_max;
        bench_cfg.tie_tol = k.tie_tol;
        bench_cfg.cap = k.cap;
        if (!k.seeds.empty()) bench_cfg.seeds = k.seeds;
        if (bench_cfg.seeds.empty()) bench_cfg.seeds = BenchConfig{}.seeds;
        if (bench_cfg.scenarios.empty()) bench_cfg.scenarios = BenchConfig{}.scenarios;
        if (bench_cfg.strategies.empty()) bench_cfg.strategies = BenchConfig{}.strategies;
        bench_cfg.format = k.format == "csv" ? OutputFormat::csv : OutputFormat::text;
        write(k, emit(run_benchmark(bench_cfg), bench_cfg.format));
        return 0;
    }

    if (*threshold) {
        const Thresholds t = success_threshold(gamma);
        std::ostringstream out;
        out << "gamma " << detail::shortest(gamma) << "\n"
            << "convention_threshold " << detail::fixed6(t.convention_threshold) << "   (1-gamma)/gamma\n"
            << "paper_threshold      " << detail::fixed6(t.paper_threshold) << "   (1-gamma)/(gamma(2gamma-1))\n"
            << "bisection_estimate   " << detail::fixed6(t.bisection_estimate) << "   switch point found by value iteration\n";
        write(k, out.str());
        return 0;
    }

    std::vector<std::string> warnings;
    const ScenarioBundle bundle = [&] {
        if (scenario.ends_with(".json")) return load_scenario(scenario, &warnings);
        return single_scenario(scenario, k);
    }();
    for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
    const ClassSpec& c = bundle.class_spec;
    c.validate();

    if (*exp) {
        if (k.out.empty()) std::cout << scenario_to_json(bundle).dump(2) << '\n';
        else save_scenario(bundle, k.out);
        return 0;
    }

    const IRLConfig cfg = irl_config(c, k);
    std::ostringstream out;
    if (*teach) {
        const TeachingPlan plan = plan_teaching(c, cfg, k.cap, k.tie_tol);
        if (k.format == "csv") {
            out << "learner,demo\nclass," << demo_text(plan.class_demo) << '\n';
            for (std::size_t l = 0; l < plan.extra_demos.size(); ++l)
                out << l << ',' << demo_text(plan.extra_demos[l]) << '\n';
        } else {
            out << "scenario " << bundle.name << "\nteachable " << (plan.teachable ? "true" : "false")
                << "\nepsilon " << detail::shortest(cfg.epsilon) << "\nclass_demo " << demo_text(plan.class_demo) << '\n';
            for (std::size_t l = 0; l < plan.extra_demos.size(); ++l)
                out << "extra[" << l << "] " << demo_text(plan.extra_demos[l]) << '\n';
            out << "effort " << detail::fixed6(effort(plan, c.n_states())) << '\n';
        }
    } else if (*check) {
        const auto targets = target_action_sets(c, k.tie_tol);
        out << "teachable " << (is_class_teachable(c, k.tie_tol) ? "true" : "false") << '\n';
        for (std::size_t l = 0; l < targets.size(); ++l) out << "learner " << l << ": " << to_string(targets[l]) << '\n';
    } else if (*irl) {
        if (learner >= c.n_learners()) throw UsageError("--learner out of range");
        const auto& m = c.learners[learner];
        const IRLResult res = irl_solve(m, parse_demo(demo), cfg);
        if (!res.feasible) throw InfeasibleDemonstration("demonstration is infeasible for learner " + std::to_string(learner));
        out << "value  " << vec(res.value) << "\nreward " << vec(res.reward) << "\ncompatible "
            << (reward_compatible(m, res.reward, c.r_star, k.tie_tol) ? "true" : "false") << '\n';
    }
    write(k, out.str());
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << '\n';
    } catch (const ValidationError& e) {
        std::cerr << "validation error: " << e.what() << '\n';
    } catch (const ContractViolation& e) {
        std::cerr << "invalid input: " << e.what() << '\n';
    } catch (const DomainError& e) {
        std::cerr << "domain error: " << e.what() << '\n';
    } catch (const InfeasibleDemonstration& e) {
        std::cerr << "infeasible demonstration: " << e.what() << '\n';
    } catch (const SolverFailure& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return 3;
    } catch (const DegenerateScenario& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return 3;
    }
    return 2;
}
