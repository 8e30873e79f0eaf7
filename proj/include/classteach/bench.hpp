#pragma once

// Benchmark driver: runs teaching strategies over named or file-based
// scenarios and renders the results as CSV or an aligned text table.

#include "classteach/scenario_io.hpp"
#include "classteach/scenarios.hpp"
#include "classteach/teacher.hpp"

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <locale>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace classteach {

enum class OutputFormat { csv, text };

struct BenchConfig {
    std::vector<std::string> scenarios{"table1"};
    std::vector<std::string> strategies{"class_a", "class_b", "individual", "algorithm1"};
    std::vector<std::uint64_t> seeds{0, 1, 2, 3, 4};
    std::optional<double> epsilon; // default: 0.1 * r_max * (1 - max gamma of the class)
    double r_max = 1.0;
    double tie_tol = kDefaultTieTol;
    int cap = 1000;
    OutputFormat format = OutputFormat::csv;

    void validate() const {
        if (scenarios.empty()) throw UsageError("no scenarios requested");
        if (strategies.empty()) throw UsageError("no strategies requested");
        if (epsilon && !(*epsilon > 0.0)) throw UsageError("--epsilon must be positive");
        if (!(r_max > 0.0)) throw UsageError("--rmax must be positive");
        if (!(tie_tol >= 0.0)) throw UsageError("--tie-tol must be non-negative");
        if (cap < 1) throw UsageError("--cap must be positive");
    }
};

/// A failure inside one (scenario, strategy) cell.
class BenchFailure : public SolverFailure {
public:
    BenchFailure(std::string scenario, std::string strategy, const std::string& what)
        : SolverFailure("scenario '" + scenario + "', strategy '" + strategy + "': " + what),
          scenario_(std::move(scenario)), strategy_(std::move(strategy)) {}
    const std::string& scenario() const { return scenario_; }
    const std::string& strategy() const { return strategy_; }

private:
    std::string scenario_;
    std::string strategy_;
};

struct ResultRow {
    std::string scenario;
    std::string strategy;
    std::size_t learner = 0;
    double relative_loss = 0.0;
    double effort = 0.0;
    bool teachable = false;
    double epsilon = 0.0;
    int seed_count = 1;
};

struct ResultTable {
    std::vector<ResultRow> rows;
    BenchConfig config;

    /// Mean loss across learners for one (scenario, strategy).
    std::optional<double> mean_loss(const std::string& scenario, const std::string& strategy) const {
        double sum = 0.0;
        int n = 0;
        for (const auto& r : rows)
            if (r.scenario == scenario && r.strategy == strategy) {
                sum += r.relative_loss;
                ++n;
            }
        if (n == 0) return std::nullopt;
        return sum / n;
    }
};

// ---------------------------------------------------------------------------
// Name resolution

/// Instances behind one requested scenario name (several for "random").
struct ScenarioInstances {
    std::string name;
    std::vector<ScenarioBundle> bundles;
};

inline std::vector<ScenarioInstances> resolve_scenario(const std::string& name, const std::vector<std::uint64_t>& seeds) {
    if (name == "table1") {
        std::vector<ScenarioInstances> out;
        for (const char* n : {"brushing", "addition", "random", "gamma"}) {
            auto part = resolve_scenario(n, seeds);
            out.insert(out.end(), part.begin(), part.end());
        }
        return out;
    }
    if (name == "chain") return {{name, {two_agent_chain(0.9, 0.05)}}};
    if (name == "chain_homogeneous") return {{name, {two_agent_chain(0.9, 1.0)}}};
    if (name == "brushing") return {{name, {brushing_scenario()}}};
    if (name == "addition") return {{name, {addition_scenario()}}};
    if (name == "gamma") return {{name, {gamma_variant_scenario(0.9, 0.01)}}};
    if (name == "random") {
        if (seeds.empty()) throw UsageError("scenario 'random' needs at least one seed");
        ScenarioInstances inst{name, {}};
        for (auto seed : seeds) inst.bundles.push_back(random_class(random_spec_from_seed(seed)));
        return {inst};
    }
    if (name.size() > 5 && name.ends_with(".json")) {
        auto bundle = load_scenario(name);
        return {{bundle.name, {std::move(bundle)}}};
    }
    throw UsageError("unknown scenario '" + name +
                     "' (expected chain, chain_homogeneous, brushing, addition, gamma, random, table1 or a .json file)");
}

struct StrategyRequest {
    StrategyKind kind;
    std::size_t learner = 0;
};

/// "class_<letter>", "individual" or "algorithm1".
inline StrategyRequest parse_strategy(const std::string& name) {
    if (name == "individual") return {StrategyKind::individual};
    if (name == "algorithm1") return {StrategyKind::algorithm1};
    if (name.size() == 7 && name.starts_with("class_") && name[6] >= 'a' && name[6] <= 'z')
        return {StrategyKind::class_of, static_cast<std::size_t>(name[6] - 'a')};
    throw UsageError("unknown strategy '" + name + "' (expected class_a, class_b, ..., individual, algorithm1)");
}

inline IRLConfig bench_irl_config(const ClassSpec& c, const BenchConfig& cfg) {
    double gamma = 0.0;
    for (const auto& m : c.learners) gamma = std::max(gamma, m.gamma());
    IRLConfig out = IRLConfig::for_gamma(gamma, cfg.r_max);
    if (cfg.epsilon) out.epsilon = *cfg.epsilon;
    return out;
}

// ---------------------------------------------------------------------------

/// Rows come out ordered by scenario (request order), strategy (canonical
/// order: class_a, class_b, ..., individual, algorithm1) and learner.
inline ResultTable run_benchmark(const BenchConfig& cfg) {
    cfg.validate();
    std::vector<StrategyRequest> strategies;
    for (const auto& s : cfg.strategies) {
        const auto req = parse_strategy(s);
        if (std::none_of(strategies.begin(), strategies.end(), [&](const StrategyRequest& r) {
                return r.kind == req.kind && r.learner == req.learner;
            }))
            strategies.push_back(req);
    }
    auto rank = [](const StrategyRequest& r) {
        return std::pair{static_cast<int>(r.kind), r.learner};
    };
    std::sort(strategies.begin(), strategies.end(),
              [&](const StrategyRequest& x, const StrategyRequest& y) { return rank(x) < rank(y); });

    std::vector<ScenarioInstances> scenarios;
    for (const auto& name : cfg.scenarios) {
        auto part = resolve_scenario(name, cfg.seeds);
        scenarios.insert(scenarios.end(), part.begin(), part.end());
    }

    ResultTable table;
    table.config = cfg;
    for (const auto& inst : scenarios) {
        const std::size_t n_learners = inst.bundles.front().class_spec.n_learners();
        for (const auto& b : inst.bundles)
            if (b.class_spec.n_learners() != n_learners)
                throw UsageError("scenario '" + inst.name + "' mixes learner counts across seeds");
        for (const auto& req : strategies)
            if (req.kind == StrategyKind::class_of && req.learner >= n_learners)
                throw UsageError("strategy '" + strategy_name(req.kind, req.learner) + "' needs a learner that scenario '" +
                                 inst.name + "' does not have");

        // Accumulated per strategy over instances.
        std::vector<std::vector<double>> loss(strategies.size(), std::vector<double>(n_learners, 0.0));
        std::vector<double> eff(strategies.size(), 0.0);
        bool teachable = true;
        double epsilon = 0.0;

        for (const auto& bundle : inst.bundles) {
            const ClassSpec& c = bundle.class_spec;
            const IRLConfig irl = bench_irl_config(c, cfg);
            epsilon = irl.epsilon;
            std::optional<std::vector<Demonstration>> singles;
            for (std::size_t k = 0; k < strategies.size(); ++k) {
                const auto& req = strategies[k];
                const std::string label = strategy_name(req.kind, req.learner);
                try {
                    if (!singles) singles = single_learner_demos(c, irl, cfg.cap, cfg.tie_tol);
                    StrategyResult res;
                    switch (req.kind) {
                    case StrategyKind::class_of: res = class_of_strategy(c, *singles, req.learner, irl, cfg.tie_tol); break;
                    case StrategyKind::individual: res = individual_strategy(c, *singles, irl, cfg.tie_tol); break;
                    case StrategyKind::algorithm1: res = algorithm1_strategy(c, *singles, irl, cfg.tie_tol); break;
                    }
                    for (std::size_t l = 0; l < n_learners; ++l) loss[k][l] += res.relative_loss[l];
                    eff[k] += res.effort;
                } catch (const BenchFailure&) {
                    throw;
                } catch (const SolverFailure& e) {
                    throw BenchFailure(bundle.name, label, e.what());
                } catch (const DegenerateScenario& e) {
                    throw BenchFailure(bundle.name, label, e.what());
                } catch (const InfeasibleDemonstration& e) {
                    throw BenchFailure(bundle.name, label, e.what());
                }
            }
            teachable = teachable && is_class_teachable(c, cfg.tie_tol);
        }

        const auto count = static_cast<double>(inst.bundles.size());
        for (std::size_t k = 0; k < strategies.size(); ++k)
            for (std::size_t l = 0; l < n_learners; ++l)
                table.rows.push_back({inst.name, strategy_name(strategies[k].kind, strategies[k].learner), l,
                                      loss[k][l] / count, eff[k] / count, teachable, epsilon,
                                      static_cast<int>(inst.bundles.size())});
    }
    return table;
}

// ---------------------------------------------------------------------------
// Output

namespace detail {

/// Fixed six decimals, independent of the global locale; -0 prints as 0.
inline std::string fixed6(double x) {
    if (x == 0.0) x = 0.0;
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::fixed, 6);
    std::string s(buf, res.ptr);
    if (s == "-0.000000") s = "0.000000";
    return s;
}

/// Six significant digits, locale-independent (knob echo, epsilon column).
inline std::string shortest(double x) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 6);
    return std::string(buf, res.ptr);
}

} // namespace detail

inline constexpr const char* kCsvHeader = "scenario,strategy,learner,relative_loss,effort,teachable,epsilon,seed_count";

inline std::string emit(const ResultTable& table, OutputFormat format) {
    std::string out;
    if (format == OutputFormat::csv) {
        out += kCsvHeader;
        out += '\n';
        for (const auto& r : table.rows) {
            out += r.scenario + ',' + r.strategy + ',' + std::to_string(r.learner) + ',' + detail::fixed6(r.relative_loss) +
                   ',' + detail::fixed6(r.effort) + ',' + (r.teachable ? "true" : "false") + ',' +
                   detail::shortest(r.epsilon) + ',' + std::to_string(r.seed_count) + '\n';
        }
        return out;
    }

    const auto& c = table.config;
    std::ostringstream echo;
    echo.imbue(std::locale::classic());
    echo << "# scenarios:";
    for (const auto& s : c.scenarios) echo << ' ' << s;
    echo << "\n# strategies:";
    for (const auto& s : c.strategies) echo << ' ' << s;
    echo << "\n# seeds:";
    for (auto s : c.seeds) echo << ' ' << s;
    echo << "\n# epsilon: " << (c.epsilon ? detail::shortest(*c.epsilon) : std::string("auto")) << "  r_max: "
         << detail::shortest(c.r_max) << "  tie_tol: " << detail::shortest(c.tie_tol) << "  cap: " << c.cap << '\n';
    out += echo.str();

    const std::vector<std::string> head{"scenario", "strategy", "learner", "loss", "effort", "teachable", "epsilon", "seeds"};
    std::vector<std::vector<std::string>> cells{head};
    for (const auto& r : table.rows)
        cells.push_back({r.scenario, r.strategy, std::to_string(r.learner), detail::fixed6(r.relative_loss),
                         detail::fixed6(r.effort), r.teachable ? "yes" : "no", detail::shortest(r.epsilon),
                         std::to_string(r.seed_count)});
    std::vector<std::size_t> width(head.size(), 0);
    for (const auto& row : cells)
        for (std::size_t i = 0; i < row.size(); ++i) width[i] = std::max(width[i], row[i].size());
    for (const auto& row : cells) {
        std::string line;
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) line += "  ";
            line += row[i] + std::string(width[i] - row[i].size(), ' ');
        }
        while (!line.empty() && line.back() == ' ') line.pop_back();
        out += line + '\n';
    }
    return out;
}

} // namespace classteach
