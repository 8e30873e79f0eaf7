#pragma once

// Shared helpers for the test suite: seeded random models and an independent
// brute-force LP oracle.

#include "classteach/linprog.hpp"
#include "classteach/mdp.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <vector>

namespace testing_support {

using namespace classteach;

inline double uniform(std::mt19937_64& gen, double lo = 0.0, double hi = 1.0) {
    return std::uniform_real_distribution<double>(lo, hi)(gen);
}

inline RewardlessMDP random_mdp(std::mt19937_64& gen, int n, int k, double gamma, double sparsity = 0.0) {
    std::vector<Matrix> p(static_cast<std::size_t>(k), Matrix(n, n));
    for (auto& m : p)
        for (int s = 0; s < n; ++s) {
            for (int t = 0; t < n; ++t) m(s, t) = uniform(gen) < sparsity ? 0.0 : uniform(gen);
            if (m.row(s).sum() == 0.0) m(s, s) = 1.0;
            m.row(s) /= m.row(s).sum();
            // Force exact stochasticity after normalization rounding.
            m(s, n - 1) = 0.0;
            m(s, n - 1) = std::max(0.0, 1.0 - m.row(s).sum());
        }
    return RewardlessMDP(std::move(p), gamma);
}

inline Reward random_reward(std::mt19937_64& gen, int n, double lo = 0.0, double hi = 1.0) {
    Reward r(n);
    for (int s = 0; s < n; ++s) r(s) = uniform(gen, lo, hi);
    return r;
}

inline Policy random_policy(std::mt19937_64& gen, int n, int k) {
    Matrix pi(n, k);
    for (int s = 0; s < n; ++s) {
        for (int a = 0; a < k; ++a) pi(s, a) = uniform(gen);
        pi.row(s) /= pi.row(s).sum();
    }
    return Policy(pi);
}

/// Maximum of c'x over {G x >= h, l <= x <= u} by enumerating every vertex:
/// all n-subsets of the constraints taken as equalities. Bounded boxes only.
/// Returns nullopt when no vertex is feasible (the polytope is empty).
inline std::optional<double> vertex_oracle(const LinearProgram& lp, double tol = 1e-9) {
    const int n = static_cast<int>(lp.n_variables());
    const int m = static_cast<int>(lp.n_rows());
    // All constraints as a_i x >= b_i.
    Eigen::MatrixXd a(m + 2 * n, n);
    Eigen::VectorXd b(m + 2 * n);
    a.topRows(m) = lp.inequalities;
    b.head(m) = lp.rhs;
    for (int j = 0; j < n; ++j) {
        a.row(m + j) = Eigen::RowVectorXd::Unit(n, j);
        b(m + j) = lp.lower_bounds(j);
        a.row(m + n + j) = -Eigen::RowVectorXd::Unit(n, j);
        b(m + n + j) = -lp.upper_bounds(j);
    }
    const int total = m + 2 * n;
    std::optional<double> best;
    std::vector<int> pick(static_cast<std::size_t>(n));
    // Iterate combinations in lexicographic order.
    for (int i = 0; i < n; ++i) pick[static_cast<std::size_t>(i)] = i;
    while (true) {
        Eigen::MatrixXd sub(n, n);
        Eigen::VectorXd rhs(n);
        for (int i = 0; i < n; ++i) {
            sub.row(i) = a.row(pick[static_cast<std::size_t>(i)]);
            rhs(i) = b(pick[static_cast<std::size_t>(i)]);
        }
        Eigen::FullPivLU<Eigen::MatrixXd> lu(sub);
        if (lu.isInvertible()) {
            const Eigen::VectorXd x = lu.solve(rhs);
            if (((a * x - b).array() >= -tol).all()) {
                const double value = lp.objective.dot(x);
                if (!best || value > *best) best = value;
            }
        }
        int i = n - 1;
        while (i >= 0 && pick[static_cast<std::size_t>(i)] == total - n + i) --i;
        if (i < 0) break;
        ++pick[static_cast<std::size_t>(i)];
        for (int j = i + 1; j < n; ++j) pick[static_cast<std::size_t>(j)] = pick[static_cast<std::size_t>(j - 1)] + 1;
    }
    return best;
}

/// Random instance with <= 4 variables and <= 6 rows; roughly half of them
/// are built around a known interior point so they are feasible.
inline LinearProgram random_lp(std::mt19937_64& gen) {
    const int n = 1 + static_cast<int>(gen() % 4);
    const int m = static_cast<int>(gen() % 7);
    LinearProgram lp;
    lp.objective = Eigen::VectorXd(n);
    for (int j = 0; j < n; ++j) lp.objective(j) = uniform(gen, -1.0, 1.0);
    lp.lower_bounds = Eigen::VectorXd(n);
    lp.upper_bounds = Eigen::VectorXd(n);
    for (int j = 0; j < n; ++j) {
        lp.lower_bounds(j) = uniform(gen, -2.0, 0.0);
        lp.upper_bounds(j) = lp.lower_bounds(j) + uniform(gen, 0.5, 3.0);
    }
    const bool anchored = gen() % 2 == 0;
    Eigen::VectorXd x0(n);
    for (int j = 0; j < n; ++j) x0(j) = uniform(gen, lp.lower_bounds(j), lp.upper_bounds(j));
    lp.inequalities = Eigen::MatrixXd(m, n);
    lp.rhs = Eigen::VectorXd(m);
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < n; ++j) lp.inequalities(i, j) = uniform(gen, -1.0, 1.0);
        const double at = lp.inequalities.row(i).dot(x0);
        lp.rhs(i) = anchored ? at - uniform(gen, 0.0, 0.5) : at + uniform(gen, -0.5, 0.5);
    }
    return lp;
}

} // namespace testing_support
