// Maximum-entropy solver against bisection and brute-force grid oracles.

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include <entrocorr/entropy.hpp>
#include <entrocorr/maxent.hpp>

#include "support/oracles.hpp"

using namespace entrocorr;
using Catch::Matchers::WithinAbs;

namespace {
bool raises(errc code, const std::function<void()>& fn)
{
    try {
        fn();
    } catch (const Error& e) {
        return e.code() == code;
    }
    return false;
}

const std::vector<double> kEnergies{0.0, 1.0, 2.0};
}  // namespace

TEST_CASE("unconstrained problem returns the uniform distribution")
{
    const auto sol = solve_maxent(MaxEntProblem(3, {}, {}));
    for (std::size_t i = 0; i < 3; ++i) CHECK_THAT(sol.dist[i], WithinAbs(1.0 / 3.0, 1e-15));
    CHECK(sol.multipliers.empty());
    CHECK(sol.residual == 0.0);
}

TEST_CASE("symmetric target keeps the uniform distribution")
{
    const auto sol = solve_maxent(MaxEntProblem(3, {kEnergies}, {1.0}));
    for (std::size_t i = 0; i < 3; ++i) CHECK_THAT(sol.dist[i], WithinAbs(1.0 / 3.0, 1e-9));
    CHECK(sol.residual <= 1e-10);
}

TEST_CASE("asymmetric target matches the bisection oracle")
{
    const auto sol = solve_maxent(MaxEntProblem(3, {kEnergies}, {0.5}));
    CHECK_THAT(sol.dist[0], WithinAbs(oracle::kPHalf0, 1e-8));
    CHECK_THAT(sol.dist[1], WithinAbs(oracle::kPHalf1, 1e-8));
    CHECK_THAT(sol.dist[2], WithinAbs(oracle::kPHalf2, 1e-8));
    CHECK_THAT(sol.multipliers[0], WithinAbs(oracle::kBetaHalf, 1e-6));
    CHECK_THAT(sol.entropy.nats(), WithinAbs(oracle::kSHalf, 1e-8));
    CHECK(sol.residual <= 1e-10);
}

TEST_CASE("boltzmann closed form")
{
    const auto u = boltzmann(kEnergies, 0.0);
    for (std::size_t i = 0; i < 3; ++i) CHECK_THAT(u[i], WithinAbs(1.0 / 3.0, 1e-15));

    const auto b = boltzmann(std::vector<double>{0.0, std::numbers::ln2}, 1.0);
    CHECK_THAT(b[0], WithinAbs(2.0 / 3.0, 1e-14));
    CHECK_THAT(b[1], WithinAbs(1.0 / 3.0, 1e-14));

    const auto eq = boltzmann(std::vector<double>{7.0, 7.0, 7.0, 7.0}, 3.5);
    for (std::size_t i = 0; i < 4; ++i) CHECK_THAT(eq[i], WithinAbs(0.25, 1e-15));

    // max-shift keeps huge exponents finite
    const auto big = boltzmann(std::vector<double>{-1e4, 0.0, 1e4}, 100.0);
    CHECK_THAT(big[0], WithinAbs(1.0, 1e-14));
    CHECK(std::isfinite(big[1]));

    CHECK(raises(errc::domain_error, [] { boltzmann(kEnergies, -0.5); }));
    CHECK(raises(errc::empty_input, [] { boltzmann(std::vector<double>{}, 1.0); }));
}

TEST_CASE("moment matching on randomized feasible problems")
{
    std::mt19937_64 gen(31);
    std::uniform_real_distribution<double> uf(-1.0, 1.0);
    for (int t = 0; t < 200; ++t) {
        const std::size_t k = 3 + gen() % 8;
        const std::size_t c = 1 + gen() % 3;
        std::vector<std::vector<double>> features(c, std::vector<double>(k));
        for (auto& f : features)
            for (auto& v : f) v = uf(gen);
        // targets from a strictly interior distribution are always feasible
        const auto q = oracle::random_simplex(gen, k);
        std::vector<double> targets(c, 0.0);
        bool degenerate = false;
        for (std::size_t a = 0; a < c; ++a) {
            long double acc = 0.0L;
            for (std::size_t i = 0; i < k; ++i) acc += q[i] * features[a][i];
            targets[a] = static_cast<double>(acc);
            const auto [lo, hi] =
                std::minmax_element(features[a].begin(), features[a].end());
            if (*hi - *lo < 1e-3 || targets[a] - *lo < 1e-6 || *hi - targets[a] < 1e-6)
                degenerate = true;
        }
        if (degenerate) continue;
        const auto sol = solve_maxent(MaxEntProblem(k, features, targets));
        CHECK(sol.residual <= 1e-10);
        for (std::size_t a = 0; a < c; ++a) {
            long double acc = 0.0L;
            for (std::size_t i = 0; i < k; ++i) acc += sol.dist[i] * features[a][i];
            CHECK_THAT(static_cast<double>(acc), WithinAbs(targets[a], 1e-10));
        }
    }
}

TEST_CASE("solver entropy matches the brute-force grid oracle")
{
    std::mt19937_64 gen(32);
    std::uniform_real_distribution<double> uf(-1.0, 1.0);
    for (int t = 0; t < 12; ++t) {
        std::vector<double> f{uf(gen), uf(gen), uf(gen)};
        const auto [lo, hi] = std::minmax_element(f.begin(), f.end());
        if (*hi - *lo < 0.2) continue;
        const double target = *lo + (0.2 + 0.6 * (gen() % 100) / 100.0) * (*hi - *lo);
        const auto sol = solve_maxent(MaxEntProblem(3, {f}, {target}));
        const auto best = oracle::grid_max_entropy_3(f, target);
        REQUIRE(best.entropy >= 0.0);
        CHECK(sol.entropy.nats() >= best.entropy - 5e-3);
    }
}

TEST_CASE("returned multipliers reconstruct the distribution")
{
    std::mt19937_64 gen(33);
    std::uniform_real_distribution<double> uf(-1.0, 1.0);
    for (int t = 0; t < 100; ++t) {
        const std::size_t k = 3 + gen() % 6;
        std::vector<double> f(k);
        for (auto& v : f) v = uf(gen);
        const auto [lo, hi] = std::minmax_element(f.begin(), f.end());
        if (*hi - *lo < 0.2) continue;
        const double target = *lo + 0.35 * (*hi - *lo);
        const auto sol = solve_maxent(MaxEntProblem(k, {f}, {target}));
        // p_i ∝ exp(-lambda f_i), recomputed from scratch
        const auto rebuilt = oracle::boltzmann_dist(f, sol.multipliers[0]);
        for (std::size_t i = 0; i < k; ++i) CHECK_THAT(rebuilt[i], WithinAbs(sol.dist[i], 1e-10));
    }
}

TEST_CASE("single energy constraint recovers the generating Boltzmann distribution")
{
    std::mt19937_64 gen(34);
    std::uniform_real_distribution<double> ue(0.0, 3.0);
    for (int t = 0; t < 50; ++t) {
        std::vector<double> f{0.0, ue(gen), ue(gen) + 0.5, ue(gen) + 1.0};
        const double beta_star = 0.2 + 0.1 * static_cast<double>(t % 20);
        const auto target_dist = oracle::boltzmann_dist(f, beta_star);
        long double mean = 0.0L;
        for (std::size_t i = 0; i < f.size(); ++i) mean += target_dist[i] * f[i];
        const auto sol =
            solve_maxent(MaxEntProblem(f.size(), {f}, {static_cast<double>(mean)}));
        for (std::size_t i = 0; i < f.size(); ++i)
            CHECK_THAT(sol.dist[i], WithinAbs(target_dist[i], 1e-8));
        CHECK_THAT(sol.multipliers[0], WithinAbs(beta_star, 1e-6));
    }
}

TEST_CASE("dual objective never increases across accepted steps")
{
    std::mt19937_64 gen(35);
    std::uniform_real_distribution<double> uf(-1.0, 1.0);
    for (int t = 0; t < 50; ++t) {
        const std::size_t k = 3 + gen() % 8;
        std::vector<std::vector<double>> features(2, std::vector<double>(k));
        for (auto& f : features)
            for (auto& v : f) v = uf(gen);
        const auto q = oracle::random_simplex(gen, k);
        std::vector<double> targets(2, 0.0);
        bool degenerate = false;
        for (std::size_t a = 0; a < 2; ++a) {
            for (std::size_t i = 0; i < k; ++i) targets[a] += q[i] * features[a][i];
            const auto [lo, hi] =
                std::minmax_element(features[a].begin(), features[a].end());
            if (*hi - *lo < 1e-3 || targets[a] - *lo < 1e-6 || *hi - targets[a] < 1e-6)
                degenerate = true;
        }
        if (degenerate) continue;
        const auto sol = solve_maxent(MaxEntProblem(k, features, targets));
        for (std::size_t i = 1; i < sol.dual_trace.size(); ++i)
            CHECK(sol.dual_trace[i] <= sol.dual_trace[i - 1] + 1e-12);
    }
}

TEST_CASE("targets on or beyond the achievable hull are refused")
{
    // boundary and exterior single-feature targets die at construction
    CHECK(raises(errc::infeasible_target, [] { MaxEntProblem(3, {kEnergies}, {0.0}); }));
    CHECK(raises(errc::infeasible_target, [] { MaxEntProblem(3, {kEnergies}, {2.0}); }));
    CHECK(raises(errc::infeasible_target, [] { MaxEntProblem(3, {kEnergies}, {2.5}); }));
    CHECK(raises(errc::infeasible_target, [] { MaxEntProblem(3, {kEnergies}, {-0.5}); }));

    // per-feature intervals admit (0.5, 3.0) but no joint distribution does:
    // feature two forces nearly all mass onto state 2, feature one forbids it
    CHECK(raises(errc::infeasible_target, [] {
        (void)solve_maxent(MaxEntProblem(3, {{0.0, 1.0, 2.0}, {0.0, 1.0, 4.0}}, {0.5, 3.0}));
    }));
}

TEST_CASE("constant features are dropped when consistent, refused when not")
{
    const auto sol =
        solve_maxent(MaxEntProblem(3, {{2.0, 2.0, 2.0}, kEnergies}, {2.0, 0.5}));
    CHECK_THAT(sol.dist[0], WithinAbs(oracle::kPHalf0, 1e-8));
    CHECK(sol.multipliers.size() == 2);  // reported in input order, dropped one at zero
    CHECK(sol.multipliers[0] == 0.0);

    CHECK(raises(errc::infeasible_target,
                 [] { MaxEntProblem(3, {{2.0, 2.0, 2.0}}, {1.0}); }));
}

TEST_CASE("solver input validation")
{
    CHECK(raises(errc::shape_mismatch, [] { MaxEntProblem(3, {kEnergies}, {0.5, 0.5}); }));
    CHECK(raises(errc::shape_mismatch, [] { MaxEntProblem(2, {kEnergies}, {0.5}); }));
    CHECK(raises(errc::empty_shape, [] { MaxEntProblem(0, {}, {}); }));
    CHECK(raises(errc::domain_error,
                 [] { MaxEntProblem(3, {{0.0, std::nan(""), 2.0}}, {0.5}); }));
    CHECK(raises(errc::non_positive_tolerance,
                 [] { (void)solve_maxent(MaxEntProblem(3, {kEnergies}, {0.5}), 0.0); }));
    CHECK(raises(errc::no_convergence, [] {
        (void)solve_maxent(MaxEntProblem(3, {kEnergies}, {0.5}), 1e-10, 1);
    }));
}
