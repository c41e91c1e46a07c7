// Entropy functional, chain rule, mutual information, averaging property.

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include <entrocorr/entropy.hpp>

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
}  // namespace

TEST_CASE("sigma endpoint conventions and midpoint value")
{
    CHECK(sigma(0.0) == 0.0);
    CHECK(sigma(1.0) == 0.0);
    CHECK_THAT(sigma(0.5), WithinAbs(oracle::kSigmaHalf, 1e-15));
    CHECK(raises(errc::domain_error, [] { sigma(-0.01); }));
    CHECK(raises(errc::domain_error, [] { sigma(1.01); }));
}

TEST_CASE("sigma is concave on [0,1]")
{
    std::mt19937_64 gen(21);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int t = 0; t < 2000; ++t) {
        const double a = u(gen), b = u(gen), w = u(gen);
        const double chord = w * sigma(a) + (1.0 - w) * sigma(b);
        CHECK(sigma(w * a + (1.0 - w) * b) >= chord - 1e-12);
    }
    // second difference negative at interior points
    const double h = 1e-5;
    for (double x = 0.05; x < 0.96; x += 0.05) {
        const double d2 = sigma(x + h) - 2.0 * sigma(x) + sigma(x - h);
        CHECK(d2 < 0.0);
    }
}

TEST_CASE("entropy reference values")
{
    const Marginal uniform4(std::vector<double>(4, 0.25), Normalize::strict);
    CHECK_THAT(entropy(uniform4).nats(), WithinAbs(oracle::kLn4, 1e-15));

    const Marginal delta({0.0, 1.0, 0.0}, Normalize::strict);
    CHECK(entropy(delta).nats() == 0.0);

    const JointDist worked(2, 2, {0.4, 0.1, 0.2, 0.3}, Normalize::strict);
    CHECK_THAT(entropy(worked).nats(), WithinAbs(oracle::kSJoint, 1e-12));
}

TEST_CASE("entropy stays within [0, ln k] on random distributions")
{
    std::mt19937_64 gen(22);
    for (int t = 0; t < 2000; ++t) {
        const std::size_t k = 1 + gen() % 32;
        const Marginal m(oracle::random_simplex(gen, k), Normalize::renormalize);
        const double s = entropy(m).nats();
        CHECK(s >= 0.0);
        CHECK(s <= std::log(static_cast<double>(k)) + 1e-12);
        CHECK_THAT(s, WithinAbs(oracle::entropy_ld(m), 1e-13));
    }
}

TEST_CASE("entropy value unit views")
{
    const Marginal m({0.3, 0.7}, Normalize::strict);
    const auto s = entropy(m);
    CHECK_THAT(s.bits(), WithinAbs(s.nats() / std::numbers::ln2, 1e-14));
    const double k_b = 1.380649e-23;
    CHECK_THAT(s.physical(k_b), WithinAbs(s.nats() * k_b, 1e-30));
}

TEST_CASE("negative-gap clamp separates rounding dust from logic bugs")
{
    CHECK(EntropyValue::from_nats(-1e-13).nats() == 0.0);
    CHECK(EntropyValue::from_nats(0.0).nats() == 0.0);
    CHECK(raises(errc::internal_error, [] { EntropyValue::from_nats(-1e-11); }));
    CHECK(raises(errc::internal_error, [] { EntropyValue::from_nats(std::nan("")); }));
}

TEST_CASE("chain decomposition of the worked example")
{
    const JointDist j(2, 2, {0.4, 0.1, 0.2, 0.3}, Normalize::strict);
    const auto c = chain_decompose(j);
    CHECK_THAT(c.s_base.nats(), WithinAbs(oracle::kSMargA, 1e-12));
    CHECK_THAT(c.s_cond.nats(), WithinAbs(oracle::kSCond, 1e-12));
    CHECK_THAT(c.s_total.nats(), WithinAbs(oracle::kSJoint, 1e-12));
    CHECK_THAT(c.s_total.nats(), WithinAbs(entropy(j).nats(), 1e-12));
}

TEST_CASE("chain decomposition of products and degenerate joints")
{
    const auto prod = oracle::product_joint(std::vector<double>{0.3, 0.7},
                                            std::vector<double>{0.2, 0.3, 0.5});
    const auto c = chain_decompose(prod);
    CHECK_THAT(c.s_base.nats(), WithinAbs(oracle::entropy_ld(marginal_a(prod)), 1e-13));
    CHECK_THAT(c.s_cond.nats(), WithinAbs(oracle::entropy_ld(marginal_b(prod)), 1e-13));

    const auto one = chain_decompose(JointDist(1, 1, {1.0}, Normalize::strict));
    CHECK(one.s_base.nats() == 0.0);
    CHECK(one.s_cond.nats() == 0.0);
    CHECK(one.s_total.nats() == 0.0);
}

TEST_CASE("chain rule holds to 1e-12 on the random corpus, zero rows included")
{
    std::mt19937_64 gen(23);
    for (int t = 0; t < 2000; ++t) {
        const auto j = oracle::random_joint(gen, 2 + gen() % 7, 2 + gen() % 7, t % 4 == 0);
        const auto c = chain_decompose(j);
        CHECK_THAT(c.s_total.nats(), WithinAbs(entropy(j).nats(), 1e-12));
    }
    for (const auto& j : oracle::corner_joints()) {
        const auto c = chain_decompose(j);
        CHECK_THAT(c.s_total.nats(), WithinAbs(entropy(j).nats(), 1e-12));
    }
}

TEST_CASE("mutual information reference values")
{
    const JointDist diag(2, 2, {0.5, 0.0, 0.0, 0.5}, Normalize::strict);
    CHECK_THAT(mutual_information(diag).nats(), WithinAbs(std::numbers::ln2, 1e-12));

    const auto prod = oracle::product_joint(std::vector<double>{0.3, 0.7},
                                            std::vector<double>{0.2, 0.8});
    CHECK_THAT(mutual_information(prod).nats(), WithinAbs(0.0, 1e-13));

    const JointDist worked(2, 2, {0.4, 0.1, 0.2, 0.3}, Normalize::strict);
    CHECK_THAT(mutual_information(worked).nats(), WithinAbs(oracle::kMi, 1e-12));
}

TEST_CASE("averaging gap reference values")
{
    const Marginal g({1.0, 0.0}, Normalize::strict);
    const Marginal h({0.0, 1.0}, Normalize::strict);
    CHECK_THAT(averaging_gap(std::vector<Marginal>{g, h}, MixtureWeights({1.0, 1.0})),
               WithinAbs(std::numbers::ln2, 1e-12));

    const Marginal z({0.2, 0.3, 0.5}, Normalize::strict);
    CHECK_THAT(averaging_gap(std::vector<Marginal>{z, z, z}, MixtureWeights({1.0, 2.0, 3.0})),
               WithinAbs(0.0, 1e-13));

    CHECK_THAT(averaging_gap(std::vector<Marginal>{Marginal({0.8, 0.2}, Normalize::strict),
                                                   Marginal({0.4, 0.6}, Normalize::strict)},
                             MixtureWeights({0.5, 0.5})),
               WithinAbs(oracle::kMi, 1e-10));
}

TEST_CASE("averaging gap is nonnegative for random ensembles")
{
    std::mt19937_64 gen(24);
    std::uniform_real_distribution<double> uw(0.0, 1.0);
    for (int t = 0; t < 2000; ++t) {
        const std::size_t count = 2 + gen() % 15;
        const std::size_t k = 2 + gen() % 31;
        std::vector<Marginal> dists;
        std::vector<double> weights;
        for (std::size_t d = 0; d < count; ++d) {
            dists.emplace_back(oracle::random_simplex(gen, k), Normalize::renormalize);
            weights.push_back(uw(gen) + 1e-6);
        }
        CHECK(averaging_gap(dists, MixtureWeights(weights)) >= -1e-12);
    }
}

TEST_CASE("subadditivity report on reference joints")
{
    const JointDist worked(2, 2, {0.4, 0.1, 0.2, 0.3}, Normalize::strict);
    const auto r = subadditivity_report(worked);
    CHECK_THAT(r.s_joint, WithinAbs(oracle::kSJoint, 1e-12));
    CHECK_THAT(r.s_pi, WithinAbs(oracle::kSPi, 1e-12));
    CHECK_THAT(r.s_marg_a, WithinAbs(oracle::kSMargA, 1e-12));
    CHECK_THAT(r.s_marg_b, WithinAbs(oracle::kSMargB, 1e-12));
    CHECK_THAT(r.gap, WithinAbs(oracle::kMi, 1e-12));
    CHECK(r.holds);

    const auto u = subadditivity_report(
        JointDist(3, 3, std::vector<double>(9, 1.0 / 9.0), Normalize::renormalize));
    CHECK_THAT(u.gap, WithinAbs(0.0, 1e-13));
    CHECK(u.holds);

    const auto d =
        subadditivity_report(JointDist(2, 2, {0.5, 0.0, 0.0, 0.5}, Normalize::strict));
    CHECK_THAT(d.gap, WithinAbs(std::numbers::ln2, 1e-12));
    CHECK(d.holds);
}

TEST_CASE("subadditivity and the marginal-sum identity hold on the corpus")
{
    std::mt19937_64 gen(25);
    for (int t = 0; t < 2000; ++t) {
        const auto j = oracle::random_joint(gen, 2 + gen() % 7, 2 + gen() % 7, t % 6 == 0);
        const auto r = subadditivity_report(j);
        CHECK(r.gap >= -1e-12);
        CHECK(r.holds);
        CHECK_THAT(r.s_pi, WithinAbs(r.s_marg_a + r.s_marg_b, 1e-12));
    }
    for (const auto& j : oracle::corner_joints()) {
        const auto r = subadditivity_report(j);
        CHECK(r.gap >= -1e-12);
        CHECK(r.holds);
    }
}

TEST_CASE("decorrelation gap equals the conditional averaging gap (proof path)")
{
    std::mt19937_64 gen(26);
    for (int t = 0; t < 2000; ++t) {
        const auto j = oracle::random_joint(gen, 2 + gen() % 7, 2 + gen() % 7, t % 6 == 0);
        CHECK_THAT(mutual_information(j).nats(), WithinAbs(averaging_gap(condition_on_a(j)), 1e-12));
    }
    for (const auto& j : oracle::corner_joints())
        CHECK_THAT(mutual_information(j).nats(), WithinAbs(averaging_gap(condition_on_a(j)), 1e-12));
}

TEST_CASE("zero gap and factorization coincide in both directions")
{
    std::mt19937_64 gen(27);
    for (int t = 0; t < 200; ++t) {
        // products: gap at zero, is_product agrees
        auto pa = oracle::random_simplex(gen, 2 + gen() % 5);
        auto pb = oracle::random_simplex(gen, 2 + gen() % 5);
        // keep entries away from zero so the perturbation below stays legal
        for (auto& v : pa) v = 0.5 * v + 0.5 / static_cast<double>(pa.size());
        for (auto& v : pb) v = 0.5 * v + 0.5 / static_cast<double>(pb.size());
        const auto prod = oracle::product_joint(pa, pb);
        CHECK(mutual_information(prod).nats() <= 1e-10);
        CHECK(is_product(prod, 1e-6));

        // same marginals, correlations injected on a 2x2 cell pattern
        std::vector<double> cells(prod.cells().begin(), prod.cells().end());
        const std::size_t m = prod.cols();
        const double e = 1e-3;
        cells[0 * m + 0] += e;
        cells[0 * m + 1] -= e;
        cells[1 * m + 0] -= e;
        cells[1 * m + 1] += e;
        const JointDist bent(prod.rows(), m, std::move(cells), Normalize::renormalize);
        CHECK(mutual_information(bent).nats() > 1e-10);
        CHECK_FALSE(is_product(bent, 1e-6));
    }
}
