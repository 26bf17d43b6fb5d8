#include <cmath>

#include <gtest/gtest.h>

#include "rarehit/error.hpp"
#include "rarehit/rarity.hpp"
#include "rarehit/scaling.hpp"

using namespace rarehit;

namespace {

ErrorCode code_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "no error thrown";
    return ErrorCode::ConfigInvalid;
}

}  // namespace

TEST(Rarity, SingleCylinderClosedForm) {
    // kappa = 1, n = 20: h0 = 0, h = ln2/2, k = 2, m = 10, eps = 2 * 10 * 2^{-5}.
    const auto b = epsilon_bound(uniform_iid(2), 1.0, 20);
    EXPECT_EQ(b.h0, 0.0);
    EXPECT_NEAR(b.h, std::log(2.0) / 2.0, 1e-15);
    EXPECT_EQ(b.k, 2u);
    EXPECT_EQ(b.m, 10u);
    EXPECT_EQ(b.aep_deficiency, 0.0);
    EXPECT_FALSE(b.surrogate);
    EXPECT_NEAR(b.epsilon, 0.625, 1e-14);
}

TEST(Rarity, PicksSmallestK) {
    const auto b = epsilon_bound(uniform_iid(4), 436.0, 10);
    EXPECT_LT(b.h0, (1.0 - 1.0 / static_cast<double>(b.k)) * b.h);
    EXPECT_GE(b.h0, (1.0 - 1.0 / static_cast<double>(b.k - 1)) * b.h);
    EXPECT_EQ(b.m, (10 + b.k - 1) / b.k);
}

TEST(Rarity, FullShiftRejected) {
    EXPECT_EQ(code_of([] { epsilon_bound(uniform_iid(2), std::pow(2.0, 8), 8); }), ErrorCode::RateExceedsEntropy);
}

TEST(Rarity, SurrogateForNonUniform) {
    const auto m = iid_model({0.95, 0.05});
    const auto b = epsilon_bound(m, 1.0, 16);
    EXPECT_TRUE(b.surrogate);
    EXPECT_GT(b.aep_deficiency, 0.0);
    EXPECT_LE(b.aep_deficiency, 1.0);
    // Independent count over j = number of zeros: the words with 0.95^j 0.05^(N-j) > e^{-N h}.
    const std::size_t N = 16 - b.m;
    double mass = 0.0;
    for (std::size_t j = 0; j <= N; ++j) {
        const double p = std::pow(0.95, j) * std::pow(0.05, static_cast<double>(N - j));
        if (p > std::exp(-static_cast<double>(N) * b.h)) {
            double c = 1.0;
            for (std::size_t i = 0; i < j; ++i) c = c * static_cast<double>(N - i) / static_cast<double>(i + 1);
            mass += c * p;
        }
    }
    EXPECT_NEAR(b.aep_deficiency, mass, 1e-12);
}

TEST(Rarity, HammingBound) {
    EXPECT_NEAR(hamming_kappa_bound(10, 0.2, 4), std::pow(1.6 / std::pow(0.2, 0.2), 10), 1e-9);
    EXPECT_GE(hamming_kappa_bound(10, 0.2, 4), 436.0);
    EXPECT_GT(hamming_growth(0.3, 2), 1.0);
    EXPECT_GE(hamming_kappa_bound(5, 0.05, 3), 1.0);
    for (std::size_t q = 2; q <= 4; ++q)
        for (std::size_t n = 1; n <= 12; ++n)
            for (double d : {0.1, 0.25, 0.4})
                EXPECT_GE(hamming_kappa_bound(n, d, q) * (1 + 1e-12), hamming_ball_count(n, hamming_radius(n, d), q));
}

TEST(Rarity, D0) {
    const auto d0 = solve_D0(4, 1.7 * std::log(2.0));
    EXPECT_TRUE(d0.crossed);
    EXPECT_GE(d0.value, 0.40);
    EXPECT_LE(d0.value, 0.43);
    EXPECT_NEAR(hamming_growth(d0.value, 4), std::exp(1.7 * std::log(2.0)), 1e-4);
    EXPECT_LT(solve_D0(2, 0.01).value, solve_D0(2, 0.1).value);
    const auto none = solve_D0(2, 2.0);  // above ln 2
    EXPECT_FALSE(none.crossed);
    EXPECT_EQ(none.value, 1.0);
}

TEST(Rarity, CardinalityRate) {
    std::vector<std::pair<std::size_t, double>> full, poly;
    for (std::size_t n = 1; n <= 30; ++n) {
        full.emplace_back(n, std::pow(2.0, static_cast<double>(n)));
        poly.emplace_back(n, static_cast<double>(n * n));
    }
    EXPECT_NEAR(cardinality_rate(full).rate, std::log(2.0), 1e-14);
    const auto p = cardinality_rate(poly, std::log(2.0));
    EXPECT_NEAR(p.rate, std::log(256.0) / 16.0, 1e-15);
    EXPECT_EQ(p.n_at, 16u);
    EXPECT_TRUE(*p.below_entropy);
    EXPECT_THROW(cardinality_rate({}), Error);
}

TEST(Rarity, MixedUnion) {
    const auto m = uniform_iid(2);
    auto zeros = [](std::size_t n) -> std::optional<TargetSet> { return cylinder(Word(n, 0)); };
    auto ball = [](std::size_t n) -> std::optional<TargetSet> {
        return hamming_ball(SymbolStream::periodic({0, 1}).prefix(n), 0.2, 2);
    };
    auto none = [](std::size_t) -> std::optional<TargetSet> { return std::nullopt; };

    for (const auto& row : mixed_union_check(m, zeros, ball, 3, 9)) EXPECT_TRUE(row.holds) << row.n;
    for (const auto& row : mixed_union_check(m, none, ball, 3, 6)) {
        EXPECT_EQ(row.n_mu_A0, 0.0);
        EXPECT_DOUBLE_EQ(row.sum, row.mu_tau_A_le_n);
    }
    for (const auto& row : mixed_union_check(m, zeros, none, 3, 6)) {
        EXPECT_DOUBLE_EQ(row.n_mu_A0, static_cast<double>(row.n) * std::ldexp(1.0, -static_cast<int>(row.n)));
        EXPECT_TRUE(row.holds);
    }
    EXPECT_EQ(code_of([&] { mixed_union_check(m, none, none, 3, 3); }), ErrorCode::EmptyTarget);
}

TEST(Rarity, Subadditivity) {
    const auto m = markov_model({{0.9, 0.1}, {0.5, 0.5}});
    const auto t = hitting_tail(m, cylinder({0, 1, 1, 0, 1, 0}), 40);
    for (std::size_t n = 1; n <= 40; ++n)
        for (std::size_t k = 1; k <= 6; ++k) EXPECT_TRUE(subadditivity_holds(t, n, k)) << n << "," << k;
}

TEST(Rarity, BoundHoldsForUniformTargets) {
    const auto m = uniform_iid(2);
    for (std::size_t n = 4; n <= 12; ++n) {
        const auto set = cylinder(SymbolStream::champernowne(2).prefix(n));
        const auto b = epsilon_bound(m, 1.0, n);
        EXPECT_LE(hitting_tail(m, set, static_cast<std::int64_t>(n)).cdf(n), b.epsilon);
    }
}
