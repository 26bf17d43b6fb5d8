#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "rarehit/error.hpp"
#include "rarehit/exact.hpp"

using namespace rarehit;

namespace {

// Independent oracle: enumerate every string of length K+n, weight it by the
// chain's law written out by hand, and test windows with a plain loop.
struct Chain {
    std::vector<double> pi;
    std::vector<std::vector<double>> P;

    double prob(const Word& x) const {
        double p = pi[x[0]];
        for (std::size_t i = 1; i < x.size(); ++i) p *= P[x[i - 1]][x[i]];
        return p;
    }
};

std::vector<double> oracle_tail(const Chain& c, const std::vector<Word>& words, std::size_t K, bool ret) {
    const std::size_t n = words.front().size(), q = c.pi.size(), len = K + n;
    auto in_A = [&](const Word& x, std::size_t j) {
        for (const auto& w : words)
            if (std::equal(w.begin(), w.end(), x.begin() + static_cast<std::ptrdiff_t>(j))) return true;
        return false;
    };
    std::vector<double> H(K + 1, 0.0);
    double mass_A = 0.0;
    Word x(len, 0);
    for (std::size_t code = 0; code < static_cast<std::size_t>(std::pow(q, len)); ++code) {
        std::size_t v = code;
        for (auto& s : x) s = static_cast<Symbol>(v % q), v /= q;
        const double p = c.prob(x);
        if (ret) {
            if (!in_A(x, 0)) continue;
            mass_A += p;
        }
        std::size_t first = K + 1;
        for (std::size_t j = 1; j <= K; ++j)
            if (in_A(x, j)) {
                first = j;
                break;
            }
        for (std::size_t k = 0; k < std::min(first, K + 1); ++k) H[k] += p;
    }
    if (ret)
        for (auto& h : H) h /= mass_A;
    return H;
}

Chain sticky_chain() { return {{5.0 / 6.0, 1.0 / 6.0}, {{0.9, 0.1}, {0.5, 0.5}}}; }
ProcessModel sticky() { return markov_model({{0.9, 0.1}, {0.5, 0.5}}); }

}  // namespace

TEST(Exact, FrozenUniformPair) {
    // Counted by hand: 11 avoided in windows 1..k of a uniform binary string.
    const auto t = hitting_tail(uniform_iid(2), cylinder({1, 1}), 3);
    EXPECT_NEAR(t[0], 1.0, 1e-15);
    EXPECT_NEAR(t[1], 0.75, 1e-15);
    EXPECT_NEAR(t[2], 0.625, 1e-15);
    EXPECT_NEAR(t[3], 0.5, 1e-15);
    EXPECT_DOUBLE_EQ(t.mu_A, 0.25);
    const auto r = return_tail(uniform_iid(2), cylinder({1, 1}), 3);
    EXPECT_NEAR(r[1], 0.5, 1e-15);
    EXPECT_NEAR(r[2], 0.5, 1e-15);
    EXPECT_NEAR(r[3], 0.375, 1e-15);
}

TEST(Exact, Geometric) {
    const auto u = uniform_iid(2);
    const auto h = hitting_tail(u, cylinder({1}), 20);
    const auto r = return_tail(u, cylinder({1}), 20);
    for (std::size_t k = 0; k <= 20; ++k) {
        EXPECT_NEAR(h[k], std::ldexp(1.0, -static_cast<int>(k)), 1e-15);
        EXPECT_NEAR(r[k], std::ldexp(1.0, -static_cast<int>(k)), 1e-15);
    }
    const auto all = return_tail(u, set_union({cylinder({0}), cylinder({1})}), 5);
    for (std::size_t k = 1; k <= 5; ++k) EXPECT_EQ(all[k], 0.0);
}

TEST(Exact, MatchesHandOracle) {
    const Chain uni{{0.5, 0.5}, {{0.5, 0.5}, {0.5, 0.5}}};
    const Chain skew{{0.2, 0.8}, {{0.2, 0.8}, {0.2, 0.8}}};
    const std::vector<std::pair<Chain, ProcessModel>> cases{
        {uni, uniform_iid(2)}, {skew, iid_model({0.2, 0.8})}, {sticky_chain(), sticky()}};
    const std::vector<std::vector<Word>> targets{{{1, 1}}, {{0, 1, 0}}, {{0, 1}, {1, 0}}, {{1, 1, 1}, {0, 1, 1}}};
    for (const auto& [chain, model] : cases)
        for (const auto& words : targets) {
            const TargetSet set(words.front().size(), words, UnionOrigin{});
            for (bool ret : {false, true}) {
                const auto want = oracle_tail(chain, words, 8, ret);
                const auto got = ret ? return_tail(model, set, 8) : hitting_tail(model, set, 8);
                for (std::size_t k = 0; k <= 8; ++k) EXPECT_NEAR(got[k], want[k], 1e-13) << k;
            }
        }
}

TEST(Exact, BruteForceAgrees) {
    const auto m = sticky();
    const auto set = hamming_ball({0, 1, 1}, 0.34, 2);
    for (auto kind : {TailKind::Hitting, TailKind::Return}) {
        const auto a = kind == TailKind::Hitting ? hitting_tail(m, set, 10) : return_tail(m, set, 10);
        const auto b = brute_force_tail(m, set, 10, kind);
        EXPECT_EQ(b.source, TailSource::BruteForce);
        for (std::size_t k = 0; k <= 10; ++k) EXPECT_NEAR(a[k], b[k], 1e-12);
    }
    EXPECT_THROW(brute_force_tail(m, set, 40, TailKind::Hitting), Error);
}

TEST(Exact, FirstStepIsMeasure) {
    const auto m = sticky();
    for (const auto& set : {cylinder({0, 1}), cylinder({1, 1, 0}), hamming_ball({0, 0, 1, 1}, 0.25, 2)}) {
        const auto t = hitting_tail(m, set, 2);
        EXPECT_NEAR(t[0] - t[1], measure(m, set), 1e-15);
    }
}

TEST(Exact, Kac) {
    EXPECT_NEAR(return_expectation(uniform_iid(2), cylinder({1, 1})), 4.0, 1e-10);
    EXPECT_NEAR(return_expectation(uniform_iid(2), cylinder({1})), 2.0, 1e-10);
    EXPECT_NEAR(return_expectation(sticky(), cylinder({0, 1})), 12.0, 1e-9);
    const auto ball = hamming_ball({1, 0, 1, 1, 0}, 0.2, 2);
    EXPECT_NEAR(return_expectation(sticky(), ball) * measure(sticky(), ball), 1.0, 1e-9);
}

TEST(Exact, AutomatonShape) {
    const auto a = OccurrenceAutomaton::build(cylinder({1, 1}), 2);
    EXPECT_EQ(a.state_count(), 3u);
    auto s = a.start();
    s = a.step(s, 1);
    EXPECT_FALSE(a.accepting(s));
    s = a.step(s, 1);
    EXPECT_TRUE(a.accepting(s));
    EXPECT_TRUE(a.accepting(a.step(s, 1)));
    EXPECT_FALSE(a.accepting(a.step(s, 0)));

    const auto z = OccurrenceAutomaton::build(cylinder({0}), 2);
    EXPECT_TRUE(z.accepting(z.step(z.start(), 0)));
    EXPECT_FALSE(z.accepting(z.step(z.start(), 1)));
}

TEST(Exact, AutomatonAgreesWithWindows) {
    const auto set = set_union({cylinder({0, 1}), cylinder({1, 0})});
    const auto a = OccurrenceAutomaton::build(set, 2);
    std::mt19937_64 rng(3);
    std::bernoulli_distribution coin(0.5);
    for (int trial = 0; trial < 100; ++trial) {
        Word x(30);
        for (auto& s : x) s = coin(rng);
        auto st = a.start();
        for (std::size_t t = 0; t < x.size(); ++t) {
            st = a.step(st, x[t]);
            const bool window = t >= 1 && set.contains(std::span<const Symbol>(x).subspan(t - 1, 2));
            ASSERT_EQ(a.accepting(st), window) << trial << ":" << t;
        }
    }
}

TEST(Exact, Extendable) {
    const auto m = sticky();
    const auto set = cylinder({1, 0, 1});
    TailPropagator p(m, set, TailKind::Hitting);
    p.extend_to(10);
    p.extend_to(25);
    const auto once = hitting_tail(m, set, 25);
    EXPECT_EQ(p.values(), once.values);
    EXPECT_EQ(p.tail().truncated(10).values.size(), 11u);
}

TEST(Exact, Errors) {
    EXPECT_THROW(return_tail(uniform_iid(2), cylinder({1}), 0), Error);
    try {
        return_tail(uniform_iid(2), cylinder({1}), 0);
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::HorizonNonPositive);
    }
}
