#include <gtest/gtest.h>

#include "rarehit/error.hpp"
#include "rarehit/targets.hpp"

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

double binom(std::size_t n, std::size_t k) {
    double c = 1.0;
    for (std::size_t i = 0; i < k; ++i) c = c * static_cast<double>(n - i) / static_cast<double>(i + 1);
    return c;
}

}  // namespace

TEST(Targets, Cylinder) {
    const auto a = cylinder({1, 1, 1});
    EXPECT_EQ(a.rank(), 3u);
    EXPECT_EQ(a.cardinality(), 1u);
    EXPECT_TRUE(a.contains(Word{1, 1, 1}));
    EXPECT_FALSE(a.contains(Word{1, 1, 0}));
    EXPECT_EQ(code_of([] { cylinder({}); }), ErrorCode::EmptyWord);
}

TEST(Targets, HammingRadiusOne) {
    const auto b = hamming_ball({0, 0, 0}, 0.34, 2);
    EXPECT_EQ(b.cardinality(), 4u);
    const std::vector<Word> expected{{0, 0, 0}, {0, 0, 1}, {0, 1, 0}, {1, 0, 0}};
    EXPECT_EQ(b.words(), expected);
    EXPECT_EQ(hamming_ball({0, 1, 0}, 0.2, 2).cardinality(), 1u);
}

TEST(Targets, HammingCountMatchesBinomialSum) {
    for (std::size_t q = 2; q <= 4; ++q)
        for (std::size_t n = 1; n <= 12; ++n)
            for (double d : {0.0, 0.1, 0.2, 0.34, 0.5}) {
                const std::size_t r = hamming_radius(n, d);
                double want = 0.0;
                for (std::size_t k = 0; k <= r; ++k) want += binom(n, k) * std::pow(q - 1.0, static_cast<double>(k));
                EXPECT_DOUBLE_EQ(hamming_ball_count(n, r, q), want);
                if (n <= 8) EXPECT_EQ(static_cast<double>(hamming_ball(Word(n, 0), d, q).cardinality()), want);
            }
    EXPECT_EQ(hamming_radius(10, 0.2), 2u);
    EXPECT_EQ(hamming_ball_count(10, 2, 4), 436.0);
}

TEST(Targets, HammingCap) {
    EXPECT_EQ(code_of([] { hamming_ball(Word(20, 0), 0.5, 4, 1e3); }), ErrorCode::ExpansionTooLarge);
}

TEST(Targets, UnionDedups) {
    const auto u = set_union({cylinder({0, 0, 0}), cylinder({1, 1, 1})});
    EXPECT_EQ(u.cardinality(), 2u);
    const auto v = set_union({hamming_ball({0, 0, 0}, 0.34, 2), cylinder({0, 0, 0})});
    EXPECT_EQ(v.cardinality(), 4u);
    EXPECT_EQ(code_of([] { set_union({cylinder({0, 1}), cylinder({0, 1, 1})}); }), ErrorCode::RankMismatch);
}

TEST(Targets, Measure) {
    const auto u = uniform_iid(2);
    EXPECT_DOUBLE_EQ(measure(u, hamming_ball({0, 0, 0}, 0.34, 2)), 0.5);
    EXPECT_DOUBLE_EQ(measure(u, cylinder({1, 1})), 0.25);
}

TEST(Targets, PredicateAgreesWithExpansion) {
    const Word c{0, 1, 2, 0, 1};
    const auto ball = hamming_ball(c, 0.4, 3);
    const auto pred = hamming_predicate(c, 0.4);
    Word w(5, 0);
    std::size_t hits = 0;
    for (int code = 0; code < 243; ++code) {
        int x = code;
        for (auto& s : w) s = static_cast<Symbol>(x % 3), x /= 3;
        EXPECT_EQ(pred.contains(w), ball.contains(w));
        hits += pred.contains(w);
    }
    EXPECT_EQ(hits, ball.cardinality());
}

TEST(Targets, ParseAndJson) {
    EXPECT_EQ(parse_word("0,1,1"), (Word{0, 1, 1}));
    EXPECT_EQ(format_word(Word{2, 0}), "2,0");
    EXPECT_EQ(code_of([] { parse_word("0,,1"); }), ErrorCode::ConfigInvalid);

    const auto t = target_from_json({{"hamming", {{"center", "0,0,0"}, {"D", 0.34}}}}, 2);
    EXPECT_EQ(t.cardinality(), 4u);
    const auto u = target_from_json({{"union", {{{"cylinder", "0,0"}}, {{"cylinder", "1,1"}}}}}, 2);
    EXPECT_EQ(u.cardinality(), 2u);
    EXPECT_EQ(code_of([] { target_from_json({{"cylinder", "0,2"}}, 2); }), ErrorCode::SymbolOutOfRange);
    EXPECT_EQ(code_of([] { target_from_json({{"blob", 1}}, 2); }), ErrorCode::ConfigInvalid);
}
