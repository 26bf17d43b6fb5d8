#pragma once

#include <cstddef>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "rarehit/process.hpp"

namespace rarehit {

struct CylinderOrigin {
    Word word;
};

struct HammingOrigin {
    Word center;
    double fraction = 0.0;  // D
    std::size_t radius = 0; // floor(D n)
};

struct UnionOrigin {};

using TargetOrigin = std::variant<CylinderOrigin, HammingOrigin, UnionOrigin>;

/// A rare event A in F_0^{n-1}: a union of distinct rank-n cylinders,
/// stored as a lexicographically sorted word list.
class TargetSet {
public:
    TargetSet(std::size_t rank, std::vector<Word> words, TargetOrigin origin);

    std::size_t rank() const noexcept { return rank_; }
    const std::vector<Word>& words() const noexcept { return words_; }
    std::size_t cardinality() const noexcept { return words_.size(); }
    const TargetOrigin& origin() const noexcept { return origin_; }

    bool contains(std::span<const Symbol> window) const;

private:
    std::size_t rank_;
    std::vector<Word> words_;
    TargetOrigin origin_;
};

inline constexpr double kDefaultExpansionCap = 1e6;

TargetSet cylinder(Word word);

/// Radius floor(D n) used for a Hamming ball of rank n.
std::size_t hamming_radius(std::size_t n, double fraction);

/// sum_{k <= radius} C(n, k) (q-1)^k, as a double (exact below 2^53).
double hamming_ball_count(std::size_t n, std::size_t radius, std::size_t q);

/// All words within Hamming distance floor(D n) of `center`.
TargetSet hamming_ball(const Word& center, double fraction, std::size_t q,
                       double cap = kDefaultExpansionCap);

TargetSet set_union(const std::vector<TargetSet>& sets);

double measure(const ProcessModel& model, const TargetSet& set);

/// Membership test for a Hamming ball that is never expanded.
struct HammingPredicate {
    Word center;
    std::size_t radius = 0;

    std::size_t rank() const noexcept { return center.size(); }
    bool contains(std::span<const Symbol> window) const;
};

HammingPredicate hamming_predicate(const Word& center, double fraction);

/// Parses "0,1,1" into a word.
Word parse_word(const std::string& text);
std::string format_word(std::span<const Symbol> word);

/// {"cylinder":"0,1,1"} | {"hamming":{"center":"0,0,0","D":0.2}} | {"union":[...]}
TargetSet target_from_json(const nlohmann::json& j, std::size_t q, double cap = kDefaultExpansionCap);

}  // namespace rarehit
