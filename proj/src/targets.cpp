#include "rarehit/targets.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>

#include "rarehit/error.hpp"

namespace rarehit {

TargetSet::TargetSet(std::size_t rank, std::vector<Word> words, TargetOrigin origin)
    : rank_(rank), words_(std::move(words)), origin_(std::move(origin)) {
    if (rank_ == 0) throw Error(ErrorCode::EmptyWord, "target rank must be >= 1");
    if (words_.empty()) throw Error(ErrorCode::EmptyTarget, "target has no words");
    for (const auto& w : words_)
        if (w.size() != rank_)
            throw Error(ErrorCode::RankMismatch, "word of length " + std::to_string(w.size()) +
                                                     " in a rank-" + std::to_string(rank_) + " target");
    std::sort(words_.begin(), words_.end());
    words_.erase(std::unique(words_.begin(), words_.end()), words_.end());
}

bool TargetSet::contains(std::span<const Symbol> window) const {
    if (window.size() != rank_) return false;
    return std::binary_search(words_.begin(), words_.end(), window,
                              [](const auto& a, const auto& b) {
                                  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
                              });
}

TargetSet cylinder(Word word) {
    if (word.empty()) throw Error(ErrorCode::EmptyWord, "cylinder word is empty");
    const std::size_t n = word.size();
    auto origin = CylinderOrigin{word};
    return TargetSet(n, {std::move(word)}, std::move(origin));
}

std::size_t hamming_radius(std::size_t n, double fraction) {
    if (!(fraction >= 0.0 && fraction < 1.0))
        throw Error(ErrorCode::InvalidArgument, "Hamming fraction D must lie in [0, 1)");
    return static_cast<std::size_t>(std::floor(fraction * static_cast<double>(n) + 1e-9));
}

double hamming_ball_count(std::size_t n, std::size_t radius, std::size_t q) {
    double total = 0.0;
    double binom = 1.0;  // C(n, k)
    double power = 1.0;  // (q-1)^k
    for (std::size_t k = 0; k <= std::min(radius, n); ++k) {
        total += binom * power;
        binom = binom * static_cast<double>(n - k) / static_cast<double>(k + 1);
        power *= static_cast<double>(q - 1);
    }
    return total;
}

namespace {

void expand_ball(const Word& center, std::size_t q, std::size_t pos, std::size_t budget, Word& current,
                 std::vector<Word>& out) {
    if (pos == center.size()) {
        out.push_back(current);
        return;
    }
    for (Symbol a = 0; a < q; ++a) {
        const bool mismatch = a != center[pos];
        if (mismatch && budget == 0) continue;
        current[pos] = a;
        expand_ball(center, q, pos + 1, budget - (mismatch ? 1 : 0), current, out);
    }
    current[pos] = center[pos];
}

}  // namespace

TargetSet hamming_ball(const Word& center, double fraction, std::size_t q, double cap) {
    if (center.empty()) throw Error(ErrorCode::EmptyWord, "Hamming center is empty");
    for (Symbol s : center)
        if (s >= q) throw Error(ErrorCode::SymbolOutOfRange, "center symbol " + std::to_string(s) + " >= q");
    const std::size_t n = center.size();
    const std::size_t radius = hamming_radius(n, fraction);
    const double count = hamming_ball_count(n, radius, q);
    if (count > cap)
        throw Error(ErrorCode::ExpansionTooLarge,
                    "Hamming ball has " + std::to_string(count) + " words, cap is " + std::to_string(cap));

    std::vector<Word> words;
    words.reserve(static_cast<std::size_t>(count));
    Word current = center;
    expand_ball(center, q, 0, radius, current, words);
    return TargetSet(n, std::move(words), HammingOrigin{center, fraction, radius});
}

TargetSet set_union(const std::vector<TargetSet>& sets) {
    if (sets.empty()) throw Error(ErrorCode::EmptyTarget, "union of no sets");
    const std::size_t n = sets.front().rank();
    std::vector<Word> words;
    for (const auto& s : sets) {
        if (s.rank() != n)
            throw Error(ErrorCode::RankMismatch, "union of rank " + std::to_string(n) + " and rank " +
                                                     std::to_string(s.rank()) + " sets");
        words.insert(words.end(), s.words().begin(), s.words().end());
    }
    return TargetSet(n, std::move(words), UnionOrigin{});
}

double measure(const ProcessModel& model, const TargetSet& set) {
    double total = 0.0;
    for (const auto& w : set.words()) total += cylinder_measure(model, w);
    return total;
}

bool HammingPredicate::contains(std::span<const Symbol> window) const {
    if (window.size() != center.size()) return false;
    std::size_t distance = 0;
    for (std::size_t i = 0; i < window.size(); ++i)
        if (window[i] != center[i] && ++distance > radius) return false;
    return true;
}

HammingPredicate hamming_predicate(const Word& center, double fraction) {
    if (center.empty()) throw Error(ErrorCode::EmptyWord, "Hamming center is empty");
    return HammingPredicate{center, hamming_radius(center.size(), fraction)};
}

Word parse_word(const std::string& text) {
    Word word;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto first = item.find_first_not_of(" \t");
        const auto last = item.find_last_not_of(" \t");
        if (first == std::string::npos) throw Error(ErrorCode::ConfigInvalid, "empty symbol in '" + text + "'");
        item = item.substr(first, last - first + 1);
        if (!std::all_of(item.begin(), item.end(), [](unsigned char c) { return std::isdigit(c); }))
            throw Error(ErrorCode::ConfigInvalid, "bad symbol '" + item + "' in '" + text + "'");
        word.push_back(static_cast<Symbol>(std::stoul(item)));
    }
    if (word.empty()) throw Error(ErrorCode::EmptyWord, "empty word '" + text + "'");
    return word;
}

std::string format_word(std::span<const Symbol> word) {
    std::string out;
    for (std::size_t i = 0; i < word.size(); ++i) {
        if (i) out += ',';
        out += std::to_string(word[i]);
    }
    return out;
}

TargetSet target_from_json(const nlohmann::json& j, std::size_t q, double cap) {
    if (!j.is_object() || j.size() != 1)
        throw Error(ErrorCode::ConfigInvalid, "target spec must be an object with exactly one key");
    const std::string key = j.begin().key();
    const nlohmann::json& value = j.begin().value();
    auto check_symbols = [q](const Word& w) {
        for (Symbol s : w)
            if (s >= q) throw Error(ErrorCode::SymbolOutOfRange, "symbol " + std::to_string(s) + " >= q");
    };
    if (key == "cylinder") {
        if (!value.is_string()) throw Error(ErrorCode::ConfigInvalid, "cylinder must be a string like \"0,1\"");
        Word w = parse_word(value.get<std::string>());
        check_symbols(w);
        return cylinder(std::move(w));
    }
    if (key == "hamming") {
        if (!value.is_object() || !value.contains("center") || !value.contains("D") || value.size() != 2)
            throw Error(ErrorCode::ConfigInvalid, "hamming takes exactly {center, D}");
        if (!value["center"].is_string() || !value["D"].is_number())
            throw Error(ErrorCode::ConfigInvalid, "hamming center must be a string and D a number");
        return hamming_ball(parse_word(value["center"].get<std::string>()), value["D"].get<double>(), q, cap);
    }
    if (key == "union") {
        if (!value.is_array()) throw Error(ErrorCode::ConfigInvalid, "union takes an array of targets");
        std::vector<TargetSet> parts;
        for (const auto& item : value) parts.push_back(target_from_json(item, q, cap));
        return set_union(parts);
    }
    throw Error(ErrorCode::ConfigInvalid, "unknown target kind '" + key + "'");
}

}  // namespace rarehit
