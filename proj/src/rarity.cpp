#include "rarehit/rarity.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rarehit/error.hpp"

namespace rarehit {

namespace {

// Mass of length-N words whose measure exceeds `threshold`. A cylinder's
// measure only shrinks as it is extended, so prefixes at or below the
// threshold are cut.
struct HeavyWordSearch {
    const ProcessModel& model;
    std::size_t length;
    double threshold;
    double cap;
    double visited = 0.0;
    double mass = 0.0;

    void run() {
        const std::size_t q = model.alphabet_size();
        for (Symbol a = 0; a < q; ++a) descend(a, model.stationary(a), 1);
    }

    void descend(Symbol last, double p, std::size_t depth) {
        if (++visited > cap)
            throw Error(ErrorCode::EnumerationTooLarge,
                        "typical-set search exceeded " + std::to_string(static_cast<long long>(cap)) + " prefixes");
        if (p <= threshold) return;
        if (depth == length) {
            mass += p;
            return;
        }
        const std::size_t q = model.alphabet_size();
        for (Symbol a = 0; a < q; ++a) descend(a, p * model.next_prob(last, a), depth + 1);
    }
};

double hit_by(const ProcessModel& model, const TargetSet& set, std::size_t n) {
    const auto tail = hitting_tail(model, set, static_cast<std::int64_t>(n));
    return tail.cdf(n);
}

}  // namespace

RarityBound epsilon_bound(const ProcessModel& model, double kappa_n, std::size_t n, double enumeration_cap) {
    if (n < 1) throw Error(ErrorCode::InvalidArgument, "rank n must be >= 1");
    if (!(kappa_n >= 1.0)) throw Error(ErrorCode::InvalidArgument, "kappa_n must be >= 1");

    RarityBound b;
    b.n = n;
    b.kappa = kappa_n;
    b.h0 = std::log(kappa_n) / static_cast<double>(n);
    b.h_mu = entropy(model);
    if (b.h0 >= b.h_mu)
        throw Error(ErrorCode::RateExceedsEntropy,
                    "cardinality rate " + std::to_string(b.h0) + " is not below the entropy " + std::to_string(b.h_mu));
    b.h = 0.5 * (b.h0 + b.h_mu);
    b.k = 2;
    while (!(b.h0 < (1.0 - 1.0 / static_cast<double>(b.k)) * b.h)) ++b.k;
    b.m = (n + b.k - 1) / b.k;

    const std::size_t len = n - b.m;
    b.cover_term = static_cast<double>(b.m) * kappa_n * std::exp(-static_cast<double>(len) * b.h);
    if (len == 0) {
        b.aep_deficiency = 0.0;  // the empty word is typical
    } else if (model.is_uniform_iid()) {
        // Every word has measure e^{-N h_mu} < e^{-N h}: nothing is atypical.
        b.aep_deficiency = 0.0;
    } else {
        HeavyWordSearch search{model, len, std::exp(-static_cast<double>(len) * b.h), enumeration_cap};
        search.run();
        b.aep_deficiency = std::min(1.0, search.mass);
        b.surrogate = true;
    }
    b.epsilon = static_cast<double>(b.k) * (b.cover_term + b.aep_deficiency);
    return b;
}

double hamming_growth(double fraction, std::size_t q) {
    if (fraction < 0.0 || fraction > 1.0) throw Error(ErrorCode::InvalidArgument, "D must lie in [0, 1]");
    if (q < 2) throw Error(ErrorCode::EmptyAlphabet, "alphabet needs q >= 2");
    return (1.0 + fraction * static_cast<double>(q - 1)) / std::pow(fraction, fraction);
}

double hamming_kappa_bound(std::size_t n, double fraction, std::size_t q) {
    return std::pow(hamming_growth(fraction, q), static_cast<double>(n));
}

D0Result solve_D0(std::size_t q, double h_nats) {
    if (q < 2) throw Error(ErrorCode::EmptyAlphabet, "alphabet needs q >= 2");
    if (!(h_nats > 0.0)) throw Error(ErrorCode::InvalidArgument, "entropy level must be positive");
    const double target = std::exp(h_nats);
    auto f = [&](double d) { return hamming_growth(d, q) - target; };

    constexpr int kScan = 10000;
    double lo = 0.0;
    for (int i = 1; i < kScan; ++i) {
        const double d = static_cast<double>(i) / kScan;
        if (f(d) >= 0.0) {
            double hi = d;
            while (hi - lo > 1e-6) {
                const double mid = 0.5 * (lo + hi);
                (f(mid) >= 0.0 ? hi : lo) = mid;
            }
            return {0.5 * (lo + hi), true};
        }
        lo = d;
    }
    return {1.0, false};
}

RateEstimate cardinality_rate(const std::vector<std::pair<std::size_t, double>>& kappa_table,
                              std::optional<double> h_mu) {
    if (kappa_table.empty()) throw Error(ErrorCode::GridEmpty, "cardinality table is empty");
    auto rows = kappa_table;
    std::sort(rows.begin(), rows.end());
    for (const auto& [n, kappa] : rows)
        if (n < 1 || !(kappa >= 1.0)) throw Error(ErrorCode::InvalidArgument, "table needs n >= 1 and kappa >= 1");

    RateEstimate est;
    est.rate = -1.0;
    for (std::size_t i = rows.size() / 2; i < rows.size(); ++i) {
        const double r = std::log(rows[i].second) / static_cast<double>(rows[i].first);
        if (r > est.rate) {
            est.rate = r;
            est.n_at = rows[i].first;
        }
    }
    if (h_mu) est.below_entropy = est.rate < *h_mu;
    return est;
}

std::vector<MixedUnionRow> mixed_union_check(const ProcessModel& model, const TargetFamily& small_part,
                                             const TargetFamily& entropy_part, std::size_t n_min,
                                             std::size_t n_max) {
    std::vector<MixedUnionRow> rows;
    for (std::size_t n = std::max<std::size_t>(n_min, 1); n <= n_max; ++n) {
        auto a0 = small_part(n);
        auto a1 = entropy_part(n);
        if (!a0 && !a1) throw Error(ErrorCode::EmptyTarget, "both parts of the union are empty at n=" + std::to_string(n));

        MixedUnionRow row;
        row.n = n;
        std::vector<TargetSet> parts;
        if (a0) {
            row.n_mu_A0 = static_cast<double>(n) * measure(model, *a0);
            parts.push_back(*a0);
        }
        if (a1) {
            row.mu_tau_A1_le_n = hit_by(model, *a1, n);
            parts.push_back(*a1);
        }
        row.sum = row.n_mu_A0 + row.mu_tau_A1_le_n;
        row.mu_tau_A_le_n = hit_by(model, set_union(parts), n);
        row.holds = row.sum + 1e-12 >= row.mu_tau_A_le_n;
        rows.push_back(row);
    }
    return rows;
}

bool subadditivity_holds(const TailDistribution& hitting, std::size_t n, std::size_t k) {
    if (k < 1) throw Error(ErrorCode::InvalidArgument, "k must be >= 1");
    if (n > hitting.horizon()) throw Error(ErrorCode::HorizonTooShort, "tail ends before n");
    const std::size_t m = (n + k - 1) / k;
    return static_cast<double>(k) * hitting.cdf(m) + 1e-12 >= hitting.cdf(n);
}

}  // namespace rarehit
