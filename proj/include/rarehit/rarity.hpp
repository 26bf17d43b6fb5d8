#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "rarehit/exact.hpp"
#include "rarehit/process.hpp"
#include "rarehit/targets.hpp"

namespace rarehit {

/// Uniform bound mu(tau_{A_n} <= n) <= epsilon_n for any union of at most
/// kappa_n rank-n cylinders, assembled from its covering argument.
struct RarityBound {
    std::size_t n = 0;
    double kappa = 0.0;
    double h0 = 0.0;       // (1/n) ln kappa_n
    double h_mu = 0.0;     // entropy rate
    double h = 0.0;        // chosen level in (h0, h_mu)
    std::size_t k = 0;     // smallest k with h0 < (1 - 1/k) h
    std::size_t m = 0;     // ceil(n / k)
    double cover_term = 0.0;       // m kappa e^{-(n-m) h}
    double aep_deficiency = 0.0;   // 1 - mu(Gamma(n - m)), exact or surrogate
    double epsilon = 0.0;          // k (cover_term + aep_deficiency)
    bool surrogate = false;
};

RarityBound epsilon_bound(const ProcessModel& model, double kappa_n, std::size_t n,
                          double enumeration_cap = kDefaultEnumerationCap);

/// Base of the closed-form ball-size bound, (1 + D(q-1)) / D^D.
double hamming_growth(double fraction, std::size_t q);

/// ((1 + D(q-1)) / D^D)^n >= sum_{k <= Dn} C(n,k) (q-1)^k.
double hamming_kappa_bound(std::size_t n, double fraction, std::size_t q);

struct D0Result {
    double value = 1.0;
    bool crossed = false;  // false: growth stays below e^h, D0 = 1 (unconstrained)
};

/// Smallest D in (0, 1) with (1 + D(q-1)) / D^D = e^h.
D0Result solve_D0(std::size_t q, double h_nats);

struct RateEstimate {
    double rate = 0.0;
    std::size_t n_at = 0;  // where the max over the upper half was attained
    std::optional<bool> below_entropy;
};

/// Finite-sample stand-in for limsup (1/n) ln kappa_n: the max over the
/// larger-n half of the table.
RateEstimate cardinality_rate(const std::vector<std::pair<std::size_t, double>>& kappa_table,
                              std::optional<double> h_mu = std::nullopt);

struct MixedUnionRow {
    std::size_t n = 0;
    double n_mu_A0 = 0.0;
    double mu_tau_A1_le_n = 0.0;
    double sum = 0.0;
    double mu_tau_A_le_n = 0.0;
    bool holds = false;
};

using TargetFamily = std::function<std::optional<TargetSet>(std::size_t n)>;

std::vector<MixedUnionRow> mixed_union_check(const ProcessModel& model, const TargetFamily& small_part,
                                             const TargetFamily& entropy_part, std::size_t n_min, std::size_t n_max);

/// k (1 - H(m)) >= 1 - H(n) for m = ceil(n / k): the invariance step of the cover argument.
bool subadditivity_holds(const TailDistribution& hitting, std::size_t n, std::size_t k);

}  // namespace rarehit
