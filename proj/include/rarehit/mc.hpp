#pragma once

#include <cstddef>
#include <cstdint>
#include <variant>
#include <vector>

#include "rarehit/exact.hpp"
#include "rarehit/process.hpp"
#include "rarehit/targets.hpp"

namespace rarehit {

/// Either an explicit word list or an implicit Hamming ball.
using SampleTarget = std::variant<TargetSet, HammingPredicate>;

struct SampleBatch {
    TailKind kind = TailKind::Hitting;
    std::uint64_t seed = 0;
    std::uint64_t censor_cap = 0;
    std::vector<std::uint64_t> times;  // censored entries hold censor_cap
    std::vector<std::uint8_t> censored;
    std::uint64_t attempts = 0;        // initial windows drawn (return sampling)
    std::uint64_t rejections = 0;
    double mu_A = 0.0;                 // 0 when unknown (implicit targets)

    std::size_t size() const noexcept { return times.size(); }
    std::size_t censored_count() const noexcept;
};

struct SampleOptions {
    std::size_t samples = 10000;
    std::uint64_t seed = 0;
    std::uint64_t censor_cap = 0;                // 0: 50 / mu(A), adapted once
    std::size_t threads = 1;
    std::uint64_t rejection_budget = 1'000'000;  // window draws per trajectory
    bool force_rejection = false;                // use rejection even for word lists
};

/// i-th output of a splitmix64 stream started at `master`. Part of the
/// reproducibility contract: trajectory i always uses this seed.
std::uint64_t trajectory_seed(std::uint64_t master, std::uint64_t index) noexcept;

std::uint64_t default_censor_cap(double mu_A, double lambda_guess = 1.0);

SampleBatch sample_hitting(const ProcessModel& model, const SampleTarget& target, const SampleOptions& options);
SampleBatch sample_return(const ProcessModel& model, const SampleTarget& target, const SampleOptions& options);

/// H_emp(k) = #{samples > k} / N for k = 0..censor_cap.
TailDistribution empirical_tail(const SampleBatch& batch);

/// max_k |H_a(k) - H_b(k)| over the common horizon.
double ks_distance(const TailDistribution& a, const TailDistribution& b);

}  // namespace rarehit
