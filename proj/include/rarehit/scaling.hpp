#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include <json.hpp>

#include "rarehit/exact.hpp"
#include "rarehit/process.hpp"
#include "rarehit/targets.hpp"

namespace rarehit {

enum class Regime { Quantitative, Trivial };

std::string_view to_string(Regime regime) noexcept;

/// Outcome of every inequality the scale lemma and the lambda formula
/// promise, recomputed from the tail rather than trusted.
struct LemmaChecks {
    bool minimal_s = true;          // mu(tau <= s-2n) >= sqrt d > mu(tau <= s-2n-1)
    bool tau_le_s_sharp = true;     // mu(tau <= s) <= sqrt d + 2d
    bool ratio_sharp = true;        // (mu(tau <= 2n) + alpha) / mu(tau <= s-2n) <= sqrt d
    bool tau_le_s_stated = true;    // mu(tau <= s) <= delta
    bool ratio_stated = true;       // same ratio <= delta
    bool lambda_positive = true;    // lambda > 0
    bool lambda_bounded = true;     // lambda <= 1/(1-delta) <= 2

    bool all() const noexcept {
        return minimal_s && tau_le_s_sharp && ratio_sharp && tau_le_s_stated && ratio_stated && lambda_positive &&
               lambda_bounded;
    }
};

struct ScaleCertificate {
    std::size_t n = 0;
    double mu_A = 0.0;
    double mu_tau_le_n = 0.0;
    double alpha_n = 0.0;
    double d = 0.0;
    double delta = 0.0;
    Regime regime = Regime::Trivial;
    std::optional<std::int64_t> s;
    double lambda = 1.0;
    bool lambda_nominal = true;
    TailSource source = TailSource::Exact;
    std::size_t samples = 0;
    LemmaChecks checks;

    double sqrt_d() const;
    double lambda_cap() const { return 1.0 / (1.0 - delta); }
};

/// Smallest s > 2n with mu(tau <= s-2n) >= sqrt d, in the regime delta < 1/4.
/// Throws HorizonTooShort when the tail ends before s (or before 2n+1).
ScaleCertificate scale_search(const TailDistribution& tail, std::size_t n, double alpha_n);

/// lambda(A) = -ln H(s-2n) / (s mu(A)); nominal 1 in the trivial regime.
ScaleCertificate compute_lambda(const TailDistribution& tail, ScaleCertificate cert, double mu_A);

struct VerificationReport {
    double sup_dev = 0.0;
    std::size_t argmax = 0;
    double bound = 0.0;
    double sampling_slack = 0.0;  // 2 * 1.36 / sqrt(N) for empirical tails
    double truncation_residual = 0.0;
    bool pass = false;
    std::vector<double> residuals;  // |H(k) - exp(-lambda mu k)|, k = 0..K
};

inline constexpr double kTailResolution = 1e-4;

/// sup_k |H(k) - exp(-lambda mu k)| against 12 sqrt(2 mu(tau <= n) + alpha(n)).
VerificationReport verify_theorem2(const TailDistribution& tail, double lambda, double mu_A,
                                   const ScaleCertificate& cert);

struct ExactAnalysisOptions {
    std::size_t initial_horizon = 64;
    std::size_t max_horizon = 100'000'000;
    double tail_resolution = kTailResolution;
};

/// Exact hitting tail grown until the scale search and the Theorem 2 check
/// are both decidable, with the certificate and report.
struct ExactAnalysis {
    TailDistribution hitting;
    ScaleCertificate cert;
    VerificationReport report;
};

ExactAnalysis analyze_exact(const ProcessModel& model, const TargetSet& set,
                            const ExactAnalysisOptions& options = {});

/// Infinite sequence given as a finite prefix followed by a repeated cycle.
class SymbolStream {
public:
    SymbolStream(Word prefix, Word cycle);

    static SymbolStream periodic(Word cycle) { return SymbolStream({}, std::move(cycle)); }
    /// Concatenated base-q expansions of 1, 2, 3, ... (the first `length` symbols, recycled).
    static SymbolStream champernowne(std::size_t q, std::size_t length = 4096);

    Symbol at(std::size_t i) const;
    Word prefix(std::size_t n) const;

private:
    Word prefix_;
    Word cycle_;
};

struct TrajectoryRow {
    std::size_t n = 0;
    ScaleCertificate cert;
    VerificationReport report;
};

std::vector<TrajectoryRow> lambda_trajectory(const ProcessModel& model, const SymbolStream& point,
                                             std::size_t n_min, std::size_t n_max,
                                             const ExactAnalysisOptions& options = {});

nlohmann::json to_json(const ScaleCertificate& cert);

}  // namespace rarehit
