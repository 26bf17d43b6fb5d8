#include "rarehit/scaling.hpp"

#include <algorithm>
#include <cmath>

#include "rarehit/error.hpp"
#include "rarehit/kernels.hpp"

namespace rarehit {

namespace {

// Rounding allowance when re-deriving inequalities from a computed tail.
constexpr double kCheckTol = 1e-12;

bool le(double a, double b) { return a <= b + kCheckTol; }

}  // namespace

std::string_view to_string(Regime regime) noexcept {
    return regime == Regime::Quantitative ? "quantitative" : "trivial";
}

double ScaleCertificate::sqrt_d() const { return std::sqrt(d); }

ScaleCertificate scale_search(const TailDistribution& tail, std::size_t n, double alpha_n) {
    if (n < 1) throw Error(ErrorCode::InvalidArgument, "rank n must be >= 1");
    if (alpha_n < 0.0) throw Error(ErrorCode::InvalidArgument, "alpha(n) must be >= 0");
    if (tail.kind != TailKind::Hitting) throw Error(ErrorCode::InvalidArgument, "scale search needs a hitting tail");
    const std::size_t horizon = tail.horizon();
    if (horizon < n) throw Error(ErrorCode::HorizonTooShort, "tail horizon below n");

    ScaleCertificate cert;
    cert.n = n;
    cert.mu_A = tail.mu_A;
    cert.source = tail.source;
    cert.samples = tail.samples;
    cert.alpha_n = alpha_n;
    cert.mu_tau_le_n = tail.cdf(n);
    cert.d = 2.0 * cert.mu_tau_le_n + alpha_n;
    cert.delta = 3.0 * std::sqrt(cert.d);
    if (cert.delta >= 0.25) {
        cert.regime = Regime::Trivial;
        return cert;
    }
    cert.regime = Regime::Quantitative;
    const double root = std::sqrt(cert.d);

    if (horizon < 2 * n + 1) throw Error(ErrorCode::HorizonTooShort, "tail horizon below 2n+1");
    std::size_t gap = 0;  // s - 2n
    for (std::size_t j = 1; j <= horizon; ++j)
        if (tail.cdf(j) >= root) {
            gap = j;
            break;
        }
    if (gap == 0 || gap + 2 * n > horizon)
        throw Error(ErrorCode::HorizonTooShort, "scale s lies beyond the tail horizon " + std::to_string(horizon));
    const std::size_t s = gap + 2 * n;
    cert.s = static_cast<std::int64_t>(s);

    const double ratio = (tail.cdf(2 * n) + alpha_n) / tail.cdf(gap);
    cert.checks.minimal_s = tail.cdf(gap) >= root && tail.cdf(gap - 1) < root;
    cert.checks.tau_le_s_sharp = le(tail.cdf(s), root + 2.0 * cert.d);
    cert.checks.ratio_sharp = le(ratio, root);
    cert.checks.tau_le_s_stated = le(tail.cdf(s), cert.delta);
    cert.checks.ratio_stated = le(ratio, cert.delta);
    return cert;
}

ScaleCertificate compute_lambda(const TailDistribution& tail, ScaleCertificate cert, double mu_A) {
    if (!(mu_A > 0.0)) throw Error(ErrorCode::ZeroMeasureSet, "lambda needs mu(A) > 0");
    cert.mu_A = mu_A;
    if (cert.regime == Regime::Trivial || !cert.s) {
        cert.lambda = 1.0;
        cert.lambda_nominal = true;
        return cert;
    }
    const auto s = static_cast<std::size_t>(*cert.s);
    const std::size_t gap = s - 2 * cert.n;
    if (gap > tail.horizon()) throw Error(ErrorCode::HorizonTooShort, "tail ends before s - 2n");
    const double h = tail[gap];
    if (!(h > 0.0)) throw Error(ErrorCode::ZeroTail, "H(s-2n) = 0");
    cert.lambda = -std::log(h) / (static_cast<double>(s) * mu_A);
    cert.lambda_nominal = false;
    cert.checks.lambda_positive = cert.lambda > 0.0;
    cert.checks.lambda_bounded = le(cert.lambda, cert.lambda_cap()) && le(cert.lambda_cap(), 2.0);
    return cert;
}

VerificationReport verify_theorem2(const TailDistribution& tail, double lambda, double mu_A,
                                   const ScaleCertificate& cert) {
    const std::size_t horizon = tail.horizon();
    const double rate = lambda * mu_A;
    std::vector<double> expo(horizon + 1);
    for (std::size_t k = 0; k <= horizon; ++k) expo[k] = std::exp(-rate * static_cast<double>(k));
    if (tail[horizon] > kTailResolution || expo[horizon] > kTailResolution)
        throw Error(ErrorCode::HorizonTooShort,
                    "tail and exponential must both fall below 1e-4 by the horizon " + std::to_string(horizon));

    VerificationReport report;
    report.residuals.resize(horizon + 1);
    for (std::size_t k = 0; k <= horizon; ++k) report.residuals[k] = std::abs(tail[k] - expo[k]);
    report.sup_dev = kernels::max_abs_diff(tail.values, expo);
    report.argmax = static_cast<std::size_t>(
        std::max_element(report.residuals.begin(), report.residuals.end()) - report.residuals.begin());
    report.bound = 12.0 * std::sqrt(cert.d);
    if (tail.source == TailSource::Empirical && tail.samples > 0)
        report.sampling_slack = 2.0 * 1.36 / std::sqrt(static_cast<double>(tail.samples));
    report.truncation_residual = std::max(tail[horizon], expo[horizon]);
    report.pass = report.sup_dev <= report.bound + report.sampling_slack + report.truncation_residual;
    return report;
}

ExactAnalysis analyze_exact(const ProcessModel& model, const TargetSet& set, const ExactAnalysisOptions& options) {
    const std::size_t n = set.rank();
    TailPropagator prop(model, set, TailKind::Hitting);
    if (!(prop.mu_A() > 0.0)) throw Error(ErrorCode::ZeroMeasureSet, "target has zero measure");
    const double alpha = MixingBound(model)(static_cast<std::int64_t>(n));

    auto grow = [&](std::size_t wanted) {
        if (wanted > options.max_horizon)
            throw Error(ErrorCode::HorizonTooShort,
                        "horizon would exceed the cap of " + std::to_string(options.max_horizon) + " steps");
        prop.extend_to(wanted);
    };

    std::size_t horizon = std::max(options.initial_horizon, 2 * n + 1);
    grow(horizon);
    ScaleCertificate cert;
    for (;;) {
        try {
            cert = scale_search(prop.tail(), n, alpha);
            break;
        } catch (const Error& e) {
            if (e.code() != ErrorCode::HorizonTooShort || horizon >= options.max_horizon) throw;
            horizon = std::min(2 * horizon, options.max_horizon);
            grow(horizon);
        }
    }
    cert = compute_lambda(prop.tail(), cert, prop.mu_A());

    const double rate = cert.lambda * prop.mu_A();
    const auto exp_horizon = static_cast<std::size_t>(std::ceil(std::log(1.0 / options.tail_resolution) / rate));
    horizon = std::max(horizon, exp_horizon);
    grow(horizon);
    while (prop.values().back() > options.tail_resolution) {
        horizon *= 2;
        grow(horizon);
    }

    ExactAnalysis out{prop.tail(), cert, {}};
    out.report = verify_theorem2(out.hitting, cert.lambda, prop.mu_A(), cert);
    return out;
}

SymbolStream::SymbolStream(Word prefix, Word cycle) : prefix_(std::move(prefix)), cycle_(std::move(cycle)) {
    if (cycle_.empty()) throw Error(ErrorCode::EmptyWord, "symbol stream needs a non-empty cycle");
}

SymbolStream SymbolStream::champernowne(std::size_t q, std::size_t length) {
    if (q < 2) throw Error(ErrorCode::EmptyAlphabet, "Champernowne sequence needs q >= 2");
    Word seq;
    for (std::uint64_t v = 1; seq.size() < length; ++v) {
        Word digits;
        for (std::uint64_t x = v; x > 0; x /= q) digits.push_back(static_cast<Symbol>(x % q));
        seq.insert(seq.end(), digits.rbegin(), digits.rend());
    }
    seq.resize(length);
    return SymbolStream({}, std::move(seq));
}

Symbol SymbolStream::at(std::size_t i) const {
    if (i < prefix_.size()) return prefix_[i];
    return cycle_[(i - prefix_.size()) % cycle_.size()];
}

Word SymbolStream::prefix(std::size_t n) const {
    Word w(n);
    for (std::size_t i = 0; i < n; ++i) w[i] = at(i);
    return w;
}

std::vector<TrajectoryRow> lambda_trajectory(const ProcessModel& model, const SymbolStream& point, std::size_t n_min,
                                             std::size_t n_max, const ExactAnalysisOptions& options) {
    std::vector<TrajectoryRow> rows;
    for (std::size_t n = std::max<std::size_t>(n_min, 1); n <= n_max; ++n) {
        auto analysis = analyze_exact(model, cylinder(point.prefix(n)), options);
        rows.push_back({n, analysis.cert, std::move(analysis.report)});
    }
    return rows;
}

nlohmann::json to_json(const ScaleCertificate& cert) {
    nlohmann::json j;
    j["n"] = cert.n;
    j["d"] = cert.d;
    j["delta"] = cert.delta;
    j["regime"] = std::string(to_string(cert.regime));
    j["s"] = cert.s ? nlohmann::json(*cert.s) : nlohmann::json(nullptr);
    j["lambda"] = cert.lambda;
    j["lambda_nominal"] = cert.lambda_nominal;
    j["mu_A"] = cert.mu_A;
    j["mu_tau_le_n"] = cert.mu_tau_le_n;
    j["alpha_n"] = cert.alpha_n;
    j["source"] = std::string(to_string(cert.source));
    j["checks"] = {
        {"minimal_s", cert.checks.minimal_s},
        {"tau_le_s_sharp", cert.checks.tau_le_s_sharp},
        {"ratio_sharp", cert.checks.ratio_sharp},
        {"tau_le_s_stated", cert.checks.tau_le_s_stated},
        {"ratio_stated", cert.checks.ratio_stated},
        {"lambda_positive", cert.checks.lambda_positive},
        {"lambda_bounded", cert.checks.lambda_bounded},
    };
    return j;
}

}  // namespace rarehit
