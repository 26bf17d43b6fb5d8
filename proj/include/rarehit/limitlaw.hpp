#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "rarehit/exact.hpp"
#include "rarehit/scaling.hpp"

namespace rarehit {

enum class LawRole { F, G };

/// Rescaled hitting CDF F_A(t) = mu(lambda mu tau <= t) or normalized
/// return tail G_A(s) = mu(lambda mu tau > s | A) / lambda.
///
/// Laws built from a tail are step functions with jumps at t = k * lambda * mu;
/// the analytic pair F = 1 - e^{-t}, G = e^{-s} is the limiting law.
class RescaledLaw {
public:
    static RescaledLaw from_hitting(const TailDistribution& hitting, double lambda, double mu_A);
    static RescaledLaw from_return(const TailDistribution& ret, double lambda, double mu_A);
    static std::pair<RescaledLaw, RescaledLaw> exponential_pair();

    LawRole role() const noexcept { return role_; }
    bool analytic() const noexcept { return analytic_; }
    double lambda() const noexcept { return lambda_; }
    double mu_A() const noexcept { return mu_A_; }
    /// Jump spacing lambda * mu(A); 0 for analytic laws.
    double step() const noexcept { return step_; }
    /// Largest time the law is known on.
    double max_time() const noexcept;

    double operator()(double t) const;
    /// Right limit at 0.
    double at_zero_plus() const;
    /// int_a^b of the law, exact for step functions.
    double integral(double a, double b) const;

    /// Step index k with t in [k c, (k+1) c).
    std::size_t index_of(double t) const;

    /// Flat values H(k) of a step law (empty for analytic laws).
    std::span<const double> flats() const noexcept { return tail_; }

private:
    LawRole role_ = LawRole::F;
    bool analytic_ = false;
    double lambda_ = 1.0;
    double mu_A_ = 0.0;
    double step_ = 0.0;
    std::vector<double> tail_;    // H(k)
    std::vector<double> prefix_;  // sum_{i<k} H(i)

    double antiderivative(double t) const;
};

RescaledLaw make_F(const TailDistribution& hitting, double lambda, double mu_A);
RescaledLaw make_G(const TailDistribution& ret, double lambda, double mu_A);

/// Jump points k*c (k = 0..K) and the midpoints between them, capped at t_max.
std::vector<double> jump_grid(const RescaledLaw& law, double t_max, bool with_midpoints = true);

struct SandwichResult {
    double max_violation = 0.0;  // <= 0 means every pair satisfied it
    std::pair<double, double> worst{0.0, 0.0};
    bool pass = false;
};

inline constexpr double kSandwichSlack = 1e-10;

/// int_t^t' G - mu(A) <= F(t') - F(t) <= int_t^t' G + mu(A) on each (t, t').
SandwichResult check_sandwich(const RescaledLaw& F, const RescaledLaw& G, double mu_A,
                              const std::vector<std::pair<double, double>>& pairs);

struct IntegralRelation {
    std::vector<double> t;
    std::vector<double> residual;  // |F(t) - F(0+) - int_0^t G|
    double max_residual = 0.0;
    bool within_mu = false;        // max_residual <= mu(A) + slack
};

IntegralRelation check_integral_relation(const RescaledLaw& F, const RescaledLaw& G, const std::vector<double>& t_grid);

struct KacBoundCheck {
    double max_excess = 0.0;  // sup over s > 0 of G(s) - 1/s (grid points, plus every flat's right end for step laws)
    double at_zero = 0.0;     // G(0+)
    bool pass = false;        // G(s) <= 1/s everywhere and G(0+) <= 1/lambda
};

KacBoundCheck check_kac_bound(const RescaledLaw& G, const std::vector<double>& s_grid);

struct DiagnosticsRow {
    std::size_t n = 0;
    double mu_A = 0.0;
    double lambda = 1.0;
    bool lambda_nominal = true;
    double delta = 0.0;
    double d_hit = 0.0;
    double d_ret = 0.0;
    double bound = 0.0;  // 12 sqrt(2 mu(tau <= n) + alpha(n)) + 2 mu(A)
    double truncation = 0.0;
    bool within_bound = false;
};

struct DiagnosticsOptions {
    double s0 = 0.05;
    ExactAnalysisOptions exact;
};

/// sup_t |1 - F(t) - e^{-t}| over the step function's jumps.
double hitting_deviation(const TailDistribution& hitting, double lambda, double mu_A);
/// sup_{t >= s0} |G(t) - e^{-t}|.
double return_deviation(const TailDistribution& ret, double lambda, double mu_A, double s0);

std::vector<DiagnosticsRow> theorem1_diagnostics(const ProcessModel& model, const std::vector<TargetSet>& family,
                                                 const DiagnosticsOptions& options = {});

}  // namespace rarehit
