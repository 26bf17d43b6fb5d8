#include "rarehit/limitlaw.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rarehit/error.hpp"
#include "rarehit/kernels.hpp"

namespace rarehit {

RescaledLaw RescaledLaw::from_hitting(const TailDistribution& hitting, double lambda, double mu_A) {
    if (!(lambda > 0.0) || !(mu_A > 0.0))
        throw Error(ErrorCode::InvalidArgument, "rescaling needs lambda > 0 and mu(A) > 0");
    RescaledLaw law;
    law.role_ = LawRole::F;
    law.lambda_ = lambda;
    law.mu_A_ = mu_A;
    law.step_ = lambda * mu_A;
    law.tail_ = hitting.values;
    law.prefix_.assign(law.tail_.size() + 1, 0.0);
    for (std::size_t k = 0; k < law.tail_.size(); ++k) law.prefix_[k + 1] = law.prefix_[k] + law.tail_[k];
    return law;
}

RescaledLaw RescaledLaw::from_return(const TailDistribution& ret, double lambda, double mu_A) {
    RescaledLaw law = from_hitting(ret, lambda, mu_A);
    law.role_ = LawRole::G;
    return law;
}

std::pair<RescaledLaw, RescaledLaw> RescaledLaw::exponential_pair() {
    RescaledLaw f;
    f.role_ = LawRole::F;
    f.analytic_ = true;
    RescaledLaw g = f;
    g.role_ = LawRole::G;
    return {f, g};
}

double RescaledLaw::max_time() const noexcept {
    if (analytic_) return std::numeric_limits<double>::infinity();
    return static_cast<double>(tail_.size()) * step_;
}

std::size_t RescaledLaw::index_of(double t) const {
    if (t < 0.0) throw Error(ErrorCode::InvalidArgument, "negative time");
    auto k = static_cast<std::size_t>(std::floor(t / step_));
    while (static_cast<double>(k + 1) * step_ <= t) ++k;
    while (k > 0 && static_cast<double>(k) * step_ > t) --k;
    if (k >= tail_.size())
        throw Error(ErrorCode::HorizonTooShort, "time " + std::to_string(t) + " beyond the law's horizon");
    return k;
}

double RescaledLaw::operator()(double t) const {
    if (analytic_) return role_ == LawRole::F ? (t <= 0.0 ? 0.0 : 1.0 - std::exp(-t)) : std::exp(-std::max(t, 0.0));
    if (role_ == LawRole::F && t < 0.0) return 0.0;
    const double h = tail_[index_of(std::max(t, 0.0))];
    return role_ == LawRole::F ? 1.0 - h : h / lambda_;
}

double RescaledLaw::at_zero_plus() const {
    if (analytic_) return role_ == LawRole::F ? 0.0 : 1.0;
    return role_ == LawRole::F ? 1.0 - tail_[0] : tail_[0] / lambda_;
}

double RescaledLaw::antiderivative(double t) const {
    if (analytic_) return role_ == LawRole::F ? t - (1.0 - std::exp(-t)) : 1.0 - std::exp(-t);
    const std::size_t k = index_of(t);
    const double area = step_ * prefix_[k] + (t - static_cast<double>(k) * step_) * tail_[k];
    return role_ == LawRole::F ? t - area : area / lambda_;
}

double RescaledLaw::integral(double a, double b) const {
    if (a < 0.0 || b < a) throw Error(ErrorCode::InvalidArgument, "integral needs 0 <= a <= b");
    return antiderivative(b) - antiderivative(a);
}

RescaledLaw make_F(const TailDistribution& hitting, double lambda, double mu_A) {
    return RescaledLaw::from_hitting(hitting, lambda, mu_A);
}

RescaledLaw make_G(const TailDistribution& ret, double lambda, double mu_A) {
    return RescaledLaw::from_return(ret, lambda, mu_A);
}

std::vector<double> jump_grid(const RescaledLaw& law, double t_max, bool with_midpoints) {
    std::vector<double> grid;
    if (law.analytic()) {
        // No jumps: a uniform grid of 1000 cells.
        for (int i = 0; i <= 1000; ++i) grid.push_back(t_max * i / 1000.0);
        return grid;
    }
    const double c = law.step();
    const double limit = std::min(t_max, law.max_time());
    for (std::size_t k = 0;; ++k) {
        const double t = static_cast<double>(k) * c;
        if (t >= limit) break;
        grid.push_back(t);
        if (with_midpoints && t + 0.5 * c < limit) grid.push_back(t + 0.5 * c);
    }
    return grid;
}

SandwichResult check_sandwich(const RescaledLaw& F, const RescaledLaw& G, double mu_A,
                              const std::vector<std::pair<double, double>>& pairs) {
    if (pairs.empty()) throw Error(ErrorCode::GridEmpty, "sandwich check needs at least one (t, t') pair");
    SandwichResult result;
    result.max_violation = -std::numeric_limits<double>::infinity();
    for (const auto& [t, t2] : pairs) {
        const double jump = F(t2) - F(t);
        const double area = G.integral(t, t2);
        const double violation = std::max(area - mu_A - jump, jump - area - mu_A);
        if (violation > result.max_violation) {
            result.max_violation = violation;
            result.worst = {t, t2};
        }
    }
    result.pass = result.max_violation <= kSandwichSlack;
    return result;
}

IntegralRelation check_integral_relation(const RescaledLaw& F, const RescaledLaw& G, const std::vector<double>& t_grid) {
    IntegralRelation rel;
    const double f0 = F.at_zero_plus();
    for (double t : t_grid) {
        const double r = t <= 0.0 ? 0.0 : std::abs(F(t) - f0 - G.integral(0.0, t));
        rel.t.push_back(t);
        rel.residual.push_back(r);
        rel.max_residual = std::max(rel.max_residual, r);
    }
    rel.within_mu = rel.max_residual <= G.mu_A() + kSandwichSlack;
    return rel;
}

KacBoundCheck check_kac_bound(const RescaledLaw& G, const std::vector<double>& s_grid) {
    if (s_grid.empty()) throw Error(ErrorCode::GridEmpty, "Kac bound check needs grid points");
    KacBoundCheck check;
    check.max_excess = -std::numeric_limits<double>::infinity();
    for (double s : s_grid)
        if (s > 0.0) check.max_excess = std::max(check.max_excess, G(s) - 1.0 / s);
    // On a flat [kc, (k+1)c) the gap to 1/s is smallest at the right end.
    const auto flats = G.flats();
    for (std::size_t k = 0; k < flats.size(); ++k)
        check.max_excess = std::max(check.max_excess,
                                    flats[k] / G.lambda() - 1.0 / (static_cast<double>(k + 1) * G.step()));
    check.at_zero = G.at_zero_plus();
    check.pass = check.max_excess <= 1e-12 && check.at_zero <= 1.0 / G.lambda() + 1e-12;
    return check;
}

double hitting_deviation(const TailDistribution& hitting, double lambda, double mu_A) {
    const double c = lambda * mu_A;
    const std::size_t horizon = hitting.horizon();
    std::vector<double> expo(horizon + 2);
    for (std::size_t k = 0; k < expo.size(); ++k) expo[k] = std::exp(-c * static_cast<double>(k));
    const std::span<const double> h(hitting.values);
    const std::span<const double> e(expo);
    // On [kc, (k+1)c) the survival is H(k) while e^{-t} sweeps (e_{k+1}, e_k].
    return std::max(kernels::max_abs_diff(h, e.first(horizon + 1)), kernels::max_abs_diff(h, e.subspan(1)));
}

double return_deviation(const TailDistribution& ret, double lambda, double mu_A, double s0) {
    const double c = lambda * mu_A;
    double worst = 0.0;
    for (std::size_t k = 0; k <= ret.horizon(); ++k) {
        const double right = static_cast<double>(k + 1) * c;
        if (right <= s0) continue;
        const double left = std::max(s0, static_cast<double>(k) * c);
        const double g = ret[k] / lambda;
        worst = std::max({worst, std::abs(g - std::exp(-left)), std::abs(g - std::exp(-right))});
    }
    return worst;
}

std::vector<DiagnosticsRow> theorem1_diagnostics(const ProcessModel& model, const std::vector<TargetSet>& family,
                                                 const DiagnosticsOptions& options) {
    std::vector<DiagnosticsRow> rows;
    for (const auto& set : family) {
        const auto analysis = analyze_exact(model, set, options.exact);
        TailPropagator ret(model, set, TailKind::Return);
        ret.extend_to(analysis.hitting.horizon());

        DiagnosticsRow row;
        row.n = set.rank();
        row.mu_A = analysis.hitting.mu_A;
        row.lambda = analysis.cert.lambda;
        row.lambda_nominal = analysis.cert.lambda_nominal;
        row.delta = analysis.cert.delta;
        row.d_hit = hitting_deviation(analysis.hitting, row.lambda, row.mu_A);
        row.d_ret = return_deviation(ret.tail(), row.lambda, row.mu_A, options.s0);
        row.bound = 12.0 * std::sqrt(analysis.cert.d) + 2.0 * row.mu_A;
        const double c = row.lambda * row.mu_A;
        row.truncation = std::max(analysis.hitting.values.back(),
                                  std::exp(-c * static_cast<double>(analysis.hitting.horizon() + 1)));
        row.within_bound = std::max(row.d_hit, row.truncation) <= row.bound;
        rows.push_back(row);
    }
    return rows;
}

}  // namespace rarehit
