#include "rarehit/run.hpp"

#include <cmath>
#include <sstream>

namespace rarehit {

namespace {

using nlohmann::json;

ProcessModel need_model(const RunConfig& c) {
    if (c.model.is_null()) throw Error(ErrorCode::ConfigInvalid, c.analysis + " needs --model");
    return validate(model_params_from_json(c.model));
}

TargetSet need_target(const RunConfig& c, const ProcessModel& model) {
    if (c.target.is_null()) throw Error(ErrorCode::ConfigInvalid, c.analysis + " needs --target");
    return target_from_json(c.target, model.alphabet_size());
}

std::vector<TargetSet> family_of(const RunConfig& c, const ProcessModel& model) {
    std::vector<TargetSet> family;
    if (!c.n_range) throw Error(ErrorCode::ConfigInvalid, c.analysis + " needs --n-range");
    if (c.n_range->first > c.n_range->second) return family;
    if (c.point.empty()) throw Error(ErrorCode::ConfigInvalid, c.analysis + " needs --point");
    const auto point = parse_point(c.point, model.alphabet_size());
    for (std::size_t n = std::max<std::size_t>(c.n_range->first, 1); n <= c.n_range->second; ++n) {
        const Word w = point.prefix(n);
        family.push_back(c.family == "hamming" ? hamming_ball(w, c.D, model.alphabet_size()) : cylinder(w));
    }
    return family;
}

ExactAnalysisOptions exact_options(const RunConfig& c) {
    ExactAnalysisOptions opts;
    if (c.K > 0) opts.initial_horizon = static_cast<std::size_t>(c.K);
    return opts;
}

double entropy_level(const RunConfig& c) {
    if (c.h_nats) return *c.h_nats;
    if (!c.model.is_null()) return entropy(need_model(c));
    throw Error(ErrorCode::ConfigInvalid, "needs --h-bits, --h-nats or --model");
}

// Collects the report and the verdict of every asserted check.
struct Report {
    json result = json::object();
    std::ostringstream csv;
    std::vector<std::string> failures;

    void check(bool ok, const std::string& what) {
        if (!ok) failures.push_back(what);
    }
};

void run_tail(const RunConfig& c, Report& r) {
    const auto model = need_model(c);
    const auto set = need_target(c, model);
    if (c.K < 1) throw Error(ErrorCode::HorizonNonPositive, "tail needs --K >= 1");
    const auto hit = hitting_tail(model, set, c.K);
    const auto ret = return_tail(model, set, c.K);
    write_tail_csv(r.csv, hit, &ret);
    r.result = {{"mu_A", hit.mu_A}, {"H_hit", hit.values}, {"H_ret", ret.values}};
    r.check(std::abs(hit[0] - hit[1] - hit.mu_A) <= 1e-12, "H(0) - H(1) != mu(A)");
    for (std::size_t k = 1; k <= hit.horizon(); ++k) r.check(hit[k] <= hit[k - 1], "hitting tail not monotone");
}

void run_lambda(const RunConfig& c, Report& r, bool verify) {
    const auto model = need_model(c);
    const auto set = need_target(c, model);
    const auto a = analyze_exact(model, set, exact_options(c));
    r.result["certificate"] = to_json(a.cert);
    r.check(a.cert.checks.all(), "scale-lemma inequality violated");

    std::ostream& o = r.csv;
    o << "n,mu_A,mu_tau_le_n,alpha_n,d,delta,regime,s,lambda,lambda_nominal,lemma_checks";
    if (verify) o << ",horizon,sup_dev,argmax,bound,truncation,pass";
    o << '\n';
    const auto& k = a.cert;
    o << k.n << ',' << format_number(k.mu_A) << ',' << format_number(k.mu_tau_le_n) << ','
      << format_number(k.alpha_n) << ',' << format_number(k.d) << ',' << format_number(k.delta) << ','
      << to_string(k.regime) << ',' << (k.s ? std::to_string(*k.s) : std::string()) << ','
      << format_number(k.lambda) << ',' << k.lambda_nominal << ',' << k.checks.all();
    if (verify) {
        const auto& v = a.report;
        o << ',' << a.hitting.horizon() << ',' << format_number(v.sup_dev) << ',' << v.argmax << ','
          << format_number(v.bound) << ',' << format_number(v.truncation_residual) << ',' << v.pass;
        r.result["report"] = to_json(v);
        r.result["horizon"] = a.hitting.horizon();
        r.check(v.pass, "exponential approximation exceeds its bound");
    }
    o << '\n';
}

void run_limitlaw(const RunConfig& c, Report& r) {
    const auto model = need_model(c);
    const auto set = need_target(c, model);
    const auto a = analyze_exact(model, set, exact_options(c));
    const double lambda = a.cert.lambda, mu = a.hitting.mu_A;
    const auto ret = return_tail(model, set, static_cast<std::int64_t>(a.hitting.horizon()));

    const auto F = make_F(a.hitting, lambda, mu);
    const auto G = make_G(ret, lambda, mu);
    const auto grid = jump_grid(F, F.max_time());
    std::vector<std::pair<double, double>> pairs;
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
        pairs.emplace_back(grid[i], grid[i + 1]);
        pairs.emplace_back(0.0, grid[i + 1]);
    }
    const auto sandwich = check_sandwich(F, G, mu, pairs);
    const auto integral = check_integral_relation(F, G, grid);
    const auto kac = check_kac_bound(G, grid);
    const double d_hit = hitting_deviation(a.hitting, lambda, mu);
    const double d_ret = return_deviation(ret, lambda, mu, c.s0);
    const double bound = 12.0 * std::sqrt(a.cert.d) + 2.0 * mu;

    r.csv << "n,mu_A,lambda,D_hit,D_ret,bound,sandwich_violation,integral_residual,kac_excess,pass\n";
    const bool pass = sandwich.pass && integral.within_mu && kac.pass;
    r.csv << set.rank() << ',' << format_number(mu) << ',' << format_number(lambda) << ',' << format_number(d_hit)
          << ',' << format_number(d_ret) << ',' << format_number(bound) << ',' << format_number(sandwich.max_violation)
          << ',' << format_number(integral.max_residual) << ',' << format_number(kac.max_excess) << ',' << pass
          << '\n';
    r.result = {{"n", set.rank()},
                {"mu_A", mu},
                {"lambda", lambda},
                {"D_hit", d_hit},
                {"D_ret", d_ret},
                {"bound", bound},
                {"sandwich_violation", sandwich.max_violation},
                {"integral_residual", integral.max_residual},
                {"kac_excess", kac.max_excess},
                {"pass", pass}};
    r.check(sandwich.pass, "sandwich inequality violated");
    r.check(integral.within_mu, "integral relation residual exceeds mu(A)");
    r.check(kac.pass, "G(s) exceeds 1/s");
}

void run_mc(const RunConfig& c, Report& r) {
    const auto model = need_model(c);
    const auto set = need_target(c, model);
    const std::string kind = c.mode.empty() ? "hitting" : c.mode;
    if (kind != "hitting" && kind != "return") throw Error(ErrorCode::ConfigInvalid, "mc mode is hitting or return");
    SampleOptions opts;
    opts.samples = c.N;
    opts.seed = c.seed;
    opts.threads = std::max<std::size_t>(c.threads, 1);
    opts.censor_cap = c.censor_cap;
    const auto batch = kind == "hitting" ? sample_hitting(model, set, opts) : sample_return(model, set, opts);
    write_batch_csv(r.csv, batch);
    r.result = {{"kind", kind},
                {"master_seed", batch.seed},
                {"censor_cap", batch.censor_cap},
                {"times", batch.times},
                {"censored", batch.censored}};

    if (c.assert_checks) {
        const auto emp = empirical_tail(batch);
        const auto horizon = static_cast<std::int64_t>(emp.horizon());
        const auto exact = kind == "hitting" ? hitting_tail(model, set, horizon) : return_tail(model, set, horizon);
        const double ks = ks_distance(emp, exact);
        r.result["ks"] = ks;
        r.check(ks <= 1.36 / std::sqrt(static_cast<double>(batch.size())), "KS distance above 1.36/sqrt(N)");
    }
}

void run_sweep(const RunConfig& c, Report& r) {
    const auto model = need_model(c);
    const auto family = family_of(c, model);
    DiagnosticsOptions opts;
    opts.s0 = c.s0;
    opts.exact = exact_options(c);
    const auto rows = theorem1_diagnostics(model, family, opts);
    write_diagnostics_csv(r.csv, rows);
    r.result = json::array();
    for (const auto& row : rows) {
        r.result.push_back(to_json(row));
        r.check(row.within_bound, "D_hit above its bound at n=" + std::to_string(row.n));
        r.check(row.lambda_nominal || row.lambda <= 1.0 / (1.0 - row.delta) + 1e-12,
                "lambda above 1/(1-delta) at n=" + std::to_string(row.n));
    }
}

void run_rarity(const RunConfig& c, Report& r) {
    if (c.mode == "d0") {
        if (c.q < 2) throw Error(ErrorCode::ConfigInvalid, "rarity d0 needs --q >= 2");
        const auto d0 = solve_D0(c.q, entropy_level(c));
        r.csv << "q,h_nats,D0,crossed\n"
              << c.q << ',' << format_number(entropy_level(c)) << ',' << format_number(d0.value) << ',' << d0.crossed
              << '\n';
        r.result = {{"q", c.q}, {"h_nats", entropy_level(c)}, {"D0", d0.value}, {"crossed", d0.crossed}};
        r.check(d0.crossed, "no crossing below D = 1");
    } else if (c.mode == "kappa") {
        if (c.q < 2 || c.n < 1) throw Error(ErrorCode::ConfigInvalid, "rarity kappa needs --q >= 2 and --n >= 1");
        const std::size_t radius = hamming_radius(c.n, c.D);
        const double exact = hamming_ball_count(c.n, radius, c.q);
        const double bound = hamming_kappa_bound(c.n, c.D, c.q);
        r.csv << "n,q,D,radius,kappa,kappa_bound\n"
              << c.n << ',' << c.q << ',' << format_number(c.D) << ',' << radius << ',' << format_number(exact) << ','
              << format_number(bound) << '\n';
        r.result = {{"n", c.n}, {"q", c.q}, {"D", c.D}, {"radius", radius}, {"kappa", exact}, {"kappa_bound", bound}};
        r.check(exact <= bound, "ball size above its closed-form bound");
    } else if (c.mode == "rate") {
        if (c.q < 2 || !c.n_range) throw Error(ErrorCode::ConfigInvalid, "rarity rate needs --q and --n-range");
        std::vector<std::pair<std::size_t, double>> table;
        for (std::size_t n = std::max<std::size_t>(c.n_range->first, 1); n <= c.n_range->second; ++n)
            table.emplace_back(n, hamming_ball_count(n, hamming_radius(n, c.D), c.q));
        std::optional<double> h;
        if (c.h_nats || !c.model.is_null()) h = entropy_level(c);
        r.csv << "n,kappa,rate_n\n";
        json rows = json::array();
        for (const auto& [n, kappa] : table) {
            const double rate = std::log(kappa) / static_cast<double>(n);
            r.csv << n << ',' << format_number(kappa) << ',' << format_number(rate) << '\n';
            rows.push_back({{"n", n}, {"kappa", kappa}, {"rate_n", rate}});
        }
        r.result = {{"rows", rows}};
        if (table.empty()) return;
        const auto est = cardinality_rate(table, h);
        r.csv << "# rate=" << format_number(est.rate) << " n_at=" << est.n_at;
        if (est.below_entropy) r.csv << " below_entropy=" << *est.below_entropy;
        r.csv << '\n';
        r.result["rate"] = est.rate;
        r.result["n_at"] = est.n_at;
        r.result["below_entropy"] = est.below_entropy ? json(*est.below_entropy) : json(nullptr);
        if (est.below_entropy) r.check(*est.below_entropy, "cardinality rate not below the entropy");
    } else if (c.mode == "epsilon") {
        const auto model = need_model(c);
        std::vector<RarityRow> rows;
        if (c.n_range) {
            for (const auto& set : family_of(c, model)) {
                RarityRow row{epsilon_bound(model, static_cast<double>(set.cardinality()), set.rank()), {}};
                row.mu_tau_le_n = hitting_tail(model, set, static_cast<std::int64_t>(set.rank())).cdf(set.rank());
                rows.push_back(row);
            }
        } else {
            if (c.n < 1 || c.kappa < 1.0) throw Error(ErrorCode::ConfigInvalid, "rarity epsilon needs --n and --kappa");
            rows.push_back({epsilon_bound(model, c.kappa, c.n), {}});
        }
        write_rarity_csv(r.csv, rows);
        r.result = json::array();
        for (const auto& row : rows) {
            r.result.push_back(to_json(row));
            if (row.mu_tau_le_n)
                r.check(*row.mu_tau_le_n <= row.bound.epsilon, "mu(tau <= n) above epsilon_n at n=" +
                                                                    std::to_string(row.bound.n));
        }
    } else {
        throw Error(ErrorCode::ConfigInvalid, "rarity mode must be epsilon, d0, rate or kappa");
    }
}

}  // namespace

int exit_code_for(const Error& e) noexcept { return is_resource_error(e.code()) ? kExitResource : kExitConfig; }

int run(const RunConfig& config, std::ostream& out, std::ostream& log) {
    Report r;
    const auto& a = config.analysis;
    if (a == "tail") run_tail(config, r);
    else if (a == "lambda") run_lambda(config, r, false);
    else if (a == "verify") run_lambda(config, r, true);
    else if (a == "limitlaw") run_limitlaw(config, r);
    else if (a == "mc") run_mc(config, r);
    else if (a == "sweep") run_sweep(config, r);
    else if (a == "rarity") run_rarity(config, r);
    else throw Error(ErrorCode::ConfigInvalid, "unknown analysis '" + a + "'");

    if (config.format == "json") {
        out << json{{"config", to_json(config)}, {"result", r.result}}.dump(2) << '\n';
    } else {
        write_config_header(out, config);
        out << r.csv.str();
    }
    if (config.assert_checks && !r.failures.empty()) {
        for (const auto& f : r.failures) log << "assertion failed: " << f << '\n';
        return kExitAssertion;
    }
    return kExitOk;
}

}  // namespace rarehit
