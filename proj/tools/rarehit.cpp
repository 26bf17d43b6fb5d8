// rarehit: command-line front end. Parses flags into a RunConfig and hands
// it to rarehit::run; --config replays the config header of an earlier report.

#include <cmath>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "rarehit/run.hpp"

namespace {

struct Flags {
    std::string model, target, out, config, n_range, point, family = "cylinder", format = "csv", mode;
    std::int64_t K = 0;
    std::size_t N = 10000, threads = 1, q = 0, n = 0;
    std::uint64_t seed = 0, censor_cap = 0;
    double D = 0.0, kappa = 0.0, s0 = 0.05;
    std::optional<double> h_bits, h_nats;
    bool assert_checks = false;
};

rarehit::RunConfig resolve(const std::string& analysis, const Flags& f) {
    rarehit::RunConfig c;
    c.analysis = analysis;
    c.mode = f.mode;
    if (!f.model.empty()) c.model = rarehit::resolve_model_spec(f.model);
    if (!f.target.empty()) c.target = rarehit::resolve_target_spec(f.target);
    c.K = f.K;
    c.N = f.N;
    c.seed = f.seed;
    c.threads = f.threads;
    c.censor_cap = f.censor_cap;
    if (!f.n_range.empty()) c.n_range = rarehit::parse_range(f.n_range);
    c.point = f.point;
    c.family = f.family;
    c.D = f.D;
    c.q = f.q;
    if (f.h_nats) c.h_nats = *f.h_nats;
    if (f.h_bits) c.h_nats = *f.h_bits * std::log(2.0);
    c.kappa = f.kappa;
    c.n = f.n;
    c.s0 = f.s0;
    c.format = f.format;
    c.assert_checks = f.assert_checks;
    // Round-trip through the schema so flag runs and replays validate identically.
    return rarehit::run_config_from_json(rarehit::to_json(c));
}

void add_common(CLI::App* sub, Flags& f) {
    sub->add_option("--model", f.model, "iid-uniform-Q, model JSON file, or inline JSON");
    sub->add_option("--target", f.target, "cyl:0,1 | ham:0,0,0:0.2 | target JSON file or inline JSON");
    sub->add_option("--K", f.K, "tail horizon (initial horizon for lambda/verify)");
    sub->add_option("--N", f.N, "Monte Carlo sample count");
    sub->add_option("--seed", f.seed, "master seed");
    sub->add_option("--threads", f.threads, "sampling threads");
    sub->add_option("--censor-cap", f.censor_cap, "Monte Carlo censoring time (0: automatic)");
    sub->add_option("--n-range", f.n_range, "ranks a:b (inclusive)");
    sub->add_option("--point", f.point, "periodic:<word> or champernowne");
    sub->add_option("--family", f.family, "cylinder or hamming")->check(CLI::IsMember({"cylinder", "hamming"}));
    sub->add_option("--D", f.D, "Hamming radius fraction");
    sub->add_option("--q", f.q, "alphabet size");
    sub->add_option("--n", f.n, "rank");
    sub->add_option("--kappa", f.kappa, "number of rank-n cylinders");
    auto* bits = sub->add_option("--h-bits", f.h_bits, "entropy level in bits per symbol");
    sub->add_option("--h-nats", f.h_nats, "entropy level in nats per symbol")->excludes(bits);
    sub->add_option("--s0", f.s0, "left end of the return-time diagnostic window");
    sub->add_option("--out", f.out, "report path (default: stdout)");
    sub->add_option("--format", f.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--config", f.config, "replay the config of an earlier report or config file");
    sub->add_flag("--assert", f.assert_checks, "exit 2 if any checked inequality fails");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Hitting and return times of rare cylinder events"};
    app.require_subcommand(1);
    Flags f;

    std::vector<std::pair<std::string, CLI::App*>> subs;
    for (const char* name : {"tail", "lambda", "verify", "limitlaw", "mc", "sweep"}) {
        auto* sub = app.add_subcommand(name);
        add_common(sub, f);
        subs.emplace_back(name, sub);
    }
    auto* mc = subs[4].second;
    mc->add_option("--kind", f.mode, "hitting or return")->check(CLI::IsMember({"hitting", "return"}));

    auto* rarity = app.add_subcommand("rarity", "rarity bounds");
    rarity->require_subcommand(1);
    subs.emplace_back("rarity", rarity);
    std::vector<std::pair<std::string, CLI::App*>> modes;
    for (const char* name : {"epsilon", "d0", "rate", "kappa"}) {
        auto* sub = rarity->add_subcommand(name);
        add_common(sub, f);
        modes.emplace_back(name, sub);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? rarehit::kExitOk : rarehit::kExitConfig;
    }

    std::string analysis;
    for (const auto& [name, sub] : subs)
        if (sub->parsed()) analysis = name;
    for (const auto& [name, sub] : modes)
        if (sub->parsed()) f.mode = name;

    try {
        rarehit::RunConfig config = f.config.empty() ? resolve(analysis, f) : rarehit::load_run_config(f.config);
        if (!f.config.empty() && config.analysis != analysis)
            throw rarehit::Error(rarehit::ErrorCode::ConfigInvalid,
                                 "config is for '" + config.analysis + "', not '" + analysis + "'");
        if (f.out.empty()) return rarehit::run(config, std::cout, std::cerr);
        std::ofstream os(f.out, std::ios::binary);
        if (!os) throw rarehit::Error(rarehit::ErrorCode::ConfigInvalid, "cannot write '" + f.out + "'");
        return rarehit::run(config, os, std::cerr);
    } catch (const rarehit::Error& e) {
        std::cerr << "rarehit: " << e.what() << '\n';
        return rarehit::exit_code_for(e);
    } catch (const std::exception& e) {
        std::cerr << "rarehit: " << e.what() << '\n';
        return rarehit::kExitConfig;
    }
}
