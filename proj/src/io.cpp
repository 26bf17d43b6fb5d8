#include "rarehit/io.hpp"

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "rarehit/error.hpp"

namespace rarehit {

namespace {

constexpr std::string_view kConfigTag = "# config: ";

[[noreturn]] void invalid(const std::string& what) { throw Error(ErrorCode::ConfigInvalid, what); }

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    if (!in) invalid("cannot read '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

nlohmann::json parse_json(const std::string& text, const std::string& what) {
    try {
        return nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        invalid(what + " is not valid JSON: " + e.what());
    }
}

// Inline JSON if it looks like an object, otherwise a file path.
nlohmann::json json_or_file(const std::string& spec, const std::string& what) {
    if (!spec.empty() && spec.front() == '{') return parse_json(spec, what);
    if (std::filesystem::exists(spec)) return parse_json(slurp(spec), what + " file");
    invalid("cannot interpret " + what + " '" + spec + "'");
}

template <class T>
T take(const nlohmann::json& j, const char* key) {
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
        invalid(std::string("config key '") + key + "': " + e.what());
    }
}

}  // namespace

std::string format_number(double x) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
    if (ec != std::errc()) return "nan";
    return std::string(buf, end);
}

nlohmann::json to_json(const RunConfig& c) {
    nlohmann::json j;
    j["analysis"] = c.analysis;
    j["mode"] = c.mode;
    j["model"] = c.model;
    j["target"] = c.target;
    j["K"] = c.K;
    j["N"] = c.N;
    j["seed"] = c.seed;
    j["threads"] = c.threads;
    j["censor_cap"] = c.censor_cap;
    j["n_range"] = c.n_range ? nlohmann::json::array({c.n_range->first, c.n_range->second}) : nlohmann::json(nullptr);
    j["point"] = c.point;
    j["family"] = c.family;
    j["D"] = c.D;
    j["q"] = c.q;
    j["h_nats"] = c.h_nats ? nlohmann::json(*c.h_nats) : nlohmann::json(nullptr);
    j["kappa"] = c.kappa;
    j["n"] = c.n;
    j["s0"] = c.s0;
    j["format"] = c.format;
    j["assert"] = c.assert_checks;
    return j;
}

RunConfig run_config_from_json(const nlohmann::json& j) {
    if (!j.is_object()) invalid("config must be a JSON object");
    static const std::vector<std::string> known = {"analysis", "mode",  "model",  "target", "K",      "N",
                                                   "seed",     "threads", "censor_cap", "n_range", "point", "family",
                                                   "D",        "q",     "h_nats", "kappa",  "n",      "s0",
                                                   "format",   "assert"};
    for (const auto& [key, _] : j.items())
        if (std::find(known.begin(), known.end(), key) == known.end()) invalid("unknown config key '" + key + "'");

    RunConfig c;
    if (!j.contains("analysis")) invalid("config needs 'analysis'");
    c.analysis = take<std::string>(j, "analysis");
    if (j.contains("mode")) c.mode = take<std::string>(j, "mode");
    if (j.contains("model")) c.model = j["model"];
    if (j.contains("target")) c.target = j["target"];
    if (j.contains("K")) c.K = take<std::int64_t>(j, "K");
    if (j.contains("N")) c.N = take<std::size_t>(j, "N");
    if (j.contains("seed")) c.seed = take<std::uint64_t>(j, "seed");
    if (j.contains("threads")) c.threads = take<std::size_t>(j, "threads");
    if (j.contains("censor_cap")) c.censor_cap = take<std::uint64_t>(j, "censor_cap");
    if (j.contains("n_range") && !j["n_range"].is_null()) {
        const auto r = take<std::vector<std::size_t>>(j, "n_range");
        if (r.size() != 2) invalid("n_range must be [from, to]");
        c.n_range = std::make_pair(r[0], r[1]);
    }
    if (j.contains("point")) c.point = take<std::string>(j, "point");
    if (j.contains("family")) c.family = take<std::string>(j, "family");
    if (j.contains("D")) c.D = take<double>(j, "D");
    if (j.contains("q")) c.q = take<std::size_t>(j, "q");
    if (j.contains("h_nats") && !j["h_nats"].is_null()) c.h_nats = take<double>(j, "h_nats");
    if (j.contains("kappa")) c.kappa = take<double>(j, "kappa");
    if (j.contains("n")) c.n = take<std::size_t>(j, "n");
    if (j.contains("s0")) c.s0 = take<double>(j, "s0");
    if (j.contains("format")) c.format = take<std::string>(j, "format");
    if (j.contains("assert")) c.assert_checks = take<bool>(j, "assert");

    static const std::vector<std::string> analyses = {"tail", "lambda", "verify", "limitlaw", "rarity", "mc", "sweep"};
    if (std::find(analyses.begin(), analyses.end(), c.analysis) == analyses.end())
        invalid("unknown analysis '" + c.analysis + "'");
    if (c.format != "csv" && c.format != "json") invalid("format must be csv or json");
    if (c.family != "cylinder" && c.family != "hamming") invalid("family must be cylinder or hamming");
    if (!(c.s0 > 0.0)) invalid("s0 must be positive");
    return c;
}

nlohmann::json resolve_model_spec(const std::string& spec) {
    constexpr std::string_view preset = "iid-uniform-";
    if (spec.rfind(preset, 0) == 0) {
        std::size_t q = 0;
        const auto digits = spec.substr(preset.size());
        auto [p, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), q);
        if (ec != std::errc() || p != digits.data() + digits.size()) invalid("bad preset '" + spec + "'");
        return to_json(uniform_iid(q));
    }
    return to_json(validate(model_params_from_json(json_or_file(spec, "model"))));
}

nlohmann::json resolve_target_spec(const std::string& spec) {
    if (spec.rfind("cyl:", 0) == 0) return {{"cylinder", spec.substr(4)}};
    if (spec.rfind("ham:", 0) == 0) {
        const auto rest = spec.substr(4);
        const auto colon = rest.rfind(':');
        if (colon == std::string::npos) invalid("Hamming target needs ham:<center>:<D>");
        double d = 0.0;
        try {
            std::size_t used = 0;
            d = std::stod(rest.substr(colon + 1), &used);
            if (used != rest.size() - colon - 1) throw std::invalid_argument("trailing");
        } catch (const std::exception&) {
            invalid("bad Hamming fraction in '" + spec + "'");
        }
        return {{"hamming", {{"center", rest.substr(0, colon)}, {"D", d}}}};
    }
    return json_or_file(spec, "target");
}

std::pair<std::size_t, std::size_t> parse_range(const std::string& text) {
    const auto colon = text.find(':');
    if (colon == std::string::npos) invalid("range must look like a:b");
    std::size_t a = 0, b = 0;
    const auto lo = text.substr(0, colon), hi = text.substr(colon + 1);
    auto r1 = std::from_chars(lo.data(), lo.data() + lo.size(), a);
    auto r2 = std::from_chars(hi.data(), hi.data() + hi.size(), b);
    if (r1.ec != std::errc() || r2.ec != std::errc() || r1.ptr != lo.data() + lo.size() ||
        r2.ptr != hi.data() + hi.size())
        invalid("range must look like a:b");
    return {a, b};
}

SymbolStream parse_point(const std::string& text, std::size_t q) {
    if (text == "champernowne") return SymbolStream::champernowne(q);
    if (text.rfind("periodic:", 0) == 0) {
        Word cycle = parse_word(text.substr(9));
        for (Symbol s : cycle)
            if (s >= q) throw Error(ErrorCode::SymbolOutOfRange, "point symbol out of range");
        return SymbolStream::periodic(std::move(cycle));
    }
    invalid("point must be periodic:<word> or champernowne");
}

RunConfig load_run_config(const std::string& path) {
    const std::string text = slurp(path);
    std::istringstream lines(text);
    for (std::string line; std::getline(lines, line);) {
        if (line.rfind(kConfigTag, 0) == 0) return run_config_from_json(parse_json(line.substr(kConfigTag.size()), "config"));
        if (line.empty() || line.front() != '#') break;
    }
    auto j = parse_json(text, "config");
    if (j.is_object() && j.contains("config") && j.contains("result")) j = j["config"];
    return run_config_from_json(j);
}

void write_config_header(std::ostream& os, const RunConfig& config) {
    os << kConfigTag << to_json(config).dump() << '\n';
}

void write_tail_csv(std::ostream& os, const TailDistribution& hit, const TailDistribution* ret) {
    os << "# mu_A=" << format_number(hit.mu_A) << '\n';
    os << "# source=" << to_string(hit.source) << '\n';
    os << (ret ? "k,H_hit,H_ret\n" : "k,H_hit\n");
    for (std::size_t k = 0; k <= hit.horizon(); ++k) {
        os << k << ',' << format_number(hit[k]);
        if (ret) os << ',' << format_number((*ret)[k]);
        os << '\n';
    }
}

void write_batch_csv(std::ostream& os, const SampleBatch& batch) {
    os << "# master_seed=" << batch.seed << '\n';
    os << "# kind=" << to_string(batch.kind) << '\n';
    os << "# censor_cap=" << batch.censor_cap << '\n';
    os << "trajectory_index,time,censored\n";
    for (std::size_t i = 0; i < batch.size(); ++i)
        os << i << ',' << batch.times[i] << ',' << static_cast<int>(batch.censored[i]) << '\n';
}

void write_diagnostics_csv(std::ostream& os, const std::vector<DiagnosticsRow>& rows) {
    os << "n,mu_A,lambda,D_hit,D_ret,bound,delta,lambda_nominal,within_bound\n";
    for (const auto& r : rows)
        os << r.n << ',' << format_number(r.mu_A) << ',' << format_number(r.lambda) << ',' << format_number(r.d_hit)
           << ',' << format_number(r.d_ret) << ',' << format_number(r.bound) << ',' << format_number(r.delta) << ','
           << r.lambda_nominal << ',' << r.within_bound << '\n';
}

void write_rarity_csv(std::ostream& os, const std::vector<RarityRow>& rows) {
    os << "n,kappa,h,k,m,epsilon_n,mu_tau_le_n,surrogate\n";
    for (const auto& r : rows) {
        const auto& b = r.bound;
        os << b.n << ',' << format_number(b.kappa) << ',' << format_number(b.h) << ',' << b.k << ',' << b.m << ','
           << format_number(b.epsilon) << ',' << (r.mu_tau_le_n ? format_number(*r.mu_tau_le_n) : "") << ','
           << b.surrogate << '\n';
    }
}

nlohmann::json to_json(const TailDistribution& tail) {
    return {{"kind", std::string(to_string(tail.kind))},
            {"source", std::string(to_string(tail.source))},
            {"mu_A", tail.mu_A},
            {"samples", tail.samples},
            {"H", tail.values}};
}

nlohmann::json to_json(const VerificationReport& r) {
    return {{"sup_dev", r.sup_dev},
            {"argmax", r.argmax},
            {"bound", r.bound},
            {"sampling_slack", r.sampling_slack},
            {"truncation_residual", r.truncation_residual},
            {"pass", r.pass}};
}

nlohmann::json to_json(const DiagnosticsRow& r) {
    return {{"n", r.n},         {"mu_A", r.mu_A},   {"lambda", r.lambda},
            {"lambda_nominal", r.lambda_nominal}, {"delta", r.delta}, {"D_hit", r.d_hit},
            {"D_ret", r.d_ret}, {"bound", r.bound}, {"truncation", r.truncation},
            {"within_bound", r.within_bound}};
}

nlohmann::json to_json(const RarityRow& r) {
    const auto& b = r.bound;
    nlohmann::json j = {{"n", b.n},         {"kappa", b.kappa},         {"h0", b.h0},
                        {"h_mu", b.h_mu},   {"h", b.h},                 {"k", b.k},
                        {"m", b.m},         {"cover_term", b.cover_term}, {"aep_deficiency", b.aep_deficiency},
                        {"epsilon_n", b.epsilon}, {"surrogate", b.surrogate}};
    j["mu_tau_le_n"] = r.mu_tau_le_n ? nlohmann::json(*r.mu_tau_le_n) : nlohmann::json(nullptr);
    return j;
}

}  // namespace rarehit
