#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <utility>

#include <json.hpp>

#include "rarehit/exact.hpp"
#include "rarehit/limitlaw.hpp"
#include "rarehit/mc.hpp"
#include "rarehit/process.hpp"
#include "rarehit/rarity.hpp"
#include "rarehit/scaling.hpp"
#include "rarehit/targets.hpp"

namespace rarehit {

/// Everything a run depends on. Serialized in full next to every report, so
/// a report can be regenerated from its own header.
struct RunConfig {
    std::string analysis;           // tail | lambda | verify | limitlaw | rarity | mc | sweep
    std::string mode;               // rarity: epsilon | d0 | rate | kappa; mc: hitting | return
    nlohmann::json model;           // resolved model table, or null
    nlohmann::json target;          // resolved target object, or null
    std::int64_t K = 0;             // 0: chosen automatically where possible
    std::size_t N = 10000;
    std::uint64_t seed = 0;
    std::size_t threads = 1;
    std::uint64_t censor_cap = 0;
    std::optional<std::pair<std::size_t, std::size_t>> n_range;
    std::string point;              // "periodic:0,1" | "champernowne"
    std::string family = "cylinder";  // cylinder | hamming
    double D = 0.0;
    std::size_t q = 0;
    std::optional<double> h_nats;
    double kappa = 0.0;
    std::size_t n = 0;
    double s0 = 0.05;
    std::string format = "csv";
    bool assert_checks = false;
};

nlohmann::json to_json(const RunConfig& config);
/// Rejects unknown keys and ill-typed values with ConfigInvalid.
RunConfig run_config_from_json(const nlohmann::json& j);

/// Shortest text that reads back to the same double.
std::string format_number(double x);

/// "iid-uniform-Q", a path to a JSON file, or inline JSON.
nlohmann::json resolve_model_spec(const std::string& spec);
/// "cyl:0,1,1", "ham:0,0,0:0.2", a path to a JSON file, or inline JSON.
nlohmann::json resolve_target_spec(const std::string& spec);
/// "a:b" (inclusive).
std::pair<std::size_t, std::size_t> parse_range(const std::string& text);
/// "periodic:0,1" or "champernowne" (base q of the model).
SymbolStream parse_point(const std::string& text, std::size_t q);

/// Reads a config from a JSON file, a JSON report ({"config": ...}) or a
/// CSV report carrying a "# config: " header line.
RunConfig load_run_config(const std::string& path);

void write_config_header(std::ostream& os, const RunConfig& config);

void write_tail_csv(std::ostream& os, const TailDistribution& hit, const TailDistribution* ret);
void write_batch_csv(std::ostream& os, const SampleBatch& batch);
void write_diagnostics_csv(std::ostream& os, const std::vector<DiagnosticsRow>& rows);

struct RarityRow {
    RarityBound bound;
    std::optional<double> mu_tau_le_n;
};

void write_rarity_csv(std::ostream& os, const std::vector<RarityRow>& rows);

nlohmann::json to_json(const TailDistribution& tail);
nlohmann::json to_json(const VerificationReport& report);
nlohmann::json to_json(const DiagnosticsRow& row);
nlohmann::json to_json(const RarityRow& row);

}  // namespace rarehit
