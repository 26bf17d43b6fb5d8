#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <json.hpp>

namespace rarehit {

using Symbol = std::uint32_t;
using Word = std::vector<Symbol>;

enum class ProcessKind { IID, Markov };

/// Raw, unchecked model parameters as read from a config.
struct ModelParams {
    ProcessKind kind = ProcessKind::IID;
    std::vector<double> probs;                    // IID only
    std::vector<std::vector<double>> transition;  // Markov only
};

/// A validated stationary source over symbols 0..q-1.
///
/// IID and order-1 Markov sources share one interface: the law of the next
/// symbol given the previous one. For IID sources the previous symbol is
/// ignored and there is a single memory class.
class ProcessModel {
public:
    std::size_t alphabet_size() const noexcept { return q_; }
    ProcessKind kind() const noexcept { return kind_; }
    bool is_iid() const noexcept { return kind_ == ProcessKind::IID; }

    std::span<const double> stationary() const noexcept { return stationary_; }
    double stationary(Symbol a) const { return stationary_[a]; }

    /// P(next = to | previous = from). IID sources ignore `from`.
    double next_prob(Symbol from, Symbol to) const {
        return is_iid() ? stationary_[to] : transition_[static_cast<std::size_t>(from) * q_ + to];
    }

    /// Number of source-memory classes (1 for IID, q for Markov).
    std::size_t memory_classes() const noexcept { return is_iid() ? 1 : q_; }
    std::size_t memory_of(Symbol a) const noexcept { return is_iid() ? 0 : a; }

    /// Row-major q x q transition table; for IID every row equals the marginal.
    std::vector<double> transition_matrix() const;

    /// True when the source is IID with all symbols equiprobable.
    bool is_uniform_iid() const noexcept;

    friend ProcessModel validate(const ModelParams& params);

private:
    ProcessModel() = default;

    ProcessKind kind_ = ProcessKind::IID;
    std::size_t q_ = 0;
    std::vector<double> stationary_;
    std::vector<double> transition_;  // empty for IID
};

/// Checks stochasticity and, for Markov chains, irreducibility and
/// aperiodicity; solves for the stationary law.
ProcessModel validate(const ModelParams& params);

ProcessModel iid_model(std::vector<double> probs);
ProcessModel uniform_iid(std::size_t q);
ProcessModel markov_model(std::vector<std::vector<double>> transition);

/// mu([w_0 ... w_{n-1}]).
double cylinder_measure(const ProcessModel& model, std::span<const Symbol> word);

/// Entropy rate in nats per symbol.
double entropy(const ProcessModel& model);

/// Certified upper bound on alpha(g) via the beta-mixing coefficient
/// sum_i pi_i * TV(P^g(i, .), pi). Zero for IID sources.
class MixingBound {
public:
    explicit MixingBound(const ProcessModel& model);

    double operator()(std::int64_t gap) const;

    /// Asymptotic per-step decay factor of the bound (0 for IID).
    double decay_rate() const noexcept { return decay_rate_; }

private:
    static constexpr std::int64_t kTabulated = 256;

    std::size_t q_ = 0;
    bool iid_ = true;
    std::vector<double> transition_;
    std::vector<double> stationary_;
    std::vector<double> table_;  // table_[g] for g in [1, kTabulated]
    double decay_rate_ = 0.0;
};

double alpha_bound(const ProcessModel& model, std::int64_t gap);

/// {"kind":"iid","probs":[...]} or {"kind":"markov","transition":[[...],...]}.
ModelParams model_params_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ProcessModel& model);

}  // namespace rarehit
