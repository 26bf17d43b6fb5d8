#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rarehit/kernels.hpp"
#include "rarehit/process.hpp"
#include "rarehit/targets.hpp"

namespace rarehit {

enum class TailKind { Hitting, Return };
enum class TailSource { Exact, BruteForce, Empirical };

std::string_view to_string(TailKind kind) noexcept;
std::string_view to_string(TailSource source) noexcept;

/// H(k) = mu(tau_A > k) (hitting) or mu(tau_A > k | A) (return), k = 0..K.
struct TailDistribution {
    TailKind kind = TailKind::Hitting;
    TailSource source = TailSource::Exact;
    std::vector<double> values;
    double mu_A = 0.0;
    std::size_t samples = 0;  // empirical only
    std::uint64_t seed = 0;   // empirical only

    std::size_t horizon() const noexcept { return values.empty() ? 0 : values.size() - 1; }
    double operator[](std::size_t k) const { return values[k]; }
    /// mu(tau <= k) in the tail's own probability space.
    double cdf(std::size_t k) const { return 1.0 - values[k]; }

    TailDistribution truncated(std::size_t horizon) const;
};

/// Multi-pattern occurrence automaton (Aho-Corasick with completed goto
/// function). After reading x_0..x_t the state is accepting iff
/// x_{t-n+1..t} is a word of the target.
class OccurrenceAutomaton {
public:
    using State = std::uint32_t;

    static OccurrenceAutomaton build(const TargetSet& set, std::size_t q);

    std::size_t state_count() const noexcept { return depth_.size(); }
    std::size_t alphabet_size() const noexcept { return q_; }
    std::size_t rank() const noexcept { return rank_; }
    static constexpr State start() noexcept { return 0; }

    State step(State s, Symbol a) const { return next_[static_cast<std::size_t>(s) * q_ + a]; }
    bool accepting(State s) const { return accepting_[s] != 0; }
    std::size_t depth(State s) const { return depth_[s]; }

private:
    std::size_t q_ = 0;
    std::size_t rank_ = 0;
    std::vector<State> next_;
    std::vector<std::uint32_t> depth_;
    std::vector<char> accepting_;
};

OccurrenceAutomaton build_automaton(const TargetSet& set, std::size_t q);

/// Pushes the law of (automaton state, last symbol) forward one symbol at a
/// time, absorbing the mass that completes a window in A. Extendable, so
/// callers can grow the horizon without recomputing the prefix.
class TailPropagator {
public:
    TailPropagator(const ProcessModel& model, const TargetSet& set, TailKind kind,
                   kernels::Isa isa = kernels::active_isa());

    TailKind kind() const noexcept { return kind_; }
    double mu_A() const noexcept { return mu_A_; }
    std::size_t horizon() const noexcept { return values_.size() - 1; }
    std::size_t state_count() const noexcept { return step_.size(); }

    void extend_to(std::size_t horizon);
    const std::vector<double>& values() const noexcept { return values_; }
    TailDistribution tail() const;

    /// sum_k H(k) = 1^T (I - M)^{-1} x0, by a sparse LU solve.
    double expected_time() const;

private:
    TailKind kind_;
    kernels::Isa isa_;
    double mu_A_ = 0.0;
    kernels::SparseStep step_;
    std::vector<double> initial_;
    std::vector<double> current_;
    std::vector<double> scratch_;
    std::vector<double> values_;
};

TailDistribution hitting_tail(const ProcessModel& model, const TargetSet& set, std::int64_t horizon);
TailDistribution return_tail(const ProcessModel& model, const TargetSet& set, std::int64_t horizon);

inline constexpr double kDefaultEnumerationCap = 2e7;

/// Enumeration oracle: all words of length K+n with their measures, direct
/// window tests, no automaton.
TailDistribution brute_force_tail(const ProcessModel& model, const TargetSet& set, std::int64_t horizon,
                                  TailKind kind, double cap = kDefaultEnumerationCap);

/// E[tau_A | A]; equals 1/mu(A) by Kac's lemma.
double return_expectation(const ProcessModel& model, const TargetSet& set);

}  // namespace rarehit
