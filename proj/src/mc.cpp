#include "rarehit/mc.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <mutex>
#include <optional>
#include <random>
#include <thread>

#include "rarehit/error.hpp"
#include "rarehit/kernels.hpp"

namespace rarehit {

std::size_t SampleBatch::censored_count() const noexcept {
    return static_cast<std::size_t>(std::count(censored.begin(), censored.end(), std::uint8_t{1}));
}

std::uint64_t trajectory_seed(std::uint64_t master, std::uint64_t index) noexcept {
    std::uint64_t z = master + (index + 1) * 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

std::uint64_t default_censor_cap(double mu_A, double lambda_guess) {
    if (!(mu_A > 0.0) || !(lambda_guess > 0.0))
        throw Error(ErrorCode::ZeroMeasureSet, "censoring cap needs a positive measure");
    return static_cast<std::uint64_t>(std::ceil(50.0 / (lambda_guess * mu_A)));
}

namespace {

/// Inverse-CDF sampler over a finite table driven by 53-bit uniforms.
class DiscreteSampler {
public:
    DiscreteSampler() = default;
    explicit DiscreteSampler(std::span<const double> probs) {
        double acc = 0.0;
        cdf_.reserve(probs.size());
        for (std::size_t i = 0; i < probs.size(); ++i) {
            acc += probs[i];
            cdf_.push_back(acc);
            if (probs[i] > 0.0) last_positive_ = i;
        }
    }

    std::size_t draw(std::mt19937_64& rng) const {
        const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53 * cdf_.back();
        const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
        return it == cdf_.end() ? last_positive_ : static_cast<std::size_t>(it - cdf_.begin());
    }

private:
    std::vector<double> cdf_;
    std::size_t last_positive_ = 0;
};

class SourceSampler {
public:
    explicit SourceSampler(const ProcessModel& model) : model_(model), initial_(model.stationary()) {
        const std::size_t q = model.alphabet_size();
        for (std::size_t m = 0; m < model.memory_classes(); ++m) {
            std::vector<double> row(q);
            for (Symbol a = 0; a < q; ++a) row[a] = model.next_prob(static_cast<Symbol>(m), a);
            rows_.emplace_back(row);
        }
    }

    Symbol first(std::mt19937_64& rng) const { return static_cast<Symbol>(initial_.draw(rng)); }
    Symbol next(Symbol prev, std::mt19937_64& rng) const {
        return static_cast<Symbol>(rows_[model_.memory_of(prev)].draw(rng));
    }

private:
    const ProcessModel& model_;
    DiscreteSampler initial_;
    std::vector<DiscreteSampler> rows_;
};

class AutomatonMatcher {
public:
    explicit AutomatonMatcher(const OccurrenceAutomaton& a) : automaton_(&a) {}
    void reset() { state_ = OccurrenceAutomaton::start(); }
    bool push(Symbol s) {
        state_ = automaton_->step(state_, s);
        return automaton_->accepting(state_);
    }

private:
    const OccurrenceAutomaton* automaton_;
    OccurrenceAutomaton::State state_ = OccurrenceAutomaton::start();
};

class HammingMatcher {
public:
    explicit HammingMatcher(const HammingPredicate& p) : predicate_(&p), ring_(p.rank()) {}
    void reset() { filled_ = head_ = 0; }
    bool push(Symbol s) {
        const std::size_t n = ring_.size();
        ring_[head_] = s;
        head_ = (head_ + 1) % n;
        if (filled_ < n) ++filled_;
        if (filled_ < n) return false;
        std::size_t distance = 0;
        for (std::size_t i = 0; i < n; ++i)
            if (ring_[(head_ + i) % n] != predicate_->center[i] && ++distance > predicate_->radius) return false;
        return true;
    }

private:
    const HammingPredicate* predicate_;
    std::vector<Symbol> ring_;
    std::size_t filled_ = 0;
    std::size_t head_ = 0;
};

struct Outcome {
    std::uint64_t time = 0;
    bool censored = false;
    std::uint64_t attempts = 0;
};

template <typename Matcher>
Outcome scan(const SourceSampler& source, Matcher& matcher, Symbol last, std::uint64_t cap, std::mt19937_64& rng) {
    for (std::uint64_t k = 1; k <= cap; ++k) {
        last = source.next(last, rng);
        if (matcher.push(last)) return {k, false, 0};
    }
    return {cap, true, 0};
}

template <typename Matcher>
Outcome run_hitting(const SourceSampler& source, Matcher& matcher, std::size_t n, std::uint64_t cap,
                    std::mt19937_64& rng) {
    matcher.reset();
    Symbol last = source.first(rng);
    matcher.push(last);
    for (std::size_t i = 1; i < n; ++i) {
        last = source.next(last, rng);
        matcher.push(last);
    }
    return scan(source, matcher, last, cap, rng);
}

// Initial window drawn from the stationary law until it lands in A.
template <typename Matcher, typename Contains>
Outcome run_return_rejection(const SourceSampler& source, Matcher& matcher, std::size_t n, std::uint64_t cap,
                             std::uint64_t budget, const Contains& contains, std::mt19937_64& rng) {
    Word window(n);
    for (std::uint64_t attempt = 1; attempt <= budget; ++attempt) {
        window[0] = source.first(rng);
        for (std::size_t i = 1; i < n; ++i) window[i] = source.next(window[i - 1], rng);
        if (!contains(window)) continue;
        matcher.reset();
        for (Symbol s : window) matcher.push(s);
        Outcome o = scan(source, matcher, window.back(), cap, rng);
        o.attempts = attempt;
        return o;
    }
    throw Error(ErrorCode::RejectionBudgetExceeded,
                "no initial window in A after " + std::to_string(budget) +
                    " draws; use the exact module or raise the rejection budget");
}

// Word chosen with probability mu(w)/mu(A); the rest of the path continues
// from the word's last symbol, which is the conditional law on A.
template <typename Matcher>
Outcome run_return_direct(const SourceSampler& source, Matcher& matcher, const TargetSet& set,
                          const DiscreteSampler& words, std::uint64_t cap, std::mt19937_64& rng) {
    const Word& w = set.words()[words.draw(rng)];
    matcher.reset();
    for (Symbol s : w) matcher.push(s);
    Outcome o = scan(source, matcher, w.back(), cap, rng);
    o.attempts = 1;
    return o;
}

template <typename Body>
void parallel_for(std::size_t count, std::size_t threads, const Body& body) {
    threads = std::max<std::size_t>(1, std::min(threads, count));
    if (threads == 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::exception_ptr failure;
    std::mutex failure_mutex;
    {
        std::vector<std::jthread> pool;
        const std::size_t chunk = (count + threads - 1) / threads;
        for (std::size_t t = 0; t < threads; ++t) {
            const std::size_t lo = t * chunk;
            const std::size_t hi = std::min(count, lo + chunk);
            pool.emplace_back([&, lo, hi] {
                try {
                    for (std::size_t i = lo; i < hi; ++i) body(i);
                } catch (...) {
                    const std::lock_guard lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                }
            });
        }
    }
    if (failure) std::rethrow_exception(failure);
}

std::size_t target_rank(const SampleTarget& target) {
    return std::visit([](const auto& t) { return t.rank(); }, target);
}

void check_symbols(const ProcessModel& model, const SampleTarget& target) {
    const std::size_t q = model.alphabet_size();
    auto check = [q](const Word& w) {
        for (Symbol s : w)
            if (s >= q) throw Error(ErrorCode::SymbolOutOfRange, "target symbol out of range");
    };
    if (const auto* set = std::get_if<TargetSet>(&target)) {
        for (const auto& w : set->words()) check(w);
    } else {
        check(std::get<HammingPredicate>(target).center);
    }
}

SampleBatch run_batch(const ProcessModel& model, const SampleTarget& target, const SampleOptions& options,
                      TailKind kind, std::uint64_t cap) {
    const std::size_t n = target_rank(target);
    const SourceSampler source(model);
    std::vector<Outcome> outcomes(options.samples);

    const auto* set = std::get_if<TargetSet>(&target);
    std::optional<OccurrenceAutomaton> automaton;
    DiscreteSampler word_sampler;
    if (set) {
        automaton = OccurrenceAutomaton::build(*set, model.alphabet_size());
        std::vector<double> weights;
        for (const auto& w : set->words()) weights.push_back(cylinder_measure(model, w));
        word_sampler = DiscreteSampler(weights);
    }

    auto body = [&](std::size_t i) {
        std::mt19937_64 rng(trajectory_seed(options.seed, i));
        if (set) {
            AutomatonMatcher matcher(*automaton);
            if (kind == TailKind::Hitting) {
                outcomes[i] = run_hitting(source, matcher, n, cap, rng);
            } else if (options.force_rejection) {
                outcomes[i] = run_return_rejection(source, matcher, n, cap, options.rejection_budget,
                                                   [set](const Word& w) { return set->contains(w); }, rng);
            } else {
                outcomes[i] = run_return_direct(source, matcher, *set, word_sampler, cap, rng);
            }
        } else {
            const auto& predicate = std::get<HammingPredicate>(target);
            HammingMatcher matcher(predicate);
            if (kind == TailKind::Hitting) {
                outcomes[i] = run_hitting(source, matcher, n, cap, rng);
            } else {
                outcomes[i] = run_return_rejection(source, matcher, n, cap, options.rejection_budget,
                                                   [&predicate](const Word& w) { return predicate.contains(w); },
                                                   rng);
            }
        }
    };
    parallel_for(options.samples, options.threads, body);

    SampleBatch batch;
    batch.kind = kind;
    batch.seed = options.seed;
    batch.censor_cap = cap;
    batch.mu_A = set ? measure(model, *set) : 0.0;
    batch.times.reserve(outcomes.size());
    batch.censored.reserve(outcomes.size());
    for (const auto& o : outcomes) {
        batch.times.push_back(o.time);
        batch.censored.push_back(o.censored ? 1 : 0);
        batch.attempts += o.attempts;
    }
    if (kind == TailKind::Return) batch.rejections = batch.attempts - outcomes.size();
    return batch;
}

SampleBatch sample(const ProcessModel& model, const SampleTarget& target, const SampleOptions& options,
                   TailKind kind) {
    if (options.samples < 1) throw Error(ErrorCode::InvalidArgument, "sample count N must be >= 1");
    check_symbols(model, target);
    if (options.censor_cap > 0) return run_batch(model, target, options, kind, options.censor_cap);

    const auto* set = std::get_if<TargetSet>(&target);
    double mu = set ? measure(model, *set) : 0.0;
    if (!set) {
        const auto& p = std::get<HammingPredicate>(target);
        mu = 1.0;
        for (std::size_t i = 0; i < p.rank(); ++i) mu /= static_cast<double>(model.alphabet_size());
        mu *= hamming_ball_count(p.rank(), p.radius, model.alphabet_size());  // uniform-source guess
    }
    const std::uint64_t cap = default_censor_cap(mu);
    SampleBatch batch = run_batch(model, target, options, kind, cap);
    // One adaptation: a visibly censored batch is rerun with a 4x longer cap.
    if (batch.censored_count() * 1000 > batch.size()) batch = run_batch(model, target, options, kind, cap * 4);
    return batch;
}

}  // namespace

SampleBatch sample_hitting(const ProcessModel& model, const SampleTarget& target, const SampleOptions& options) {
    return sample(model, target, options, TailKind::Hitting);
}

SampleBatch sample_return(const ProcessModel& model, const SampleTarget& target, const SampleOptions& options) {
    return sample(model, target, options, TailKind::Return);
}

TailDistribution empirical_tail(const SampleBatch& batch) {
    if (batch.size() == 0) throw Error(ErrorCode::InvalidArgument, "empty sample batch");
    const std::uint64_t cap = batch.censor_cap;
    // count[k]: uncensored samples with time exactly k.
    std::vector<std::uint64_t> count(cap + 2, 0);
    for (std::size_t i = 0; i < batch.size(); ++i)
        if (!batch.censored[i]) ++count[std::min(batch.times[i], cap + 1)];

    TailDistribution t;
    t.kind = batch.kind;
    t.source = TailSource::Empirical;
    t.samples = batch.size();
    t.seed = batch.seed;
    t.mu_A = batch.mu_A;
    t.values.resize(cap + 1);
    const double n = static_cast<double>(batch.size());
    std::uint64_t above = batch.censored_count() + count[cap + 1];
    for (std::uint64_t k = cap + 1; k-- > 0;) {
        t.values[k] = static_cast<double>(above) / n;
        above += count[k];
    }
    return t;
}

double ks_distance(const TailDistribution& a, const TailDistribution& b) {
    if (a.horizon() != b.horizon())
        throw Error(ErrorCode::HorizonMismatch, "tails have horizons " + std::to_string(a.horizon()) + " and " +
                                                    std::to_string(b.horizon()));
    return kernels::max_abs_diff(a.values, b.values);
}

}  // namespace rarehit
