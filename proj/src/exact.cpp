#include "rarehit/exact.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <tuple>

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include "rarehit/error.hpp"

namespace rarehit {

std::string_view to_string(TailKind kind) noexcept {
    return kind == TailKind::Hitting ? "hitting" : "return";
}

std::string_view to_string(TailSource source) noexcept {
    switch (source) {
        case TailSource::Exact: return "exact";
        case TailSource::BruteForce: return "brute_force";
        case TailSource::Empirical: return "empirical";
    }
    return "unknown";
}

TailDistribution TailDistribution::truncated(std::size_t horizon) const {
    if (horizon > this->horizon())
        throw Error(ErrorCode::HorizonTooShort, "cannot truncate a horizon-" + std::to_string(this->horizon()) +
                                                    " tail to " + std::to_string(horizon));
    TailDistribution out = *this;
    out.values.resize(horizon + 1);
    return out;
}

OccurrenceAutomaton OccurrenceAutomaton::build(const TargetSet& set, std::size_t q) {
    constexpr State kNone = std::numeric_limits<State>::max();
    OccurrenceAutomaton a;
    a.q_ = q;
    a.rank_ = set.rank();
    a.next_.assign(q, kNone);
    a.depth_.push_back(0);

    for (const auto& word : set.words()) {
        State s = start();
        for (Symbol sym : word) {
            if (sym >= q) throw Error(ErrorCode::SymbolOutOfRange, "target symbol " + std::to_string(sym) + " >= q");
            State& child = a.next_[static_cast<std::size_t>(s) * q + sym];
            if (child == kNone) {
                child = static_cast<State>(a.depth_.size());
                a.depth_.push_back(a.depth_[s] + 1);
                a.next_.resize(a.next_.size() + q, kNone);
            }
            s = a.next_[static_cast<std::size_t>(s) * q + sym];
        }
    }

    // Breadth-first failure links; goto completed in place.
    std::vector<State> fail(a.depth_.size(), start());
    std::deque<State> queue;
    for (Symbol c = 0; c < q; ++c) {
        State& child = a.next_[c];
        if (child == kNone) {
            child = start();
        } else {
            fail[child] = start();
            queue.push_back(child);
        }
    }
    while (!queue.empty()) {
        const State u = queue.front();
        queue.pop_front();
        for (Symbol c = 0; c < q; ++c) {
            State& child = a.next_[static_cast<std::size_t>(u) * q + c];
            const State via_fail = a.next_[static_cast<std::size_t>(fail[u]) * q + c];
            if (child == kNone) {
                child = via_fail;
            } else {
                fail[child] = via_fail;
                queue.push_back(child);
            }
        }
    }

    // Words share one length, so only full-depth nodes complete a window.
    a.accepting_.resize(a.depth_.size());
    for (std::size_t s = 0; s < a.depth_.size(); ++s) a.accepting_[s] = a.depth_[s] == a.rank_;
    return a;
}

OccurrenceAutomaton build_automaton(const TargetSet& set, std::size_t q) {
    return OccurrenceAutomaton::build(set, q);
}

TailPropagator::TailPropagator(const ProcessModel& model, const TargetSet& set, TailKind kind, kernels::Isa isa)
    : kind_(kind), isa_(isa) {
    const std::size_t q = model.alphabet_size();
    const auto automaton = OccurrenceAutomaton::build(set, q);
    const std::size_t states = automaton.state_count();
    const std::size_t mem = model.memory_classes();
    auto joint = [mem](std::size_t u, std::size_t m) { return u * mem + m; };
    // Memory class -> a representative previous symbol for next_prob.
    auto prev_symbol = [&model](std::size_t m) { return static_cast<Symbol>(model.is_iid() ? 0 : m); };

    // Law of (state, memory) after the first window x_0..x_{n-1}, no absorption.
    std::vector<double> pre(states * mem, 0.0);
    for (Symbol a = 0; a < q; ++a)
        if (model.stationary(a) > 0.0) pre[joint(automaton.step(0, a), model.memory_of(a))] += model.stationary(a);
    for (std::size_t t = 1; t < set.rank(); ++t) {
        std::vector<double> next(states * mem, 0.0);
        for (std::size_t u = 0; u < states; ++u)
            for (std::size_t m = 0; m < mem; ++m) {
                const double mass = pre[joint(u, m)];
                if (mass == 0.0) continue;
                for (Symbol a = 0; a < q; ++a) {
                    const double w = model.next_prob(prev_symbol(m), a);
                    if (w > 0.0)
                        next[joint(automaton.step(static_cast<OccurrenceAutomaton::State>(u), a), model.memory_of(a))] +=
                            mass * w;
                }
            }
        pre = std::move(next);
    }

    double window0_in_A = 0.0;
    for (std::size_t u = 0; u < states; ++u)
        if (automaton.accepting(static_cast<OccurrenceAutomaton::State>(u)))
            for (std::size_t m = 0; m < mem; ++m) window0_in_A += pre[joint(u, m)];
    mu_A_ = measure(model, set);

    if (kind_ == TailKind::Return) {
        if (window0_in_A <= 0.0 || mu_A_ <= 0.0)
            throw Error(ErrorCode::ZeroMeasureSet, "return time undefined for a null set");
        for (std::size_t u = 0; u < states; ++u) {
            const bool acc = automaton.accepting(static_cast<OccurrenceAutomaton::State>(u));
            for (std::size_t m = 0; m < mem; ++m) pre[joint(u, m)] = acc ? pre[joint(u, m)] / window0_in_A : 0.0;
        }
    }

    // Index the states reachable from the initial support; transitions that
    // complete a window are dropped, which absorbs their mass.
    constexpr std::uint32_t kUnseen = std::numeric_limits<std::uint32_t>::max();
    std::vector<std::uint32_t> index(states * mem, kUnseen);
    std::vector<std::size_t> order;
    for (std::size_t j = 0; j < pre.size(); ++j)
        if (pre[j] > 0.0) {
            index[j] = static_cast<std::uint32_t>(order.size());
            order.push_back(j);
        }
    std::vector<std::tuple<std::uint32_t, std::uint32_t, double>> edges;  // (dest, src, weight)
    for (std::size_t pos = 0; pos < order.size(); ++pos) {
        const std::size_t u = order[pos] / mem;
        const std::size_t m = order[pos] % mem;
        for (Symbol a = 0; a < q; ++a) {
            const double w = model.next_prob(prev_symbol(m), a);
            if (w <= 0.0) continue;
            const auto v = automaton.step(static_cast<OccurrenceAutomaton::State>(u), a);
            if (automaton.accepting(v)) continue;
            const std::size_t dest = joint(v, model.memory_of(a));
            if (index[dest] == kUnseen) {
                index[dest] = static_cast<std::uint32_t>(order.size());
                order.push_back(dest);
            }
            edges.emplace_back(index[dest], static_cast<std::uint32_t>(pos), w);
        }
    }
    std::stable_sort(edges.begin(), edges.end(),
                     [](const auto& x, const auto& y) { return std::get<0>(x) < std::get<0>(y); });

    kernels::CsrMatrix csr;
    csr.rows = csr.cols = order.size();
    csr.row_ptr.assign(order.size() + 1, 0);
    for (const auto& [dest, src, w] : edges) {
        ++csr.row_ptr[dest + 1];
        csr.col.push_back(src);
        csr.val.push_back(w);
    }
    for (std::size_t i = 0; i < order.size(); ++i) csr.row_ptr[i + 1] += csr.row_ptr[i];
    step_ = kernels::SparseStep(std::move(csr));

    initial_.resize(order.size());
    for (std::size_t pos = 0; pos < order.size(); ++pos) initial_[pos] = pre[order[pos]];
    current_ = initial_;
    scratch_.resize(order.size());
    values_ = {1.0};
}

void TailPropagator::extend_to(std::size_t horizon) {
    values_.reserve(horizon + 1);
    while (values_.size() <= horizon) {
        step_.apply(current_, scratch_, isa_);
        current_.swap(scratch_);
        values_.push_back(std::clamp(kernels::sum(current_, isa_), 0.0, 1.0));
    }
}

TailDistribution TailPropagator::tail() const {
    TailDistribution t;
    t.kind = kind_;
    t.source = TailSource::Exact;
    t.values = values_;
    t.mu_A = mu_A_;
    return t;
}

double TailPropagator::expected_time() const {
    const auto n = static_cast<Eigen::Index>(step_.size());
    const auto& csr = step_.csr();
    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(csr.nonzeros() + csr.rows);
    for (Eigen::Index i = 0; i < n; ++i) triplets.emplace_back(i, i, 1.0);
    for (std::size_t i = 0; i < csr.rows; ++i)
        for (std::uint32_t e = csr.row_ptr[i]; e < csr.row_ptr[i + 1]; ++e)
            triplets.emplace_back(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(csr.col[e]), -csr.val[e]);
    Eigen::SparseMatrix<double> system(n, n);
    system.setFromTriplets(triplets.begin(), triplets.end());
    system.makeCompressed();

    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.compute(system);
    if (lu.info() != Eigen::Success)
        throw Error(ErrorCode::SingularSystem, "fundamental-matrix factorization failed");
    const Eigen::VectorXd rhs = Eigen::Map<const Eigen::VectorXd>(initial_.data(), n);
    const Eigen::VectorXd y = lu.solve(rhs);
    if (lu.info() != Eigen::Success || !y.allFinite())
        throw Error(ErrorCode::SingularSystem, "fundamental-matrix solve failed");
    return y.sum();
}

namespace {

void check_horizon(std::int64_t horizon) {
    if (horizon < 1) throw Error(ErrorCode::HorizonNonPositive, "horizon K must be >= 1");
}

}  // namespace

TailDistribution hitting_tail(const ProcessModel& model, const TargetSet& set, std::int64_t horizon) {
    check_horizon(horizon);
    TailPropagator prop(model, set, TailKind::Hitting);
    prop.extend_to(static_cast<std::size_t>(horizon));
    return prop.tail();
}

TailDistribution return_tail(const ProcessModel& model, const TargetSet& set, std::int64_t horizon) {
    check_horizon(horizon);
    TailPropagator prop(model, set, TailKind::Return);
    prop.extend_to(static_cast<std::size_t>(horizon));
    return prop.tail();
}

namespace {

struct Enumerator {
    const ProcessModel& model;
    const TargetSet& set;
    TailKind kind;
    std::size_t length;
    Word word;
    std::vector<double> first_hit;  // first_hit[j]: mass with tau = j
    double survived = 0.0;          // mass with tau > K
    double in_A = 0.0;

    void visit(std::size_t filled, double mass) {
        const std::size_t n = set.rank();
        if (filled >= n) {
            const std::size_t j = filled - n;
            const bool hit = set.contains(std::span<const Symbol>(word).subspan(j, n));
            if (j == 0) {
                if (kind == TailKind::Return) {
                    if (!hit) return;
                    in_A += mass;
                }
            } else if (hit) {
                first_hit[j] += mass;
                return;
            }
        }
        if (filled == length) {
            survived += mass;
            return;
        }
        for (Symbol a = 0; a < model.alphabet_size(); ++a) {
            const double p = filled == 0 ? model.stationary(a) : model.next_prob(word[filled - 1], a);
            if (p == 0.0) continue;
            word[filled] = a;
            visit(filled + 1, mass * p);
        }
    }
};

}  // namespace

TailDistribution brute_force_tail(const ProcessModel& model, const TargetSet& set, std::int64_t horizon,
                                  TailKind kind, double cap) {
    check_horizon(horizon);
    const auto k_max = static_cast<std::size_t>(horizon);
    const std::size_t length = k_max + set.rank();
    const double words = std::pow(static_cast<double>(model.alphabet_size()), static_cast<double>(length));
    if (words > cap)
        throw Error(ErrorCode::EnumerationTooLarge,
                    "enumeration of " + std::to_string(words) + " words exceeds cap " + std::to_string(cap));
    for (const auto& w : set.words())
        for (Symbol s : w)
            if (s >= model.alphabet_size()) throw Error(ErrorCode::SymbolOutOfRange, "target symbol out of range");

    Enumerator e{model, set, kind, length, Word(length, 0), std::vector<double>(k_max + 1, 0.0)};
    e.visit(0, 1.0);

    TailDistribution t;
    t.kind = kind;
    t.source = TailSource::BruteForce;
    t.mu_A = measure(model, set);
    t.values.assign(k_max + 1, 0.0);
    double above = e.survived;
    for (std::size_t k = k_max + 1; k-- > 0;) {
        t.values[k] = above;
        above += e.first_hit[k];
    }
    if (kind == TailKind::Return) {
        if (e.in_A <= 0.0) throw Error(ErrorCode::ZeroMeasureSet, "return time undefined for a null set");
        for (double& v : t.values) v /= e.in_A;
    }
    return t;
}

double return_expectation(const ProcessModel& model, const TargetSet& set) {
    TailPropagator prop(model, set, TailKind::Return);
    return prop.expected_time();
}

}  // namespace rarehit
