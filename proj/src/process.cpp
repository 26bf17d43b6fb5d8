#include "rarehit/process.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include <Eigen/Dense>

#include "rarehit/error.hpp"

namespace rarehit {

namespace {

constexpr double kRowSumTol = 1e-12;
constexpr double kFixedPointTol = 1e-10;

void check_distribution(std::span<const double> row, const std::string& what) {
    double sum = 0.0;
    for (double p : row) {
        if (!std::isfinite(p) || p < 0.0)
            throw Error(ErrorCode::NonStochastic, what + " has a negative or non-finite entry");
        sum += p;
    }
    if (std::abs(sum - 1.0) > kRowSumTol)
        throw Error(ErrorCode::NonStochastic, what + " sums to " + std::to_string(sum));
}

using BoolMatrix = std::vector<std::vector<char>>;

BoolMatrix bool_multiply(const BoolMatrix& a, const BoolMatrix& b) {
    const std::size_t q = a.size();
    BoolMatrix c(q, std::vector<char>(q, 0));
    for (std::size_t i = 0; i < q; ++i)
        for (std::size_t k = 0; k < q; ++k)
            if (a[i][k])
                for (std::size_t j = 0; j < q; ++j)
                    c[i][j] |= b[k][j];
    return c;
}

bool all_positive(const BoolMatrix& m) {
    return std::all_of(m.begin(), m.end(), [](const auto& row) {
        return std::all_of(row.begin(), row.end(), [](char c) { return c != 0; });
    });
}

bool strongly_connected(const BoolMatrix& adj) {
    const std::size_t q = adj.size();
    auto reach_all = [&](bool reverse) {
        std::vector<char> seen(q, 0);
        std::vector<std::size_t> stack{0};
        seen[0] = 1;
        while (!stack.empty()) {
            const std::size_t u = stack.back();
            stack.pop_back();
            for (std::size_t v = 0; v < q; ++v) {
                const bool edge = reverse ? adj[v][u] : adj[u][v];
                if (edge && !seen[v]) {
                    seen[v] = 1;
                    stack.push_back(v);
                }
            }
        }
        return std::all_of(seen.begin(), seen.end(), [](char c) { return c != 0; });
    };
    return reach_all(false) && reach_all(true);
}

// Primitive <=> some power <= q^2 is entrywise positive (Wielandt: (q-1)^2 + 1).
void check_primitive(const std::vector<double>& p, std::size_t q) {
    BoolMatrix adj(q, std::vector<char>(q, 0));
    for (std::size_t i = 0; i < q; ++i)
        for (std::size_t j = 0; j < q; ++j)
            adj[i][j] = p[i * q + j] > 0.0;

    BoolMatrix power = adj;
    for (std::size_t e = 1; e <= q * q; ++e) {
        if (all_positive(power)) return;
        power = bool_multiply(power, adj);
    }
    if (!strongly_connected(adj))
        throw Error(ErrorCode::Reducible, "transition graph is not strongly connected");
    throw Error(ErrorCode::Periodic, "chain is irreducible but periodic");
}

std::vector<double> solve_stationary(const std::vector<double>& p, std::size_t q) {
    // (P^T - I) pi = 0 with the last equation replaced by sum(pi) = 1.
    Eigen::MatrixXd a(q, q);
    for (std::size_t i = 0; i < q; ++i)
        for (std::size_t j = 0; j < q; ++j)
            a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                p[j * q + i] - (i == j ? 1.0 : 0.0);
    a.row(static_cast<Eigen::Index>(q - 1)).setOnes();
    Eigen::VectorXd b = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(q));
    b(static_cast<Eigen::Index>(q - 1)) = 1.0;
    const Eigen::VectorXd x = a.partialPivLu().solve(b);

    std::vector<double> pi(q);
    for (std::size_t i = 0; i < q; ++i) pi[i] = std::max(0.0, x(static_cast<Eigen::Index>(i)));
    const double total = std::accumulate(pi.begin(), pi.end(), 0.0);
    for (double& v : pi) v /= total;

    for (std::size_t j = 0; j < q; ++j) {
        double lhs = 0.0;
        for (std::size_t i = 0; i < q; ++i) lhs += pi[i] * p[i * q + j];
        if (std::abs(lhs - pi[j]) > kFixedPointTol)
            throw Error(ErrorCode::NonStochastic, "stationary solve did not converge to a fixed point");
    }
    return pi;
}

std::vector<double> mat_mul(const std::vector<double>& a, const std::vector<double>& b, std::size_t q) {
    std::vector<double> c(q * q, 0.0);
    for (std::size_t i = 0; i < q; ++i)
        for (std::size_t k = 0; k < q; ++k) {
            const double aik = a[i * q + k];
            if (aik == 0.0) continue;
            for (std::size_t j = 0; j < q; ++j) c[i * q + j] += aik * b[k * q + j];
        }
    return c;
}

double beta_coefficient(const std::vector<double>& pg, const std::vector<double>& pi, std::size_t q) {
    double total = 0.0;
    for (std::size_t i = 0; i < q; ++i) {
        double tv = 0.0;
        for (std::size_t j = 0; j < q; ++j) tv += std::abs(pg[i * q + j] - pi[j]);
        total += pi[i] * 0.5 * tv;
    }
    return std::clamp(total, 0.0, 1.0);
}

}  // namespace

std::vector<double> ProcessModel::transition_matrix() const {
    if (!is_iid()) return transition_;
    std::vector<double> p(q_ * q_);
    for (std::size_t i = 0; i < q_; ++i)
        std::copy(stationary_.begin(), stationary_.end(), p.begin() + static_cast<std::ptrdiff_t>(i * q_));
    return p;
}

bool ProcessModel::is_uniform_iid() const noexcept {
    if (!is_iid()) return false;
    const double u = 1.0 / static_cast<double>(q_);
    return std::all_of(stationary_.begin(), stationary_.end(),
                       [u](double p) { return std::abs(p - u) <= 1e-15; });
}

ProcessModel validate(const ModelParams& params) {
    ProcessModel m;
    m.kind_ = params.kind;
    if (params.kind == ProcessKind::IID) {
        if (params.probs.size() < 2)
            throw Error(ErrorCode::EmptyAlphabet, "IID model needs at least two symbols");
        check_distribution(params.probs, "IID probability table");
        m.q_ = params.probs.size();
        m.stationary_ = params.probs;
        return m;
    }

    const std::size_t q = params.transition.size();
    if (q < 2) throw Error(ErrorCode::EmptyAlphabet, "Markov model needs at least two symbols");
    std::vector<double> p;
    p.reserve(q * q);
    for (std::size_t i = 0; i < q; ++i) {
        const auto& row = params.transition[i];
        if (row.size() != q)
            throw Error(ErrorCode::NonStochastic, "transition row " + std::to_string(i) + " has wrong length");
        check_distribution(row, "transition row " + std::to_string(i));
        p.insert(p.end(), row.begin(), row.end());
    }
    check_primitive(p, q);
    m.q_ = q;
    m.stationary_ = solve_stationary(p, q);
    m.transition_ = std::move(p);
    return m;
}

ProcessModel iid_model(std::vector<double> probs) {
    return validate(ModelParams{ProcessKind::IID, std::move(probs), {}});
}

ProcessModel uniform_iid(std::size_t q) {
    return iid_model(std::vector<double>(q, 1.0 / static_cast<double>(q)));
}

ProcessModel markov_model(std::vector<std::vector<double>> transition) {
    return validate(ModelParams{ProcessKind::Markov, {}, std::move(transition)});
}

double cylinder_measure(const ProcessModel& model, std::span<const Symbol> word) {
    if (word.empty()) throw Error(ErrorCode::EmptyWord, "cylinder word is empty");
    const std::size_t q = model.alphabet_size();
    for (Symbol s : word)
        if (s >= q) throw Error(ErrorCode::SymbolOutOfRange, "symbol " + std::to_string(s) + " >= q");
    double measure = model.stationary(word[0]);
    for (std::size_t i = 1; i < word.size(); ++i) measure *= model.next_prob(word[i - 1], word[i]);
    return measure;
}

double entropy(const ProcessModel& model) {
    const std::size_t q = model.alphabet_size();
    auto plogp = [](double p) { return p > 0.0 ? -p * std::log(p) : 0.0; };
    double h = 0.0;
    if (model.is_iid()) {
        for (double p : model.stationary()) h += plogp(p);
        return h;
    }
    for (Symbol i = 0; i < q; ++i) {
        double row = 0.0;
        for (Symbol j = 0; j < q; ++j) row += plogp(model.next_prob(i, j));
        h += model.stationary(i) * row;
    }
    return h;
}

MixingBound::MixingBound(const ProcessModel& model)
    : q_(model.alphabet_size()), iid_(model.is_iid()) {
    if (iid_) return;
    transition_ = model.transition_matrix();
    stationary_.assign(model.stationary().begin(), model.stationary().end());

    table_.assign(kTabulated + 1, 1.0);
    std::vector<double> power = transition_;
    double running = 1.0;
    for (std::int64_t g = 1; g <= kTabulated; ++g) {
        running = std::min(running, beta_coefficient(power, stationary_, q_));
        table_[static_cast<std::size_t>(g)] = running;
        power = mat_mul(power, transition_, q_);
    }

    // Geometric rate from the latest stretch still well above rounding noise.
    constexpr double kNoise = 1e-9;
    std::int64_t hi = 1;
    while (hi < kTabulated && table_[static_cast<std::size_t>(hi + 1)] > kNoise) ++hi;
    if (table_[1] <= kNoise) {
        decay_rate_ = 0.0;
    } else if (hi >= 2) {
        const std::int64_t lo = hi / 2;
        decay_rate_ = std::pow(table_[static_cast<std::size_t>(hi)] / table_[static_cast<std::size_t>(lo)],
                               1.0 / static_cast<double>(hi - lo));
    } else {
        decay_rate_ = table_[1];
    }
}

double MixingBound::operator()(std::int64_t gap) const {
    if (gap < 1) throw Error(ErrorCode::GapNonPositive, "mixing gap must be >= 1");
    if (iid_) return 0.0;
    if (gap <= kTabulated) return table_[static_cast<std::size_t>(gap)];

    std::vector<double> result(q_ * q_, 0.0);
    for (std::size_t i = 0; i < q_; ++i) result[i * q_ + i] = 1.0;
    std::vector<double> base = transition_;
    for (auto e = static_cast<std::uint64_t>(gap); e != 0; e >>= 1) {
        if (e & 1U) result = mat_mul(result, base, q_);
        base = mat_mul(base, base, q_);
    }
    return std::min(table_.back(), beta_coefficient(result, stationary_, q_));
}

double alpha_bound(const ProcessModel& model, std::int64_t gap) {
    return MixingBound(model)(gap);
}

ModelParams model_params_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw Error(ErrorCode::ConfigInvalid, "model spec must be a JSON object");
    for (const auto& [key, _] : j.items())
        if (key != "kind" && key != "probs" && key != "transition")
            throw Error(ErrorCode::ConfigInvalid, "unknown model key '" + key + "'");
    if (!j.contains("kind") || !j["kind"].is_string())
        throw Error(ErrorCode::ConfigInvalid, "model spec needs a string 'kind'");

    ModelParams params;
    const auto kind = j["kind"].get<std::string>();
    try {
        if (kind == "iid") {
            if (!j.contains("probs") || j.contains("transition"))
                throw Error(ErrorCode::ConfigInvalid, "iid model takes exactly 'probs'");
            params.kind = ProcessKind::IID;
            params.probs = j["probs"].get<std::vector<double>>();
        } else if (kind == "markov") {
            if (!j.contains("transition") || j.contains("probs"))
                throw Error(ErrorCode::ConfigInvalid, "markov model takes exactly 'transition'");
            params.kind = ProcessKind::Markov;
            params.transition = j["transition"].get<std::vector<std::vector<double>>>();
        } else {
            throw Error(ErrorCode::ConfigInvalid, "unknown model kind '" + kind + "'");
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::ConfigInvalid, std::string("malformed model table: ") + e.what());
    }
    return params;
}

nlohmann::json to_json(const ProcessModel& model) {
    if (model.is_iid()) {
        return {{"kind", "iid"},
                {"probs", std::vector<double>(model.stationary().begin(), model.stationary().end())}};
    }
    const std::size_t q = model.alphabet_size();
    const auto p = model.transition_matrix();
    std::vector<std::vector<double>> rows(q);
    for (std::size_t i = 0; i < q; ++i)
        rows[i].assign(p.begin() + static_cast<std::ptrdiff_t>(i * q),
                       p.begin() + static_cast<std::ptrdiff_t>((i + 1) * q));
    return {{"kind", "markov"}, {"transition", rows}};
}

}  // namespace rarehit
