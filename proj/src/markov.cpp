#include "riskchain/markov.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>

namespace riskchain {

namespace {

constexpr double kBuildTolerance = 1e-12;
constexpr double kPowerTolerance = 1e-10;

void check_row_stochastic(const Eigen::MatrixXd& p, double tolerance) {
    for (Eigen::Index i = 0; i < p.rows(); ++i) {
        const double sum = p.row(i).sum();
        if (std::abs(sum - 1.0) > tolerance || p.row(i).minCoeff() < -tolerance) {
            std::ostringstream msg;
            msg << "row " << i << " is not a probability distribution (sum " << sum << ")";
            throw EngineError(EngineError::Code::NotStochastic, msg.str());
        }
    }
}

std::vector<const ThreatRecord*> ordered_threats(const ThreatModel& model) {
    std::vector<const ThreatRecord*> order;
    order.reserve(model.threats.size());
    for (const auto& t : model.threats) order.push_back(&t);
    std::sort(order.begin(), order.end(), [](const ThreatRecord* a, const ThreatRecord* b) {
        return natural_id_less(a->id, b->id);
    });
    return order;
}

} // namespace

WeightSet compute_weights(const ThreatModel& model) {
    std::map<std::string, double> scores;
    for (const auto& v : model.vulnerabilities)
        if (v.resolved_score) scores[v.id] = *v.resolved_score;

    WeightSet out;
    for (const ThreatRecord* threat : ordered_threats(model)) {
        double w = 0.0;
        for (const auto& ref : threat->exploits) {
            auto it = scores.find(ref);
            if (it == scores.end())
                throw EngineError(EngineError::Code::UnresolvedScore,
                                  "threat \"" + threat->id + "\" needs a resolved score for \"" +
                                      ref + "\"");
            w += it->second;
        }
        out.threat_ids.push_back(threat->id);
        out.weights.push_back(w);
        out.weight_sum += w;
    }
    out.denominator = model.denominator_override.value_or(out.weight_sum);
    return out;
}

std::vector<double> compute_alphas(const ThreatModel& model, const WeightSet& weights) {
    if (!(weights.denominator > 0.0))
        throw EngineError(EngineError::Code::ZeroDenominator,
                          "weight denominator must be positive");
    std::vector<double> alphas;
    alphas.reserve(weights.weights.size());
    for (double w : weights.weights)
        alphas.push_back(w / weights.denominator * model.alpha);
    return alphas;
}

std::vector<double> compute_mus(const ThreatModel& model, const WeightSet& weights) {
    if (model.mu_mode == MuMode::Uniform)
        return std::vector<double>(weights.weights.size(), model.mu);
    if (!(weights.denominator > 0.0))
        throw EngineError(EngineError::Code::ZeroDenominator,
                          "weight denominator must be positive");
    std::vector<double> mus;
    mus.reserve(weights.weights.size());
    for (double w : weights.weights)
        mus.push_back(w / weights.denominator * model.mu);
    return mus;
}

TransitionMatrix build_transition_matrix(const ThreatModel& model) {
    const WeightSet weights = compute_weights(model);
    const std::vector<double> alphas = compute_alphas(model, weights);
    const std::vector<double> mus = compute_mus(model, weights);
    return build_transition_matrix(weights.threat_ids, alphas, mus);
}

TransitionMatrix build_transition_matrix(std::vector<std::string> threat_ids,
                                         std::span<const double> alphas,
                                         std::span<const double> mus) {
    const std::size_t n = alphas.size();
    if (n == 0 || threat_ids.size() != n || mus.size() != n)
        throw EngineError(EngineError::Code::ShapeError,
                          "threat ids, alphas and mus must be non-empty and equal-sized");

    double alpha_sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (!(alphas[i] >= 0.0) || !(mus[i] >= 0.0 && mus[i] <= 1.0))
            throw EngineError(EngineError::Code::NotStochastic,
                              "transition probabilities for \"" + threat_ids[i] +
                                  "\" fall outside [0, 1]");
        alpha_sum += alphas[i];
    }
    if (alpha_sum > 1.0 + kBuildTolerance)
        throw EngineError(EngineError::Code::NotStochastic,
                          "safe-state exit probabilities sum past 1");

    const Eigen::Index size = static_cast<Eigen::Index>(n) + 2;
    Eigen::MatrixXd p = Eigen::MatrixXd::Zero(size, size);
    p(0, 0) = std::max(0.0, 1.0 - alpha_sum);
    for (std::size_t i = 0; i < n; ++i) {
        const Eigen::Index row = static_cast<Eigen::Index>(i) + 1;
        p(0, row) = alphas[i];
        p(row, row) = 1.0 - mus[i];
        p(row, size - 1) = mus[i];
    }
    p(size - 1, size - 1) = 1.0;
    check_row_stochastic(p, kBuildTolerance);

    TransitionMatrix out;
    out.states.reserve(n + 2);
    out.states.emplace_back("S");
    for (const auto& id : threat_ids) out.states.push_back(id);
    out.states.emplace_back("A");
    out.threat_ids = std::move(threat_ids);
    out.p = std::move(p);
    return out;
}

TransitionMatrix n_step_matrix(const TransitionMatrix& p, long n) {
    if (n < 1) throw std::invalid_argument("step count must be at least 1");
    if (p.p.rows() != p.p.cols()) throw EngineError(EngineError::Code::ShapeError,
                                                    "matrix must be square");
    check_row_stochastic(p.p, kPowerTolerance);

    Eigen::MatrixXd result = Eigen::MatrixXd::Identity(p.p.rows(), p.p.cols());
    Eigen::MatrixXd base = p.p;
    for (unsigned long k = static_cast<unsigned long>(n); k != 0; k >>= 1) {
        if (k & 1) result = result * base;
        if (k > 1) base = base * base;
    }
    check_row_stochastic(result, kPowerTolerance);

    TransitionMatrix out;
    out.states = p.states;
    out.threat_ids = p.threat_ids;
    out.p = std::move(result);
    return out;
}

std::size_t threat_state_count(const TransitionMatrix& m) {
    const Eigen::Index size = m.p.rows();
    if (m.p.cols() != size || size < 3)
        throw EngineError(EngineError::Code::ShapeError,
                          "matrix is not a safe/threats/attack chain");
    const Eigen::Index last = size - 1;
    auto fail = [] {
        throw EngineError(EngineError::Code::ShapeError,
                          "matrix zero pattern is not safe/threats/attack");
    };
    if (m.p(0, last) != 0.0) fail();
    for (Eigen::Index i = 1; i < last; ++i) {
        if (m.p(i, 0) != 0.0) fail();
        for (Eigen::Index j = 1; j < last; ++j)
            if (j != i && m.p(i, j) != 0.0) fail();
    }
    for (Eigen::Index j = 0; j < last; ++j)
        if (m.p(last, j) != 0.0) fail();
    if (m.p(last, last) != 1.0) fail();
    if (m.states.size() != static_cast<std::size_t>(size)) fail();
    return static_cast<std::size_t>(size - 2);
}

AttackDistribution attack_distribution(const ThreatModel& model) {
    const WeightSet weights = compute_weights(model);
    const std::vector<double> alphas = compute_alphas(model, weights);
    const std::vector<double> mus = compute_mus(model, weights);

    AttackDistribution out;
    out.denominator = weights.denominator;
    out.weight_sum = weights.weight_sum;
    out.model_alpha = model.alpha;
    for (std::size_t i = 0; i < weights.threat_ids.size(); ++i) {
        AttackRow row;
        row.threat_id = weights.threat_ids[i];
        row.weight = weights.weights[i];
        row.alpha = alphas[i];
        row.mu = mus[i];
        row.p_attack = alphas[i] * mus[i];
        if (!(row.p_attack >= 0.0 && row.p_attack <= 1.0))
            throw EngineError(EngineError::Code::NotStochastic,
                              "attack probability for \"" + row.threat_id +
                                  "\" falls outside [0, 1]");
        out.alpha_sum += row.alpha;
        out.total_p_attack += row.p_attack;
        out.rows.push_back(std::move(row));
    }
    return out;
}

TransitionMatrix countermeasure_matrix(const CountermeasureChain& chain) {
    if (!(chain.alpha >= 0.0 && chain.beta >= 0.0 && chain.mu >= 0.0 && chain.epsilon >= 0.0) ||
        chain.alpha > 1.0 || chain.epsilon > 1.0 || chain.beta + chain.mu > 1.0)
        throw EngineError(EngineError::Code::NotStochastic,
                          "countermeasure chain parameters fall outside their ranges");
    if (chain.alpha == 0.0)
        throw EngineError(EngineError::Code::Reducible,
                          "alpha = 0 leaves the threat state unreachable");

    Eigen::MatrixXd p(3, 3);
    p << 1.0 - chain.alpha, chain.alpha, 0.0,
         chain.beta, 1.0 - chain.beta - chain.mu, chain.mu,
         chain.epsilon, 0.0, 1.0 - chain.epsilon;
    check_row_stochastic(p, kBuildTolerance);
    return {{"S", "T", "A"}, {}, std::move(p)};
}

StationaryDistribution stationary_distribution(const CountermeasureChain& chain) {
    const TransitionMatrix m = countermeasure_matrix(chain);
    if (chain.mu == 0.0)
        throw EngineError(EngineError::Code::Reducible,
                          "mu = 0 leaves the attack state unreachable");
    if (chain.epsilon == 0.0)
        throw EngineError(EngineError::Code::Reducible,
                          "epsilon = 0 makes the attack state absorbing");

    // pi P = pi with sum(pi) = 1: replace one balance equation by the
    // normalization row.
    Eigen::Matrix3d lhs = m.p.transpose() - Eigen::Matrix3d::Identity();
    lhs.row(2) = Eigen::RowVector3d::Ones();
    const Eigen::Vector3d rhs(0.0, 0.0, 1.0);
    const Eigen::Vector3d pi = lhs.fullPivLu().solve(rhs);

    const double residual = (pi.transpose() * m.p - pi.transpose()).cwiseAbs().maxCoeff();
    if (residual > 1e-12 || pi.minCoeff() < -1e-12)
        throw EngineError(EngineError::Code::Reducible,
                          "stationary solve did not converge; chain is degenerate");
    return {pi(0), pi(1), pi(2)};
}

AbsorptionMetrics absorption_metrics(const TransitionMatrix& p,
                                     std::span<const long> horizons) {
    const Eigen::Index n = static_cast<Eigen::Index>(threat_state_count(p));
    const Eigen::Index last = n + 1;

    const double alpha_sum = p.p.row(0).segment(1, n).sum();
    if (alpha_sum <= 0.0)
        throw EngineError(EngineError::Code::NotAbsorbing,
                          "no transition out of the safe state");
    for (Eigen::Index i = 1; i <= n; ++i)
        if (p.p(i, last) <= 0.0)
            throw EngineError(EngineError::Code::NotAbsorbing,
                              "threat state \"" + p.states[static_cast<std::size_t>(i)] +
                                  "\" never reaches the attack state");

    // Expected absorption steps: solve (I - Q) x = 1 over the transient block.
    const Eigen::MatrixXd q = p.p.topLeftCorner(n + 1, n + 1);
    const Eigen::MatrixXd system = Eigen::MatrixXd::Identity(n + 1, n + 1) - q;
    const Eigen::VectorXd steps = system.fullPivLu().solve(Eigen::VectorXd::Ones(n + 1));

    AbsorptionMetrics out;
    out.expected_steps_from_safe = steps(0);
    for (long horizon : horizons)
        out.absorption_by_step.emplace_back(horizon, n_step_matrix(p, horizon).p(0, last));
    return out;
}

} // namespace riskchain
