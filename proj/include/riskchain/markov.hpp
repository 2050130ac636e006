#pragma once
// Absorbing-chain engine: CVSS-weighted transition probabilities, matrix
// powers, the per-threat attack distribution, and countermeasure-chain
// stationary analysis.

#include "riskchain/model.hpp"

#include <Eigen/Dense>

#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace riskchain {

class EngineError : public std::runtime_error {
public:
    enum class Code {
        UnresolvedScore,
        ZeroDenominator,
        NotStochastic,
        NotAbsorbing,
        Reducible,
        ShapeError,
        MismatchedThreats,
    };

    EngineError(Code code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    Code code() const { return code_; }

private:
    Code code_;
};

// Row-stochastic transition matrix over states [S, threats..., A]. For
// matrices built from a model, threat_ids mirrors states[1..n]; matrices
// without that structure (powers keep it, the countermeasure chain has none)
// leave it empty only when no threat labeling applies.
struct TransitionMatrix {
    std::vector<std::string> states;
    std::vector<std::string> threat_ids;
    Eigen::MatrixXd p;
};

// Per-threat path weights in threat-id order (numeric-aware ascending).
struct WeightSet {
    std::vector<std::string> threat_ids;
    std::vector<double> weights;     // W_i = sum of exploited vulnerability scores
    double weight_sum = 0.0;         // sum of all W_i, each threat counted once
    double denominator = 0.0;        // denominator_override if set, else weight_sum
};

WeightSet compute_weights(const ThreatModel& model);
std::vector<double> compute_alphas(const ThreatModel& model, const WeightSet& weights);
std::vector<double> compute_mus(const ThreatModel& model, const WeightSet& weights);

// Chain of Safe -> threat states -> absorbing Attack state. The raw overload
// exists for boundary cases a validated model cannot express (alpha_i = 1).
TransitionMatrix build_transition_matrix(const ThreatModel& model);
TransitionMatrix build_transition_matrix(std::vector<std::string> threat_ids,
                                         std::span<const double> alphas,
                                         std::span<const double> mus);

// P^n by repeated squaring; n >= 1.
TransitionMatrix n_step_matrix(const TransitionMatrix& p, long n);

// Validates that the zero pattern is the canonical safe/threats/attack shape
// (safe row never jumps straight to attack, threat rows touch only themselves
// and attack, attack row is absorbing) and returns the threat-state count.
// Throws ShapeError otherwise.
std::size_t threat_state_count(const TransitionMatrix& p);

struct AttackRow {
    std::string threat_id;
    double weight = 0.0;
    double alpha = 0.0;
    double mu = 0.0;
    double p_attack = 0.0;  // alpha * mu, the two-step S->T_i->A probability
};

struct AttackDistribution {
    std::vector<AttackRow> rows;     // threat-id order
    double denominator = 0.0;
    double weight_sum = 0.0;
    double model_alpha = 0.0;
    double alpha_sum = 0.0;          // equals model_alpha when no override skews it
    double total_p_attack = 0.0;     // equals P^2[S,A]
};

AttackDistribution attack_distribution(const ThreatModel& model);

// Three-state recovery-aware chain: S -alpha-> T, T -beta-> S, T -mu-> A,
// A -epsilon-> S.
struct CountermeasureChain {
    double alpha = 0.0;
    double beta = 0.0;
    double mu = 0.0;
    double epsilon = 0.0;
};

TransitionMatrix countermeasure_matrix(const CountermeasureChain& chain);

struct StationaryDistribution {
    double safe = 0.0;
    double threat = 0.0;
    double attack = 0.0;
};

// Unique pi with pi P = pi, sum 1; requires alpha, mu, epsilon all positive.
StationaryDistribution stationary_distribution(const CountermeasureChain& chain);

struct AbsorptionMetrics {
    double expected_steps_from_safe = 0.0;
    std::vector<std::pair<long, double>> absorption_by_step;  // (n, P^n[S,A])
};

// Fundamental-matrix analysis of a canonical absorbing chain.
AbsorptionMetrics absorption_metrics(const TransitionMatrix& p,
                                     std::span<const long> horizons);

} // namespace riskchain
