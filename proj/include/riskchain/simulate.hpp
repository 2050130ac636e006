#pragma once
// Monte Carlo cross-check of the analytic attack distribution: seeded,
// order-independent trajectory sampling plus frequency comparison.

#include "riskchain/markov.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace riskchain {

// splitmix64 mixing step; the simulation draws all randomness through it.
std::uint64_t mix64(std::uint64_t x);

// Uniform double in [0, 1) keyed by (seed, trajectory, step). Pure function,
// so trajectories can run in any order or in parallel with identical results.
double uniform01(std::uint64_t seed, std::uint64_t trajectory, std::uint64_t step);

struct SimulationConfig {
    std::uint64_t trajectories = 100000;
    std::uint64_t max_steps = 10000;  // cap per trajectory before giving up
    std::uint64_t seed = 0;
};

struct EmpiricalDistribution {
    std::vector<std::string> threat_ids;
    std::vector<std::uint64_t> absorbed_via;  // trajectories absorbed through each threat
    std::uint64_t unabsorbed = 0;             // hit max_steps before absorbing
    std::uint64_t trajectories = 0;

    std::uint64_t absorbed_total() const { return trajectories - unabsorbed; }

    bool operator==(const EmpiricalDistribution&) const = default;
};

// Samples trajectories of a canonical safe/threats/attack chain from the safe
// state, recording which threat state each absorbed trajectory passed through.
EmpiricalDistribution simulate(const TransitionMatrix& p, const SimulationConfig& cfg);

struct ThreatComparison {
    std::string threat_id;
    std::uint64_t count = 0;
    double frequency = 0.0;  // count / absorbed
    double expected = 0.0;   // analytic alpha_i / sum of alphas
    double z = 0.0;          // binomial z-score of frequency vs expected
};

struct ComparisonReport {
    std::vector<ThreatComparison> rows;
    double chi_square = 0.0;
    std::uint64_t absorbed = 0;
    std::uint64_t unabsorbed = 0;
};

// Conditions on absorbed trajectories, since absorption from any threat state
// is certain and only the path choice carries information.
ComparisonReport compare_distributions(const EmpiricalDistribution& emp,
                                       const AttackDistribution& analytic);

} // namespace riskchain
