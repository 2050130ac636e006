#include "riskchain/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace riskchain {

std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

double uniform01(std::uint64_t seed, std::uint64_t trajectory, std::uint64_t step) {
    const std::uint64_t h = mix64(mix64(seed ^ mix64(trajectory)) ^ mix64(step));
    return static_cast<double>(h >> 11) * 0x1.0p-53;
}

EmpiricalDistribution simulate(const TransitionMatrix& p, const SimulationConfig& cfg) {
    if (cfg.trajectories < 1) throw std::invalid_argument("need at least one trajectory");
    if (cfg.max_steps < 2) throw std::invalid_argument("need at least two steps to absorb");
    const std::size_t n = threat_state_count(p);
    const std::size_t absorbing = n + 1;

    // Cumulative rows for inverse-CDF sampling; the final entry is pinned to 1
    // so a draw arbitrarily close to 1 still lands in the last column.
    std::vector<std::vector<double>> cumulative(absorbing + 1);
    for (std::size_t row = 0; row <= absorbing; ++row) {
        double acc = 0.0;
        auto& cum = cumulative[row];
        cum.reserve(absorbing + 1);
        for (std::size_t col = 0; col <= absorbing; ++col) {
            acc += p.p(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col));
            cum.push_back(acc);
        }
        cum.back() = std::max(cum.back(), 1.0);
    }

    EmpiricalDistribution out;
    out.threat_ids.assign(p.states.begin() + 1, p.states.end() - 1);
    out.absorbed_via.assign(n, 0);
    out.trajectories = cfg.trajectories;

    for (std::uint64_t t = 0; t < cfg.trajectories; ++t) {
        std::size_t state = 0;
        std::size_t last_threat = n;  // sentinel: no threat state visited yet
        for (std::uint64_t step = 0; step < cfg.max_steps && state != absorbing; ++step) {
            const double u = uniform01(cfg.seed, t, step);
            const auto& cum = cumulative[state];
            state = static_cast<std::size_t>(
                std::upper_bound(cum.begin(), cum.end(), u) - cum.begin());
            if (state >= 1 && state <= n) last_threat = state - 1;
        }
        if (state == absorbing)
            ++out.absorbed_via[last_threat];
        else
            ++out.unabsorbed;
    }
    return out;
}

ComparisonReport compare_distributions(const EmpiricalDistribution& emp,
                                       const AttackDistribution& analytic) {
    if (emp.threat_ids.size() != analytic.rows.size())
        throw EngineError(EngineError::Code::MismatchedThreats,
                          "empirical and analytic threat sets differ in size");
    for (std::size_t i = 0; i < emp.threat_ids.size(); ++i)
        if (emp.threat_ids[i] != analytic.rows[i].threat_id)
            throw EngineError(EngineError::Code::MismatchedThreats,
                              "threat \"" + emp.threat_ids[i] + "\" does not line up with \"" +
                                  analytic.rows[i].threat_id + "\"");

    ComparisonReport report;
    report.absorbed = emp.absorbed_total();
    report.unabsorbed = emp.unabsorbed;
    const double n = static_cast<double>(report.absorbed);
    const double alpha_sum = analytic.alpha_sum;

    for (std::size_t i = 0; i < emp.threat_ids.size(); ++i) {
        ThreatComparison row;
        row.threat_id = emp.threat_ids[i];
        row.count = emp.absorbed_via[i];
        row.expected = alpha_sum > 0.0 ? analytic.rows[i].alpha / alpha_sum : 0.0;
        row.frequency = n > 0.0 ? static_cast<double>(row.count) / n : 0.0;
        if (n > 0.0 && row.expected > 0.0 && row.expected < 1.0) {
            const double se = std::sqrt(row.expected * (1.0 - row.expected) / n);
            row.z = (row.frequency - row.expected) / se;
        }
        if (n > 0.0 && row.expected > 0.0) {
            const double want = n * row.expected;
            const double diff = static_cast<double>(row.count) - want;
            report.chi_square += diff * diff / want;
        }
        report.rows.push_back(std::move(row));
    }
    return report;
}

} // namespace riskchain
