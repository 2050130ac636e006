#pragma once
// Deterministic generator of valid threat models for property tests.

#include "riskchain/model.hpp"

#include <random>
#include <string>
#include <vector>

inline riskchain::ThreatModel random_model(std::mt19937_64& rng) {
    using namespace riskchain;
    std::uniform_int_distribution<int> vuln_count(1, 8);
    std::uniform_int_distribution<int> threat_count(1, 6);
    std::uniform_int_distribution<int> tenth(0, 100);
    std::uniform_real_distribution<double> alpha_range(0.001, 0.999);
    std::uniform_real_distribution<double> mu_range(0.01, 1.0);
    std::uniform_real_distribution<double> override_factor(1.0, 3.0);
    std::bernoulli_distribution coin(0.5);

    ThreatModel m;
    m.alpha = alpha_range(rng);
    m.mu = mu_range(rng);
    m.mu_mode = coin(rng) ? MuMode::Uniform : MuMode::Proportional;

    const int nv = vuln_count(rng);
    for (int i = 0; i < nv; ++i) {
        VulnerabilityRecord v;
        v.id = "V" + std::to_string(i + 1);
        v.name = "vulnerability " + std::to_string(i + 1);
        // keep the first score positive so the weight pool cannot collapse
        v.literal_score = (i == 0 ? tenth(rng) % 100 + 1 : tenth(rng)) / 10.0;
        m.vulnerabilities.push_back(std::move(v));
    }

    const int nt = threat_count(rng);
    for (int i = 0; i < nt; ++i) {
        ThreatRecord t;
        t.id = "A" + std::to_string(i + 1);
        t.name = "threat " + std::to_string(i + 1);
        t.stride = static_cast<Stride>(std::uniform_int_distribution<int>(0, 5)(rng));
        t.requirement = static_cast<Requirement>(std::uniform_int_distribution<int>(0, 4)(rng));
        if (i == 0) t.exploits.push_back("V1");
        for (int j = i == 0 ? 1 : 0; j < nv; ++j)
            if (coin(rng)) t.exploits.push_back("V" + std::to_string(j + 1));
        if (t.exploits.empty()) t.exploits.push_back("V" + std::to_string(nv));
        m.threats.push_back(std::move(t));
    }

    // an override below the weight sum could push probabilities past 1, so
    // generated overrides always sit at or above it
    if (coin(rng)) {
        double weight_sum = 0.0;
        for (const auto& t : m.threats)
            for (const auto& ref : t.exploits)
                weight_sum += *m.find_vulnerability(ref)->literal_score;
        m.denominator_override = weight_sum * override_factor(rng);
    }
    return resolve_scores(m);
}
