#pragma once
// Presentation layer: ranked distribution rows, vulnerability mitigation
// priorities, and table/csv/json rendering with stable byte output.

#include "riskchain/markov.hpp"
#include "riskchain/simulate.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace riskchain {

enum class Format { Table, Csv, Json };

std::optional<Format> parse_format(std::string_view name);

struct ReportRow {
    std::string threat_id;
    std::string name;
    std::string requirement;
    double weight = 0.0;
    double alpha = 0.0;
    double mu = 0.0;
    double p_attack = 0.0;
    int rank = 0;  // 1..n by descending p_attack, ties by id ascending
};

std::vector<ReportRow> distribution_rows(const ThreatModel& model,
                                         const AttackDistribution& dist);

struct VulnerabilityPriority {
    std::string vulnerability_id;
    std::string name;
    double score = 0.0;
    double criticality = 0.0;  // score times total p_attack of exploiting threats
    std::vector<std::string> contributing_threats;
};

// Mitigation ranking, most critical first; ties broken by id ascending.
std::vector<VulnerabilityPriority> prioritize(const ThreatModel& model,
                                              const AttackDistribution& dist);

std::string render_distribution(const std::vector<ReportRow>& rows,
                                const AttackDistribution& dist, Format format);
std::string render_matrix(const TransitionMatrix& matrix, Format format);
std::string render_simulation(const ComparisonReport& report, Format format);
std::string render_priorities(const std::vector<VulnerabilityPriority>& priorities,
                              Format format);

} // namespace riskchain
