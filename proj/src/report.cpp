#include "riskchain/report.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <sstream>

namespace riskchain {

using json = nlohmann::ordered_json;

namespace {

std::string sci6(double v) {
    char buf[48];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::scientific, 5);
    return std::string(buf, ptr);
}

std::string num6(double v) {
    char buf[48];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 6);
    return std::string(buf, ptr);
}

std::string fixed6(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, 6);
    return std::string(buf, ptr);
}

// Shortest decimal that parses back to the same double.
std::string exact(double v) {
    char buf[48];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

std::string csv_field(std::string_view s) {
    if (s.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(s);
    std::string quoted = "\"";
    for (char c : s) {
        quoted += c;
        if (c == '"') quoted += '"';
    }
    quoted += '"';
    return quoted;
}

std::string csv_line(const std::vector<std::string>& fields) {
    std::string line;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) line += ',';
        line += csv_field(fields[i]);
    }
    line += '\n';
    return line;
}

// Space-padded table with per-column alignment; presentation only.
std::string aligned_table(const std::vector<std::string>& header,
                          const std::vector<std::vector<std::string>>& rows,
                          const std::vector<bool>& right_align) {
    std::vector<std::size_t> width(header.size());
    for (std::size_t c = 0; c < header.size(); ++c) width[c] = header[c].size();
    for (const auto& row : rows)
        for (std::size_t c = 0; c < row.size(); ++c)
            width[c] = std::max(width[c], row[c].size());

    auto emit = [&](const std::vector<std::string>& cells) {
        std::string line;
        for (std::size_t c = 0; c < cells.size(); ++c) {
            if (c) line += "  ";
            const std::size_t pad = width[c] - cells[c].size();
            if (right_align[c]) line += std::string(pad, ' ');
            line += cells[c];
            if (!right_align[c] && c + 1 < cells.size()) line += std::string(pad, ' ');
        }
        while (!line.empty() && line.back() == ' ') line.pop_back();
        line += '\n';
        return line;
    };

    std::string out = emit(header);
    std::string rule;
    for (std::size_t c = 0; c < header.size(); ++c) {
        if (c) rule += "  ";
        rule += std::string(width[c], '-');
    }
    out += rule + "\n";
    for (const auto& row : rows) out += emit(row);
    return out;
}

} // namespace

std::optional<Format> parse_format(std::string_view name) {
    if (name == "table") return Format::Table;
    if (name == "csv") return Format::Csv;
    if (name == "json") return Format::Json;
    return std::nullopt;
}

std::vector<ReportRow> distribution_rows(const ThreatModel& model,
                                         const AttackDistribution& dist) {
    std::vector<ReportRow> rows;
    rows.reserve(dist.rows.size());
    for (const auto& src : dist.rows) {
        ReportRow row;
        row.threat_id = src.threat_id;
        if (const ThreatRecord* threat = model.find_threat(src.threat_id)) {
            row.name = threat->name;
            row.requirement = std::string(to_string(threat->requirement));
        }
        row.weight = src.weight;
        row.alpha = src.alpha;
        row.mu = src.mu;
        row.p_attack = src.p_attack;
        rows.push_back(std::move(row));
    }

    std::vector<std::size_t> order(rows.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (rows[a].p_attack != rows[b].p_attack) return rows[a].p_attack > rows[b].p_attack;
        return natural_id_less(rows[a].threat_id, rows[b].threat_id);
    });
    for (std::size_t pos = 0; pos < order.size(); ++pos)
        rows[order[pos]].rank = static_cast<int>(pos) + 1;
    return rows;
}

std::vector<VulnerabilityPriority> prioritize(const ThreatModel& model,
                                              const AttackDistribution& dist) {
    std::vector<VulnerabilityPriority> out;
    out.reserve(model.vulnerabilities.size());
    for (const auto& vuln : model.vulnerabilities) {
        VulnerabilityPriority p;
        p.vulnerability_id = vuln.id;
        p.name = vuln.name;
        p.score = vuln.resolved_score.value_or(vuln.literal_score.value_or(0.0));

        double attack_mass = 0.0;
        for (const auto& row : dist.rows) {
            const ThreatRecord* threat = model.find_threat(row.threat_id);
            if (!threat) continue;
            if (std::find(threat->exploits.begin(), threat->exploits.end(), vuln.id) !=
                threat->exploits.end()) {
                attack_mass += row.p_attack;
                p.contributing_threats.push_back(row.threat_id);
            }
        }
        std::sort(p.contributing_threats.begin(), p.contributing_threats.end(),
                  natural_id_less);
        p.criticality = p.score * attack_mass;
        out.push_back(std::move(p));
    }
    std::sort(out.begin(), out.end(),
              [](const VulnerabilityPriority& a, const VulnerabilityPriority& b) {
                  if (a.criticality != b.criticality) return a.criticality > b.criticality;
                  return natural_id_less(a.vulnerability_id, b.vulnerability_id);
              });
    return out;
}

std::string render_distribution(const std::vector<ReportRow>& rows,
                                const AttackDistribution& dist, Format format) {
    const double alpha_gap = dist.model_alpha - dist.alpha_sum;
    const bool flag_gap = std::abs(alpha_gap) > 1e-12;

    if (format == Format::Csv) {
        std::string out = csv_line(
            {"id", "name", "requirement", "weight", "alpha", "mu", "p_attack", "rank"});
        for (const auto& r : rows)
            out += csv_line({r.threat_id, r.name, r.requirement, num6(r.weight),
                             sci6(r.alpha), sci6(r.mu), sci6(r.p_attack),
                             std::to_string(r.rank)});
        return out;
    }

    if (format == Format::Json) {
        json doc;
        doc["schema_version"] = 1;
        doc["denominator"] = dist.denominator;
        doc["weight_sum"] = dist.weight_sum;
        doc["alpha"] = dist.model_alpha;
        doc["alpha_sum"] = dist.alpha_sum;
        if (flag_gap) doc["alpha_gap"] = alpha_gap;
        doc["total_p_attack"] = dist.total_p_attack;
        doc["rows"] = json::array();
        for (const auto& r : rows) {
            doc["rows"].push_back({{"id", r.threat_id},
                                   {"name", r.name},
                                   {"requirement", r.requirement},
                                   {"weight", r.weight},
                                   {"alpha", r.alpha},
                                   {"mu", r.mu},
                                   {"p_attack", r.p_attack},
                                   {"rank", r.rank}});
        }
        return doc.dump(2) + "\n";
    }

    std::vector<std::vector<std::string>> cells;
    for (const auto& r : rows)
        cells.push_back({r.threat_id, r.name, r.requirement, num6(r.weight), sci6(r.alpha),
                         sci6(r.mu), sci6(r.p_attack), std::to_string(r.rank)});
    std::string out = aligned_table(
        {"id", "name", "requirement", "weight", "alpha", "mu", "p_attack", "rank"}, cells,
        {false, false, false, true, true, true, true, true});
    out += "\n";
    out += "denominator:    " + num6(dist.denominator) + "\n";
    out += "weight sum:     " + num6(dist.weight_sum) + "\n";
    out += "alpha:          " + num6(dist.model_alpha) + "\n";
    out += "alpha sum:      " + num6(dist.alpha_sum) + "\n";
    if (flag_gap)
        out += "alpha gap:      " + num6(alpha_gap) +
               " (denominator override leaves this much of alpha unassigned)\n";
    out += "total p_attack: " + sci6(dist.total_p_attack) + "\n";
    return out;
}

std::string render_matrix(const TransitionMatrix& matrix, Format format) {
    const auto size = matrix.p.rows();

    if (format == Format::Csv) {
        std::vector<std::string> header{"state"};
        header.insert(header.end(), matrix.states.begin(), matrix.states.end());
        std::string out = csv_line(header);
        for (Eigen::Index i = 0; i < size; ++i) {
            std::vector<std::string> fields{matrix.states[static_cast<std::size_t>(i)]};
            for (Eigen::Index j = 0; j < size; ++j) fields.push_back(exact(matrix.p(i, j)));
            out += csv_line(fields);
        }
        return out;
    }

    if (format == Format::Json) {
        json doc;
        doc["schema_version"] = 1;
        doc["states"] = matrix.states;
        doc["p"] = json::array();
        for (Eigen::Index i = 0; i < size; ++i) {
            json row = json::array();
            for (Eigen::Index j = 0; j < size; ++j) row.push_back(matrix.p(i, j));
            doc["p"].push_back(std::move(row));
        }
        return doc.dump(2) + "\n";
    }

    std::vector<std::string> header{"state"};
    header.insert(header.end(), matrix.states.begin(), matrix.states.end());
    std::vector<std::vector<std::string>> cells;
    for (Eigen::Index i = 0; i < size; ++i) {
        std::vector<std::string> row{matrix.states[static_cast<std::size_t>(i)]};
        for (Eigen::Index j = 0; j < size; ++j) row.push_back(fixed6(matrix.p(i, j)));
        cells.push_back(std::move(row));
    }
    std::vector<bool> align(header.size(), true);
    align[0] = false;
    return aligned_table(header, cells, align);
}

std::string render_simulation(const ComparisonReport& report, Format format) {
    if (format == Format::Csv) {
        std::string out = csv_line({"id", "count", "frequency", "expected", "z"});
        for (const auto& r : report.rows)
            out += csv_line({r.threat_id, std::to_string(r.count), sci6(r.frequency),
                             sci6(r.expected), num6(r.z)});
        return out;
    }

    if (format == Format::Json) {
        json doc;
        doc["schema_version"] = 1;
        doc["absorbed"] = report.absorbed;
        doc["unabsorbed"] = report.unabsorbed;
        doc["chi_square"] = report.chi_square;
        doc["rows"] = json::array();
        for (const auto& r : report.rows)
            doc["rows"].push_back({{"id", r.threat_id},
                                   {"count", r.count},
                                   {"frequency", r.frequency},
                                   {"expected", r.expected},
                                   {"z", r.z}});
        return doc.dump(2) + "\n";
    }

    std::vector<std::vector<std::string>> cells;
    double max_abs_z = 0.0;
    for (const auto& r : report.rows) {
        cells.push_back({r.threat_id, std::to_string(r.count), sci6(r.frequency),
                         sci6(r.expected), num6(r.z)});
        max_abs_z = std::max(max_abs_z, std::abs(r.z));
    }
    std::string out = aligned_table({"id", "count", "frequency", "expected", "z"}, cells,
                                    {false, true, true, true, true});
    out += "\n";
    out += "absorbed:   " + std::to_string(report.absorbed) + "\n";
    out += "unabsorbed: " + std::to_string(report.unabsorbed) + "\n";
    out += "chi-square: " + num6(report.chi_square) + "\n";
    out += "max |z|:    " + num6(max_abs_z) + "\n";
    return out;
}

std::string render_priorities(const std::vector<VulnerabilityPriority>& priorities,
                              Format format) {
    auto join_threats = [](const std::vector<std::string>& ids) {
        std::string joined;
        for (std::size_t i = 0; i < ids.size(); ++i) {
            if (i) joined += ';';
            joined += ids[i];
        }
        return joined;
    };

    if (format == Format::Csv) {
        std::string out = csv_line({"id", "name", "score", "criticality", "threats"});
        for (const auto& p : priorities)
            out += csv_line({p.vulnerability_id, p.name, num6(p.score), sci6(p.criticality),
                             join_threats(p.contributing_threats)});
        return out;
    }

    if (format == Format::Json) {
        json doc;
        doc["schema_version"] = 1;
        doc["rows"] = json::array();
        for (const auto& p : priorities)
            doc["rows"].push_back({{"id", p.vulnerability_id},
                                   {"name", p.name},
                                   {"score", p.score},
                                   {"criticality", p.criticality},
                                   {"threats", p.contributing_threats}});
        return doc.dump(2) + "\n";
    }

    std::vector<std::vector<std::string>> cells;
    for (const auto& p : priorities)
        cells.push_back({p.vulnerability_id, p.name, num6(p.score), sci6(p.criticality),
                         join_threats(p.contributing_threats)});
    return aligned_table({"id", "name", "score", "criticality", "threats"}, cells,
                         {false, false, true, true, false});
}

} // namespace riskchain
