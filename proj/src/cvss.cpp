#include "riskchain/cvss.hpp"

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <sstream>

namespace riskchain::cvss {

namespace {

const char* code_name(ParseErrorCode code) {
    switch (code) {
    case ParseErrorCode::MissingPrefix: return "MissingPrefix";
    case ParseErrorCode::UnknownMetric: return "UnknownMetric";
    case ParseErrorCode::DuplicateMetric: return "DuplicateMetric";
    case ParseErrorCode::MissingMandatoryMetric: return "MissingMandatoryMetric";
    case ParseErrorCode::InvalidValue: return "InvalidValue";
    }
    return "ParseError";
}

std::string describe(ParseErrorCode code, const std::string& token, std::size_t offset) {
    std::ostringstream oss;
    oss << code_name(code) << ": '" << token << "' at byte " << offset;
    return oss.str();
}

// Temporal and environmental metric keys are accepted and skipped.
constexpr std::array<std::string_view, 14> kOptionalKeys = {
    "E", "RL", "RC", "CR", "IR", "AR",
    "MAV", "MAC", "MPR", "MUI", "MS", "MC", "MI", "MA",
};

bool is_optional_key(std::string_view key) {
    for (auto k : kOptionalKeys)
        if (k == key) return true;
    return false;
}

struct MetricSlot {
    std::string_view key;
    std::string_view values;   // one char per accepted value, in declaration order
    bool seen = false;
    int choice = -1;
};

} // namespace

ParseError::ParseError(ParseErrorCode code, std::string token, std::size_t offset)
    : std::runtime_error(describe(code, token, offset)),
      code_(code), token_(std::move(token)), offset_(offset) {}

Vector parse_vector(std::string_view text, std::vector<std::string>* ignored) {
    constexpr std::string_view kPrefix31 = "CVSS:3.1/";
    constexpr std::string_view kPrefix30 = "CVSS:3.0/";

    std::size_t pos = 0;
    if (text.starts_with(kPrefix31) || text.starts_with(kPrefix30)) {
        pos = kPrefix31.size();
    } else {
        auto head = text.substr(0, text.find('/'));
        throw ParseError(ParseErrorCode::MissingPrefix, std::string(head), 0);
    }

    std::array<MetricSlot, 8> slots = {{
        {"AV", "NALP"}, {"AC", "LH"}, {"PR", "NLH"}, {"UI", "NR"},
        {"S", "UC"}, {"C", "NLH"}, {"I", "NLH"}, {"A", "NLH"},
    }};
    std::vector<std::string> seen_optional;

    while (pos <= text.size()) {
        std::size_t end = text.find('/', pos);
        if (end == std::string_view::npos) end = text.size();
        std::string_view token = text.substr(pos, end - pos);
        if (token.empty()) {
            if (pos >= text.size()) break; // trailing end, nothing left
            throw ParseError(ParseErrorCode::InvalidValue, std::string(token), pos);
        }
        std::size_t colon = token.find(':');
        if (colon == std::string_view::npos || colon == 0 || colon + 1 >= token.size())
            throw ParseError(ParseErrorCode::InvalidValue, std::string(token), pos);
        std::string_view key = token.substr(0, colon);
        std::string_view value = token.substr(colon + 1);

        bool matched = false;
        for (auto& slot : slots) {
            if (slot.key != key) continue;
            if (slot.seen)
                throw ParseError(ParseErrorCode::DuplicateMetric, std::string(key), pos);
            auto idx = value.size() == 1 ? slot.values.find(value[0]) : std::string_view::npos;
            if (idx == std::string_view::npos)
                throw ParseError(ParseErrorCode::InvalidValue, std::string(token), pos);
            slot.seen = true;
            slot.choice = static_cast<int>(idx);
            matched = true;
            break;
        }
        if (!matched) {
            if (!is_optional_key(key))
                throw ParseError(ParseErrorCode::UnknownMetric, std::string(key), pos);
            for (const auto& prev : seen_optional)
                if (prev == key)
                    throw ParseError(ParseErrorCode::DuplicateMetric, std::string(key), pos);
            seen_optional.emplace_back(key);
            if (ignored) ignored->emplace_back(key);
        }
        pos = end + 1;
    }

    for (const auto& slot : slots)
        if (!slot.seen)
            throw ParseError(ParseErrorCode::MissingMandatoryMetric,
                             std::string(slot.key), text.size());

    Vector v;
    v.attack_vector = static_cast<AttackVector>(slots[0].choice);
    v.attack_complexity = static_cast<AttackComplexity>(slots[1].choice);
    v.privileges_required = static_cast<PrivilegesRequired>(slots[2].choice);
    v.user_interaction = static_cast<UserInteraction>(slots[3].choice);
    v.scope = static_cast<Scope>(slots[4].choice);
    v.confidentiality = static_cast<ImpactLevel>(slots[5].choice);
    v.integrity = static_cast<ImpactLevel>(slots[6].choice);
    v.availability = static_cast<ImpactLevel>(slots[7].choice);
    return v;
}

std::string canonical_string(const Vector& v) {
    static constexpr std::array<char, 4> av = {'N', 'A', 'L', 'P'};
    static constexpr std::array<char, 2> ac = {'L', 'H'};
    static constexpr std::array<char, 3> pr = {'N', 'L', 'H'};
    static constexpr std::array<char, 2> ui = {'N', 'R'};
    static constexpr std::array<char, 2> sc = {'U', 'C'};
    static constexpr std::array<char, 3> cia = {'N', 'L', 'H'};

    std::string out = "CVSS:3.1/AV:";
    out += av[static_cast<int>(v.attack_vector)];
    out += "/AC:";
    out += ac[static_cast<int>(v.attack_complexity)];
    out += "/PR:";
    out += pr[static_cast<int>(v.privileges_required)];
    out += "/UI:";
    out += ui[static_cast<int>(v.user_interaction)];
    out += "/S:";
    out += sc[static_cast<int>(v.scope)];
    out += "/C:";
    out += cia[static_cast<int>(v.confidentiality)];
    out += "/I:";
    out += cia[static_cast<int>(v.integrity)];
    out += "/A:";
    out += cia[static_cast<int>(v.availability)];
    return out;
}

double round_up1(double x) {
    if (!std::isfinite(x))
        throw std::domain_error("round_up1: non-finite input");
    const std::int64_t scaled = std::llround(x * 100000.0);
    if (scaled % 10000 == 0)
        return static_cast<double>(scaled) / 100000.0;
    return static_cast<double>(scaled / 10000 + 1) / 10.0;
}

Scores score_vector(const Vector& v) {
    static constexpr std::array<double, 4> av = {0.85, 0.62, 0.55, 0.2};
    static constexpr std::array<double, 2> ac = {0.77, 0.44};
    static constexpr std::array<double, 3> pr_unchanged = {0.85, 0.62, 0.27};
    static constexpr std::array<double, 3> pr_changed = {0.85, 0.68, 0.5};
    static constexpr std::array<double, 2> ui = {0.85, 0.62};
    static constexpr std::array<double, 3> cia = {0.0, 0.22, 0.56};

    const bool changed = v.scope == Scope::Changed;
    const auto& pr = changed ? pr_changed : pr_unchanged;

    const double exploitability = 8.22
        * av[static_cast<int>(v.attack_vector)]
        * ac[static_cast<int>(v.attack_complexity)]
        * pr[static_cast<int>(v.privileges_required)]
        * ui[static_cast<int>(v.user_interaction)];

    const double iss = 1.0
        - (1.0 - cia[static_cast<int>(v.confidentiality)])
        * (1.0 - cia[static_cast<int>(v.integrity)])
        * (1.0 - cia[static_cast<int>(v.availability)]);

    const double impact_raw = changed
        ? 7.52 * (iss - 0.029) - 3.25 * std::pow(iss - 0.02, 15.0)
        : 6.42 * iss;

    Scores s;
    s.exploitability = exploitability;
    s.impact = std::max(0.0, impact_raw);
    if (impact_raw <= 0.0) {
        s.base = 0.0;
    } else {
        const double raw = changed ? 1.08 * (impact_raw + exploitability)
                                   : impact_raw + exploitability;
        s.base = round_up1(std::min(raw, 10.0));
    }
    return s;
}

double base_score(std::string_view vector_text) {
    return score_vector(parse_vector(vector_text)).base;
}

} // namespace riskchain::cvss
