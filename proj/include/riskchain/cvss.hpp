#pragma once
// CVSS v3.1 base-vector parsing and scoring.

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace riskchain::cvss {

enum class AttackVector { Network, Adjacent, Local, Physical };
enum class AttackComplexity { Low, High };
enum class PrivilegesRequired { None, Low, High };
enum class UserInteraction { None, Required };
enum class Scope { Unchanged, Changed };
enum class ImpactLevel { None, Low, High };

// The eight mandatory base metrics of a v3.x vector.
struct Vector {
    AttackVector attack_vector = AttackVector::Network;
    AttackComplexity attack_complexity = AttackComplexity::Low;
    PrivilegesRequired privileges_required = PrivilegesRequired::None;
    UserInteraction user_interaction = UserInteraction::None;
    Scope scope = Scope::Unchanged;
    ImpactLevel confidentiality = ImpactLevel::None;
    ImpactLevel integrity = ImpactLevel::None;
    ImpactLevel availability = ImpactLevel::None;

    bool operator==(const Vector&) const = default;
};

struct Scores {
    double exploitability = 0.0; // raw subscore, 8.22 * AV * AC * PR * UI
    double impact = 0.0;         // raw subscore, clamped at 0
    double base = 0.0;           // rounded up to one decimal place
};

enum class ParseErrorCode {
    MissingPrefix,
    UnknownMetric,
    DuplicateMetric,
    MissingMandatoryMetric,
    InvalidValue,
};

class ParseError : public std::runtime_error {
public:
    ParseError(ParseErrorCode code, std::string token, std::size_t offset);

    ParseErrorCode code() const { return code_; }
    const std::string& token() const { return token_; }
    std::size_t offset() const { return offset_; }

private:
    ParseErrorCode code_;
    std::string token_;
    std::size_t offset_;
};

// Parses a CVSS v3.0 or v3.1 base vector. Metric keys and values are
// case-sensitive. Recognized temporal/environmental metrics are skipped; their
// keys are appended to `ignored` when a sink is supplied. Throws ParseError.
Vector parse_vector(std::string_view text, std::vector<std::string>* ignored = nullptr);

// Canonical form: "CVSS:3.1/" prefix, metrics in the order AV,AC,PR,UI,S,C,I,A.
std::string canonical_string(const Vector& v);

// Smallest one-decimal value >= x, computed on round(x*100000) so that
// floating-point representation noise cannot flip the rounding direction.
// Requires x >= 0; throws std::domain_error for non-finite input.
double round_up1(double x);

Scores score_vector(const Vector& v);

// parse + score + base in one call.
double base_score(std::string_view vector_text);

} // namespace riskchain::cvss
