#pragma once
// Threat-model schema: vulnerabilities, threats, global chain parameters,
// document loading/validation and score resolution.

#include <filesystem>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace riskchain {

enum class Stride {
    Spoofing,
    Tampering,
    Repudiation,
    InformationDisclosure,
    DenialOfService,
    ElevationOfPrivilege,
};

enum class Requirement {
    Confidentiality,
    Integrity,
    Authentication,
    Authorization,
    Availability,
};

enum class MuMode { Uniform, Proportional };

std::string_view to_string(Stride s);
std::string_view to_string(Requirement r);
std::string_view to_string(MuMode m);

// Where a hydrated CVSS vector came from.
struct Provenance {
    std::string cve_id;
    std::string fetched_at;

    bool operator==(const Provenance&) const = default;
};

struct VulnerabilityRecord {
    std::string id;
    std::string name;
    std::optional<double> literal_score;      // exactly one of these two
    std::optional<std::string> cvss_vector;   // is present in a loaded model
    std::optional<double> resolved_score;     // filled in by resolve_scores
    std::optional<Provenance> provenance;

    bool operator==(const VulnerabilityRecord&) const = default;
};

struct ThreatRecord {
    std::string id;
    std::string name;
    Stride stride = Stride::Spoofing;
    Requirement requirement = Requirement::Confidentiality;
    std::vector<std::string> exploits;   // deduplicated, source order
    std::string note;                    // optional free-form annotation

    bool operator==(const ThreatRecord&) const = default;
};

struct ThreatModel {
    double alpha = 0.0;                         // total S->threats probability, (0,1)
    double mu = 0.0;                            // threat->attack parameter, (0,1]
    MuMode mu_mode = MuMode::Uniform;
    std::optional<double> denominator_override; // fixed weight denominator, if any
    std::vector<VulnerabilityRecord> vulnerabilities;
    std::vector<ThreatRecord> threats;

    const VulnerabilityRecord* find_vulnerability(std::string_view id) const;
    const ThreatRecord* find_threat(std::string_view id) const;

    bool operator==(const ThreatModel&) const = default;
};

struct Diagnostic {
    std::string code;      // "syntax", "schema", "reference", "range", ...
    std::string message;
    std::string location;  // document path, e.g. "threats[2].exploits[1]"
};

struct ModelDiagnostics {
    std::vector<Diagnostic> errors;
    std::vector<Diagnostic> warnings;

    bool ok() const { return errors.empty(); }
};

struct LoadResult {
    ThreatModel model;
    ModelDiagnostics diagnostics;

    bool ok() const { return diagnostics.ok(); }
};

// Thrown when an operation cannot use the model as given; `code` mirrors the
// diagnostic codes ("cvss" for score resolution, "reference" for bad ids).
class ModelError : public std::runtime_error {
public:
    ModelError(std::string code, std::string subject, const std::string& message);

    const std::string& code() const { return code_; }
    const std::string& subject() const { return subject_; }

private:
    std::string code_;
    std::string subject_;
};

// Parses and validates a model document (see README for the schema). All
// content problems are reported through diagnostics rather than exceptions;
// a model with any error diagnostic must not be fed to the engine.
LoadResult load_model(std::string_view document);
LoadResult load_model_file(const std::filesystem::path& path);

// Canonical JSON serialization; load_model(serialize_model(m)) reproduces m.
std::string serialize_model(const ThreatModel& model);

// Returns base score for a CVSS vector string; throws on invalid input.
using CvssScorer = std::function<double(const std::string&)>;

// Copies the model with every vulnerability's resolved_score populated:
// literal scores pass through, vector-sourced ones go through `scorer`
// (defaults to the bundled CVSS implementation). Throws ModelError("cvss")
// naming the vulnerability when a vector fails to parse or score.
ThreatModel resolve_scores(const ThreatModel& model, const CvssScorer& scorer = {});

// Orders identifiers like V2 < V10 by comparing digit runs numerically.
bool natural_id_less(std::string_view a, std::string_view b);

} // namespace riskchain
