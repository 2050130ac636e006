#include "riskchain/model.hpp"

#include "riskchain/cvss.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>
#include <utility>

namespace riskchain {

using json = nlohmann::ordered_json;

namespace {

constexpr std::pair<Stride, std::string_view> kStrides[] = {
    {Stride::Spoofing, "spoofing"},
    {Stride::Tampering, "tampering"},
    {Stride::Repudiation, "repudiation"},
    {Stride::InformationDisclosure, "information_disclosure"},
    {Stride::DenialOfService, "denial_of_service"},
    {Stride::ElevationOfPrivilege, "elevation_of_privilege"},
};

constexpr std::pair<Requirement, std::string_view> kRequirements[] = {
    {Requirement::Confidentiality, "confidentiality"},
    {Requirement::Integrity, "integrity"},
    {Requirement::Authentication, "authentication"},
    {Requirement::Authorization, "authorization"},
    {Requirement::Availability, "availability"},
};

template <typename Enum, std::size_t N>
std::optional<Enum> enum_from(const std::pair<Enum, std::string_view> (&table)[N],
                              std::string_view text) {
    for (const auto& [value, name] : table)
        if (name == text) return value;
    return std::nullopt;
}

class Collector {
public:
    explicit Collector(ModelDiagnostics& sink) : sink_(sink) {}

    void error(std::string code, std::string location, std::string message) {
        sink_.errors.push_back({std::move(code), std::move(message), std::move(location)});
    }
    void warning(std::string code, std::string location, std::string message) {
        sink_.warnings.push_back({std::move(code), std::move(message), std::move(location)});
    }

private:
    ModelDiagnostics& sink_;
};

void check_keys(const json& obj, std::initializer_list<std::string_view> allowed,
                const std::string& location, Collector& diag) {
    for (const auto& [key, value] : obj.items()) {
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
            diag.error("schema", location.empty() ? key : location + "." + key,
                       "unknown key \"" + key + "\"");
    }
}

const json* require(const json& obj, const char* key, const std::string& location,
                    Collector& diag) {
    auto it = obj.find(key);
    if (it == obj.end()) {
        diag.error("schema", location.empty() ? key : location + "." + key,
                   std::string("missing required key \"") + key + "\"");
        return nullptr;
    }
    return &*it;
}

std::optional<std::string> get_string(const json& value, const std::string& location,
                                      Collector& diag) {
    if (!value.is_string()) {
        diag.error("schema", location, "expected a string");
        return std::nullopt;
    }
    return value.get<std::string>();
}

std::optional<double> get_number(const json& value, const std::string& location,
                                 Collector& diag) {
    if (!value.is_number()) {
        diag.error("schema", location, "expected a number");
        return std::nullopt;
    }
    return value.get<double>();
}

void parse_vulnerability(const json& node, std::size_t index, ThreatModel& model,
                         Collector& diag) {
    std::string loc = "vulnerabilities[" + std::to_string(index) + "]";
    if (!node.is_object()) {
        diag.error("schema", loc, "expected an object");
        return;
    }
    check_keys(node, {"id", "name", "score", "cvss_vector", "provenance"}, loc, diag);

    VulnerabilityRecord rec;
    if (const json* id = require(node, "id", loc, diag)) {
        auto s = get_string(*id, loc + ".id", diag);
        if (!s || s->empty()) {
            if (s) diag.error("schema", loc + ".id", "identifier must be non-empty");
            return;
        }
        rec.id = *s;
    } else {
        return;
    }
    if (const json* name = require(node, "name", loc, diag)) {
        if (auto s = get_string(*name, loc + ".name", diag)) rec.name = *s;
    }

    const bool has_score = node.contains("score");
    const bool has_vector = node.contains("cvss_vector");
    if (has_score == has_vector) {
        diag.error("schema", loc,
                   "exactly one of \"score\" and \"cvss_vector\" must be present");
    } else if (has_score) {
        if (auto v = get_number(node["score"], loc + ".score", diag)) {
            if (*v < 0.0 || *v > 10.0)
                diag.error("range", loc + ".score", "score must lie in [0, 10]");
            else
                rec.literal_score = *v;
        }
    } else {
        if (auto s = get_string(node["cvss_vector"], loc + ".cvss_vector", diag)) {
            if (s->empty())
                diag.error("schema", loc + ".cvss_vector", "vector must be non-empty");
            else
                rec.cvss_vector = *s;
        }
    }

    if (auto it = node.find("provenance"); it != node.end()) {
        std::string ploc = loc + ".provenance";
        if (!it->is_object()) {
            diag.error("schema", ploc, "expected an object");
        } else {
            check_keys(*it, {"cve_id", "fetched_at"}, ploc, diag);
            Provenance prov;
            if (const json* cve = require(*it, "cve_id", ploc, diag))
                if (auto s = get_string(*cve, ploc + ".cve_id", diag)) prov.cve_id = *s;
            if (const json* at = require(*it, "fetched_at", ploc, diag))
                if (auto s = get_string(*at, ploc + ".fetched_at", diag)) prov.fetched_at = *s;
            rec.provenance = std::move(prov);
        }
    }

    model.vulnerabilities.push_back(std::move(rec));
}

void parse_threat(const json& node, std::size_t index, ThreatModel& model, Collector& diag) {
    std::string loc = "threats[" + std::to_string(index) + "]";
    if (!node.is_object()) {
        diag.error("schema", loc, "expected an object");
        return;
    }
    check_keys(node, {"id", "name", "stride", "requirement", "exploits", "note"}, loc, diag);

    ThreatRecord rec;
    if (const json* id = require(node, "id", loc, diag)) {
        auto s = get_string(*id, loc + ".id", diag);
        if (!s || s->empty()) {
            if (s) diag.error("schema", loc + ".id", "identifier must be non-empty");
            return;
        }
        rec.id = *s;
    } else {
        return;
    }
    if (const json* name = require(node, "name", loc, diag)) {
        if (auto s = get_string(*name, loc + ".name", diag)) rec.name = *s;
    }
    if (const json* stride = require(node, "stride", loc, diag)) {
        if (auto s = get_string(*stride, loc + ".stride", diag)) {
            if (auto e = enum_from(kStrides, *s))
                rec.stride = *e;
            else
                diag.error("schema", loc + ".stride", "unknown STRIDE category \"" + *s + "\"");
        }
    }
    if (const json* req = require(node, "requirement", loc, diag)) {
        if (auto s = get_string(*req, loc + ".requirement", diag)) {
            if (auto e = enum_from(kRequirements, *s))
                rec.requirement = *e;
            else
                diag.error("schema", loc + ".requirement",
                           "unknown security requirement \"" + *s + "\"");
        }
    }
    if (const json* exploits = require(node, "exploits", loc, diag)) {
        if (!exploits->is_array()) {
            diag.error("schema", loc + ".exploits", "expected an array");
        } else if (exploits->empty()) {
            diag.error("schema", loc + ".exploits",
                       "threat \"" + rec.id + "\" must exploit at least one vulnerability");
        } else {
            for (std::size_t j = 0; j < exploits->size(); ++j) {
                std::string eloc = loc + ".exploits[" + std::to_string(j) + "]";
                auto s = get_string((*exploits)[j], eloc, diag);
                if (!s) continue;
                if (std::find(rec.exploits.begin(), rec.exploits.end(), *s) !=
                    rec.exploits.end()) {
                    diag.warning("duplicate-exploit", eloc,
                                 "vulnerability \"" + *s + "\" listed more than once; ignored");
                } else {
                    rec.exploits.push_back(*s);
                }
            }
        }
    }
    if (auto it = node.find("note"); it != node.end()) {
        if (auto s = get_string(*it, loc + ".note", diag)) rec.note = *s;
    }

    model.threats.push_back(std::move(rec));
}

void cross_validate(ThreatModel& model, Collector& diag) {
    std::set<std::string> vuln_ids;
    for (std::size_t i = 0; i < model.vulnerabilities.size(); ++i) {
        const auto& id = model.vulnerabilities[i].id;
        if (!vuln_ids.insert(id).second)
            diag.error("schema", "vulnerabilities[" + std::to_string(i) + "].id",
                       "duplicate vulnerability id \"" + id + "\"");
    }
    std::set<std::string> threat_ids;
    for (std::size_t i = 0; i < model.threats.size(); ++i) {
        const auto& id = model.threats[i].id;
        if (!threat_ids.insert(id).second)
            diag.error("schema", "threats[" + std::to_string(i) + "].id",
                       "duplicate threat id \"" + id + "\"");
    }

    std::set<std::string> referenced;
    for (std::size_t i = 0; i < model.threats.size(); ++i) {
        const auto& threat = model.threats[i];
        for (std::size_t j = 0; j < threat.exploits.size(); ++j) {
            const auto& ref = threat.exploits[j];
            if (!vuln_ids.count(ref)) {
                diag.error("reference",
                           "threats[" + std::to_string(i) + "].exploits[" + std::to_string(j) +
                               "]",
                           "threat \"" + threat.id + "\" references undeclared vulnerability \"" +
                               ref + "\"");
            } else {
                referenced.insert(ref);
            }
        }
    }
    for (std::size_t i = 0; i < model.vulnerabilities.size(); ++i) {
        const auto& vuln = model.vulnerabilities[i];
        if (!referenced.count(vuln.id))
            diag.warning("unused-vulnerability", "vulnerabilities[" + std::to_string(i) + "]",
                         "vulnerability \"" + vuln.id + "\" is not exploited by any threat");
    }
}

} // namespace

std::string_view to_string(Stride s) {
    for (const auto& [value, name] : kStrides)
        if (value == s) return name;
    return "?";
}

std::string_view to_string(Requirement r) {
    for (const auto& [value, name] : kRequirements)
        if (value == r) return name;
    return "?";
}

std::string_view to_string(MuMode m) {
    return m == MuMode::Uniform ? "uniform" : "proportional";
}

const VulnerabilityRecord* ThreatModel::find_vulnerability(std::string_view id) const {
    for (const auto& v : vulnerabilities)
        if (v.id == id) return &v;
    return nullptr;
}

const ThreatRecord* ThreatModel::find_threat(std::string_view id) const {
    for (const auto& t : threats)
        if (t.id == id) return &t;
    return nullptr;
}

ModelError::ModelError(std::string code, std::string subject, const std::string& message)
    : std::runtime_error(message), code_(std::move(code)), subject_(std::move(subject)) {}

LoadResult load_model(std::string_view document) {
    LoadResult result;
    Collector diag(result.diagnostics);

    json root;
    try {
        root = json::parse(document);
    } catch (const json::parse_error& e) {
        diag.error("syntax", "", e.what());
        return result;
    }
    if (!root.is_object()) {
        diag.error("schema", "", "top-level value must be an object");
        return result;
    }

    check_keys(root,
               {"alpha", "mu", "mu_mode", "denominator_override", "vulnerabilities", "threats"},
               "", diag);

    ThreatModel& model = result.model;
    if (const json* alpha = require(root, "alpha", "", diag)) {
        if (auto v = get_number(*alpha, "alpha", diag)) {
            if (*v <= 0.0 || *v >= 1.0)
                diag.error("range", "alpha", "alpha must lie strictly inside (0, 1)");
            else
                model.alpha = *v;
        }
    }
    if (const json* mu = require(root, "mu", "", diag)) {
        if (auto v = get_number(*mu, "mu", diag)) {
            if (*v <= 0.0 || *v > 1.0)
                diag.error("range", "mu", "mu must lie in (0, 1]");
            else
                model.mu = *v;
        }
    }
    if (auto it = root.find("mu_mode"); it != root.end()) {
        if (auto s = get_string(*it, "mu_mode", diag)) {
            if (*s == "uniform")
                model.mu_mode = MuMode::Uniform;
            else if (*s == "proportional")
                model.mu_mode = MuMode::Proportional;
            else
                diag.error("schema", "mu_mode",
                           "mu_mode must be \"uniform\" or \"proportional\"");
        }
    }
    if (auto it = root.find("denominator_override"); it != root.end() && !it->is_null()) {
        if (auto v = get_number(*it, "denominator_override", diag)) {
            if (*v <= 0.0)
                diag.error("range", "denominator_override",
                           "denominator_override must be positive");
            else
                model.denominator_override = *v;
        }
    }

    if (const json* vulns = require(root, "vulnerabilities", "", diag)) {
        if (!vulns->is_array())
            diag.error("schema", "vulnerabilities", "expected an array");
        else
            for (std::size_t i = 0; i < vulns->size(); ++i)
                parse_vulnerability((*vulns)[i], i, model, diag);
    }
    if (const json* threats = require(root, "threats", "", diag)) {
        if (!threats->is_array())
            diag.error("schema", "threats", "expected an array");
        else
            for (std::size_t i = 0; i < threats->size(); ++i)
                parse_threat((*threats)[i], i, model, diag);
    }

    cross_validate(model, diag);
    return result;
}

LoadResult load_model_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        LoadResult result;
        result.diagnostics.errors.push_back(
            {"io", "cannot open \"" + path.string() + "\"", path.string()});
        return result;
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return load_model(buffer.str());
}

std::string serialize_model(const ThreatModel& model) {
    json root;
    root["alpha"] = model.alpha;
    root["mu"] = model.mu;
    root["mu_mode"] = std::string(to_string(model.mu_mode));
    if (model.denominator_override)
        root["denominator_override"] = *model.denominator_override;
    else
        root["denominator_override"] = nullptr;

    json vulns = json::array();
    for (const auto& v : model.vulnerabilities) {
        json node;
        node["id"] = v.id;
        node["name"] = v.name;
        if (v.cvss_vector)
            node["cvss_vector"] = *v.cvss_vector;
        else if (v.literal_score)
            node["score"] = *v.literal_score;
        if (v.provenance) {
            node["provenance"] = {{"cve_id", v.provenance->cve_id},
                                  {"fetched_at", v.provenance->fetched_at}};
        }
        vulns.push_back(std::move(node));
    }
    root["vulnerabilities"] = std::move(vulns);

    json threats = json::array();
    for (const auto& t : model.threats) {
        json node;
        node["id"] = t.id;
        node["name"] = t.name;
        node["stride"] = std::string(to_string(t.stride));
        node["requirement"] = std::string(to_string(t.requirement));
        node["exploits"] = t.exploits;
        if (!t.note.empty()) node["note"] = t.note;
        threats.push_back(std::move(node));
    }
    root["threats"] = std::move(threats);

    return root.dump(2) + "\n";
}

ThreatModel resolve_scores(const ThreatModel& model, const CvssScorer& scorer) {
    CvssScorer score = scorer;
    if (!score)
        score = [](const std::string& vector) { return cvss::base_score(vector); };

    ThreatModel out = model;
    for (auto& vuln : out.vulnerabilities) {
        if (vuln.literal_score) {
            vuln.resolved_score = *vuln.literal_score;
            continue;
        }
        if (!vuln.cvss_vector)
            throw ModelError("cvss", vuln.id,
                             "vulnerability \"" + vuln.id + "\" has no score source");
        double value = 0.0;
        try {
            value = score(*vuln.cvss_vector);
        } catch (const std::exception& e) {
            throw ModelError("cvss", vuln.id,
                             "vulnerability \"" + vuln.id + "\": " + e.what());
        }
        if (!(value >= 0.0 && value <= 10.0))
            throw ModelError("range", vuln.id,
                             "vulnerability \"" + vuln.id + "\" scored outside [0, 10]");
        vuln.resolved_score = value;
    }
    return out;
}

bool natural_id_less(std::string_view a, std::string_view b) {
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        const char ca = a[i], cb = b[j];
        const bool da = ca >= '0' && ca <= '9';
        const bool db = cb >= '0' && cb <= '9';
        if (da && db) {
            std::size_t ia = i, jb = j;
            while (ia < a.size() && a[ia] >= '0' && a[ia] <= '9') ++ia;
            while (jb < b.size() && b[jb] >= '0' && b[jb] <= '9') ++jb;
            unsigned long long va = 0, vb = 0;
            std::from_chars(a.data() + i, a.data() + ia, va);
            std::from_chars(b.data() + j, b.data() + jb, vb);
            if (va != vb) return va < vb;
            if (ia - i != jb - j) return ia - i < jb - j;
            i = ia;
            j = jb;
            continue;
        }
        if (ca != cb) return ca < cb;
        ++i;
        ++j;
    }
    return a.size() - i < b.size() - j;
}

} // namespace riskchain
