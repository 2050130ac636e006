#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "riskchain/nvd.hpp"

#include "riskchain/cvss.hpp"

#include <httplib.h>
#include <json.hpp>

#include <cstdio>
#include <ctime>
#include <fstream>
#include <regex>
#include <sstream>
#include <thread>

namespace riskchain {

using json = nlohmann::json;

namespace {

std::string utc_now_iso8601() {
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

// Picks the metric entry to score from: v3.1 before v3.0, and within a
// version the Primary source before any other.
const json* select_v3_metric(const json& metrics) {
    for (const char* key : {"cvssMetricV31", "cvssMetricV30"}) {
        auto it = metrics.find(key);
        if (it == metrics.end() || !it->is_array() || it->empty()) continue;
        for (const auto& entry : *it)
            if (entry.value("type", "") == "Primary") return &entry;
        return &(*it)[0];
    }
    return nullptr;
}

} // namespace

FixtureTransport::FixtureTransport(std::filesystem::path directory)
    : directory_(std::move(directory)) {}

std::string FixtureTransport::get(const std::string& cve_id) {
    const std::filesystem::path path = directory_ / (cve_id + ".json");
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw NvdError(NvdError::Code::NotFound,
                       "no fixture for " + cve_id + " at " + path.string());
    std::ostringstream body;
    body << in.rdbuf();
    return body.str();
}

LiveTransport::LiveTransport(std::string base_url, std::string api_key, long min_interval_ms)
    : base_url_(std::move(base_url)), api_key_(std::move(api_key)),
      min_interval_ms_(min_interval_ms) {}

std::string LiveTransport::get(const std::string& cve_id) {
    std::lock_guard<std::mutex> lock(gate_);
    const auto now = std::chrono::steady_clock::now();
    if (last_request_.time_since_epoch().count() != 0) {
        const auto earliest = last_request_ + std::chrono::milliseconds(min_interval_ms_);
        if (now < earliest) std::this_thread::sleep_until(earliest);
    }
    last_request_ = std::chrono::steady_clock::now();

    httplib::Client client(base_url_);
    client.set_connection_timeout(10, 0);
    client.set_read_timeout(30, 0);
    httplib::Headers headers;
    if (!api_key_.empty()) headers.emplace("apiKey", api_key_);

    auto res = client.Get("/rest/json/cves/2.0?cveId=" + cve_id, headers);
    if (!res)
        throw NvdError(NvdError::Code::Transport,
                       "request for " + cve_id + " failed: " + httplib::to_string(res.error()));
    if (res->status == 403 || res->status == 429) {
        std::optional<long> retry_after;
        if (res->has_header("Retry-After"))
            retry_after = std::strtol(res->get_header_value("Retry-After").c_str(), nullptr, 10);
        throw NvdError(NvdError::Code::RateLimited,
                       "rate limited fetching " + cve_id, retry_after);
    }
    if (res->status == 404)
        throw NvdError(NvdError::Code::NotFound, cve_id + " not found");
    if (res->status != 200)
        throw NvdError(NvdError::Code::Transport,
                       "unexpected status " + std::to_string(res->status) + " for " + cve_id);
    return res->body;
}

NvdClient::NvdClient(std::shared_ptr<Transport> transport)
    : transport_(std::move(transport)) {}

CveRecord NvdClient::fetch_cve(const std::string& cve_id) {
    static const std::regex pattern("^CVE-[0-9]{4}-[0-9]{4,}$");
    if (!std::regex_match(cve_id, pattern))
        throw NvdError(NvdError::Code::BadCveId,
                       "\"" + cve_id + "\" is not a well-formed CVE id");

    const std::string body = transport_->get(cve_id);
    json root;
    try {
        root = json::parse(body);
    } catch (const json::parse_error& e) {
        throw NvdError(NvdError::Code::MalformedResponse,
                       "response for " + cve_id + " is not JSON: " + e.what());
    }

    if (root.value("totalResults", -1) == 0)
        throw NvdError(NvdError::Code::NotFound, cve_id + " matched no records");
    const json* cve = nullptr;
    if (auto vulns = root.find("vulnerabilities");
        vulns != root.end() && vulns->is_array() && !vulns->empty())
        cve = &(*vulns)[0].at("cve");
    if (!cve)
        throw NvdError(NvdError::Code::MalformedResponse,
                       "response for " + cve_id + " carries no vulnerability entry");

    auto metrics = cve->find("metrics");
    const json* metric = metrics != cve->end() ? select_v3_metric(*metrics) : nullptr;
    if (!metric)
        throw NvdError(NvdError::Code::NoV3Metrics,
                       cve_id + " has no CVSS v3.x metrics");

    CveRecord record;
    record.cve_id = cve_id;
    try {
        const json& data = metric->at("cvssData");
        record.vector = data.at("vectorString").get<std::string>();
        record.base_score_published = data.at("baseScore").get<double>();
    } catch (const json::exception& e) {
        throw NvdError(NvdError::Code::MalformedResponse,
                       "metric data for " + cve_id + " is incomplete: " + e.what());
    }
    try {
        cvss::parse_vector(record.vector);
    } catch (const cvss::ParseError& e) {
        throw NvdError(NvdError::Code::MalformedResponse,
                       "vector for " + cve_id + " does not parse: " + e.what());
    }
    record.fetched_at = utc_now_iso8601();
    return record;
}

ThreatModel hydrate_model(const ThreatModel& model,
                          const std::map<std::string, std::string>& cve_by_vulnerability,
                          NvdClient& client) {
    ThreatModel out = model;
    for (const auto& [vuln_id, cve_id] : cve_by_vulnerability) {
        VulnerabilityRecord* target = nullptr;
        for (auto& v : out.vulnerabilities)
            if (v.id == vuln_id) target = &v;
        if (!target)
            throw ModelError("reference", vuln_id,
                             "mapping names undeclared vulnerability \"" + vuln_id + "\"");

        CveRecord record;
        try {
            record = client.fetch_cve(cve_id);
        } catch (const NvdError& e) {
            throw NvdError(e.code(), vuln_id + ": " + e.what(), e.retry_after_seconds());
        }
        target->cvss_vector = record.vector;
        target->literal_score.reset();
        target->resolved_score.reset();
        target->provenance = Provenance{record.cve_id, record.fetched_at};
    }
    return resolve_scores(out);
}

} // namespace riskchain
