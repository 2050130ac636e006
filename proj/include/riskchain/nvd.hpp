#pragma once
// CVE record retrieval for model hydration: a live NVD REST client plus an
// offline fixture transport so tests never touch the network.

#include "riskchain/model.hpp"

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>

namespace riskchain {

struct CveRecord {
    std::string cve_id;
    std::string vector;               // CVSS v3.x vector string
    double base_score_published = 0;  // score as published alongside the vector
    std::string fetched_at;           // ISO-8601 UTC
};

class NvdError : public std::runtime_error {
public:
    enum class Code {
        BadCveId,
        NotFound,
        RateLimited,
        MalformedResponse,
        NoV3Metrics,
        Transport,
    };

    NvdError(Code code, const std::string& message,
             std::optional<long> retry_after_seconds = std::nullopt)
        : std::runtime_error(message), code_(code), retry_after_(retry_after_seconds) {}

    Code code() const { return code_; }
    std::optional<long> retry_after_seconds() const { return retry_after_; }

private:
    Code code_;
    std::optional<long> retry_after_;
};

// Fetches the raw response body for one CVE id.
class Transport {
public:
    virtual ~Transport() = default;
    virtual std::string get(const std::string& cve_id) = 0;
};

// Serves captured API responses from <directory>/<CVE-id>.json.
class FixtureTransport : public Transport {
public:
    explicit FixtureTransport(std::filesystem::path directory);
    std::string get(const std::string& cve_id) override;

private:
    std::filesystem::path directory_;
};

// HTTPS client for the CVE API; enforces a minimum spacing between requests
// across all callers sharing the instance.
class LiveTransport : public Transport {
public:
    explicit LiveTransport(std::string base_url = "https://services.nvd.nist.gov",
                           std::string api_key = "", long min_interval_ms = 6000);
    std::string get(const std::string& cve_id) override;

private:
    std::string base_url_;
    std::string api_key_;
    long min_interval_ms_;
    std::mutex gate_;
    std::chrono::steady_clock::time_point last_request_{};
};

class NvdClient {
public:
    explicit NvdClient(std::shared_ptr<Transport> transport);

    // Validates the id shape before any transport activity, then extracts the
    // v3 base vector (3.1 preferred over 3.0, Primary source preferred).
    CveRecord fetch_cve(const std::string& cve_id);

private:
    std::shared_ptr<Transport> transport_;
};

// Replaces each mapped vulnerability's score source with the CVE's vector,
// stamps provenance, and resolves scores. Mapping keys must name declared
// vulnerabilities.
ThreatModel hydrate_model(const ThreatModel& model,
                          const std::map<std::string, std::string>& cve_by_vulnerability,
                          NvdClient& client);

} // namespace riskchain
