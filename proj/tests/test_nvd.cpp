#include "riskchain/nvd.hpp"

#include "riskchain/cvss.hpp"
#include "riskchain/iomt.hpp"

#include <doctest.h>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <memory>
#include <string>

using namespace riskchain;
namespace fs = std::filesystem;

namespace {

fs::path fixture_dir() { return fs::path(RISKCHAIN_REPO_DIR) / "tests" / "data" / "nvd"; }

NvdClient fixture_client() {
    return NvdClient(std::make_shared<FixtureTransport>(fixture_dir()));
}

struct CannedTransport : Transport {
    std::string body;
    int calls = 0;
    explicit CannedTransport(std::string b) : body(std::move(b)) {}
    std::string get(const std::string&) override {
        ++calls;
        return body;
    }
};

struct ExplodingTransport : Transport {
    std::string get(const std::string&) override {
        FAIL("transport must not be reached");
        return {};
    }
};

NvdError::Code fetch_error(NvdClient& client, const std::string& id) {
    try {
        client.fetch_cve(id);
    } catch (const NvdError& e) {
        return e.code();
    }
    FAIL("expected an NvdError");
    return NvdError::Code::Transport;
}

} // namespace

TEST_CASE("a captured record yields its vector and a matching recomputed score") {
    NvdClient client = fixture_client();
    const CveRecord rec = client.fetch_cve("CVE-2017-0144");
    CHECK(rec.cve_id == "CVE-2017-0144");
    CHECK(rec.vector == "CVSS:3.1/AV:N/AC:H/PR:N/UI:N/S:U/C:H/I:H/A:H");
    CHECK(rec.base_score_published == 8.1);
    CHECK(cvss::base_score(rec.vector) == 8.1);
    CHECK(rec.fetched_at.size() == 20);  // YYYY-MM-DDTHH:MM:SSZ
    CHECK(rec.fetched_at.back() == 'Z');
}

TEST_CASE("every scoreable capture recomputes to its published base score") {
    NvdClient client = fixture_client();
    int checked = 0;
    for (const auto& entry : fs::directory_iterator(fixture_dir())) {
        const std::string id = entry.path().stem().string();
        CveRecord rec;
        try {
            rec = client.fetch_cve(id);
        } catch (const NvdError&) {
            continue;  // captures of error shapes are exercised elsewhere
        }
        INFO("cve ", id, " vector ", rec.vector);
        CHECK(cvss::base_score(rec.vector) == rec.base_score_published);
        ++checked;
    }
    CHECK(checked >= 20);
}

TEST_CASE("metric selection prefers v3.1 and the primary source") {
    NvdClient client = fixture_client();

    SUBCASE("v3.1 wins when both versions are present") {
        const CveRecord rec = client.fetch_cve("CVE-2017-0199");
        CHECK(rec.vector.rfind("CVSS:3.1/", 0) == 0);
    }
    SUBCASE("v3.0 is used when it is all there is") {
        const CveRecord rec = client.fetch_cve("CVE-2014-3566");
        CHECK(rec.vector.rfind("CVSS:3.0/", 0) == 0);
        CHECK(rec.base_score_published == 3.4);
    }
    SUBCASE("the primary entry wins over an earlier secondary one") {
        const CveRecord rec = client.fetch_cve("CVE-2021-44228");
        CHECK(rec.base_score_published == 10.0);
        CHECK(rec.vector.find("/AC:L/") != std::string::npos);
    }
}

TEST_CASE("error classification") {
    NvdClient client = fixture_client();

    SUBCASE("records without any v3 metric") {
        CHECK(fetch_error(client, "CVE-2004-0230") == NvdError::Code::NoV3Metrics);
    }
    SUBCASE("an empty result set") {
        CHECK(fetch_error(client, "CVE-1999-99999") == NvdError::Code::NotFound);
    }
    SUBCASE("a missing capture names the id and the path it looked for") {
        try {
            client.fetch_cve("CVE-2000-12345");
            FAIL("expected an NvdError");
        } catch (const NvdError& e) {
            CHECK(e.code() == NvdError::Code::NotFound);
            const std::string what = e.what();
            CHECK(what.find("CVE-2000-12345") != std::string::npos);
            CHECK(what.find("CVE-2000-12345.json") != std::string::npos);
        }
    }
    SUBCASE("id validation happens before any transport call") {
        NvdClient strict(std::make_shared<ExplodingTransport>());
        CHECK(fetch_error(strict, "not-a-cve") == NvdError::Code::BadCveId);
        CHECK(fetch_error(strict, "CVE-17-0144") == NvdError::Code::BadCveId);
        CHECK(fetch_error(strict, "CVE-2017-144") == NvdError::Code::BadCveId);
        CHECK(fetch_error(strict, "cve-2017-0144") == NvdError::Code::BadCveId);
        CHECK(fetch_error(strict, "") == NvdError::Code::BadCveId);
    }
    SUBCASE("malformed bodies") {
        auto check_malformed = [](const std::string& body) {
            NvdClient c(std::make_shared<CannedTransport>(body));
            CHECK(fetch_error(c, "CVE-2017-0144") == NvdError::Code::MalformedResponse);
        };
        check_malformed("this is not json");
        check_malformed("{}");
        check_malformed(R"({"totalResults": 1})");
        check_malformed(R"({"totalResults": 1, "vulnerabilities": []})");
        check_malformed(
            R"({"totalResults": 1, "vulnerabilities": [{"cve": {"id": "CVE-2017-0144",
                "metrics": {"cvssMetricV31": [{"type": "Primary",
                "cvssData": {"vectorString": "garbage", "baseScore": 8.1}}]}}}]})");
    }
}

TEST_CASE("hydration swaps literal scores for fetched vectors") {
    NvdClient client = fixture_client();
    const ThreatModel base = builtin_iomt_model();

    SUBCASE("a single mapped vulnerability") {
        const ThreatModel out = hydrate_model(base, {{"V8", "CVE-2019-0708"}}, client);
        const VulnerabilityRecord* v8 = out.find_vulnerability("V8");
        REQUIRE(v8 != nullptr);
        CHECK_FALSE(v8->literal_score.has_value());
        REQUIRE(v8->cvss_vector.has_value());
        CHECK(*v8->cvss_vector == "CVSS:3.1/AV:N/AC:L/PR:N/UI:N/S:U/C:H/I:H/A:H");
        REQUIRE(v8->resolved_score.has_value());
        CHECK(*v8->resolved_score == 9.8);
        REQUIRE(v8->provenance.has_value());
        CHECK(v8->provenance->cve_id == "CVE-2019-0708");
        CHECK_FALSE(v8->provenance->fetched_at.empty());

        // everything else keeps its literal score
        const VulnerabilityRecord* v1 = out.find_vulnerability("V1");
        REQUIRE(v1 != nullptr);
        CHECK(v1->literal_score == 6.3);
        CHECK_FALSE(v1->provenance.has_value());
    }
    SUBCASE("an empty mapping only resolves scores") {
        const ThreatModel out = hydrate_model(base, {}, client);
        CHECK(out == resolve_scores(base));
    }
    SUBCASE("mapping an undeclared vulnerability is a model error") {
        CHECK_THROWS_AS(hydrate_model(base, {{"V99", "CVE-2019-0708"}}, client),
                        ModelError);
    }
    SUBCASE("fetch failures carry the vulnerability id") {
        try {
            hydrate_model(base, {{"V1", "CVE-2004-0230"}}, client);
            FAIL("expected an NvdError");
        } catch (const NvdError& e) {
            CHECK(e.code() == NvdError::Code::NoV3Metrics);
            CHECK(std::string(e.what()).rfind("V1: ", 0) == 0);
        }
    }
}

TEST_CASE("fixture transport returns file bytes verbatim") {
    FixtureTransport transport(fixture_dir());
    const std::string body = transport.get("CVE-2017-0144");
    std::ifstream in(fixture_dir() / "CVE-2017-0144.json", std::ios::binary);
    std::string direct((std::istreambuf_iterator<char>(in)),
                       std::istreambuf_iterator<char>());
    CHECK(body == direct);
    CHECK(nlohmann::json::parse(body).is_object());
}
