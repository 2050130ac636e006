#include "riskchain/cli.hpp"

#include "riskchain/iomt.hpp"
#include "riskchain/model.hpp"

#include <doctest.h>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <unistd.h>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>
#include <vector>

using namespace riskchain;
namespace fs = std::filesystem;

namespace {

struct CliResult {
    int exit_code = 0;
    std::string out;
    std::string err;
};

CliResult run_cli(std::initializer_list<const char*> args) {
    std::vector<const char*> argv{"riskchain"};
    argv.insert(argv.end(), args.begin(), args.end());
    std::ostringstream out, err;
    const int code = run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

fs::path repo_path(const char* relative) { return fs::path(RISKCHAIN_REPO_DIR) / relative; }

struct TempFile {
    fs::path path;
    TempFile(const char* stem, const std::string& content) {
        path = fs::temp_directory_path() /
               (std::string(stem) + "-" + std::to_string(::getpid()) + ".json");
        std::ofstream(path, std::ios::binary) << content;
    }
    ~TempFile() { std::error_code ec; fs::remove(path, ec); }
    std::string str() const { return path.string(); }
};

std::size_t count_lines(const std::string& text) {
    std::size_t n = 0;
    for (char c : text)
        if (c == '\n') ++n;
    return n;
}

} // namespace

TEST_CASE("validate reports the builtin model as well formed") {
    const CliResult r = run_cli({"validate", "--builtin-iomt"});
    CHECK(r.exit_code == 0);
    CHECK(r.out == "ok: 11 vulnerabilities, 12 threats\n");
    CHECK(r.err.empty());
}

TEST_CASE("validate surfaces model problems") {
    SUBCASE("missing file") {
        const CliResult r = run_cli({"validate", "--model", "/no/such/model.json"});
        CHECK(r.exit_code == 1);
        CHECK(r.err.find("error:") != std::string::npos);
    }
    SUBCASE("document with a dangling reference") {
        TempFile bad("riskchain-bad-model", R"({
            "alpha": 0.1, "mu": 0.5,
            "vulnerabilities": [{"id": "V1", "name": "v", "score": 5.0}],
            "threats": [{"id": "T1", "name": "t", "exploits": ["V7"]}]
        })");
        const CliResult r = run_cli({"validate", "--model", bad.str().c_str()});
        CHECK(r.exit_code == 1);
        CHECK(r.err.find("reference") != std::string::npos);
        CHECK(r.err.find("V7") != std::string::npos);
    }
}

TEST_CASE("usage errors exit with code 2") {
    CHECK(run_cli({}).exit_code == 2);
    CHECK(run_cli({"frobnicate"}).exit_code == 2);
    CHECK(run_cli({"validate"}).exit_code == 2);  // no model source
    CHECK(run_cli({"distribution", "--builtin-iomt", "--format", "yaml"}).exit_code == 2);
    CHECK(run_cli({"distribution", "--builtin-iomt", "--model", "x.json"}).exit_code == 2);
    CHECK(run_cli({"matrix", "--builtin-iomt", "--steps", "0"}).exit_code == 2);
    CHECK(run_cli({"simulate", "--builtin-iomt", "--max-steps", "1"}).exit_code == 2);
    CHECK(run_cli({"fetch-cvss", "--builtin-iomt"}).exit_code == 2);  // --map required
}

TEST_CASE("help is success and goes to stdout") {
    const CliResult top = run_cli({"--help"});
    CHECK(top.exit_code == 0);
    CHECK(top.out.find("distribution") != std::string::npos);

    const CliResult sub = run_cli({"simulate", "--help"});
    CHECK(sub.exit_code == 0);
    CHECK(sub.out.find("--trajectories") != std::string::npos);
}

TEST_CASE("distribution output is deterministic") {
    const CliResult a = run_cli({"distribution", "--builtin-iomt", "--format", "csv"});
    const CliResult b = run_cli({"distribution", "--builtin-iomt", "--format", "csv"});
    CHECK(a.exit_code == 0);
    CHECK(a.out == b.out);
    CHECK(count_lines(a.out) == 13);
    CHECK(a.out.rfind("id,name,requirement,weight,alpha,mu,p_attack,rank\n", 0) == 0);
}

TEST_CASE("distribution csv matches the committed golden bytes") {
    const CliResult r = run_cli({"distribution", "--builtin-iomt", "--format", "csv"});
    REQUIRE(r.exit_code == 0);
    std::ifstream golden(repo_path("tests/data/golden/distribution_builtin.csv"),
                         std::ios::binary);
    REQUIRE(golden.good());
    std::string want((std::istreambuf_iterator<char>(golden)),
                     std::istreambuf_iterator<char>());
    CHECK(r.out == want);
}

TEST_CASE("the bundled model document is the builtin model") {
    std::ifstream in(repo_path("data/iomt.json"), std::ios::binary);
    REQUIRE(in.good());
    std::string bytes((std::istreambuf_iterator<char>(in)),
                      std::istreambuf_iterator<char>());
    CHECK(bytes == serialize_model(builtin_iomt_model()));

    const LoadResult loaded = load_model(bytes);
    REQUIRE(loaded.ok());
    CHECK(loaded.model == builtin_iomt_model());

    const CliResult from_file =
        run_cli({"distribution", "--model",
                 repo_path("data/iomt.json").string().c_str(), "--format", "csv"});
    const CliResult from_builtin =
        run_cli({"distribution", "--builtin-iomt", "--format", "csv"});
    CHECK(from_file.exit_code == 0);
    CHECK(from_file.out == from_builtin.out);
}

TEST_CASE("the override flag switches the denominator") {
    const CliResult with = run_cli({"distribution", "--builtin-iomt", "--format", "json"});
    const CliResult without =
        run_cli({"distribution", "--builtin-iomt", "--no-override", "--format", "json"});
    REQUIRE(with.exit_code == 0);
    REQUIRE(without.exit_code == 0);
    const auto with_doc = nlohmann::json::parse(with.out);
    const auto without_doc = nlohmann::json::parse(without.out);
    CHECK(with_doc.at("denominator") == 390.0);
    CHECK(with_doc.contains("alpha_gap"));
    CHECK(without_doc.at("denominator") == 311.0);
    CHECK_FALSE(without_doc.contains("alpha_gap"));
    CHECK(without_doc.at("alpha_sum").get<double>() == doctest::Approx(0.0318));
}

TEST_CASE("matrix power via the command line") {
    const CliResult r =
        run_cli({"matrix", "--builtin-iomt", "--steps", "2", "--format", "csv"});
    REQUIRE(r.exit_code == 0);
    CHECK(count_lines(r.out) == 15);
    // S row, last column: the two-step compromise probability
    std::istringstream in(r.out);
    std::string header, s_row;
    std::getline(in, header);
    std::getline(in, s_row);
    const std::string last = s_row.substr(s_row.rfind(',') + 1);
    CHECK(std::stod(last) == doctest::Approx(0.024851292307692306).epsilon(1e-15));
}

TEST_CASE("simulation via the command line conserves trajectories") {
    const CliResult r = run_cli({"simulate", "--builtin-iomt", "--trajectories", "2000",
                                 "--seed", "7", "--format", "json"});
    REQUIRE(r.exit_code == 0);
    const auto doc = nlohmann::json::parse(r.out);
    std::uint64_t counted = doc.at("unabsorbed").get<std::uint64_t>();
    for (const auto& row : doc.at("rows")) counted += row.at("count").get<std::uint64_t>();
    CHECK(counted == 2000);
    CHECK(doc.at("rows").size() == 12);

    const CliResult again = run_cli({"simulate", "--builtin-iomt", "--trajectories",
                                     "2000", "--seed", "7", "--format", "json"});
    CHECK(again.out == r.out);
}

TEST_CASE("prioritize puts the dominant vulnerability first") {
    const CliResult r = run_cli({"prioritize", "--builtin-iomt", "--format", "csv"});
    REQUIRE(r.exit_code == 0);
    std::istringstream in(r.out);
    std::string header, first;
    std::getline(in, header);
    std::getline(in, first);
    CHECK(header == "id,name,score,criticality,threats");
    CHECK(first.rfind("V9,", 0) == 0);
}

TEST_CASE("fetch-cvss hydrates from fixtures into a reloadable document") {
    TempFile map("riskchain-map", R"({"V8": "CVE-2019-0708"})");
    const fs::path out_path =
        fs::temp_directory_path() /
        ("riskchain-hydrated-" + std::to_string(::getpid()) + ".json");
    const std::string fixtures = repo_path("tests/data/nvd").string();

    const CliResult r =
        run_cli({"fetch-cvss", "--builtin-iomt", "--map", map.str().c_str(), "--fixtures",
                 fixtures.c_str(), "--out", out_path.string().c_str()});
    REQUIRE(r.exit_code == 0);
    CHECK(r.err.find("hydrated 1 vulnerabilities") != std::string::npos);

    const LoadResult reloaded = load_model_file(out_path.string());
    REQUIRE(reloaded.ok());
    const VulnerabilityRecord* v8 = reloaded.model.find_vulnerability("V8");
    REQUIRE(v8 != nullptr);
    REQUIRE(v8->cvss_vector.has_value());
    REQUIRE(v8->provenance.has_value());
    CHECK(v8->provenance->cve_id == "CVE-2019-0708");
    const ThreatModel resolved = resolve_scores(reloaded.model);
    CHECK(*resolved.find_vulnerability("V8")->resolved_score == 9.8);

    std::error_code ec;
    fs::remove(out_path, ec);
}

TEST_CASE("fetch-cvss without --out streams the document") {
    TempFile map("riskchain-map-stdout", R"({})");
    const CliResult r = run_cli({"fetch-cvss", "--builtin-iomt", "--map",
                                 map.str().c_str(), "--fixtures",
                                 repo_path("tests/data/nvd").string().c_str()});
    REQUIRE(r.exit_code == 0);
    CHECK(r.out == serialize_model(resolve_scores(builtin_iomt_model())));
}

TEST_CASE("fetch-cvss maps service failures to exit 3") {
    TempFile map("riskchain-map-nov3", R"({"V1": "CVE-2004-0230"})");
    const CliResult r = run_cli({"fetch-cvss", "--builtin-iomt", "--map",
                                 map.str().c_str(), "--fixtures",
                                 repo_path("tests/data/nvd").string().c_str()});
    CHECK(r.exit_code == 3);
    CHECK(r.err.find("V1") != std::string::npos);
}

TEST_CASE("fetch-cvss mapping file problems are model errors") {
    const CliResult missing = run_cli({"fetch-cvss", "--builtin-iomt", "--map",
                                       "/no/such/map.json", "--fixtures", "."});
    CHECK(missing.exit_code == 1);

    TempFile not_object("riskchain-map-array", R"([1, 2, 3])");
    const CliResult bad = run_cli({"fetch-cvss", "--builtin-iomt", "--map",
                                   not_object.str().c_str(), "--fixtures", "."});
    CHECK(bad.exit_code == 1);
    CHECK(bad.err.find("object") != std::string::npos);
}
