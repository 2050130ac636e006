#include "riskchain/cli.hpp"

#include "riskchain/iomt.hpp"
#include "riskchain/markov.hpp"
#include "riskchain/model.hpp"
#include "riskchain/nvd.hpp"
#include "riskchain/report.hpp"
#include "riskchain/simulate.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <map>
#include <memory>
#include <ostream>
#include <sstream>
#include <string>

namespace riskchain {

namespace {

struct ModelOptions {
    std::string path;
    bool builtin = false;
    bool no_override = false;
};

void add_model_options(CLI::App* cmd, ModelOptions& opts) {
    auto* source = cmd->add_option_group("model source");
    source->add_option("--model", opts.path, "threat model JSON file");
    source->add_flag("--builtin-iomt", opts.builtin, "use the bundled IoMT model");
    source->require_option(1);
    cmd->add_flag("--no-override", opts.no_override,
                  "ignore the model's denominator_override");
}

void add_format_option(CLI::App* cmd, std::string& fmt) {
    cmd->add_option("--format", fmt, "output format")
        ->check(CLI::IsMember({"table", "csv", "json"}))
        ->default_str("table");
}

void print_diagnostics(const ModelDiagnostics& diags, std::ostream& err) {
    for (const auto& d : diags.errors) {
        err << "error: " << d.code << ": " << d.message;
        if (!d.location.empty()) err << " (at " << d.location << ")";
        err << "\n";
    }
    for (const auto& d : diags.warnings) {
        err << "warning: " << d.code << ": " << d.message;
        if (!d.location.empty()) err << " (at " << d.location << ")";
        err << "\n";
    }
}

// Loads (or synthesizes) the model, reports diagnostics, applies flags and
// resolves scores. Throws ModelError when the document is unusable.
ThreatModel acquire_model(const ModelOptions& opts, std::ostream& err) {
    ThreatModel model;
    if (opts.builtin) {
        model = builtin_iomt_model();
    } else {
        LoadResult loaded = load_model_file(opts.path);
        print_diagnostics(loaded.diagnostics, err);
        if (!loaded.ok())
            throw ModelError("validation", opts.path,
                             "model \"" + opts.path + "\" failed validation");
        model = std::move(loaded.model);
    }
    if (opts.no_override) model.denominator_override.reset();
    return resolve_scores(model);
}

std::map<std::string, std::string> load_cve_map(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ModelError("io", path, "cannot open mapping file \"" + path + "\"");
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ModelError("syntax", path, "mapping file is not JSON: " + std::string(e.what()));
    }
    if (!doc.is_object())
        throw ModelError("schema", path, "mapping file must be a JSON object");
    std::map<std::string, std::string> mapping;
    for (const auto& [key, value] : doc.items()) {
        if (!value.is_string())
            throw ModelError("schema", path, "mapping for \"" + key + "\" must be a string");
        mapping[key] = value.get<std::string>();
    }
    return mapping;
}

} // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Markov-chain risk quantification for declarative threat models"};
    app.require_subcommand(1);

    ModelOptions validate_opts;
    auto* validate = app.add_subcommand("validate", "check a model document");
    add_model_options(validate, validate_opts);

    ModelOptions dist_opts;
    std::string dist_format = "table";
    auto* distribution =
        app.add_subcommand("distribution", "per-threat attack probabilities");
    add_model_options(distribution, dist_opts);
    add_format_option(distribution, dist_format);

    ModelOptions matrix_opts;
    std::string matrix_format = "table";
    long matrix_steps = 1;
    auto* matrix = app.add_subcommand("matrix", "transition matrix P or P^n");
    add_model_options(matrix, matrix_opts);
    add_format_option(matrix, matrix_format);
    matrix->add_option("--steps", matrix_steps, "matrix power to report")
        ->check(CLI::PositiveNumber);

    ModelOptions sim_opts;
    std::string sim_format = "table";
    SimulationConfig sim_cfg;
    sim_cfg.seed = 42;
    auto* simulate_cmd =
        app.add_subcommand("simulate", "Monte Carlo check of the distribution");
    add_model_options(simulate_cmd, sim_opts);
    add_format_option(simulate_cmd, sim_format);
    simulate_cmd->add_option("--trajectories", sim_cfg.trajectories, "sample size")
        ->check(CLI::PositiveNumber);
    simulate_cmd->add_option("--max-steps", sim_cfg.max_steps, "per-trajectory step cap")
        ->check(CLI::Range(std::uint64_t{2}, std::numeric_limits<std::uint64_t>::max()));
    simulate_cmd->add_option("--seed", sim_cfg.seed, "random seed");

    ModelOptions prio_opts;
    std::string prio_format = "table";
    auto* prioritize_cmd =
        app.add_subcommand("prioritize", "vulnerability mitigation ranking");
    add_model_options(prioritize_cmd, prio_opts);
    add_format_option(prioritize_cmd, prio_format);

    ModelOptions fetch_opts;
    std::string map_path;
    std::string fixtures_dir;
    std::string out_path;
    long rate_ms = 6000;
    auto* fetch = app.add_subcommand("fetch-cvss", "hydrate vulnerability scores from CVEs");
    add_model_options(fetch, fetch_opts);
    fetch->add_option("--map", map_path, "JSON object of vulnerability id to CVE id")
        ->required();
    fetch->add_option("--fixtures", fixtures_dir, "directory of captured API responses");
    fetch->add_option("--out", out_path, "write hydrated model here instead of stdout");
    fetch->add_option("--rate-ms", rate_ms, "minimum milliseconds between live requests")
        ->check(CLI::NonNegativeNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        CLI::App* target = &app;
        const auto parsed = app.get_subcommands();
        if (!parsed.empty()) target = parsed.front();
        out << target->help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }

    try {
        if (validate->parsed()) {
            ThreatModel model = acquire_model(validate_opts, err);
            out << "ok: " << model.vulnerabilities.size() << " vulnerabilities, "
                << model.threats.size() << " threats\n";
            return 0;
        }

        if (distribution->parsed()) {
            ThreatModel model = acquire_model(dist_opts, err);
            const AttackDistribution dist = attack_distribution(model);
            out << render_distribution(distribution_rows(model, dist), dist,
                                       *parse_format(dist_format));
            return 0;
        }

        if (matrix->parsed()) {
            ThreatModel model = acquire_model(matrix_opts, err);
            TransitionMatrix p = build_transition_matrix(model);
            if (matrix_steps > 1) p = n_step_matrix(p, matrix_steps);
            out << render_matrix(p, *parse_format(matrix_format));
            return 0;
        }

        if (simulate_cmd->parsed()) {
            ThreatModel model = acquire_model(sim_opts, err);
            const TransitionMatrix p = build_transition_matrix(model);
            const EmpiricalDistribution emp = simulate(p, sim_cfg);
            const ComparisonReport report =
                compare_distributions(emp, attack_distribution(model));
            out << render_simulation(report, *parse_format(sim_format));
            return 0;
        }

        if (prioritize_cmd->parsed()) {
            ThreatModel model = acquire_model(prio_opts, err);
            const AttackDistribution dist = attack_distribution(model);
            out << render_priorities(prioritize(model, dist), *parse_format(prio_format));
            return 0;
        }

        if (fetch->parsed()) {
            ThreatModel model = acquire_model(fetch_opts, err);
            const auto mapping = load_cve_map(map_path);

            std::shared_ptr<Transport> transport;
            if (!fixtures_dir.empty()) {
                transport = std::make_shared<FixtureTransport>(fixtures_dir);
            } else {
                const char* key = std::getenv("NVD_API_KEY");
                transport = std::make_shared<LiveTransport>(
                    "https://services.nvd.nist.gov", key ? key : "", rate_ms);
            }
            NvdClient client(std::move(transport));
            const ThreatModel hydrated = hydrate_model(model, mapping, client);
            const std::string serialized = serialize_model(hydrated);
            if (out_path.empty()) {
                out << serialized;
            } else {
                std::ofstream file(out_path, std::ios::binary);
                if (!file)
                    throw ModelError("io", out_path, "cannot write \"" + out_path + "\"");
                file << serialized;
                err << "hydrated " << mapping.size() << " vulnerabilities into " << out_path
                    << "\n";
            }
            return 0;
        }
    } catch (const NvdError& e) {
        err << "error: " << e.what() << "\n";
        return 3;
    } catch (const ModelError& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    } catch (const EngineError& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}

} // namespace riskchain
