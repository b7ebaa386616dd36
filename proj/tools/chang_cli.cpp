#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include <chang/cli.hpp>

namespace {

nlohmann::json load_json_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::invalid_argument("cannot open: " + path);
    nlohmann::json j;
    is >> j;
    return j;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"certificates for a strengthened Chang's lemma"};
    app.require_subcommand(1);

    std::string config_path, group, policy, out, csv, gen_kind, cert_path, oracle_request;
    double eps = 0.0, density = 0.0;
    std::uint64_t seed = 0;
    int threads = 0, radius = -1, quadruples = 0;
    bool trace = false, r1 = false, classical = false, localized = false;
    std::vector<std::size_t> elements;
    std::vector<std::string> sweep_groups;
    std::vector<double> eps_grid;

    auto add_shared = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "JSON config file; flags override it");
        cmd->add_option("--group", group, "group, e.g. 2^10, 12x5, 2x9x5");
        cmd->add_option("--eps", eps, "epsilon in (0,1)");
        cmd->add_option("--seed", seed, "root seed");
        cmd->add_option("--policy", policy, "first_in_canonical_order | max_violation");
        cmd->add_option("--out", out, "certificate / report JSON path");
        cmd->add_option("--csv", csv, "CSV output path");
        cmd->add_option("--threads", threads, "verification sweep threads");
        cmd->add_flag("--trace", trace, "persist per-step phases and test functions");
        cmd->add_option("--set-kind", gen_kind,
                        "explicit | random_density | subspace | coset | hamming_ball");
        cmd->add_option("--density", density, "random_density target alpha");
        cmd->add_option("--radius", radius, "hamming_ball radius");
        cmd->add_option("--elements", elements, "explicit set elements (canonical indices)");
        return cmd;
    };

    CLI::App* refine = add_shared(app.add_subcommand(
        "refine", "subspace certificate over F_p^n (entropy descent)"));
    refine->add_flag("--r1", r1, "single-generator refinement of a density h = 1_A/alpha");
    CLI::App* abelian = add_shared(app.add_subcommand(
        "abelian", "dissociated-set certificate over a finite abelian group"));
    abelian->add_flag("--classical", classical, "classical variant (no weight family)");
    CLI::App* count = add_shared(app.add_subcommand(
        "count", "localized counting discrepancy checks"));
    count->add_flag("--localized", localized, "random weight quadruples plus adversary");
    count->add_option("--quadruples", quadruples, "random quadruples per kind");
    CLI::App* sweep = add_shared(app.add_subcommand(
        "sweep", "tightness sweep: achieved dim V against the bound"));
    sweep->add_option("--groups", sweep_groups, "prime-vector groups to sweep");
    sweep->add_option("--eps-grid", eps_grid, "epsilon grid");
    CLI::App* verify = app.add_subcommand("verify", "re-verify a persisted certificate");
    verify->add_option("certificate", cert_path, "certificate JSON path")->required();
    CLI::App* oracle = app.add_subcommand("oracle", "brute-force fixture helper");
    oracle->add_option("request", oracle_request, "oracle request JSON path")->required();
    oracle->group("");  // hidden: internal fixture generation

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? chang::cli::kExitOk : chang::cli::kExitConfig;
    }

    try {
        if (app.got_subcommand(verify))
            return chang::cli::verify_document(load_json_file(cert_path));
        if (app.got_subcommand(oracle)) {
            std::cout << chang::cli::oracle_document(load_json_file(oracle_request)).dump(2)
                      << "\n";
            return chang::cli::kExitOk;
        }

        nlohmann::json j = config_path.empty() ? nlohmann::json::object()
                                               : load_json_file(config_path);
        CLI::App* active = app.got_subcommand(refine)    ? refine
                           : app.got_subcommand(abelian) ? abelian
                           : app.got_subcommand(count)   ? count
                                                         : sweep;
        if (active->count("--group")) j["group"] = group;
        if (active->count("--eps")) j["eps"] = eps;
        if (active->count("--seed")) j["seed"] = seed;
        if (active->count("--policy")) j["policy"] = policy;
        if (active->count("--out")) j["out"] = out;
        if (active->count("--csv")) j["csv"] = csv;
        if (active->count("--threads")) j["threads"] = threads;
        if (active->count("--trace")) j["trace"] = true;
        if (active->count("--set-kind")) j["generator"]["kind"] = gen_kind;
        if (active->count("--density")) {
            if (!j["generator"].contains("kind")) j["generator"]["kind"] = "random_density";
            j["generator"]["density"] = density;
        }
        if (active->count("--radius")) {
            if (!j["generator"].contains("kind")) j["generator"]["kind"] = "hamming_ball";
            j["generator"]["radius"] = radius;
        }
        if (active->count("--elements")) {
            if (!j["generator"].contains("kind")) j["generator"]["kind"] = "explicit";
            j["generator"]["elements"] = elements;
        }
        if (app.got_subcommand(refine)) j["variant"] = r1 ? "fpn_r1" : "fpn_refined";
        if (app.got_subcommand(abelian))
            j["variant"] = classical ? "abelian_classical" : "abelian_refined";
        if (app.got_subcommand(count)) {
            j["variant"] = localized ? "counting_localized" : "counting_classical";
            if (count->count("--quadruples")) j["quadruples"] = quadruples;
        }
        if (app.got_subcommand(sweep)) {
            j["variant"] = "tightness_sweep";
            if (sweep->count("--groups")) j["sweep"]["groups"] = sweep_groups;
            if (sweep->count("--eps-grid")) j["sweep"]["eps"] = eps_grid;
        }
        return chang::cli::run(chang::cli::config_from_json(j));
    } catch (const chang::ResourceGateError& e) {
        std::cerr << "resource gate: " << e.what() << "\n";
        return chang::cli::kExitResourceGate;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return chang::cli::kExitConfig;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return chang::cli::kExitConfig;
    } catch (const std::domain_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return chang::cli::kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return chang::cli::kExitFailure;
    }
}
