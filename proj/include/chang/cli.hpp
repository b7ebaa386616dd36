#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "chang/chang_abelian.hpp"
#include "chang/chang_fpn.hpp"
#include "chang/counting.hpp"
#include "chang/generators.hpp"
#include "chang/oracle.hpp"
#include "chang/parallel.hpp"
#include "chang/serialization.hpp"

namespace chang::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;        // unexpected internal error
inline constexpr int kExitConfig = 2;         // bad config / arguments
inline constexpr int kExitVerification = 3;   // a verification did not pass
inline constexpr int kExitResourceGate = 4;   // refused by a resource gate

enum class RunVariant {
    fpn_refined,
    fpn_r1,
    abelian_classical,
    abelian_refined,
    counting_classical,
    counting_localized,
    tightness_sweep,
};

inline std::string to_string(RunVariant v) {
    switch (v) {
        case RunVariant::fpn_refined: return "fpn_refined";
        case RunVariant::fpn_r1: return "fpn_r1";
        case RunVariant::abelian_classical: return "abelian_classical";
        case RunVariant::abelian_refined: return "abelian_refined";
        case RunVariant::counting_classical: return "counting_classical";
        case RunVariant::counting_localized: return "counting_localized";
        case RunVariant::tightness_sweep: return "tightness_sweep";
    }
    throw std::logic_error("RunVariant: bad tag");
}

inline RunVariant run_variant_from_string(const std::string& s) {
    for (RunVariant v :
         {RunVariant::fpn_refined, RunVariant::fpn_r1, RunVariant::abelian_classical,
          RunVariant::abelian_refined, RunVariant::counting_classical,
          RunVariant::counting_localized, RunVariant::tightness_sweep})
        if (to_string(v) == s) return v;
    throw std::invalid_argument("RunVariant: unknown variant \"" + s + "\"");
}

struct SweepConfig {
    std::vector<std::string> groups;
    std::vector<double> eps_grid;
};

struct RunConfig {
    GroupSpec group = GroupSpec({2});
    SetGeneratorSpec generator;
    double eps = 0.5;
    RunVariant variant = RunVariant::fpn_refined;
    WitnessPolicy policy = WitnessPolicy::max_violation;
    std::vector<std::uint64_t> seeds{0};
    int quadruples = 10;               // counting_localized: per-kind count
    std::size_t weight_budget = kDefaultWeightBudget;
    int threads = 1;
    bool trace = false;                // persist per-step phases / functions
    std::string out_path;              // certificate / report JSON
    std::string csv_path;              // sweep rows
    SweepConfig sweep;
};

inline RunConfig config_from_json(const nlohmann::json& j) {
    RunConfig cfg;
    if (j.contains("group")) cfg.group = GroupSpec::parse(j.at("group").get<std::string>());
    cfg.generator.group = cfg.group;
    if (j.contains("generator")) {
        const nlohmann::json& g = j.at("generator");
        cfg.generator.kind = generator_kind_from_string(g.at("kind").get<std::string>());
        if (g.contains("elements"))
            cfg.generator.elements = g.at("elements").get<std::vector<std::size_t>>();
        if (g.contains("density")) cfg.generator.density = g.at("density").get<double>();
        if (g.contains("basis"))
            cfg.generator.basis = g.at("basis").get<std::vector<std::vector<int>>>();
        if (g.contains("shift")) cfg.generator.shift = g.at("shift").get<std::size_t>();
        if (g.contains("radius")) cfg.generator.radius = g.at("radius").get<int>();
    }
    if (j.contains("eps")) cfg.eps = j.at("eps").get<double>();
    if (j.contains("variant"))
        cfg.variant = run_variant_from_string(j.at("variant").get<std::string>());
    if (j.contains("policy"))
        cfg.policy = witness_policy_from_string(j.at("policy").get<std::string>());
    if (j.contains("seeds")) cfg.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
    if (j.contains("seed")) cfg.seeds = {j.at("seed").get<std::uint64_t>()};
    if (cfg.seeds.empty()) throw std::invalid_argument("config: seeds must be nonempty");
    if (j.contains("quadruples")) cfg.quadruples = j.at("quadruples").get<int>();
    if (j.contains("weight_budget"))
        cfg.weight_budget = j.at("weight_budget").get<std::size_t>();
    if (j.contains("threads")) cfg.threads = j.at("threads").get<int>();
    if (j.contains("trace")) cfg.trace = j.at("trace").get<bool>();
    if (j.contains("out")) cfg.out_path = j.at("out").get<std::string>();
    if (j.contains("csv")) cfg.csv_path = j.at("csv").get<std::string>();
    if (j.contains("sweep")) {
        cfg.sweep.groups = j.at("sweep").at("groups").get<std::vector<std::string>>();
        cfg.sweep.eps_grid = j.at("sweep").at("eps").get<std::vector<double>>();
    }
    return cfg;
}

namespace detail {

inline void write_text(const std::string& path, const std::string& text) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::invalid_argument("cannot open output path: " + path);
    os << text;
}

inline void emit_json(const RunConfig& cfg, const nlohmann::json& doc) {
    if (!cfg.out_path.empty()) write_text(cfg.out_path, doc.dump(2) + "\n");
}

inline SetStats make_set(const RunConfig& cfg, std::uint64_t seed) {
    SetGeneratorSpec gen = cfg.generator;
    gen.group = cfg.group;
    gen.seed = seed;
    return generate_set(gen);
}

inline std::size_t weight_budget_from_env(std::size_t fallback) {
    if (const char* env = std::getenv("CHANG_WEIGHT_BUDGET")) {
        char* end = nullptr;
        unsigned long long v = std::strtoull(env, &end, 10);
        if (end == env || *end != '\0' || v == 0)
            throw std::invalid_argument("CHANG_WEIGHT_BUDGET: not a positive integer");
        return static_cast<std::size_t>(v);
    }
    return fallback;
}

inline int run_fpn(const RunConfig& cfg, std::ostream& log) {
    std::vector<SweepRow> rows;
    bool all_pass = true;
    nlohmann::json first_cert;
    for (std::size_t i = 0; i < cfg.seeds.size(); ++i) {
        SetStats A = make_set(cfg, cfg.seeds[i]);
        ChangCertificateFpn cert = refined_chang(A, cfg.eps, cfg.policy);
        bool ok = cert.verification.pass && cert.V.dim() <= cert.bound_dim;
        all_pass = all_pass && ok;
        rows.push_back(SweepRow{A.alpha, cfg.eps, cert.V.dim(), cert.bound_dim,
                                static_cast<int>(cert.trace.size()),
                                cert.verification.max_set_form});
        if (i == 0) first_cert = fpn_certificate_json(cert, cfg.trace);
        log << "refine group=" << cfg.group.to_string() << " seed=" << cfg.seeds[i]
            << " alpha=" << A.alpha << " dim=" << cert.V.dim() << " bound=" << cert.bound_dim
            << " pass=" << (ok ? "yes" : "no") << "\n";
    }
    emit_json(cfg, first_cert);
    if (!cfg.csv_path.empty()) {
        std::ostringstream os;
        write_sweep_csv(os, rows);
        write_text(cfg.csv_path, os.str());
    }
    return all_pass ? kExitOk : kExitVerification;
}

inline int run_r1(const RunConfig& cfg, std::ostream& log) {
    bool all_pass = true;
    nlohmann::json first;
    for (std::size_t i = 0; i < cfg.seeds.size(); ++i) {
        SetStats A = make_set(cfg, cfg.seeds[i]);
        DensityMap h(cfg.group, MapKind::density);
        for (std::size_t x = 0; x < cfg.group.order(); ++x)
            h[x] = A.indicator[x] / A.alpha;
        GeneralizedRefinementR1 r1 = generalized_refinement_r1(h, cfg.eps, cfg.policy);
        bool ok = r1.report.measure_form_pass;
        all_pass = all_pass && ok;
        if (i == 0) first = r1_result_json(r1, h);
        log << "refine-r1 group=" << cfg.group.to_string() << " seed=" << cfg.seeds[i]
            << " dim=" << r1.V.dim() << " entropy=" << r1.report.entropy
            << " max_l1=" << r1.report.max_l1 << " pass=" << (ok ? "yes" : "no") << "\n";
    }
    emit_json(cfg, first);
    return all_pass ? kExitOk : kExitVerification;
}

inline int run_abelian(const RunConfig& cfg, std::ostream& log) {
    bool all_pass = true;
    nlohmann::json first;
    std::size_t budget = weight_budget_from_env(cfg.weight_budget);
    for (std::size_t i = 0; i < cfg.seeds.size(); ++i) {
        SetStats A = make_set(cfg, cfg.seeds[i]);
        if (cfg.variant == RunVariant::abelian_classical) {
            AbelianCertificate cert = classical_chang_abelian(A, cfg.eps, cfg.policy);
            bool ok = cert.verification.classical_pass && cert.verification.dissociated;
            all_pass = all_pass && ok;
            if (i == 0) first = abelian_certificate_json(cert);
            log << "abelian-classical group=" << cfg.group.to_string()
                << " seed=" << cfg.seeds[i] << " r=" << cert.generators.size()
                << " bound=" << cert.bound_r << " pass=" << (ok ? "yes" : "no") << "\n";
        } else {
            RefinedAbelianResult res =
                refined_chang_abelian(A, cfg.eps, cfg.policy, budget);
            bool ok = res.certificate.verification.pass;
            all_pass = all_pass && ok;
            if (i == 0) first = abelian_certificate_json(res.certificate, &res.family);
            log << "abelian-refined group=" << cfg.group.to_string() << " seed=" << cfg.seeds[i]
                << " r=" << res.certificate.generators.size()
                << " bound=" << res.certificate.bound_r << " pass=" << (ok ? "yes" : "no")
                << "\n";
        }
    }
    emit_json(cfg, first);
    return all_pass ? kExitOk : kExitVerification;
}

inline int run_counting(const RunConfig& cfg, std::ostream& log) {
    bool all_pass = true;
    std::vector<CountingReport> reports;
    nlohmann::json docs = nlohmann::json::array();
    for (std::uint64_t seed : cfg.seeds) {
        SetStats A = make_set(cfg, seed);
        ChangCertificateFpn cert = refined_chang(A, cfg.eps, cfg.policy);
        CountingContext ctx = build_counting_context(A, cfg.eps, cert.V);
        auto record = [&](const CountingReport& rep, const std::string& tag) {
            all_pass = all_pass && rep.pass && rep.chain_pass;
            reports.push_back(rep);
            docs.push_back(counting_report_json(rep));
            log << "count " << tag << " group=" << cfg.group.to_string() << " seed=" << seed
                << " |Delta|=" << rep.discrepancy << " bound=" << rep.bound
                << " pass=" << (rep.pass && rep.chain_pass ? "yes" : "no") << "\n";
        };
        record(classical_counting_check(ctx), "classical");
        if (cfg.variant == RunVariant::counting_localized) {
            Rng root(seed);
            for (QuadKind kind :
                 {QuadKind::unimodular_phase, QuadKind::real_pm1, QuadKind::complex_disk}) {
                Rng stream = root.child(static_cast<std::uint64_t>(kind));
                for (int t = 0; t < cfg.quadruples; ++t) {
                    WeightQuadruple quad = random_weight_quadruple(
                        cfg.group, ctx.w_cosets, stream.next_u64(), kind);
                    record(localized_counting_check(ctx, quad), to_string(kind));
                }
            }
            WeightQuadruple adv = adversarial_weight_quadruple(ctx, root.child(99).next_u64());
            record(localized_counting_check(ctx, adv), "adversary");
        }
    }
    if (!cfg.out_path.empty()) write_text(cfg.out_path, docs.dump(2) + "\n");
    if (!cfg.csv_path.empty()) {
        std::ostringstream os;
        write_counting_csv(os, reports);
        write_text(cfg.csv_path, os.str());
    }
    return all_pass ? kExitOk : kExitVerification;
}

inline int run_tightness(const RunConfig& cfg, std::ostream& log) {
    if (cfg.sweep.groups.empty() || cfg.sweep.eps_grid.empty())
        throw std::invalid_argument("tightness_sweep: sweep.groups and sweep.eps required");
    struct Job {
        GroupSpec group;
        double eps;
    };
    std::vector<Job> jobs;
    for (const std::string& gs : cfg.sweep.groups) {
        GroupSpec spec = GroupSpec::parse(gs);
        if (!spec.prime_vector())
            throw std::invalid_argument("tightness_sweep: prime-vector groups only");
        for (double e : cfg.sweep.eps_grid) jobs.push_back({spec, e});
    }
    std::vector<TightnessRow> rows(jobs.size());
    parallel_for_index(jobs.size(), [&](std::size_t i) {
        const Job& job = jobs[i];
        SetGeneratorSpec gen = cfg.generator;
        gen.group = job.group;
        gen.seed = cfg.seeds[0];
        if (gen.kind == GeneratorKind::hamming_ball && gen.radius <= 0)
            gen.radius = job.group.prime_vector()->n / 4;
        SetStats A = generate_set(gen);
        ChangCertificateFpn cert = refined_chang(A, job.eps, cfg.policy);
        double ratio = cert.bound_dim > 0
                           ? static_cast<double>(cert.V.dim()) / cert.bound_dim
                           : 0.0;
        rows[i] = TightnessRow{job.group.to_string(), to_string(gen.kind), job.eps,
                               A.alpha,   cert.V.dim(),          cert.bound_dim, ratio};
    });
    std::sort(rows.begin(), rows.end(), [](const TightnessRow& a, const TightnessRow& b) {
        return std::tie(a.group, a.generator, a.eps) < std::tie(b.group, b.generator, b.eps);
    });
    std::ostringstream os;
    write_tightness_csv(os, rows);
    if (!cfg.csv_path.empty())
        write_text(cfg.csv_path, os.str());
    else
        log << os.str();
    bool ok = true;
    for (const TightnessRow& r : rows) ok = ok && r.achieved_dim <= std::max(r.bound, 0);
    return ok ? kExitOk : kExitVerification;
}

}  // namespace detail

/// Dispatch one configured run; returns the process exit code and writes
/// any requested artifacts.
inline int run(const RunConfig& cfg, std::ostream& log = std::cout) {
    set_sweep_threads(cfg.threads);
    switch (cfg.variant) {
        case RunVariant::fpn_refined: return detail::run_fpn(cfg, log);
        case RunVariant::fpn_r1: return detail::run_r1(cfg, log);
        case RunVariant::abelian_classical:
        case RunVariant::abelian_refined: return detail::run_abelian(cfg, log);
        case RunVariant::counting_classical:
        case RunVariant::counting_localized: return detail::run_counting(cfg, log);
        case RunVariant::tightness_sweep: return detail::run_tightness(cfg, log);
    }
    return kExitConfig;
}

/// Re-verify a persisted certificate purely from its JSON document.
inline int verify_document(const nlohmann::json& doc, std::ostream& log = std::cout) {
    std::string format = doc.at("format").get<std::string>();
    if (format == "chang-fpn-certificate/v1") {
        LoadedFpnCertificate c = fpn_certificate_from_json(doc);
        VerificationReport rep = verify_certificate(c.A, c.eps, c.V);
        bool ok = rep.pass && rep.spectrum_contained && c.V.dim() <= c.bound_dim;
        log << "verify fpn group=" << c.A.indicator.spec().to_string() << " dim=" << c.V.dim()
            << " bound=" << c.bound_dim << " max_set_form=" << rep.max_set_form
            << " threshold=" << rep.threshold << " pass=" << (ok ? "yes" : "no") << "\n";
        return ok ? kExitOk : kExitVerification;
    }
    if (format == "chang-fpn-r1/v1") {
        LoadedR1Certificate c = r1_result_from_json(doc);
        RefinementReport rep = refinement_report(c.h, c.V, c.eps);
        rep.max_measure_form = max_measure_form_sweep(c.h, c.V);
        rep.measure_form_pass = rep.max_measure_form <= c.eps + kWitnessGuard;
        bool ok = rep.measure_form_pass;
        log << "verify r1 group=" << c.h.spec().to_string() << " dim=" << c.V.dim()
            << " max_l1=" << rep.max_l1 << " refinement_pass="
            << (rep.refinement_pass ? "yes" : "no") << " pass=" << (ok ? "yes" : "no") << "\n";
        return ok ? kExitOk : kExitVerification;
    }
    if (format == "chang-abelian-certificate/v1") {
        LoadedAbelianCertificate c = abelian_certificate_from_json(doc);
        if (c.variant == AbelianVariant::refined) {
            if (c.weights.empty())
                throw std::invalid_argument("verify: refined certificate without weights");
            WeightFamilyReport rep = verify_weight_family(c.A, c.eps, c.generators, c.weights);
            log << "verify abelian-refined group=" << c.A.indicator.spec().to_string()
                << " r=" << c.generators.size() << " max_score=" << rep.max_score
                << " pass=" << (rep.pass ? "yes" : "no") << "\n";
            return rep.pass ? kExitOk : kExitVerification;
        }
        // Classical: the span sweep plus dissociativity, recomputed.
        const GroupSpec& spec = c.A.indicator.spec();
        SpanSet span(spec);
        for (std::size_t g : c.generators) span.extend(g);
        std::vector<double> corr = mu_correlations(c.A.measure());
        double max_score = 0.0;
        bool any = false;
        for (std::size_t eta = 0; eta < spec.order(); ++eta) {
            if (span.contains(eta)) continue;
            any = true;
            max_score = std::max(max_score, corr[eta]);
        }
        bool ok = (!any || max_score <= c.eps + kCertSlack) &&
                  is_dissociated(spec, c.generators);
        log << "verify abelian-classical group=" << spec.to_string()
            << " r=" << c.generators.size() << " max_score=" << max_score
            << " pass=" << (ok ? "yes" : "no") << "\n";
        return ok ? kExitOk : kExitVerification;
    }
    throw std::invalid_argument("verify: unknown format tag \"" + format + "\"");
}

/// Hidden fixture helper: evaluates one oracle on inputs described by a
/// JSON document and returns the result as JSON.
inline nlohmann::json oracle_document(const nlohmann::json& req) {
    std::string op = req.at("op").get<std::string>();
    GroupSpec spec = GroupSpec::parse(req.at("group").get<std::string>());
    if (op == "dft_naive") {
        DensityMap f(spec, MapKind::generic, req.at("values").get<std::vector<double>>());
        FourierCoefficients F = oracle::dft_naive(f);
        nlohmann::json vals = nlohmann::json::array();
        for (const auto& z : F.values) vals.push_back(complex_json(z));
        return {{"op", op}, {"coefficients", vals}};
    }
    if (op == "lambda4_direct") {
        std::vector<DensityMap> f;
        for (int i = 0; i < 4; ++i)
            f.emplace_back(spec, MapKind::generic,
                           req.at("values").at(i).get<std::vector<double>>());
        return {{"op", op}, {"lambda4", complex_json(oracle::lambda4_direct(f[0], f[1], f[2], f[3]))}};
    }
    if (op == "span_enumerate") {
        std::vector<std::size_t> members = oracle::span_enumerate_naive(
            spec, req.at("delta").get<std::vector<std::size_t>>());
        std::sort(members.begin(), members.end());
        return {{"op", op}, {"members", members}};
    }
    if (op == "minimal_subspace") {
        SetStats A = SetStats::from_indices(spec, req.at("set").get<std::vector<std::size_t>>());
        SubspaceFp v = oracle::minimal_refined_subspace(A, req.at("eps").get<double>());
        return {{"op", op}, {"subspace", subspace_json(v)}};
    }
    throw std::invalid_argument("oracle: unknown op \"" + op + "\"");
}

}  // namespace chang::cli
