#pragma once

#include <complex>
#include <cstddef>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "chang/chang_abelian.hpp"
#include "chang/chang_fpn.hpp"
#include "chang/counting.hpp"
#include "chang/dense_map.hpp"
#include "chang/group.hpp"
#include "chang/subspace.hpp"

namespace chang {

inline nlohmann::json complex_json(std::complex<double> z) {
    return nlohmann::json::array({z.real(), z.imag()});
}

inline std::complex<double> complex_from_json(const nlohmann::json& j) {
    return {j.at(0).get<double>(), j.at(1).get<double>()};
}

inline nlohmann::json subspace_json(const SubspaceFp& v) {
    return {{"p", v.p()}, {"n", v.n()}, {"rows", v.basis()}};
}

inline SubspaceFp subspace_from_json(const nlohmann::json& j) {
    return SubspaceFp::span(j.at("p").get<int>(), j.at("n").get<int>(),
                            j.at("rows").get<std::vector<std::vector<int>>>());
}

inline nlohmann::json density_map_json(const DensityMap& f) {
    return {{"group", f.spec().to_string()},
            {"kind", to_string(f.kind())},
            {"values", f.values()}};
}

inline DensityMap density_map_from_json(const nlohmann::json& j) {
    GroupSpec spec = GroupSpec::parse(j.at("group").get<std::string>());
    return DensityMap(spec, map_kind_from_string(j.at("kind").get<std::string>()),
                      j.at("values").get<std::vector<double>>());
}

inline nlohmann::json complex_map_json(const ComplexMap& f) {
    nlohmann::json vals = nlohmann::json::array();
    for (const auto& z : f.values()) vals.push_back(complex_json(z));
    return {{"group", f.spec().to_string()}, {"kind", to_string(f.kind())}, {"values", vals}};
}

inline ComplexMap complex_map_from_json(const nlohmann::json& j) {
    GroupSpec spec = GroupSpec::parse(j.at("group").get<std::string>());
    std::vector<std::complex<double>> vals;
    for (const auto& e : j.at("values")) vals.push_back(complex_from_json(e));
    return ComplexMap(spec, map_kind_from_string(j.at("kind").get<std::string>()),
                      std::move(vals));
}

inline nlohmann::json verification_json(const VerificationReport& r) {
    return {{"checked", r.checked},
            {"max_set_form", r.max_set_form},
            {"mean_set_form", r.mean_set_form},
            {"max_measure_form", r.max_measure_form},
            {"argmax", r.argmax},
            {"threshold", r.threshold},
            {"pass", r.pass},
            {"spectrum_contained", r.spectrum_contained}};
}

inline nlohmann::json fpn_certificate_json(const ChangCertificateFpn& cert,
                                           bool with_trace = false) {
    nlohmann::json steps = nlohmann::json::array();
    for (const IterationStep& s : cert.trace) {
        nlohmann::json step = {{"index", s.index},
                               {"witness", s.witness},
                               {"score", s.score},
                               {"psi_before", s.psi_before},
                               {"psi_after", s.psi_after}};
        if (with_trace) {
            nlohmann::json phase = nlohmann::json::array();
            for (const auto& z : s.phase) phase.push_back(complex_json(z));
            step["phase"] = phase;
            step["test_function"] = s.test_function.values();
        }
        steps.push_back(step);
    }
    nlohmann::json out = {{"format", "chang-fpn-certificate/v1"},
                          {"group", cert.A.indicator.spec().to_string()},
                          {"eps", cert.eps},
                          {"policy", to_string(cert.policy)},
                          {"set", cert.A.indices()},
                          {"subspace", subspace_json(cert.V)},
                          {"bound_dim", cert.bound_dim},
                          {"potentials", cert.potentials.values},
                          {"steps", steps},
                          {"verification", verification_json(cert.verification)}};
    if (with_trace) out["nu_final"] = cert.nu_final.values();
    return out;
}

struct LoadedFpnCertificate {
    SetStats A;
    double eps = 0.0;
    WitnessPolicy policy = WitnessPolicy::max_violation;
    SubspaceFp V;
    int bound_dim = 0;
    bool stored_pass = false;
};

inline LoadedFpnCertificate fpn_certificate_from_json(const nlohmann::json& j) {
    if (j.at("format").get<std::string>() != "chang-fpn-certificate/v1")
        throw std::invalid_argument("fpn_certificate_from_json: unexpected format tag");
    GroupSpec spec = GroupSpec::parse(j.at("group").get<std::string>());
    return LoadedFpnCertificate{
        SetStats::from_indices(spec, j.at("set").get<std::vector<std::size_t>>()),
        j.at("eps").get<double>(),
        witness_policy_from_string(j.at("policy").get<std::string>()),
        subspace_from_json(j.at("subspace")),
        j.at("bound_dim").get<int>(),
        j.at("verification").at("pass").get<bool>()};
}

inline nlohmann::json r1_result_json(const GeneralizedRefinementR1& r1, const DensityMap& h) {
    nlohmann::json steps = nlohmann::json::array();
    for (const IterationStep& s : r1.trace)
        steps.push_back({{"index", s.index},
                         {"witness", s.witness},
                         {"score", s.score},
                         {"psi_before", s.psi_before},
                         {"psi_after", s.psi_after}});
    return {{"format", "chang-fpn-r1/v1"},
            {"group", h.spec().to_string()},
            {"eps", r1.potentials.epsilon},
            {"h", h.values()},
            {"subspace", subspace_json(r1.V)},
            {"potentials", r1.potentials.values},
            {"steps", steps},
            {"report",
             {{"entropy", r1.report.entropy},
              {"dim_bound", r1.report.dim_bound},
              {"checked", r1.report.checked},
              {"max_l1", r1.report.max_l1},
              {"argmax", r1.report.argmax},
              {"refinement_pass", r1.report.refinement_pass},
              {"max_measure_form", r1.report.max_measure_form},
              {"measure_form_pass", r1.report.measure_form_pass}}}};
}

struct LoadedR1Certificate {
    DensityMap h;
    double eps = 0.0;
    SubspaceFp V;
    bool stored_pass = false;
};

inline LoadedR1Certificate r1_result_from_json(const nlohmann::json& j) {
    if (j.at("format").get<std::string>() != "chang-fpn-r1/v1")
        throw std::invalid_argument("r1_result_from_json: unexpected format tag");
    GroupSpec spec = GroupSpec::parse(j.at("group").get<std::string>());
    return LoadedR1Certificate{
        DensityMap(spec, MapKind::density, j.at("h").get<std::vector<double>>()),
        j.at("eps").get<double>(), subspace_from_json(j.at("subspace")),
        j.at("report").at("measure_form_pass").get<bool>()};
}

inline nlohmann::json abelian_verification_json(const AbelianVerification& r) {
    return {{"checked", r.checked},
            {"max_score", r.max_score},
            {"mean_score", r.mean_score},
            {"argmax", r.argmax},
            {"classical_max", r.classical_max},
            {"dissociated", r.dissociated},
            {"pass", r.pass},
            {"classical_pass", r.classical_pass}};
}

/// For refined certificates pass the family so the weights are persisted;
/// the reloaded JSON then re-verifies from disk alone.
inline nlohmann::json abelian_certificate_json(const AbelianCertificate& cert,
                                               const WeightFamily* family = nullptr) {
    nlohmann::json steps = nlohmann::json::array();
    for (const AbelianStep& s : cert.trace)
        steps.push_back({{"index", s.index},
                         {"witness", s.witness},
                         {"score", s.score},
                         {"potential_before", s.potential_before},
                         {"potential_after", s.potential_after}});
    nlohmann::json out = {{"format", "chang-abelian-certificate/v1"},
                          {"variant", to_string(cert.variant)},
                          {"group", cert.A.indicator.spec().to_string()},
                          {"eps", cert.eps},
                          {"policy", to_string(cert.policy)},
                          {"set", cert.A.indices()},
                          {"generators", cert.generators},
                          {"bound_r", cert.bound_r},
                          {"potentials", cert.potentials},
                          {"steps", steps},
                          {"verification", abelian_verification_json(cert.verification)}};
    if (family) {
        nlohmann::json weights = nlohmann::json::object();
        int r = family->r();
        for (std::size_t s = 0; s < family->weights.size(); ++s)
            weights[sigma_to_string(s, r)] = family->weights[s].values();
        out["weights"] = weights;
        out["masses"] = family->masses;
    }
    return out;
}

struct LoadedAbelianCertificate {
    AbelianVariant variant = AbelianVariant::classical;
    SetStats A;
    double eps = 0.0;
    WitnessPolicy policy = WitnessPolicy::max_violation;
    std::vector<std::size_t> generators;
    std::vector<DensityMap> weights;  // empty unless persisted
    bool stored_pass = false;
};

inline LoadedAbelianCertificate abelian_certificate_from_json(const nlohmann::json& j) {
    if (j.at("format").get<std::string>() != "chang-abelian-certificate/v1")
        throw std::invalid_argument("abelian_certificate_from_json: unexpected format tag");
    GroupSpec spec = GroupSpec::parse(j.at("group").get<std::string>());
    LoadedAbelianCertificate out{
        abelian_variant_from_string(j.at("variant").get<std::string>()),
        SetStats::from_indices(spec, j.at("set").get<std::vector<std::size_t>>()),
        j.at("eps").get<double>(),
        witness_policy_from_string(j.at("policy").get<std::string>()),
        j.at("generators").get<std::vector<std::size_t>>(),
        {},
        j.at("verification").at("pass").get<bool>()};
    if (j.contains("weights")) {
        int r = static_cast<int>(out.generators.size());
        out.weights.reserve(std::size_t{1} << r);
        for (std::size_t s = 0; s < (std::size_t{1} << r); ++s)
            out.weights.emplace_back(spec, MapKind::weight,
                                     j.at("weights")
                                         .at(sigma_to_string(s, r))
                                         .get<std::vector<double>>());
    }
    return out;
}

inline nlohmann::json counting_report_json(const CountingReport& rep) {
    nlohmann::json table = nlohmann::json::array();
    for (const GammaDiagnostic& d : rep.table)
        table.push_back({{"lift", d.lift}, {"mean_a", d.mean_a}, {"mean_a_sq", d.mean_a_sq}});
    return {{"format", "chang-counting-report/v1"},
            {"alpha", rep.alpha},
            {"eps", rep.eps},
            {"codim", rep.codim},
            {"lambda_indicator", complex_json(rep.lambda_indicator)},
            {"lambda_g", complex_json(rep.lambda_g)},
            {"discrepancy", rep.discrepancy},
            {"bound", rep.bound},
            {"table", table},
            {"chain",
             {{"lambda4", rep.chain_lambda4},
              {"sup_parseval", rep.chain_sup_parseval},
              {"meansq", rep.chain_meansq},
              {"eps_alpha", rep.chain_eps_alpha}}},
            {"max_nontrivial_mean_a", rep.max_nontrivial_mean_a},
            {"sum_mean_a_sq", rep.sum_mean_a_sq},
            {"max_lift_deviation", rep.max_lift_deviation},
            {"max_parseval_err", rep.max_parseval_err},
            {"l1_norms", rep.l1_norms},
            {"chain_pass", rep.chain_pass},
            {"pass", rep.pass}};
}

/// CSV cells for doubles: %.17g round-trips exactly and is byte-stable.
inline std::string csv_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

struct SweepRow {
    double alpha = 0.0;
    double eps = 0.0;
    int dim = 0;
    int bound = 0;
    int steps = 0;
    double max_residual = 0.0;
};

inline void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
    os << "# chang-sweep-csv v1\n";
    os << "alpha,eps,dim,bound,steps,max_residual\n";
    for (const SweepRow& r : rows)
        os << csv_double(r.alpha) << ',' << csv_double(r.eps) << ',' << r.dim << ',' << r.bound
           << ',' << r.steps << ',' << csv_double(r.max_residual) << '\n';
}

struct TightnessRow {
    std::string group;
    std::string generator;
    double eps = 0.0;
    double alpha = 0.0;
    int achieved_dim = 0;
    int bound = 0;
    double ratio = 0.0;  // achieved_dim / bound, 0 when bound is 0
};

inline void write_tightness_csv(std::ostream& os, const std::vector<TightnessRow>& rows) {
    os << "# chang-tightness-csv v1\n";
    os << "group,generator,eps,alpha,achieved_dim,bound,ratio\n";
    for (const TightnessRow& r : rows)
        os << r.group << ',' << r.generator << ',' << csv_double(r.eps) << ','
           << csv_double(r.alpha) << ',' << r.achieved_dim << ',' << r.bound << ','
           << csv_double(r.ratio) << '\n';
}

inline void write_counting_csv(std::ostream& os, const std::vector<CountingReport>& rows) {
    os << "# chang-counting-csv v1\n";
    os << "alpha,eps,codim,discrepancy,bound,max_nontrivial_mean_a,l1_q1,l1_q2,l1_q3,l1_q4\n";
    for (const CountingReport& r : rows) {
        os << csv_double(r.alpha) << ',' << csv_double(r.eps) << ',' << r.codim << ','
           << csv_double(r.discrepancy) << ',' << csv_double(r.bound) << ','
           << csv_double(r.max_nontrivial_mean_a);
        for (double v : r.l1_norms) os << ',' << csv_double(v);
        os << '\n';
    }
}

}  // namespace chang
