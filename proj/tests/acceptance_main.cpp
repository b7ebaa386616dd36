// Acceptance gate. Each criterion prints one [PASS] line; the first
// violated requirement prints [FAIL] with its location and exits nonzero.
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include <chang/chang.hpp>

namespace {

// Always-on requirement: never compiled out in Release.
#define REQUIRE(cond, msg)                                                      \
    do {                                                                        \
        if (!(cond)) {                                                          \
            std::cerr << "[FAIL] " << __FILE__ << ":" << __LINE__ << " " << msg \
                      << "\n";                                                  \
            std::exit(1);                                                       \
        }                                                                       \
    } while (0)

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

constexpr double kSlack = 1e-9;

struct FpnRun {
    chang::SetStats A;
    double eps;
    chang::ChangCertificateFpn cert;
    std::string bytes;  // serialized certificate, no trace
};

std::vector<FpnRun> g_runs;  // produced by criterion 1, reused by 2 and 8

chang::SetStats random_set(const chang::GroupSpec& spec, double density, std::uint64_t seed) {
    chang::SetGeneratorSpec gen;
    gen.group = spec;
    gen.kind = chang::GeneratorKind::random_density;
    gen.density = density;
    gen.seed = seed;
    return chang::generate_set(gen);
}

chang::SetStats subspace_set(const chang::GroupSpec& spec, int k) {
    chang::SetGeneratorSpec gen;
    gen.group = spec;
    gen.kind = chang::GeneratorKind::subspace;
    int n = spec.prime_vector()->n;
    for (int i = 0; i < k; ++i) {
        std::vector<int> row(static_cast<std::size_t>(n), 0);
        row[static_cast<std::size_t>(i)] = 1;
        gen.basis.push_back(row);
    }
    return chang::generate_set(gen);
}

void criterion_1_dimension_and_drops() {
    auto t0 = Clock::now();
    chang::set_sweep_threads(1);
    chang::GroupSpec spec({2, 2, 2, 2, 2, 2, 2, 2, 2, 2});
    const double eps_grid[] = {0.3, 0.5, 0.7};
    for (int i = 0; i < 50; ++i) {
        double density = 1.0 / 16.0 + (3.0 / 16.0) * i / 49.0;
        chang::SetStats A = random_set(spec, density, 1000 + static_cast<std::uint64_t>(i));
        REQUIRE(A.alpha >= 1.0 / 16.0 - 1e-12 && A.alpha <= 0.25 + 1e-12,
                "alpha outside [1/16, 1/4]");
        for (double eps : eps_grid) {
            chang::ChangCertificateFpn cert =
                chang::refined_chang(A, eps, chang::WitnessPolicy::max_violation);
            REQUIRE(cert.bound_dim == chang::dimension_bound(eps, A.alpha),
                    "stored bound differs from floor(2 eps^-2 ln(1/alpha))");
            REQUIRE(cert.V.dim() <= cert.bound_dim, "dim V exceeds the dimension bound");
            for (const chang::IterationStep& step : cert.trace) {
                double drop = step.psi_before - step.psi_after;
                REQUIRE(drop >= eps * eps / 2.0 - kSlack, "per-step Psi drop below eps^2/2");
            }
            std::string bytes = chang::fpn_certificate_json(cert, false).dump(2);
            g_runs.push_back(FpnRun{A, eps, std::move(cert), std::move(bytes)});
        }
    }
    double dt = seconds_since(t0);
    REQUIRE(dt < 60.0, "criterion 1 exceeded 60 s");
    std::cout << "[PASS] 1 dimension/iteration bound: 150 runs, " << dt << " s\n";
}

void criterion_2_exhaustive_verification() {
    chang::GroupSpec spec({2, 2, 2, 2, 2, 2, 2, 2, 2, 2});
    chang::CoordsTable coords(spec);
    for (const FpnRun& run : g_runs) {
        chang::VerificationReport rep =
            chang::verify_certificate(run.A, run.eps, run.cert.V);
        std::size_t inside = std::size_t{1} << run.cert.V.dim();
        REQUIRE(rep.checked == spec.order() - inside, "sweep did not cover all outside xi");
        REQUIRE(rep.pass, "verification sweep failed");
        REQUIRE(rep.max_set_form <= run.eps * run.A.alpha + kSlack,
                "residual above eps*alpha + 1e-9");
        REQUIRE(rep.spectrum_contained, "Spec_eps(A) escapes V");
        for (std::size_t xi : chang::spectrum(run.A, run.eps)) {
            std::vector<int> x(coords[xi].begin(), coords[xi].end());
            REQUIRE(run.cert.V.contains(x), "spectrum element outside V");
        }
    }
    std::cout << "[PASS] 2 exhaustive verification: " << g_runs.size()
              << " certificates re-checked\n";
}

void criterion_3_subspace_fixed_point() {
    chang::GroupSpec spec8({2, 2, 2, 2, 2, 2, 2, 2});
    for (int k : {2, 4, 6}) {
        chang::SetStats A = subspace_set(spec8, k);
        chang::SubspaceFp W = chang::SubspaceFp::span(2, 8, [&] {
            std::vector<std::vector<int>> rows;
            for (int i = 0; i < k; ++i) {
                std::vector<int> row(8, 0);
                row[static_cast<std::size_t>(i)] = 1;
                rows.push_back(row);
            }
            return rows;
        }());
        for (chang::WitnessPolicy policy : {chang::WitnessPolicy::first_in_canonical_order,
                                            chang::WitnessPolicy::max_violation}) {
            chang::ChangCertificateFpn cert = chang::refined_chang(A, 0.5, policy);
            REQUIRE(cert.V == W.annihilator(), "V is not exactly A^perp");
            REQUIRE(cert.verification.pass, "fixed-point certificate failed verification");
        }
    }
    // Downscaled minimality: no subspace of smaller dimension passes.
    chang::GroupSpec spec6({2, 2, 2, 2, 2, 2});
    chang::SetStats A6 = subspace_set(spec6, 4);
    chang::ChangCertificateFpn cert6 =
        chang::refined_chang(A6, 0.5, chang::WitnessPolicy::max_violation);
    chang::SubspaceFp minimal = chang::oracle::minimal_refined_subspace(A6, 0.5);
    REQUIRE(cert6.V.dim() == 2, "k=4 in F_2^6 should give dim V = 2");
    REQUIRE(minimal.dim() == cert6.V.dim(), "oracle found a smaller passing subspace");
    std::cout << "[PASS] 3 subspace fixed point: V = A^perp for k in {2,4,6}, minimal dim "
              << minimal.dim() << " confirmed\n";
}

void criterion_4_fourier_oracle_equivalence() {
    std::vector<chang::GroupSpec> groups = {
        chang::GroupSpec::parse("2^6"), chang::GroupSpec::parse("3^4"),
        chang::GroupSpec::parse("6"), chang::GroupSpec::parse("12x5")};
    chang::Rng root(40);
    for (const chang::GroupSpec& spec : groups) {
        for (int trial = 0; trial < 10; ++trial) {
            chang::Rng rng = root.child(static_cast<std::uint64_t>(trial) * 131 + spec.order());
            std::vector<chang::DensityMap> f;
            for (int i = 0; i < 4; ++i) {
                chang::DensityMap m(spec, chang::MapKind::generic);
                for (std::size_t x = 0; x < spec.order(); ++x) m[x] = rng.next_double();
                f.push_back(std::move(m));
            }
            for (const chang::DensityMap& m : f) {
                chang::FourierCoefficients fast = chang::dft(m);
                chang::FourierCoefficients slow = chang::oracle::dft_naive(m);
                double scale = 1.0;
                for (const auto& z : slow.values) scale = std::max(scale, std::abs(z));
                for (std::size_t xi = 0; xi < spec.order(); ++xi)
                    REQUIRE(std::abs(fast[xi] - slow[xi]) <= 1e-10 * scale,
                            "dft vs dft_naive beyond 1e-10");
                REQUIRE(chang::parseval_gap(m) <= 1e-10, "Parseval gap above 1e-10");
            }
            std::complex<double> fast = chang::lambda4(f[0], f[1], f[2], f[3]);
            std::complex<double> slow = chang::oracle::lambda4_direct(f[0], f[1], f[2], f[3]);
            REQUIRE(std::abs(fast - slow) <= 1e-9 * std::max(1.0, std::abs(slow)),
                    "Lambda4 identity vs direct count beyond 1e-9");
        }
    }
    std::cout << "[PASS] 4 Fourier/oracle equivalence: 4 groups x 10 quadruples\n";
}

void check_chain(const chang::CountingReport& rep, double bound) {
    REQUIRE(rep.pass, "counting pass flag false");
    REQUIRE(rep.chain_pass, "chain flag false");
    REQUIRE(rep.discrepancy <= bound + kSlack, "|Delta| above eps^2 alpha^3 + 1e-9");
    REQUIRE(rep.chain_lambda4 <= rep.chain_sup_parseval + kSlack, "chain: lambda4 step");
    REQUIRE(rep.chain_sup_parseval <= rep.chain_meansq + kSlack, "chain: Parseval step");
    REQUIRE(rep.chain_meansq <= rep.chain_eps_alpha + kSlack, "chain: mean-square step");
    REQUIRE(rep.chain_eps_alpha <= bound + kSlack, "chain: eps-alpha step");
    REQUIRE(rep.discrepancy <= rep.chain_meansq + kSlack, "|Delta| above its chain majorant");
    REQUIRE(rep.max_lift_deviation <= 1e-12, "lifted gamma integrality drift");
    REQUIRE(rep.max_parseval_err <= 1e-10, "per-coset Parseval drift");
}

void criterion_5_localized_counting() {
    auto t0 = Clock::now();
    chang::GroupSpec spec({2, 2, 2, 2, 2, 2, 2, 2, 2});
    chang::SetStats A = random_set(spec, 0.125, 501);
    REQUIRE(A.alpha == 0.125, "alpha not exactly 1/8");
    chang::ChangCertificateFpn cert =
        chang::refined_chang(A, 0.5, chang::WitnessPolicy::max_violation);
    chang::CountingContext ctx = chang::build_counting_context(A, 0.5, cert.V);
    const double bound = 0.25 / 512.0;
    REQUIRE(std::abs(ctx.bound - bound) <= 1e-18, "bound is not 0.25/512");

    int checks = 0;
    check_chain(chang::classical_counting_check(ctx), bound);
    ++checks;
    chang::Rng root(7);
    for (chang::QuadKind kind : {chang::QuadKind::unimodular_phase, chang::QuadKind::real_pm1,
                                 chang::QuadKind::complex_disk}) {
        chang::Rng stream = root.child(static_cast<std::uint64_t>(kind));
        for (int t = 0; t < 100; ++t) {
            chang::WeightQuadruple quad = chang::random_weight_quadruple(
                spec, ctx.w_cosets, stream.next_u64(), kind);
            check_chain(chang::localized_counting_check(ctx, quad), bound);
            ++checks;
        }
    }
    chang::WeightQuadruple adv =
        chang::adversarial_weight_quadruple(ctx, root.child(99).next_u64());
    check_chain(chang::localized_counting_check(ctx, adv), bound);
    ++checks;
    REQUIRE(checks >= 301, "fewer than 301 counting checks");
    double dt = seconds_since(t0);
    REQUIRE(dt < 120.0, "criterion 5 exceeded 120 s");
    std::cout << "[PASS] 5 localized counting: " << checks << " checks, " << dt << " s\n";
}

void criterion_6_abelian_refined() {
    // Seeds picked so each instance performs at least one split; a flat
    // correlation profile would satisfy every bound vacuously.
    const std::pair<const char*, std::uint64_t> instances[] = {{"12x5", 6}, {"2x9x5", 45}};
    for (auto [name, seed] : instances) {
        chang::GroupSpec spec = chang::GroupSpec::parse(name);
        chang::SetStats A = random_set(spec, 0.2, seed);
        const double eps = 0.6;
        chang::RefinedAbelianResult res = chang::refined_chang_abelian(A, eps);
        const chang::AbelianCertificate& cert = res.certificate;
        int r = static_cast<int>(cert.generators.size());
        REQUIRE(r >= 1, "instance did not refine; criterion would be vacuous");
        REQUIRE(cert.bound_r == chang::dimension_bound(eps, A.alpha),
                "stored bound_r differs from floor(2 eps^-2 ln(1/alpha))");
        REQUIRE(r <= cert.bound_r, "r exceeds the dimension bound");

        chang::WeightFamilyReport rep = chang::verify_weight_family(A, eps, res.family);
        REQUIRE(rep.min_weight >= -1e-12, "negative weight");
        REQUIRE(rep.max_mean_error <= 1e-10, "weight mean drifts from 1");
        REQUIRE(rep.max_pointwise_error <= 1e-10, "pointwise average drifts from 1");
        REQUIRE(rep.max_outside_fourier <= 1e-10, "Fourier mass escapes <Delta>");
        REQUIRE(rep.dissociated, "Delta not dissociated under the exhaustive 3^r sweep");
        REQUIRE(rep.max_score <= eps + kSlack, "terminal sweep above eps + 1e-9");
        REQUIRE(rep.pass, "weight family report failed");

        REQUIRE(cert.potentials.size() == static_cast<std::size_t>(r) + 1,
                "potential trace length mismatch");
        for (std::size_t i = 0; i + 1 < cert.potentials.size(); ++i) {
            double gain = cert.potentials[i + 1] - cert.potentials[i];
            REQUIRE(gain > eps * eps / 2.0 - kSlack, "Phi gain at or below eps^2/2");
        }
        REQUIRE(cert.potentials.back() <= std::log(1.0 / A.alpha) + kSlack,
                "Phi exceeds ln(1/alpha)");
        std::cout << "[PASS] 6 abelian refined certificate: " << name << " r=" << r
                  << " bound=" << cert.bound_r << "\n";
    }
}

void criterion_7_one_round_closed_form() {
    chang::GroupSpec spec({5});
    chang::SetStats A = chang::SetStats::from_indices(spec, {0, 1});
    chang::RefinedAbelianResult res = chang::refined_chang_abelian(A, 0.7);
    const chang::AbelianCertificate& cert = res.certificate;
    REQUIRE(cert.trace.size() == 1, "instance should refine in exactly one round");
    REQUIRE(cert.trace[0].witness == 1, "witness should be eta = 1 by tie-break");
    double c = std::cos(std::acos(-1.0) / 5.0);
    double phi1 = cert.potentials.back();
    double expected =
        (1.0 + c) / 2.0 * std::log(1.0 + c) + (1.0 - c) / 2.0 * std::log(1.0 - c);
    REQUIRE(std::abs(phi1 - expected) <= 1e-10, "Phi_1 differs from the chord entropy");
    REQUIRE(phi1 >= c * c / 2.0, "Phi_1 below c^2/2");
    std::cout << "[PASS] 7 one-round closed form: Phi_1 = " << phi1 << "\n";
}

void criterion_8_determinism() {
    for (int threads : {4, 1}) {
        chang::set_sweep_threads(threads);
        for (const FpnRun& run : g_runs) {
            chang::ChangCertificateFpn cert =
                chang::refined_chang(run.A, run.eps, chang::WitnessPolicy::max_violation);
            std::string bytes = chang::fpn_certificate_json(cert, false).dump(2);
            REQUIRE(bytes == run.bytes, "certificate bytes changed on re-run");
        }
    }
    std::cout << "[PASS] 8 determinism: 150 certificates byte-identical at 1 and 4 threads\n";
}

}  // namespace

int main() {
    criterion_1_dimension_and_drops();
    criterion_2_exhaustive_verification();
    criterion_3_subspace_fixed_point();
    criterion_4_fourier_oracle_equivalence();
    criterion_5_localized_counting();
    criterion_6_abelian_refined();
    criterion_7_one_round_closed_form();
    criterion_8_determinism();
    std::cout << "acceptance: all criteria passed\n";
    return 0;
}
