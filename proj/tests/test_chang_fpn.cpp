#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <vector>

#include <chang/chang_fpn.hpp>
#include <chang/divergence.hpp>
#include <chang/fourier.hpp>
#include <chang/generators.hpp>
#include <chang/rng.hpp>

using namespace chang;

namespace {

SetStats subspace_set(const GroupSpec& spec, const SubspaceFp& w) {
    std::vector<std::size_t> idx;
    for (std::size_t x = 0; x < spec.order(); ++x)
        if (w.contains(spec.element_at(x).coords)) idx.push_back(x);
    return SetStats::from_indices(spec, idx);
}

SetStats whole_group(const GroupSpec& spec) {
    std::vector<std::size_t> all(spec.order());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    return SetStats::from_indices(spec, all);
}

std::vector<int> coords_of(const GroupSpec& spec, std::size_t x) {
    return spec.element_at(x).coords;
}

SetStats random_density_set(const std::string& group, double density, std::uint64_t seed) {
    SetGeneratorSpec gen;
    gen.group = GroupSpec::parse(group);
    gen.kind = GeneratorKind::random_density;
    gen.density = density;
    gen.seed = seed;
    return generate_set(gen);
}

}  // namespace

TEST_CASE("kl divergence examples") {
    GroupSpec f23 = GroupSpec::parse("2^3");
    DensityMap u = uniform_measure(f23);
    CHECK(kl_divergence(u, u) == 0.0);

    DensityMap point(f23, MapKind::probability_measure);
    point[3] = 1.0;
    CHECK(std::abs(kl_divergence(point, u) - std::log(8.0)) < 1e-12);

    GroupSpec f24 = GroupSpec::parse("2^4");
    DensityMap p2(f24, MapKind::probability_measure);
    p2[0] = 1.0;
    CHECK(std::abs(kl_divergence(p2, uniform_measure(f24)) - std::log(16.0)) < 1e-12);

    // KL against a restricted-support target: D(mu_A || uniform) = ln(1/alpha).
    SubspaceFp w = SubspaceFp::span(2, 4, {{1, 0, 0, 0}, {0, 1, 0, 0}});
    SetStats ws = subspace_set(f24, w);
    CHECK(std::abs(kl_divergence(ws.measure(), uniform_measure(f24)) - std::log(4.0)) < 1e-12);
}

TEST_CASE("chord entropy dominates the quadratic") {
    CHECK(chord_entropy(0.0) == 0.0);
    for (int k = 1; k < 100; ++k) {
        double t = static_cast<double>(k) / 100.0;
        CHECK(chord_entropy(t) >= t * t / 2.0);
    }
    double c = 0.809016994374947424;  // cos(pi/5)
    double expect = (1.0 + c) / 2.0 * std::log1p(c) + (1.0 - c) / 2.0 * std::log(1.0 - c);
    CHECK(std::abs(chord_entropy(c) - expect) < 1e-15);
}

TEST_CASE("entropy functional examples") {
    GroupSpec spec = GroupSpec::parse("2^5");
    DensityMap flat(spec, MapKind::density, 1.0);
    CHECK(entropy_functional(flat) == 0.0);

    SubspaceFp w = SubspaceFp::span(2, 5, {{1, 0, 0, 0, 0}});
    SetStats ws = subspace_set(spec, w);
    DensityMap h(spec, MapKind::density);
    for (std::size_t x = 0; x < spec.order(); ++x) h[x] = ws.indicator[x] / ws.alpha;
    CHECK(std::abs(entropy_functional(h) - std::log(1.0 / ws.alpha)) < 1e-12);
}

TEST_CASE("dimension bound and iteration cap") {
    CHECK(dimension_bound(0.5, 0.125) == 16);
    CHECK(dimension_bound(1.0, 1.0) == 0);
    CHECK(dimension_bound(0.3, 0.125) == 46);
    CHECK(iteration_cap_psi(0.5, std::log(8.0)) == 18);
    CHECK(iteration_cap(0.5, 0.125) == iteration_cap_psi(0.5, std::log(8.0)));
    // The cap exceeds the dimension bound so the loop can always reach it.
    for (double eps : {0.3, 0.5, 0.7})
        for (double alpha : {0.5, 0.125, 0.01})
            CHECK(iteration_cap(eps, alpha) > dimension_bound(eps, alpha));
}

TEST_CASE("find witness examples") {
    GroupSpec spec = GroupSpec::parse("2^6");
    SubspaceFp v0 = SubspaceFp::zero(2, 6);

    // Uniform measure: every score off zero vanishes, no witness.
    CHECK_FALSE(find_witness(uniform_measure(spec), v0, 0.5,
                             WitnessPolicy::max_violation).has_value());

    // Subspace measure: every xi in W^perp minus {0} scores exactly 1.
    SubspaceFp w = SubspaceFp::span(2, 6, {{1, 0, 0, 0, 0, 0}, {0, 1, 0, 0, 0, 0}});
    SubspaceFp ann = w.annihilator();
    DensityMap mu = subspace_set(spec, w).measure();
    auto hit = find_witness(mu, v0, 0.5, WitnessPolicy::max_violation);
    REQUIRE(hit.has_value());
    CHECK(ann.contains(coords_of(spec, hit->first)));
    CHECK(std::abs(hit->second - 1.0) < 1e-12);
    auto first = find_witness(mu, v0, 0.5, WitnessPolicy::first_in_canonical_order);
    REQUIRE(first.has_value());
    CHECK(ann.contains(coords_of(spec, first->first)));

    // Once V = W^perp the sweep is clean.
    CHECK_FALSE(find_witness(mu, ann, 0.5, WitnessPolicy::max_violation).has_value());
}

TEST_CASE("build test function examples") {
    GroupSpec spec = GroupSpec::parse("2^5");
    CosetMap one_fiber = coset_map(spec, SubspaceFp::zero(2, 5).annihilator());
    CoordsTable coords(spec);

    // Zero-correlation fiber: phi = 1 and d(x) = Re(conj(chi_xi(x))).
    DensityMap u = uniform_measure(spec);
    std::size_t xi = 3;
    TestFunction t = build_test_function(u, one_fiber, xi);
    REQUIRE(t.phase.size() == 1);
    CHECK(std::abs(t.phase[0] - std::complex<double>(1.0, 0.0)) < 1e-12);
    ConjCharacter chi(spec, xi);
    double mean_u = 0.0;
    for (std::size_t x = 0; x < spec.order(); ++x) {
        CHECK(std::abs(t.d[x] - std::real(chi(coords[x]))) < 1e-12);
        CHECK(std::abs(t.d[x]) <= 1.0 + 1e-12);
        mean_u += u[x] * t.d[x];
    }
    CHECK(std::abs(mean_u) < 1e-12);

    // Subspace measure: E_mu d equals the witness score, here exactly 1.
    SubspaceFp w = SubspaceFp::span(2, 5, {{1, 0, 0, 0, 0}, {0, 0, 1, 0, 0}});
    DensityMap mu = subspace_set(spec, w).measure();
    SubspaceFp ann = w.annihilator();
    std::size_t eta = 0;
    for (std::size_t c = 1; c < spec.order(); ++c)
        if (ann.contains(coords_of(spec, c))) {
            eta = c;
            break;
        }
    TestFunction ts = build_test_function(mu, one_fiber, eta);
    double mean_mu = 0.0;
    for (std::size_t x = 0; x < spec.order(); ++x) mean_mu += mu[x] * ts.d[x];
    CHECK(std::abs(mean_mu - 1.0) < 1e-12);

    // Coset-constant nu gives E_nu d = 0 for xi outside V.
    SubspaceFp v = SubspaceFp::span(2, 5, {{0, 1, 0, 0, 0}});
    CosetMap fibers = coset_map(spec, v.annihilator());
    Rng rng(7);
    DensityMap nu(spec, MapKind::probability_measure);
    std::vector<double> mass(fibers.coset_count());
    double total = 0.0;
    for (double& m : mass) {
        m = rng.next_double() + 0.1;
        total += m;
    }
    for (std::size_t x = 0; x < spec.order(); ++x)
        nu[x] = mass[fibers.label[x]] / (total * static_cast<double>(fibers.coset_size));
    for (std::size_t cand = 0; cand < spec.order(); ++cand) {
        if (v.contains(coords_of(spec, cand))) continue;
        TestFunction tc = build_test_function(nu, fibers, cand);
        double mean_nu = 0.0;
        for (std::size_t x = 0; x < spec.order(); ++x) mean_nu += nu[x] * tc.d[x];
        CHECK(std::abs(mean_nu) < 1e-12);
    }
}

TEST_CASE("reweight examples") {
    GroupSpec spec = GroupSpec::parse("2^1");
    DensityMap nu = uniform_measure(spec);
    DensityMap d(spec, MapKind::generic);
    d[0] = 1.0;
    d[1] = -1.0;
    DensityMap out = reweight(nu, d, 0.5);
    CHECK(std::abs(out[0] - 0.75) < 1e-15);
    CHECK(std::abs(out[1] - 0.25) < 1e-15);
    CHECK(std::abs(out.sum() - 1.0) < 1e-15);

    DensityMap zero(spec, MapKind::generic);
    DensityMap same = reweight(nu, zero, 0.5);
    CHECK(same[0] == nu[0]);
    CHECK(same[1] == nu[1]);

    DensityMap big(spec, MapKind::generic);
    big[0] = 1.5;
    big[1] = -1.5;
    CHECK_THROWS_AS(reweight(nu, big, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(reweight(nu, d, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(reweight(nu, d, 0.0), std::invalid_argument);
}

TEST_CASE("refined chang on the whole group") {
    GroupSpec spec = GroupSpec::parse("2^6");
    ChangCertificateFpn cert = refined_chang(whole_group(spec), 0.5);
    CHECK(cert.V.dim() == 0);
    CHECK(cert.trace.empty());
    CHECK(cert.bound_dim == 0);
    CHECK(cert.potentials.values == std::vector<double>{0.0});
    CHECK(cert.verification.pass);
    CHECK(cert.verification.max_set_form < 1e-12);
    CHECK(cert.verification.checked == spec.order() - 1);
}

TEST_CASE("refined chang recovers the annihilator of a subspace") {
    for (int k : {2, 4}) {
        GroupSpec spec = GroupSpec::parse("2^8");
        SubspaceFp w = SubspaceFp::zero(2, 8);
        for (int j = 0; j < k; ++j) {
            std::vector<int> e(8, 0);
            e[static_cast<std::size_t>(j)] = 1;
            w = w.adjoin(e);
        }
        SetStats A = subspace_set(spec, w);
        for (WitnessPolicy policy :
             {WitnessPolicy::max_violation, WitnessPolicy::first_in_canonical_order}) {
            ChangCertificateFpn cert = refined_chang(A, 0.5, policy);
            CHECK(cert.V == w.annihilator());
            CHECK(static_cast<int>(cert.trace.size()) == 8 - k);
            CHECK(cert.verification.pass);
            CHECK(cert.verification.max_set_form < 1e-12);
            for (const IterationStep& s : cert.trace) CHECK(std::abs(s.score - 1.0) < 1e-12);
        }
    }
}

TEST_CASE("refined chang on random sets") {
    GroupSpec spec = GroupSpec::parse("2^10");
    SetStats A = random_density_set("2^10", 0.125, 99);
    REQUIRE(std::abs(A.alpha - 0.125) < 1e-15);
    double eps = 0.5;
    ChangCertificateFpn cert = refined_chang(A, eps);

    CHECK(cert.bound_dim == 16);
    CHECK(static_cast<int>(cert.V.dim()) <= cert.bound_dim);
    CHECK(static_cast<std::size_t>(cert.V.dim()) == cert.trace.size());
    CHECK(cert.verification.pass);
    CHECK(cert.verification.max_set_form <= eps * A.alpha + kCertSlack);
    CHECK(cert.verification.spectrum_contained);

    // Psi_0 = ln(1/alpha) and every step drops by at least the chord value.
    REQUIRE(cert.potentials.values.size() == cert.trace.size() + 1);
    CHECK(std::abs(cert.potentials.values[0] - std::log(1.0 / A.alpha)) < 1e-12);
    CHECK(cert.potentials.alpha == A.alpha);
    CHECK(cert.potentials.epsilon == eps);
    for (std::size_t i = 0; i < cert.trace.size(); ++i) {
        const IterationStep& s = cert.trace[i];
        CHECK(s.psi_before == cert.potentials.values[i]);
        CHECK(s.psi_after == cert.potentials.values[i + 1]);
        CHECK(s.psi_before - s.psi_after >= chord_entropy(eps) - 1e-9);
        CHECK(s.psi_before - s.psi_after >= eps * eps / 2.0 - 1e-9);
        CHECK(s.score > eps);
    }

    // Spec_eps(A) is contained in the final V.
    for (std::size_t xi : spectrum(A, eps)) CHECK(cert.V.contains(coords_of(spec, xi)));

    // Replay the trace: nu evolves from uniform by the recorded test
    // functions, each d is constant on cosets of the refined annihilator,
    // and the recorded score matches E_mu d.
    DensityMap mu = A.measure();
    DensityMap nu = uniform_measure(spec);
    SubspaceFp v = SubspaceFp::zero(2, 10);
    for (const IterationStep& s : cert.trace) {
        CHECK_FALSE(v.contains(coords_of(spec, s.witness)));
        double mean_mu = 0.0, mean_nu = 0.0;
        for (std::size_t x = 0; x < spec.order(); ++x) {
            mean_mu += mu[x] * s.test_function[x];
            mean_nu += nu[x] * s.test_function[x];
        }
        CHECK(std::abs(mean_mu - s.score) < 1e-10);
        CHECK(std::abs(mean_nu) < 1e-10);
        CHECK(std::abs(kl_divergence(mu, nu) - s.psi_before) < 1e-10);

        v = v.adjoin(coords_of(spec, s.witness));
        CosetMap refined = coset_map(spec, v.annihilator());
        for (std::size_t x = 0; x < spec.order(); ++x)
            CHECK(std::abs(s.test_function[x] -
                           s.test_function[refined.reps[refined.label[x]]]) < 1e-10);
        nu = reweight(nu, s.test_function, eps);
    }
    CHECK(v == cert.V);
    for (std::size_t x = 0; x < spec.order(); ++x)
        CHECK(std::abs(nu[x] - cert.nu_final[x]) < 1e-12);
    CHECK(std::abs(kl_divergence(mu, nu) - cert.potentials.values.back()) < 1e-10);
}

TEST_CASE("refined chang validates eps") {
    SetStats A = random_density_set("2^6", 0.25, 4);
    CHECK_THROWS_AS(refined_chang(A, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(refined_chang(A, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(refined_chang(A, -0.5), std::invalid_argument);
}

TEST_CASE("verify certificate examples") {
    GroupSpec spec = GroupSpec::parse("2^6");
    SetStats G = whole_group(spec);
    VerificationReport ok = verify_certificate(G, 0.5, SubspaceFp::zero(2, 6));
    CHECK(ok.pass);
    CHECK(ok.max_set_form < 1e-12);
    CHECK(ok.checked == spec.order() - 1);
    CHECK(ok.threshold == 0.5 * 1.0);

    SubspaceFp w = SubspaceFp::span(2, 6, {{1, 0, 0, 0, 0, 0}, {0, 1, 0, 0, 0, 0}});
    SetStats A = subspace_set(spec, w);
    SubspaceFp ann = w.annihilator();
    VerificationReport good = verify_certificate(A, 0.5, ann);
    CHECK(good.pass);
    CHECK(good.max_set_form < 1e-12);
    CHECK(good.spectrum_contained);
    CHECK(good.checked == spec.order() - ann.size());

    VerificationReport bad = verify_certificate(A, 0.5, SubspaceFp::zero(2, 6));
    CHECK_FALSE(bad.pass);
    CHECK(std::abs(bad.max_set_form - A.alpha) < 1e-12);
    CHECK(ann.contains(coords_of(spec, bad.argmax)));
    CHECK(bad.argmax != 0);
}

TEST_CASE("generalized refinement at r = 1") {
    GroupSpec spec = GroupSpec::parse("2^6");

    DensityMap flat(spec, MapKind::density, 1.0);
    GeneralizedRefinementR1 base = generalized_refinement_r1(flat, 0.5);
    CHECK(base.V.dim() == 0);
    CHECK(base.trace.empty());
    CHECK(base.report.entropy == 0.0);
    CHECK(base.report.max_l1 < 1e-12);
    CHECK(base.report.refinement_pass);
    CHECK(base.report.measure_form_pass);

    SubspaceFp w = SubspaceFp::span(2, 6, {{1, 1, 0, 0, 0, 0}, {0, 0, 1, 0, 0, 0}});
    SetStats ws = subspace_set(spec, w);
    DensityMap h(spec, MapKind::density);
    for (std::size_t x = 0; x < spec.order(); ++x) h[x] = ws.indicator[x] / ws.alpha;
    GeneralizedRefinementR1 sub = generalized_refinement_r1(h, 0.5);
    CHECK(sub.V == w.annihilator());
    CHECK(std::abs(sub.report.entropy - std::log(1.0 / ws.alpha)) < 1e-12);
    CHECK(sub.report.dim_bound >= static_cast<double>(sub.V.dim()));
    CHECK(sub.report.measure_form_pass);
    CHECK(sub.report.max_measure_form < 1e-12);

    // h = alpha^-1 1_A reproduces the set-form descent exactly.
    SetStats A = random_density_set("2^7", 0.25, 21);
    DensityMap ha(A.indicator.spec(), MapKind::density);
    for (std::size_t x = 0; x < ha.size(); ++x) ha[x] = A.indicator[x] / A.alpha;
    GeneralizedRefinementR1 r1 = generalized_refinement_r1(ha, 0.4);
    ChangCertificateFpn cert = refined_chang(A, 0.4);
    CHECK(r1.V == cert.V);
    REQUIRE(r1.trace.size() == cert.trace.size());
    for (std::size_t i = 0; i < r1.trace.size(); ++i) {
        CHECK(r1.trace[i].witness == cert.trace[i].witness);
        CHECK(std::abs(r1.trace[i].score - cert.trace[i].score) < 1e-12);
    }
    CHECK(r1.report.measure_form_pass);
}

TEST_CASE("score is dominated by the conditional l1 increment") {
    // S(xi) <= E|h_{V'} - h_V| for V' = span(V, xi), the inequality behind
    // the r = 1 reduction; checked naively on small groups.
    for (auto [p, n] : {std::pair{2, 4}, std::pair{3, 3}}) {
        GroupSpec spec(std::vector<int>(static_cast<std::size_t>(n), p));
        Rng rng(55);
        for (int it = 0; it < 6; ++it) {
            DensityMap h(spec, MapKind::density);
            double total = 0.0;
            for (double& x : h.values()) {
                x = rng.next_double() < 0.3 ? 0.0 : rng.next_double();
                total += x;
            }
            REQUIRE(total > 0.0);
            for (double& x : h.values()) x *= static_cast<double>(spec.order()) / total;

            SubspaceFp v = SubspaceFp::zero(p, n);
            if (it % 2 == 1) {
                std::vector<int> g(static_cast<std::size_t>(n));
                for (int& c : g) c = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(p)));
                v = v.adjoin(g);
            }
            DensityMap mu(spec, MapKind::probability_measure);
            for (std::size_t x = 0; x < spec.order(); ++x)
                mu[x] = h[x] / static_cast<double>(spec.order());
            ComplexMap hc(spec, MapKind::generic);
            for (std::size_t x = 0; x < spec.order(); ++x) hc[x] = h[x];
            ComplexMap hv = coset_average(hc, coset_map(spec, v.annihilator()));

            for (std::size_t xi = 0; xi < spec.order(); ++xi) {
                if (v.contains(coords_of(spec, xi))) continue;
                SubspaceFp vp = v.adjoin(coords_of(spec, xi));
                ComplexMap hvp = coset_average(hc, coset_map(spec, vp.annihilator()));
                double l1 = 0.0;
                for (std::size_t x = 0; x < spec.order(); ++x)
                    l1 += std::abs(hvp[x] - hv[x]);
                l1 /= static_cast<double>(spec.order());
                double score = mu_cosetwise_l1(mu, v, xi);
                CHECK(score <= l1 + 1e-9);
            }
        }
    }
}
