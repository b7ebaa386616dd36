#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include <chang/counting.hpp>
#include <chang/generators.hpp>
#include <chang/oracle.hpp>
#include <chang/rng.hpp>

using namespace chang;

namespace {

SetStats subspace_set(const GroupSpec& spec, const SubspaceFp& w) {
    std::vector<std::size_t> idx;
    for (std::size_t x = 0; x < spec.order(); ++x)
        if (w.contains(spec.element_at(x).coords)) idx.push_back(x);
    return SetStats::from_indices(spec, idx);
}

SetStats random_density_set(const std::string& group, double density, std::uint64_t seed) {
    SetGeneratorSpec gen;
    gen.group = GroupSpec::parse(group);
    gen.kind = GeneratorKind::random_density;
    gen.density = density;
    gen.seed = seed;
    return generate_set(gen);
}

ComplexMap random_complex_map(const GroupSpec& spec, Rng& rng) {
    ComplexMap f(spec, MapKind::generic);
    for (auto& z : f.values()) z = {rng.next_double() * 2.0 - 1.0, rng.next_double() * 2.0 - 1.0};
    return f;
}

void check_chain(const CountingReport& rep) {
    CHECK(rep.chain_pass);
    CHECK(rep.discrepancy <= rep.chain_meansq + kCertSlack);
    CHECK(rep.chain_lambda4 <= rep.chain_sup_parseval + kCertSlack);
    CHECK(rep.chain_sup_parseval <= rep.chain_meansq + kCertSlack);
    CHECK(rep.chain_meansq <= rep.chain_eps_alpha + kCertSlack);
    CHECK(rep.chain_eps_alpha <= rep.bound + kCertSlack);
    CHECK(rep.discrepancy <= rep.bound + kCertSlack);
    CHECK(rep.max_nontrivial_mean_a <= rep.eps * rep.alpha + kCertSlack);
    CHECK(std::abs(rep.sum_mean_a_sq - rep.alpha) < 1e-10);
    CHECK(rep.max_lift_deviation < 1e-12);
    CHECK(rep.max_parseval_err < 1e-10);
    CHECK(rep.pass);
}

}  // namespace

TEST_CASE("lambda4 examples") {
    GroupSpec f22 = GroupSpec::parse("2^2");
    DensityMap ones(f22, MapKind::indicator, 1.0);
    CHECK(std::abs(lambda4(ones, ones, ones, ones) - 1.0) < 1e-12);

    DensityMap point(f22, MapKind::indicator);
    point[0] = 1.0;
    CHECK(std::abs(lambda4(point, point, point, point) - 1.0 / 64.0) < 1e-14);

    GroupSpec f24 = GroupSpec::parse("2^4");
    SubspaceFp w = SubspaceFp::span(2, 4, {{1, 0, 0, 0}, {0, 1, 0, 0}});
    DensityMap iw(f24, MapKind::indicator);
    for (std::size_t x = 0; x < f24.order(); ++x)
        if (w.contains(f24.element_at(x).coords)) iw[x] = 1.0;
    CHECK(std::abs(lambda4(iw, iw, iw, iw) - 1.0 / 64.0) < 1e-12);
}

TEST_CASE("additive energy via the fourier identity") {
    GroupSpec spec = GroupSpec::parse("3^4");
    SetStats A = random_density_set("3^4", 0.3, 13);
    double direct = 0.0;
    FourierCoefficients F = dft(A.indicator);
    for (const auto& z : F.values) {
        double m = std::abs(z);
        direct += m * m * m * m;
    }
    CHECK(std::abs(additive_energy(A) - direct) < 1e-12);
    CHECK(std::abs(additive_energy(A) -
                   std::real(oracle::lambda4_direct(A.indicator, A.indicator, A.indicator,
                                                    A.indicator))) < 1e-12);
}

TEST_CASE("lambda4 agrees with the direct oracle") {
    for (const std::string& g : {std::string("2^6"), std::string("3^4"), std::string("6"),
                                 std::string("12x5")}) {
        GroupSpec spec = GroupSpec::parse(g);
        Rng rng(41);
        for (int it = 0; it < 10; ++it) {
            ComplexMap f1 = random_complex_map(spec, rng);
            ComplexMap f2 = random_complex_map(spec, rng);
            ComplexMap f3 = random_complex_map(spec, rng);
            ComplexMap f4 = random_complex_map(spec, rng);
            std::complex<double> fast = lambda4(f1, f2, f3, f4);
            std::complex<double> slow = oracle::lambda4_direct(f1, f2, f3, f4);
            CHECK(std::abs(fast - slow) <= 1e-9 * std::max(1.0, std::abs(slow)));
        }
    }
}

TEST_CASE("l1 fourier norm examples") {
    GroupSpec spec = GroupSpec::parse("2^5");
    ComplexMap one(spec, MapKind::generic, std::complex<double>(1.0, 0.0));
    CHECK(std::abs(l1_fourier_norm(one) - 1.0) < 1e-12);

    CoordsTable coords(spec);
    ConjCharacter chi(spec, 7);
    ComplexMap character(spec, MapKind::generic);
    for (std::size_t x = 0; x < spec.order(); ++x) character[x] = std::conj(chi(coords[x]));
    CHECK(std::abs(l1_fourier_norm(character) - 1.0) < 1e-10);

    Rng rng(3);
    ComplexMap signs(spec, MapKind::generic);
    for (auto& z : signs.values()) z = rng.next_below(2) ? 1.0 : -1.0;
    CHECK(l1_fourier_norm(signs) >= 1.0 - 1e-12);
}

TEST_CASE("counting context structure") {
    SetStats A = random_density_set("2^7", 0.125, 11);
    ChangCertificateFpn cert = refined_chang(A, 0.5);
    CountingContext ctx = build_counting_context(A, 0.5, cert.V);

    CHECK(ctx.v_cosets.coset_count() == ctx.table.size());
    CHECK(ctx.w_cosets.subspace == cert.V.annihilator());
    CHECK(ctx.v_cosets.subspace == cert.V);

    // g is the coset average of the indicator over W.
    const GroupSpec& spec = A.indicator.spec();
    for (std::size_t z = 0; z < ctx.w_cosets.coset_count(); ++z) {
        double mass = 0.0;
        for (std::size_t x = 0; x < spec.order(); ++x)
            if (ctx.w_cosets.label[x] == z) mass += A.indicator[x];
        double avg = mass / static_cast<double>(ctx.w_cosets.coset_size);
        CHECK(std::abs(ctx.g[ctx.w_cosets.reps[z]] - avg) < 1e-12);
    }

    // The trivial gamma row is a_0 = g: mean alpha, lift 0.
    CHECK(ctx.table[0].lift == 0);
    CHECK(std::abs(ctx.table[0].mean_a - A.alpha) < 1e-12);

    // Lifts are outside V for nontrivial gamma and reduce to distinct cosets.
    for (std::size_t k = 1; k < ctx.table.size(); ++k) {
        std::size_t lift = ctx.table[k].lift;
        CHECK_FALSE(cert.V.contains(spec.element_at(lift).coords));
        CHECK(ctx.v_cosets.label[lift] == k);
        CHECK(ctx.table[k].mean_a <= 0.5 * A.alpha + kCertSlack);
    }

    CHECK(ctx.chain_pass);
    CHECK(std::abs(ctx.bound - 0.25 * A.alpha * A.alpha * A.alpha) < 1e-15);
}

TEST_CASE("classical counting on exact instances") {
    GroupSpec spec = GroupSpec::parse("2^6");
    std::vector<std::size_t> all(spec.order());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    CountingReport whole = classical_counting_check(SetStats::from_indices(spec, all), 0.5);
    CHECK(whole.discrepancy < 1e-12);
    check_chain(whole);

    SubspaceFp w = SubspaceFp::span(2, 6, {{1, 0, 0, 0, 0, 0}, {0, 1, 1, 0, 0, 0}});
    CountingReport sub = classical_counting_check(subspace_set(spec, w), 0.5);
    CHECK(sub.discrepancy < 1e-12);
    CHECK(sub.chain_lambda4 < 1e-12);
    check_chain(sub);
}

TEST_CASE("classical counting on random sets") {
    SetStats A = random_density_set("2^9", 0.125, 77);
    CountingReport rep = classical_counting_check(A, 0.5);
    CHECK(rep.alpha == A.alpha);
    CHECK(rep.bound == 0.25 * A.alpha * A.alpha * A.alpha);
    check_chain(rep);
    for (double n : rep.l1_norms) CHECK(std::abs(n - 1.0) < 1e-10);

    // The ones quadruple is literally the classical check.
    ChangCertificateFpn cert = refined_chang(A, 0.5);
    CountingContext ctx = build_counting_context(A, 0.5, cert.V);
    CountingReport ones = localized_counting_check(
        ctx, ones_quadruple(A.indicator.spec(), ctx.w_cosets));
    CHECK(ones.discrepancy == rep.discrepancy);
    CHECK(ones.lambda_indicator == rep.lambda_indicator);
}

TEST_CASE("random weight quadruples") {
    GroupSpec spec = GroupSpec::parse("2^6");
    SetStats A = random_density_set("2^6", 0.25, 5);
    ChangCertificateFpn cert = refined_chang(A, 0.6);
    CountingContext ctx = build_counting_context(A, 0.6, cert.V);

    for (QuadKind kind :
         {QuadKind::unimodular_phase, QuadKind::real_pm1, QuadKind::complex_disk}) {
        WeightQuadruple a = random_weight_quadruple(spec, ctx.w_cosets, 42, kind);
        WeightQuadruple b = random_weight_quadruple(spec, ctx.w_cosets, 42, kind);
        WeightQuadruple c = random_weight_quadruple(spec, ctx.w_cosets, 43, kind);
        a.validate();
        bool identical = true, moved = false;
        for (std::size_t i = 0; i < 4; ++i)
            for (std::size_t x = 0; x < spec.order(); ++x) {
                identical = identical && a.q[i][x] == b.q[i][x];
                moved = moved || a.q[i][x] != c.q[i][x];
            }
        CHECK(identical);
        CHECK(moved);
        for (std::size_t i = 0; i < 4; ++i)
            for (std::size_t x = 0; x < spec.order(); ++x) {
                CHECK(std::abs(a.q[i][x]) <= 1.0 + 1e-12);
                if (kind == QuadKind::real_pm1) {
                    CHECK(a.q[i][x].imag() == 0.0);
                    CHECK(std::abs(std::abs(a.q[i][x].real()) - 1.0) < 1e-15);
                }
                if (kind == QuadKind::unimodular_phase)
                    CHECK(std::abs(std::abs(a.q[i][x]) - 1.0) < 1e-12);
            }
        CHECK(to_string(kind) == to_string(quad_kind_from_string(to_string(kind))));
    }
    CHECK_THROWS_AS(quad_kind_from_string("fancy"), std::invalid_argument);
}

TEST_CASE("weight quadruple validation") {
    GroupSpec spec = GroupSpec::parse("2^4");
    SubspaceFp w = SubspaceFp::span(2, 4, {{1, 0, 0, 0}, {0, 1, 0, 0}});
    CosetMap cm = coset_map(spec, w);
    WeightQuadruple quad = ones_quadruple(spec, cm);
    quad.validate();

    WeightQuadruple loud = quad;
    for (std::size_t x = 0; x < spec.order(); ++x) loud.q[2][x] = 1.25;
    CHECK_THROWS_AS(loud.validate(), std::domain_error);

    WeightQuadruple ragged = quad;
    ragged.q[1][cm.reps[0]] = std::complex<double>(1.0, 0.0);
    ragged.q[1][spec.add(cm.reps[0], 1)] = std::complex<double>(-1.0, 0.0);
    CHECK_THROWS_AS(ragged.validate(), std::domain_error);
}

TEST_CASE("localized counting over sampled quadruples") {
    SetStats A = random_density_set("2^7", 0.125, 19);
    double eps = 0.5;
    ChangCertificateFpn cert = refined_chang(A, eps);
    CountingContext ctx = build_counting_context(A, eps, cert.V);
    const GroupSpec& spec = A.indicator.spec();

    for (QuadKind kind :
         {QuadKind::unimodular_phase, QuadKind::real_pm1, QuadKind::complex_disk}) {
        for (std::uint64_t seed = 0; seed < 5; ++seed) {
            WeightQuadruple quad = random_weight_quadruple(spec, ctx.w_cosets, seed, kind);
            CountingReport rep = localized_counting_check(ctx, quad);
            check_chain(rep);
            for (double n : rep.l1_norms) CHECK(n >= -1e-12);
        }
    }
}

TEST_CASE("adversarial quadruple") {
    SetStats A = random_density_set("2^7", 0.125, 23);
    double eps = 0.5;
    ChangCertificateFpn cert = refined_chang(A, eps);
    CountingContext ctx = build_counting_context(A, eps, cert.V);

    WeightQuadruple adv = adversarial_weight_quadruple(ctx, 7);
    adv.validate();
    WeightQuadruple again = adversarial_weight_quadruple(ctx, 7);
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t x = 0; x < adv.q[i].size(); ++x) CHECK(adv.q[i][x] == again.q[i][x]);

    CountingReport rep = localized_counting_check(ctx, adv);
    check_chain(rep);
    CHECK(rep.discrepancy >= 0.0);
}

TEST_CASE("counting rejects mismatched quadruples") {
    SetStats A = random_density_set("2^6", 0.25, 3);
    ChangCertificateFpn cert = refined_chang(A, 0.5);
    CountingContext ctx = build_counting_context(A, 0.5, cert.V);
    const GroupSpec& spec = A.indicator.spec();

    SubspaceFp other = SubspaceFp::span(2, 6, {{1, 1, 1, 1, 1, 1}});
    WeightQuadruple wrong = ones_quadruple(spec, coset_map(spec, other));
    CHECK_THROWS_AS(localized_counting_check(ctx, wrong), std::invalid_argument);
}
