// Localized counting: certifies |Lambda_4(q 1_A) - Lambda_4(q g)| <=
// eps^2 alpha^3 for coset-constant weights q, first with random quadruples
// and then with the block-coordinate-ascent adversary.

#include <cstdio>

#include <chang/counting.hpp>
#include <chang/generators.hpp>

int main() {
    using namespace chang;

    GroupSpec spec = GroupSpec::parse("2^7");
    SetGeneratorSpec gen;
    gen.group = spec;
    gen.kind = GeneratorKind::random_density;
    gen.density = 0.125;
    gen.seed = 11;
    SetStats A = generate_set(gen);
    double eps = 0.5;

    ChangCertificateFpn cert = refined_chang(A, eps);
    CountingContext ctx = build_counting_context(A, eps, cert.V);
    std::printf("alpha = %.4f, dim V = %d, bound eps^2 alpha^3 = %.3e\n", A.alpha, cert.V.dim(),
                ctx.bound);
    std::printf("chain: sum Lambda4(a) %.3e <= sup*parseval %.3e <= meansq %.3e <= %.3e\n",
                ctx.chain_lambda4, ctx.chain_sup_parseval, ctx.chain_meansq,
                ctx.chain_eps_alpha);

    double worst = 0.0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        WeightQuadruple quad =
            random_weight_quadruple(spec, ctx.w_cosets, seed, QuadKind::unimodular_phase);
        CountingReport rep = localized_counting_check(ctx, quad);
        if (rep.discrepancy > worst) worst = rep.discrepancy;
    }
    std::printf("worst |Delta| over 20 random quadruples: %.3e\n", worst);

    WeightQuadruple adv = adversarial_weight_quadruple(ctx, 1);
    CountingReport rep = localized_counting_check(ctx, adv);
    std::printf("adversary |Delta| = %.3e, bound %.3e, pass = %s\n", rep.discrepancy, rep.bound,
                rep.pass ? "yes" : "no");
    return rep.pass ? 0 : 1;
}
