// Runs both abelian certificates on the subgroup Z_12 x {0} of Z_12 x Z_5:
// the classical dissociated set Lambda, then the refined weight family over
// a dissociated Delta with its 2^r sign-indexed weights. Ends by asking for
// an infeasible accuracy to show the weight-budget gate refusing the run.

#include <cstdio>

#include <chang/chang_abelian.hpp>
#include <chang/generators.hpp>

int main() {
    using namespace chang;

    GroupSpec spec = GroupSpec::parse("12x5");
    SetGeneratorSpec gen;
    gen.group = spec;
    gen.kind = GeneratorKind::subspace;
    gen.basis = {{1, 0}};
    SetStats A = generate_set(gen);
    double eps = 0.6;

    std::printf("A = Z_12 x {0} inside Z_12 x Z_5, |A| = %zu, alpha = %.4f, eps = %.2f\n",
                A.size, A.alpha, eps);

    AbelianCertificate classical = classical_chang_abelian(A, eps);
    std::printf("classical: |Lambda| = %zu (bound %d), dissociated = %s, sweep pass = %s\n",
                classical.generators.size(), classical.bound_r,
                classical.verification.dissociated ? "yes" : "no",
                classical.verification.classical_pass ? "yes" : "no");

    RefinedAbelianResult refined = refined_chang_abelian(A, eps);
    const AbelianCertificate& cert = refined.certificate;
    std::printf("refined: r = %zu (bound %d), 2^r = %zu weights\n", cert.generators.size(),
                cert.bound_r, refined.family.weights.size());
    for (const AbelianStep& s : cert.trace)
        std::printf("  round %d: witness %zu, score %.6f, Phi %.6f -> %.6f\n", s.index,
                    s.witness, s.score, s.potential_before, s.potential_after);
    std::printf("masses m_sigma:");
    for (double m : refined.family.masses) std::printf(" %.4f", m);
    std::printf("\nterminal sweep: max score %.6f (threshold %.6f), pass = %s\n",
                cert.verification.max_score, eps, cert.verification.pass ? "yes" : "no");

    // eps = 0.35 at alpha = 0.1 needs 2^37 weights; the gate refuses it.
    gen.kind = GeneratorKind::random_density;
    gen.basis.clear();
    gen.density = 0.1;
    gen.seed = 42;
    try {
        refined_chang_abelian(generate_set(gen), 0.35);
        std::printf("unexpected: infeasible run was not gated\n");
        return 1;
    } catch (const ResourceGateError& e) {
        std::printf("resource gate: %s\n", e.what());
    }
    return cert.verification.pass ? 0 : 1;
}
