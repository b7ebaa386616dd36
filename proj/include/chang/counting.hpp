#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "chang/chang_fpn.hpp"
#include "chang/common.hpp"
#include "chang/dense_map.hpp"
#include "chang/fourier.hpp"
#include "chang/group.hpp"
#include "chang/rng.hpp"
#include "chang/subspace.hpp"

namespace chang {

/// Lambda_4(f1,f2,f3,f4) = E_{x1+x2=x3+x4} f1 f2 conj(f3 f4), evaluated
/// through the Fourier identity sum_xi f1^ f2^ conj(f3^ f4^).
template <typename T1, typename T2, typename T3, typename T4>
std::complex<double> lambda4(const DenseMap<T1>& f1, const DenseMap<T2>& f2,
                             const DenseMap<T3>& f3, const DenseMap<T4>& f4) {
    if (!(f1.spec() == f2.spec() && f1.spec() == f3.spec() && f1.spec() == f4.spec()))
        throw std::invalid_argument("lambda4: group mismatch");
    FourierCoefficients F1 = dft(f1), F2 = dft(f2), F3 = dft(f3), F4 = dft(f4);
    std::complex<double> acc{};
    for (std::size_t xi = 0; xi < f1.size(); ++xi)
        acc += F1.values[xi] * F2.values[xi] * std::conj(F3.values[xi] * F4.values[xi]);
    return acc;
}

/// Lambda_4(1_A,...,1_A): the normalized count of additive quadruples.
inline double additive_energy(const SetStats& A) {
    return std::real(lambda4(A.indicator, A.indicator, A.indicator, A.indicator));
}

inline double l1_fourier_norm(const ComplexMap& q) {
    FourierCoefficients F = dft(q);
    double s = 0.0;
    for (const auto& z : F.values) s += std::abs(z);
    return s;
}

enum class QuadKind { unimodular_phase, real_pm1, complex_disk };

inline std::string to_string(QuadKind k) {
    switch (k) {
        case QuadKind::unimodular_phase: return "unimodular_phase";
        case QuadKind::real_pm1: return "real_pm1";
        case QuadKind::complex_disk: return "complex_disk";
    }
    throw std::logic_error("QuadKind: bad tag");
}

inline QuadKind quad_kind_from_string(const std::string& s) {
    for (QuadKind k : {QuadKind::unimodular_phase, QuadKind::real_pm1, QuadKind::complex_disk})
        if (to_string(k) == s) return k;
    throw std::invalid_argument("QuadKind: unknown kind \"" + s + "\"");
}

/// Four weights, each constant on the cosets of W with sup norm at most 1.
struct WeightQuadruple {
    std::array<ComplexMap, 4> q;
    CosetMap w;

    void validate() const {
        for (const ComplexMap& f : q) {
            if (f.size() != w.label.size())
                throw std::domain_error("WeightQuadruple: spec mismatch");
            for (std::size_t x = 0; x < f.size(); ++x) {
                if (std::abs(f[x]) > 1.0 + 1e-12)
                    throw std::domain_error("WeightQuadruple: sup norm exceeds 1");
                std::size_t rep = w.reps[w.label[x]];
                if (std::abs(f[x] - f[rep]) > 1e-12)
                    throw std::domain_error("WeightQuadruple: not constant on cosets");
            }
        }
    }
};

/// Deterministic coset-constant weights: one value per coset of W, drawn
/// from the requested distribution via per-component child streams.
inline WeightQuadruple random_weight_quadruple(const GroupSpec& spec, const CosetMap& w,
                                               std::uint64_t seed, QuadKind kind) {
    Rng root(seed);
    WeightQuadruple out{{ComplexMap(spec, MapKind::generic), ComplexMap(spec, MapKind::generic),
                         ComplexMap(spec, MapKind::generic), ComplexMap(spec, MapKind::generic)},
                        w};
    for (std::size_t i = 0; i < 4; ++i) {
        Rng stream = root.child(i);
        std::vector<std::complex<double>> val(w.coset_count());
        for (auto& v : val) {
            switch (kind) {
                case QuadKind::unimodular_phase:
                    v = std::polar(1.0, 2.0 * std::numbers::pi * stream.next_double());
                    break;
                case QuadKind::real_pm1:
                    v = stream.next_below(2) ? 1.0 : -1.0;
                    break;
                case QuadKind::complex_disk: {
                    double r = std::sqrt(stream.next_double());
                    v = std::polar(r, 2.0 * std::numbers::pi * stream.next_double());
                    break;
                }
            }
        }
        for (std::size_t x = 0; x < spec.order(); ++x) out.q[i][x] = val[w.label[x]];
    }
    return out;
}

struct GammaDiagnostic {
    std::size_t lift = 0;     // minimal canonical index xi with chi_xi|_W = gamma
    double mean_a = 0.0;      // E_z a_gamma(z)
    double mean_a_sq = 0.0;   // E_z a_gamma(z)^2
};

/// Everything about (A, eps, V) the counting checks reuse across weight
/// quadruples: the coset structure, g, the a_gamma profiles, and the
/// termwise chain of the discrepancy bound.
struct CountingContext {
    SetStats A;
    double eps = 0.0;
    SubspaceFp V;
    CosetMap w_cosets;               // cosets of W = V^perp (the z variables)
    CosetMap v_cosets;               // cosets of V (enumerating gamma in W^)
    DensityMap g;                    // coset average of 1_A over W
    std::vector<GammaDiagnostic> table;  // indexed like v_cosets' labels; 0 = trivial gamma
    std::vector<double> lambda4_a;       // per gamma, Lambda_4(a_gamma)
    std::vector<double> sup_parseval;    // per gamma, sup|a^|^2 * sum|a^|^2
    double chain_lambda4 = 0.0;          // sums over nontrivial gamma
    double chain_sup_parseval = 0.0;
    double chain_meansq = 0.0;           // sum (E a)^2 E a^2
    double chain_eps_alpha = 0.0;        // eps^2 alpha^2 sum E a^2
    double bound = 0.0;                  // eps^2 alpha^3
    double max_nontrivial_mean_a = 0.0;  // <= eps alpha for a valid certificate
    double sum_mean_a_sq = 0.0;          // = alpha
    double max_lift_deviation = 0.0;     // well-definedness of a_gamma
    double max_parseval_err = 0.0;       // max_z |sum_gamma a^2 - g(z)|
    bool chain_pass = false;
};

inline CountingContext build_counting_context(const SetStats& A, double eps,
                                              const SubspaceFp& v) {
    const GroupSpec& spec = A.indicator.spec();
    SubspaceFp w = v.annihilator();
    CountingContext ctx{A,
                        eps,
                        v,
                        coset_map(spec, w),
                        coset_map(spec, v),
                        DensityMap(spec, MapKind::density),
                        {},
                        {},
                        {}};
    ctx.g = coset_average(A.indicator, ctx.w_cosets);
    ctx.bound = eps * eps * ctx.A.alpha * ctx.A.alpha * ctx.A.alpha;

    CoordsTable coords(spec);
    ConjRootTable roots(spec);
    std::vector<std::size_t> members = A.indices();
    double inv_w = 1.0 / static_cast<double>(ctx.w_cosets.coset_size);
    std::size_t z_count = ctx.w_cosets.coset_count();

    // One nonzero element of V, for the second-lift well-definedness probe.
    std::optional<std::size_t> v_shift;
    if (v.dim() > 0) {
        GroupElement e{v.basis()[0]};
        v_shift = spec.index_of(e);
    }

    for (std::size_t gi = 0; gi < ctx.v_cosets.coset_count(); ++gi) {
        std::size_t lift = ctx.v_cosets.reps[gi];
        ConjCharacter chi(spec, roots, lift);
        std::vector<std::complex<double>> acc(z_count);
        for (std::size_t x : members) acc[ctx.w_cosets.label[x]] += chi(coords[x]);
        DensityMap a(spec, MapKind::generic);
        GammaDiagnostic diag{lift, 0.0, 0.0};
        std::vector<double> a_z(z_count);
        for (std::size_t z = 0; z < z_count; ++z) {
            a_z[z] = std::abs(acc[z]) * inv_w;
            diag.mean_a += a_z[z];
            diag.mean_a_sq += a_z[z] * a_z[z];
        }
        diag.mean_a /= static_cast<double>(z_count);
        diag.mean_a_sq /= static_cast<double>(z_count);
        for (std::size_t x = 0; x < spec.order(); ++x) a[x] = a_z[ctx.w_cosets.label[x]];

        if (v_shift) {
            ConjCharacter chi2(spec, roots, spec.add(lift, *v_shift));
            std::vector<std::complex<double>> acc2(z_count);
            for (std::size_t x : members) acc2[ctx.w_cosets.label[x]] += chi2(coords[x]);
            for (std::size_t z = 0; z < z_count; ++z)
                ctx.max_lift_deviation = std::max(
                    ctx.max_lift_deviation, std::abs(std::abs(acc2[z]) * inv_w - a_z[z]));
        }

        FourierCoefficients ahat = dft(a);
        double l4 = 0.0, sup2 = 0.0, par = 0.0;
        for (const auto& c : ahat.values) {
            double n2 = std::norm(c);
            l4 += n2 * n2;
            par += n2;
            sup2 = std::max(sup2, n2);
        }
        ctx.table.push_back(diag);
        ctx.lambda4_a.push_back(l4);
        ctx.sup_parseval.push_back(sup2 * par);
        ctx.sum_mean_a_sq += diag.mean_a_sq;
        if (gi != 0) {
            ctx.chain_lambda4 += l4;
            ctx.chain_sup_parseval += sup2 * par;
            ctx.chain_meansq += diag.mean_a * diag.mean_a * diag.mean_a_sq;
            ctx.chain_eps_alpha += diag.mean_a_sq;
            ctx.max_nontrivial_mean_a = std::max(ctx.max_nontrivial_mean_a, diag.mean_a);
        }
    }
    ctx.chain_eps_alpha *= eps * eps * ctx.A.alpha * ctx.A.alpha;

    // Pointwise Parseval on W: sum_gamma a_gamma(z)^2 = g(z) per coset.
    std::vector<double> per_z(z_count);
    for (std::size_t gi = 0; gi < ctx.v_cosets.coset_count(); ++gi) {
        std::size_t lift = ctx.v_cosets.reps[gi];
        ConjCharacter chi(spec, roots, lift);
        std::vector<std::complex<double>> acc(z_count);
        for (std::size_t x : members) acc[ctx.w_cosets.label[x]] += chi(coords[x]);
        for (std::size_t z = 0; z < z_count; ++z) {
            double az = std::abs(acc[z]) * inv_w;
            per_z[z] += az * az;
        }
    }
    for (std::size_t z = 0; z < z_count; ++z)
        ctx.max_parseval_err = std::max(
            ctx.max_parseval_err, std::abs(per_z[z] - ctx.g[ctx.w_cosets.reps[z]]));

    ctx.chain_pass = ctx.chain_lambda4 <= ctx.chain_sup_parseval + kCertSlack &&
                     ctx.chain_sup_parseval <= ctx.chain_meansq + kCertSlack &&
                     ctx.chain_meansq <= ctx.chain_eps_alpha + kCertSlack &&
                     ctx.chain_eps_alpha <= ctx.bound + kCertSlack;
    return ctx;
}

struct CountingReport {
    double alpha = 0.0;
    double eps = 0.0;
    int codim = 0;  // dim(V) = codim(W)
    std::complex<double> lambda_indicator{};  // Lambda_4(q_i 1_A)
    std::complex<double> lambda_g{};          // Lambda_4(q_i g)
    double discrepancy = 0.0;                 // |Delta|
    double bound = 0.0;                       // eps^2 alpha^3
    std::vector<GammaDiagnostic> table;
    double chain_lambda4 = 0.0;
    double chain_sup_parseval = 0.0;
    double chain_meansq = 0.0;
    double chain_eps_alpha = 0.0;
    double max_nontrivial_mean_a = 0.0;
    double sum_mean_a_sq = 0.0;
    double max_lift_deviation = 0.0;
    double max_parseval_err = 0.0;
    std::array<double, 4> l1_norms{};
    bool chain_pass = false;
    bool pass = false;  // |Delta| <= bound + slack
};

inline CountingReport localized_counting_check(const CountingContext& ctx,
                                               const WeightQuadruple& quad) {
    quad.validate();
    const GroupSpec& spec = ctx.A.indicator.spec();
    if (!(quad.w.subspace == ctx.w_cosets.subspace))
        throw std::invalid_argument("localized_counting_check: quadruple built for another W");
    std::array<ComplexMap, 4> wa{ComplexMap(spec, MapKind::generic),
                                 ComplexMap(spec, MapKind::generic),
                                 ComplexMap(spec, MapKind::generic),
                                 ComplexMap(spec, MapKind::generic)};
    std::array<ComplexMap, 4> wg = wa;
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t x = 0; x < spec.order(); ++x) {
            wa[i][x] = quad.q[i][x] * ctx.A.indicator[x];
            wg[i][x] = quad.q[i][x] * ctx.g[x];
        }

    CountingReport rep;
    rep.alpha = ctx.A.alpha;
    rep.eps = ctx.eps;
    rep.codim = ctx.V.dim();
    rep.lambda_indicator = lambda4(wa[0], wa[1], wa[2], wa[3]);
    rep.lambda_g = lambda4(wg[0], wg[1], wg[2], wg[3]);
    rep.discrepancy = std::abs(rep.lambda_indicator - rep.lambda_g);
    rep.bound = ctx.bound;
    rep.table = ctx.table;
    rep.chain_lambda4 = ctx.chain_lambda4;
    rep.chain_sup_parseval = ctx.chain_sup_parseval;
    rep.chain_meansq = ctx.chain_meansq;
    rep.chain_eps_alpha = ctx.chain_eps_alpha;
    rep.max_nontrivial_mean_a = ctx.max_nontrivial_mean_a;
    rep.sum_mean_a_sq = ctx.sum_mean_a_sq;
    rep.max_lift_deviation = ctx.max_lift_deviation;
    rep.max_parseval_err = ctx.max_parseval_err;
    for (std::size_t i = 0; i < 4; ++i) rep.l1_norms[i] = l1_fourier_norm(quad.q[i]);
    rep.chain_pass = ctx.chain_pass;
    rep.pass = rep.discrepancy <= rep.bound + kCertSlack;
    return rep;
}

/// All-ones weights, reducing the localized count to the classical one.
inline WeightQuadruple ones_quadruple(const GroupSpec& spec, const CosetMap& w) {
    ComplexMap one(spec, MapKind::generic, std::complex<double>(1.0, 0.0));
    return WeightQuadruple{{one, one, one, one}, w};
}

inline CountingReport classical_counting_check(const CountingContext& ctx) {
    return localized_counting_check(ctx, ones_quadruple(ctx.A.indicator.spec(), ctx.w_cosets));
}

/// Convenience forms that run refined_chang to obtain W = V^perp.
inline CountingReport classical_counting_check(const SetStats& A, double eps,
                                               WitnessPolicy policy = WitnessPolicy::max_violation) {
    ChangCertificateFpn cert = refined_chang(A, eps, policy);
    return classical_counting_check(build_counting_context(A, eps, cert.V));
}

inline CountingReport localized_counting_check(const SetStats& A, double eps,
                                               const WeightQuadruple& quad,
                                               WitnessPolicy policy = WitnessPolicy::max_violation) {
    ChangCertificateFpn cert = refined_chang(A, eps, policy);
    return localized_counting_check(build_counting_context(A, eps, cert.V), quad);
}

/// Exact block-coordinate ascent on |Delta| over coset phases: Delta is
/// linear in the coset values of each slot, so each block update is the
/// closed-form unimodular maximizer. Monotone, deterministic, restarted.
inline WeightQuadruple adversarial_weight_quadruple(const CountingContext& ctx,
                                                    std::uint64_t seed, int restarts = 5,
                                                    int max_sweeps = 12) {
    const GroupSpec& spec = ctx.A.indicator.spec();
    std::size_t z_count = ctx.w_cosets.coset_count();
    double inv_order = 1.0 / static_cast<double>(spec.order());

    auto best_delta = [&](std::array<std::vector<std::complex<double>>, 4>& vals) {
        auto build = [&](std::size_t i, const DensityMap& base) {
            ComplexMap f(spec, MapKind::generic);
            for (std::size_t x = 0; x < spec.order(); ++x)
                f[x] = vals[i][ctx.w_cosets.label[x]] * base[x];
            return f;
        };
        auto delta_now = [&] {
            return std::abs(
                lambda4(build(0, ctx.A.indicator), build(1, ctx.A.indicator),
                        build(2, ctx.A.indicator), build(3, ctx.A.indicator)) -
                lambda4(build(0, ctx.g), build(1, ctx.g), build(2, ctx.g), build(3, ctx.g)));
        };
        double current = delta_now();
        for (int sweep = 0; sweep < max_sweeps; ++sweep) {
            for (std::size_t slot = 0; slot < 4; ++slot) {
                // Kernel of Delta in this slot, on both sides. With
                // M(xi) = product of the other three slots' coefficients,
                // Lambda_4 = (1/|G|) sum_x f(x) sum_xi M(xi) chibar_xi(x)
                // for slots 0,1 and (1/|G|) sum_x conj(f(x)) idft(M)(x)
                // for slots 2,3.
                auto kernel = [&](const DensityMap& base) {
                    std::array<FourierCoefficients, 4> F{dft(build(0, base)), dft(build(1, base)),
                                                         dft(build(2, base)), dft(build(3, base))};
                    std::vector<std::complex<double>> M(spec.order());
                    for (std::size_t xi = 0; xi < spec.order(); ++xi) {
                        const auto a = F[0].values[xi], b = F[1].values[xi];
                        const auto c = F[2].values[xi], d = F[3].values[xi];
                        switch (slot) {
                            case 0: M[xi] = b * std::conj(c * d); break;
                            case 1: M[xi] = a * std::conj(c * d); break;
                            case 2: M[xi] = a * b * std::conj(d); break;
                            default: M[xi] = a * b * std::conj(c);
                        }
                    }
                    if (slot < 2) {
                        // sum_xi M chibar_xi(x) = conj(idft(conj M)(x)).
                        for (auto& m : M) m = std::conj(m);
                    }
                    FourierCoefficients MC{spec, M};
                    ComplexMap t = idft(MC);
                    std::vector<std::complex<double>> K(z_count);
                    for (std::size_t x = 0; x < spec.order(); ++x) {
                        std::complex<double> tx = slot < 2 ? std::conj(t[x]) : t[x];
                        K[ctx.w_cosets.label[x]] += tx * base[x] * inv_order;
                    }
                    return K;
                };
                std::vector<std::complex<double>> KA = kernel(ctx.A.indicator);
                std::vector<std::complex<double>> KG = kernel(ctx.g);
                // Slots 0,1: Delta = sum_z q(z) D(z), optimum q = conj(D)/|D|.
                // Slots 2,3: Delta = sum_z conj(q(z)) D(z), optimum q = D/|D|.
                for (std::size_t z = 0; z < z_count; ++z) {
                    std::complex<double> d = KA[z] - KG[z];
                    double a = std::abs(d);
                    if (a == 0.0) {
                        vals[slot][z] = {1.0, 0.0};
                    } else {
                        vals[slot][z] = slot < 2 ? std::conj(d) / a : d / a;
                    }
                }
            }
            double now = delta_now();
            if (now <= current + 1e-13) {
                current = std::max(current, now);
                break;
            }
            current = now;
        }
        return current;
    };

    Rng root(seed);
    double best = -1.0;
    std::array<std::vector<std::complex<double>>, 4> best_vals;
    for (int rs = 0; rs < restarts; ++rs) {
        Rng stream = root.child(static_cast<std::uint64_t>(rs));
        std::array<std::vector<std::complex<double>>, 4> vals;
        for (auto& v : vals) {
            v.resize(z_count);
            for (auto& c : v) c = std::polar(1.0, 2.0 * std::numbers::pi * stream.next_double());
        }
        double achieved = best_delta(vals);
        if (achieved > best) {
            best = achieved;
            best_vals = vals;
        }
    }

    WeightQuadruple out{{ComplexMap(spec, MapKind::generic), ComplexMap(spec, MapKind::generic),
                         ComplexMap(spec, MapKind::generic), ComplexMap(spec, MapKind::generic)},
                        ctx.w_cosets};
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t x = 0; x < spec.order(); ++x)
            out.q[i][x] = best_vals[i][ctx.w_cosets.label[x]];
    return out;
}

}  // namespace chang
