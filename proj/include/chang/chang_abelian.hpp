#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "chang/chang_fpn.hpp"
#include "chang/common.hpp"
#include "chang/dense_map.hpp"
#include "chang/divergence.hpp"
#include "chang/fourier.hpp"
#include "chang/group.hpp"
#include "chang/parallel.hpp"
#include "chang/span_set.hpp"

namespace chang {

inline constexpr std::size_t kDefaultWeightBudget = std::size_t{1} << 26;

/// Sign pattern sigma in {+,-}^r as a string; round k's sign sits at
/// position k. The integer encoding keeps round 0 most significant, so a
/// split maps parent index s to children 2s ('+') and 2s+1 ('-').
inline std::string sigma_to_string(std::size_t bits, int r) {
    std::string s(static_cast<std::size_t>(r), '+');
    for (int k = 0; k < r; ++k)
        if ((bits >> (r - 1 - k)) & 1) s[static_cast<std::size_t>(k)] = '-';
    return s;
}

inline std::size_t sigma_from_string(const std::string& s) {
    std::size_t bits = 0;
    for (char c : s) {
        if (c != '+' && c != '-') throw std::invalid_argument("sigma: bad sign character");
        bits = bits * 2 + (c == '-' ? 1 : 0);
    }
    return bits;
}

/// The 2^r weights of the refined abelian construction, all held dense.
struct WeightFamily {
    GroupSpec spec;
    SpanSet span;                     // generators() = Delta, members = <Delta>
    std::vector<DensityMap> weights;  // size 2^r, indexed by sigma bits
    std::vector<double> masses;       // m_sigma = E_{x~mu_A} g_sigma(x)
    std::vector<std::complex<double>> phases;  // theta_sigma of the last split (parent-indexed)
    std::vector<double> correlations;          // c_sigma of the last split (parent-indexed)

    int r() const { return static_cast<int>(span.generators().size()); }
    const std::vector<std::size_t>& delta() const { return span.generators(); }
};

enum class AbelianVariant { classical, refined };

inline std::string to_string(AbelianVariant v) {
    return v == AbelianVariant::classical ? "classical" : "refined";
}

inline AbelianVariant abelian_variant_from_string(const std::string& s) {
    if (s == "classical") return AbelianVariant::classical;
    if (s == "refined") return AbelianVariant::refined;
    throw std::invalid_argument("AbelianVariant: unknown variant \"" + s + "\"");
}

struct AbelianStep {
    int index = 0;
    std::size_t witness = 0;  // eta_i
    double score = 0.0;       // the guarded violation quantity
    double potential_before = 0.0;
    double potential_after = 0.0;
};

struct AbelianVerification {
    std::size_t checked = 0;  // characters outside the span
    double max_score = 0.0;
    double mean_score = 0.0;
    std::size_t argmax = 0;
    double classical_max = 0.0;  // max |E_{x~mu} conj(chi)| outside the span
    bool dissociated = false;
    bool pass = false;
    bool classical_pass = false;
};

struct AbelianCertificate {
    AbelianVariant variant = AbelianVariant::classical;
    SetStats A;
    double eps = 0.0;
    WitnessPolicy policy = WitnessPolicy::max_violation;
    std::vector<std::size_t> generators;  // Lambda or Delta
    std::vector<AbelianStep> trace;
    std::vector<double> potentials;  // Psi (classical, decreasing) or Phi (refined, increasing)
    int bound_r = 0;
    AbelianVerification verification;
};

/// |E_{x~mu} conj(chi_xi(x))| for every xi: the fixed correlation profile
/// of a probability measure (equals |G| |mu^|).
inline std::vector<double> mu_correlations(const DensityMap& mu) {
    FourierCoefficients F = dft(mu);
    std::vector<double> out(mu.size());
    double n = static_cast<double>(mu.size());
    for (std::size_t xi = 0; xi < out.size(); ++xi) out[xi] = n * std::abs(F.values[xi]);
    return out;
}

namespace detail {

inline std::optional<std::pair<std::size_t, double>> select_witness_span(
    const std::vector<double>& scores, const SpanSet& span, double eps, WitnessPolicy policy) {
    std::optional<std::pair<std::size_t, double>> best;
    for (std::size_t eta = 0; eta < scores.size(); ++eta) {
        if (span.contains(eta)) continue;
        if (scores[eta] > eps + kWitnessGuard) {
            if (policy == WitnessPolicy::first_in_canonical_order)
                return std::make_pair(eta, scores[eta]);
            if (!best || scores[eta] > best->second) best = std::make_pair(eta, scores[eta]);
        }
    }
    return best;
}

}  // namespace detail

/// Phi = D(p_r || u_r) = E_{sigma in Sigma_r} [m_sigma ln m_sigma], the
/// increasing potential of the refined construction.
inline double potential_phi_from_masses(const std::vector<double>& masses) {
    double phi = 0.0;
    for (double m : masses)
        if (m > 0.0) phi += m * std::log(m);
    return phi / static_cast<double>(masses.size());
}

inline std::vector<double> weight_masses(const std::vector<DensityMap>& weights,
                                         const SetStats& A) {
    std::vector<double> masses(weights.size());
    double inv = 1.0 / static_cast<double>(A.size);
    std::vector<std::size_t> members = A.indices();
    for (std::size_t s = 0; s < weights.size(); ++s) {
        double acc = 0.0;
        for (std::size_t x : members) acc += weights[s][x];
        masses[s] = acc * inv;
    }
    return masses;
}

inline double potential_phi(const WeightFamily& family, const SetStats& A) {
    return potential_phi_from_masses(weight_masses(family.weights, A));
}

/// Per-character refined scores E_{sigma}|E_{x~mu_A} g_sigma(x) conj(eta(x))|
/// from one dft per sigma; deterministic for any thread count.
inline std::vector<double> refined_scores(const std::vector<DensityMap>& weights,
                                          const SetStats& A,
                                          std::vector<FourierCoefficients>* coeffs_out = nullptr) {
    const GroupSpec& spec = A.indicator.spec();
    DensityMap mu = A.measure();
    std::vector<FourierCoefficients> coeffs;
    coeffs.reserve(weights.size());
    for (const DensityMap& g : weights) {
        DensityMap w(spec, MapKind::generic);
        for (std::size_t x = 0; x < spec.order(); ++x) w[x] = mu[x] * g[x];
        coeffs.push_back(dft(w));
    }
    double n = static_cast<double>(spec.order());
    double inv_sigma = 1.0 / static_cast<double>(weights.size());
    std::vector<double> scores(spec.order());
    parallel_for_index(spec.order(), [&](std::size_t eta) {
        double acc = 0.0;
        for (const FourierCoefficients& F : coeffs) acc += std::abs(F.values[eta]);
        scores[eta] = acc * n * inv_sigma;
    });
    if (coeffs_out) *coeffs_out = std::move(coeffs);
    return scores;
}

struct WeightFamilyReport {
    double min_weight = 0.0;           // min over sigma, x of g_sigma(x)
    double max_mean_error = 0.0;       // max_sigma |E_x g_sigma - 1|
    double max_pointwise_error = 0.0;  // max_x |E_sigma g_sigma(x) - 1|
    double max_outside_fourier = 0.0;  // max |g_sigma^(xi)| over xi outside <Delta>
    bool dissociated = false;
    std::size_t checked = 0;  // eta outside the span
    double max_score = 0.0;
    double mean_score = 0.0;
    std::size_t argmax = 0;
    double classical_max = 0.0;
    bool nonneg_pass = false;
    bool mean_pass = false;
    bool pointwise_pass = false;
    bool fourier_pass = false;
    bool final_pass = false;
    bool classical_pass = false;
    bool pass = false;
};

/// Checks every certificate condition for a (Delta, weights) pair against
/// the set A: nonnegativity, unit means, pointwise resolution of unity,
/// Fourier support inside <Delta>, dissociativity, and the terminal sweep.
inline WeightFamilyReport verify_weight_family(const SetStats& A, double eps,
                                               const std::vector<std::size_t>& delta,
                                               const std::vector<DensityMap>& weights) {
    const GroupSpec& spec = A.indicator.spec();
    if (weights.size() != (std::size_t{1} << delta.size()))
        throw std::invalid_argument("verify_weight_family: need 2^|Delta| weights");
    WeightFamilyReport rep;

    rep.dissociated = is_dissociated(spec, delta);
    SpanSet span(spec);
    for (std::size_t lambda : delta) span.extend(lambda);

    rep.min_weight = weights.empty() ? 0.0 : weights[0][0];
    double inv_sigma = 1.0 / static_cast<double>(weights.size());
    for (const DensityMap& g : weights) {
        for (double v : g.values()) rep.min_weight = std::min(rep.min_weight, v);
        rep.max_mean_error = std::max(rep.max_mean_error, std::abs(g.mean() - 1.0));
        FourierCoefficients F = dft(g);
        for (std::size_t xi = 0; xi < spec.order(); ++xi)
            if (!span.contains(xi))
                rep.max_outside_fourier = std::max(rep.max_outside_fourier, std::abs(F.values[xi]));
    }
    for (std::size_t x = 0; x < spec.order(); ++x) {
        double acc = 0.0;
        for (const DensityMap& g : weights) acc += g[x];
        rep.max_pointwise_error = std::max(rep.max_pointwise_error, std::abs(acc * inv_sigma - 1.0));
    }

    std::vector<double> scores = refined_scores(weights, A);
    std::vector<double> classical = mu_correlations(A.measure());
    bool any = false;
    double total = 0.0;
    for (std::size_t eta = 0; eta < spec.order(); ++eta) {
        if (span.contains(eta)) continue;
        ++rep.checked;
        total += scores[eta];
        if (!any || scores[eta] > rep.max_score) {
            rep.max_score = scores[eta];
            rep.argmax = eta;
            any = true;
        }
        rep.classical_max = std::max(rep.classical_max, classical[eta]);
    }
    rep.mean_score = rep.checked ? total / static_cast<double>(rep.checked) : 0.0;

    rep.nonneg_pass = rep.min_weight >= -1e-12;
    rep.mean_pass = rep.max_mean_error < 1e-10;
    rep.pointwise_pass = rep.max_pointwise_error < 1e-10;
    rep.fourier_pass = rep.max_outside_fourier < 1e-10;
    rep.final_pass = rep.max_score <= eps + kCertSlack;
    rep.classical_pass = rep.classical_max <= eps + kCertSlack;
    rep.pass = rep.nonneg_pass && rep.mean_pass && rep.pointwise_pass && rep.fourier_pass &&
               rep.dissociated && rep.final_pass && rep.classical_pass;
    return rep;
}

inline WeightFamilyReport verify_weight_family(const SetStats& A, double eps,
                                               const WeightFamily& family) {
    return verify_weight_family(A, eps, family.delta(), family.weights);
}

/// Classical construction: grow a dissociated Lambda from guarded
/// witnesses of the fixed correlation profile, reweight nu, track Psi.
inline AbelianCertificate classical_chang_abelian(
    const SetStats& A, double eps, WitnessPolicy policy = WitnessPolicy::max_violation) {
    const GroupSpec& spec = A.indicator.spec();
    if (!(eps > 0.0 && eps < 1.0))
        throw std::invalid_argument("classical_chang_abelian: eps not in (0,1)");
    DensityMap mu = A.measure();
    std::vector<double> corr = mu_correlations(mu);

    CoordsTable coords(spec);
    ConjRootTable roots(spec);
    AbelianCertificate cert{AbelianVariant::classical,
                            A,
                            eps,
                            policy,
                            {},
                            {},
                            {},
                            dimension_bound(eps, A.alpha),
                            {}};
    SpanSet span(spec);
    DensityMap nu = uniform_measure(spec);
    cert.potentials.push_back(kl_divergence(mu, nu));
    const int cap = iteration_cap(eps, A.alpha);

    while (true) {
        auto witness = detail::select_witness_span(corr, span, eps, policy);
        if (!witness) break;
        if (static_cast<int>(cert.trace.size()) + 1 > cap)
            throw IterationOverrunError("classical_chang_abelian: iteration cap exceeded");
        auto [xi, score] = *witness;

        ConjCharacter chi(spec, roots, xi);
        std::complex<double> mean{};
        for (std::size_t x = 0; x < spec.order(); ++x)
            if (mu[x] != 0.0) mean += mu[x] * chi(coords[x]);
        std::complex<double> theta =
            std::abs(mean) > 0.0 ? std::conj(mean) / std::abs(mean) : 1.0;
        DensityMap d(spec, MapKind::generic);
        for (std::size_t x = 0; x < spec.order(); ++x) d[x] = std::real(theta * chi(coords[x]));

        nu = reweight(nu, d, eps);
        span.extend(xi);
        double psi = kl_divergence(mu, nu);
        double drop = cert.potentials.back() - psi;
        if (drop < eps * eps / 2.0 - 1e-9)
            throw std::logic_error("classical_chang_abelian: potential drop below eps^2/2");

        // nu's density f_i = |G| nu must keep Fourier support in <Lambda_i>.
        DensityMap f(spec, MapKind::generic);
        double n = static_cast<double>(spec.order());
        for (std::size_t x = 0; x < spec.order(); ++x) f[x] = n * nu[x];
        FourierCoefficients fhat = dft(f);
        for (std::size_t q = 0; q < spec.order(); ++q)
            if (!span.contains(q) && std::abs(fhat.values[q]) > 1e-10)
                throw std::logic_error("classical_chang_abelian: density leaks outside the span");

        cert.trace.push_back(AbelianStep{static_cast<int>(cert.trace.size()), xi, score,
                                         cert.potentials.back(), psi});
        cert.potentials.push_back(psi);
    }

    cert.generators = span.generators();
    cert.verification.dissociated = is_dissociated(spec, cert.generators);
    bool any = false;
    double total = 0.0;
    for (std::size_t eta = 0; eta < spec.order(); ++eta) {
        if (span.contains(eta)) continue;
        ++cert.verification.checked;
        total += corr[eta];
        if (!any || corr[eta] > cert.verification.max_score) {
            cert.verification.max_score = corr[eta];
            cert.verification.argmax = eta;
            any = true;
        }
    }
    cert.verification.mean_score =
        cert.verification.checked ? total / static_cast<double>(cert.verification.checked) : 0.0;
    cert.verification.classical_max = cert.verification.max_score;
    cert.verification.pass =
        cert.verification.dissociated && cert.verification.max_score <= eps + kCertSlack;
    cert.verification.classical_pass = cert.verification.pass;
    return cert;
}

struct RefinedAbelianResult {
    AbelianCertificate certificate;
    WeightFamily family;
};

using RoundObserver = std::function<void(const WeightFamily&, int round)>;

/// Refined construction: split the weight family along guarded
/// witnesses of E_sigma |E_{x~mu_A} g_sigma conj(eta)|, growing Phi by more
/// than eps^2/2 per round.
inline RefinedAbelianResult refined_chang_abelian(const SetStats& A, double eps,
                                                  WitnessPolicy policy = WitnessPolicy::max_violation,
                                                  std::size_t weight_budget = kDefaultWeightBudget,
                                                  const RoundObserver& observer = {}) {
    const GroupSpec& spec = A.indicator.spec();
    if (!(eps > 0.0 && eps < 1.0))
        throw std::invalid_argument("refined_chang_abelian: eps not in (0,1)");
    const int bound = dimension_bound(eps, A.alpha);
    if (static_cast<double>(bound) + std::log2(static_cast<double>(spec.order())) >
        std::log2(static_cast<double>(weight_budget)))
        throw ResourceGateError(
            "refined_chang_abelian: 2^" + std::to_string(bound) + " x |G| weights exceed the "
            "budget of " + std::to_string(weight_budget) + " entries");

    const double ln_inv_alpha = std::log(1.0 / A.alpha);
    const int cap = iteration_cap(eps, A.alpha);
    CoordsTable coords(spec);
    ConjRootTable roots(spec);

    WeightFamily family{spec, SpanSet(spec), {}, {}, {}, {}};
    family.weights.emplace_back(spec, MapKind::weight, 1.0);
    family.masses = weight_masses(family.weights, A);

    AbelianCertificate cert{AbelianVariant::refined, A,  eps, policy, {}, {}, {},
                            bound,                   {}};
    cert.potentials.push_back(potential_phi_from_masses(family.masses));
    if (observer) observer(family, 0);

    while (true) {
        std::vector<FourierCoefficients> coeffs;
        std::vector<double> scores = refined_scores(family.weights, A, &coeffs);
        auto witness = detail::select_witness_span(scores, family.span, eps, policy);
        if (!witness) break;
        if (static_cast<int>(cert.trace.size()) + 1 > cap)
            throw IterationOverrunError("refined_chang_abelian: iteration cap exceeded");
        auto [eta, score] = *witness;

        double n = static_cast<double>(spec.order());
        ConjCharacter chi(spec, roots, eta);
        std::vector<std::complex<double>> chi_bar(spec.order());
        for (std::size_t x = 0; x < spec.order(); ++x) chi_bar[x] = chi(coords[x]);

        std::size_t count = family.weights.size();
        family.phases.assign(count, {1.0, 0.0});
        family.correlations.assign(count, 0.0);
        std::vector<DensityMap> next;
        next.reserve(count * 2);
        for (std::size_t s = 0; s < count; ++s) {
            std::complex<double> corr = n * coeffs[s].values[eta];  // E_{mu_A} g_sigma conj(eta)
            double c = std::abs(corr);
            if (c > 0.0) family.phases[s] = std::conj(corr) / c;
            family.correlations[s] = c;
            DensityMap plus(spec, MapKind::weight), minus(spec, MapKind::weight);
            const DensityMap& g = family.weights[s];
            for (std::size_t x = 0; x < spec.order(); ++x) {
                double d = std::real(family.phases[s] * chi_bar[x]);
                plus[x] = (1.0 + d) * g[x];
                minus[x] = (1.0 - d) * g[x];
            }
            next.push_back(std::move(plus));
            next.push_back(std::move(minus));
        }
        family.weights = std::move(next);
        family.span.extend(eta);
        family.masses = weight_masses(family.weights, A);

        double phi = potential_phi_from_masses(family.masses);
        double gain = phi - cert.potentials.back();
        if (gain < eps * eps / 2.0 - 1e-9)
            throw std::logic_error("refined_chang_abelian: potential gain below eps^2/2");
        if (phi > ln_inv_alpha + 1e-9)
            throw std::logic_error("refined_chang_abelian: potential exceeds ln(1/alpha)");

        cert.trace.push_back(AbelianStep{static_cast<int>(cert.trace.size()), eta, score,
                                         cert.potentials.back(), phi});
        cert.potentials.push_back(phi);
        if (observer) observer(family, static_cast<int>(cert.trace.size()));
    }

    cert.generators = family.delta();
    WeightFamilyReport rep = verify_weight_family(A, eps, family);
    cert.verification.checked = rep.checked;
    cert.verification.max_score = rep.max_score;
    cert.verification.mean_score = rep.mean_score;
    cert.verification.argmax = rep.argmax;
    cert.verification.classical_max = rep.classical_max;
    cert.verification.dissociated = rep.dissociated;
    cert.verification.pass = rep.pass;
    cert.verification.classical_pass = rep.classical_pass;
    return RefinedAbelianResult{std::move(cert), std::move(family)};
}

}  // namespace chang
