#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "chang/common.hpp"
#include "chang/dense_map.hpp"
#include "chang/group.hpp"
#include "chang/parallel.hpp"
#include "chang/subspace.hpp"

namespace chang {

namespace detail {

/// Tensor transform: applies the length-m DFT kernel along every axis of
/// the mixed-radix layout. sign=-1 gives the forward kernel e^{-2pi i tc/m},
/// sign=+1 the inverse. Cost |G| * sum m_j.
inline void transform_axes(const GroupSpec& spec, std::vector<std::complex<double>>& v,
                           int sign) {
    const auto& ms = spec.factors();
    std::size_t stride = spec.order();
    std::vector<std::complex<double>> root, tmp;
    for (std::size_t j = 0; j < ms.size(); ++j) {
        std::size_t m = static_cast<std::size_t>(ms[j]);
        stride /= m;
        root.resize(m);
        for (std::size_t r = 0; r < m; ++r)
            root[r] = std::polar(1.0, sign * 2.0 * std::numbers::pi * static_cast<double>(r) /
                                          static_cast<double>(m));
        tmp.resize(m);
        std::size_t block = m * stride;
        for (std::size_t b = 0; b < v.size(); b += block) {
            for (std::size_t o = 0; o < stride; ++o) {
                std::complex<double>* base = v.data() + b + o;
                for (std::size_t t = 0; t < m; ++t) {
                    std::complex<double> acc{};
                    for (std::size_t c = 0; c < m; ++c) acc += base[c * stride] * root[t * c % m];
                    tmp[t] = acc;
                }
                for (std::size_t t = 0; t < m; ++t) base[t * stride] = tmp[t];
            }
        }
    }
}

}  // namespace detail

/// Forward transform f^(xi) = E_x f(x) conj(chi_xi(x)).
template <typename T>
FourierCoefficients dft(const DenseMap<T>& f) {
    std::vector<std::complex<double>> v(f.values().begin(), f.values().end());
    detail::transform_axes(f.spec(), v, -1);
    double inv = 1.0 / static_cast<double>(f.size());
    for (auto& z : v) z *= inv;
    return FourierCoefficients{f.spec(), std::move(v)};
}

/// Inverse transform f(x) = sum_xi F(xi) chi_xi(x).
inline ComplexMap idft(const FourierCoefficients& F) {
    if (F.values.size() != F.spec.order())
        throw std::invalid_argument("idft: coefficient count != |G|");
    std::vector<std::complex<double>> v = F.values;
    detail::transform_axes(F.spec, v, +1);
    return ComplexMap(F.spec, MapKind::generic, std::move(v));
}

/// In-place unnormalized Walsh-Hadamard transform; size must be a power
/// of two. Exact on integer-valued input (all arithmetic is +/-).
template <typename T>
void wht_inplace(std::vector<T>& v) {
    if (v.empty() || (v.size() & (v.size() - 1)) != 0)
        throw std::invalid_argument("wht_inplace: size is not a power of two");
    for (std::size_t half = 1; half < v.size(); half <<= 1) {
        for (std::size_t b = 0; b < v.size(); b += half << 1) {
            for (std::size_t o = 0; o < half; ++o) {
                T a = v[b + o];
                T c = v[b + half + o];
                v[b + o] = a + c;
                v[b + half + o] = a - c;
            }
        }
    }
}

/// Exact transform over F_2^n: characters are +-1, so coefficients are
/// dyadic rationals representable exactly in doubles (for |values| < 2^53).
inline std::vector<double> dft_exact_p2(const DensityMap& f) {
    auto pv = f.spec().prime_vector();
    if (!pv || pv->p != 2) throw std::invalid_argument("dft_exact_p2: spec is not F_2^n");
    std::vector<double> v = f.values();
    wht_inplace(v);
    double inv = 1.0 / static_cast<double>(f.size());
    for (double& x : v) x *= inv;
    return v;
}

/// |sum_xi |f^(xi)|^2 - E_x |f(x)|^2|, which Parseval makes 0.
template <typename T>
double parseval_gap(const DenseMap<T>& f) {
    FourierCoefficients F = dft(f);
    double lhs = 0.0;
    for (const auto& z : F.values) lhs += std::norm(z);
    double rhs = 0.0;
    for (const T& x : f.values()) rhs += std::norm(std::complex<double>(x));
    rhs /= static_cast<double>(f.size());
    return std::abs(lhs - rhs);
}

/// Spec_eps(A) = {xi : |1_A^(xi)| > eps*alpha}, tolerance-guarded; always
/// contains 0.
inline std::vector<std::size_t> spectrum(const SetStats& A, double eps) {
    if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("spectrum: eps not in (0,1)");
    FourierCoefficients F = dft(A.indicator);
    std::vector<std::size_t> out;
    double threshold = eps * A.alpha;
    for (std::size_t xi = 0; xi < F.values.size(); ++xi)
        if (xi == 0 || exceeds_guarded(std::abs(F.values[xi]), threshold)) out.push_back(xi);
    return out;
}

/// Replaces f by its average over each coset of W. Constant on cosets,
/// mean-preserving, idempotent.
template <typename T>
DenseMap<T> coset_average(const DenseMap<T>& f, const CosetMap& w) {
    if (f.size() != w.label.size())
        throw std::invalid_argument("coset_average: spec mismatch");
    std::vector<T> sums(w.coset_count(), T{});
    for (std::size_t i = 0; i < f.size(); ++i) sums[w.label[i]] += f[i];
    double inv = 1.0 / static_cast<double>(w.coset_size);
    for (T& s : sums) s *= inv;
    MapKind kind = f.kind() == MapKind::indicator ? MapKind::density : f.kind();
    DenseMap<T> out(f.spec(), kind);
    for (std::size_t i = 0; i < f.size(); ++i) out[i] = sums[w.label[i]];
    return out;
}

/// Support of a nonnegative map, each point tagged with a compact id of
/// its (occupied) fiber. Fiber ids follow first occurrence in canonical
/// order; sweeps over characters share one of these.
struct FiberedSupport {
    std::vector<std::size_t> element;  // canonical indices, ascending
    std::vector<std::size_t> fiber;    // compact occupied-fiber id per entry
    std::vector<double> weight;        // map value at the element
    std::size_t fiber_count = 0;
};

inline FiberedSupport fibered_support(const DensityMap& mu, const CosetMap& fibers) {
    if (mu.size() != fibers.label.size())
        throw std::invalid_argument("fibered_support: spec mismatch");
    FiberedSupport sup;
    std::vector<std::size_t> compact(fibers.coset_count(), SIZE_MAX);
    for (std::size_t i = 0; i < mu.size(); ++i) {
        if (mu[i] == 0.0) continue;
        std::size_t lab = fibers.label[i];
        if (compact[lab] == SIZE_MAX) compact[lab] = sup.fiber_count++;
        sup.element.push_back(i);
        sup.fiber.push_back(compact[lab]);
        sup.weight.push_back(mu[i]);
    }
    return sup;
}

/// sum over occupied fibers F of |sum_{x in F} w(x) conj(chi_xi(x))|.
/// With w = mu this is the measure-form cosetwise l1 score
/// sum_y mu(F_y) |E_{x~mu|F_y} conj(chi_xi)|; empty fibers contribute 0.
inline double fiber_l1_score(const FiberedSupport& sup, const CoordsTable& coords,
                             const ConjCharacter& chi) {
    std::vector<std::complex<double>> acc(sup.fiber_count);
    for (std::size_t e = 0; e < sup.element.size(); ++e)
        acc[sup.fiber[e]] += sup.weight[e] * chi(coords[sup.element[e]]);
    double total = 0.0;
    for (const auto& z : acc) total += std::abs(z);
    return total;
}

/// Measure form of the cosetwise l1 functional:
/// sum_y mu(F_{V,y}) |E_{x~mu|F_{V,y}} conj(chi_xi(x))|.
inline double mu_cosetwise_l1(const DensityMap& mu, const CosetMap& fibers, std::size_t xi) {
    FiberedSupport sup = fibered_support(mu, fibers);
    CoordsTable coords(mu.spec());
    return fiber_l1_score(sup, coords, ConjCharacter(mu.spec(), xi));
}

inline double mu_cosetwise_l1(const DensityMap& mu, const SubspaceFp& v, std::size_t xi) {
    return mu_cosetwise_l1(mu, coset_map(mu.spec(), v.annihilator()), xi);
}

/// Set form: E_{y in G/V^perp} |E_{x in y+V^perp} 1_A(x) conj(chi_xi(x))|,
/// the left side of the refined inequality. Equals alpha times the measure
/// form at mu = mu_A.
inline double cosetwise_l1(const SetStats& A, const CosetMap& fibers, std::size_t xi) {
    FiberedSupport sup = fibered_support(A.indicator, fibers);
    double inv = 1.0 / static_cast<double>(A.indicator.size());
    for (double& w : sup.weight) w = inv;
    CoordsTable coords(A.indicator.spec());
    return fiber_l1_score(sup, coords, ConjCharacter(A.indicator.spec(), xi));
}

inline double cosetwise_l1(const SetStats& A, const SubspaceFp& v, std::size_t xi) {
    return cosetwise_l1(A, coset_map(A.indicator.spec(), v.annihilator()), xi);
}

/// Scores for every character at once; parallel over xi with one output
/// slot per character, so results are identical for any thread count.
inline std::vector<double> fiber_l1_scores_all(const GroupSpec& spec, const FiberedSupport& sup,
                                               const CoordsTable& coords) {
    ConjRootTable roots(spec);
    std::vector<double> scores(spec.order());
    parallel_for_index(spec.order(), [&](std::size_t xi) {
        scores[xi] = fiber_l1_score(sup, coords, ConjCharacter(spec, roots, xi));
    });
    return scores;
}

}  // namespace chang
