#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "chang/common.hpp"
#include "chang/dense_map.hpp"
#include "chang/group.hpp"
#include "chang/subspace.hpp"

// Brute-force reference implementations. Everything here favors literal
// definitions over speed and shares nothing with the fast paths beyond the
// group_core layer.
namespace chang::oracle {

inline constexpr std::size_t kDftNaiveCap = 1u << 16;
inline constexpr std::size_t kLambda4DirectCap = 512;
inline constexpr std::size_t kMinimalSubspaceCap = 256;
inline constexpr std::size_t kSpanEnumerateCap = 12;

/// chibar_xi(x) from the exact rational pairing, converted to complex at
/// the last step.
inline std::complex<double> conj_character_naive(const GroupSpec& spec, std::size_t xi,
                                                 std::size_t x) {
    PhaseFrac t = pairing_phase(spec, xi, x);
    return std::polar(1.0, -2.0 * std::numbers::pi * t.turns());
}

template <typename T>
FourierCoefficients dft_naive(const DenseMap<T>& f) {
    const GroupSpec& spec = f.spec();
    if (spec.order() > kDftNaiveCap)
        throw std::invalid_argument("dft_naive: group exceeds size cap");
    std::vector<std::complex<double>> out(spec.order());
    double inv = 1.0 / static_cast<double>(spec.order());
    for (std::size_t xi = 0; xi < spec.order(); ++xi) {
        std::complex<double> acc{};
        for (std::size_t x = 0; x < spec.order(); ++x)
            acc += std::complex<double>(f[x]) * conj_character_naive(spec, xi, x);
        out[xi] = acc * inv;
    }
    return FourierCoefficients{spec, std::move(out)};
}

/// (1/|G|^3) sum over x1,x2,x3 of f1(x1) f2(x2) conj(f3(x3) f4(x1+x2-x3)),
/// summed literally with precomputed addition tables.
template <typename T1, typename T2, typename T3, typename T4>
std::complex<double> lambda4_direct(const DenseMap<T1>& f1, const DenseMap<T2>& f2,
                                    const DenseMap<T3>& f3, const DenseMap<T4>& f4) {
    const GroupSpec& spec = f1.spec();
    if (!(spec == f2.spec() && spec == f3.spec() && spec == f4.spec()))
        throw std::invalid_argument("lambda4_direct: group mismatch");
    std::size_t n = spec.order();
    if (n > kLambda4DirectCap)
        throw std::invalid_argument("lambda4_direct: group exceeds size cap");
    std::vector<std::size_t> add(n * n), neg(n);
    for (std::size_t a = 0; a < n; ++a) {
        neg[a] = spec.negate(a);
        for (std::size_t b = 0; b < n; ++b) add[a * n + b] = spec.add(a, b);
    }
    std::complex<double> acc{};
    for (std::size_t x1 = 0; x1 < n; ++x1) {
        if (f1[x1] == T1{}) continue;
        for (std::size_t x2 = 0; x2 < n; ++x2) {
            std::complex<double> pre = std::complex<double>(f1[x1]) * std::complex<double>(f2[x2]);
            if (pre == std::complex<double>{}) continue;
            std::size_t s = add[x1 * n + x2];
            for (std::size_t x3 = 0; x3 < n; ++x3) {
                std::size_t x4 = add[s * n + neg[x3]];
                acc += pre * std::conj(std::complex<double>(f3[x3]) *
                                       std::complex<double>(f4[x4]));
            }
        }
    }
    double inv = 1.0 / static_cast<double>(n);
    return acc * inv * inv * inv;
}

/// Every {-1,0,1}-combination of delta, deduplicated: the reference for
/// SpanSet built by walking all 3^|delta| coefficient vectors.
inline std::vector<std::size_t> span_enumerate_naive(const GroupSpec& spec,
                                                     const std::vector<std::size_t>& delta,
                                                     std::size_t cap = kSpanEnumerateCap) {
    if (delta.size() > cap)
        throw std::invalid_argument("span_enumerate_naive: generator count exceeds cap");
    std::vector<bool> seen(spec.order(), false);
    std::vector<std::size_t> out;
    auto walk = [&](auto&& self, std::size_t j, std::size_t sum) -> void {
        if (j == delta.size()) {
            if (!seen[sum]) {
                seen[sum] = true;
                out.push_back(sum);
            }
            return;
        }
        self(self, j + 1, sum);
        self(self, j + 1, spec.add(sum, delta[j]));
        self(self, j + 1, spec.add(sum, spec.negate(delta[j])));
    };
    walk(walk, 0, 0);
    return out;
}

namespace detail {

/// Visits every k-dimensional subspace of F_p^n exactly once as an RREF
/// basis: pivot sets in lexicographic order, free entries by odometer.
template <typename Fn>
void for_each_subspace(int p, int n, int k, Fn&& fn) {
    if (k == 0) {
        fn(std::vector<std::vector<int>>{});
        return;
    }
    std::vector<int> pivots(static_cast<std::size_t>(k));
    auto emit = [&] {
        std::vector<bool> is_pivot(static_cast<std::size_t>(n), false);
        for (int c : pivots) is_pivot[static_cast<std::size_t>(c)] = true;
        std::vector<std::pair<int, int>> free_pos;
        for (int i = 0; i < k; ++i)
            for (int c = pivots[static_cast<std::size_t>(i)] + 1; c < n; ++c)
                if (!is_pivot[static_cast<std::size_t>(c)]) free_pos.emplace_back(i, c);
        std::vector<int> digits(free_pos.size(), 0);
        while (true) {
            std::vector<std::vector<int>> rows(static_cast<std::size_t>(k),
                                               std::vector<int>(static_cast<std::size_t>(n), 0));
            for (int i = 0; i < k; ++i)
                rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(
                    pivots[static_cast<std::size_t>(i)])] = 1;
            for (std::size_t t = 0; t < free_pos.size(); ++t)
                rows[static_cast<std::size_t>(free_pos[t].first)]
                    [static_cast<std::size_t>(free_pos[t].second)] = digits[t];
            fn(rows);
            std::size_t t = 0;
            for (; t < digits.size(); ++t) {
                if (++digits[t] < p) break;
                digits[t] = 0;
            }
            if (t == digits.size()) break;
        }
    };
    auto choose = [&](auto&& self, int idx, int start) -> void {
        if (idx == k) {
            emit();
            return;
        }
        for (int c = start; c <= n - (k - idx); ++c) {
            pivots[static_cast<std::size_t>(idx)] = c;
            self(self, idx + 1, c + 1);
        }
    };
    choose(choose, 0, 0);
}

/// The refined cosetwise bound checked literally: for every xi outside V,
/// (1/|G|) sum over cosets of W = V^perp of |sum_{x in A cap coset}
/// chibar_xi(x)| must stay within eps*alpha.
inline bool refined_verify_naive(const SetStats& A, double eps, const SubspaceFp& v,
                                 const std::vector<std::size_t>& support) {
    const GroupSpec& spec = A.indicator.spec();
    CosetMap fibers = coset_map(spec, v.annihilator());
    double threshold = eps * A.alpha + kCertSlack;
    std::vector<std::complex<double>> acc(fibers.coset_count());
    for (std::size_t xi = 0; xi < spec.order(); ++xi) {
        if (v.contains(spec.element_at(xi).coords)) continue;
        std::fill(acc.begin(), acc.end(), std::complex<double>{});
        for (std::size_t x : support) acc[fibers.label[x]] += conj_character_naive(spec, xi, x);
        double score = 0.0;
        for (const auto& c : acc) score += std::abs(c);
        score /= static_cast<double>(spec.order());
        if (score > threshold) return false;
    }
    return true;
}

}  // namespace detail

/// Exhaustive search for a subspace of minimum dimension meeting the
/// refined cosetwise bound; confirms algorithmic output is valid, not that
/// it is minimal.
inline SubspaceFp minimal_refined_subspace(const SetStats& A, double eps) {
    const GroupSpec& spec = A.indicator.spec();
    auto pv = spec.prime_vector();
    if (!pv || (pv->p != 2 && pv->p != 3) || spec.order() > kMinimalSubspaceCap)
        throw std::invalid_argument("minimal_refined_subspace: group exceeds search cap");
    std::vector<std::size_t> support = A.indices();
    for (int k = 0; k <= pv->n; ++k) {
        std::optional<SubspaceFp> found;
        detail::for_each_subspace(pv->p, pv->n, k, [&](const std::vector<std::vector<int>>& rows) {
            if (found) return;
            SubspaceFp v = SubspaceFp::span(pv->p, pv->n, rows);
            if (detail::refined_verify_naive(A, eps, v, support)) found = v;
        });
        if (found) return *found;
    }
    throw std::logic_error("minimal_refined_subspace: no subspace passed");  // unreachable
}

}  // namespace chang::oracle
