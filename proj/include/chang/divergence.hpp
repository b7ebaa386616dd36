#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>

#include "chang/dense_map.hpp"

namespace chang {

/// D(nu1 || nu2) = sum nu1 log(nu1/nu2), natural log, with 0 log 0 = 0 and
/// +infinity when nu1 charges a point nu2 does not.
inline double kl_divergence(const DensityMap& nu1, const DensityMap& nu2) {
    if (!(nu1.spec() == nu2.spec()))
        throw std::invalid_argument("kl_divergence: group mismatch");
    nu1.validate();
    nu2.validate();
    if (nu1.kind() != MapKind::probability_measure || nu2.kind() != MapKind::probability_measure)
        throw std::invalid_argument("kl_divergence: both inputs must be probability measures");
    double d = 0.0;
    for (std::size_t i = 0; i < nu1.size(); ++i) {
        if (nu1[i] == 0.0) continue;
        if (nu2[i] == 0.0) return std::numeric_limits<double>::infinity();
        d += nu1[i] * std::log(nu1[i] / nu2[i]);
    }
    return d;
}

/// Chord lower bound for the per-step potential move:
/// h(t) = ((1+t)/2) log(1+t) + ((1-t)/2) log(1-t), with h(t) >= t^2/2.
inline double chord_entropy(double t) {
    if (!(t >= 0.0 && t < 1.0)) throw std::invalid_argument("chord_entropy: t not in [0,1)");
    if (t == 0.0) return 0.0;
    return 0.5 * (1.0 + t) * std::log1p(t) + 0.5 * (1.0 - t) * std::log1p(-t);
}

/// E_x [h(x) log h(x)] for a mean-one density h; equals D(mu||uniform) for
/// mu = h/|G|.
inline double entropy_functional(const DensityMap& h) {
    double s = 0.0;
    for (double v : h.values()) {
        if (v < 0.0) throw std::invalid_argument("entropy_functional: negative density");
        if (v > 0.0) s += v * std::log(v);
    }
    return s / static_cast<double>(h.size());
}

}  // namespace chang
