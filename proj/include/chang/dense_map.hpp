#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "chang/group.hpp"

namespace chang {

enum class MapKind { indicator, probability_measure, density, weight, generic };

inline std::string to_string(MapKind k) {
    switch (k) {
        case MapKind::indicator: return "indicator";
        case MapKind::probability_measure: return "probability_measure";
        case MapKind::density: return "density";
        case MapKind::weight: return "weight";
        case MapKind::generic: return "generic";
    }
    throw std::logic_error("MapKind: bad tag");
}

inline MapKind map_kind_from_string(const std::string& s) {
    for (MapKind k : {MapKind::indicator, MapKind::probability_measure, MapKind::density,
                      MapKind::weight, MapKind::generic})
        if (to_string(k) == s) return k;
    throw std::invalid_argument("MapKind: unknown tag \"" + s + "\"");
}

/// Function on G stored dense by canonical index. T is double for
/// measures, densities and weights, std::complex<double> for generic
/// Fourier-side data.
template <typename T>
class DenseMap {
public:
    DenseMap(GroupSpec spec, MapKind kind, T fill = T{})
        : spec_(std::move(spec)), kind_(kind), values_(spec_.order(), fill) {}

    DenseMap(GroupSpec spec, MapKind kind, std::vector<T> values)
        : spec_(std::move(spec)), kind_(kind), values_(std::move(values)) {
        if (values_.size() != spec_.order())
            throw std::invalid_argument("DenseMap: value count != |G|");
    }

    const GroupSpec& spec() const { return spec_; }
    MapKind kind() const { return kind_; }
    void set_kind(MapKind k) { kind_ = k; }
    std::size_t size() const { return values_.size(); }
    const std::vector<T>& values() const { return values_; }
    std::vector<T>& values() { return values_; }
    T operator[](std::size_t i) const { return values_[i]; }
    T& operator[](std::size_t i) { return values_[i]; }

    T sum() const {
        T s{};
        for (const T& v : values_) s += v;
        return s;
    }

    T mean() const { return sum() / static_cast<double>(values_.size()); }

    /// Checks the declared kind's invariant; throws std::domain_error on
    /// violation. Tolerance applies to the probability-measure total.
    void validate(double tol = 1e-9) const {
        if constexpr (std::is_same_v<T, double>) {
            if (kind_ == MapKind::indicator) {
                for (double v : values_)
                    if (v != 0.0 && v != 1.0)
                        throw std::domain_error("DenseMap: indicator value not in {0,1}");
            }
            if (kind_ == MapKind::probability_measure || kind_ == MapKind::density ||
                kind_ == MapKind::weight || kind_ == MapKind::indicator) {
                for (double v : values_)
                    if (v < 0.0) throw std::domain_error("DenseMap: negative value");
            }
            if (kind_ == MapKind::probability_measure) {
                if (std::abs(sum() - 1.0) > tol)
                    throw std::domain_error("DenseMap: measure total != 1");
            }
        }
    }

    friend bool operator==(const DenseMap& a, const DenseMap& b) {
        return a.spec_ == b.spec_ && a.kind_ == b.kind_ && a.values_ == b.values_;
    }

private:
    GroupSpec spec_;
    MapKind kind_;
    std::vector<T> values_;
};

using DensityMap = DenseMap<double>;
using ComplexMap = DenseMap<std::complex<double>>;

/// Fourier coefficients of a function on G, indexed by character index
/// under the fixed self-duality.
struct FourierCoefficients {
    GroupSpec spec;
    std::vector<std::complex<double>> values;

    std::complex<double> operator[](std::size_t xi) const { return values[xi]; }
};

/// A set with its indicator and density. alpha = |A| / |G|.
struct SetStats {
    DensityMap indicator;
    std::size_t size = 0;
    double alpha = 0.0;

    static SetStats from_indices(const GroupSpec& spec, const std::vector<std::size_t>& indices) {
        DensityMap f(spec, MapKind::indicator);
        for (std::size_t i : indices) {
            if (i >= spec.order()) throw std::invalid_argument("SetStats: index out of range");
            f[i] = 1.0;
        }
        return from_indicator(std::move(f));
    }

    static SetStats from_indicator(DensityMap f) {
        if (f.kind() != MapKind::indicator) f.set_kind(MapKind::indicator);
        f.validate();
        SetStats s{std::move(f), 0, 0.0};
        for (double v : s.indicator.values())
            if (v == 1.0) ++s.size;
        if (s.size == 0) throw std::invalid_argument("SetStats: empty set has no density analysis");
        s.alpha = static_cast<double>(s.size) / static_cast<double>(s.indicator.size());
        return s;
    }

    std::vector<std::size_t> indices() const {
        std::vector<std::size_t> out;
        out.reserve(size);
        for (std::size_t i = 0; i < indicator.size(); ++i)
            if (indicator[i] == 1.0) out.push_back(i);
        return out;
    }

    /// Normalized uniform measure mu_A on the set.
    DensityMap measure() const {
        DensityMap mu(indicator.spec(), MapKind::probability_measure);
        double w = 1.0 / static_cast<double>(size);
        for (std::size_t i = 0; i < indicator.size(); ++i)
            if (indicator[i] == 1.0) mu[i] = w;
        return mu;
    }
};

}  // namespace chang
