#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <numbers>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace chang {

/// Element of a finite abelian group, stored as one residue per cyclic
/// factor, coordinate j reduced into [0, m_j).
struct GroupElement {
    std::vector<int> coords;

    friend bool operator==(const GroupElement&, const GroupElement&) = default;
};

/// A finite abelian group presented as a product of cyclic factors
/// Z_{m_1} x ... x Z_{m_k}. Elements are addressed by a canonical
/// mixed-radix index with the first factor most significant, so
/// (x_1, ..., x_k) -> ((x_1 m_2 + x_2) m_3 + ...) + x_k.
///
/// The dual group is identified with the group itself through the
/// pairing <xi, x> = sum_j xi_j x_j / m_j (mod 1); see pairing_phase.
class GroupSpec {
public:
    explicit GroupSpec(std::vector<int> factors) : factors_(std::move(factors)) {
        if (factors_.empty()) throw std::invalid_argument("GroupSpec: no factors");
        order_ = 1;
        for (int m : factors_) {
            if (m < 2) throw std::invalid_argument("GroupSpec: every modulus must be >= 2");
            order_ *= static_cast<std::size_t>(m);
        }
        lcm_ = 1;
        for (int m : factors_) lcm_ = std::lcm(lcm_, static_cast<long>(m));
    }

    /// Accepts "p^n" (n copies of p) and "m1xm2x...xmk"; the forms
    /// combine, e.g. "2^3x5" = Z_2 x Z_2 x Z_2 x Z_5.
    static GroupSpec parse(std::string_view text) {
        std::vector<int> factors;
        std::size_t pos = 0;
        while (pos <= text.size()) {
            std::size_t next = text.find('x', pos);
            std::string_view tok = text.substr(pos, next == std::string_view::npos
                                                        ? std::string_view::npos
                                                        : next - pos);
            std::size_t caret = tok.find('^');
            try {
                if (caret == std::string_view::npos) {
                    factors.push_back(parse_int(tok));
                } else {
                    int base = parse_int(tok.substr(0, caret));
                    int exp = parse_int(tok.substr(caret + 1));
                    if (exp < 1) throw std::invalid_argument("exponent must be >= 1");
                    for (int i = 0; i < exp; ++i) factors.push_back(base);
                }
            } catch (const std::exception&) {
                throw std::invalid_argument("GroupSpec: cannot parse \"" + std::string(text) + "\"");
            }
            if (next == std::string_view::npos) break;
            pos = next + 1;
        }
        return GroupSpec(std::move(factors));
    }

    std::string to_string() const {
        // Collapse runs of one repeated factor into p^n.
        bool uniform = true;
        for (int m : factors_)
            if (m != factors_[0]) uniform = false;
        if (uniform && factors_.size() > 1)
            return std::to_string(factors_[0]) + "^" + std::to_string(factors_.size());
        std::string out;
        for (std::size_t j = 0; j < factors_.size(); ++j) {
            if (j) out += 'x';
            out += std::to_string(factors_[j]);
        }
        return out;
    }

    const std::vector<int>& factors() const { return factors_; }
    std::size_t arity() const { return factors_.size(); }
    std::size_t order() const { return order_; }
    long phase_denominator() const { return lcm_; }

    /// True iff every factor equals the same prime p, i.e. the group is
    /// the vector space F_p^n.
    bool is_prime_vector() const { return prime_vector().has_value(); }

    struct PrimeVector {
        int p;
        int n;
    };

    std::optional<PrimeVector> prime_vector() const {
        int p = factors_[0];
        for (int m : factors_)
            if (m != p) return std::nullopt;
        if (!is_prime(p)) return std::nullopt;
        return PrimeVector{p, static_cast<int>(factors_.size())};
    }

    std::size_t index_of(const GroupElement& x) const {
        if (x.coords.size() != factors_.size())
            throw std::invalid_argument("GroupSpec: coordinate count mismatch");
        std::size_t idx = 0;
        for (std::size_t j = 0; j < factors_.size(); ++j) {
            int c = x.coords[j];
            if (c < 0 || c >= factors_[j])
                throw std::invalid_argument("GroupSpec: coordinate out of range");
            idx = idx * static_cast<std::size_t>(factors_[j]) + static_cast<std::size_t>(c);
        }
        return idx;
    }

    GroupElement element_at(std::size_t index) const {
        if (index >= order_) throw std::invalid_argument("GroupSpec: index out of range");
        GroupElement x;
        x.coords.resize(factors_.size());
        for (std::size_t j = factors_.size(); j-- > 0;) {
            x.coords[j] = static_cast<int>(index % static_cast<std::size_t>(factors_[j]));
            index /= static_cast<std::size_t>(factors_[j]);
        }
        return x;
    }

    GroupElement reduce(std::vector<int> raw) const {
        if (raw.size() != factors_.size())
            throw std::invalid_argument("GroupSpec: coordinate count mismatch");
        for (std::size_t j = 0; j < raw.size(); ++j) {
            int m = factors_[j];
            raw[j] = ((raw[j] % m) + m) % m;
        }
        return GroupElement{std::move(raw)};
    }

    std::size_t add(std::size_t a, std::size_t b) const {
        GroupElement xa = element_at(a), xb = element_at(b);
        for (std::size_t j = 0; j < factors_.size(); ++j) {
            xa.coords[j] += xb.coords[j];
            if (xa.coords[j] >= factors_[j]) xa.coords[j] -= factors_[j];
        }
        return index_of(xa);
    }

    std::size_t negate(std::size_t a) const {
        GroupElement xa = element_at(a);
        for (std::size_t j = 0; j < factors_.size(); ++j)
            if (xa.coords[j] != 0) xa.coords[j] = factors_[j] - xa.coords[j];
        return index_of(xa);
    }

    std::size_t sub(std::size_t a, std::size_t b) const { return add(a, negate(b)); }

    friend bool operator==(const GroupSpec& a, const GroupSpec& b) {
        return a.factors_ == b.factors_;
    }

private:
    static int parse_int(std::string_view s) {
        if (s.empty()) throw std::invalid_argument("empty token");
        int v = 0;
        for (char c : s) {
            if (c < '0' || c > '9') throw std::invalid_argument("non-digit");
            v = v * 10 + (c - '0');
            if (v > 1'000'000) throw std::invalid_argument("factor too large");
        }
        return v;
    }

    static bool is_prime(int p) {
        if (p < 2) return false;
        for (int d = 2; static_cast<long>(d) * d <= p; ++d)
            if (p % d == 0) return false;
        return true;
    }

    std::vector<int> factors_;
    std::size_t order_ = 0;
    long lcm_ = 1;
};

/// Exact rational phase t in [0,1), stored in lowest terms. The value
/// of the character chi_xi at x is e^{2 pi i t}.
struct PhaseFrac {
    long num = 0;  // 0 <= num < den
    long den = 1;

    double turns() const { return static_cast<double>(num) / static_cast<double>(den); }

    std::complex<double> unit() const {
        return std::polar(1.0, 2.0 * std::numbers::pi * turns());
    }

    friend bool operator==(const PhaseFrac&, const PhaseFrac&) = default;
};

/// Pairing phase of the fixed self-duality: <xi, x> = sum_j xi_j x_j / m_j
/// reduced mod 1. Bilinear in both arguments. Over F_p^n this is the usual
/// dot product divided by p.
inline PhaseFrac pairing_phase(const GroupSpec& spec, const GroupElement& xi,
                               const GroupElement& x) {
    if (xi.coords.size() != spec.arity() || x.coords.size() != spec.arity())
        throw std::invalid_argument("pairing_phase: coordinate count mismatch");
    long den = spec.phase_denominator();
    long num = 0;
    for (std::size_t j = 0; j < spec.arity(); ++j) {
        long w = den / spec.factors()[j];
        num = (num + static_cast<long>(xi.coords[j]) * x.coords[j] % den * w) % den;
    }
    long g = std::gcd(num, den);
    return PhaseFrac{num / g, den / g};
}

inline PhaseFrac pairing_phase(const GroupSpec& spec, std::size_t xi, std::size_t x) {
    return pairing_phase(spec, spec.element_at(xi), spec.element_at(x));
}

/// Conjugate roots of unity e^{-2 pi i k / L} for L = lcm of the moduli;
/// shared across a sweep so every character hits identical doubles.
class ConjRootTable {
public:
    explicit ConjRootTable(const GroupSpec& spec)
        : roots_(std::make_shared<std::vector<std::complex<double>>>()) {
        long L = spec.phase_denominator();
        roots_->resize(static_cast<std::size_t>(L));
        for (long k = 0; k < L; ++k) {
            // Quarter turns are exact so p = 2 characters are exactly +-1.
            if ((4 * k) % L == 0) {
                constexpr std::complex<double> quarter[4] = {
                    {1.0, 0.0}, {0.0, -1.0}, {-1.0, 0.0}, {0.0, 1.0}};
                (*roots_)[static_cast<std::size_t>(k)] = quarter[(4 * k / L) % 4];
                continue;
            }
            (*roots_)[static_cast<std::size_t>(k)] = std::polar(
                1.0, -2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(L));
        }
    }

    const std::complex<double>& operator[](std::size_t k) const { return (*roots_)[k]; }
    std::size_t size() const { return roots_->size(); }

private:
    std::shared_ptr<std::vector<std::complex<double>>> roots_;
};

/// Evaluates conj(chi_xi(.)) for one fixed character, O(arity) per point.
/// Phases are accumulated as exact integers modulo lcm(m_j) and looked up
/// in the root table, so equal phases give bit-identical complex values.
class ConjCharacter {
public:
    ConjCharacter(const GroupSpec& spec, ConjRootTable roots, std::size_t xi_index)
        : L_(spec.phase_denominator()), roots_(std::move(roots)) {
        GroupElement xi = spec.element_at(xi_index);
        contrib_.resize(spec.arity());
        for (std::size_t j = 0; j < spec.arity(); ++j) {
            int m = spec.factors()[j];
            long w = L_ / m;
            contrib_[j].resize(static_cast<std::size_t>(m));
            for (int c = 0; c < m; ++c)
                contrib_[j][static_cast<std::size_t>(c)] =
                    static_cast<long>(xi.coords[j]) * c % m * w % L_;
        }
    }

    ConjCharacter(const GroupSpec& spec, std::size_t xi_index)
        : ConjCharacter(spec, ConjRootTable(spec), xi_index) {}

    std::complex<double> operator()(std::span<const int> coords) const {
        long dot = 0;
        for (std::size_t j = 0; j < contrib_.size(); ++j)
            dot += contrib_[j][static_cast<std::size_t>(coords[j])];
        return roots_[static_cast<std::size_t>(dot % L_)];
    }

private:
    long L_;
    ConjRootTable roots_;
    std::vector<std::vector<long>> contrib_;
};

/// Coordinates of every element, flattened row-major; amortizes decode
/// cost in sweeps that visit many elements per character.
class CoordsTable {
public:
    explicit CoordsTable(const GroupSpec& spec) : arity_(spec.arity()) {
        flat_.resize(spec.order() * arity_);
        std::vector<int> odo(arity_, 0);
        const auto& m = spec.factors();
        for (std::size_t i = 0; i < spec.order(); ++i) {
            std::copy(odo.begin(), odo.end(), flat_.begin() + static_cast<std::ptrdiff_t>(i * arity_));
            for (std::size_t j = arity_; j-- > 0;) {
                if (++odo[j] < m[j]) break;
                odo[j] = 0;
            }
        }
    }

    std::span<const int> operator[](std::size_t i) const {
        return {flat_.data() + i * arity_, arity_};
    }

private:
    std::size_t arity_;
    std::vector<int> flat_;
};

}  // namespace chang
