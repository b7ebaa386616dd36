#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "chang/group.hpp"

namespace chang {

/// Subspace of F_p^n held as a reduced row-echelon basis with the
/// pivot-leftmost convention, so equal subspaces have equal bases.
class SubspaceFp {
public:
    SubspaceFp(int p, int n) : p_(p), n_(n) {
        if (p < 2 || !is_prime(p)) throw std::invalid_argument("SubspaceFp: p must be prime");
        if (n < 1) throw std::invalid_argument("SubspaceFp: n must be >= 1");
    }

    static SubspaceFp zero(int p, int n) { return SubspaceFp(p, n); }

    static SubspaceFp span(int p, int n, const std::vector<std::vector<int>>& vectors) {
        SubspaceFp v(p, n);
        for (const auto& row : vectors) v.adjoin_in_place(row);
        return v;
    }

    int p() const { return p_; }
    int n() const { return n_; }
    int dim() const { return static_cast<int>(rows_.size()); }
    std::size_t size() const {
        std::size_t s = 1;
        for (int i = 0; i < dim(); ++i) s *= static_cast<std::size_t>(p_);
        return s;
    }
    const std::vector<std::vector<int>>& basis() const { return rows_; }
    const std::vector<int>& pivots() const { return pivots_; }

    /// Canonical echelon basis of span(V, xi). Adjoining xi in V is a no-op.
    SubspaceFp adjoin(const std::vector<int>& xi) const {
        SubspaceFp out = *this;
        out.adjoin_in_place(xi);
        return out;
    }

    bool contains(const std::vector<int>& x) const {
        std::vector<int> r = reduce(x);
        for (int c : r)
            if (c != 0) return false;
        return true;
    }

    /// Residual after eliminating all pivot coordinates; zero iff x is in
    /// the subspace. Coordinates at pivot positions are always zero.
    std::vector<int> reduce(const std::vector<int>& x) const {
        if (x.size() != static_cast<std::size_t>(n_))
            throw std::invalid_argument("SubspaceFp: coordinate count mismatch");
        std::vector<int> r(x);
        for (int& c : r) c = mod(c);
        for (std::size_t i = 0; i < rows_.size(); ++i) {
            int c = r[static_cast<std::size_t>(pivots_[i])];
            if (c != 0) submul(r, rows_[i], c);
        }
        return r;
    }

    /// V^perp under the dot-product pairing: {x : <x, v> = 0 for v in V}.
    SubspaceFp annihilator() const {
        // Kernel basis of the row space: one vector per non-pivot column.
        SubspaceFp out(p_, n_);
        std::vector<bool> is_pivot(static_cast<std::size_t>(n_), false);
        for (int c : pivots_) is_pivot[static_cast<std::size_t>(c)] = true;
        for (int free = 0; free < n_; ++free) {
            if (is_pivot[static_cast<std::size_t>(free)]) continue;
            std::vector<int> v(static_cast<std::size_t>(n_), 0);
            v[static_cast<std::size_t>(free)] = 1;
            // Solve <row_i, v> = 0 by setting the pivot coordinates.
            for (std::size_t i = 0; i < rows_.size(); ++i) {
                int dot = rows_[i][static_cast<std::size_t>(free)];
                v[static_cast<std::size_t>(pivots_[i])] = mod(-dot);
            }
            out.adjoin_in_place(v);
        }
        return out;
    }

    std::vector<std::vector<int>> elements() const {
        std::vector<std::vector<int>> out;
        out.reserve(size());
        std::vector<int> coeff(rows_.size(), 0);
        std::vector<int> v(static_cast<std::size_t>(n_), 0);
        for (std::size_t t = 0; t < size(); ++t) {
            std::fill(v.begin(), v.end(), 0);
            for (std::size_t i = 0; i < rows_.size(); ++i)
                if (coeff[i] != 0) submul(v, rows_[i], mod(-coeff[i]));
            out.push_back(v);
            for (std::size_t i = rows_.size(); i-- > 0;) {
                if (++coeff[i] < p_) break;
                coeff[i] = 0;
            }
        }
        return out;
    }

    friend bool operator==(const SubspaceFp& a, const SubspaceFp& b) {
        return a.p_ == b.p_ && a.n_ == b.n_ && a.rows_ == b.rows_;
    }

private:
    void adjoin_in_place(const std::vector<int>& xi) {
        std::vector<int> r = reduce(xi);
        int pivot = -1;
        for (int j = 0; j < n_; ++j)
            if (r[static_cast<std::size_t>(j)] != 0) {
                pivot = j;
                break;
            }
        if (pivot < 0) return;
        scale(r, inv(r[static_cast<std::size_t>(pivot)]));
        // Clear the new pivot column in existing rows, then insert keeping
        // pivots strictly increasing.
        for (std::size_t i = 0; i < rows_.size(); ++i) {
            int c = rows_[i][static_cast<std::size_t>(pivot)];
            if (c != 0) submul(rows_[i], r, c);
        }
        std::size_t at = 0;
        while (at < rows_.size() && pivots_[at] < pivot) ++at;
        rows_.insert(rows_.begin() + static_cast<std::ptrdiff_t>(at), std::move(r));
        pivots_.insert(pivots_.begin() + static_cast<std::ptrdiff_t>(at), pivot);
    }

    int mod(int a) const { return ((a % p_) + p_) % p_; }

    int inv(int a) const {
        a = mod(a);
        for (int b = 1; b < p_; ++b)
            if (a * b % p_ == 1) return b;
        throw std::logic_error("SubspaceFp: no inverse of 0");
    }

    // r -= c * row (mod p), coordinatewise.
    void submul(std::vector<int>& r, const std::vector<int>& row, int c) const {
        for (std::size_t j = 0; j < r.size(); ++j) r[j] = mod(r[j] - c * row[j]);
    }

    void scale(std::vector<int>& r, int c) const {
        for (int& x : r) x = mod(x * c);
    }

    static bool is_prime(int p) {
        for (int d = 2; static_cast<long>(d) * d <= p; ++d)
            if (p % d == 0) return false;
        return p >= 2;
    }

    int p_, n_;
    std::vector<std::vector<int>> rows_;  // RREF, pivots strictly increasing
    std::vector<int> pivots_;
};

/// Partition of F_p^n into cosets of W. Labels follow first occurrence in
/// the canonical element scan, so the map is a pure function of W.
struct CosetMap {
    SubspaceFp subspace;
    std::vector<std::size_t> label;          // element index -> coset index
    std::vector<std::size_t> reps;           // coset index -> representative element index
    std::size_t coset_size = 0;              // |W|
    std::size_t coset_count() const { return reps.size(); }
};

inline CosetMap coset_map(const GroupSpec& spec, const SubspaceFp& w) {
    auto pv = spec.prime_vector();
    if (!pv || pv->p != w.p() || pv->n != w.n())
        throw std::invalid_argument("coset_map: spec is not F_p^n matching the subspace");
    CosetMap out{w, {}, {}, w.size()};
    out.label.resize(spec.order());
    // The reduced representative of x is the unique member of x+W that
    // vanishes on all pivot coordinates.
    std::vector<std::size_t> rep_order;
    rep_order.reserve(spec.order() / w.size());
    std::vector<std::size_t> rep_label(spec.order(), SIZE_MAX);
    for (std::size_t i = 0; i < spec.order(); ++i) {
        GroupElement x = spec.element_at(i);
        std::vector<int> r = w.reduce(x.coords);
        std::size_t rep = spec.index_of(GroupElement{std::move(r)});
        if (rep_label[rep] == SIZE_MAX) {
            rep_label[rep] = rep_order.size();
            rep_order.push_back(rep);
        }
        out.label[i] = rep_label[rep];
    }
    out.reps = std::move(rep_order);
    return out;
}

}  // namespace chang
