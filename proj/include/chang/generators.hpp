#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <stdexcept>
#include <string>
#include <vector>

#include "chang/dense_map.hpp"
#include "chang/group.hpp"
#include "chang/rng.hpp"
#include "chang/subspace.hpp"

namespace chang {

enum class GeneratorKind { explicit_list, random_density, subspace, coset, hamming_ball };

inline std::string to_string(GeneratorKind k) {
    switch (k) {
        case GeneratorKind::explicit_list: return "explicit";
        case GeneratorKind::random_density: return "random_density";
        case GeneratorKind::subspace: return "subspace";
        case GeneratorKind::coset: return "coset";
        case GeneratorKind::hamming_ball: return "hamming_ball";
    }
    throw std::logic_error("GeneratorKind: bad tag");
}

inline GeneratorKind generator_kind_from_string(const std::string& s) {
    for (GeneratorKind k :
         {GeneratorKind::explicit_list, GeneratorKind::random_density, GeneratorKind::subspace,
          GeneratorKind::coset, GeneratorKind::hamming_ball})
        if (to_string(k) == s) return k;
    throw std::invalid_argument("GeneratorKind: unknown kind \"" + s + "\"");
}

/// Recipe for a test set A. Generation is deterministic under the seed and
/// always yields a nonempty set.
struct SetGeneratorSpec {
    GroupSpec group = GroupSpec({2});
    GeneratorKind kind = GeneratorKind::explicit_list;
    std::vector<std::size_t> elements;      // explicit
    double density = 0.0;                   // random_density
    std::uint64_t seed = 0;                 // random_density
    std::vector<std::vector<int>> basis;    // subspace / coset generators
    std::size_t shift = 0;                  // coset
    int radius = 0;                         // hamming_ball
};

namespace detail {

/// Exactly max(1, round(density * |G|)) distinct elements via a partial
/// Fisher-Yates pass, so alpha is pinned and the set cannot be empty.
inline std::vector<std::size_t> sample_exact(const GroupSpec& spec, double density,
                                             std::uint64_t seed) {
    if (!(density >= 0.0 && density <= 1.0))
        throw std::invalid_argument("random_density: density outside [0,1]");
    std::size_t order = spec.order();
    auto count = static_cast<std::size_t>(std::llround(density * static_cast<double>(order)));
    count = std::max<std::size_t>(1, std::min(count, order));
    std::vector<std::size_t> pool(order);
    for (std::size_t i = 0; i < order; ++i) pool[i] = i;
    Rng rng(seed);
    for (std::size_t i = 0; i < count; ++i) {
        std::size_t j = i + static_cast<std::size_t>(rng.next_below(order - i));
        std::swap(pool[i], pool[j]);
    }
    pool.resize(count);
    return pool;
}

/// Closure of the given generators under addition: the subgroup they
/// generate, valid in any finite abelian group.
inline std::vector<std::size_t> generated_subgroup(const GroupSpec& spec,
                                                   const std::vector<std::vector<int>>& basis) {
    std::vector<std::size_t> gens;
    gens.reserve(basis.size());
    for (const auto& coords : basis) gens.push_back(spec.index_of(GroupElement{coords}));
    std::vector<bool> seen(spec.order(), false);
    seen[0] = true;
    std::vector<std::size_t> members{0};
    std::deque<std::size_t> queue{0};
    while (!queue.empty()) {
        std::size_t s = queue.front();
        queue.pop_front();
        for (std::size_t g : gens) {
            std::size_t t = spec.add(s, g);
            if (!seen[t]) {
                seen[t] = true;
                members.push_back(t);
                queue.push_back(t);
            }
        }
    }
    return members;
}

}  // namespace detail

inline SetStats generate_set(const SetGeneratorSpec& gen) {
    const GroupSpec& spec = gen.group;
    switch (gen.kind) {
        case GeneratorKind::explicit_list: {
            for (std::size_t x : gen.elements)
                if (x >= spec.order())
                    throw std::invalid_argument("explicit: element index out of range");
            return SetStats::from_indices(spec, gen.elements);
        }
        case GeneratorKind::random_density:
            return SetStats::from_indices(spec, detail::sample_exact(spec, gen.density, gen.seed));
        case GeneratorKind::subspace:
            return SetStats::from_indices(spec, detail::generated_subgroup(spec, gen.basis));
        case GeneratorKind::coset: {
            std::vector<std::size_t> members = detail::generated_subgroup(spec, gen.basis);
            for (std::size_t& x : members) x = spec.add(x, gen.shift);
            return SetStats::from_indices(spec, members);
        }
        case GeneratorKind::hamming_ball: {
            auto pv = spec.prime_vector();
            if (!pv || pv->p != 2)
                throw std::invalid_argument("hamming_ball: requires a 2^n group");
            if (gen.radius < 0) throw std::invalid_argument("hamming_ball: negative radius");
            std::vector<std::size_t> members;
            CoordsTable coords(spec);
            for (std::size_t x = 0; x < spec.order(); ++x) {
                int weight = 0;
                for (int c : coords[x]) weight += c != 0;
                if (weight <= gen.radius) members.push_back(x);
            }
            return SetStats::from_indices(spec, members);
        }
    }
    throw std::logic_error("generate_set: bad kind");
}

}  // namespace chang
