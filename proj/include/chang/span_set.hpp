#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "chang/group.hpp"

namespace chang {

inline constexpr std::size_t kDissociationCap = 16;

/// The {-1,0,1}-span of a generator list, kept as an explicit member set
/// so span membership is an O(1) bitmap probe. Contains 0 and is closed
/// under negation by construction.
class SpanSet {
public:
    explicit SpanSet(const GroupSpec& spec)
        : spec_(&spec), in_span_(spec.order(), false) {
        in_span_[0] = true;
        members_.push_back(0);
    }

    const std::vector<std::size_t>& generators() const { return generators_; }
    const std::vector<std::size_t>& members() const { return members_; }
    bool contains(std::size_t index) const { return in_span_[index]; }

    /// Grows the span to <Delta + {xi}> = members + {0, xi, -xi}. Extending
    /// by a current member would break dissociatedness, so it is an error.
    void extend(std::size_t xi) {
        if (in_span_[xi])
            throw std::invalid_argument("SpanSet: generator already lies in the span");
        std::size_t neg = spec_->negate(xi);
        std::vector<std::size_t> grown;
        grown.reserve(members_.size() * 2);
        for (std::size_t s : members_) {
            for (std::size_t t : {spec_->add(s, xi), spec_->add(s, neg)}) {
                if (!in_span_[t]) {
                    in_span_[t] = true;
                    grown.push_back(t);
                }
            }
        }
        members_.insert(members_.end(), grown.begin(), grown.end());
        generators_.push_back(xi);
    }

private:
    const GroupSpec* spec_;
    std::vector<std::size_t> generators_;
    std::vector<std::size_t> members_;  // insertion order; members_[0] == 0
    std::vector<bool> in_span_;
};

/// True iff the only vanishing {-1,0,1}-combination of the generators is
/// the all-zero one. DFS over sign patterns, worst case 3^|delta| sums.
inline bool is_dissociated(const GroupSpec& spec, const std::vector<std::size_t>& delta,
                           std::size_t cap = kDissociationCap) {
    if (delta.size() > cap)
        throw std::invalid_argument("is_dissociated: generator count exceeds cap");
    bool ok = true;
    auto walk = [&](auto&& self, std::size_t j, std::size_t sum, bool trivial) -> void {
        if (!ok) return;
        if (j == delta.size()) {
            if (!trivial && sum == 0) ok = false;
            return;
        }
        self(self, j + 1, sum, trivial);
        self(self, j + 1, spec.add(sum, delta[j]), false);
        self(self, j + 1, spec.add(sum, spec.negate(delta[j])), false);
    };
    walk(walk, 0, 0, true);
    return ok;
}

}  // namespace chang
