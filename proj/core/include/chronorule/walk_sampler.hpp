#pragma once

// Non-increasing temporal random walks. A walk of length l+1 starts with a
// uniformly drawn head edge (e1, r_h, e_{l+1}, t_{l+1}) and then traverses l
// edges backward in time: strictly earlier at the first transition,
// non-strictly afterwards, closing the cycle back at e1 in the final step.

#include <optional>
#include <span>
#include <vector>

#include "chronorule/random.hpp"
#include "chronorule/tkg_store.hpp"

namespace chronorule {

enum class TransitionDistribution { kUniform, kExponential };

struct TemporalWalk {
    Edge head;               // (e1, r_h, e_{l+1}, t_{l+1})
    std::vector<Edge> body;  // traversal order, timestamps non-increasing

    std::size_t length() const { return body.size(); }

    friend bool operator==(const TemporalWalk&, const TemporalWalk&) = default;
};

// Feasible next edges at sampling step m in [2, l+1], given the edge picked
// at step m-1. Strict time bound at m=2, non-strict afterwards; from m>=3 the
// inverse of the previous edge is excluded; at m=l+1 only edges ending at the
// head subject remain. An empty result is a dead end.
std::vector<Edge> feasible_transitions(const TkgStore& store, std::size_t step,
                                       const Edge& current, EntityId head_subject,
                                       std::size_t length);

// Probability of picking each candidate: uniform, or proportional to
// exp(t_candidate - current_t). Exponential weights are shifted by the
// largest exponent before exponentiating so distant history cannot underflow
// the whole vector to zero. Throws EmptyCandidateSetError.
std::vector<double> transition_probabilities(std::span<const Edge> candidates,
                                             Timestamp current_t, TransitionDistribution dist);

// One walk attempt. The head edge is always drawn uniformly; body steps follow
// the transition distribution. Returns nullopt on a dead end (the attempt is
// consumed, not retried). Throws NoHeadEdgesError if the relation has no edges.
std::optional<TemporalWalk> sample_temporal_walk(const TkgStore& store, RelationId head_relation,
                                                 std::size_t length, TransitionDistribution dist,
                                                 Rng& rng);

}  // namespace chronorule
