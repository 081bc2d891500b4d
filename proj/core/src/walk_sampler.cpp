#include "chronorule/walk_sampler.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>

namespace chronorule {

std::vector<Edge> feasible_transitions(const TkgStore& store, std::size_t step,
                                       const Edge& current, EntityId head_subject,
                                       std::size_t length) {
    assert(step >= 2 && step <= length + 1);
    const bool strict = (step == 2);
    const bool exclude_inverse = (step >= 3);
    const bool close_cycle = (step == length + 1);
    const Edge inverse = store.inverse_of(current);

    const auto span = store.out_edges_before(current.object, current.timestamp, strict);
    std::vector<Edge> out;
    out.reserve(span.size());
    for (const Edge& e : span) {
        if (exclude_inverse && e == inverse) continue;
        if (close_cycle && e.object != head_subject) continue;
        out.push_back(e);
    }
    return out;
}

std::vector<double> transition_probabilities(std::span<const Edge> candidates,
                                             Timestamp current_t, TransitionDistribution dist) {
    if (candidates.empty()) {
        throw EmptyCandidateSetError("transition_probabilities: no candidates");
    }
    std::vector<double> probs(candidates.size());
    if (dist == TransitionDistribution::kUniform) {
        std::fill(probs.begin(), probs.end(), 1.0 / static_cast<double>(candidates.size()));
        return probs;
    }
    (void)current_t;  // the shared factor exp(-current_t) cancels in the normalization
    Timestamp t_max = candidates[0].timestamp;
    for (const Edge& e : candidates) t_max = std::max(t_max, e.timestamp);
    double sum = 0.0;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        probs[i] = std::exp(static_cast<double>(candidates[i].timestamp) -
                            static_cast<double>(t_max));
        sum += probs[i];
    }
    for (double& p : probs) p /= sum;
    return probs;
}

std::optional<TemporalWalk> sample_temporal_walk(const TkgStore& store, RelationId head_relation,
                                                 std::size_t length, TransitionDistribution dist,
                                                 Rng& rng) {
    assert(length >= 1);
    const auto heads = store.edges_with_relation(head_relation);
    if (heads.empty()) {
        throw NoHeadEdgesError("no edges with relation id " + std::to_string(head_relation));
    }

    TemporalWalk walk;
    walk.head = heads[uniform_index(rng, heads.size())];
    walk.body.reserve(length);

    Edge current = walk.head;
    for (std::size_t step = 2; step <= length + 1; ++step) {
        const auto candidates =
            feasible_transitions(store, step, current, walk.head.subject, length);
        if (candidates.empty()) return std::nullopt;
        const auto probs = transition_probabilities(candidates, current.timestamp, dist);
        current = candidates[weighted_index(rng, probs)];
        walk.body.push_back(current);
    }
    return walk;
}

}  // namespace chronorule
