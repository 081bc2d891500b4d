#pragma once

// Rule application: staged joins of rule bodies inside a time-windowed view,
// candidate scoring, and the early-stopping loop over a sorted rule group.
// Everything here is deterministic.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "chronorule/rule_engine.hpp"
#include "chronorule/tkg_store.hpp"

namespace chronorule {

struct Query {
    EntityId subject = 0;
    RelationId relation = 0;  // subject prediction uses the inverse relation
    Timestamp query_time = 0;
};

struct BodyGrounding {
    std::vector<EntityId> entities;     // e_1 .. e_{l+1}
    std::vector<Timestamp> timestamps;  // t_1 .. t_l, non-decreasing

    friend bool operator==(const BodyGrounding&, const BodyGrounding&) = default;
};

using GroundingsByTarget = std::unordered_map<EntityId, std::vector<BodyGrounding>>;

// Staged join: stage 1 takes view edges leaving the subject with the first
// body relation; stage i extends partial walks with edges of body relation i
// whose timestamp is >= the walk's last timestamp. Walks violating the
// variable pattern are dropped after the join. If max_partial_walks is set,
// each stage keeps at most that many walks, preferring later timestamps
// (ties broken by entity id).
GroundingsByTarget find_body_groundings(const SubgraphView& view, const TemporalRule& rule,
                                        EntityId subject,
                                        std::optional<std::uint32_t> max_partial_walks = {});

// Convex combination of the rule's confidence and an exponential decay of the
// query-time gap to the grounding start: a * conf + (1-a) * exp(-lambda *
// (t_q - t1*)), where t1* is the latest first-body timestamp among the
// candidate's groundings. Throws NoGroundingsError on an empty set.
double score_candidate(const TemporalRule& rule, std::span<const BodyGrounding> groundings,
                       Timestamp query_time, double weight_a, double decay_lambda);

struct RuleMatch {
    std::uint32_t rule_index = 0;  // position in the applied rule span
    double score = 0.0;
    std::optional<BodyGrounding> explanation;  // best grounding, when collected
};

struct ScoredCandidates {
    std::unordered_map<EntityId, std::vector<RuleMatch>> per_candidate;

    bool empty() const { return per_candidate.empty(); }
    std::size_t distinct_candidates() const { return per_candidate.size(); }
};

struct ApplyConfig {
    std::uint32_t min_candidates = 20;  // k: stop once this many distinct candidates exist
    double score_weight = 0.5;          // a
    double decay = 0.1;                 // lambda
    std::optional<std::uint32_t> max_partial_walks;  // K
    bool collect_explanations = false;
};

// Applies rules in the given (sorted) order; each rule contributes at most
// one score per candidate. The early-stop check runs after each full rule.
ScoredCandidates apply_rules(const SubgraphView& view, std::span<const TemporalRule> rules,
                             const Query& query, const ApplyConfig& config);

// Renders a grounding as a dated edge sequence:
// "(Anna, consult, Ben, 2014-07-22) & (...)".
std::string format_grounding(const BodyGrounding& grounding, const TemporalRule& rule,
                             const Vocabulary& vocab);

}  // namespace chronorule
