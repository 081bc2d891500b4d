#include "chronorule/rule_applier.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>

namespace chronorule {

namespace {

struct StageNode {
    EntityId entity;
    Timestamp t;
    std::uint32_t parent;  // index into the previous stage
};

void cap_stage(std::vector<StageNode>& stage, std::optional<std::uint32_t> cap) {
    if (!cap || stage.size() <= *cap) return;
    // Latest-timestamp preference; stable keeps insertion order beyond the
    // declared (t, entity) key, so retention is deterministic.
    std::stable_sort(stage.begin(), stage.end(), [](const StageNode& a, const StageNode& b) {
        if (a.t != b.t) return a.t > b.t;
        return a.entity < b.entity;
    });
    stage.resize(*cap);
}

}  // namespace

GroundingsByTarget find_body_groundings(const SubgraphView& view, const TemporalRule& rule,
                                        EntityId subject,
                                        std::optional<std::uint32_t> max_partial_walks) {
    assert(rule.length() >= 1);
    const std::size_t l = rule.length();

    std::vector<std::vector<StageNode>> stages(l);
    for (const Edge& e : view.out_edges(subject, rule.body_relations[0])) {
        stages[0].push_back({e.object, e.timestamp, 0});
    }
    cap_stage(stages[0], max_partial_walks);

    for (std::size_t s = 1; s < l && !stages[s - 1].empty(); ++s) {
        const auto& prev = stages[s - 1];
        for (std::uint32_t p = 0; p < prev.size(); ++p) {
            for (const Edge& e : view.out_edges(prev[p].entity, rule.body_relations[s],
                                                prev[p].t)) {
                stages[s].push_back({e.object, e.timestamp, p});
            }
        }
        cap_stage(stages[s], max_partial_walks);
    }

    GroundingsByTarget out;
    std::vector<EntityId> chain(l + 1);
    std::vector<Timestamp> times(l);
    for (const StageNode& leaf : stages[l - 1]) {
        const StageNode* node = &leaf;
        for (std::size_t s = l; s-- > 0;) {
            chain[s + 1] = node->entity;
            times[s] = node->t;
            node = s > 0 ? &stages[s - 1][node->parent] : nullptr;
        }
        chain[0] = subject;
        if (!satisfies_var_pattern(chain, rule.var_pattern)) continue;
        BodyGrounding grounding;
        grounding.entities = chain;
        grounding.timestamps = times;
        out[chain[l]].push_back(std::move(grounding));
    }
    return out;
}

double score_candidate(const TemporalRule& rule, std::span<const BodyGrounding> groundings,
                       Timestamp query_time, double weight_a, double decay_lambda) {
    if (groundings.empty()) throw NoGroundingsError("score_candidate: no groundings");
    Timestamp best_t1 = 0;
    bool first = true;
    for (const BodyGrounding& g : groundings) {
        if (first || g.timestamps.front() > best_t1) best_t1 = g.timestamps.front();
        first = false;
    }
    const double gap = static_cast<double>(query_time) - static_cast<double>(best_t1);
    return weight_a * rule.confidence + (1.0 - weight_a) * std::exp(-decay_lambda * gap);
}

ScoredCandidates apply_rules(const SubgraphView& view, std::span<const TemporalRule> rules,
                             const Query& query, const ApplyConfig& config) {
    ScoredCandidates out;
    for (std::uint32_t index = 0; index < rules.size(); ++index) {
        const TemporalRule& rule = rules[index];
        const auto groundings =
            find_body_groundings(view, rule, query.subject, config.max_partial_walks);
        for (const auto& [candidate, list] : groundings) {
            RuleMatch match;
            match.rule_index = index;
            match.score = score_candidate(rule, list, query.query_time, config.score_weight,
                                          config.decay);
            if (config.collect_explanations) {
                const BodyGrounding* best = &list.front();
                for (const BodyGrounding& g : list) {
                    if (g.timestamps.front() > best->timestamps.front()) best = &g;
                }
                match.explanation = *best;
            }
            out.per_candidate[candidate].push_back(std::move(match));
        }
        if (out.per_candidate.size() >= config.min_candidates) break;
    }
    return out;
}

std::string format_grounding(const BodyGrounding& grounding, const TemporalRule& rule,
                             const Vocabulary& vocab) {
    std::string out;
    for (std::size_t i = 0; i < rule.length(); ++i) {
        if (i > 0) out += " & ";
        out += '(' + vocab.entity_name(grounding.entities[i]) + ", " +
               vocab.relation_name(rule.body_relations[i]) + ", " +
               vocab.entity_name(grounding.entities[i + 1]) + ", " +
               vocab.time.label(grounding.timestamps[i]) + ')';
    }
    return out;
}

}  // namespace chronorule
