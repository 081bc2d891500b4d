#include "support/oracles.hpp"

#include <algorithm>
#include <tuple>

namespace chronorule::testing {

namespace {

bool chain_var_ok(std::span<const EntityId> entities, std::span<const std::uint8_t> pattern) {
    for (std::size_t i = 0; i < entities.size(); ++i) {
        for (std::size_t j = i + 1; j < entities.size(); ++j) {
            if (pattern[i] == pattern[j] && entities[i] != entities[j]) return false;
        }
    }
    return true;
}

bool dfs_groundings(const SubgraphView& view, const TemporalRule& rule,
                    std::vector<EntityId>& entities, std::vector<Timestamp>& times,
                    std::size_t& budget, std::vector<BodyGrounding>& out) {
    const std::size_t depth = times.size();
    if (depth == rule.length()) {
        for (std::size_t i = 1; i < times.size(); ++i) {
            if (times[i - 1] > times[i]) return true;  // time order checked post-hoc
        }
        if (!chain_var_ok(entities, rule.var_pattern)) return true;
        out.push_back({entities, times});
        return true;
    }
    for (const Edge& e : view.out_edges(entities.back())) {
        if (e.relation != rule.body_relations[depth]) continue;
        if (budget == 0) return false;
        --budget;
        entities.push_back(e.object);
        times.push_back(e.timestamp);
        const bool ok = dfs_groundings(view, rule, entities, times, budget, out);
        entities.pop_back();
        times.pop_back();
        if (!ok) return false;
    }
    return true;
}

bool grounding_less(const BodyGrounding& a, const BodyGrounding& b) {
    return std::tie(a.entities, a.timestamps) < std::tie(b.entities, b.timestamps);
}

}  // namespace

std::optional<std::vector<BodyGrounding>> oracle_groundings(const SubgraphView& view,
                                                            const TemporalRule& rule,
                                                            EntityId subject,
                                                            std::size_t budget) {
    std::vector<BodyGrounding> out;
    std::vector<EntityId> entities{subject};
    std::vector<Timestamp> times;
    if (!dfs_groundings(view, rule, entities, times, budget, out)) return std::nullopt;
    std::sort(out.begin(), out.end(), grounding_less);
    return out;
}

std::vector<BodyGrounding> sorted_groundings(const GroundingsByTarget& grouped) {
    std::vector<BodyGrounding> flat;
    for (const auto& [target, list] : grouped) {
        flat.insert(flat.end(), list.begin(), list.end());
    }
    std::sort(flat.begin(), flat.end(), grounding_less);
    return flat;
}

std::vector<BodyGrounding> sorted_groundings(std::vector<BodyGrounding> flat) {
    std::sort(flat.begin(), flat.end(), grounding_less);
    return flat;
}

SupportCounts oracle_confidence(const TkgStore& store, const TemporalRule& rule) {
    const std::size_t l = rule.length();
    std::vector<std::span<const Edge>> lists(l);
    for (std::size_t i = 0; i < l; ++i) {
        lists[i] = store.edges_with_relation(rule.body_relations[i]);
        if (lists[i].empty()) return {};
    }

    SupportCounts counts;
    const auto heads = store.edges_with_relation(rule.head_relation);
    std::vector<std::size_t> idx(l, 0);
    std::vector<EntityId> entities(l + 1);
    std::vector<Timestamp> times(l);
    for (;;) {
        bool ok = true;
        entities[0] = lists[0][idx[0]].subject;
        for (std::size_t i = 0; i < l && ok; ++i) {
            const Edge& e = lists[i][idx[i]];
            if (e.subject != entities[i]) ok = false;
            if (ok && i > 0 && e.timestamp < times[i - 1]) ok = false;
            if (ok) {
                entities[i + 1] = e.object;
                times[i] = e.timestamp;
            }
        }
        if (ok && chain_var_ok(entities, rule.var_pattern)) {
            ++counts.body_support;
            for (const Edge& h : heads) {
                if (h.subject == entities.front() && h.object == entities.back() &&
                    h.timestamp > times.back()) {
                    ++counts.rule_support;
                    break;
                }
            }
        }
        // odometer increment
        std::size_t i = 0;
        for (; i < l; ++i) {
            if (++idx[i] < lists[i].size()) break;
            idx[i] = 0;
        }
        if (i == l) break;
    }
    if (counts.body_support > 0) {
        counts.confidence =
            static_cast<double>(counts.rule_support) / static_cast<double>(counts.body_support);
    }
    return counts;
}

double oracle_rank(const std::vector<double>& scores, EntityId truth, TiePolicy policy) {
    const double truth_score = scores[truth];
    std::size_t greater = 0;
    std::size_t ties = 0;
    for (const double s : scores) {
        if (s > truth_score) ++greater;
        if (s == truth_score) ++ties;
    }
    switch (policy) {
        case TiePolicy::kBest:
            return static_cast<double>(greater) + 1.0;
        case TiePolicy::kAverage:
            return static_cast<double>(greater) + (static_cast<double>(ties) + 1.0) / 2.0;
        case TiePolicy::kWorst:
            return static_cast<double>(greater + ties);
    }
    return 0.0;
}

bool walk_is_valid(const TkgStore& store, const TemporalWalk& walk, std::size_t length) {
    if (walk.body.size() != length) return false;
    if (!store.contains(walk.head)) return false;
    for (const Edge& e : walk.body) {
        if (!store.contains(e)) return false;
    }
    // strict head bound, then non-increasing body timestamps
    if (!(walk.head.timestamp > walk.body.front().timestamp)) return false;
    for (std::size_t j = 1; j < walk.body.size(); ++j) {
        if (walk.body[j].timestamp > walk.body[j - 1].timestamp) return false;
    }
    // chaining and cyclicity
    if (walk.body.front().subject != walk.head.object) return false;
    for (std::size_t j = 1; j < walk.body.size(); ++j) {
        if (walk.body[j].subject != walk.body[j - 1].object) return false;
    }
    if (walk.body.back().object != walk.head.subject) return false;
    // the inverse of the preceding edge is barred from step 3 onward
    for (std::size_t j = 1; j < walk.body.size(); ++j) {
        if (walk.body[j] == store.inverse_of(walk.body[j - 1])) return false;
    }
    return true;
}

bool rule_matches_walk(const TemporalRule& rule, const TemporalWalk& walk,
                       const TkgStore& store) {
    const std::size_t l = walk.length();
    if (rule.length() != l || rule.var_pattern.size() != l + 1) return false;
    if (rule.head_relation != walk.head.relation) return false;

    std::vector<EntityId> entities(l + 1);
    std::vector<Timestamp> times(l);
    entities[0] = walk.head.subject;
    for (std::size_t i = 1; i <= l; ++i) {
        entities[i] = walk.body[l - i].subject;
        times[i - 1] = walk.body[l - i].timestamp;
    }

    // every body atom instantiates to a stored edge
    for (std::size_t i = 0; i < l; ++i) {
        if (!store.contains({entities[i], rule.body_relations[i], entities[i + 1], times[i]})) {
            return false;
        }
    }
    // time constraints
    for (std::size_t i = 1; i < l; ++i) {
        if (times[i - 1] > times[i]) return false;
    }
    if (!(times[l - 1] < walk.head.timestamp)) return false;
    // the pattern mirrors entity recurrence exactly, first-occurrence numbered
    std::uint8_t max_id = 0;
    for (std::size_t i = 0; i <= l; ++i) {
        if (rule.var_pattern[i] > max_id + (i == 0 ? 0 : 1)) return false;
        max_id = std::max(max_id, rule.var_pattern[i]);
        for (std::size_t j = i + 1; j <= l; ++j) {
            const bool same_var = rule.var_pattern[i] == rule.var_pattern[j];
            const bool same_ent = entities[i] == entities[j];
            if (same_var != same_ent) return false;
        }
    }
    return rule.var_pattern[0] == 0;
}

TemporalRule random_rule_shape(const TkgStore& store, std::size_t max_length, Rng& rng) {
    TemporalRule rule;
    const std::size_t length = 1 + uniform_index(rng, max_length);
    rule.head_relation = static_cast<RelationId>(uniform_index(rng, store.num_relations()));
    for (std::size_t i = 0; i < length; ++i) {
        rule.body_relations.push_back(
            static_cast<RelationId>(uniform_index(rng, store.num_relations())));
    }
    rule.var_pattern.resize(length + 1);
    std::uint8_t next_id = 0;
    for (std::size_t i = 0; i <= length; ++i) {
        // either reuse an existing variable or introduce the next one
        const std::size_t pick = uniform_index(rng, next_id + 1);
        if (pick == next_id) {
            rule.var_pattern[i] = next_id++;
        } else {
            rule.var_pattern[i] = static_cast<std::uint8_t>(pick);
        }
    }
    return rule;
}

}  // namespace chronorule::testing
