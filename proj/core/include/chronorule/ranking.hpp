#pragma once

// Candidate ranking and evaluation: noisy-OR aggregation, the object
// distribution fallback, time-aware filtering, and MRR / hits@k reporting.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "chronorule/dataset.hpp"
#include "chronorule/rule_applier.hpp"

namespace chronorule {

// 1 - prod(1 - s); empty input scores 0.
double noisy_or(std::span<const double> scores);

enum class Provenance { kRules, kBaseline };

struct RankedCandidate {
    EntityId entity = 0;
    double score = 0.0;

    friend bool operator==(const RankedCandidate&, const RankedCandidate&) = default;
};

struct RankedAnswer {
    std::vector<RankedCandidate> candidates;  // score desc, entity id asc
    Provenance provenance = Provenance::kRules;
};

RankedAnswer aggregate_candidates(const ScoredCandidates& scored);

// Entities ranked by how often they appear as objects in the training store:
// restricted to the relation's edges when the relation is known there,
// otherwise over all edges. Scores are normalized frequencies.
RankedAnswer baseline_distribution(const TkgStore& train, std::optional<RelationId> relation);

enum class TiePolicy { kBest, kAverage, kWorst };

// Rank of the truth inside an implicit universe where unranked entities
// score 0. AVERAGE counts the truth among its ties: rank = #greater +
// (ties + 1) / 2. Throws TruthOutOfUniverseError.
double rank_of_answer(const RankedAnswer& ranked, EntityId truth, std::size_t universe,
                      TiePolicy policy);

// (subject, relation, timestamp) -> objects, over base facts and their
// inverses; used for time-aware filtering.
class KnownFacts {
public:
    void add_base_fact(const Edge& fact, const Vocabulary& vocab);
    void finalize();  // sort + dedup object lists

    std::span<const EntityId> objects(EntityId subject, RelationId relation,
                                      Timestamp t) const;

private:
    struct Key {
        EntityId subject;
        RelationId relation;
        Timestamp t;
        friend bool operator==(const Key&, const Key&) = default;
    };
    struct KeyHash {
        std::size_t operator()(const Key& k) const noexcept;
    };
    std::unordered_map<Key, std::vector<EntityId>, KeyHash> map_;
};

KnownFacts build_known_facts(const Dataset& dataset);

// Removes every candidate that answers the same (subject, relation) at
// exactly the query timestamp, except the truth itself.
RankedAnswer time_aware_filter(const RankedAnswer& ranked, const Query& query, EntityId truth,
                               const KnownFacts& known);

// Human-readable report for one query: the top-ranked candidate with its
// supporting rules and dated grounding walks (when collected).
std::string render_explanation(const Query& query, const RankedAnswer& ranked,
                               const ScoredCandidates& scored,
                               std::span<const TemporalRule> rules, const Vocabulary& vocab);

struct Metrics {
    double mrr = 0.0;
    double hits1 = 0.0;
    double hits3 = 0.0;
    double hits10 = 0.0;
};

struct QueryRecord {
    Query query;
    EntityId truth = 0;
    bool subject_prediction = false;
    Provenance provenance = Provenance::kRules;
    double rank_raw = 0.0;
    double rank_filtered = 0.0;
    std::string explanation;  // filled only when explanations are collected
};

struct EvalReport {
    std::vector<QueryRecord> records;
    Metrics raw;
    Metrics filtered;
    std::size_t queries_without_rules = 0;
    std::size_t queries_without_groundings = 0;
    double wall_seconds = 0.0;

    void write_table(std::ostream& out) const;
    void write_csv(std::ostream& out) const;
};

struct EvalConfig {
    Timestamp window = kInfiniteWindow;
    ApplyConfig apply;
    TiePolicy tie_policy = TiePolicy::kAverage;
    unsigned workers = 1;
};

// Evaluates object and subject prediction for every fact of the split.
// application_store provides the windowed views (all facts before the query
// time are eligible); train_store feeds the fallback baseline; known carries
// the union of all splits for time-aware filtering.
EvalReport evaluate(const TkgStore& application_store, const TkgStore& train_store,
                    const RuleSet& rules, std::span<const Edge> eval_facts,
                    const KnownFacts& known, const EvalConfig& config);

}  // namespace chronorule
