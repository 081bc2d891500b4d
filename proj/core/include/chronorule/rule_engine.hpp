#pragma once

// Temporal rules lifted from walks, confidence estimation by sampled body
// grounding, the learning driver, and the rule file format.

#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "chronorule/random.hpp"
#include "chronorule/tkg_store.hpp"
#include "chronorule/walk_sampler.hpp"

namespace chronorule {

// Head atom (E_1, head, E_{l+1}, T_{l+1}); body atoms (E_i, r_i, E_{i+1}, T_i)
// for i in [1, l] under T_1 <= ... <= T_l < T_{l+1}. var_pattern assigns one
// variable id per chain position, numbered by first occurrence, so recurring
// entities of the generating walk share an id.
struct TemporalRule {
    RelationId head_relation = 0;
    std::vector<RelationId> body_relations;
    std::vector<std::uint8_t> var_pattern;  // length() + 1 entries
    double confidence = 0.0;
    std::uint64_t rule_support = 0;
    std::uint64_t body_support = 0;

    std::size_t length() const { return body_relations.size(); }

    friend bool operator==(const TemporalRule&, const TemporalRule&) = default;
};

// Identity of a rule is its (head, body relations, variable pattern).
bool same_pattern(const TemporalRule& a, const TemporalRule& b);
std::uint64_t rule_pattern_hash(const TemporalRule& rule);

// Total order within one head group: confidence desc, body support desc,
// length asc, body relations lex, variable pattern lex.
bool rule_order_less(const TemporalRule& a, const TemporalRule& b);

// True iff the entities at positions sharing a variable id are all equal.
bool satisfies_var_pattern(std::span<const EntityId> chain,
                           std::span<const std::uint8_t> pattern);

class RuleSet {
public:
    void add(TemporalRule rule);
    void sort_groups();

    std::span<const TemporalRule> rules_for(RelationId head) const;
    std::vector<RelationId> head_relations() const;  // ascending
    std::size_t size() const;
    bool empty() const { return size() == 0; }

    friend bool operator==(const RuleSet&, const RuleSet&) = default;

private:
    std::map<RelationId, std::vector<TemporalRule>> groups_;
};

// Walk -> rule: the walk's body edges are reversed in orientation and order,
// each relation replaced by its inverse; supports stay unset.
TemporalRule lift_walk_to_rule(const TemporalWalk& walk, const Vocabulary& vocab);

enum class ConfidenceMode { kSampled, kExhaustive };

struct SupportCounts {
    std::uint64_t rule_support = 0;
    std::uint64_t body_support = 0;
    double confidence = 0.0;
};

// Body support = number of unique body groundings found (sampled: within
// body_samples forward-sampling attempts; exhaustive: full enumeration).
// Rule support = number of those whose endpoints are connected by a head
// edge strictly later than the last body timestamp.
SupportCounts estimate_confidence(const TkgStore& store, const TemporalRule& rule,
                                  std::uint32_t body_samples, ConfidenceMode mode, Rng& rng);

struct LearnConfig {
    std::vector<std::size_t> lengths = {1, 2, 3};
    std::uint32_t walks_per_relation = 200;  // attempt budget per (relation, length)
    TransitionDistribution transition = TransitionDistribution::kExponential;
    std::uint32_t body_samples = 500;
    ConfidenceMode confidence_mode = ConfidenceMode::kSampled;
    std::uint64_t seed = 12;
    unsigned workers = 1;
};

struct RelationLearnStats {
    RelationId relation = 0;
    std::uint64_t attempts = 0;
    std::uint64_t successful_walks = 0;
    std::uint64_t rules = 0;
};

struct LearnStats {
    std::vector<RelationLearnStats> per_relation;
    std::map<std::size_t, std::size_t> rules_per_length;
    std::uint64_t total_attempts = 0;
    std::uint64_t total_successes = 0;
    double wall_seconds = 0.0;
};

// Algorithm: for every (head relation, length), run n independent walk
// attempts, lift successes, merge duplicate patterns, then estimate each
// unique rule's confidence. Deterministic for a fixed seed regardless of the
// worker count.
RuleSet learn_rules(const TkgStore& store, std::span<const RelationId> head_relations,
                    const LearnConfig& config, LearnStats* stats = nullptr);

// Keeps rules with confidence >= min_confidence and body support >=
// min_body_support; group order is preserved.
RuleSet filter_rules(const RuleSet& rules, double min_confidence,
                     std::uint64_t min_body_support);

// Line format (tab-separated): head name, length, body names..., variable
// pattern (comma-separated), confidence, rule support, body support.
// Relations are referenced by name so rule files transfer across datasets
// that share relation vocabulary; inverse names carry the reserved suffix.
void serialize_rules(const RuleSet& rules, const Vocabulary& vocab, std::ostream& out);

struct DeserializeReport {
    std::size_t loaded = 0;
    std::size_t skipped = 0;
    std::vector<std::string> warnings;
};

// Confidence is recomputed from the integer supports, making the round trip
// lossless. Rules naming relations absent from the target vocabulary are
// skipped with a warning.
RuleSet deserialize_rules(std::istream& in, const Vocabulary& target,
                          DeserializeReport* report = nullptr);

// "0.818: (E1, head, E2, T2) <- (E1, body^-1, E2, T1) & ..."
std::string format_rule_human(const TemporalRule& rule, const Vocabulary& vocab);

}  // namespace chronorule
