#include "chronorule/rule_engine.hpp"

#include <algorithm>
#include <cassert>
#include <chrono>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <tuple>
#include <unordered_set>

#include "chronorule/thread_pool.hpp"

namespace chronorule {

bool same_pattern(const TemporalRule& a, const TemporalRule& b) {
    return a.head_relation == b.head_relation && a.body_relations == b.body_relations &&
           a.var_pattern == b.var_pattern;
}

std::uint64_t rule_pattern_hash(const TemporalRule& rule) {
    std::uint64_t h = mix64(0x7c6f6e69636c65ull ^ rule.head_relation);
    for (RelationId r : rule.body_relations) h = mix64(h ^ (0x100000000ull + r));
    for (std::uint8_t v : rule.var_pattern) h = mix64(h ^ (0x200000000ull + v));
    return h;
}

bool rule_order_less(const TemporalRule& a, const TemporalRule& b) {
    if (a.confidence != b.confidence) return a.confidence > b.confidence;
    if (a.body_support != b.body_support) return a.body_support > b.body_support;
    if (a.length() != b.length()) return a.length() < b.length();
    if (a.body_relations != b.body_relations) return a.body_relations < b.body_relations;
    return a.var_pattern < b.var_pattern;
}

bool satisfies_var_pattern(std::span<const EntityId> chain,
                           std::span<const std::uint8_t> pattern) {
    assert(chain.size() == pattern.size());
    // Variable ids are first-occurrence numbered, so id i first appears no
    // earlier than position i; a bound slot per id suffices.
    EntityId bound[256];
    bool seen[256] = {};
    for (std::size_t i = 0; i < chain.size(); ++i) {
        const std::uint8_t id = pattern[i];
        if (!seen[id]) {
            seen[id] = true;
            bound[id] = chain[i];
        } else if (bound[id] != chain[i]) {
            return false;
        }
    }
    return true;
}

void RuleSet::add(TemporalRule rule) { groups_[rule.head_relation].push_back(std::move(rule)); }

void RuleSet::sort_groups() {
    for (auto& [head, rules] : groups_) {
        std::sort(rules.begin(), rules.end(), rule_order_less);
    }
}

std::span<const TemporalRule> RuleSet::rules_for(RelationId head) const {
    const auto it = groups_.find(head);
    if (it == groups_.end()) return {};
    return it->second;
}

std::vector<RelationId> RuleSet::head_relations() const {
    std::vector<RelationId> heads;
    heads.reserve(groups_.size());
    for (const auto& [head, rules] : groups_) {
        if (!rules.empty()) heads.push_back(head);
    }
    return heads;
}

std::size_t RuleSet::size() const {
    std::size_t n = 0;
    for (const auto& [head, rules] : groups_) n += rules.size();
    return n;
}

TemporalRule lift_walk_to_rule(const TemporalWalk& walk, const Vocabulary& vocab) {
    const std::size_t l = walk.length();
    assert(l >= 1);
    TemporalRule rule;
    rule.head_relation = walk.head.relation;
    rule.body_relations.resize(l);

    // Rule-order entity chain e_1 .. e_{l+1}: the walk traverses it backward,
    // so body edge l-i supplies e_{i+1} and, inverted, body relation r_i.
    std::vector<EntityId> chain(l + 1);
    chain[0] = walk.head.subject;
    for (std::size_t i = 1; i <= l; ++i) {
        const Edge& e = walk.body[l - i];
        chain[i] = e.subject;
        rule.body_relations[i - 1] = vocab.inverse(e.relation);
    }

    rule.var_pattern.resize(l + 1);
    std::vector<EntityId> first_seen;
    for (std::size_t i = 0; i <= l; ++i) {
        const auto it = std::find(first_seen.begin(), first_seen.end(), chain[i]);
        if (it == first_seen.end()) {
            rule.var_pattern[i] = static_cast<std::uint8_t>(first_seen.size());
            first_seen.push_back(chain[i]);
        } else {
            rule.var_pattern[i] =
                static_cast<std::uint8_t>(std::distance(first_seen.begin(), it));
        }
    }
    return rule;
}

namespace {

// Unique-body key: e_1 .. e_{l+1}, t_1 .. t_l packed into one vector.
struct BodyKeyHash {
    std::size_t operator()(const std::vector<std::uint32_t>& key) const noexcept {
        std::uint64_t h = 0x9e3779b97f4a7c15ull;
        for (std::uint32_t v : key) h = mix64(h ^ v);
        return static_cast<std::size_t>(h);
    }
};

using BodySet = std::unordered_set<std::vector<std::uint32_t>, BodyKeyHash>;

void enumerate_bodies(const TkgStore& store, const TemporalRule& rule, std::size_t stage,
                      std::vector<EntityId>& entities, std::vector<Timestamp>& times,
                      std::uint64_t& body_support, std::uint64_t& rule_support) {
    if (stage == rule.length()) {
        if (!satisfies_var_pattern(entities, rule.var_pattern)) return;
        ++body_support;
        if (store.head_exists_after(entities.front(), rule.head_relation, entities.back(),
                                    times.back())) {
            ++rule_support;
        }
        return;
    }
    const auto run = store.out_edges(entities.back(), rule.body_relations[stage]);
    const auto first = std::partition_point(
        run.begin(), run.end(), [&](const Edge& e) { return e.timestamp < times.back(); });
    for (auto it = first; it != run.end(); ++it) {
        entities.push_back(it->object);
        times.push_back(it->timestamp);
        enumerate_bodies(store, rule, stage + 1, entities, times, body_support, rule_support);
        entities.pop_back();
        times.pop_back();
    }
}

SupportCounts exhaustive_confidence(const TkgStore& store, const TemporalRule& rule) {
    SupportCounts counts;
    const auto starts = store.edges_with_relation(rule.body_relations.front());
    std::vector<EntityId> entities;
    std::vector<Timestamp> times;
    for (const Edge& e : starts) {
        entities.assign({e.subject, e.object});
        times.assign({e.timestamp});
        enumerate_bodies(store, rule, 1, entities, times, counts.body_support,
                         counts.rule_support);
    }
    if (counts.body_support > 0) {
        counts.confidence =
            static_cast<double>(counts.rule_support) / static_cast<double>(counts.body_support);
    }
    return counts;
}

SupportCounts sampled_confidence(const TkgStore& store, const TemporalRule& rule,
                                 std::uint32_t body_samples, Rng& rng) {
    SupportCounts counts;
    const auto starts = store.edges_with_relation(rule.body_relations.front());
    if (starts.empty()) return counts;

    const std::size_t l = rule.length();
    BodySet unique_bodies;
    std::vector<std::uint32_t> key;
    for (std::uint32_t attempt = 0; attempt < body_samples; ++attempt) {
        const Edge& first = starts[uniform_index(rng, starts.size())];
        key.assign({first.subject, first.object});
        Timestamp current_t = first.timestamp;
        bool ok = true;
        std::vector<Timestamp> times{first.timestamp};
        for (std::size_t i = 1; i < l; ++i) {
            const auto run = store.out_edges(key.back(), rule.body_relations[i]);
            const auto begin = std::partition_point(
                run.begin(), run.end(),
                [&](const Edge& e) { return e.timestamp < current_t; });
            const std::size_t n = static_cast<std::size_t>(run.end() - begin);
            if (n == 0) {
                ok = false;
                break;
            }
            const Edge& next = begin[uniform_index(rng, n)];
            key.push_back(next.object);
            times.push_back(next.timestamp);
            current_t = next.timestamp;
        }
        if (!ok) continue;
        if (!satisfies_var_pattern(std::span<const EntityId>(key.data(), key.size()),
                                   rule.var_pattern)) {
            continue;
        }
        key.insert(key.end(), times.begin(), times.end());
        unique_bodies.insert(key);
    }

    counts.body_support = unique_bodies.size();
    for (const auto& body : unique_bodies) {
        const EntityId start = body.front();
        const EntityId end = body[l];
        const Timestamp last_t = body.back();
        if (store.head_exists_after(start, rule.head_relation, end, last_t)) {
            ++counts.rule_support;
        }
    }
    if (counts.body_support > 0) {
        counts.confidence =
            static_cast<double>(counts.rule_support) / static_cast<double>(counts.body_support);
    }
    return counts;
}

}  // namespace

SupportCounts estimate_confidence(const TkgStore& store, const TemporalRule& rule,
                                  std::uint32_t body_samples, ConfidenceMode mode, Rng& rng) {
    if (mode == ConfidenceMode::kExhaustive) return exhaustive_confidence(store, rule);
    assert(body_samples >= 1);
    return sampled_confidence(store, rule, body_samples, rng);
}

namespace {

constexpr std::uint64_t kWalkStream = 0x77616c6bull;  // stream tags
constexpr std::uint64_t kConfidenceStream = 0x636f6e66ull;

struct PatternKeyHash {
    std::size_t operator()(const std::vector<std::uint32_t>& key) const noexcept {
        std::uint64_t h = 0xc3a5c85c97cb3127ull;
        for (std::uint32_t v : key) h = mix64(h ^ v);
        return static_cast<std::size_t>(h);
    }
};

std::vector<std::uint32_t> pattern_key(const TemporalRule& rule) {
    std::vector<std::uint32_t> key;
    key.reserve(2 + rule.body_relations.size() + rule.var_pattern.size());
    key.push_back(rule.head_relation);
    key.insert(key.end(), rule.body_relations.begin(), rule.body_relations.end());
    key.push_back(0xffffffffu);
    for (std::uint8_t v : rule.var_pattern) key.push_back(v);
    return key;
}

struct LearnTaskResult {
    std::vector<TemporalRule> rules;  // discovery order, supports filled
    std::uint64_t attempts = 0;
    std::uint64_t successes = 0;
};

LearnTaskResult run_learn_task(const TkgStore& store, RelationId relation, std::size_t length,
                               const LearnConfig& config) {
    LearnTaskResult result;
    if (store.edges_with_relation(relation).empty()) return result;

    result.attempts = config.walks_per_relation;
    std::unordered_set<std::vector<std::uint32_t>, PatternKeyHash> seen;
    for (std::uint32_t i = 0; i < config.walks_per_relation; ++i) {
        Rng rng(derive_seed(config.seed, kWalkStream, relation, length, i));
        const auto walk = sample_temporal_walk(store, relation, length, config.transition, rng);
        if (!walk) continue;
        ++result.successes;
        TemporalRule rule = lift_walk_to_rule(*walk, store.vocab());
        if (seen.insert(pattern_key(rule)).second) {
            result.rules.push_back(std::move(rule));
        }
    }

    // Confidence streams key on the rule pattern so estimates do not depend
    // on which walk found the rule first.
    for (TemporalRule& rule : result.rules) {
        Rng rng(derive_seed(config.seed, kConfidenceStream, rule_pattern_hash(rule)));
        const SupportCounts counts =
            estimate_confidence(store, rule, config.body_samples, config.confidence_mode, rng);
        rule.rule_support = counts.rule_support;
        rule.body_support = counts.body_support;
        rule.confidence = counts.confidence;
    }
    return result;
}

}  // namespace

RuleSet learn_rules(const TkgStore& store, std::span<const RelationId> head_relations,
                    const LearnConfig& config, LearnStats* stats) {
    const auto start_time = std::chrono::steady_clock::now();

    struct Task {
        RelationId relation;
        std::size_t length;
    };
    std::vector<Task> tasks;
    tasks.reserve(head_relations.size() * config.lengths.size());
    for (const RelationId relation : head_relations) {
        for (const std::size_t length : config.lengths) {
            tasks.push_back({relation, length});
        }
    }

    std::vector<LearnTaskResult> results(tasks.size());
    parallel_for(tasks.size(), config.workers, [&](std::size_t i) {
        results[i] = run_learn_task(store, tasks[i].relation, tasks[i].length, config);
    });

    RuleSet rules;
    if (stats) {
        stats->per_relation.clear();
        stats->rules_per_length.clear();
        stats->total_attempts = 0;
        stats->total_successes = 0;
        for (const std::size_t length : config.lengths) stats->rules_per_length[length] = 0;
    }
    for (std::size_t i = 0; i < tasks.size(); ++i) {
        if (stats) {
            if (stats->per_relation.empty() ||
                stats->per_relation.back().relation != tasks[i].relation) {
                stats->per_relation.push_back({tasks[i].relation, 0, 0, 0});
            }
            auto& rel_stats = stats->per_relation.back();
            rel_stats.attempts += results[i].attempts;
            rel_stats.successful_walks += results[i].successes;
            rel_stats.rules += results[i].rules.size();
            stats->rules_per_length[tasks[i].length] += results[i].rules.size();
            stats->total_attempts += results[i].attempts;
            stats->total_successes += results[i].successes;
        }
        for (TemporalRule& rule : results[i].rules) rules.add(std::move(rule));
    }
    rules.sort_groups();

    if (stats) {
        stats->wall_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start_time).count();
    }
    return rules;
}

RuleSet filter_rules(const RuleSet& rules, double min_confidence,
                     std::uint64_t min_body_support) {
    RuleSet kept;
    for (const RelationId head : rules.head_relations()) {
        for (const TemporalRule& rule : rules.rules_for(head)) {
            if (rule.confidence >= min_confidence && rule.body_support >= min_body_support) {
                kept.add(rule);
            }
        }
    }
    return kept;  // group order inherited from the sorted input
}

void serialize_rules(const RuleSet& rules, const Vocabulary& vocab, std::ostream& out) {
    char conf_buf[32];
    for (const RelationId head : rules.head_relations()) {
        for (const TemporalRule& rule : rules.rules_for(head)) {
            out << vocab.relation_name(rule.head_relation) << '\t' << rule.length();
            for (const RelationId r : rule.body_relations) {
                out << '\t' << vocab.relation_name(r);
            }
            out << '\t';
            for (std::size_t i = 0; i < rule.var_pattern.size(); ++i) {
                if (i > 0) out << ',';
                out << static_cast<unsigned>(rule.var_pattern[i]);
            }
            std::snprintf(conf_buf, sizeof(conf_buf), "%.6f", rule.confidence);
            out << '\t' << conf_buf << '\t' << rule.rule_support << '\t' << rule.body_support
                << '\n';
        }
    }
}

namespace {

std::vector<std::string> split_fields(const std::string& line, char separator) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    for (;;) {
        const std::size_t end = line.find(separator, start);
        if (end == std::string::npos) {
            fields.push_back(line.substr(start));
            return fields;
        }
        fields.push_back(line.substr(start, end - start));
        start = end + 1;
    }
}

std::optional<std::vector<std::uint8_t>> parse_var_pattern(const std::string& text,
                                                           std::size_t expected) {
    std::vector<std::uint8_t> pattern;
    std::uint8_t max_seen = 0;
    for (const std::string& part : split_fields(text, ',')) {
        if (part.empty()) return std::nullopt;
        unsigned long value = 0;
        try {
            value = std::stoul(part);
        } catch (...) {
            return std::nullopt;
        }
        // first-occurrence numbering: each id is at most one past the max so far
        if (value > 255 || value > static_cast<unsigned long>(max_seen) + 1) return std::nullopt;
        if (pattern.empty() && value != 0) return std::nullopt;
        max_seen = std::max<std::uint8_t>(max_seen, static_cast<std::uint8_t>(value));
        pattern.push_back(static_cast<std::uint8_t>(value));
    }
    if (pattern.size() != expected) return std::nullopt;
    return pattern;
}

}  // namespace

RuleSet deserialize_rules(std::istream& in, const Vocabulary& target, DeserializeReport* report) {
    RuleSet rules;
    DeserializeReport local;
    DeserializeReport& rep = report ? *report : local;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line.front() == '#') continue;

        const auto skip = [&](const std::string& why) {
            ++rep.skipped;
            rep.warnings.push_back("rule line " + std::to_string(line_no) + " skipped: " + why);
        };

        const auto fields = split_fields(line, '\t');
        if (fields.size() < 6) {
            skip("expected at least 6 fields");
            continue;
        }
        std::size_t length = 0;
        try {
            length = std::stoul(fields[1]);
        } catch (...) {
            skip("bad length field '" + fields[1] + "'");
            continue;
        }
        if (length < 1 || fields.size() != length + 6) {
            skip("field count does not match length " + std::to_string(length));
            continue;
        }

        TemporalRule rule;
        const auto head = target.find_relation(fields[0]);
        if (!head) {
            skip("unknown relation '" + fields[0] + "'");
            continue;
        }
        rule.head_relation = *head;
        bool ok = true;
        for (std::size_t i = 0; i < length; ++i) {
            const auto r = target.find_relation(fields[2 + i]);
            if (!r) {
                skip("unknown relation '" + fields[2 + i] + "'");
                ok = false;
                break;
            }
            rule.body_relations.push_back(*r);
        }
        if (!ok) continue;

        const auto pattern = parse_var_pattern(fields[2 + length], length + 1);
        if (!pattern) {
            skip("bad variable pattern '" + fields[2 + length] + "'");
            continue;
        }
        rule.var_pattern = *pattern;

        try {
            rule.rule_support = std::stoull(fields[4 + length]);
            rule.body_support = std::stoull(fields[5 + length]);
        } catch (...) {
            skip("bad support fields");
            continue;
        }
        if (rule.rule_support > rule.body_support) {
            skip("rule support exceeds body support");
            continue;
        }
        rule.confidence = rule.body_support > 0 ? static_cast<double>(rule.rule_support) /
                                                      static_cast<double>(rule.body_support)
                                                : 0.0;
        rules.add(std::move(rule));
        ++rep.loaded;
    }
    rules.sort_groups();
    return rules;
}

std::string format_rule_human(const TemporalRule& rule, const Vocabulary& vocab) {
    const std::size_t l = rule.length();
    char conf_buf[16];
    std::snprintf(conf_buf, sizeof(conf_buf), "%.3f", rule.confidence);

    const auto var_name = [&](std::size_t position) {
        return "E" + std::to_string(rule.var_pattern[position] + 1);
    };

    std::ostringstream out;
    out << conf_buf << ": (" << var_name(0) << ", " << vocab.relation_name(rule.head_relation)
        << ", " << var_name(l) << ", T" << (l + 1) << ") <-";
    for (std::size_t i = 0; i < l; ++i) {
        out << (i == 0 ? " " : " & ") << '(' << var_name(i) << ", "
            << vocab.relation_name(rule.body_relations[i]) << ", " << var_name(i + 1) << ", T"
            << (i + 1) << ')';
    }
    return out.str();
}

}  // namespace chronorule
