#include "chronorule/ranking.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <memory>
#include <mutex>
#include <ostream>

#include "chronorule/thread_pool.hpp"

namespace chronorule {

double noisy_or(std::span<const double> scores) {
    double product = 1.0;
    for (double s : scores) product *= (1.0 - s);
    return 1.0 - product;
}

namespace {

void sort_ranked(std::vector<RankedCandidate>& candidates) {
    std::sort(candidates.begin(), candidates.end(),
              [](const RankedCandidate& a, const RankedCandidate& b) {
                  if (a.score != b.score) return a.score > b.score;
                  return a.entity < b.entity;
              });
}

}  // namespace

RankedAnswer aggregate_candidates(const ScoredCandidates& scored) {
    RankedAnswer out;
    out.provenance = Provenance::kRules;
    out.candidates.reserve(scored.per_candidate.size());
    std::vector<double> scores;
    for (const auto& [entity, matches] : scored.per_candidate) {
        scores.clear();
        for (const RuleMatch& m : matches) scores.push_back(m.score);
        out.candidates.push_back({entity, noisy_or(scores)});
    }
    sort_ranked(out.candidates);
    return out;
}

RankedAnswer baseline_distribution(const TkgStore& train, std::optional<RelationId> relation) {
    RankedAnswer out;
    out.provenance = Provenance::kBaseline;

    std::vector<std::uint32_t> counts(train.num_entities(), 0);
    std::uint64_t total = 0;
    const auto count_edges = [&](std::span<const Edge> edges) {
        for (const Edge& e : edges) {
            ++counts[e.object];
            ++total;
        }
    };

    if (relation && !train.edges_with_relation(*relation).empty()) {
        count_edges(train.edges_with_relation(*relation));
    } else {
        // unknown relation: overall object distribution
        for (RelationId r = 0; r < train.num_relations(); ++r) {
            count_edges(train.edges_with_relation(r));
        }
    }

    for (EntityId e = 0; e < counts.size(); ++e) {
        if (counts[e] > 0) {
            out.candidates.push_back(
                {e, static_cast<double>(counts[e]) / static_cast<double>(total)});
        }
    }
    sort_ranked(out.candidates);
    return out;
}

namespace {

// `considered` counts the entities in play (scored or implicitly at zero);
// the truth is always among them.
double rank_among(const RankedAnswer& ranked, EntityId truth, std::size_t considered,
                  TiePolicy policy) {
    double truth_score = 0.0;
    for (const RankedCandidate& c : ranked.candidates) {
        if (c.entity == truth) {
            truth_score = c.score;
            break;
        }
    }

    std::size_t greater = 0;
    std::size_t ties = 0;  // includes the truth itself
    for (const RankedCandidate& c : ranked.candidates) {
        if (c.score > truth_score) {
            ++greater;
        } else if (c.score == truth_score) {
            ++ties;
        }
    }
    const std::size_t unscored = considered - ranked.candidates.size();
    if (truth_score == 0.0) {
        ties += unscored;  // every unscored entity, truth included when unscored
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

}  // namespace

double rank_of_answer(const RankedAnswer& ranked, EntityId truth, std::size_t universe,
                      TiePolicy policy) {
    if (truth >= universe) {
        throw TruthOutOfUniverseError("truth id " + std::to_string(truth) +
                                      " outside universe of " + std::to_string(universe));
    }
    return rank_among(ranked, truth, universe, policy);
}

std::size_t KnownFacts::KeyHash::operator()(const Key& k) const noexcept {
    std::uint64_t h = mix64(k.subject);
    h = mix64(h ^ (static_cast<std::uint64_t>(k.relation) << 32));
    h = mix64(h ^ k.t);
    return static_cast<std::size_t>(h);
}

void KnownFacts::add_base_fact(const Edge& fact, const Vocabulary& vocab) {
    map_[{fact.subject, fact.relation, fact.timestamp}].push_back(fact.object);
    map_[{fact.object, vocab.inverse(fact.relation), fact.timestamp}].push_back(fact.subject);
}

void KnownFacts::finalize() {
    for (auto& [key, objects] : map_) {
        std::sort(objects.begin(), objects.end());
        objects.erase(std::unique(objects.begin(), objects.end()), objects.end());
    }
}

std::span<const EntityId> KnownFacts::objects(EntityId subject, RelationId relation,
                                              Timestamp t) const {
    const auto it = map_.find({subject, relation, t});
    if (it == map_.end()) return {};
    return it->second;
}

KnownFacts build_known_facts(const Dataset& dataset) {
    KnownFacts known;
    for (const auto* split : {&dataset.train, &dataset.valid, &dataset.test}) {
        for (const Edge& fact : *split) known.add_base_fact(fact, *dataset.vocab);
    }
    known.finalize();
    return known;
}

RankedAnswer time_aware_filter(const RankedAnswer& ranked, const Query& query, EntityId truth,
                               const KnownFacts& known) {
    const auto co_true = known.objects(query.subject, query.relation, query.query_time);
    RankedAnswer out;
    out.provenance = ranked.provenance;
    out.candidates.reserve(ranked.candidates.size());
    for (const RankedCandidate& c : ranked.candidates) {
        const bool drop = c.entity != truth &&
                          std::binary_search(co_true.begin(), co_true.end(), c.entity);
        if (!drop) out.candidates.push_back(c);
    }
    return out;
}

namespace {

// Baselines are shared across queries; computed once per relation on demand.
class BaselineCache {
public:
    BaselineCache(const TkgStore& train) : train_(train) {}

    const RankedAnswer& get(RelationId relation) {
        std::lock_guard lock(mutex_);
        auto& slot = per_relation_[relation];
        if (!slot) slot = std::make_unique<RankedAnswer>(baseline_distribution(train_, relation));
        return *slot;
    }

private:
    const TkgStore& train_;
    std::mutex mutex_;
    std::unordered_map<RelationId, std::unique_ptr<RankedAnswer>> per_relation_;
};

Metrics compute_metrics(const std::vector<QueryRecord>& records, bool filtered) {
    Metrics m;
    if (records.empty()) return m;
    for (const QueryRecord& r : records) {
        const double rank = filtered ? r.rank_filtered : r.rank_raw;
        m.mrr += 1.0 / rank;
        if (rank <= 1.0) m.hits1 += 1.0;
        if (rank <= 3.0) m.hits3 += 1.0;
        if (rank <= 10.0) m.hits10 += 1.0;
    }
    const double n = static_cast<double>(records.size());
    m.mrr /= n;
    m.hits1 /= n;
    m.hits3 /= n;
    m.hits10 /= n;
    return m;
}

}  // namespace

std::string render_explanation(const Query& query, const RankedAnswer& ranked,
                               const ScoredCandidates& scored,
                               std::span<const TemporalRule> rules, const Vocabulary& vocab) {
    std::string out = "query: (" + vocab.entity_name(query.subject) + ", " +
                      vocab.relation_name(query.relation) + ", ?, " +
                      vocab.time.label(query.query_time) + ")\n";
    if (ranked.candidates.empty()) {
        out += "  no candidates\n";
        return out;
    }
    const RankedCandidate& top = ranked.candidates.front();
    char score_buf[32];
    std::snprintf(score_buf, sizeof(score_buf), "%.4f", top.score);
    out += "  answer: " + vocab.entity_name(top.entity) + "  score " + score_buf;
    if (ranked.provenance == Provenance::kBaseline) {
        out += "  (baseline)\n";
        return out;
    }
    out += '\n';
    const auto it = scored.per_candidate.find(top.entity);
    if (it != scored.per_candidate.end()) {
        for (const RuleMatch& match : it->second) {
            const TemporalRule& rule = rules[match.rule_index];
            out += "    " + format_rule_human(rule, vocab) + '\n';
            if (match.explanation) {
                out += "      " + format_grounding(*match.explanation, rule, vocab) + '\n';
            }
        }
    }
    return out;
}

EvalReport evaluate(const TkgStore& application_store, const TkgStore& train_store,
                    const RuleSet& rules, std::span<const Edge> eval_facts,
                    const KnownFacts& known, const EvalConfig& config) {
    const auto start_time = std::chrono::steady_clock::now();

    std::vector<Edge> facts(eval_facts.begin(), eval_facts.end());
    std::stable_sort(facts.begin(), facts.end(),
                     [](const Edge& a, const Edge& b) { return a.timestamp < b.timestamp; });

    EvalReport report;
    report.records.resize(2 * facts.size());
    const std::size_t universe = application_store.num_entities();
    BaselineCache baselines(train_store);
    std::atomic<std::size_t> no_rules{0};
    std::atomic<std::size_t> no_groundings{0};

    parallel_for(facts.size(), config.workers, [&](std::size_t i) {
        const Edge& fact = facts[i];
        for (int side = 0; side < 2; ++side) {
            const bool subject_prediction = (side == 1);
            QueryRecord record;
            record.subject_prediction = subject_prediction;
            record.truth = subject_prediction ? fact.subject : fact.object;
            record.query.subject = subject_prediction ? fact.object : fact.subject;
            record.query.relation = subject_prediction
                                        ? application_store.inverse(fact.relation)
                                        : fact.relation;
            record.query.query_time = fact.timestamp;

            const SubgraphView view =
                window_subgraph(application_store, record.query.query_time, config.window);
            const auto rule_group = rules.rules_for(record.query.relation);

            ScoredCandidates scored;
            if (rule_group.empty()) {
                no_rules.fetch_add(1, std::memory_order_relaxed);
            } else {
                scored = apply_rules(view, rule_group, record.query, config.apply);
                if (scored.empty()) no_groundings.fetch_add(1, std::memory_order_relaxed);
            }

            const RankedAnswer ranked = scored.empty()
                                            ? baselines.get(record.query.relation)
                                            : aggregate_candidates(scored);
            record.provenance = ranked.provenance;

            const auto co_true =
                known.objects(record.query.subject, record.query.relation,
                              record.query.query_time);
            std::size_t excluded = 0;
            for (const EntityId e : co_true) {
                if (e != record.truth) ++excluded;
            }

            record.rank_raw = rank_of_answer(ranked, record.truth, universe, config.tie_policy);
            const RankedAnswer filtered =
                time_aware_filter(ranked, record.query, record.truth, known);
            record.rank_filtered =
                rank_among(filtered, record.truth, universe - excluded, config.tie_policy);

            if (config.apply.collect_explanations) {
                record.explanation =
                    render_explanation(record.query, ranked, scored, rule_group,
                                       application_store.vocab());
            }
            report.records[2 * i + side] = std::move(record);
        }
    });

    report.queries_without_rules = no_rules.load();
    report.queries_without_groundings = no_groundings.load();
    report.raw = compute_metrics(report.records, false);
    report.filtered = compute_metrics(report.records, true);
    report.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start_time).count();
    return report;
}

namespace {

void print_metric_row(std::ostream& out, const char* name, double raw, double filtered) {
    char buf[96];
    std::snprintf(buf, sizeof(buf), "%-8s %10.4f %12.4f\n", name, raw, filtered);
    out << buf;
}

}  // namespace

void EvalReport::write_table(std::ostream& out) const {
    out << "metric          raw   time-aware\n";
    print_metric_row(out, "MRR", raw.mrr, filtered.mrr);
    print_metric_row(out, "hits@1", raw.hits1, filtered.hits1);
    print_metric_row(out, "hits@3", raw.hits3, filtered.hits3);
    print_metric_row(out, "hits@10", raw.hits10, filtered.hits10);
    out << "queries              " << records.size() << '\n';
    const auto rate = [&](std::size_t count) {
        return records.empty() ? 0.0
                               : 100.0 * static_cast<double>(count) /
                                     static_cast<double>(records.size());
    };
    char buf[96];
    std::snprintf(buf, sizeof(buf), "no rules             %zu (%.2f%%)\n",
                  queries_without_rules, rate(queries_without_rules));
    out << buf;
    std::snprintf(buf, sizeof(buf), "no groundings        %zu (%.2f%%)\n",
                  queries_without_groundings, rate(queries_without_groundings));
    out << buf;
    std::snprintf(buf, sizeof(buf), "wall seconds         %.1f\n", wall_seconds);
    out << buf;
}

void EvalReport::write_csv(std::ostream& out) const {
    out << "query_index,prediction,subject,relation,timestamp,truth,provenance,"
           "rank_raw,rank_filtered\n";
    char buf[160];
    for (std::size_t i = 0; i < records.size(); ++i) {
        const QueryRecord& r = records[i];
        std::snprintf(buf, sizeof(buf), "%zu,%s,%u,%u,%u,%u,%s,%.1f,%.1f\n", i,
                      r.subject_prediction ? "subject" : "object", r.query.subject,
                      r.query.relation, r.query.query_time, r.truth,
                      r.provenance == Provenance::kBaseline ? "baseline" : "rules", r.rank_raw,
                      r.rank_filtered);
        out << buf;
    }
}

}  // namespace chronorule
