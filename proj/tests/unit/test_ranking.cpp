#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "chronorule/ranking.hpp"
#include "support/oracles.hpp"
#include "support/synthetic.hpp"

using namespace chronorule;
using namespace chronorule::testing;

TEST_CASE("noisy-OR identities") {
    CHECK(noisy_or({}) == 0.0);
    const double single[] = {0.37};
    CHECK(noisy_or(single) == doctest::Approx(0.37).epsilon(1e-15));
    const double halves[] = {0.5, 0.5};
    CHECK(noisy_or(halves) == doctest::Approx(0.75).epsilon(1e-15));
    const double absorbing[] = {1.0, 0.123};
    CHECK(noisy_or(absorbing) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("noisy-OR is commutative, monotone, and bounded") {
    Rng rng(17);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> scores(1 + uniform_index(rng, 8));
        for (double& s : scores) s = uniform_unit(rng);
        const double value = noisy_or(scores);
        CHECK(value >= 0.0);
        CHECK(value <= 1.0);

        std::vector<double> shuffled = scores;
        std::shuffle(shuffled.begin(), shuffled.end(), rng);
        CHECK(noisy_or(shuffled) == doctest::Approx(value).epsilon(1e-12));

        std::vector<double> extended = scores;
        extended.push_back(uniform_unit(rng));
        CHECK(noisy_or(extended) >= value - 1e-15);
    }
}

TEST_CASE("candidate aggregation is order-independent") {
    ScoredCandidates scored;
    scored.per_candidate[7] = {{0, 0.4, {}}, {1, 0.3, {}}, {2, 0.9, {}}};
    ScoredCandidates permuted;
    permuted.per_candidate[7] = {{2, 0.9, {}}, {0, 0.4, {}}, {1, 0.3, {}}};
    const auto a = aggregate_candidates(scored);
    const auto b = aggregate_candidates(permuted);
    REQUIRE(a.candidates.size() == 1);
    CHECK(a.candidates[0].score == doctest::Approx(b.candidates[0].score).epsilon(1e-15));
    CHECK(a.candidates[0].score == doctest::Approx(1.0 - 0.6 * 0.7 * 0.1).epsilon(1e-12));
}

TEST_CASE("baseline ranks objects by frequency") {
    // relation 0 objects: b, b, b, c (via distinct timestamps); relation 2 unused
    const TkgStore store = store_from_facts(
        {{0, 0, 1, 1}, {2, 0, 1, 2}, {3, 0, 1, 3}, {0, 0, 2, 4}, {0, 1, 3, 5}}, 5, 3);

    const RankedAnswer per_relation = baseline_distribution(store, RelationId{0});
    CHECK(per_relation.provenance == Provenance::kBaseline);
    REQUIRE(per_relation.candidates.size() == 2);
    CHECK(per_relation.candidates[0].entity == 1);
    CHECK(per_relation.candidates[0].score == doctest::Approx(0.75));
    CHECK(per_relation.candidates[1].entity == 2);
    CHECK(per_relation.candidates[1].score == doctest::Approx(0.25));

    // unknown relation: the overall object distribution (10 augmented edges)
    const RankedAnswer overall = baseline_distribution(store, std::nullopt);
    double total = 0.0;
    for (const auto& c : overall.candidates) total += c.score;
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(overall.candidates.size() > 2);

    // a relation id with no training edges also falls back to overall
    const RankedAnswer absent = baseline_distribution(store, RelationId{2});
    CHECK(absent.candidates.size() == overall.candidates.size());

    // deterministic tie-break by entity id among equal frequencies
    for (std::size_t i = 1; i < overall.candidates.size(); ++i) {
        const auto& prev = overall.candidates[i - 1];
        const auto& cur = overall.candidates[i];
        CHECK((prev.score > cur.score ||
               (prev.score == cur.score && prev.entity < cur.entity)));
    }
}

TEST_CASE("rank computation follows the tie policy") {
    RankedAnswer ranked;
    ranked.candidates = {{3, 0.9}, {1, 0.5}, {2, 0.5}};

    CHECK(rank_of_answer(ranked, 3, 100, TiePolicy::kAverage) == 1.0);
    CHECK(rank_of_answer(ranked, 3, 100, TiePolicy::kBest) == 1.0);
    CHECK(rank_of_answer(ranked, 3, 100, TiePolicy::kWorst) == 1.0);

    // truth tied with one other at the top
    RankedAnswer tied;
    tied.candidates = {{1, 0.9}, {2, 0.9}};
    CHECK(rank_of_answer(tied, 1, 100, TiePolicy::kAverage) == 1.5);
    CHECK(rank_of_answer(tied, 1, 100, TiePolicy::kBest) == 1.0);
    CHECK(rank_of_answer(tied, 1, 100, TiePolicy::kWorst) == 2.0);

    CHECK_THROWS_AS(rank_of_answer(ranked, 100, 100, TiePolicy::kAverage),
                    TruthOutOfUniverseError);
}

TEST_CASE("an unscored truth ties with all unscored entities") {
    RankedAnswer ranked;
    for (EntityId e = 0; e < 10; ++e) {
        ranked.candidates.push_back({e, 0.9 - 0.01 * static_cast<double>(e)});
    }
    const std::size_t universe = 7128;
    const EntityId truth = 5000;

    // declared policy arithmetic: 10 + (7118 + 1) / 2
    CHECK(rank_of_answer(ranked, truth, universe, TiePolicy::kAverage) ==
          doctest::Approx(10.0 + (7118.0 + 1.0) / 2.0));

    // brute-force cross-check on the dense score vector
    std::vector<double> dense(universe, 0.0);
    for (const auto& c : ranked.candidates) dense[c.entity] = c.score;
    for (const auto policy : {TiePolicy::kBest, TiePolicy::kAverage, TiePolicy::kWorst}) {
        CHECK(rank_of_answer(ranked, truth, universe, policy) ==
              oracle_rank(dense, truth, policy));
    }
}

TEST_CASE("ranks match the dense oracle on random score sets") {
    Rng rng(23);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t universe = 30;
        RankedAnswer ranked;
        std::vector<double> dense(universe, 0.0);
        const std::size_t scored = uniform_index(rng, universe);
        for (std::size_t i = 0; i < scored; ++i) {
            const EntityId entity = static_cast<EntityId>(i);
            const double score = (1 + uniform_index(rng, 4)) * 0.2;  // ties likely
            ranked.candidates.push_back({entity, score});
            dense[entity] = score;
        }
        const EntityId truth = static_cast<EntityId>(uniform_index(rng, universe));
        for (const auto policy : {TiePolicy::kBest, TiePolicy::kAverage, TiePolicy::kWorst}) {
            CHECK(rank_of_answer(ranked, truth, universe, policy) ==
                  oracle_rank(dense, truth, policy));
        }
    }
}

TEST_CASE("time-aware filtering removes only co-true answers at the query time") {
    auto vocab = make_vocab(6, 2);
    KnownFacts known;
    known.add_base_fact({0, 0, 2, 5}, *vocab);  // the query's own fact
    known.add_base_fact({0, 0, 3, 5}, *vocab);  // co-true at t = 5
    known.add_base_fact({0, 0, 4, 7}, *vocab);  // different timestamp
    known.finalize();

    RankedAnswer ranked;
    ranked.candidates = {{3, 0.9}, {4, 0.8}, {2, 0.7}};
    const Query query{0, 0, 5};

    const RankedAnswer filtered = time_aware_filter(ranked, query, 2, known);
    REQUIRE(filtered.candidates.size() == 2);
    CHECK(filtered.candidates[0].entity == 4);  // co-true at another time stays
    CHECK(filtered.candidates[1].entity == 2);

    // the truth's rank improves once the co-true competitor is gone
    CHECK(rank_of_answer(ranked, 2, 6, TiePolicy::kAverage) == 3.0);
    CHECK(rank_of_answer(filtered, 2, 5, TiePolicy::kAverage) == 2.0);

    // no co-true answers: the ranking is unchanged
    const Query other{0, 0, 9};
    CHECK(time_aware_filter(ranked, other, 2, known).candidates == ranked.candidates);

    // subject-side lookups see the inverse orientation
    CHECK(known.objects(2, vocab->inverse(0), 5).size() == 1);
}

namespace {

// End-to-end fixture: every subject has one `cause` edge to a unique object
// and the matching `effect` edge one step later, so the rule
// (E1, effect, E2, T2) <- (E1, cause, E2, T1) holds with confidence 1 and
// every query has exactly one scored candidate.
struct UniqueWorld {
    std::shared_ptr<Vocabulary> vocab = make_vocab(20, 2);  // relation 0 = cause, 1 = effect
    std::vector<Edge> train;
    std::vector<Edge> test;

    UniqueWorld() {
        for (EntityId s = 0; s < 8; ++s) {
            const EntityId o = s + 8;
            train.push_back({s, 0, o, s});       // cause at t = s
            train.push_back({s, 1, o, s + 1});   // effect at t = s+1 (teaches the rule)
            test.push_back({s, 1, o, 30});       // forecast the effect at t = 30
        }
    }
};

}  // namespace

TEST_CASE("evaluation reaches MRR 1 when every truth is uniquely implied") {
    UniqueWorld world;
    Dataset dataset;
    dataset.vocab = world.vocab;
    dataset.train = world.train;
    dataset.test = world.test;

    const TkgStore train_store = dataset.build_train_store();
    const TkgStore app_store = dataset.build_store(true, true);
    const KnownFacts known = build_known_facts(dataset);

    LearnConfig learn;
    learn.walks_per_relation = 50;
    learn.body_samples = 100;
    std::vector<RelationId> relations(train_store.num_relations());
    for (RelationId r = 0; r < relations.size(); ++r) relations[r] = r;
    const RuleSet rules =
        filter_rules(learn_rules(train_store, relations, learn), 0.01, 2);
    REQUIRE(rules.size() > 0);

    EvalConfig config;
    config.apply.min_candidates = 20;
    config.workers = 2;
    const EvalReport report =
        evaluate(app_store, train_store, rules, dataset.test, known, config);

    REQUIRE(report.records.size() == 2 * world.test.size());
    CHECK(report.filtered.mrr == 1.0);
    CHECK(report.filtered.hits1 == 1.0);
    CHECK(report.filtered.hits10 == 1.0);
    for (const QueryRecord& record : report.records) {
        CHECK(record.rank_filtered == 1.0);
        CHECK(record.provenance == Provenance::kRules);
    }
}

TEST_CASE("reports keep filtered ranks at or below raw ranks and ordered hits") {
    const TkgStore store = random_store({.entities = 18, .relations = 3, .facts = 260,
                                         .max_time = 20, .seed = 71});
    // treat the latest facts as the evaluation split
    Dataset dataset;
    dataset.vocab = store.vocab_ptr();
    for (RelationId r = 0; r < store.num_base_relations(); ++r) {
        for (const Edge& e : store.edges_with_relation(r)) {
            (e.timestamp >= 15 ? dataset.test : dataset.train).push_back(e);
        }
    }
    REQUIRE(dataset.test.size() > 10);

    const TkgStore train_store = dataset.build_train_store();
    const TkgStore app_store = dataset.build_store(true, true);
    const KnownFacts known = build_known_facts(dataset);

    LearnConfig learn;
    learn.walks_per_relation = 30;
    learn.body_samples = 60;
    std::vector<RelationId> relations(train_store.num_relations());
    for (RelationId r = 0; r < relations.size(); ++r) relations[r] = r;
    const RuleSet rules = filter_rules(learn_rules(train_store, relations, learn), 0.01, 2);

    EvalConfig config;
    config.workers = 3;
    const EvalReport report =
        evaluate(app_store, train_store, rules, dataset.test, known, config);

    for (const QueryRecord& record : report.records) {
        CHECK(record.rank_filtered <= record.rank_raw);
        CHECK(record.rank_filtered >= 1.0);
    }
    CHECK(report.raw.hits1 <= report.raw.hits3);
    CHECK(report.raw.hits3 <= report.raw.hits10);
    CHECK(report.filtered.hits1 <= report.filtered.hits3);
    CHECK(report.filtered.hits3 <= report.filtered.hits10);
    CHECK(report.raw.mrr <= report.raw.hits1 + (1.0 - report.raw.hits1));
}

TEST_CASE("evaluation matches a naive pipeline without early stopping") {
    const TkgStore store = random_store({.entities = 14, .relations = 3, .facts = 200,
                                         .max_time = 16, .seed = 81});
    Dataset dataset;
    dataset.vocab = store.vocab_ptr();
    for (RelationId r = 0; r < store.num_base_relations(); ++r) {
        for (const Edge& e : store.edges_with_relation(r)) {
            (e.timestamp >= 12 ? dataset.test : dataset.train).push_back(e);
        }
    }
    REQUIRE(dataset.test.size() > 5);

    const TkgStore train_store = dataset.build_train_store();
    const TkgStore app_store = dataset.build_store(true, true);
    const KnownFacts known = build_known_facts(dataset);

    LearnConfig learn;
    learn.walks_per_relation = 25;
    learn.body_samples = 50;
    learn.lengths = {1, 2};
    std::vector<RelationId> relations(train_store.num_relations());
    for (RelationId r = 0; r < relations.size(); ++r) relations[r] = r;
    const RuleSet rules = filter_rules(learn_rules(train_store, relations, learn), 0.01, 2);

    EvalConfig config;
    // k far above |E|, so the early stop can never truncate the rule loop
    config.apply.min_candidates = 100 * static_cast<std::uint32_t>(app_store.num_entities());
    const EvalReport report =
        evaluate(app_store, train_store, rules, dataset.test, known, config);

    // naive reference: oracle groundings per rule, direct score formula,
    // direct noisy-OR product, dense-vector ranks
    std::vector<Edge> facts = dataset.test;
    std::stable_sort(facts.begin(), facts.end(),
                     [](const Edge& a, const Edge& b) { return a.timestamp < b.timestamp; });
    const std::size_t universe = app_store.num_entities();
    std::size_t index = 0;
    for (const Edge& fact : facts) {
        for (int side = 0; side < 2; ++side) {
            const QueryRecord& record = report.records[index++];
            const Query& query = record.query;
            const SubgraphView view = window_subgraph(app_store, query.query_time, config.window);

            std::vector<std::vector<double>> collected(universe);
            const auto group = rules.rules_for(query.relation);
            for (const TemporalRule& rule : group) {
                const auto oracle = oracle_groundings(view, rule, query.subject, 2000000);
                REQUIRE(oracle.has_value());
                std::unordered_map<EntityId, Timestamp> best_t1;
                for (const BodyGrounding& g : *oracle) {
                    const EntityId target = g.entities.back();
                    const auto it = best_t1.find(target);
                    if (it == best_t1.end() || g.timestamps.front() > it->second) {
                        best_t1[target] = g.timestamps.front();
                    }
                }
                for (const auto& [target, t1] : best_t1) {
                    const double gap =
                        static_cast<double>(query.query_time) - static_cast<double>(t1);
                    collected[target].push_back(0.5 * rule.confidence +
                                                0.5 * std::exp(-0.1 * gap));
                }
            }

            std::vector<double> dense(universe, 0.0);
            bool any = false;
            for (EntityId e = 0; e < universe; ++e) {
                if (collected[e].empty()) continue;
                any = true;
                double product = 1.0;
                for (const double s : collected[e]) product *= (1.0 - s);
                dense[e] = 1.0 - product;
            }
            if (!any) {
                CHECK(record.provenance == Provenance::kBaseline);
                continue;
            }
            CHECK(record.provenance == Provenance::kRules);
            CHECK(record.rank_raw ==
                  oracle_rank(dense, record.truth, TiePolicy::kAverage));

            // filtered: drop co-true entities from consideration entirely
            const auto co_true =
                known.objects(query.subject, query.relation, query.query_time);
            double truth_score = dense[record.truth];
            std::size_t greater = 0, ties = 0;
            for (EntityId e = 0; e < universe; ++e) {
                const bool excluded =
                    e != record.truth &&
                    std::binary_search(co_true.begin(), co_true.end(), e);
                if (excluded) continue;
                if (dense[e] > truth_score) ++greater;
                if (dense[e] == truth_score) ++ties;
            }
            CHECK(record.rank_filtered ==
                  static_cast<double>(greater) + (static_cast<double>(ties) + 1.0) / 2.0);
        }
    }
}

TEST_CASE("evaluation responds to missing rules with the baseline") {
    const TkgStore store = store_from_facts({{0, 0, 1, 0}, {0, 0, 1, 1}, {2, 0, 1, 2}}, 4, 2);
    Dataset dataset;
    dataset.vocab = store.vocab_ptr();
    dataset.train = {{0, 0, 1, 0}, {0, 0, 1, 1}, {2, 0, 1, 2}};
    dataset.test = {{0, 1, 3, 3}};  // relation 1 has no rules

    const TkgStore train_store = dataset.build_train_store();
    const TkgStore app_store = dataset.build_store(true, true);
    const KnownFacts known = build_known_facts(dataset);

    EvalConfig config;
    const EvalReport report =
        evaluate(app_store, train_store, RuleSet{}, dataset.test, known, config);
    REQUIRE(report.records.size() == 2);
    CHECK(report.queries_without_rules == 2);
    for (const QueryRecord& record : report.records) {
        CHECK(record.provenance == Provenance::kBaseline);
        CHECK(record.rank_raw >= 1.0);
    }
}
