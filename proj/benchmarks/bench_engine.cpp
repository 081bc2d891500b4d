#include <benchmark/benchmark.h>

#include <memory>
#include <vector>

#include "chronorule/ranking.hpp"
#include "chronorule/rule_applier.hpp"
#include "chronorule/rule_engine.hpp"
#include "chronorule/walk_sampler.hpp"

namespace {

using namespace chronorule;

std::shared_ptr<Vocabulary> bench_vocab(std::size_t entities, std::size_t relations) {
    auto vocab = std::make_shared<Vocabulary>();
    for (std::size_t i = 0; i < entities; ++i) vocab->entities.intern("e" + std::to_string(i));
    for (std::size_t i = 0; i < relations; ++i) vocab->relations.intern("r" + std::to_string(i));
    vocab->time = TimestampCodec(TimestampCodec::Kind::kInteger, 0);
    return vocab;
}

std::vector<Edge> bench_facts(std::size_t entities, std::size_t relations, std::size_t count,
                              Timestamp max_time, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<Edge> facts(count);
    for (Edge& f : facts) {
        f.subject = static_cast<EntityId>(uniform_index(rng, entities));
        f.relation = static_cast<RelationId>(uniform_index(rng, relations));
        f.object = static_cast<EntityId>(uniform_index(rng, entities));
        f.timestamp = static_cast<Timestamp>(uniform_index(rng, max_time + 1));
    }
    return facts;
}

const TkgStore& shared_store() {
    static const TkgStore store(bench_vocab(2000, 40),
                                bench_facts(2000, 40, 100000, 365, 99));
    return store;
}

void BM_StoreBuild(benchmark::State& state) {
    const auto vocab = bench_vocab(2000, 40);
    const auto facts = bench_facts(2000, 40, static_cast<std::size_t>(state.range(0)), 365, 7);
    for (auto _ : state) {
        TkgStore store(vocab, facts);
        benchmark::DoNotOptimize(store.num_edges());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_StoreBuild)->Arg(10000)->Arg(100000);

void BM_SampleWalk(benchmark::State& state) {
    const TkgStore& store = shared_store();
    const std::size_t length = static_cast<std::size_t>(state.range(0));
    Rng rng(1234);
    std::size_t successes = 0;
    for (auto _ : state) {
        const RelationId head =
            static_cast<RelationId>(uniform_index(rng, store.num_relations()));
        const auto walk = sample_temporal_walk(store, head, length,
                                               TransitionDistribution::kExponential, rng);
        successes += walk.has_value();
        benchmark::DoNotOptimize(walk);
    }
    state.counters["success_rate"] =
        benchmark::Counter(static_cast<double>(successes) /
                           static_cast<double>(state.iterations()));
}
BENCHMARK(BM_SampleWalk)->Arg(1)->Arg(2)->Arg(3);

void BM_FindGroundings(benchmark::State& state) {
    const TkgStore& store = shared_store();
    const SubgraphView view = window_subgraph(store, 300, kInfiniteWindow);
    TemporalRule rule;
    rule.head_relation = 0;
    rule.var_pattern.assign(static_cast<std::size_t>(state.range(0)) + 1, 0);
    for (std::uint8_t i = 0; i <= state.range(0); ++i) rule.var_pattern[i] = i;
    for (int i = 0; i < state.range(0); ++i) {
        rule.body_relations.push_back(static_cast<RelationId>(i % store.num_relations()));
    }
    Rng rng(5);
    std::size_t total = 0;
    for (auto _ : state) {
        const EntityId subject = static_cast<EntityId>(uniform_index(rng, store.num_entities()));
        const auto groundings = find_body_groundings(view, rule, subject);
        total += groundings.size();
        benchmark::DoNotOptimize(groundings);
    }
    benchmark::DoNotOptimize(total);
}
BENCHMARK(BM_FindGroundings)->Arg(1)->Arg(2)->Arg(3);

void BM_ApplyQuery(benchmark::State& state) {
    // denser graph so walks close cycles and rules survive the filter
    static const TkgStore store(bench_vocab(300, 10), bench_facts(300, 10, 40000, 365, 31));
    LearnConfig learn;
    learn.walks_per_relation = 50;
    learn.body_samples = 100;
    learn.workers = 2;
    std::vector<RelationId> relations(store.num_relations());
    for (RelationId r = 0; r < relations.size(); ++r) relations[r] = r;
    static const RuleSet rules = filter_rules(learn_rules(store, relations, learn), 0.01, 2);
    static const std::vector<RelationId> heads = rules.head_relations();
    if (heads.empty()) {
        state.SkipWithError("no rules survived the filter");
        return;
    }

    const SubgraphView view = window_subgraph(store, 300, kInfiniteWindow);
    ApplyConfig config;
    Rng rng(77);
    for (auto _ : state) {
        Query query;
        query.subject = static_cast<EntityId>(uniform_index(rng, store.num_entities()));
        query.relation = heads[uniform_index(rng, heads.size())];
        query.query_time = 300;
        const auto scored = apply_rules(view, rules.rules_for(query.relation), query, config);
        benchmark::DoNotOptimize(scored);
    }
}
BENCHMARK(BM_ApplyQuery);

void BM_NoisyOrAggregate(benchmark::State& state) {
    ScoredCandidates scored;
    Rng rng(3);
    for (EntityId e = 0; e < 200; ++e) {
        auto& matches = scored.per_candidate[e];
        for (std::uint32_t r = 0; r < 1 + e % 7; ++r) {
            matches.push_back({r, uniform_unit(rng), {}});
        }
    }
    for (auto _ : state) {
        const auto ranked = aggregate_candidates(scored);
        benchmark::DoNotOptimize(ranked);
    }
}
BENCHMARK(BM_NoisyOrAggregate);

}  // namespace

BENCHMARK_MAIN();
