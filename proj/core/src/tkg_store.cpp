#include "chronorule/tkg_store.hpp"

#include <algorithm>
#include <cassert>
#include <tuple>

namespace chronorule {

RawQuadruple parse_quadruple(std::string_view line, char separator) {
    RawQuadruple quad;
    std::string* fields[4] = {&quad.subject, &quad.relation, &quad.object, &quad.timestamp};
    std::size_t start = 0;
    for (int i = 0; i < 4; ++i) {
        const bool last = (i == 3);
        const std::size_t end = line.find(separator, start);
        if (end == std::string_view::npos) {
            if (!last) {
                throw MalformedLineError("expected 4 fields, found " + std::to_string(i + 1));
            }
            *fields[i] = std::string(line.substr(start));
            return quad;
        }
        *fields[i] = std::string(line.substr(start, end - start));
        start = end + 1;
    }
    return quad;  // extra columns ignored
}

namespace {

struct TimeRelObjLess {
    bool operator()(const Edge& a, const Edge& b) const {
        return std::tie(a.timestamp, a.relation, a.object) <
               std::tie(b.timestamp, b.relation, b.object);
    }
};

struct RelTimeObjLess {
    bool operator()(const Edge& a, const Edge& b) const {
        return std::tie(a.relation, a.timestamp, a.object) <
               std::tie(b.relation, b.timestamp, b.object);
    }
};

std::span<const Edge> clip_by_time(std::span<const Edge> edges, Timestamp lo, Timestamp hi) {
    const auto first = std::partition_point(edges.begin(), edges.end(),
                                            [&](const Edge& e) { return e.timestamp < lo; });
    const auto last = std::partition_point(first, edges.end(),
                                           [&](const Edge& e) { return e.timestamp < hi; });
    return {first, last};
}

}  // namespace

TkgStore::TkgStore(std::shared_ptr<const Vocabulary> vocab, std::vector<Edge> base_facts)
    : vocab_(std::move(vocab)) {
    auto full_less = [](const Edge& a, const Edge& b) {
        return std::tie(a.subject, a.relation, a.object, a.timestamp) <
               std::tie(b.subject, b.relation, b.object, b.timestamp);
    };
    std::sort(base_facts.begin(), base_facts.end(), full_less);
    base_facts.erase(std::unique(base_facts.begin(), base_facts.end()), base_facts.end());
    if (base_facts.empty()) throw EmptyDatasetError("store built from zero facts");
    num_base_facts_ = base_facts.size();

    const auto num_rel = vocab_->num_relations();
    const auto num_ent = vocab_->entities.size();
    by_relation_.resize(num_rel);
    adj_time_.resize(num_ent);
    adj_rel_.resize(num_ent);

    min_timestamp_ = base_facts.front().timestamp;
    max_timestamp_ = base_facts.front().timestamp;
    for (const Edge& fact : base_facts) {
        assert(fact.relation < vocab_->num_base_relations());
        assert(fact.subject < num_ent && fact.object < num_ent);
        const Edge inv = inverse_of(fact);
        min_timestamp_ = std::min(min_timestamp_, fact.timestamp);
        max_timestamp_ = std::max(max_timestamp_, fact.timestamp);
        for (const Edge& e : {fact, inv}) {
            by_relation_[e.relation].push_back(e);
            adj_time_[e.subject].push_back(e);
            adj_rel_[e.subject].push_back(e);
        }
    }
    for (auto& edges : by_relation_) std::sort(edges.begin(), edges.end(), TimeRelObjLess{});
    for (auto& edges : adj_time_) std::sort(edges.begin(), edges.end(), TimeRelObjLess{});
    for (auto& edges : adj_rel_) std::sort(edges.begin(), edges.end(), RelTimeObjLess{});
}

std::span<const Edge> TkgStore::edges_with_relation(RelationId r) const {
    if (r >= by_relation_.size()) return {};
    return by_relation_[r];
}

std::span<const Edge> TkgStore::out_edges(EntityId node) const {
    if (node >= adj_time_.size()) return {};
    return adj_time_[node];
}

std::span<const Edge> TkgStore::out_edges(EntityId node, RelationId r) const {
    if (node >= adj_rel_.size()) return {};
    const auto& edges = adj_rel_[node];
    const auto first = std::partition_point(edges.begin(), edges.end(),
                                            [&](const Edge& e) { return e.relation < r; });
    const auto last = std::partition_point(first, edges.end(),
                                           [&](const Edge& e) { return e.relation <= r; });
    return {first, last};
}

std::span<const Edge> TkgStore::out_edges_before(EntityId node, Timestamp bound,
                                                 bool strict) const {
    const auto edges = out_edges(node);
    const Timestamp limit = strict ? bound : (bound == kInfiniteWindow ? bound : bound + 1);
    const auto last = std::partition_point(edges.begin(), edges.end(),
                                           [&](const Edge& e) { return e.timestamp < limit; });
    return {edges.begin(), last};
}

std::vector<Edge> TkgStore::edges_from(EntityId node, std::optional<RelationId> relation,
                                       Timestamp t_bound, bool strict) const {
    std::span<const Edge> span;
    if (relation) {
        auto run = out_edges(node, *relation);
        const Timestamp hi = strict ? t_bound : (t_bound == kInfiniteWindow ? t_bound : t_bound + 1);
        span = clip_by_time(run, 0, hi);
    } else {
        span = out_edges_before(node, t_bound, strict);
    }
    return {span.begin(), span.end()};
}

bool TkgStore::contains(const Edge& e) const {
    const auto run = out_edges(e.subject, e.relation);
    const auto at = clip_by_time(run, e.timestamp,
                                 e.timestamp == kInfiniteWindow ? e.timestamp : e.timestamp + 1);
    for (const Edge& candidate : at) {
        if (candidate.object == e.object) return true;
    }
    return false;
}

bool TkgStore::head_exists_after(EntityId subject, RelationId relation, EntityId object,
                                 Timestamp after) const {
    const auto run = out_edges(subject, relation);
    const auto first = std::partition_point(run.begin(), run.end(),
                                            [&](const Edge& e) { return e.timestamp <= after; });
    for (auto it = first; it != run.end(); ++it) {
        if (it->object == object) return true;
    }
    return false;
}

std::span<const Edge> SubgraphView::out_edges(EntityId node) const {
    return clip_by_time(store_->out_edges(node), lo_, hi_);
}

std::span<const Edge> SubgraphView::out_edges(EntityId node, RelationId r, Timestamp min_t) const {
    return clip_by_time(store_->out_edges(node, r), std::max(lo_, min_t), hi_);
}

std::vector<Edge> SubgraphView::edges_from(EntityId node, std::optional<RelationId> relation,
                                           Timestamp t_bound, bool strict) const {
    Timestamp hi = strict ? t_bound : (t_bound == kInfiniteWindow ? t_bound : t_bound + 1);
    hi = std::min(hi, hi_);
    std::span<const Edge> span;
    if (relation) {
        span = clip_by_time(store_->out_edges(node, *relation), lo_, hi);
    } else {
        span = clip_by_time(store_->out_edges(node), lo_, hi);
    }
    return {span.begin(), span.end()};
}

SubgraphView window_subgraph(const TkgStore& store, Timestamp query_time, Timestamp window) {
    const Timestamp lo =
        (window == kInfiniteWindow || window >= query_time) ? 0 : query_time - window;
    return SubgraphView(store, lo, query_time);
}

}  // namespace chronorule
