#pragma once

// Immutable indexed quadruple store. Every base fact (s, r, o, t) is stored
// together with its inverse (o, r+|R|, s, t); duplicates are stored once.
// Three indices back the read paths: edges grouped by relation (uniform
// sampling), per-node adjacency sorted by timestamp (walk transitions), and
// per-node adjacency sorted by (relation, timestamp) (grounding joins).
// The store never changes after construction and is safe to share across
// threads.

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "chronorule/errors.hpp"
#include "chronorule/types.hpp"
#include "chronorule/vocabulary.hpp"

namespace chronorule {

struct RawQuadruple {
    std::string subject;
    std::string relation;
    std::string object;
    std::string timestamp;

    friend bool operator==(const RawQuadruple&, const RawQuadruple&) = default;
};

// Splits a data line into the four quadruple fields; columns past the fourth
// are ignored. Throws MalformedLineError on fewer than four fields.
RawQuadruple parse_quadruple(std::string_view line, char separator);

class TkgStore {
public:
    // base_facts must use base relation ids (< |R|). Deduplicates, augments
    // with inverses, and builds all indices. Throws EmptyDatasetError when
    // no facts are given.
    TkgStore(std::shared_ptr<const Vocabulary> vocab, std::vector<Edge> base_facts);

    const Vocabulary& vocab() const { return *vocab_; }
    std::shared_ptr<const Vocabulary> vocab_ptr() const { return vocab_; }

    std::size_t num_entities() const { return vocab_->entities.size(); }
    std::size_t num_base_relations() const { return vocab_->num_base_relations(); }
    std::size_t num_relations() const { return vocab_->num_relations(); }
    std::size_t num_base_facts() const { return num_base_facts_; }
    std::size_t num_edges() const { return 2 * num_base_facts_; }
    Timestamp min_timestamp() const { return min_timestamp_; }
    Timestamp max_timestamp() const { return max_timestamp_; }

    // All edges with the given relation, sorted by (timestamp, subject, object).
    std::span<const Edge> edges_with_relation(RelationId r) const;

    // Outgoing edges of a node, ascending timestamp.
    std::span<const Edge> out_edges(EntityId node) const;

    // Outgoing edges of a node with one relation, ascending timestamp.
    std::span<const Edge> out_edges(EntityId node, RelationId r) const;

    // Prefix of out_edges(node) with t < bound (strict) or t <= bound.
    std::span<const Edge> out_edges_before(EntityId node, Timestamp bound, bool strict) const;

    // Outgoing edges matching the optional relation filter and the time
    // bound, ascending timestamp.
    std::vector<Edge> edges_from(EntityId node, std::optional<RelationId> relation,
                                 Timestamp t_bound, bool strict) const;

    bool contains(const Edge& e) const;

    // True iff some edge (subject, relation, object, t) exists with t > after.
    bool head_exists_after(EntityId subject, RelationId relation, EntityId object,
                           Timestamp after) const;

    RelationId inverse(RelationId r) const { return vocab_->inverse(r); }

    Edge inverse_of(const Edge& e) const {
        return Edge{e.object, vocab_->inverse(e.relation), e.subject, e.timestamp};
    }

private:
    std::shared_ptr<const Vocabulary> vocab_;
    std::size_t num_base_facts_ = 0;
    Timestamp min_timestamp_ = 0;
    Timestamp max_timestamp_ = 0;
    std::vector<std::vector<Edge>> by_relation_;  // [2|R|], sorted (t, s, o)
    std::vector<std::vector<Edge>> adj_time_;     // [|E|], sorted (t, r, o)
    std::vector<std::vector<Edge>> adj_rel_;      // [|E|], sorted (r, t, o)
};

// Read-only window [lo, hi) over a store; construction is O(1).
class SubgraphView {
public:
    SubgraphView(const TkgStore& store, Timestamp lo, Timestamp hi)
        : store_(&store), lo_(lo), hi_(hi) {}

    const TkgStore& store() const { return *store_; }
    Timestamp lo() const { return lo_; }
    Timestamp hi() const { return hi_; }

    // Outgoing edges inside the window, ascending timestamp.
    std::span<const Edge> out_edges(EntityId node) const;

    // Outgoing edges with one relation inside the window and with
    // t >= min_t, ascending timestamp.
    std::span<const Edge> out_edges(EntityId node, RelationId r, Timestamp min_t = 0) const;

    std::vector<Edge> edges_from(EntityId node, std::optional<RelationId> relation,
                                 Timestamp t_bound, bool strict) const;

private:
    const TkgStore* store_;
    Timestamp lo_;
    Timestamp hi_;
};

// View over [max(0, query_time - window), query_time); kInfiniteWindow means
// everything strictly before query_time.
SubgraphView window_subgraph(const TkgStore& store, Timestamp query_time, Timestamp window);

}  // namespace chronorule
