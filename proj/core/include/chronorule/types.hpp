#pragma once

#include <cstdint>

namespace chronorule {

// Dense ids produced by dictionary interning. Relation ids cover base
// relations in [0, |R|) and their inverses in [|R|, 2|R|).
using EntityId = std::uint32_t;
using RelationId = std::uint32_t;

// Timestamps are non-negative offsets from the dataset minimum (days for
// date-stamped data, raw integers otherwise).
using Timestamp = std::uint32_t;

// Sentinel for an unbounded application time window.
inline constexpr Timestamp kInfiniteWindow = 0xffffffffu;

// One directed, timestamped fact in id space.
struct Edge {
    EntityId subject = 0;
    RelationId relation = 0;
    EntityId object = 0;
    Timestamp timestamp = 0;

    friend bool operator==(const Edge&, const Edge&) = default;
};

}  // namespace chronorule
