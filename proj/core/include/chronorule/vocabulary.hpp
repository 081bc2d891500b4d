#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "chronorule/dictionary.hpp"
#include "chronorule/types.hpp"

namespace chronorule {

// Suffix that marks inverse relations in rule files and human-readable
// output. Base relation names must not end with it.
inline constexpr std::string_view kInverseMarker = "^-1";

// Normalizes raw timestamp strings to offsets from the dataset minimum and
// renders offsets back. Two input modes: ISO dates (offsets are days) and
// plain non-negative integers (offsets shift the minimum to zero).
class TimestampCodec {
public:
    enum class Kind { kDays, kInteger };

    TimestampCodec() = default;
    TimestampCodec(Kind kind, std::int64_t base) : kind_(kind), base_(base) {}

    Kind kind() const { return kind_; }
    std::int64_t base() const { return base_; }

    // Raw string -> offset; nullopt if unparsable, before the base, or out
    // of the representable range.
    std::optional<Timestamp> encode(std::string_view raw) const;

    // Offset -> display form ("2014-08-09" in date mode, "17" otherwise).
    std::string label(Timestamp t) const;

    // Classifies one raw timestamp string; nullopt if neither form fits.
    static std::optional<Kind> classify(std::string_view raw);

    // Raw string -> absolute value (day serial or integer) for the given
    // mode, before base subtraction.
    static std::optional<std::int64_t> parse_raw(std::string_view raw, Kind kind);

    // Proleptic Gregorian day arithmetic.
    static std::int64_t days_from_civil(std::int64_t y, unsigned m, unsigned d);
    static void civil_from_days(std::int64_t z, std::int64_t& y, unsigned& m, unsigned& d);

private:
    Kind kind_ = Kind::kInteger;
    std::int64_t base_ = 0;
};

// The symbol environment shared by every store built from one dataset:
// entity and base-relation dictionaries plus the timestamp codec. Inverse
// relation ids are base id + |R|.
struct Vocabulary {
    Dictionary entities;
    Dictionary relations;  // base relations only
    TimestampCodec time;

    std::size_t num_base_relations() const { return relations.size(); }
    std::size_t num_relations() const { return 2 * relations.size(); }

    bool is_inverse(RelationId r) const { return r >= relations.size(); }

    RelationId inverse(RelationId r) const {
        const auto n = static_cast<RelationId>(relations.size());
        return r < n ? r + n : r - n;
    }

    RelationId base_of(RelationId r) const {
        return is_inverse(r) ? r - static_cast<RelationId>(relations.size()) : r;
    }

    const std::string& entity_name(EntityId e) const { return entities.name(e); }

    // Name with the inverse marker appended for inverse ids.
    std::string relation_name(RelationId r) const;

    // Inverse of relation_name: understands the marker.
    std::optional<RelationId> find_relation(std::string_view name) const;
};

}  // namespace chronorule
