#include "chronorule/vocabulary.hpp"

#include <charconv>
#include <cstdio>

namespace chronorule {

namespace {

bool all_digits(std::string_view s) {
    if (s.empty()) return false;
    for (char c : s) {
        if (c < '0' || c > '9') return false;
    }
    return true;
}

std::optional<std::int64_t> parse_int(std::string_view s) {
    if (!all_digits(s)) return std::nullopt;
    std::int64_t value = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
    return value;
}

constexpr unsigned kDaysInMonth[12] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};

bool is_leap(std::int64_t y) { return y % 4 == 0 && (y % 100 != 0 || y % 400 == 0); }

// "YYYY-MM-DD" with a calendar-valid month and day.
std::optional<std::int64_t> parse_iso_date(std::string_view s) {
    if (s.size() != 10 || s[4] != '-' || s[7] != '-') return std::nullopt;
    const auto y = parse_int(s.substr(0, 4));
    const auto m = parse_int(s.substr(5, 2));
    const auto d = parse_int(s.substr(8, 2));
    if (!y || !m || !d) return std::nullopt;
    if (*m < 1 || *m > 12 || *d < 1) return std::nullopt;
    unsigned dim = kDaysInMonth[*m - 1];
    if (*m == 2 && is_leap(*y)) dim = 29;
    if (static_cast<unsigned>(*d) > dim) return std::nullopt;
    return TimestampCodec::days_from_civil(*y, static_cast<unsigned>(*m),
                                           static_cast<unsigned>(*d));
}

}  // namespace

std::int64_t TimestampCodec::days_from_civil(std::int64_t y, unsigned m, unsigned d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void TimestampCodec::civil_from_days(std::int64_t z, std::int64_t& y, unsigned& m, unsigned& d) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    y = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    d = doy - (153 * mp + 2) / 5 + 1;
    m = mp + (mp < 10 ? 3 : -9);
    y += m <= 2;
}

std::optional<TimestampCodec::Kind> TimestampCodec::classify(std::string_view raw) {
    if (parse_iso_date(raw)) return Kind::kDays;
    if (parse_int(raw)) return Kind::kInteger;
    return std::nullopt;
}

std::optional<std::int64_t> TimestampCodec::parse_raw(std::string_view raw, Kind kind) {
    return kind == Kind::kDays ? parse_iso_date(raw) : parse_int(raw);
}

std::optional<Timestamp> TimestampCodec::encode(std::string_view raw) const {
    const auto value = parse_raw(raw, kind_);
    if (!value || *value < base_) return std::nullopt;
    const std::int64_t offset = *value - base_;
    if (offset >= static_cast<std::int64_t>(kInfiniteWindow)) return std::nullopt;
    return static_cast<Timestamp>(offset);
}

std::string TimestampCodec::label(Timestamp t) const {
    if (kind_ == Kind::kInteger) return std::to_string(base_ + static_cast<std::int64_t>(t));
    std::int64_t y = 0;
    unsigned m = 0, d = 0;
    civil_from_days(base_ + static_cast<std::int64_t>(t), y, m, d);
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04lld-%02u-%02u", static_cast<long long>(y), m, d);
    return buf;
}

std::string Vocabulary::relation_name(RelationId r) const {
    if (!is_inverse(r)) return relations.name(r);
    return relations.name(base_of(r)) + std::string(kInverseMarker);
}

std::optional<RelationId> Vocabulary::find_relation(std::string_view name) const {
    if (name.size() > kInverseMarker.size() && name.ends_with(kInverseMarker)) {
        const auto base = relations.find(name.substr(0, name.size() - kInverseMarker.size()));
        if (!base) return std::nullopt;
        return inverse(*base);
    }
    return relations.find(name);
}

}  // namespace chronorule
