#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <set>
#include <string>

#include "chronorule/dataset.hpp"
#include "chronorule/tkg_store.hpp"
#include "support/synthetic.hpp"

using namespace chronorule;
using namespace chronorule::testing;

namespace {

// Writes a temp file in the working directory and removes it on scope exit.
struct TempFile {
    std::string path;
    explicit TempFile(const std::string& name, const std::string& content)
        : path("tmp_" + name) {
        std::ofstream out(path);
        out << content;
    }
    ~TempFile() { std::remove(path.c_str()); }
};

std::size_t count_view_edges(const SubgraphView& view, const TkgStore& store) {
    std::size_t n = 0;
    for (EntityId e = 0; e < store.num_entities(); ++e) n += view.out_edges(e).size();
    return n;
}

}  // namespace

TEST_CASE("parse_quadruple splits four fields") {
    const auto quad = parse_quadruple("Angela Merkel\tconsult\tBarack Obama\t2014-08-09", '\t');
    CHECK(quad.subject == "Angela Merkel");
    CHECK(quad.relation == "consult");
    CHECK(quad.object == "Barack Obama");
    CHECK(quad.timestamp == "2014-08-09");
}

TEST_CASE("parse_quadruple ignores extra columns") {
    const auto quad = parse_quadruple("a\tb\tc\t0\textra", '\t');
    CHECK(quad == RawQuadruple{"a", "b", "c", "0"});
}

TEST_CASE("parse_quadruple rejects short lines") {
    CHECK_THROWS_AS(parse_quadruple("a\tb\tc", '\t'), MalformedLineError);
    CHECK_THROWS_AS(parse_quadruple("", '\t'), MalformedLineError);
}

TEST_CASE("single quadruple is stored with its inverse and shifted to zero") {
    TempFile file("single.txt", "a\tr\tb\t5\n");
    const Dataset dataset = load_dataset({file.path, "", ""});
    const TkgStore store = dataset.build_train_store();

    CHECK(store.num_base_facts() == 1);
    CHECK(store.num_edges() == 2);
    CHECK(store.min_timestamp() == 0);  // min 5 shifted to 0

    const auto a = *dataset.vocab->entities.find("a");
    const auto b = *dataset.vocab->entities.find("b");
    const auto r = *dataset.vocab->relations.find("r");
    CHECK(store.contains({a, r, b, 0}));
    CHECK(store.contains({b, store.inverse(r), a, 0}));
}

TEST_CASE("duplicate quadruples are stored once") {
    TempFile file("dup.txt", "a\tr\tb\t5\na\tr\tb\t5\n");
    const Dataset dataset = load_dataset({file.path, "", ""});
    const TkgStore store = dataset.build_train_store();
    CHECK(store.num_base_facts() == 1);
    CHECK(store.num_edges() == 2);
}

TEST_CASE("ISO dates map to day offsets from the dataset minimum") {
    TempFile file("dates.txt", "a\tr\tb\t2014-08-07\nb\tr\tc\t2014-08-09\nc\tr\ta\t2014-09-06\n");
    const Dataset dataset = load_dataset({file.path, "", ""});
    CHECK(dataset.train[0].timestamp == 0);
    CHECK(dataset.train[1].timestamp == 2);
    CHECK(dataset.train[2].timestamp == 30);
    CHECK(dataset.vocab->time.label(2) == "2014-08-09");
    CHECK(dataset.distinct_timestamps == 3);
}

TEST_CASE("unparsable and mixed timestamps are rejected") {
    TempFile bad("badts.txt", "a\tr\tb\tnot-a-date\n");
    CHECK_THROWS_AS(load_dataset({bad.path, "", ""}), UnparsableTimestampError);
    TempFile mixed("mixed.txt", "a\tr\tb\t2014-08-07\nb\tr\tc\t12\n");
    CHECK_THROWS_AS(load_dataset({mixed.path, "", ""}), UnparsableTimestampError);
}

TEST_CASE("empty dataset file is rejected") {
    TempFile file("empty.txt", "");
    CHECK_THROWS_AS(load_dataset({file.path, "", ""}), EmptyDatasetError);
}

TEST_CASE("interning is a bijection on the input vocabulary") {
    TempFile file("bij.txt",
                  "alpha\tknows\tbeta\t0\nbeta\tknows\tgamma\t1\ngamma\tlikes\talpha\t2\n");
    const Dataset dataset = load_dataset({file.path, "", ""});
    for (const std::string name : {"alpha", "beta", "gamma"}) {
        const auto id = dataset.vocab->entities.find(name);
        REQUIRE(id.has_value());
        CHECK(dataset.vocab->entities.name(*id) == name);
    }
    for (const std::string name : {"knows", "likes"}) {
        const auto id = dataset.vocab->relations.find(name);
        REQUIRE(id.has_value());
        CHECK(dataset.vocab->relations.name(*id) == name);
    }
}

TEST_CASE("inverse ids round-trip and inverse edges are present") {
    const TkgStore store = random_store({.entities = 15, .relations = 3, .facts = 120,
                                         .max_time = 20, .seed = 7});
    for (RelationId r = 0; r < store.num_relations(); ++r) {
        CHECK(store.inverse(store.inverse(r)) == r);
        for (const Edge& e : store.edges_with_relation(r)) {
            CHECK(store.contains(store.inverse_of(e)));
            CHECK(store.inverse_of(store.inverse_of(e)) == e);
        }
    }
}

TEST_CASE("window_subgraph exposes the half-open interval") {
    const TkgStore store = store_from_facts(
        {{0, 0, 1, 0}, {1, 0, 2, 1}, {2, 0, 3, 2}, {3, 0, 4, 3}}, 5, 1);

    const auto times_in = [&](const SubgraphView& view) {
        std::multiset<Timestamp> times;
        for (EntityId e = 0; e < store.num_entities(); ++e) {
            for (const Edge& edge : view.out_edges(e)) times.insert(edge.timestamp);
        }
        return times;
    };

    CHECK(times_in(window_subgraph(store, 3, 2)) == std::multiset<Timestamp>{1, 1, 2, 2});
    CHECK(times_in(window_subgraph(store, 3, kInfiniteWindow)) ==
          std::multiset<Timestamp>{0, 0, 1, 1, 2, 2});
    CHECK(times_in(window_subgraph(store, 0, 5)).empty());
}

TEST_CASE("window_subgraph counts match a brute-force scan") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const TkgStore store = random_store({.entities = 30, .relations = 4, .facts = 400,
                                             .max_time = 40, .seed = seed});
        for (const Timestamp q : {Timestamp{0}, Timestamp{7}, Timestamp{40}, Timestamp{41}}) {
            for (const Timestamp w : {Timestamp{1}, Timestamp{13}, kInfiniteWindow}) {
                const SubgraphView view = window_subgraph(store, q, w);
                std::size_t brute = 0;
                for (RelationId r = 0; r < store.num_relations(); ++r) {
                    for (const Edge& e : store.edges_with_relation(r)) {
                        if (e.timestamp >= view.lo() && e.timestamp < view.hi()) ++brute;
                    }
                }
                CHECK(count_view_edges(view, store) == brute);
            }
        }
    }
}

TEST_CASE("civil date arithmetic round-trips across leap years") {
    // 2005-01-01 .. 2015-12-31 covers three leap years
    const std::int64_t start = TimestampCodec::days_from_civil(2005, 1, 1);
    const std::int64_t end = TimestampCodec::days_from_civil(2015, 12, 31);
    CHECK(end - start + 1 == 4017);
    for (std::int64_t day = start; day <= end; ++day) {
        std::int64_t y;
        unsigned m, d;
        TimestampCodec::civil_from_days(day, y, m, d);
        CHECK(TimestampCodec::days_from_civil(y, m, d) == day);
    }
    CHECK(TimestampCodec::days_from_civil(2014, 8, 9) -
              TimestampCodec::days_from_civil(2014, 7, 22) ==
          18);

    const TimestampCodec codec(TimestampCodec::Kind::kDays,
                               TimestampCodec::days_from_civil(2012, 2, 28));
    CHECK(codec.encode("2012-02-29") == Timestamp{1});  // leap day exists
    CHECK_FALSE(codec.encode("2013-02-29").has_value());
    CHECK_FALSE(codec.encode("2012-13-01").has_value());
    CHECK_FALSE(codec.encode("2012-02-01x").has_value());
    CHECK(codec.label(1) == "2012-02-29");
}

TEST_CASE("edges_from honors strict and non-strict bounds") {
    // node 0 with outgoing timestamps {2, 5, 5, 9}
    const TkgStore store = store_from_facts(
        {{0, 0, 1, 2}, {0, 0, 2, 5}, {0, 1, 3, 5}, {0, 0, 4, 9}}, 5, 2);

    const auto strict = store.edges_from(0, std::nullopt, 5, true);
    REQUIRE(strict.size() == 1);
    CHECK(strict[0].timestamp == 2);

    const auto non_strict = store.edges_from(0, std::nullopt, 5, false);
    CHECK(non_strict.size() == 3);
    for (std::size_t i = 1; i < non_strict.size(); ++i) {
        CHECK(non_strict[i - 1].timestamp <= non_strict[i].timestamp);
    }

    // relation filter that excludes everything
    CHECK(store.edges_from(1, RelationId{1}, 9, false).empty());

    // non-strict at the max timestamp returns the full adjacency list
    CHECK(store.edges_from(0, std::nullopt, store.max_timestamp(), false).size() ==
          store.out_edges(0).size());

    // the view variant intersects the window with the bound
    const SubgraphView view(store, 3, 9);
    const auto in_view = view.edges_from(0, std::nullopt, 9, false);
    REQUIRE(in_view.size() == 2);  // t = 5, 5; t = 2 below lo, t = 9 at hi
    CHECK(in_view[0].timestamp == 5);
    CHECK(view.edges_from(0, RelationId{0}, 4, false).empty());
}
