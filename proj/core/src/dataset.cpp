#include "chronorule/dataset.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <unordered_set>

namespace chronorule {

namespace {

struct FileQuads {
    const std::string* path = nullptr;
    std::vector<RawQuadruple> quads;
    std::vector<std::size_t> lines;  // 1-based source line of each quadruple
};

FileQuads read_file(const std::string& path, char separator) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    FileQuads out;
    out.path = &path;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        try {
            out.quads.push_back(parse_quadruple(line, separator));
        } catch (const MalformedLineError& e) {
            throw MalformedLineError(path + ":" + std::to_string(line_no) + ": " + e.what());
        }
        out.lines.push_back(line_no);
    }
    if (out.quads.empty()) throw EmptyDatasetError(path + " contains no facts");
    return out;
}

}  // namespace

std::vector<RawQuadruple> read_quadruple_file(const std::string& path, char separator) {
    return read_file(path, separator).quads;
}

Dataset load_dataset(const SplitFiles& files, char separator) {
    std::vector<FileQuads> splits;  // train, valid, test order; absent splits stay empty
    const std::string* paths[3] = {&files.train, &files.valid, &files.test};
    for (const std::string* path : paths) {
        if (path->empty()) {
            splits.emplace_back();
        } else {
            splits.push_back(read_file(*path, separator));
        }
    }
    if (splits[0].quads.empty() && splits[1].quads.empty() && splits[2].quads.empty()) {
        throw EmptyDatasetError("no dataset files given");
    }

    // One timestamp mode for the whole dataset, fixed by the first fact.
    std::optional<TimestampCodec::Kind> kind;
    std::int64_t min_value = std::numeric_limits<std::int64_t>::max();
    for (const FileQuads& split : splits) {
        for (std::size_t i = 0; i < split.quads.size(); ++i) {
            const std::string& raw = split.quads[i].timestamp;
            if (!kind) {
                kind = TimestampCodec::classify(raw);
                if (!kind) {
                    throw UnparsableTimestampError(*split.path + ":" +
                                                   std::to_string(split.lines[i]) +
                                                   ": unparsable timestamp '" + raw + "'");
                }
            }
            const auto value = TimestampCodec::parse_raw(raw, *kind);
            if (!value) {
                throw UnparsableTimestampError(*split.path + ":" + std::to_string(split.lines[i]) +
                                               ": timestamp '" + raw + "' does not match the " +
                                               "dataset's timestamp format");
            }
            min_value = std::min(min_value, *value);
        }
    }

    auto vocab = std::make_shared<Vocabulary>();
    vocab->time = TimestampCodec(*kind, min_value);

    Dataset dataset;
    std::vector<Edge>* targets[3] = {&dataset.train, &dataset.valid, &dataset.test};
    std::unordered_set<Timestamp> distinct;
    for (int s = 0; s < 3; ++s) {
        targets[s]->reserve(splits[s].quads.size());
        for (std::size_t i = 0; i < splits[s].quads.size(); ++i) {
            const RawQuadruple& quad = splits[s].quads[i];
            if (quad.relation.size() > kInverseMarker.size() &&
                std::string_view(quad.relation).ends_with(kInverseMarker)) {
                throw MalformedLineError(*splits[s].path + ":" + std::to_string(splits[s].lines[i]) +
                                         ": relation name '" + quad.relation +
                                         "' ends with the reserved inverse suffix");
            }
            Edge fact;
            fact.subject = vocab->entities.intern(quad.subject);
            fact.relation = vocab->relations.intern(quad.relation);
            fact.object = vocab->entities.intern(quad.object);
            const auto t = vocab->time.encode(quad.timestamp);
            if (!t) {
                throw UnparsableTimestampError(*splits[s].path + ":" +
                                               std::to_string(splits[s].lines[i]) +
                                               ": timestamp '" + quad.timestamp +
                                               "' out of range");
            }
            fact.timestamp = *t;
            distinct.insert(fact.timestamp);
            targets[s]->push_back(fact);
        }
    }
    dataset.distinct_timestamps = distinct.size();
    dataset.vocab = std::move(vocab);
    return dataset;
}

TkgStore Dataset::build_store(bool include_valid, bool include_test) const {
    std::vector<Edge> facts = train;
    if (include_valid) facts.insert(facts.end(), valid.begin(), valid.end());
    if (include_test) facts.insert(facts.end(), test.begin(), test.end());
    return TkgStore(vocab, std::move(facts));
}

}  // namespace chronorule
