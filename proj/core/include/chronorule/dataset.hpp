#pragma once

// Multi-split dataset loading. All provided splits share one vocabulary and
// one timestamp normalization so that ids and offsets are comparable across
// train/valid/test.

#include <cstddef>
#include <memory>
#include <string>
#include <vector>

#include "chronorule/tkg_store.hpp"

namespace chronorule {

struct SplitFiles {
    std::string train;  // empty string = not provided
    std::string valid;
    std::string test;
};

struct Dataset {
    std::shared_ptr<const Vocabulary> vocab;
    std::vector<Edge> train;  // base facts in file order
    std::vector<Edge> valid;
    std::vector<Edge> test;
    std::size_t distinct_timestamps = 0;  // across all loaded splits

    TkgStore build_train_store() const { return TkgStore(vocab, train); }

    // Concatenation of the selected splits in one store.
    TkgStore build_store(bool include_valid, bool include_test) const;
};

// Loads the provided split files (at least one must be non-empty). Throws
// IoError, MalformedLineError, UnparsableTimestampError, EmptyDatasetError.
Dataset load_dataset(const SplitFiles& files, char separator = '\t');

std::vector<RawQuadruple> read_quadruple_file(const std::string& path, char separator);

}  // namespace chronorule
