#pragma once

// Run configuration shared by the CLI workflows. A config is a flat JSON
// document; command-line flags override individual fields.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "chronorule/ranking.hpp"
#include "chronorule/walk_sampler.hpp"

namespace chronorule {

struct RunConfig {
    std::string train_path;
    std::string valid_path;
    std::string test_path;
    std::string rules_path;
    std::string output_prefix = "eval";
    char separator = '\t';

    // learning
    std::uint32_t num_walks = 200;
    std::vector<std::size_t> rule_lengths = {1, 2, 3};
    TransitionDistribution transition = TransitionDistribution::kExponential;
    std::uint32_t body_samples = 500;
    bool exhaustive_confidence = false;
    std::uint64_t seed = 12;

    // application / evaluation
    double min_confidence = 0.01;
    std::uint64_t min_body_support = 2;
    std::optional<Timestamp> window;  // unset: per-dataset default
    std::uint32_t min_candidates = 20;
    double score_weight = 0.5;
    double decay = 0.1;
    std::optional<std::uint32_t> max_partial_walks;
    TiePolicy tie_policy = TiePolicy::kAverage;
    bool explanations = false;
    bool strict_train_only = false;
    std::string split = "test";

    std::optional<unsigned> workers;  // unset: env var, then hardware count
};

// Throws ConfigError on out-of-range values.
void validate(const RunConfig& config);

RunConfig config_from_json(const std::string& text);

// Canonical echo with every field resolved; feeding it back reproduces the run.
std::string config_to_json(const RunConfig& config);

// Explicit window if set; otherwise a default inferred from the train path
// name (200 for ICEWS18, 1000 for ICEWS0515, unbounded otherwise).
Timestamp resolve_window(const RunConfig& config);

// Priority: explicit field, CHRONORULE_WORKERS, hardware concurrency.
unsigned resolve_workers(const RunConfig& config);

std::string to_string(TransitionDistribution dist);
std::string to_string(TiePolicy policy);
TransitionDistribution transition_from_string(const std::string& name);
TiePolicy tie_policy_from_string(const std::string& name);

}  // namespace chronorule
