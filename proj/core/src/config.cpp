#include "chronorule/config.hpp"

#include <algorithm>
#include <cstdlib>
#include <thread>

#include <json.hpp>

#include "chronorule/errors.hpp"

namespace chronorule {

namespace {

using nlohmann::json;

std::string lowercase(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

}  // namespace

TransitionDistribution transition_from_string(const std::string& name) {
    const std::string s = lowercase(name);
    if (s == "uniform" || s == "unif") return TransitionDistribution::kUniform;
    if (s == "exponential" || s == "exp") return TransitionDistribution::kExponential;
    throw ConfigError("unknown transition distribution '" + name + "'");
}

TiePolicy tie_policy_from_string(const std::string& name) {
    const std::string s = lowercase(name);
    if (s == "best") return TiePolicy::kBest;
    if (s == "average") return TiePolicy::kAverage;
    if (s == "worst") return TiePolicy::kWorst;
    throw ConfigError("unknown tie policy '" + name + "'");
}

std::string to_string(TransitionDistribution dist) {
    return dist == TransitionDistribution::kUniform ? "uniform" : "exponential";
}

std::string to_string(TiePolicy policy) {
    switch (policy) {
        case TiePolicy::kBest:
            return "best";
        case TiePolicy::kAverage:
            return "average";
        case TiePolicy::kWorst:
            return "worst";
    }
    return "average";
}

void validate(const RunConfig& config) {
    if (config.num_walks < 1) throw ConfigError("num_walks must be >= 1");
    if (config.rule_lengths.empty()) throw ConfigError("rule_lengths must not be empty");
    for (const std::size_t l : config.rule_lengths) {
        if (l < 1 || l > 100) throw ConfigError("rule lengths must be in [1, 100]");
    }
    if (config.body_samples < 1) throw ConfigError("body_samples must be >= 1");
    if (config.min_confidence < 0.0 || config.min_confidence > 1.0) {
        throw ConfigError("min_confidence must be in [0, 1]");
    }
    if (config.window && *config.window < 1) throw ConfigError("window must be >= 1");
    if (config.min_candidates < 1) throw ConfigError("min_candidates must be >= 1");
    if (config.score_weight < 0.0 || config.score_weight > 1.0) {
        throw ConfigError("score_weight must be in [0, 1]");
    }
    if (config.decay <= 0.0) throw ConfigError("decay must be > 0");
    if (config.max_partial_walks && *config.max_partial_walks < 1) {
        throw ConfigError("max_partial_walks must be >= 1");
    }
    if (config.workers && *config.workers < 1) throw ConfigError("workers must be >= 1");
    if (config.split != "valid" && config.split != "test") {
        throw ConfigError("split must be 'valid' or 'test'");
    }
}

RunConfig config_from_json(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw ConfigError("config must be a JSON object");

    RunConfig config;
    for (const auto& [key, value] : doc.items()) {
        try {
            if (key == "train") {
                config.train_path = value.get<std::string>();
            } else if (key == "valid") {
                config.valid_path = value.get<std::string>();
            } else if (key == "test") {
                config.test_path = value.get<std::string>();
            } else if (key == "rules") {
                config.rules_path = value.get<std::string>();
            } else if (key == "output_prefix") {
                config.output_prefix = value.get<std::string>();
            } else if (key == "separator") {
                const auto s = value.get<std::string>();
                if (s == "tab" || s == "\\t") {
                    config.separator = '\t';
                } else if (s.size() == 1) {
                    config.separator = s[0];
                } else {
                    throw ConfigError("separator must be one character or \"tab\"");
                }
            } else if (key == "num_walks") {
                config.num_walks = value.get<std::uint32_t>();
            } else if (key == "rule_lengths") {
                config.rule_lengths = value.get<std::vector<std::size_t>>();
            } else if (key == "transition") {
                config.transition = transition_from_string(value.get<std::string>());
            } else if (key == "body_samples") {
                config.body_samples = value.get<std::uint32_t>();
            } else if (key == "exhaustive_confidence") {
                config.exhaustive_confidence = value.get<bool>();
            } else if (key == "seed") {
                config.seed = value.get<std::uint64_t>();
            } else if (key == "min_confidence") {
                config.min_confidence = value.get<double>();
            } else if (key == "min_body_support") {
                config.min_body_support = value.get<std::uint64_t>();
            } else if (key == "window") {
                if (value.is_string()) {
                    const auto s = lowercase(value.get<std::string>());
                    if (s != "inf" && s != "infinite") {
                        throw ConfigError("window must be an integer or \"inf\"");
                    }
                    config.window = kInfiniteWindow;
                } else {
                    config.window = value.get<Timestamp>();
                }
            } else if (key == "min_candidates") {
                config.min_candidates = value.get<std::uint32_t>();
            } else if (key == "score_weight") {
                config.score_weight = value.get<double>();
            } else if (key == "decay") {
                config.decay = value.get<double>();
            } else if (key == "max_partial_walks") {
                if (!value.is_null()) config.max_partial_walks = value.get<std::uint32_t>();
            } else if (key == "tie_policy") {
                config.tie_policy = tie_policy_from_string(value.get<std::string>());
            } else if (key == "explanations") {
                config.explanations = value.get<bool>();
            } else if (key == "strict_train_only") {
                config.strict_train_only = value.get<bool>();
            } else if (key == "split") {
                config.split = value.get<std::string>();
            } else if (key == "workers") {
                config.workers = value.get<unsigned>();
            } else {
                throw ConfigError("unknown config key '" + key + "'");
            }
        } catch (const json::exception& e) {
            throw ConfigError("bad value for config key '" + key + "': " + e.what());
        }
    }
    return config;
}

std::string config_to_json(const RunConfig& config) {
    json doc;
    doc["train"] = config.train_path;
    doc["valid"] = config.valid_path;
    doc["test"] = config.test_path;
    doc["rules"] = config.rules_path;
    doc["output_prefix"] = config.output_prefix;
    doc["separator"] = config.separator == '\t' ? "tab" : std::string(1, config.separator);
    doc["num_walks"] = config.num_walks;
    doc["rule_lengths"] = config.rule_lengths;
    doc["transition"] = to_string(config.transition);
    doc["body_samples"] = config.body_samples;
    doc["exhaustive_confidence"] = config.exhaustive_confidence;
    doc["seed"] = config.seed;
    doc["min_confidence"] = config.min_confidence;
    doc["min_body_support"] = config.min_body_support;
    const Timestamp window = resolve_window(config);
    if (window == kInfiniteWindow) {
        doc["window"] = "inf";
    } else {
        doc["window"] = window;
    }
    doc["min_candidates"] = config.min_candidates;
    doc["score_weight"] = config.score_weight;
    doc["decay"] = config.decay;
    if (config.max_partial_walks) {
        doc["max_partial_walks"] = *config.max_partial_walks;
    } else {
        doc["max_partial_walks"] = nullptr;
    }
    doc["tie_policy"] = to_string(config.tie_policy);
    doc["explanations"] = config.explanations;
    doc["strict_train_only"] = config.strict_train_only;
    doc["split"] = config.split;
    doc["workers"] = resolve_workers(config);
    return doc.dump();
}

Timestamp resolve_window(const RunConfig& config) {
    if (config.window) return *config.window;
    const std::string path = lowercase(config.train_path);
    if (path.find("icews18") != std::string::npos) return 200;
    if (path.find("icews0515") != std::string::npos) return 1000;
    return kInfiniteWindow;
}

unsigned resolve_workers(const RunConfig& config) {
    if (config.workers) return std::max(1u, *config.workers);
    if (const char* env = std::getenv("CHRONORULE_WORKERS")) {
        const long value = std::strtol(env, nullptr, 10);
        if (value >= 1) return static_cast<unsigned>(value);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw ? hw : 1;
}

}  // namespace chronorule
