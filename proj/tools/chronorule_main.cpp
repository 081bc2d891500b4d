// Command-line driver: learn / eval / apply / stats workflows over
// tab-separated quadruple files.

#include <algorithm>
#include <fstream>
#include <iostream>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "chronorule/config.hpp"
#include "chronorule/dataset.hpp"
#include "chronorule/ranking.hpp"
#include "chronorule/rule_engine.hpp"

namespace {

using namespace chronorule;

std::string read_text_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    out << text;
    if (!out) throw IoError("failed writing " + path);
}

std::size_t unique_fact_count(std::vector<Edge> facts) {
    auto less = [](const Edge& a, const Edge& b) {
        return std::tie(a.subject, a.relation, a.object, a.timestamp) <
               std::tie(b.subject, b.relation, b.object, b.timestamp);
    };
    std::sort(facts.begin(), facts.end(), less);
    facts.erase(std::unique(facts.begin(), facts.end()), facts.end());
    return facts.size();
}

std::vector<RelationId> all_relation_ids(const TkgStore& store) {
    std::vector<RelationId> ids(store.num_relations());
    std::iota(ids.begin(), ids.end(), 0u);
    return ids;
}

RuleSet load_rule_file(const std::string& path, const Vocabulary& vocab,
                       DeserializeReport& report) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open rule file " + path);
    RuleSet rules = deserialize_rules(in, vocab, &report);
    for (std::size_t i = 0; i < report.warnings.size() && i < 5; ++i) {
        std::cerr << "warning: " << report.warnings[i] << '\n';
    }
    if (report.skipped > 0) {
        std::cerr << "warning: " << report.skipped << " rule(s) skipped, " << report.loaded
                  << " loaded\n";
    }
    return rules;
}

int cmd_stats(const RunConfig& config) {
    const Dataset dataset =
        load_dataset({config.train_path, config.valid_path, config.test_path}, config.separator);
    std::cout << "G_train      " << unique_fact_count(dataset.train) << '\n'
              << "G_valid      " << unique_fact_count(dataset.valid) << '\n'
              << "G_test       " << unique_fact_count(dataset.test) << '\n'
              << "entities     " << dataset.vocab->entities.size() << '\n'
              << "relations    " << dataset.vocab->relations.size() << '\n'
              << "timestamps   " << dataset.distinct_timestamps << '\n';
    return 0;
}

int cmd_learn(RunConfig config) {
    if (config.rules_path.empty()) config.rules_path = "rules.tsv";
    validate(config);
    if (config.train_path.empty()) throw ConfigError("learn requires --train");

    const Dataset dataset = load_dataset({config.train_path, "", ""}, config.separator);
    const TkgStore store = dataset.build_train_store();

    LearnConfig learn;
    learn.lengths = config.rule_lengths;
    learn.walks_per_relation = config.num_walks;
    learn.transition = config.transition;
    learn.body_samples = config.body_samples;
    learn.confidence_mode =
        config.exhaustive_confidence ? ConfidenceMode::kExhaustive : ConfidenceMode::kSampled;
    learn.seed = config.seed;
    learn.workers = resolve_workers(config);

    const std::string config_echo = config_to_json(config);
    std::cout << "config: " << config_echo << '\n';

    LearnStats stats;
    const auto relations = all_relation_ids(store);
    const RuleSet rules = learn_rules(store, relations, learn, &stats);

    {
        std::ofstream out(config.rules_path);
        if (!out) throw IoError("cannot write " + config.rules_path);
        serialize_rules(rules, *dataset.vocab, out);
        if (!out) throw IoError("failed writing " + config.rules_path);
    }

    const std::string log_path = config.rules_path + ".log";
    {
        std::ofstream log(log_path);
        if (!log) throw IoError("cannot write " + log_path);
        log << "config: " << config_echo << '\n';
        log << "relation\tattempts\tsuccessful_walks\trules\tname\n";
        for (const RelationLearnStats& r : stats.per_relation) {
            log << r.relation << '\t' << r.attempts << '\t' << r.successful_walks << '\t'
                << r.rules << '\t' << dataset.vocab->relation_name(r.relation) << '\n';
        }
    }

    std::cout << "learned " << rules.size() << " rules";
    const char* sep = " (";
    for (const auto& [length, count] : stats.rules_per_length) {
        std::cout << sep << "length " << length << ": " << count;
        sep = ", ";
    }
    std::cout << ")\n";
    const double success_rate =
        stats.total_attempts
            ? 100.0 * static_cast<double>(stats.total_successes) /
                  static_cast<double>(stats.total_attempts)
            : 0.0;
    char buf[128];
    std::snprintf(buf, sizeof(buf), "walk attempts %llu, successful %llu (%.1f%%)\n",
                  static_cast<unsigned long long>(stats.total_attempts),
                  static_cast<unsigned long long>(stats.total_successes), success_rate);
    std::cout << buf;
    std::snprintf(buf, sizeof(buf), "wall seconds %.1f\n", stats.wall_seconds);
    std::cout << buf;
    std::cout << "rules written to " << config.rules_path << '\n'
              << "log written to " << log_path << '\n';
    return 0;
}

int cmd_eval(const RunConfig& config) {
    validate(config);
    if (config.train_path.empty()) throw ConfigError("eval requires --train");
    if (config.rules_path.empty()) throw ConfigError("eval requires --rules");
    const bool use_valid = config.split == "valid";
    if (use_valid && config.valid_path.empty()) throw ConfigError("eval on valid requires --valid");
    if (!use_valid && config.test_path.empty()) throw ConfigError("eval on test requires --test");

    const Dataset dataset =
        load_dataset({config.train_path, config.valid_path, config.test_path}, config.separator);

    DeserializeReport rule_report;
    const RuleSet all_rules = load_rule_file(config.rules_path, *dataset.vocab, rule_report);
    const RuleSet rules =
        filter_rules(all_rules, config.min_confidence, config.min_body_support);

    const TkgStore train_store = dataset.build_train_store();
    const TkgStore app_store = config.strict_train_only
                                   ? dataset.build_store(false, false)
                                   : dataset.build_store(true, true);
    const KnownFacts known = build_known_facts(dataset);

    EvalConfig eval_config;
    eval_config.window = resolve_window(config);
    eval_config.apply.min_candidates = config.min_candidates;
    eval_config.apply.score_weight = config.score_weight;
    eval_config.apply.decay = config.decay;
    eval_config.apply.max_partial_walks = config.max_partial_walks;
    eval_config.apply.collect_explanations = config.explanations;
    eval_config.tie_policy = config.tie_policy;
    eval_config.workers = resolve_workers(config);

    const std::string config_echo = config_to_json(config);
    std::cout << "config: " << config_echo << '\n';
    std::cout << "applying " << rules.size() << " rules (of " << all_rules.size()
              << " loaded) to the " << config.split << " split\n";

    const auto& facts = use_valid ? dataset.valid : dataset.test;
    const EvalReport report =
        evaluate(app_store, train_store, rules, facts, known, eval_config);

    report.write_table(std::cout);

    std::ostringstream table;
    table << "config: " << config_echo << '\n';
    table << "rules loaded: " << rule_report.loaded << ", skipped: " << rule_report.skipped
          << ", applied after filtering: " << rules.size() << '\n';
    report.write_table(table);
    write_text_file(config.output_prefix + ".metrics.txt", table.str());

    std::ostringstream csv;
    report.write_csv(csv);
    write_text_file(config.output_prefix + ".ranks.csv", csv.str());

    if (config.explanations) {
        std::ostringstream expl;
        for (const QueryRecord& record : report.records) expl << record.explanation;
        write_text_file(config.output_prefix + ".explanations.txt", expl.str());
    }

    std::cout << "metrics written to " << config.output_prefix << ".metrics.txt\n"
              << "per-query ranks written to " << config.output_prefix << ".ranks.csv\n";
    return 0;
}

int cmd_apply(const RunConfig& config, const std::string& subject_name,
              const std::string& relation_name, const std::string& time_text,
              std::size_t top_n) {
    validate(config);
    if (config.train_path.empty()) throw ConfigError("apply requires --train");
    if (config.rules_path.empty()) throw ConfigError("apply requires --rules");

    const Dataset dataset =
        load_dataset({config.train_path, config.valid_path, config.test_path}, config.separator);
    const Vocabulary& vocab = *dataset.vocab;

    DeserializeReport rule_report;
    const RuleSet all_rules = load_rule_file(config.rules_path, vocab, rule_report);
    const RuleSet rules =
        filter_rules(all_rules, config.min_confidence, config.min_body_support);

    const TkgStore app_store = config.strict_train_only
                                   ? dataset.build_store(false, false)
                                   : dataset.build_store(true, true);
    const TkgStore train_store = dataset.build_train_store();

    Query query;
    const auto subject = vocab.entities.find(subject_name);
    if (!subject) throw Error("unknown entity '" + subject_name + "'");
    const auto relation = vocab.find_relation(relation_name);
    if (!relation) throw UnknownRelationError("unknown relation '" + relation_name + "'");
    const auto query_time = vocab.time.encode(time_text);
    if (!query_time) {
        throw UnparsableTimestampError("cannot parse query time '" + time_text + "'");
    }
    query.subject = *subject;
    query.relation = *relation;
    query.query_time = *query_time;

    ApplyConfig apply;
    apply.min_candidates = config.min_candidates;
    apply.score_weight = config.score_weight;
    apply.decay = config.decay;
    apply.max_partial_walks = config.max_partial_walks;
    apply.collect_explanations = true;

    const SubgraphView view =
        window_subgraph(app_store, query.query_time, resolve_window(config));
    const auto rule_group = rules.rules_for(query.relation);
    const ScoredCandidates scored = apply_rules(view, rule_group, query, apply);
    const RankedAnswer ranked = scored.empty() ? baseline_distribution(train_store, query.relation)
                                               : aggregate_candidates(scored);

    std::cout << "query: (" << subject_name << ", " << relation_name << ", ?, " << time_text
              << ")\n";
    if (ranked.provenance == Provenance::kBaseline) {
        std::cout << (rule_group.empty() ? "no rules for the query relation"
                                         : "no body groundings in the window")
                  << "; falling back to the object distribution baseline\n";
    }
    char buf[64];
    for (std::size_t i = 0; i < ranked.candidates.size() && i < top_n; ++i) {
        std::snprintf(buf, sizeof(buf), "%2zu. %.6f  ", i + 1, ranked.candidates[i].score);
        std::cout << buf << vocab.entity_name(ranked.candidates[i].entity) << '\n';
    }
    if (!ranked.candidates.empty() && ranked.provenance == Provenance::kRules) {
        std::cout << render_explanation(query, ranked, scored, rule_group, vocab);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Temporal rule mining and link forecasting over timestamped "
                 "knowledge graphs"};
    app.require_subcommand(1);

    // --config is read first so that explicit flags win over the file.
    RunConfig config;
    try {
        for (int i = 1; i < argc; ++i) {
            const std::string_view arg = argv[i];
            if (arg == "--config" && i + 1 < argc) {
                config = config_from_json(read_text_file(argv[i + 1]));
            } else if (arg.rfind("--config=", 0) == 0) {
                config = config_from_json(read_text_file(std::string(arg.substr(9))));
            }
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }

    std::string config_path;
    std::string transition = to_string(config.transition);
    std::string tie_policy = to_string(config.tie_policy);
    std::string window_text;
    std::string separator_text;
    long long max_partial_walks = config.max_partial_walks
                                      ? static_cast<long long>(*config.max_partial_walks)
                                      : -1;
    unsigned workers = 0;

    const auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "JSON config file (flags override it)");
        cmd->add_option("--train", config.train_path, "training split file");
        cmd->add_option("--valid", config.valid_path, "validation split file");
        cmd->add_option("--test", config.test_path, "test split file");
        cmd->add_option("--separator", separator_text, "field separator ('tab' or one char)");
        cmd->add_option("--workers", workers, "worker thread count");
    };
    const auto add_apply_options = [&](CLI::App* cmd) {
        cmd->add_option("--rules", config.rules_path, "rule file");
        cmd->add_option("--min-conf", config.min_confidence, "minimum rule confidence");
        cmd->add_option("--min-body-support", config.min_body_support,
                        "minimum rule body support");
        cmd->add_option("--window,-w", window_text, "time window size or 'inf'");
        cmd->add_option("--min-candidates,-k", config.min_candidates,
                        "stop after this many distinct candidates");
        cmd->add_option("--score-weight,-a", config.score_weight,
                        "confidence weight in the score function");
        cmd->add_option("--decay", config.decay, "time-difference decay rate");
        cmd->add_option("--max-partial-walks,-K", max_partial_walks,
                        "cap on partial walks per join stage (-1 = unlimited)");
        cmd->add_flag("--strict-train-only", config.strict_train_only,
                      "apply rules over training facts only");
    };

    auto* stats = app.add_subcommand("stats", "dataset statistics");
    add_common(stats);

    auto* learn = app.add_subcommand("learn", "mine temporal rules from the training split");
    add_common(learn);
    learn->add_option("--rules,-o", config.rules_path, "output rule file");
    learn->add_option("--num-walks,-n", config.num_walks, "walk attempts per relation and length");
    learn->add_option("--lengths", config.rule_lengths, "rule lengths to mine")
        ->delimiter(',');
    learn->add_option("--transition", transition, "transition distribution (uniform|exponential)");
    learn->add_option("--body-samples,-b", config.body_samples,
                      "body groundings sampled per rule");
    learn->add_flag("--exhaustive-confidence", config.exhaustive_confidence,
                    "enumerate all body groundings instead of sampling");
    learn->add_option("--seed", config.seed, "random seed");

    auto* eval = app.add_subcommand("eval", "rank queries of one split and report metrics");
    add_common(eval);
    add_apply_options(eval);
    eval->add_option("--split", config.split, "split to evaluate (valid|test)");
    eval->add_option("--tie-policy", tie_policy, "rank tie policy (best|average|worst)");
    eval->add_option("--output-prefix", config.output_prefix, "prefix for report files");
    eval->add_flag("--explanations", config.explanations,
                   "write per-query explanation walks");

    auto* apply = app.add_subcommand("apply", "answer one ad-hoc query with explanations");
    add_common(apply);
    add_apply_options(apply);
    std::string subject_name, relation_name, time_text;
    std::size_t top_n = 10;
    apply->add_option("--subject", subject_name, "query subject entity name")->required();
    apply->add_option("--relation", relation_name,
                      "query relation name (inverse names end with ^-1)")
        ->required();
    apply->add_option("--time", time_text, "query timestamp (same format as the dataset)")
        ->required();
    apply->add_option("--top", top_n, "number of candidates to print");

    CLI11_PARSE(app, argc, argv);

    try {
        if (!separator_text.empty()) {
            if (separator_text == "tab" || separator_text == "\\t") {
                config.separator = '\t';
            } else if (separator_text.size() == 1) {
                config.separator = separator_text[0];
            } else {
                throw ConfigError("separator must be one character or 'tab'");
            }
        }
        if (!window_text.empty()) {
            if (window_text == "inf" || window_text == "infinite") {
                config.window = kInfiniteWindow;
            } else {
                config.window = static_cast<Timestamp>(std::stoul(window_text));
            }
        }
        config.transition = transition_from_string(transition);
        config.tie_policy = tie_policy_from_string(tie_policy);
        if (max_partial_walks >= 0) {
            config.max_partial_walks = static_cast<std::uint32_t>(max_partial_walks);
        }
        if (workers > 0) config.workers = workers;

        if (stats->parsed()) return cmd_stats(config);
        if (learn->parsed()) return cmd_learn(config);
        if (eval->parsed()) return cmd_eval(config);
        if (apply->parsed()) return cmd_apply(config, subject_name, relation_name, time_text,
                                              top_n);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
