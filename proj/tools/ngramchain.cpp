// ngramchain CLI: extract -> score -> stats -> generate -> rank, plus a bench
// sweep over criteria and lambda grids. Exit codes: 0 success, 2 input or
// configuration error, 3 resource-limit stop (partial output retained).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ngramchain/corpus.hpp"
#include "ngramchain/filter.hpp"
#include "ngramchain/ranking.hpp"
#include "ngramchain/scoring.hpp"
#include "ngramchain/search.hpp"
#include "ngramchain/stats.hpp"
#include "ngramchain/synthetic.hpp"
#include "ngramchain/table.hpp"
#include "ngramchain/util.hpp"

namespace {

using namespace ngramchain;

constexpr int kOk = 0;
constexpr int kInputError = 2;
constexpr int kLimitStop = 3;

struct LimitStop : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void save_to_path(const std::string& path, const std::string& content) {
    write_file(path, content);
}

// Flat key=value config layer: file entries become --key=value arguments
// unless the same flag was already given, so flags always win.
std::vector<std::string> apply_config_layer(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);

    std::string config_path;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config") {
            if (i + 1 >= args.size()) throw Error("--config needs a file path");
            config_path = args[i + 1];
            args.erase(args.begin() + static_cast<std::ptrdiff_t>(i), args.begin() + static_cast<std::ptrdiff_t>(i) + 2);
            break;
        }
        if (args[i].rfind("--config=", 0) == 0) {
            config_path = args[i].substr(9);
            args.erase(args.begin() + static_cast<std::ptrdiff_t>(i));
            break;
        }
    }
    if (config_path.empty()) return args;

    for (const auto& line : read_lines(config_path)) {
        if (line.empty() || line[0] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos || eq == 0)
            throw Error("config file: expected key=value, got '" + line + "'");
        const std::string flag = "--" + line.substr(0, eq);
        bool already_set = false;
        for (const auto& a : args)
            if (a == flag || a.rfind(flag + "=", 0) == 0) {
                already_set = true;
                break;
            }
        if (!already_set) args.push_back(flag + "=" + line.substr(eq + 1));
    }
    return args;
}

// ---------------------------------------------------------------- extract --

struct ExtractOptions {
    std::string corpus;
    int order = 2;
    std::string out;
};

void run_extract(const ExtractOptions& opt) {
    std::vector<std::vector<std::string>> sentences;
    for (const auto& line : read_lines(opt.corpus)) sentences.push_back(tokenize(line));

    auto result = extract_ngrams(sentences, opt.order);
    if (result.skipped_sentences > 0)
        std::cerr << "extract: skipped " << result.skipped_sentences
                  << " sentence(s) too short for order " << opt.order << "\n";
    if (result.ngrams.empty()) {
        std::cerr << "extract: corpus produced no n-grams\n";
        throw EmptyInput("no n-grams extracted");
    }

    std::ostringstream out;
    save_ngram_dump(out, result.ngrams, result.lexicon,
                    {"ngramchain extract corpus=" + opt.corpus +
                     " order=" + std::to_string(opt.order)});
    save_to_path(opt.out, out.str());
    std::cerr << "extract: " << result.ngrams.size() << " n-grams from " << result.window_count
              << " windows -> " << opt.out << "\n";
}

// ------------------------------------------------------------------ score --

struct ScoreOptions {
    std::string ngrams;
    std::string mode = "mle";
    std::string scores;
    std::optional<double> default_logprob;
    std::string out;
};

void run_score(const ScoreOptions& opt) {
    auto dump = load_ngram_dump(read_lines(opt.ngrams));

    std::vector<ScoredNgram> scored;
    std::string resolved;
    if (opt.mode == "mle") {
        scored = mle_score(dump.ngrams);
        resolved = "mode=mle";
    } else if (opt.mode == "external") {
        if (opt.scores.empty()) throw Error("--scores is required with --mode external");
        ScoreSource source{ScoreKind::kExternal, opt.default_logprob};
        ExternalScoreReport report;
        scored = load_external_scores(read_lines(opt.scores), dump.ngrams, dump.lexicon, source,
                                      &report);
        if (report.unknown_rows)
            std::cerr << "score: ignored " << report.unknown_rows << " unknown row(s)\n";
        if (report.defaulted)
            std::cerr << "score: defaulted " << report.defaulted << " n-gram(s)\n";
        resolved = "mode=external scores=" + opt.scores;
        if (opt.default_logprob)
            resolved += " default_logprob=" + format_double(*opt.default_logprob);
    } else {
        throw Error("unknown scoring mode: " + opt.mode);
    }

    std::ostringstream out;
    save_scored(out, scored, dump.lexicon, dump.order,
                {"ngramchain score ngrams=" + opt.ngrams + " " + resolved});
    save_to_path(opt.out, out.str());
    std::cerr << "score: " << scored.size() << " n-grams -> " << opt.out << "\n";
}

// ------------------------------------------------------------------ stats --

struct StatsOptions {
    std::string scored;
    bool exclude_boundary = false;
    std::string json_out;
    std::string qq_out;
};

void run_stats(const StatsOptions& opt) {
    auto table = NgramTable::build(load_scored(read_lines(opt.scored)));
    auto stats = table_stats(table, !opt.exclude_boundary);
    auto json = stats_to_json(stats);
    if (opt.json_out.empty()) {
        std::cout << json.dump(2) << "\n";
    } else {
        save_to_path(opt.json_out, json.dump(2) + "\n");
    }
    if (!opt.qq_out.empty()) {
        std::ostringstream qq;
        write_qq_csv(qq, qq_data(table));
        save_to_path(opt.qq_out, qq.str());
    }
}

// --------------------------------------------------------------- generate --

struct GenerateOptions {
    std::string scored;
    int length = 0;
    std::string criterion = "vanilla";
    std::string direction = "leq";
    std::optional<double> lambda;
    std::optional<double> instant_threshold;
    std::optional<double> final_threshold;
    std::optional<double> step_bound;
    std::optional<double> slack;
    std::optional<int> horizon;
    std::uint64_t limit_solutions = 0;
    std::uint64_t limit_nodes = 0;
    double limit_seconds = 0.0;
    int workers = 1;
    bool no_initial = false;
    bool no_final = false;
    std::string out;
};

struct ResolvedRun {
    FilterConfig config;
    double lambda_used = 0.0;
    std::string summary;  // solver-semantic settings for the file header
};

// Resolves thresholds from the table statistics: with --lambda, the per-step
// bound is mean - lambda * std, the instant threshold equals it, and the
// final threshold spreads it over the whole chain. Slack defaults to one
// standard deviation.
ResolvedRun resolve_run(const GenerateOptions& opt, const NgramTable& table) {
    if (opt.length < 1) throw Error("--length must be >= 1");
    if (opt.lambda && (*opt.lambda < 0.0 || *opt.lambda > 2.0))
        throw Error("--lambda must lie in [0, 2]");

    ResolvedRun run;
    run.config.criterion = criterion_from_string(opt.criterion);
    run.config.direction = direction_from_string(opt.direction);
    run.config.chain_length = opt.length;
    run.config.require_initial = !opt.no_initial;
    run.config.require_final = !opt.no_final;

    const auto stats = table_stats(table, true);
    const double from_lambda = opt.lambda ? stats.mean - *opt.lambda * stats.std_dev : 0.0;
    run.lambda_used = opt.lambda.value_or(0.0);

    switch (run.config.criterion) {
        case Criterion::kInstant:
            if (opt.instant_threshold) run.config.instant_threshold = *opt.instant_threshold;
            else if (opt.lambda) run.config.instant_threshold = from_lambda;
            else throw Error("instant criterion needs --instant-T or --lambda");
            break;
        case Criterion::kFinal:
            if (opt.final_threshold) run.config.final_threshold = *opt.final_threshold;
            else if (opt.lambda)
                run.config.final_threshold = static_cast<double>(opt.length) * from_lambda;
            else throw Error("final criterion needs --final-T or --lambda");
            break;
        case Criterion::kGliding:
        case Criterion::kGlidingLookahead:
            if (opt.step_bound) run.config.step_bound = {*opt.step_bound};
            else if (opt.lambda) run.config.step_bound = {from_lambda};
            else throw Error("gliding criteria need --lambda or --step-bound");
            break;
        case Criterion::kVanilla:
            break;
    }
    run.config.slack = opt.slack.value_or(stats.std_dev);
    run.config.horizon = opt.horizon.value_or(table.order() - 1);

    std::ostringstream s;
    s << "ngramchain generate scored=" << opt.scored << " length=" << opt.length
      << " criterion=" << opt.criterion << " direction=" << opt.direction;
    if (opt.lambda) s << " lambda=" << format_double(*opt.lambda);
    switch (run.config.criterion) {
        case Criterion::kInstant:
            s << " instant_T=" << format_double(run.config.instant_threshold);
            break;
        case Criterion::kFinal:
            s << " final_T=" << format_double(run.config.final_threshold);
            break;
        case Criterion::kGliding:
        case Criterion::kGlidingLookahead:
            s << " step_bound=" << format_double(run.config.step_bound.value)
              << " slack=" << format_double(run.config.slack);
            if (run.config.criterion == Criterion::kGlidingLookahead)
                s << " horizon=" << run.config.horizon;
            break;
        case Criterion::kVanilla:
            break;
    }
    if (opt.no_initial) s << " no_initial=1";
    if (opt.no_final) s << " no_final=1";
    run.summary = s.str();
    return run;
}

void run_generate(const GenerateOptions& opt) {
    auto table = NgramTable::build(load_scored(read_lines(opt.scored)));
    auto run = resolve_run(opt, table);

    SearchLimits limits;
    limits.max_solutions = opt.limit_solutions;
    limits.max_nodes = opt.limit_nodes;
    limits.max_seconds = opt.limit_seconds;

    auto result = enumerate(table, run.config, limits, opt.workers);

    std::ostringstream out;
    save_solutions(out, std::span<const Solution>(result.solutions), {run.summary});
    save_to_path(opt.out, out.str());

    auto meta = run_metadata(run.config, run.lambda_used, result);
    meta["workers"] = opt.workers;
    meta["scored"] = opt.scored;
    save_to_path(opt.out + ".meta.json", meta.dump(2) + "\n");

    std::cerr << "generate: " << result.solutions.size() << " solution(s), "
              << result.metrics.nodes << " nodes, " << format_double(result.metrics.seconds)
              << " s -> " << opt.out << "\n";
    if (result.partial())
        throw LimitStop("stopped early (" + std::string(to_string(result.stop)) +
                        "); partial results kept in " + opt.out);
}

// ------------------------------------------------------------------- rank --

struct RankOptions {
    std::string solutions;
    std::optional<double> cutoff;
    std::string sentence_scores;
    std::string out;
    std::string summary_out;
};

void run_rank(const RankOptions& opt) {
    auto rows = load_solutions(read_lines(opt.solutions));
    auto ranked = rank_solutions(rows);

    std::string resolved = "ngramchain rank solutions=" + opt.solutions;
    if (!opt.sentence_scores.empty()) {
        SentenceScoreReport report;
        load_sentence_scores(read_lines(opt.sentence_scores), ranked, &report);
        std::cerr << "rank: " << report.matched << " external, " << report.unmatched
                  << " pseudo";
        if (report.duplicates) std::cerr << ", " << report.duplicates << " duplicate row(s)";
        std::cerr << "\n";
        resolved += " sentence_scores=" + opt.sentence_scores;
    }
    if (opt.cutoff) {
        CutoffReport report;
        ranked = select_by_cutoff(ranked, *opt.cutoff, &report);
        std::cerr << "rank: cutoff " << format_double(*opt.cutoff) << " keeps " << report.kept
                  << "/" << report.total << "\n";
        resolved += " cutoff=" + format_double(*opt.cutoff);
    }

    std::ostringstream out;
    save_ranked(out, ranked, {resolved});
    if (opt.out.empty()) std::cout << out.str();
    else save_to_path(opt.out, out.str());

    if (!opt.summary_out.empty()) {
        if (ranked.empty()) throw EmptyInput("no solutions survive for the summary");
        save_to_path(opt.summary_out, stats_to_json(ppl_summary(ranked)).dump(2) + "\n");
    }
}

// ------------------------------------------------------------------ bench --

struct BenchOptions {
    std::string scored;
    std::uint64_t synthetic = 0;
    std::uint64_t seed = 1;
    int length = 0;
    std::string criteria = "vanilla,instant,gliding,gliding-lookahead";
    std::string lambdas = "1,1.25,1.5,1.75,2";
    int workers = 1;
    std::string out;
};

std::vector<std::string> split_list(const std::string& csv) {
    std::vector<std::string> out;
    for (auto part : split(csv, ','))
        if (!part.empty()) out.emplace_back(part);
    return out;
}

void run_bench(const BenchOptions& opt) {
    NgramTable table = [&] {
        if (!opt.scored.empty()) return NgramTable::build(load_scored(read_lines(opt.scored)));
        if (opt.synthetic == 0) throw Error("bench needs --scored or --synthetic");
        SyntheticSpec spec;
        spec.vocab = static_cast<std::uint32_t>(
            std::max(2.0, std::round(std::sqrt(static_cast<double>(opt.synthetic)))));
        spec.density = std::min(1.0, static_cast<double>(opt.synthetic) /
                                         (static_cast<double>(spec.vocab) * spec.vocab));
        spec.seed = opt.seed;
        return NgramTable::build(make_synthetic(spec));
    }();

    if (opt.length < 1) throw Error("--length must be >= 1");
    const auto stats = table_stats(table, true);

    std::ostringstream out;
    out << "# ngramchain bench length=" << opt.length << " criteria=" << opt.criteria
        << " lambdas=" << opt.lambdas;
    if (!opt.scored.empty()) out << " scored=" << opt.scored;
    else out << " synthetic=" << opt.synthetic << " seed=" << opt.seed;
    out << " mean=" << format_double(stats.mean) << " std=" << format_double(stats.std_dev)
        << "\n";
    out << "criterion,lambda,threshold,solutions,nodes,seconds,status\n";

    for (const auto& name : split_list(opt.criteria)) {
        const Criterion criterion = criterion_from_string(name);
        const bool uses_lambda = criterion != Criterion::kVanilla;
        const auto lambdas = uses_lambda ? split_list(opt.lambdas) : std::vector<std::string>{""};
        for (const auto& lambda_text : lambdas) {
            out << name << "," << lambda_text << ",";
            try {
                FilterConfig config;
                config.criterion = criterion;
                config.chain_length = opt.length;
                config.horizon = table.order() - 1;
                config.slack = stats.std_dev;
                double threshold = 0.0;
                if (uses_lambda) {
                    const double lambda = parse_double(lambda_text);
                    if (lambda < 0.0 || lambda > 2.0) throw Error("lambda outside [0, 2]");
                    const double bound = stats.mean - lambda * stats.std_dev;
                    switch (criterion) {
                        case Criterion::kInstant:
                            config.instant_threshold = threshold = bound;
                            break;
                        case Criterion::kFinal:
                            config.final_threshold = threshold =
                                static_cast<double>(opt.length) * bound;
                            break;
                        default:
                            config.step_bound = {bound};
                            threshold = bound;
                            break;
                    }
                }
                auto result = enumerate(table, config, {}, opt.workers);
                out << format_double(threshold) << "," << result.solutions.size() << ","
                    << result.metrics.nodes << "," << format_double(result.metrics.seconds)
                    << ",ok\n";
            } catch (const std::exception& e) {
                std::string what = e.what();
                for (auto& c : what)
                    if (c == ',' || c == '\n') c = ' ';
                out << ",,," << "," << "error: " << what << "\n";
                std::cerr << "bench cell " << name << " lambda=" << lambda_text
                          << " failed: " << e.what() << "\n";
            }
        }
    }
    save_to_path(opt.out, out.str());
    std::cerr << "bench -> " << opt.out << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"chain n-grams into fixed-length sentences under probability-threshold "
                 "filtering criteria"};
    app.require_subcommand(1);
    app.footer("Every subcommand also accepts --config FILE, a flat key=value file whose\n"
               "entries act as defaults; explicit flags override them.");

    ExtractOptions extract_opt;
    auto* extract = app.add_subcommand("extract", "extract n-grams from a corpus");
    extract->add_option("--corpus", extract_opt.corpus, "one pre-tokenized sentence per line")
        ->required();
    extract->add_option("--order", extract_opt.order, "n-gram order (>= 2)");
    extract->add_option("--out", extract_opt.out, "n-gram dump TSV")->required();

    ScoreOptions score_opt;
    auto* score = app.add_subcommand("score", "attach log-probabilities to an n-gram dump");
    score->add_option("--ngrams", score_opt.ngrams, "n-gram dump TSV")->required();
    score->add_option("--mode", score_opt.mode, "mle or external");
    score->add_option("--scores", score_opt.scores, "external score TSV (w1..wn, logprob)");
    score->add_option("--default-logprob", score_opt.default_logprob,
                      "fill for n-grams missing from the score file");
    score->add_option("--out", score_opt.out, "scored table TSV")->required();

    StatsOptions stats_opt;
    auto* stats = app.add_subcommand("stats", "distribution summary of a scored table");
    stats->add_option("--scored", stats_opt.scored, "scored table TSV")->required();
    stats->add_flag("--exclude-boundary", stats_opt.exclude_boundary,
                    "ignore sentence-boundary n-grams");
    stats->add_option("--json-out", stats_opt.json_out, "stats JSON (default: stdout)");
    stats->add_option("--qq-out", stats_opt.qq_out, "QQ plot CSV");

    GenerateOptions gen_opt;
    auto* generate = app.add_subcommand("generate", "enumerate n-gram chains");
    generate->add_option("--scored", gen_opt.scored, "scored table TSV")->required();
    generate->add_option("--length", gen_opt.length, "chain length m (number of n-grams)")
        ->required();
    generate->add_option("--criterion", gen_opt.criterion,
                         "vanilla | instant | final | gliding | gliding-lookahead");
    generate->add_option("--direction", gen_opt.direction, "leq (default) or geq");
    generate->add_option("--lambda", gen_opt.lambda, "bound factor in [0, 2]: b = mean - lambda*std");
    generate->add_option("--instant-T", gen_opt.instant_threshold, "explicit instant threshold");
    generate->add_option("--final-T", gen_opt.final_threshold, "explicit final threshold");
    generate->add_option("--step-bound", gen_opt.step_bound, "explicit per-step bound b");
    generate->add_option("--slack", gen_opt.slack, "gliding slack (default: one std)");
    generate->add_option("--horizon", gen_opt.horizon, "lookahead depth (default: order - 1)");
    generate->add_option("--limit-solutions", gen_opt.limit_solutions, "stop after this many");
    generate->add_option("--limit-nodes", gen_opt.limit_nodes, "node budget per worker");
    generate->add_option("--limit-seconds", gen_opt.limit_seconds, "wall-clock budget");
    generate->add_option("--workers", gen_opt.workers, "parallel workers")
        ->check(CLI::Range(1, 256));
    generate->add_flag("--no-initial", gen_opt.no_initial, "drop the sentence-start requirement");
    generate->add_flag("--no-final", gen_opt.no_final, "drop the sentence-end requirement");
    generate->add_option("--out", gen_opt.out, "solutions TSV (metadata sidecar beside it)")
        ->required();

    RankOptions rank_opt;
    auto* rank = app.add_subcommand("rank", "score and select generated sentences");
    rank->add_option("--solutions", rank_opt.solutions, "solutions TSV")->required();
    rank->add_option("--cutoff", rank_opt.cutoff, "keep sentences with ppl <= cutoff");
    rank->add_option("--sentence-scores", rank_opt.sentence_scores,
                     "external sentence scores TSV (sentence, ppl)");
    rank->add_option("--out", rank_opt.out, "ranked TSV (default: stdout)");
    rank->add_option("--summary-out", rank_opt.summary_out, "ppl distribution JSON");

    BenchOptions bench_opt;
    auto* bench = app.add_subcommand("bench", "sweep criteria and lambda grids");
    bench->add_option("--scored", bench_opt.scored, "scored table TSV");
    bench->add_option("--synthetic", bench_opt.synthetic,
                      "generate a synthetic bigram instance of about this many records");
    bench->add_option("--seed", bench_opt.seed, "synthetic instance seed");
    bench->add_option("--length", bench_opt.length, "chain length m")->required();
    bench->add_option("--criteria-grid", bench_opt.criteria, "comma-separated criteria");
    bench->add_option("--lambdas", bench_opt.lambdas, "comma-separated lambda values");
    bench->add_option("--workers", bench_opt.workers, "parallel workers")
        ->check(CLI::Range(1, 256));
    bench->add_option("--out", bench_opt.out, "bench CSV")->required();

    try {
        auto args = apply_config_layer(argc, argv);
        std::reverse(args.begin(), args.end());  // CLI11 consumes from the back
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kInputError;
    } catch (const std::exception& e) {
        std::cerr << "ngramchain: error: " << e.what() << "\n";
        return kInputError;
    }

    try {
        if (*extract) run_extract(extract_opt);
        if (*score) run_score(score_opt);
        if (*stats) run_stats(stats_opt);
        if (*generate) run_generate(gen_opt);
        if (*rank) run_rank(rank_opt);
        if (*bench) run_bench(bench_opt);
    } catch (const LimitStop& e) {
        std::cerr << "ngramchain: " << e.what() << "\n";
        return kLimitStop;
    } catch (const std::exception& e) {
        std::cerr << "ngramchain: error: " << e.what() << "\n";
        return kInputError;
    }
    return kOk;
}
