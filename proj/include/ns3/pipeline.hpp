#pragma once

#include <chrono>
#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "ns3/bench.hpp"
#include "ns3/error.hpp"
#include "ns3/kg.hpp"
#include "ns3/metrics.hpp"
#include "ns3/parallel.hpp"
#include "ns3/planner.hpp"
#include "ns3/predictor.hpp"
#include "ns3/report.hpp"
#include "ns3/scores.hpp"
#include "ns3/templates.hpp"

namespace ns3 {

namespace detail {

inline std::vector<std::string> split_colon(std::string_view spec) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (true) {
        auto end = spec.find(':', start);
        parts.emplace_back(spec.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start));
        if (end == std::string_view::npos) break;
        start = end + 1;
    }
    return parts;
}

template <class T>
T parse_number(const std::string& text, const std::string& what) {
    try {
        std::size_t used = 0;
        T value{};
        if constexpr (std::is_floating_point_v<T>)
            value = static_cast<T>(std::stod(text, &used));
        else
            value = static_cast<T>(std::stoull(text, &used));
        if (used == text.size()) return value;
    } catch (const std::exception&) {
    }
    fail(ErrorKind::config, "malformed " + what + " '" + text + "'");
}

}  // namespace detail

/// Builds a provider from `oracle:SPLIT`, `noisy:SPLIT:EPS:SEED[:FRACTION]`,
/// `table:PATH` or `embed:PATH`. The graph must outlive the provider.
inline std::unique_ptr<TruthProvider> make_provider(std::string_view spec, const KnowledgeGraph& kg) {
    auto parts = detail::split_colon(spec);
    const auto& kind = parts[0];
    if (kind == "oracle") {
        if (parts.size() != 2) fail(ErrorKind::config, "predictor oracle:SPLIT expected");
        return std::make_unique<ExactProvider>(kg, parse_split(parts[1]));
    }
    if (kind == "noisy") {
        if (parts.size() != 4 && parts.size() != 5)
            fail(ErrorKind::config, "predictor noisy:SPLIT:EPS:SEED[:FRACTION] expected");
        double fraction = parts.size() == 5 ? detail::parse_number<double>(parts[4], "noise fraction") : 0.1;
        return std::make_unique<NoisyOracleProvider>(kg, parse_split(parts[1]),
                                                     detail::parse_number<double>(parts[2], "noise epsilon"),
                                                     detail::parse_number<std::uint64_t>(parts[3], "noise seed"), fraction);
    }
    auto rest = std::string(spec.substr(std::min(spec.size(), kind.size() + 1)));
    if (kind == "table") {
        if (rest.empty()) fail(ErrorKind::config, "predictor table:PATH expected");
        return std::make_unique<TableProvider>(TableProvider::load(rest, kg.vocab));
    }
    if (kind == "embed") {
        if (rest.empty()) fail(ErrorKind::config, "predictor embed:PATH expected");
        return std::make_unique<EmbeddingProvider>(load_embedding_model(rest), kg.vocab);
    }
    fail(ErrorKind::config, "unknown predictor '" + std::string(spec) + "'");
}

struct AnswerOptions {
    PlannerConfig planner;
    AnswerMode mode = AnswerMode::joint;
    std::size_t threads = 1;
};

/// Scores every query; results come back in input order. Joint mode emits the
/// joint table and the marginal tables, marginal mode only the latter.
inline std::vector<ScoreRecord> answer_queries(const std::vector<QueryRecord>& queries, const TruthProvider& provider,
                                               const AnswerOptions& opts) {
    if (opts.planner.budget < 1) fail(ErrorKind::config, "budget must be at least 1");
    if (opts.planner.solver.cycle_cap < 1) fail(ErrorKind::config, "cycle cap must be at least 1");
    return parallel_map(queries.size(), opts.threads, [&](std::size_t i) {
        const auto& q = queries[i].query;
        ScoreRecord rec{queries[i].id, q.free_vars, {}};
        auto marginals = solve_marginals(q, provider, opts.planner.solver);
        for (const auto& v : marginals.vectors) rec.scores.marginals.push_back(to_score_table(v));
        if (opts.mode == AnswerMode::joint) {
            rec.scores.has_joint = true;
            rec.scores.joint = to_score_table(answer_efok(q, provider, opts.planner));
        }
        return rec;
    });
}

/// Evaluates scored queries against their answers. Queries without scores or
/// answers are counted as skipped.
inline EvalReport evaluate(const std::vector<QueryRecord>& queries, const std::map<std::string, ScoreRecord>& scores,
                           const std::map<std::string, AnswerSplit>& answers, std::uint64_t num_entities,
                           TiePolicy policy = TiePolicy::mid, std::size_t threads = 1) {
    auto metrics = parallel_map(queries.size(), threads, [&](std::size_t i) {
        const auto& q = queries[i];
        auto s = scores.find(q.id);
        auto a = answers.find(q.id);
        if (s == scores.end() || a == answers.end()) return QueryMetrics{q.id, q.type, 0, {}};
        if (a->second.arity != q.query.arity())
            fail(ErrorKind::data, "answers of '" + q.id + "' do not match the query arity");
        return evaluate_query(q.id, q.type, s->second.scores, a->second, num_entities, policy);
    });
    return EvalReport::aggregate(std::move(metrics));
}

// ---------------------------------------------------------------------------
// End-to-end bench

struct BenchConfig {
    SynthConfig synth;
    std::vector<std::string> types = benchmark_type_names();
    std::size_t per_type = 5;
    std::uint64_t seed = 0;  // query sampling seed
    std::string predictor = "oracle:test";
    AnswerMode mode = AnswerMode::joint;
    std::size_t budget = 64;
    std::size_t cycle_cap = 10;
    TiePolicy ties = TiePolicy::mid;
    std::size_t threads = 1;

    /// Everything that determines the outputs. The thread count is left out
    /// on purpose: it never changes results.
    nlohmann::ordered_json to_json() const {
        nlohmann::ordered_json j;
        j["entities"] = synth.entities;
        j["relations"] = synth.relations;
        j["edges"] = synth.edges;
        j["skewed"] = synth.skewed;
        j["valid_fraction"] = synth.valid_fraction;
        j["test_fraction"] = synth.test_fraction;
        j["kg_seed"] = synth.seed;
        j["types"] = types;
        j["per_type"] = per_type;
        j["seed"] = seed;
        j["predictor"] = predictor;
        j["mode"] = to_string(mode);
        j["budget"] = budget;
        j["cycle_cap"] = cycle_cap;
        j["ties"] = to_string(ties);
        return j;
    }
};

struct BenchOutcome {
    KnowledgeGraph kg;
    std::vector<GroundedQuery> queries;
    std::vector<TypeShortfall> shortfalls;
    EvalReport report;
    nlohmann::ordered_json report_json;
    double answer_seconds = 0.0;
};

/// synth -> sample -> answer -> evaluate. When `out_dir` is non-empty the
/// artifacts are written there: kg/, queries.txt, answers.tsv, scores.txt,
/// report.json, report.tsv and run.json (thread count and timings).
inline BenchOutcome run_bench(const BenchConfig& cfg, const std::filesystem::path& out_dir = {}) {
    if (cfg.budget < 1) fail(ErrorKind::config, "budget must be at least 1");
    if (cfg.cycle_cap < 1) fail(ErrorKind::config, "cycle cap must be at least 1");
    if (cfg.per_type < 1) fail(ErrorKind::config, "per-type count must be at least 1");
    BenchOutcome out;
    out.kg = synth_kg(cfg.synth);
    auto registry = TemplateRegistry::defaults();

    SampleConfig sample;
    sample.types = cfg.types;
    sample.per_type = cfg.per_type;
    sample.seed = cfg.seed;
    sample.threads = cfg.threads;
    auto sampled = sample_queries(out.kg, registry, sample);
    out.queries = std::move(sampled.queries);
    out.shortfalls = std::move(sampled.shortfalls);

    std::vector<QueryRecord> records;
    std::map<std::string, AnswerSplit> answers;
    for (const auto& q : out.queries) {
        records.push_back({q.id, q.type, q.query});
        answers[q.id] = q.answers;
    }
    auto provider = make_provider(cfg.predictor, out.kg);
    AnswerOptions opts;
    opts.planner.budget = cfg.budget;
    opts.planner.solver.cycle_cap = cfg.cycle_cap;
    opts.mode = cfg.mode;
    opts.threads = cfg.threads;
    auto start = std::chrono::steady_clock::now();
    auto scored = answer_queries(records, *provider, opts);
    out.answer_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    std::map<std::string, ScoreRecord> by_id;
    for (const auto& r : scored) by_id[r.id] = r;
    out.report = evaluate(records, by_id, answers, out.kg.num_entities(), cfg.ties, cfg.threads);

    nlohmann::ordered_json header;
    header["config"] = cfg.to_json();
    header["conventions"] = report_conventions(cfg.ties);
    nlohmann::ordered_json shortfalls = nlohmann::ordered_json::array();
    for (const auto& s : out.shortfalls)
        shortfalls.push_back({{"type", s.type}, {"produced", s.produced}, {"requested", s.requested}});
    header["shortfalls"] = std::move(shortfalls);
    out.report_json = report_json(out.report, header);

    if (!out_dir.empty()) {
        std::filesystem::create_directories(out_dir);
        save_kg(out.kg, out_dir / "kg");
        write_queries(out_dir / "queries.txt", out.queries, out.kg.vocab);
        write_answers(out_dir / "answers.tsv", out.queries, out.kg.vocab);
        write_scores(out_dir / "scores.txt", scored, out.kg.vocab);
        write_text(out_dir / "report.json", out.report_json.dump(2) + "\n");
        write_text(out_dir / "report.tsv", to_tsv(out.report));
        nlohmann::ordered_json run;
        run["threads"] = cfg.threads;
        run["answer_seconds"] = out.answer_seconds;
        write_text(out_dir / "run.json", run.dump(2) + "\n");
    }
    return out;
}

}  // namespace ns3
