// ns3: command-line front end. Exit codes: 0 ok, 1 internal, 2 config, 3 data, 4 resource.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "ns3/ns3.hpp"

namespace fs = std::filesystem;
using namespace ns3;

namespace {

int exit_code(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::config: return 2;
        case ErrorKind::data: return 3;
        case ErrorKind::resource: return 4;
        case ErrorKind::logic: return 1;
    }
    return 1;
}

void report_error(const std::string& kind, const std::string& message) {
    std::cerr << "error\t" << kind << '\t' << message << '\n';
}

std::size_t resolve_threads(std::size_t requested) { return requested ? requested : default_thread_count(); }

std::ofstream open_out(const fs::path& path) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorKind::data, "cannot write " + path.string());
    return out;
}

void check_types(const std::vector<std::string>& types, const TemplateRegistry& registry) {
    if (types.empty()) fail(ErrorKind::config, "no query types given");
    for (const auto& t : types) registry.get(t);
}

TemplateRegistry load_registry(const std::string& path) {
    return path.empty() ? TemplateRegistry::defaults() : TemplateRegistry::load(path);
}

struct SynthArgs {
    SynthConfig cfg;
    void add(CLI::App* app) {
        app->add_option("--entities", cfg.entities, "entity count")->capture_default_str();
        app->add_option("--relations", cfg.relations, "relation count")->capture_default_str();
        app->add_option("--edges", cfg.edges, "edges in the test graph")->capture_default_str();
        app->add_flag("--skewed", cfg.skewed, "preferential attachment");
        app->add_option("--valid-fraction", cfg.valid_fraction, "valid edges held out of train")->capture_default_str();
        app->add_option("--test-fraction", cfg.test_fraction, "test edges held out of valid")->capture_default_str();
        app->add_option("--kg-seed", cfg.seed, "graph seed")->capture_default_str();
    }
};

struct PlanArgs {
    std::string predictor = "oracle:test";
    std::string mode = "joint";
    std::size_t budget = 4000;
    std::size_t cycle_cap = 10;
    void add(CLI::App* app) {
        app->add_option("--predictor", predictor, "oracle:SPLIT | noisy:SPLIT:EPS:SEED[:FRACTION] | table:PATH | embed:PATH")
            ->capture_default_str();
        app->add_option("--mode", mode, "joint | marginal")->capture_default_str();
        app->add_option("--budget", budget, "per-variable budget B")->capture_default_str();
        app->add_option("--cycle-cap", cycle_cap, "branching cap for cyclic queries")->capture_default_str();
    }
    AnswerOptions options(std::size_t threads) const {
        AnswerOptions o;
        o.mode = parse_answer_mode(mode);
        o.planner.budget = budget;
        o.planner.solver.cycle_cap = cycle_cap;
        o.threads = threads;
        if (budget < 1) fail(ErrorKind::config, "budget must be at least 1");
        if (cycle_cap < 1) fail(ErrorKind::config, "cycle cap must be at least 1");
        return o;
    }
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Budgeted neural-symbolic answering of multi-variable knowledge graph queries"};
    app.set_config("--config", "", "TOML/INI file; [verb] sections hold the verb's options, flags override")
        ->check(CLI::ExistingFile);
    app.require_subcommand(1);

    std::size_t threads = 0;
    auto add_threads = [&](CLI::App* sub) {
        sub->add_option("--threads", threads, "worker threads (default: NS3_THREADS or hardware)");
    };

    // kg-stats
    auto* stats = app.add_subcommand("kg-stats", "print split sizes of a graph directory");
    std::string kg_dir;
    stats->add_option("--kg", kg_dir, "graph directory")->required();

    // synth-kg
    auto* synth = app.add_subcommand("synth-kg", "write a synthetic graph with nested splits");
    SynthArgs synth_args;
    synth_args.add(synth);
    std::string out_path;
    synth->add_option("--out", out_path, "output directory")->required();

    // gen-queries
    auto* gen = app.add_subcommand("gen-queries", "sample grounded queries and their easy/hard answers");
    gen->add_option("--kg", kg_dir, "graph directory")->required();
    std::vector<std::string> types = benchmark_type_names();
    std::size_t per_type = 25;
    std::uint64_t seed = 0;
    std::size_t attempt_cap = 200;
    std::string templates_path;
    std::string queries_path, answers_path, scores_path;
    gen->add_option("--types", types, "query types")->delimiter(',')->capture_default_str();
    gen->add_option("--per-type", per_type, "instances per type")->capture_default_str();
    gen->add_option("--seed", seed, "sampling seed")->capture_default_str();
    gen->add_option("--attempt-cap", attempt_cap, "rejected groundings allowed per instance")->capture_default_str();
    gen->add_option("--templates", templates_path, "template registry file (default: built-in)");
    gen->add_option("--queries", queries_path, "output query file")->required();
    gen->add_option("--answers", answers_path, "output answer file")->required();
    add_threads(gen);

    // oracle
    auto* orc = app.add_subcommand("oracle", "brute-force easy/hard answers of a query file");
    orc->add_option("--kg", kg_dir, "graph directory")->required();
    orc->add_option("--queries", queries_path, "query file")->required();
    orc->add_option("--out", answers_path, "output answer file")->required();
    add_threads(orc);

    // answer
    auto* ans = app.add_subcommand("answer", "score queries with the planner");
    PlanArgs plan;
    plan.add(ans);
    ans->add_option("--kg", kg_dir, "graph directory")->required();
    ans->add_option("--queries", queries_path, "query file")->required();
    ans->add_option("--out", scores_path, "output score file")->required();
    add_threads(ans);

    // eval
    auto* ev = app.add_subcommand("eval", "compute marginal, multiply, joint-estimate and joint metrics");
    std::string ties = "mid";
    std::string tsv_path;
    ev->add_option("--kg", kg_dir, "graph directory")->required();
    ev->add_option("--queries", queries_path, "query file")->required();
    ev->add_option("--scores", scores_path, "score file")->required();
    ev->add_option("--answers", answers_path, "answer file")->required();
    ev->add_option("--ties", ties, "mid | strict")->capture_default_str();
    ev->add_option("--out", out_path, "report JSON (default: stdout)");
    ev->add_option("--tsv", tsv_path, "flat TSV report");
    add_threads(ev);

    // bench
    auto* bench = app.add_subcommand("bench", "synth, sample, answer and evaluate in one run");
    SynthArgs bench_synth;
    bench_synth.add(bench);
    PlanArgs bench_plan;
    bench_plan.budget = 64;
    bench_plan.add(bench);
    bench->add_option("--types", types, "query types")->delimiter(',')->capture_default_str();
    bench->add_option("--per-type", per_type, "instances per type")->capture_default_str();
    bench->add_option("--seed", seed, "query sampling seed")->capture_default_str();
    bench->add_option("--ties", ties, "mid | strict")->capture_default_str();
    bench->add_option("--out", out_path, "output directory")->required();
    add_threads(bench);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        report_error("config", e.what());
        return 2;
    }

    try {
        if (*stats) {
            auto kg = load_kg(kg_dir);
            auto s = kg_stats(kg);
            std::cout << "entities\trelations\ttrain\tvalid\ttest\n"
                      << s.entities << '\t' << s.relations << '\t' << s.train_edges << '\t' << s.valid_edges << '\t'
                      << s.test_edges << '\n';
        } else if (*synth) {
            auto kg = synth_kg(synth_args.cfg);
            save_kg(kg, out_path);
            auto s = kg_stats(kg);
            std::cerr << "wrote " << out_path << ": " << s.entities << " entities, " << kg.test.size() << " edges\n";
        } else if (*gen) {
            auto kg = load_kg(kg_dir);
            auto registry = load_registry(templates_path);
            check_types(types, registry);
            SampleConfig sc;
            sc.types = types;
            sc.per_type = per_type;
            sc.seed = seed;
            sc.attempt_cap = attempt_cap;
            sc.threads = resolve_threads(threads);
            auto result = sample_queries(kg, registry, sc);
            for (const auto& s : result.shortfalls)
                std::cerr << "warning\tshortfall\t" << s.type << '\t' << s.produced << '/' << s.requested << '\n';
            if (result.queries.empty()) fail(ErrorKind::resource, "attempt cap exhausted for every type");
            auto qout = open_out(queries_path);
            qout << "# generated seed=" << seed << " per_type=" << per_type << " attempt_cap=" << attempt_cap << '\n';
            write_queries(qout, result.queries, kg.vocab);
            auto aout = open_out(answers_path);
            write_answers(aout, result.queries, kg.vocab);
        } else if (*orc) {
            auto kg = load_kg(kg_dir);
            auto records = read_queries(queries_path, kg.vocab);
            auto splits = parallel_map(records.size(), resolve_threads(threads),
                                       [&](std::size_t i) { return split_answers(records[i].query, kg); });
            std::vector<GroundedQuery> grounded;
            for (std::size_t i = 0; i < records.size(); ++i)
                grounded.push_back({records[i].id, records[i].type, records[i].query, splits[i]});
            auto out = open_out(answers_path);
            write_answers(out, grounded, kg.vocab);
        } else if (*ans) {
            auto opts = plan.options(resolve_threads(threads));
            auto kg = load_kg(kg_dir);
            auto records = read_queries(queries_path, kg.vocab);
            auto provider = make_provider(plan.predictor, kg);
            auto scored = answer_queries(records, *provider, opts);
            nlohmann::ordered_json cfg;
            cfg["predictor"] = plan.predictor;
            cfg["mode"] = plan.mode;
            cfg["budget"] = plan.budget;
            cfg["cycle_cap"] = plan.cycle_cap;
            auto out = open_out(scores_path);
            out << "# config " << cfg.dump() << '\n';
            write_scores(out, scored, kg.vocab);
        } else if (*ev) {
            auto policy = parse_tie_policy(ties);
            auto kg = load_kg(kg_dir);
            auto records = read_queries(queries_path, kg.vocab);
            auto scores = read_scores(scores_path, kg.vocab);
            auto answers = read_answers(answers_path, kg.vocab);
            auto report = evaluate(records, scores, answers, kg.num_entities(), policy, resolve_threads(threads));
            nlohmann::ordered_json header;
            header["config"] = {{"queries", queries_path}, {"scores", scores_path}, {"answers", answers_path},
                                {"entities", kg.num_entities()}};
            header["conventions"] = report_conventions(policy);
            auto text = report_json(report, header).dump(2) + "\n";
            if (out_path.empty()) std::cout << text;
            else open_out(out_path) << text;
            if (!tsv_path.empty()) open_out(tsv_path) << to_tsv(report);
        } else if (*bench) {
            BenchConfig cfg;
            cfg.synth = bench_synth.cfg;
            cfg.types = types;
            cfg.per_type = per_type;
            cfg.seed = seed;
            cfg.predictor = bench_plan.predictor;
            cfg.mode = parse_answer_mode(bench_plan.mode);
            cfg.budget = bench_plan.budget;
            cfg.cycle_cap = bench_plan.cycle_cap;
            cfg.ties = parse_tie_policy(ties);
            cfg.threads = resolve_threads(threads);
            check_types(cfg.types, TemplateRegistry::defaults());
            auto outcome = run_bench(cfg, out_path);
            for (const auto& s : outcome.shortfalls)
                std::cerr << "warning\tshortfall\t" << s.type << '\t' << s.produced << '/' << s.requested << '\n';
            std::cout << to_tsv(outcome.report);
        }
    } catch (const Error& e) {
        report_error(to_string(e.kind()), e.what());
        return exit_code(e.kind());
    } catch (const std::exception& e) {
        report_error("internal", e.what());
        return 1;
    }
    return 0;
}
