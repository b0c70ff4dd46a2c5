#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "ns3/error.hpp"
#include "ns3/kg.hpp"
#include "ns3/metrics.hpp"
#include "ns3/parallel.hpp"
#include "ns3/predictor.hpp"
#include "ns3/query.hpp"
#include "ns3/templates.hpp"

namespace ns3 {

// ---------------------------------------------------------------------------
// Synthetic graphs

struct SynthConfig {
    std::size_t entities = 50;
    std::size_t relations = 5;
    std::size_t edges = 400;
    bool skewed = false;           // preferential attachment on heads and tails
    double valid_fraction = 0.1;   // removed from valid to get train
    double test_fraction = 0.1;    // removed from test to get valid
    std::uint64_t seed = 0;

    void validate() const {
        if (entities < 1 || relations < 1) fail(ErrorKind::config, "synthetic graph needs entities and relations");
        for (double f : {valid_fraction, test_fraction})
            if (!(f >= 0.0 && f < 1.0)) fail(ErrorKind::config, "removal fractions must lie in [0,1)");
        long double capacity = static_cast<long double>(entities) * entities * relations;
        if (static_cast<long double>(edges) > capacity)
            fail(ErrorKind::config, "edge count exceeds entities^2 * relations");
    }
};

namespace detail {

inline std::vector<Triple> remove_fraction(const std::vector<Triple>& from, double fraction, std::mt19937_64& rng) {
    auto removed = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(from.size())));
    std::vector<Triple> shuffled = from;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    shuffled.resize(shuffled.size() - std::min(removed, shuffled.size()));
    std::sort(shuffled.begin(), shuffled.end());
    return shuffled;
}

}  // namespace detail

/// Full graph sampled from the seed; test = full, valid = test minus a
/// fraction, train = valid minus a fraction.
inline KnowledgeGraph synth_kg(const SynthConfig& cfg) {
    cfg.validate();
    std::mt19937_64 rng(cfg.seed);
    const std::uint64_t capacity = static_cast<std::uint64_t>(cfg.entities) * cfg.entities * cfg.relations;
    std::vector<Triple> full;
    if (cfg.edges * 2 > capacity) {
        // Dense: pick a random subset of all possible triples.
        std::vector<std::uint64_t> codes(capacity);
        for (std::uint64_t i = 0; i < capacity; ++i) codes[i] = i;
        std::shuffle(codes.begin(), codes.end(), rng);
        codes.resize(cfg.edges);
        for (auto c : codes) {
            auto h = static_cast<EntityId>(c / (cfg.entities * cfg.relations));
            auto r = static_cast<RelationId>(c / cfg.entities % cfg.relations);
            auto t = static_cast<EntityId>(c % cfg.entities);
            full.push_back({h, r, t});
        }
    } else {
        std::vector<double> weights(cfg.entities, 1.0);
        if (cfg.skewed)
            for (std::size_t i = 0; i < weights.size(); ++i) weights[i] = 1.0 / static_cast<double>(i + 1);
        std::discrete_distribution<std::size_t> pick_entity(weights.begin(), weights.end());
        std::uniform_int_distribution<std::size_t> pick_relation(0, cfg.relations - 1);
        std::set<Triple> seen;
        std::uint64_t draws = 0;
        while (seen.size() < cfg.edges) {
            if (++draws > 1000 * cfg.edges + 100000)
                fail(ErrorKind::resource, "edge sampling did not converge; lower the edge count or disable skew");
            Triple t{static_cast<EntityId>(pick_entity(rng)), static_cast<RelationId>(pick_relation(rng)),
                     static_cast<EntityId>(pick_entity(rng))};
            seen.insert(t);
        }
        full.assign(seen.begin(), seen.end());
    }
    std::sort(full.begin(), full.end());
    auto valid = detail::remove_fraction(full, cfg.test_fraction, rng);
    auto train = detail::remove_fraction(valid, cfg.valid_fraction, rng);

    KnowledgeGraph kg;
    kg.vocab = Vocab::numbered(cfg.entities, cfg.relations);
    kg.test = TripleSet(std::move(full));
    kg.valid = TripleSet(std::move(valid));
    kg.train = TripleSet(std::move(train));
    return kg;
}

// ---------------------------------------------------------------------------
// Brute-force answers

inline constexpr std::size_t kBruteForceGuard = 2000;

namespace detail {

class Backtracker {
   public:
    Backtracker(const QueryGraph& g, const TripleSet& triples, std::size_t num_entities)
        : triples_(triples), num_entities_(num_entities), free_count_(g.free_vars.size()) {
        names_ = g.free_vars;
        names_.insert(names_.end(), g.exist_vars.begin(), g.exist_vars.end());
        for (const auto& e : g.edges) {
            if (e.relation_placeholder || e.head.placeholder || e.tail.placeholder)
                fail(ErrorKind::logic, "brute force needs a grounded query");
            edges_.push_back({endpoint(e.head), e.relation, endpoint(e.tail), e.negated});
        }
        value_.assign(names_.size(), -1);
    }

    void run(AnswerSet& out) {
        for (const auto& e : edges_)
            if (e.head.var < 0 && e.tail.var < 0 && !holds(e)) return;
        assign_free(out);
    }

   private:
    struct End {
        int var = -1;  // -1: constant
        EntityId entity = 0;
    };
    struct Edge {
        End head;
        RelationId relation;
        End tail;
        bool negated;
    };

    End endpoint(const Term& t) const {
        if (t.kind == TermKind::constant) return {-1, t.entity};
        auto it = std::find(names_.begin(), names_.end(), t.name);
        if (it == names_.end()) fail(ErrorKind::logic, "unknown variable '" + t.name + "'");
        return {static_cast<int>(it - names_.begin()), 0};
    }

    bool bound(const End& e) const { return e.var < 0 || value_[e.var] >= 0; }
    EntityId get(const End& e) const { return e.var < 0 ? e.entity : static_cast<EntityId>(value_[e.var]); }

    bool holds(const Edge& e) const {
        bool present = triples_.contains(get(e.head), e.relation, get(e.tail));
        return present != e.negated;
    }

    /// Unassigned variable in [lo, hi) with the most positive edges to bound endpoints.
    int pick(std::size_t lo, std::size_t hi) const {
        int best = -1;
        int best_score = -1;
        for (std::size_t v = lo; v < hi; ++v) {
            if (value_[v] >= 0) continue;
            int score = 0;
            for (const auto& e : edges_) {
                if (e.negated) continue;
                if ((e.head.var == static_cast<int>(v) && e.tail.var != e.head.var && bound(e.tail)) ||
                    (e.tail.var == static_cast<int>(v) && e.tail.var != e.head.var && bound(e.head)))
                    ++score;
            }
            if (score > best_score) {
                best = static_cast<int>(v);
                best_score = score;
            }
        }
        return best;
    }

    std::vector<EntityId> candidates(int v) const {
        std::optional<std::vector<EntityId>> acc;
        for (const auto& e : edges_) {
            if (e.negated || e.head.var == e.tail.var) continue;
            std::span<const EntityId> list;
            if (e.head.var == v && bound(e.tail))
                list = triples_.neighbors(get(e.tail), e.relation, Direction::backward);
            else if (e.tail.var == v && bound(e.head))
                list = triples_.neighbors(get(e.head), e.relation, Direction::forward);
            else
                continue;
            if (!acc) {
                acc.emplace(list.begin(), list.end());
            } else {
                std::vector<EntityId> merged;
                std::set_intersection(acc->begin(), acc->end(), list.begin(), list.end(), std::back_inserter(merged));
                acc = std::move(merged);
            }
            if (acc->empty()) break;
        }
        if (acc) return *acc;
        std::vector<EntityId> all(num_entities_);
        for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<EntityId>(i);
        return all;
    }

    bool consistent(int v) const {
        for (const auto& e : edges_)
            if ((e.head.var == v || e.tail.var == v) && bound(e.head) && bound(e.tail) && !holds(e)) return false;
        return true;
    }

    void assign_free(AnswerSet& out) {
        int v = pick(0, free_count_);
        if (v < 0) {
            if (assign_exist()) {
                Tuple t(free_count_);
                for (std::size_t i = 0; i < free_count_; ++i) t[i] = static_cast<EntityId>(value_[i]);
                out.insert(std::move(t));
            }
            return;
        }
        for (EntityId c : candidates(v)) {
            value_[v] = c;
            if (consistent(v)) assign_free(out);
        }
        value_[v] = -1;
    }

    bool assign_exist() {
        int v = pick(free_count_, names_.size());
        if (v < 0) return true;
        bool found = false;
        for (EntityId c : candidates(v)) {
            value_[v] = c;
            if (consistent(v) && assign_exist()) {
                found = true;
                break;
            }
        }
        value_[v] = -1;
        return found;
    }

    const TripleSet& triples_;
    std::size_t num_entities_;
    std::size_t free_count_;
    std::vector<std::string> names_;
    std::vector<Edge> edges_;
    std::vector<std::int64_t> value_;
};

}  // namespace detail

/// Exact answer set by backtracking; disjunction is the union over conjuncts.
inline AnswerSet brute_force_answers(const DnfQuery& q, const TripleSet& triples, std::size_t num_entities,
                                     std::size_t guard = kBruteForceGuard) {
    if (num_entities > guard)
        fail(ErrorKind::resource, "brute force limited to " + std::to_string(guard) + " entities");
    AnswerSet out;
    for (const auto& g : q.conjuncts) {
        if (g.free_vars != q.free_vars) fail(ErrorKind::logic, "conjunct free variables differ from the query");
        detail::Backtracker(g, triples, num_entities).run(out);
    }
    return out;
}

inline AnswerSet brute_force_answers(const DnfQuery& q, const KnowledgeGraph& kg, Split split,
                                     std::size_t guard = kBruteForceGuard) {
    return brute_force_answers(q, kg.split(split), kg.num_entities(), guard);
}

/// easy = answers on train that remain answers on test; hard = test answers
/// not derivable from train.
inline AnswerSplit split_answers(const DnfQuery& q, const KnowledgeGraph& kg, std::size_t guard = kBruteForceGuard) {
    auto test = brute_force_answers(q, kg, Split::test, guard);
    auto train = brute_force_answers(q, kg, Split::train, guard);
    AnswerSet easy;
    AnswerSet hard;
    for (const auto& t : test) (train.count(t) ? easy : hard).insert(t);
    return AnswerSplit(q.arity(), std::move(easy), std::move(hard));
}

// ---------------------------------------------------------------------------
// Query sampling

struct GroundedQuery {
    std::string id;
    std::string type;
    DnfQuery query;
    AnswerSplit answers;
};

struct SampleConfig {
    std::vector<std::string> types;
    std::size_t per_type = 25;
    std::uint64_t seed = 0;
    std::size_t attempt_cap = 200;  // rejected groundings allowed per instance
    std::size_t threads = 1;
    std::size_t guard = kBruteForceGuard;
};

struct TypeShortfall {
    std::string type;
    std::size_t produced = 0;
    std::size_t requested = 0;
};

struct SampleResult {
    std::vector<GroundedQuery> queries;  // grouped by type in request order
    std::vector<TypeShortfall> shortfalls;
};

inline std::uint64_t type_seed(std::uint64_t seed, std::string_view type) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : type) h = (h ^ c) * 0x100000001b3ULL;
    return detail::splitmix64(seed ^ detail::splitmix64(h));
}

namespace detail {

class WalkGrounder {
   public:
    WalkGrounder(const TripleSet& graph, std::size_t num_entities, std::size_t num_relations, std::mt19937_64& rng)
        : graph_(graph), num_entities_(num_entities), num_relations_(num_relations), rng_(rng) {}

    /// Binds every placeholder of the skeleton by walking the graph from the
    /// anchors along positive edges. Negated edges get random bindings.
    std::optional<Grounding> run(const DnfQuery& skeleton) {
        Grounding binding;
        for (const auto& g : skeleton.conjuncts) {
            vars_.clear();
            if (!walk(g, binding)) return std::nullopt;
            bind_negated(g, binding);
        }
        return binding;
    }

   private:
    std::optional<EntityId> value(const Term& t, const Grounding& b) const {
        if (t.kind == TermKind::constant) {
            if (!t.placeholder) return t.entity;
            auto it = b.entities.find(t.placeholder);
            if (it != b.entities.end()) return it->second;
            return std::nullopt;
        }
        auto it = vars_.find(t.name);
        if (it != vars_.end()) return it->second;
        return std::nullopt;
    }

    void set(const Term& t, EntityId v, Grounding& b) {
        if (t.kind == TermKind::constant) {
            if (t.placeholder) b.entities[t.placeholder] = v;
        } else {
            vars_[t.name] = v;
        }
    }

    std::optional<RelationId> relation(const QueryEdge& e, const Grounding& b) const {
        if (!e.relation_placeholder) return e.relation;
        auto it = b.relations.find(e.relation_placeholder);
        if (it != b.relations.end()) return it->second;
        return std::nullopt;
    }

    std::span<const Triple> triples_from(EntityId head) const {
        auto all = graph_.triples();
        auto lo = std::lower_bound(all.begin(), all.end(), Triple{head, 0, 0});
        auto hi = std::lower_bound(lo, all.end(), Triple{head + 1, 0, 0});
        return {lo, hi};
    }

    bool step(const QueryEdge& e, Grounding& b) {
        auto head = value(e.head, b);
        auto tail = value(e.tail, b);
        auto rel = relation(e, b);
        std::vector<Triple> options;
        if (head) {
            for (const auto& t : triples_from(*head))
                if ((!rel || t.relation == *rel) && (!tail || t.tail == *tail)) options.push_back(t);
        } else {
            // Walk backwards from the bound tail.
            for (const auto& t : graph_.triples())
                if (t.tail == *tail && (!rel || t.relation == *rel)) options.push_back(t);
        }
        if (options.empty()) return false;
        const auto& t = options[std::uniform_int_distribution<std::size_t>(0, options.size() - 1)(rng_)];
        set(e.head, t.head, b);
        set(e.tail, t.tail, b);
        if (e.relation_placeholder) b.relations[e.relation_placeholder] = t.relation;
        return true;
    }

    bool walk(const QueryGraph& g, Grounding& b) {
        std::vector<const QueryEdge*> pending;
        for (const auto& e : g.edges)
            if (!e.negated) pending.push_back(&e);
        while (!pending.empty()) {
            auto it = std::find_if(pending.begin(), pending.end(),
                                   [&](const QueryEdge* e) { return value(e->head, b) || value(e->tail, b); });
            if (it == pending.end()) {
                // Start a fresh walk at the head of a random triple.
                const auto& all = graph_.triples();
                if (all.empty()) return false;
                const auto& t = all[std::uniform_int_distribution<std::size_t>(0, all.size() - 1)(rng_)];
                it = pending.begin();
                set((*it)->head, t.head, b);
            }
            if (!step(**it, b)) return false;
            pending.erase(it);
        }
        return true;
    }

    void bind_negated(const QueryGraph& g, Grounding& b) {
        std::uniform_int_distribution<std::size_t> pick_entity(0, num_entities_ - 1);
        std::uniform_int_distribution<std::size_t> pick_relation(0, num_relations_ - 1);
        for (const auto& e : g.edges) {
            if (!e.negated) continue;
            auto rel = relation(e, b);
            bool need_head = !value(e.head, b) && e.head.kind == TermKind::constant;
            bool need_tail = !value(e.tail, b) && e.tail.kind == TermKind::constant;
            if (need_head || need_tail) {
                // Borrow an endpoint from a real triple so the negated atom is not vacuous.
                std::vector<Triple> options;
                for (const auto& t : graph_.triples())
                    if (!rel || t.relation == *rel) options.push_back(t);
                if (!options.empty()) {
                    const auto& t = options[std::uniform_int_distribution<std::size_t>(0, options.size() - 1)(rng_)];
                    if (need_head) set(e.head, t.head, b);
                    if (need_tail) set(e.tail, t.tail, b);
                    if (e.relation_placeholder && !rel) b.relations[e.relation_placeholder] = t.relation;
                    continue;
                }
            }
            if (need_head) set(e.head, static_cast<EntityId>(pick_entity(rng_)), b);
            if (need_tail) set(e.tail, static_cast<EntityId>(pick_entity(rng_)), b);
            if (e.relation_placeholder && !rel)
                b.relations[e.relation_placeholder] = static_cast<RelationId>(pick_relation(rng_));
        }
    }

    const TripleSet& graph_;
    std::size_t num_entities_;
    std::size_t num_relations_;
    std::mt19937_64& rng_;
    std::map<std::string, EntityId> vars_;
};

inline std::string query_id(std::string_view type, std::size_t index) {
    std::string n = std::to_string(index);
    if (n.size() < 4) n.insert(0, 4 - n.size(), '0');
    return std::string(type) + "-" + n;
}

}  // namespace detail

/// Grounds `per_type` instances of each type by random walks on the test
/// graph, rejecting groundings without hard answers or duplicating an
/// earlier instance. Each type uses its own sub-seed, so the output does not
/// depend on the thread count.
inline SampleResult sample_queries(const KnowledgeGraph& kg, const TemplateRegistry& registry,
                                   const SampleConfig& cfg) {
    for (const auto& type : cfg.types) registry.get(type);
    if (kg.num_entities() > cfg.guard)
        fail(ErrorKind::resource, "query sampling limited to " + std::to_string(cfg.guard) + " entities");
    struct PerType {
        std::vector<GroundedQuery> queries;
        std::size_t produced = 0;
    };
    auto results = parallel_map(cfg.types.size(), cfg.threads, [&](std::size_t i) {
        const auto& type = cfg.types[i];
        const auto& skeleton = registry.get(type);
        std::mt19937_64 rng(type_seed(cfg.seed, type));
        detail::WalkGrounder grounder(kg.test, kg.num_entities(), kg.num_relations(), rng);
        std::set<std::string> seen;
        PerType out;
        for (std::size_t n = 0; n < cfg.per_type; ++n) {
            bool accepted = false;
            for (std::size_t attempt = 0; attempt < cfg.attempt_cap && !accepted; ++attempt) {
                auto binding = grounder.run(skeleton);
                if (!binding) continue;
                auto q = ground(skeleton, *binding);
                auto text = print_query(q, nullptr);
                if (seen.count(text)) continue;
                auto answers = split_answers(q, kg, cfg.guard);
                if (answers.hard.empty()) continue;
                seen.insert(text);
                out.queries.push_back({detail::query_id(type, n), type, std::move(q), std::move(answers)});
                accepted = true;
            }
            if (!accepted) break;
        }
        out.produced = out.queries.size();
        return out;
    });
    SampleResult result;
    for (std::size_t i = 0; i < results.size(); ++i) {
        if (results[i].produced < cfg.per_type)
            result.shortfalls.push_back({cfg.types[i], results[i].produced, cfg.per_type});
        for (auto& q : results[i].queries) result.queries.push_back(std::move(q));
    }
    return result;
}

// ---------------------------------------------------------------------------
// Query and answer files

struct QueryRecord {
    std::string id;
    std::string type;
    DnfQuery query;
};

namespace detail {

/// Parses `# id=..., type=...` into its fields.
inline std::map<std::string, std::string> parse_header(std::string_view line) {
    std::map<std::string, std::string> fields;
    line.remove_prefix(1);
    std::size_t start = 0;
    while (start <= line.size()) {
        auto end = line.find(',', start);
        auto part = line.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start);
        auto eq = part.find('=');
        if (eq != std::string_view::npos) {
            auto trim = [](std::string_view s) {
                auto a = s.find_first_not_of(" \t");
                auto b = s.find_last_not_of(" \t");
                return a == std::string_view::npos ? std::string() : std::string(s.substr(a, b - a + 1));
            };
            fields[trim(part.substr(0, eq))] = trim(part.substr(eq + 1));
        }
        if (end == std::string_view::npos) break;
        start = end + 1;
    }
    return fields;
}

inline std::string join_tuple(const Tuple& t, const Vocab& vocab) {
    std::string out;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (i) out += ',';
        out += vocab.entities.label(t[i]);
    }
    return out;
}

inline Tuple split_tuple(std::string_view text, const Vocab& vocab) {
    Tuple t;
    std::size_t start = 0;
    while (true) {
        auto end = text.find(',', start);
        t.push_back(vocab.entities.id(text.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start)));
        if (end == std::string_view::npos) break;
        start = end + 1;
    }
    return t;
}

}  // namespace detail

inline void write_queries(std::ostream& out, const std::vector<GroundedQuery>& queries, const Vocab& vocab) {
    for (const auto& q : queries) out << "# id=" << q.id << ", type=" << q.type << '\n' << print_query(q.query, vocab) << '\n';
}

inline void write_queries(const std::filesystem::path& path, const std::vector<GroundedQuery>& queries,
                          const Vocab& vocab) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorKind::data, "cannot write " + path.string());
    write_queries(out, queries, vocab);
}

/// Reads a query file; each query line must follow an `# id=..., type=...` header.
inline std::vector<QueryRecord> read_queries(const std::filesystem::path& path, const Vocab& vocab) {
    std::vector<QueryRecord> out;
    std::optional<std::map<std::string, std::string>> header;
    std::set<std::string> ids;
    auto lines = detail::read_lines(path);
    for (std::size_t n = 0; n < lines.size(); ++n) {
        const auto& line = lines[n];
        auto where = path.string() + ":" + std::to_string(n + 1) + ": ";
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        if (line[0] == '#') {
            auto fields = detail::parse_header(line);
            if (fields.count("id")) header = std::move(fields);
            continue;
        }
        if (!header) fail(ErrorKind::data, where + "query without an id header");
        QueryRecord rec;
        rec.id = (*header)["id"];
        rec.type = header->count("type") ? (*header)["type"] : "";
        if (!ids.insert(rec.id).second) fail(ErrorKind::data, where + "duplicate query id '" + rec.id + "'");
        try {
            rec.query = parse_query(line, vocab);
        } catch (const Error& e) {
            fail(ErrorKind::data, where + e.what());
        }
        out.push_back(std::move(rec));
        header.reset();
    }
    return out;
}

inline void write_answers(std::ostream& out, const std::vector<GroundedQuery>& queries, const Vocab& vocab) {
    for (const auto& q : queries) {
        for (const auto& t : q.answers.easy) out << q.id << "\teasy\t" << detail::join_tuple(t, vocab) << '\n';
        for (const auto& t : q.answers.hard) out << q.id << "\thard\t" << detail::join_tuple(t, vocab) << '\n';
    }
}

inline void write_answers(const std::filesystem::path& path, const std::vector<GroundedQuery>& queries,
                          const Vocab& vocab) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorKind::data, "cannot write " + path.string());
    write_answers(out, queries, vocab);
}

/// Reads `id<TAB>easy|hard<TAB>tuple` lines into one AnswerSplit per id.
inline std::map<std::string, AnswerSplit> read_answers(const std::filesystem::path& path, const Vocab& vocab) {
    std::map<std::string, AnswerSplit> out;
    std::map<std::string, bool> arity_set;
    auto lines = detail::read_lines(path);
    for (std::size_t n = 0; n < lines.size(); ++n) {
        if (lines[n].empty() || lines[n][0] == '#') continue;
        auto where = path.string() + ":" + std::to_string(n + 1) + ": ";
        auto fields = detail::split_tabs(lines[n]);
        if (fields.size() != 3) fail(ErrorKind::data, where + "expected 3 tab-separated fields");
        Tuple t;
        try {
            t = detail::split_tuple(fields[2], vocab);
        } catch (const Error& e) {
            fail(ErrorKind::data, where + e.what());
        }
        std::string id(fields[0]);
        auto& split = out[id];
        if (!arity_set[id]) {
            split.arity = t.size();
            arity_set[id] = true;
        } else if (split.arity != t.size()) {
            fail(ErrorKind::data, where + "tuple arity changes within query '" + id + "'");
        }
        if (fields[1] == "easy")
            split.easy.insert(std::move(t));
        else if (fields[1] == "hard")
            split.hard.insert(std::move(t));
        else
            fail(ErrorKind::data, where + "answer kind must be easy or hard");
    }
    for (const auto& [id, split] : out) split.validate();
    return out;
}

// ---------------------------------------------------------------------------
// Graph statistics

struct KgStats {
    std::size_t entities = 0;
    std::size_t relations = 0;
    std::size_t train_edges = 0;
    std::size_t valid_edges = 0;  // edges added by the valid split
    std::size_t test_edges = 0;   // edges added by the test split
};

inline KgStats kg_stats(const KnowledgeGraph& kg) {
    return {kg.num_entities(), kg.num_relations(), kg.train.size(), kg.valid.size() - kg.train.size(),
            kg.test.size() - kg.valid.size()};
}

}  // namespace ns3
