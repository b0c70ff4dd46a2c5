#pragma once

// Reference evaluators that share no code with the engine beyond the data
// types: plain enumeration over every variable assignment.

#include <algorithm>
#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "ns3/kg.hpp"
#include "ns3/metrics.hpp"
#include "ns3/predictor.hpp"
#include "ns3/query.hpp"

namespace oracle {

using ns3::EntityId;
using ns3::Tuple;

struct Slots {
    std::vector<std::string> names;  // free variables first, then existentials
    std::size_t free_count = 0;

    explicit Slots(const ns3::QueryGraph& g) : names(g.free_vars), free_count(g.free_vars.size()) {
        names.insert(names.end(), g.exist_vars.begin(), g.exist_vars.end());
    }

    EntityId value(const ns3::Term& t, const std::vector<EntityId>& a) const {
        if (t.kind == ns3::TermKind::constant) return t.entity;
        return a[static_cast<std::size_t>(std::find(names.begin(), names.end(), t.name) - names.begin())];
    }
};

/// Calls fn(assignment) for every assignment of `n` variables over `entities`.
template <class Fn>
void for_each_assignment(std::size_t n, std::size_t entities, std::vector<EntityId>& a, std::size_t from, Fn&& fn) {
    if (from == n) {
        fn(a);
        return;
    }
    for (std::size_t e = 0; e < entities; ++e) {
        a[from] = static_cast<EntityId>(e);
        for_each_assignment(n, entities, a, from + 1, fn);
    }
}

/// Crisp answers by checking every full assignment of all variables.
inline ns3::AnswerSet enumerate_answers(const ns3::DnfQuery& q, const ns3::TripleSet& triples, std::size_t entities) {
    ns3::AnswerSet out;
    for (const auto& g : q.conjuncts) {
        Slots slots(g);
        std::vector<EntityId> a(slots.names.size());
        for_each_assignment(a.size(), entities, a, 0, [&](const std::vector<EntityId>& v) {
            for (const auto& e : g.edges) {
                bool present = triples.contains(slots.value(e.head, v), e.relation, slots.value(e.tail, v));
                if (present == e.negated) return;
            }
            out.insert(Tuple(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(slots.free_count)));
        });
    }
    return out;
}

/// Fuzzy degree of a free-variable assignment in one conjunct:
/// max over existential assignments of the product of atom degrees.
inline double conjunct_degree(const ns3::QueryGraph& g, const Tuple& free_values, const ns3::TruthProvider& p) {
    Slots slots(g);
    std::vector<EntityId> a(slots.names.size());
    std::copy(free_values.begin(), free_values.end(), a.begin());
    double best = 0.0;
    for_each_assignment(a.size(), p.num_entities(), a, slots.free_count, [&](const std::vector<EntityId>& v) {
        double d = 1.0;
        for (const auto& e : g.edges) {
            double t = p.truth(slots.value(e.head, v), e.relation, slots.value(e.tail, v));
            d *= e.negated ? 1.0 - t : t;
        }
        best = std::max(best, d);
    });
    return best;
}

/// Degree of a DNF query: probabilistic sum over conjuncts.
inline double query_degree(const ns3::DnfQuery& q, const Tuple& free_values, const ns3::TruthProvider& p) {
    double miss = 1.0;
    for (const auto& g : q.conjuncts) miss *= 1.0 - conjunct_degree(g, free_values, p);
    return 1.0 - miss;
}

/// Rank from the definition: scan every candidate tuple of the universe.
/// Returns twice the rank so halves stay exact.
inline std::uint64_t naive_twice_rank(const ns3::ScoreTable& table, const Tuple& target, const ns3::AnswerSet& answers,
                                      std::size_t entities, std::size_t k, bool strict = false) {
    double s = table.score(target);
    std::uint64_t greater = 0;
    std::uint64_t equal = 0;
    std::vector<EntityId> a(k);
    for_each_assignment(k, entities, a, 0, [&](const std::vector<EntityId>& v) {
        Tuple c(v.begin(), v.end());
        if (answers.count(c)) return;
        double o = table.score(c);
        if (o > s) ++greater;
        else if (o == s) ++equal;
    });
    return 2 + 2 * greater + (strict ? 2 : 1) * equal;
}

/// Number of x in Z>=0^k with sum(x) <= r, by direct enumeration.
inline std::uint64_t lattice_points(std::uint64_t r, std::size_t k) {
    if (k == 0) return 1;
    std::uint64_t total = 0;
    for (std::uint64_t x = 0; x <= r; ++x) total += lattice_points(r - x, k - 1);
    return total;
}

/// A random graph where each possible triple is present with probability `density`.
inline ns3::TripleSet random_triples(std::size_t entities, std::size_t relations, double density, std::mt19937_64& rng) {
    std::bernoulli_distribution keep(density);
    std::vector<ns3::Triple> out;
    for (std::size_t h = 0; h < entities; ++h)
        for (std::size_t r = 0; r < relations; ++r)
            for (std::size_t t = 0; t < entities; ++t)
                if (keep(rng)) out.push_back({static_cast<EntityId>(h), static_cast<ns3::RelationId>(r), static_cast<EntityId>(t)});
    return ns3::TripleSet(std::move(out));
}

/// Plain metric record: MRR and HIT@1/3/10 as running means.
struct NaiveMetrics {
    double mrr = 0.0;
    double hits[3] = {0.0, 0.0, 0.0};
};

inline NaiveMetrics naive_mean(const std::vector<double>& ranks) {
    NaiveMetrics m;
    const double levels[3] = {1.0, 3.0, 10.0};
    for (double r : ranks) {
        m.mrr += 1.0 / r;
        for (int i = 0; i < 3; ++i) m.hits[i] += r <= levels[i] ? 1.0 : 0.0;
    }
    if (!ranks.empty()) {
        // Sum first, then scale by the reciprocal, so exact comparisons are meaningful.
        double f = 1.0 / static_cast<double>(ranks.size());
        m.mrr *= f;
        for (double& h : m.hits) h *= f;
    }
    return m;
}

inline ns3::AnswerSet project(const ns3::AnswerSet& s, std::size_t i) {
    ns3::AnswerSet out;
    for (const auto& t : s) out.insert(Tuple{t[i]});
    return out;
}

/// Marginal rank of entity e for variable i, scanning all entities.
inline double naive_marginal_rank(const ns3::ScoreTable& table, const ns3::AnswerSplit& a, std::size_t i, EntityId e,
                                  std::size_t entities) {
    ns3::AnswerSet all = a.easy;
    all.insert(a.hard.begin(), a.hard.end());
    return static_cast<double>(naive_twice_rank(table, Tuple{e}, project(all, i), entities, 1)) / 2.0;
}

/// Per-variable means over hard marginal answers, then the mean over variables
/// that have any. Returns false when no variable has hard marginal answers.
inline bool naive_marginal(const std::vector<ns3::ScoreTable>& tables, const ns3::AnswerSplit& a, std::size_t entities,
                           NaiveMetrics& out) {
    ns3::AnswerSet all = a.easy;
    all.insert(a.hard.begin(), a.hard.end());
    std::vector<NaiveMetrics> per_var;
    for (std::size_t i = 0; i < a.arity; ++i) {
        auto hard = project(all, i);
        for (const auto& t : project(a.easy, i)) hard.erase(t);
        if (hard.empty()) continue;
        std::vector<double> ranks;
        for (const auto& t : hard) ranks.push_back(naive_marginal_rank(tables[i], a, i, t[0], entities));
        per_var.push_back(naive_mean(ranks));
    }
    if (per_var.empty()) return false;
    out = NaiveMetrics{};
    for (const auto& m : per_var) {
        out.mrr += m.mrr;
        for (int j = 0; j < 3; ++j) out.hits[j] += m.hits[j];
    }
    double f = 1.0 / static_cast<double>(per_var.size());
    out.mrr *= f;
    for (double& h : out.hits) h *= f;
    return true;
}

/// Multiply protocol from its definition: HIT@n iff every component is within n,
/// MRR from the worst component.
inline NaiveMetrics naive_multiply(const std::vector<ns3::ScoreTable>& tables, const ns3::AnswerSplit& a,
                                   std::size_t entities) {
    std::vector<double> worst;
    for (const auto& t : a.hard) {
        double w = 0.0;
        for (std::size_t i = 0; i < a.arity; ++i) w = std::max(w, naive_marginal_rank(tables[i], a, i, t[i], entities));
        worst.push_back(w);
    }
    return naive_mean(worst);
}

inline NaiveMetrics naive_joint_true(const ns3::ScoreTable& joint, const ns3::AnswerSplit& a, std::size_t entities) {
    ns3::AnswerSet all = a.easy;
    all.insert(a.hard.begin(), a.hard.end());
    std::vector<double> ranks;
    for (const auto& t : a.hard)
        ranks.push_back(static_cast<double>(naive_twice_rank(joint, t, all, entities, a.arity)) / 2.0);
    return naive_mean(ranks);
}

}  // namespace oracle
