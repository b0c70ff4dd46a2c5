#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "ns3/error.hpp"
#include "ns3/fuzzy.hpp"
#include "ns3/predictor.hpp"
#include "ns3/query.hpp"
#include "ns3/search.hpp"

namespace ns3 {

enum class MergeSchedule {
    progressive,   // greedy pairwise merging, smallest count product first
    simultaneous,  // one k-way merge from the marginals (ablation baseline)
};

struct PlannerConfig {
    SolverConfig solver;
    /// Per-variable budget B; a hypernode of n variables keeps at most n*B tuples.
    std::size_t budget = 4000;
    MergeSchedule schedule = MergeSchedule::progressive;
    /// Keep a copy of every pre-solve joint domain in the plan trace.
    bool record_domains = false;
};

/// Allocation of a joint-domain target between two factors.
struct BudgetPlan {
    std::size_t target = 0;
    double count1 = 0.0;
    double count2 = 0.0;
    double lambda = 0.0;  // +inf when a count is zero
    std::size_t b1 = 0;
    std::size_t b2 = 0;
};

/// b_i = floor(lambda * C_i) with lambda = sqrt(target / (C1 * C2)), clamped
/// to [1, cap_i]; then the smaller allocation is incremented (b1 first on
/// ties, skipping capped ones) until b1 * b2 >= target or both are capped.
/// A zero count pins its allocation at 1 and the other side takes
/// min(cap, target).
inline BudgetPlan allocate_budget(double c1, double c2, std::size_t target, std::size_t cap1, std::size_t cap2) {
    require(target >= 1, "budget target must be at least 1");
    require(cap1 >= 1 && cap2 >= 1, "allocation caps must be at least 1");
    BudgetPlan plan;
    plan.target = target;
    plan.count1 = c1;
    plan.count2 = c2;
    const bool pinned1 = !(c1 > 0.0);
    const bool pinned2 = !(c2 > 0.0);
    auto clamp_floor = [](double x, std::size_t cap) {
        // Guard against sqrt results like 39.999999999 for exact squares.
        double f = std::floor(x + 1e-9);
        if (!(f >= 1.0)) return std::size_t{1};
        if (f >= static_cast<double>(cap)) return cap;
        return static_cast<std::size_t>(f);
    };
    const double t = static_cast<double>(target);
    if (!pinned1 && !pinned2) {
        plan.lambda = std::sqrt(t / (c1 * c2));
        plan.b1 = clamp_floor(std::sqrt(t * c1 / c2), cap1);
        plan.b2 = clamp_floor(std::sqrt(t * c2 / c1), cap2);
    } else {
        plan.lambda = std::numeric_limits<double>::infinity();
        plan.b1 = pinned1 ? 1 : std::min(cap1, target);
        plan.b2 = pinned2 ? 1 : std::min(cap2, target);
    }
    while (plan.b1 * plan.b2 < target) {
        bool grow1 = !pinned1 && plan.b1 < cap1;
        bool grow2 = !pinned2 && plan.b2 < cap2;
        if (!grow1 && !grow2) break;
        if (grow1 && (!grow2 || plan.b1 <= plan.b2))
            ++plan.b1;
        else
            ++plan.b2;
    }
    return plan;
}

/// k-way generalization used by the simultaneous schedule:
/// b_i = floor(lambda * C_i), lambda = (target / prod C)^(1/k), then padding.
inline std::vector<std::size_t> allocate_budget(std::span<const double> counts, std::size_t target,
                                                std::span<const std::size_t> caps) {
    require(counts.size() == caps.size() && !counts.empty(), "allocation needs one cap per count");
    require(target >= 1, "budget target must be at least 1");
    const std::size_t k = counts.size();
    std::vector<bool> pinned(k);
    std::vector<std::size_t> b(k, 1);
    double log_product = 0.0;
    std::size_t live = 0;
    for (std::size_t i = 0; i < k; ++i) {
        pinned[i] = !(counts[i] > 0.0);
        if (!pinned[i]) {
            log_product += std::log(counts[i]);
            ++live;
        }
    }
    if (live > 0) {
        const double log_lambda = (std::log(static_cast<double>(target)) - log_product) / static_cast<double>(live);
        for (std::size_t i = 0; i < k; ++i) {
            if (pinned[i]) continue;
            double f = std::floor(std::exp(log_lambda + std::log(counts[i])) + 1e-9);
            b[i] = f < 1.0 ? 1 : (f >= static_cast<double>(caps[i]) ? caps[i] : static_cast<std::size_t>(f));
        }
    }
    auto product = [&] {
        long double p = 1;
        for (auto x : b) p *= static_cast<long double>(x);
        return p;
    };
    while (product() < static_cast<long double>(target)) {
        std::size_t pick = k;
        for (std::size_t i = 0; i < k; ++i)
            if (!pinned[i] && b[i] < caps[i] && (pick == k || b[i] < b[pick])) pick = i;
        if (pick == k) break;
        ++b[pick];
    }
    return b;
}

namespace detail {

/// Cartesian product of the given factors (each already cut to its top
/// candidates). Output tuples follow `layout`: output position i takes
/// concatenated position layout[i]. Values are products of member values.
inline FuzzyVector cartesian(std::span<const FuzzyVector> factors, std::span<const std::size_t> layout) {
    std::size_t arity = 0;
    std::size_t count = 1;
    for (const auto& f : factors) {
        arity += f.arity();
        count *= f.size();
    }
    require(layout.size() == arity, "layout size must equal the joint arity");
    std::vector<EntityId> flat;
    std::vector<double> values;
    flat.reserve(count * arity);
    values.reserve(count);
    std::vector<std::size_t> idx(factors.size(), 0);
    std::vector<EntityId> concat(arity);
    for (std::size_t n = 0; n < count; ++n) {
        double v = 1.0;
        std::size_t offset = 0;
        for (std::size_t f = 0; f < factors.size(); ++f) {
            auto c = factors[f].candidate(idx[f]);
            std::copy(c.begin(), c.end(), concat.begin() + static_cast<std::ptrdiff_t>(offset));
            offset += c.size();
            v = t_and(v, factors[f].value(idx[f]));
        }
        for (std::size_t p = 0; p < arity; ++p) flat.push_back(concat[layout[p]]);
        values.push_back(v);
        for (std::size_t f = factors.size(); f-- > 0;) {
            if (++idx[f] < factors[f].size()) break;
            idx[f] = 0;
        }
    }
    return FuzzyVector(arity, std::move(flat), std::move(values));
}

inline std::vector<std::size_t> identity_layout(std::size_t n) {
    std::vector<std::size_t> v(n);
    std::iota(v.begin(), v.end(), std::size_t{0});
    return v;
}

}  // namespace detail

/// Cartesian product of top_b(v1, b1) and top_b(v2, b2) with product-valued
/// tuples, truncated to the `target` best tuples (ties lexicographic) when it
/// overshoots. `layout` reorders the concatenated (v1, v2) positions.
inline FuzzyVector build_joint_domain(const FuzzyVector& v1, const FuzzyVector& v2, const BudgetPlan& plan,
                                      std::size_t target, std::span<const std::size_t> layout = {}) {
    require(plan.b1 >= 1 && plan.b2 >= 1, "allocations must be positive");
    std::vector<FuzzyVector> factors{top_b(v1, plan.b1), top_b(v2, plan.b2)};
    auto identity = detail::identity_layout(v1.arity() + v2.arity());
    auto joint = detail::cartesian(factors, layout.empty() ? std::span<const std::size_t>(identity) : layout);
    return joint.size() > target ? top_b(joint, target) : joint;
}

/// A merged group of free variables with its budgeted joint domain.
struct Hypernode {
    std::vector<std::string> members;  // lexicographic; tuple position order
    FuzzyVector vector;                // degrees over the joint domain
    std::size_t budget = 0;            // n * B
    double count = 0.0;                // fuzzy count of `vector`
    bool degenerate = false;           // built from an all-zero side
};

struct MergeStep {
    std::vector<std::string> members;
    BudgetPlan plan;
    std::size_t domain_size = 0;
    double count = 0.0;
    bool degenerate = false;
    FuzzyVector domain;  // pre-solve domain, only with PlannerConfig::record_domains
};

struct PlanTrace {
    std::vector<MergeStep> steps;
    bool truncated = false;  // a cycle enumeration hit the cap somewhere
};

struct ScoredTuple {
    Tuple tuple;
    double score = 0.0;
};

/// Positive-scored tuples in canonical free-variable order, sorted by
/// (score desc, tuple asc). Tuples not listed score 0.
struct JointResult {
    std::vector<std::string> free_vars;
    std::vector<ScoredTuple> tuples;
    std::vector<PlanTrace> conjunct_traces;

    double score(const Tuple& t) const {
        for (const auto& s : tuples)
            if (s.tuple == t) return s.score;
        return 0.0;
    }

    /// Pre-solve joint domains of the final merge, one per conjunct, as tuples
    /// in canonical order. Requires record_domains.
    AnswerSet final_domain() const;
};

struct Marginals {
    std::vector<std::string> free_vars;
    std::vector<FuzzyVector> vectors;  // over all entities, one per free variable
    std::vector<double> counts;
    bool truncated = false;
};

namespace detail {

inline DnfQuery single(const QueryGraph& g) {
    DnfQuery q;
    q.free_vars = g.free_vars;
    q.conjuncts.push_back(g);
    return q;
}

/// The conjunct restricted to `keep` free variables (others existential).
inline QueryGraph restrict_to(const QueryGraph& g, std::span<const std::string> keep) {
    if (keep.size() == g.free_vars.size()) return g;
    return marginalize_query(single(g), keep).conjuncts.front();
}

}  // namespace detail

/// Marginal vectors of one conjunctive query: for each free variable, the
/// solved vector of the query with every other free variable made existential.
inline Marginals solve_conjunct_marginals(const QueryGraph& g, const TruthProvider& provider, const SolverConfig& cfg) {
    Marginals m;
    m.free_vars = g.free_vars;
    for (const auto& name : g.free_vars) {
        auto graph = detail::restrict_to(g, std::span<const std::string>(&name, 1));
        auto result = solve_conjunctive(graph, name, provider, cfg);
        m.truncated = m.truncated || result.truncated;
        m.counts.push_back(fuzzy_count(result.values));
        m.vectors.push_back(std::move(result.values));
    }
    return m;
}

/// Marginal vectors of a DNF query; conjunct marginals are combined with t_or.
inline Marginals solve_marginals(const DnfQuery& q, const TruthProvider& provider, const SolverConfig& cfg) {
    require(!q.conjuncts.empty(), "query has no conjuncts");
    Marginals out;
    for (std::size_t c = 0; c < q.conjuncts.size(); ++c) {
        auto m = solve_conjunct_marginals(q.conjuncts[c], provider, cfg);
        if (c == 0) {
            out = std::move(m);
            continue;
        }
        out.truncated = out.truncated || m.truncated;
        for (std::size_t i = 0; i < out.vectors.size(); ++i) {
            auto dst = out.vectors[i].values();
            auto src = m.vectors[i].values();
            for (std::size_t e = 0; e < dst.size(); ++e) dst[e] = t_or(dst[e], src[e]);
        }
    }
    for (std::size_t i = 0; i < out.vectors.size(); ++i) out.counts[i] = fuzzy_count(out.vectors[i]);
    return out;
}

/// NS3(M): the per-variable marginal rankings.
inline Marginals answer_marginal_mode(const DnfQuery& q, const TruthProvider& provider, const SolverConfig& cfg) {
    return solve_marginals(q, provider, cfg);
}

/// Merges two groups of a conjunct into one hypernode: allocates (n_a + n_b) * B
/// tuples between them, builds the reduced joint domain, and solves the
/// conjunct restricted to the merged variables over it.
inline Hypernode merge_and_resolve(const QueryGraph& g, const Hypernode& a, const Hypernode& b,
                                   const TruthProvider& provider, const PlannerConfig& cfg, PlanTrace* trace = nullptr) {
    require(cfg.budget >= 1, "budget must be at least 1");
    Hypernode merged;
    std::vector<std::string> concat = a.members;
    concat.insert(concat.end(), b.members.begin(), b.members.end());
    merged.members = concat;
    std::sort(merged.members.begin(), merged.members.end());
    if (std::adjacent_find(merged.members.begin(), merged.members.end()) != merged.members.end())
        fail(ErrorKind::logic, "merge groups are not disjoint");
    merged.budget = merged.members.size() * cfg.budget;

    std::vector<std::size_t> layout;
    for (const auto& name : merged.members)
        layout.push_back(static_cast<std::size_t>(std::find(concat.begin(), concat.end(), name) - concat.begin()));

    auto plan = allocate_budget(a.count, b.count, merged.budget, a.vector.size(), b.vector.size());
    auto domain = build_joint_domain(a.vector, b.vector, plan, merged.budget, layout);
    merged.degenerate = !(a.count > 0.0) || !(b.count > 0.0);

    auto graph = detail::restrict_to(g, merged.members);
    auto result = solve_conjunctive(graph, merged.members, domain, provider, cfg.solver);
    merged.vector = std::move(result.values);
    merged.count = fuzzy_count(merged.vector);

    if (trace) {
        trace->truncated = trace->truncated || result.truncated;
        MergeStep step{merged.members, plan, domain.size(), merged.count, merged.degenerate, {}};
        if (cfg.record_domains) step.domain = std::move(domain);
        trace->steps.push_back(std::move(step));
    }
    return merged;
}

namespace detail {

inline std::vector<Hypernode> singleton_groups(const Marginals& m, std::size_t budget) {
    std::vector<Hypernode> groups;
    for (std::size_t i = 0; i < m.free_vars.size(); ++i)
        groups.push_back(Hypernode{{m.free_vars[i]}, m.vectors[i], budget, m.counts[i], !(m.counts[i] > 0.0)});
    return groups;
}

/// Greedy pick: the pair with the smallest count product, ties by member names.
inline std::pair<std::size_t, std::size_t> pick_pair(const std::vector<Hypernode>& groups) {
    std::pair<std::size_t, std::size_t> best{0, 1};
    bool found = false;
    double best_product = 0.0;
    for (std::size_t i = 0; i < groups.size(); ++i)
        for (std::size_t j = i + 1; j < groups.size(); ++j) {
            auto [x, y] = groups[i].members < groups[j].members ? std::pair{i, j} : std::pair{j, i};
            double product = groups[x].count * groups[y].count;
            bool better = !found || product < best_product ||
                          (product == best_product &&
                           std::tie(groups[x].members, groups[y].members) <
                               std::tie(groups[best.first].members, groups[best.second].members));
            if (better) {
                best = {x, y};
                best_product = product;
                found = true;
            }
        }
    return best;
}

/// Joint vector of one conjunct over its final hypernode, members lexicographic.
inline Hypernode answer_conjunct(const QueryGraph& g, const TruthProvider& provider, const PlannerConfig& cfg,
                                 PlanTrace& trace) {
    if (g.free_vars.size() == 1) {
        auto result = solve_conjunctive(g, g.free_vars.front(), provider, cfg.solver);
        trace.truncated = trace.truncated || result.truncated;
        double count = fuzzy_count(result.values);
        return Hypernode{g.free_vars, std::move(result.values), cfg.budget, count, false};
    }
    auto marginals = solve_conjunct_marginals(g, provider, cfg.solver);
    trace.truncated = trace.truncated || marginals.truncated;
    auto groups = singleton_groups(marginals, cfg.budget);

    if (cfg.schedule == MergeSchedule::simultaneous) {
        std::vector<std::string> concat;
        std::vector<std::size_t> caps;
        for (const auto& grp : groups) {
            concat.push_back(grp.members.front());
            caps.push_back(grp.vector.size());
        }
        Hypernode merged;
        merged.members = concat;
        std::sort(merged.members.begin(), merged.members.end());
        merged.budget = concat.size() * cfg.budget;
        auto alloc = allocate_budget(marginals.counts, merged.budget, caps);
        std::vector<FuzzyVector> factors;
        for (std::size_t i = 0; i < groups.size(); ++i) factors.push_back(top_b(groups[i].vector, alloc[i]));
        std::vector<std::size_t> layout;
        for (const auto& name : merged.members)
            layout.push_back(static_cast<std::size_t>(std::find(concat.begin(), concat.end(), name) - concat.begin()));
        auto domain = cartesian(factors, layout);
        if (domain.size() > merged.budget) domain = top_b(domain, merged.budget);
        merged.degenerate = std::any_of(groups.begin(), groups.end(), [](const Hypernode& h) { return h.degenerate; });
        auto result = solve_conjunctive(g, merged.members, domain, provider, cfg.solver);
        trace.truncated = trace.truncated || result.truncated;
        merged.vector = std::move(result.values);
        merged.count = fuzzy_count(merged.vector);
        BudgetPlan plan;
        plan.target = merged.budget;
        plan.b1 = alloc.front();
        plan.b2 = alloc.size() > 1 ? alloc[1] : 1;
        MergeStep step{merged.members, plan, domain.size(), merged.count, merged.degenerate, {}};
        if (cfg.record_domains) step.domain = std::move(domain);
        trace.steps.push_back(std::move(step));
        return merged;
    }

    while (groups.size() > 1) {
        auto [i, j] = pick_pair(groups);
        auto merged = merge_and_resolve(g, groups[i], groups[j], provider, cfg, &trace);
        groups.erase(groups.begin() + static_cast<std::ptrdiff_t>(std::max(i, j)));
        groups.erase(groups.begin() + static_cast<std::ptrdiff_t>(std::min(i, j)));
        groups.push_back(std::move(merged));
    }
    return std::move(groups.front());
}

}  // namespace detail

/// NS3(J): joint ranking of an EFO-k query under the per-variable budget.
inline JointResult answer_efok(const DnfQuery& q, const TruthProvider& provider, const PlannerConfig& cfg) {
    if (cfg.budget < 1) fail(ErrorKind::config, "budget must be at least 1");
    require(q.arity() >= 1, "query needs at least one free variable");
    require(!q.conjuncts.empty(), "query has no conjuncts");

    JointResult out;
    out.free_vars = q.free_vars;
    std::map<Tuple, double> combined;
    for (const auto& conjunct : q.conjuncts) {
        PlanTrace trace;
        auto node = detail::answer_conjunct(conjunct, provider, cfg, trace);
        // Map hypernode positions back to the canonical free-variable order.
        std::vector<std::size_t> source(q.arity());
        for (std::size_t p = 0; p < q.arity(); ++p)
            source[p] = static_cast<std::size_t>(
                std::find(node.members.begin(), node.members.end(), q.free_vars[p]) - node.members.begin());
        for (std::size_t i = 0; i < node.vector.size(); ++i) {
            double v = node.vector.value(i);
            auto c = node.vector.candidate(i);
            Tuple t(q.arity());
            for (std::size_t p = 0; p < t.size(); ++p) t[p] = c[source[p]];
            auto [it, inserted] = combined.try_emplace(std::move(t), v);
            if (!inserted) it->second = t_or(it->second, v);
        }
        // Recorded domains are stored in canonical order too.
        for (auto& step : trace.steps) {
            if (step.domain.empty() || step.members.size() != q.arity()) continue;
            std::vector<std::size_t> from(q.arity());
            for (std::size_t p = 0; p < q.arity(); ++p)
                from[p] = static_cast<std::size_t>(
                    std::find(step.members.begin(), step.members.end(), q.free_vars[p]) - step.members.begin());
            std::vector<EntityId> flat;
            for (std::size_t i = 0; i < step.domain.size(); ++i) {
                auto c = step.domain.candidate(i);
                for (std::size_t p = 0; p < from.size(); ++p) flat.push_back(c[from[p]]);
            }
            step.domain = FuzzyVector(q.arity(), std::move(flat),
                                      std::vector<double>(step.domain.values().begin(), step.domain.values().end()));
            step.members = q.free_vars;
        }
        out.conjunct_traces.push_back(std::move(trace));
    }
    for (auto& [tuple, score] : combined)
        if (score > 0.0) out.tuples.push_back({tuple, clamp_truth(score)});
    std::sort(out.tuples.begin(), out.tuples.end(), [](const ScoredTuple& a, const ScoredTuple& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.tuple < b.tuple;
    });
    return out;
}

inline AnswerSet JointResult::final_domain() const {
    AnswerSet out;
    for (const auto& trace : conjunct_traces) {
        if (trace.steps.empty()) continue;
        const auto& last = trace.steps.back();
        for (std::size_t i = 0; i < last.domain.size(); ++i) {
            auto c = last.domain.candidate(i);
            out.insert(Tuple(c.begin(), c.end()));
        }
    }
    return out;
}

}  // namespace ns3
