#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ns3/error.hpp"
#include "ns3/fuzzy.hpp"
#include "ns3/predictor.hpp"
#include "ns3/query.hpp"

namespace ns3 {

struct SolverConfig {
    /// Candidates enumerated for the node chosen to break a cycle.
    std::size_t cycle_cap = 10;
    /// Divide the target vector by its maximum after every external constraint.
    bool max_normalize = false;
    /// Record one TraceStep per elimination.
    bool trace = false;
    /// Non-zero: apply the applicable elimination rules in a seeded random
    /// order instead of the canonical one. Used to check order independence.
    std::uint64_t order_seed = 0;
};

enum class EliminationRule { constant_edge, self_loop, leaf, isolated, cycle_branch };

inline const char* to_string(EliminationRule rule) {
    switch (rule) {
        case EliminationRule::constant_edge: return "constant";
        case EliminationRule::self_loop: return "self-loop";
        case EliminationRule::leaf: return "leaf";
        case EliminationRule::isolated: return "isolated";
        case EliminationRule::cycle_branch: return "cycle";
    }
    return "?";
}

struct TraceStep {
    EliminationRule rule;
    std::vector<std::size_t> edges;  // source edge ids removed by this step
    std::size_t support = 0;         // positive entries of the updated vector afterwards
    std::string note;
};

struct SolveResult {
    FuzzyVector values;  // over the target domain, in its order
    std::vector<TraceStep> trace;
    bool truncated = false;  // some cycle branch enumerated fewer candidates than its support
};

namespace detail {

/// Edge-elimination solver over one conjunctive query graph with a single
/// target node. The target is either a plain free variable (entity domain) or
/// a hypernode whose domain is an explicit tuple list. Every factor applied to
/// a node is kept separately and multiplied in edge-id order when the node is
/// read, so results do not depend on the order rules fire.
class EliminationSolver {
   public:
    EliminationSolver(const QueryGraph& g, std::span<const std::string> members, const FuzzyVector& target_domain,
                      const TruthProvider& provider, const SolverConfig& cfg)
        : provider_(&provider), cfg_(&cfg), num_entities_(provider.num_entities()) {
        if (members.empty()) fail(ErrorKind::logic, "solve needs a target node");
        require(target_domain.arity() == members.size(), "target domain arity does not match the target members");
        for (const auto& name : members)
            if (!g.is_free(name)) fail(ErrorKind::logic, "target member '" + name + "' is not a free variable");

        Node target;
        target.target = true;
        target.arity = members.size();
        target.flat.assign(target_domain.flat().begin(), target_domain.flat().end());
        target.base.assign(target_domain.values().begin(), target_domain.values().end());
        nodes_.push_back(std::move(target));
        for (EntityId e : target_domain.flat())
            if (e >= num_entities_) fail(ErrorKind::logic, "target domain references an unknown entity");

        std::map<std::string, std::size_t> existential;
        auto endpoint = [&](const Term& t) -> Endpoint {
            if (t.is_constant()) {
                if (t.placeholder) fail(ErrorKind::logic, "query still has template placeholders");
                if (t.entity >= num_entities_) fail(ErrorKind::logic, "constant out of range");
                return Endpoint{true, t.entity, 0, 0};
            }
            if (t.kind == TermKind::free) {
                auto it = std::find(members.begin(), members.end(), t.name);
                if (it == members.end())
                    fail(ErrorKind::logic, "free variable '" + t.name + "' must be marginalized or merged into the target");
                return Endpoint{false, 0, 0, static_cast<std::size_t>(it - members.begin())};
            }
            auto [it, inserted] = existential.try_emplace(t.name, nodes_.size());
            if (inserted) {
                Node n;
                n.base.assign(num_entities_, 1.0);
                nodes_.push_back(std::move(n));
            }
            return Endpoint{false, 0, it->second, 0};
        };
        for (const auto& name : g.exist_vars) endpoint(Term::existential(name));
        for (std::size_t i = 0; i < g.edges.size(); ++i) {
            const auto& e = g.edges[i];
            if (e.relation_placeholder) fail(ErrorKind::logic, "query still has template placeholders");
            if (e.relation >= provider.num_relations()) fail(ErrorKind::logic, "relation out of range");
            edges_.push_back(Edge{i, endpoint(e.head), endpoint(e.tail), e.relation, e.negated, true});
        }
    }

    SolveResult run() {
        SolveResult result;
        std::mt19937_64 rng(cfg_->order_seed);
        auto values = solve(rng, result);
        result.values = FuzzyVector(nodes_[0].arity, nodes_[0].flat, std::move(values));
        return result;
    }

   private:
    struct Endpoint {
        bool constant = false;
        EntityId entity = 0;
        std::size_t node = 0;
        std::size_t pos = 0;  // tuple position when node is the target
    };

    struct Edge {
        std::size_t id;
        Endpoint head;
        Endpoint tail;
        RelationId relation;
        bool negated;
        bool alive;
    };

    struct Node {
        bool target = false;
        bool alive = true;
        std::size_t arity = 1;
        std::vector<EntityId> flat;  // target only; ordinary nodes range over all entities
        std::vector<double> base;
        std::vector<std::pair<std::size_t, std::vector<double>>> factors;
    };

    struct Action {
        EliminationRule rule;
        std::size_t key;  // edge index, or node index for leaf/isolated
    };

    // -- node helpers -------------------------------------------------------

    EntityId entity_at(const Node& n, std::size_t i, std::size_t pos) const {
        return n.target ? n.flat[i * n.arity + pos] : static_cast<EntityId>(i);
    }

    std::vector<double> materialize(const Node& n) const {
        std::vector<double> values = n.base;
        auto order = n.factors;
        std::stable_sort(order.begin(), order.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
        for (const auto& [key, f] : order)
            for (std::size_t i = 0; i < values.size(); ++i) values[i] *= f[i];
        return values;
    }

    void add_factor(std::size_t node, std::size_t key, std::vector<double> factor) {
        auto& n = nodes_[node];
        n.factors.emplace_back(key, std::move(factor));
        if (n.target && cfg_->max_normalize) {
            auto values = materialize(n);
            double top = 0.0;
            for (double v : values) top = std::max(top, v);
            if (top > 0.0)
                for (double& v : values) v /= top;
            n.base = std::move(values);
            n.factors.clear();
        }
    }

    /// Distinct entities at `pos` across the node's domain, and each element's index into them.
    struct Projection {
        std::vector<EntityId> distinct;
        std::vector<std::uint32_t> index;  // empty for ordinary nodes (identity)
    };

    Projection project(const Node& n, std::size_t pos) const {
        Projection p;
        if (!n.target) {
            p.distinct.resize(num_entities_);
            std::iota(p.distinct.begin(), p.distinct.end(), EntityId{0});
            return p;
        }
        std::size_t count = n.base.size();
        p.distinct.reserve(count);
        for (std::size_t i = 0; i < count; ++i) p.distinct.push_back(entity_at(n, i, pos));
        std::sort(p.distinct.begin(), p.distinct.end());
        p.distinct.erase(std::unique(p.distinct.begin(), p.distinct.end()), p.distinct.end());
        p.index.resize(count);
        for (std::size_t i = 0; i < count; ++i)
            p.index[i] = static_cast<std::uint32_t>(
                std::lower_bound(p.distinct.begin(), p.distinct.end(), entity_at(n, i, pos)) - p.distinct.begin());
        return p;
    }

    static std::size_t at(const Projection& p, std::size_t i) { return p.index.empty() ? i : p.index[i]; }

    /// degrees[j] = tau(anchor, candidates[j]) where the anchor sits on the `anchor_is_head` side of e.
    void oriented_slice(const Edge& e, bool anchor_is_head, EntityId anchor, std::span<const EntityId> candidates,
                        std::span<double> out) const {
        provider_->truth_slice(anchor_is_head ? Anchor::head : Anchor::tail, anchor, e.relation, candidates, out);
        if (e.negated)
            for (double& d : out) d = t_not(d);
    }

    static std::size_t count_positive(std::span<const double> v) {
        return static_cast<std::size_t>(std::count_if(v.begin(), v.end(), [](double x) { return x > 0.0; }));
    }

    void record(SolveResult& result, EliminationRule rule, std::vector<std::size_t> edges, std::size_t node,
                std::string note = {}) const {
        if (!cfg_->trace) return;
        auto values = materialize(nodes_[node]);
        result.trace.push_back({rule, std::move(edges), count_positive(values), std::move(note)});
    }

    // -- rules ----------------------------------------------------------------

    std::vector<std::size_t> incident(std::size_t node) const {
        std::vector<std::size_t> out;
        for (std::size_t k = 0; k < edges_.size(); ++k) {
            const auto& e = edges_[k];
            if (!e.alive) continue;
            if ((!e.head.constant && e.head.node == node) || (!e.tail.constant && e.tail.node == node)) out.push_back(k);
        }
        return out;
    }

    std::vector<Action> applicable() const {
        std::vector<Action> actions;
        for (std::size_t k = 0; k < edges_.size(); ++k) {
            const auto& e = edges_[k];
            if (!e.alive) continue;
            if (e.head.constant || e.tail.constant)
                actions.push_back({EliminationRule::constant_edge, k});
            else if (e.head.node == e.tail.node)
                actions.push_back({EliminationRule::self_loop, k});
        }
        for (std::size_t n = 1; n < nodes_.size(); ++n) {
            if (!nodes_[n].alive) continue;
            auto inc = incident(n);
            if (inc.empty()) {
                actions.push_back({EliminationRule::isolated, n});
                continue;
            }
            std::size_t other = std::numeric_limits<std::size_t>::max();
            bool leaf = true;
            for (std::size_t k : inc) {
                const auto& e = edges_[k];
                if (e.head.constant || e.tail.constant || e.head.node == e.tail.node) {
                    leaf = false;
                    break;
                }
                std::size_t v = e.head.node == n ? e.tail.node : e.head.node;
                if (other == std::numeric_limits<std::size_t>::max()) other = v;
                if (v != other) {
                    leaf = false;
                    break;
                }
            }
            if (leaf) actions.push_back({EliminationRule::leaf, n});
        }
        return actions;
    }

    void apply_constant_edge(std::size_t k, SolveResult& result) {
        auto& e = edges_[k];
        e.alive = false;
        if (e.head.constant && e.tail.constant) {
            double d = provider_->truth(e.head.entity, e.relation, e.tail.entity);
            scalars_.emplace_back(e.id, e.negated ? t_not(d) : d);
            if (cfg_->trace) result.trace.push_back({EliminationRule::constant_edge, {e.id}, 0, "scalar"});
            return;
        }
        bool constant_is_head = e.head.constant;
        const Endpoint& c = constant_is_head ? e.head : e.tail;
        const Endpoint& v = constant_is_head ? e.tail : e.head;
        const Node& node = nodes_[v.node];
        auto proj = project(node, v.pos);
        std::vector<double> slice(proj.distinct.size());
        oriented_slice(e, constant_is_head, c.entity, proj.distinct, slice);
        std::vector<double> factor(node.base.size());
        for (std::size_t i = 0; i < factor.size(); ++i) factor[i] = slice[at(proj, i)];
        add_factor(v.node, e.id, std::move(factor));
        record(result, EliminationRule::constant_edge, {e.id}, v.node);
    }

    void apply_self_loop(std::size_t k, SolveResult& result) {
        auto& e = edges_[k];
        e.alive = false;
        const Node& node = nodes_[e.head.node];
        std::vector<double> factor(node.base.size());
        for (std::size_t i = 0; i < factor.size(); ++i) {
            double d = provider_->truth(entity_at(node, i, e.head.pos), e.relation, entity_at(node, i, e.tail.pos));
            factor[i] = e.negated ? t_not(d) : d;
        }
        add_factor(e.head.node, e.id, std::move(factor));
        record(result, EliminationRule::self_loop, {e.id}, e.head.node);
    }

    void apply_isolated(std::size_t n, SolveResult& result) {
        auto values = materialize(nodes_[n]);
        double best = 0.0;
        for (double x : values) best = std::max(best, x);
        nodes_[n].alive = false;
        scalars_.emplace_back(std::numeric_limits<std::size_t>::max() / 2 + n, best);
        if (cfg_->trace) result.trace.push_back({EliminationRule::isolated, {}, 0, "node " + std::to_string(n)});
    }

    /// Eliminates existential node u whose remaining edges all join one node v:
    /// m[t] = max_i C_u[i] * prod_e tau_e(i, t[p_e]).
    void apply_leaf(std::size_t u, SolveResult& result) {
        auto group = incident(u);
        const auto& first = edges_[group.front()];
        std::size_t v = first.head.node == u ? first.tail.node : first.head.node;
        const Node& target = nodes_[v];
        std::sort(group.begin(), group.end(), [&](std::size_t a, std::size_t b) { return edges_[a].id < edges_[b].id; });

        auto cu = materialize(nodes_[u]);
        std::vector<std::size_t> support;
        for (std::size_t i = 0; i < cu.size(); ++i)
            if (cu[i] > 0.0) support.push_back(i);

        // Per-edge projections of v's domain at the touched position.
        std::vector<Projection> proj;
        std::vector<bool> u_is_head;
        bool single_position = true;
        for (std::size_t k : group) {
            const auto& e = edges_[k];
            bool head_side = e.head.node == u;
            u_is_head.push_back(head_side);
            std::size_t pos = head_side ? e.tail.pos : e.head.pos;
            if (pos != (first.head.node == u ? first.tail.pos : first.head.pos)) single_position = false;
            proj.push_back(project(target, pos));
        }

        const std::size_t size = target.base.size();
        std::vector<double> message(size, 0.0);
        std::vector<std::vector<double>> slices(group.size());
        for (std::size_t g = 0; g < group.size(); ++g) slices[g].resize(proj[g].distinct.size());

        if (single_position) {
            const std::size_t width = proj[0].distinct.size();
            std::vector<double> reduced(width, 0.0);
            for (std::size_t i : support) {
                for (std::size_t g = 0; g < group.size(); ++g)
                    oriented_slice(edges_[group[g]], u_is_head[g], static_cast<EntityId>(i), proj[g].distinct, slices[g]);
                for (std::size_t d = 0; d < width; ++d) {
                    double val = cu[i];
                    for (std::size_t g = 0; g < group.size(); ++g) val = t_and(val, slices[g][d]);
                    reduced[d] = std::max(reduced[d], val);
                }
            }
            for (std::size_t t = 0; t < size; ++t) message[t] = reduced[at(proj[0], t)];
        } else {
            for (std::size_t i : support) {
                for (std::size_t g = 0; g < group.size(); ++g)
                    oriented_slice(edges_[group[g]], u_is_head[g], static_cast<EntityId>(i), proj[g].distinct, slices[g]);
                for (std::size_t t = 0; t < size; ++t) {
                    double val = cu[i];
                    for (std::size_t g = 0; g < group.size(); ++g) val = t_and(val, slices[g][at(proj[g], t)]);
                    message[t] = std::max(message[t], val);
                }
            }
        }

        std::vector<std::size_t> ids;
        for (std::size_t k : group) {
            edges_[k].alive = false;
            ids.push_back(edges_[k].id);
        }
        nodes_[u].alive = false;
        add_factor(v, ids.front(), std::move(message));
        record(result, EliminationRule::leaf, ids, v);
    }

    // -- driver ---------------------------------------------------------------

    std::vector<double> solve(std::mt19937_64& rng, SolveResult& result) {
        while (true) {
            auto actions = applicable();
            if (actions.empty()) break;
            std::size_t pick = 0;
            if (cfg_->order_seed != 0) pick = std::uniform_int_distribution<std::size_t>(0, actions.size() - 1)(rng);
            const auto& a = actions[pick];
            switch (a.rule) {
                case EliminationRule::constant_edge: apply_constant_edge(a.key, result); break;
                case EliminationRule::self_loop: apply_self_loop(a.key, result); break;
                case EliminationRule::isolated: apply_isolated(a.key, result); break;
                case EliminationRule::leaf: apply_leaf(a.key, result); break;
                case EliminationRule::cycle_branch: break;
            }
        }
        bool cyclic = std::any_of(edges_.begin(), edges_.end(), [](const Edge& e) { return e.alive; });
        if (cyclic) return branch(rng, result);
        return finish();
    }

    std::vector<double> finish() const {
        auto values = materialize(nodes_[0]);
        auto scalars = scalars_;
        std::stable_sort(scalars.begin(), scalars.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
        for (const auto& [key, s] : scalars)
            for (double& v : values) v *= s;
        for (double& v : values) v = clamp_truth(v);
        return values;
    }

    /// Conditions on the non-target node with the smallest positive support:
    /// each of its top candidates becomes a constant, branches combine by max.
    std::vector<double> branch(std::mt19937_64& rng, SolveResult& result) {
        std::size_t chosen = 0;
        std::size_t best_support = std::numeric_limits<std::size_t>::max();
        std::vector<double> chosen_values;
        for (std::size_t n = 1; n < nodes_.size(); ++n) {
            if (!nodes_[n].alive || incident(n).empty()) continue;
            auto values = materialize(nodes_[n]);
            auto s = count_positive(values);
            if (s < best_support) {
                best_support = s;
                chosen = n;
                chosen_values = std::move(values);
            }
        }
        require(chosen != 0, "cyclic remainder without a non-target node");

        std::vector<std::size_t> order;
        for (std::size_t i = 0; i < chosen_values.size(); ++i)
            if (chosen_values[i] > 0.0) order.push_back(i);
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return chosen_values[a] > chosen_values[b]; });
        if (order.size() > cfg_->cycle_cap) {
            result.truncated = true;
            order.resize(cfg_->cycle_cap);
        }
        if (cfg_->trace)
            result.trace.push_back({EliminationRule::cycle_branch, {}, order.size(),
                                    "node " + std::to_string(chosen) + (result.truncated ? " (truncated)" : "")});

        std::vector<double> combined(nodes_[0].base.size(), 0.0);
        for (std::size_t candidate : order) {
            EliminationSolver copy = *this;
            for (auto& e : copy.edges_) {
                if (!e.alive) continue;
                for (Endpoint* ep : {&e.head, &e.tail})
                    if (!ep->constant && ep->node == chosen) *ep = Endpoint{true, static_cast<EntityId>(candidate), 0, 0};
            }
            copy.nodes_[chosen].alive = false;
            copy.scalars_.emplace_back(std::numeric_limits<std::size_t>::max() / 4 + chosen, chosen_values[candidate]);
            auto values = copy.solve(rng, result);
            for (std::size_t i = 0; i < combined.size(); ++i) combined[i] = std::max(combined[i], values[i]);
        }
        return combined;
    }

    const TruthProvider* provider_;
    const SolverConfig* cfg_;
    std::size_t num_entities_;
    std::vector<Node> nodes_;  // nodes_[0] is the target
    std::vector<Edge> edges_;
    std::vector<std::pair<std::size_t, double>> scalars_;
};

}  // namespace detail

/// Solves a conjunctive query graph for one target node. `members` names the
/// free variables covered by the target in tuple-position order (one name for
/// a plain free variable); `target_domain` holds the candidate tuples and their
/// initial degrees. Every other free variable must already be marginalized.
inline SolveResult solve_conjunctive(const QueryGraph& g, std::span<const std::string> members,
                                     const FuzzyVector& target_domain, const TruthProvider& provider,
                                     const SolverConfig& cfg = {}) {
    if (cfg.cycle_cap < 1) fail(ErrorKind::config, "cycle cap must be at least 1");
    return detail::EliminationSolver(g, members, target_domain, provider, cfg).run();
}

/// Single free variable over the full entity domain.
inline SolveResult solve_conjunctive(const QueryGraph& g, const std::string& target, const TruthProvider& provider,
                                     const SolverConfig& cfg = {}) {
    return solve_conjunctive(g, std::span<const std::string>(&target, 1),
                             FuzzyVector::over_entities(provider.num_entities()), provider, cfg);
}

}  // namespace ns3
