#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <limits>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "ns3/error.hpp"
#include "ns3/kg.hpp"
#include "ns3/query.hpp"

namespace ns3 {

enum class TiePolicy {
    mid,     // equal-scored non-answers count one half each
    strict,  // equal-scored non-answers all rank ahead
};

inline const char* to_string(TiePolicy p) { return p == TiePolicy::mid ? "mid" : "strict"; }

inline TiePolicy parse_tie_policy(std::string_view s) {
    if (s == "mid") return TiePolicy::mid;
    if (s == "strict") return TiePolicy::strict;
    fail(ErrorKind::config, "unknown tie policy '" + std::string(s) + "'");
}

/// A filtered rank stored as twice its value, so mid-tie halves stay exact.
struct Rank {
    std::uint64_t twice = 2;

    double value() const noexcept { return static_cast<double>(twice) / 2.0; }
    bool integral() const noexcept { return twice % 2 == 0; }
    bool within(std::uint64_t n) const noexcept { return twice <= 2 * n; }

    friend auto operator<=>(const Rank&, const Rank&) = default;
};

/// Sparse score table: tuples not listed score 0.
struct ScoreTable {
    std::size_t arity = 1;
    std::map<Tuple, double> scores;

    double score(const Tuple& t) const {
        auto it = scores.find(t);
        return it == scores.end() ? 0.0 : it->second;
    }
};

/// Easy and hard answers of one query plus their marginal projections.
struct AnswerSplit {
    std::size_t arity = 1;
    AnswerSet easy;
    AnswerSet hard;

    AnswerSplit() = default;
    AnswerSplit(std::size_t k, AnswerSet e, AnswerSet h) : arity(k), easy(std::move(e)), hard(std::move(h)) {
        validate();
    }

    void validate() const {
        for (const auto* set : {&easy, &hard})
            for (const auto& t : *set)
                if (t.size() != arity) fail(ErrorKind::data, "answer tuple arity does not match the query");
        for (const auto& t : hard)
            if (easy.count(t)) fail(ErrorKind::data, "a tuple is both an easy and a hard answer");
    }

    AnswerSet all() const {
        AnswerSet out = easy;
        out.insert(hard.begin(), hard.end());
        return out;
    }

    std::size_t size() const noexcept { return easy.size() + hard.size(); }

    AnswerSet marginal_all(std::size_t i) const {
        std::size_t pos[] = {i};
        return marginalize_answers(all(), pos);
    }

    AnswerSet marginal_easy(std::size_t i) const {
        std::size_t pos[] = {i};
        return marginalize_answers(easy, pos);
    }

    /// Projection of all answers minus projection of the easy answers.
    AnswerSet marginal_hard(std::size_t i) const {
        auto out = marginal_all(i);
        for (const auto& t : marginal_easy(i)) out.erase(t);
        return out;
    }
};

/// |E|^k with overflow detection.
inline std::uint64_t universe_size(std::uint64_t num_entities, std::size_t k) {
    std::uint64_t u = 1;
    for (std::size_t i = 0; i < k; ++i) {
        if (num_entities != 0 && u > std::numeric_limits<std::uint64_t>::max() / num_entities)
            fail(ErrorKind::resource, "candidate universe exceeds 64-bit range");
        u *= num_entities;
    }
    return u;
}

/// Ranks scores against the non-answers of one score table. Unscored
/// candidates are zero-scored non-answers; their count is derived from the
/// universe size.
class RankCounter {
   public:
    RankCounter(const ScoreTable& table, const AnswerSet& answers, std::uint64_t universe, TiePolicy policy)
        : policy_(policy) {
        for (const auto& [tuple, score] : table.scores) {
            if (answers.count(tuple)) continue;
            if (score > 0.0) positive_.push_back(score);
            else if (score < 0.0) fail(ErrorKind::data, "negative score in score table");
        }
        std::sort(positive_.begin(), positive_.end());
        std::uint64_t used = answers.size() + positive_.size();
        if (used > universe) fail(ErrorKind::data, "universe smaller than answers plus scored non-answers");
        zeros_ = universe - used;
    }

    Rank rank(double score) const {
        std::uint64_t greater = 0;
        std::uint64_t equal = 0;
        if (score > 0.0) {
            auto lo = std::lower_bound(positive_.begin(), positive_.end(), score);
            auto hi = std::upper_bound(lo, positive_.end(), score);
            greater = static_cast<std::uint64_t>(positive_.end() - hi);
            equal = static_cast<std::uint64_t>(hi - lo);
        } else {
            greater = positive_.size();
            equal = zeros_;
        }
        std::uint64_t tie_weight = policy_ == TiePolicy::mid ? 1 : 2;
        return Rank{2 + 2 * greater + tie_weight * equal};
    }

    std::uint64_t zero_non_answers() const noexcept { return zeros_; }

   private:
    TiePolicy policy_;
    std::vector<double> positive_;  // ascending
    std::uint64_t zeros_ = 0;
};

/// rank = 1 + |non-answers scored higher| + 1/2 |non-answers scored equal| (mid-tie).
inline Rank filtered_rank(const ScoreTable& table, const Tuple& target, const AnswerSplit& answers,
                          std::uint64_t universe, TiePolicy policy = TiePolicy::mid) {
    if (!answers.hard.count(target)) fail(ErrorKind::data, "rank target is not a hard answer");
    return RankCounter(table, answers.all(), universe, policy).rank(table.score(target));
}

// ---------------------------------------------------------------------------
// Joint-rank estimate

struct JointEstimate {
    std::uint64_t r_hat = 0;
    std::size_t k = 1;
    std::uint64_t estimate = 1;
    bool saturated = false;
};

/// C(n, k) exactly; saturates at the 64-bit maximum on overflow.
inline std::uint64_t binomial(std::uint64_t n, std::uint64_t k, bool* saturated = nullptr) {
    if (saturated) *saturated = false;
    if (k > n) return 0;
    k = std::min(k, n - k);
    unsigned __int128 c = 1;
    for (std::uint64_t i = 1; i <= k; ++i) {
        // c * (n - k + i) / i stays integral: it is C(n - k + i, i).
        c = c * (n - k + i) / i;
        if (c > std::numeric_limits<std::uint64_t>::max()) {
            if (saturated) *saturated = true;
            return std::numeric_limits<std::uint64_t>::max();
        }
    }
    return static_cast<std::uint64_t>(c);
}

/// R = sum(rank_i - 1), estimate = C(R + k, k). Ranks are 1-based integers.
inline JointEstimate joint_rank_estimate(std::span<const std::uint64_t> ranks) {
    require(!ranks.empty(), "joint estimate needs at least one rank");
    JointEstimate out;
    out.k = ranks.size();
    for (auto r : ranks) {
        require(r >= 1, "ranks are 1-based");
        if (out.r_hat > std::numeric_limits<std::uint64_t>::max() - (r - 1)) {
            out.saturated = true;
            out.estimate = std::numeric_limits<std::uint64_t>::max();
            out.r_hat = std::numeric_limits<std::uint64_t>::max();
            return out;
        }
        out.r_hat += r - 1;
    }
    if (out.r_hat > std::numeric_limits<std::uint64_t>::max() - out.k) {
        out.saturated = true;
        out.estimate = std::numeric_limits<std::uint64_t>::max();
        return out;
    }
    out.estimate = binomial(out.r_hat + out.k, out.k, &out.saturated);
    return out;
}

/// Real-valued form prod_{i=1..k} (R + i) / i, used when mid-tie ranks carry halves.
inline double joint_rank_estimate_real(std::span<const Rank> ranks) {
    require(!ranks.empty(), "joint estimate needs at least one rank");
    double r_hat = 0.0;
    for (const auto& r : ranks) r_hat += r.value() - 1.0;
    double estimate = 1.0;
    for (std::size_t i = 1; i <= ranks.size(); ++i) estimate *= (r_hat + static_cast<double>(i)) / static_cast<double>(i);
    return estimate;
}

// ---------------------------------------------------------------------------
// Per-query metrics

inline constexpr std::array<std::uint64_t, 3> kHitLevels{1, 3, 10};

struct MetricValues {
    double mrr = 0.0;
    std::array<double, kHitLevels.size()> hits{};

    MetricValues& operator+=(const MetricValues& o) {
        mrr += o.mrr;
        for (std::size_t i = 0; i < hits.size(); ++i) hits[i] += o.hits[i];
        return *this;
    }
    MetricValues scaled(double f) const {
        MetricValues m = *this;
        m.mrr *= f;
        for (auto& h : m.hits) h *= f;
        return m;
    }
};

namespace detail {

/// Mean of (1/rank, [rank <= n]...) over a list of ranks given as real values.
inline MetricValues mean_over(std::span<const double> ranks) {
    MetricValues m;
    if (ranks.empty()) return m;
    for (double r : ranks) {
        m.mrr += 1.0 / r;
        for (std::size_t i = 0; i < kHitLevels.size(); ++i)
            if (r <= static_cast<double>(kHitLevels[i])) m.hits[i] += 1.0;
    }
    return m.scaled(1.0 / static_cast<double>(ranks.size()));
}

}  // namespace detail

/// Per-variable MRR/HIT over the hard marginal answers, averaged over the
/// variables whose hard marginal set is non-empty. `counted` receives the
/// number of such variables.
inline MetricValues marginal_metrics(std::span<const ScoreTable> per_variable, const AnswerSplit& answers,
                                     std::uint64_t num_entities, TiePolicy policy = TiePolicy::mid,
                                     std::size_t* counted = nullptr) {
    if (per_variable.size() != answers.arity) fail(ErrorKind::data, "need one marginal score table per free variable");
    MetricValues sum;
    std::size_t used = 0;
    for (std::size_t i = 0; i < answers.arity; ++i) {
        auto hard = answers.marginal_hard(i);
        if (hard.empty()) continue;
        RankCounter counter(per_variable[i], answers.marginal_all(i), num_entities, policy);
        std::vector<double> ranks;
        for (const auto& t : hard) ranks.push_back(counter.rank(per_variable[i].score(t)).value());
        sum += detail::mean_over(ranks);
        ++used;
    }
    if (counted) *counted = used;
    return used ? sum.scaled(1.0 / static_cast<double>(used)) : sum;
}

/// 1 iff every component rank is within n.
inline int multiply_metric(std::span<const Rank> ranks, std::uint64_t n) {
    return std::all_of(ranks.begin(), ranks.end(), [n](const Rank& r) { return r.within(n); }) ? 1 : 0;
}

/// Marginal rank of every component of every hard tuple, each against the
/// non-answers of its variable. Row j belongs to the j-th hard tuple.
inline std::vector<std::vector<Rank>> component_ranks(std::span<const ScoreTable> per_variable,
                                                      const AnswerSplit& answers, std::uint64_t num_entities,
                                                      TiePolicy policy = TiePolicy::mid) {
    if (per_variable.size() != answers.arity) fail(ErrorKind::data, "need one marginal score table per free variable");
    std::vector<RankCounter> counters;
    for (std::size_t i = 0; i < answers.arity; ++i)
        counters.emplace_back(per_variable[i], answers.marginal_all(i), num_entities, policy);
    std::vector<std::vector<Rank>> out;
    for (const auto& t : answers.hard) {
        std::vector<Rank> row;
        for (std::size_t i = 0; i < answers.arity; ++i) row.push_back(counters[i].rank(per_variable[i].score({t[i]})));
        out.push_back(std::move(row));
    }
    return out;
}

/// Multiply protocol over hard tuples: HIT@n = every component within n;
/// MRR uses the reciprocal of the worst component rank.
inline MetricValues multiply_metrics(const std::vector<std::vector<Rank>>& ranks) {
    std::vector<double> worst;
    for (const auto& row : ranks) worst.push_back(std::max_element(row.begin(), row.end())->value());
    return detail::mean_over(worst);
}

/// Joint-estimate protocol: each hard tuple ranks at C(R + k, k).
inline MetricValues joint_estimate_metrics(const std::vector<std::vector<Rank>>& ranks) {
    std::vector<double> estimates;
    for (const auto& row : ranks) {
        bool integral = std::all_of(row.begin(), row.end(), [](const Rank& r) { return r.integral(); });
        if (integral) {
            std::vector<std::uint64_t> ints;
            for (const auto& r : row) ints.push_back(r.twice / 2);
            estimates.push_back(static_cast<double>(joint_rank_estimate(ints).estimate));
        } else {
            estimates.push_back(joint_rank_estimate_real(row));
        }
    }
    return detail::mean_over(estimates);
}

/// Tuple ranks of the hard answers against all |E|^k candidates.
inline std::vector<Rank> joint_ranks(const ScoreTable& joint, const AnswerSplit& answers, std::uint64_t num_entities,
                                     TiePolicy policy = TiePolicy::mid) {
    if (joint.arity != answers.arity) fail(ErrorKind::data, "joint score table arity does not match the query");
    RankCounter counter(joint, answers.all(), universe_size(num_entities, answers.arity), policy);
    std::vector<Rank> out;
    for (const auto& t : answers.hard) out.push_back(counter.rank(joint.score(t)));
    return out;
}

inline MetricValues joint_true_metrics(const ScoreTable& joint, const AnswerSplit& answers,
                                       std::uint64_t num_entities, TiePolicy policy = TiePolicy::mid) {
    std::vector<double> values;
    for (const auto& r : joint_ranks(joint, answers, num_entities, policy)) values.push_back(r.value());
    return detail::mean_over(values);
}

/// Fraction of gold tuples present in a joint domain.
inline double recall_after_pruning(const AnswerSet& domain, const AnswerSet& gold) {
    if (gold.empty()) return 1.0;
    std::size_t kept = 0;
    for (const auto& t : gold) kept += domain.count(t);
    return static_cast<double>(kept) / static_cast<double>(gold.size());
}

// ---------------------------------------------------------------------------
// Aggregation

enum class Protocol { marginal, multiply, joint_estimate, joint_true };
inline constexpr std::array<Protocol, 4> kProtocols{Protocol::marginal, Protocol::multiply, Protocol::joint_estimate,
                                                    Protocol::joint_true};

inline const char* to_string(Protocol p) {
    switch (p) {
        case Protocol::marginal: return "marginal";
        case Protocol::multiply: return "multiply";
        case Protocol::joint_estimate: return "joint_estimate";
        case Protocol::joint_true: return "joint_true";
    }
    return "?";
}

/// Metrics of one query. Protocols that could not be computed (no marginal
/// scores, no joint scores, empty hard sets) are absent from `values`.
struct QueryMetrics {
    std::string id;
    std::string type;
    std::size_t hard_answers = 0;
    std::map<Protocol, MetricValues> values;
};

/// Scores available for one query. Either part may be missing.
struct QueryScores {
    std::vector<ScoreTable> marginals;  // one per free variable, or empty
    bool has_joint = false;
    ScoreTable joint;
};

inline QueryMetrics evaluate_query(const std::string& id, const std::string& type, const QueryScores& scores,
                                   const AnswerSplit& answers, std::uint64_t num_entities,
                                   TiePolicy policy = TiePolicy::mid) {
    QueryMetrics m{id, type, answers.hard.size(), {}};
    if (answers.hard.empty()) return m;
    if (!scores.marginals.empty()) {
        std::size_t counted = 0;
        auto marginal = marginal_metrics(scores.marginals, answers, num_entities, policy, &counted);
        if (counted) m.values[Protocol::marginal] = marginal;
        auto ranks = component_ranks(scores.marginals, answers, num_entities, policy);
        m.values[Protocol::multiply] = multiply_metrics(ranks);
        m.values[Protocol::joint_estimate] = joint_estimate_metrics(ranks);
    }
    if (scores.has_joint) m.values[Protocol::joint_true] = joint_true_metrics(scores.joint, answers, num_entities, policy);
    return m;
}

struct MetricBlock {
    std::size_t queries = 0;  // queries contributing to any protocol
    std::size_t skipped = 0;  // queries with an empty hard set
    std::size_t hard_answers = 0;
    std::map<Protocol, MetricValues> means;
    std::map<Protocol, std::size_t> counts;
};

/// Per-type and overall unweighted means over queries. Input order does not
/// matter: queries are reduced in id order.
struct EvalReport {
    std::map<std::string, MetricBlock> per_type;
    MetricBlock overall;

    static EvalReport aggregate(std::vector<QueryMetrics> queries) {
        std::sort(queries.begin(), queries.end(), [](const QueryMetrics& a, const QueryMetrics& b) { return a.id < b.id; });
        EvalReport report;
        std::map<std::string, std::map<Protocol, MetricValues>> type_sums;
        std::map<Protocol, MetricValues> overall_sums;
        for (const auto& q : queries) {
            for (auto* block : {&report.per_type[q.type], &report.overall}) {
                if (q.values.empty()) {
                    ++block->skipped;
                    continue;
                }
                ++block->queries;
                block->hard_answers += q.hard_answers;
                for (const auto& [protocol, value] : q.values) ++block->counts[protocol];
            }
            for (const auto& [protocol, value] : q.values) {
                type_sums[q.type][protocol] += value;
                overall_sums[protocol] += value;
            }
        }
        auto finish = [](MetricBlock& block, const std::map<Protocol, MetricValues>& sums) {
            for (const auto& [protocol, sum] : sums)
                block.means[protocol] = sum.scaled(1.0 / static_cast<double>(block.counts[protocol]));
        };
        for (auto& [type, block] : report.per_type) finish(block, type_sums[type]);
        finish(report.overall, overall_sums);
        return report;
    }
};

}  // namespace ns3
