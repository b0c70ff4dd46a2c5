#include <gtest/gtest.h>

#include <random>

#include "ns3/metrics.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

using namespace ns3;

namespace {

AnswerSplit two_answers() { return AnswerSplit(2, {{0, 0}}, {{1, 1}}); }

void expect_same(const MetricValues& got, const oracle::NaiveMetrics& want) {
    EXPECT_EQ(got.mrr, want.mrr);
    for (int i = 0; i < 3; ++i) EXPECT_EQ(got.hits[i], want.hits[i]);
}

}  // namespace

TEST(FilteredRank, WorkedExamples) {
    auto a = two_answers();
    ScoreTable t{2, {{{2, 2}, 0.9}, {{1, 1}, 0.8}}};
    EXPECT_EQ(filtered_rank(t, {1, 1}, a, 25).value(), 2.0);

    ScoreTable z{2, {{{2, 2}, 0.9}, {{3, 3}, 0.5}, {{4, 4}, 0.1}}};
    EXPECT_EQ(filtered_rank(z, {1, 1}, a, 25).value(), 14.0);

    ScoreTable top{2, {{{1, 1}, 1.0}, {{2, 2}, 0.5}}};
    EXPECT_EQ(filtered_rank(top, {1, 1}, a, 25).value(), 1.0);

    ScoreTable pruned{2, {}};
    EXPECT_EQ(filtered_rank(pruned, {1, 1}, a, 25).value(), 12.5);
    EXPECT_FALSE(filtered_rank(pruned, {1, 1}, a, 25).integral());
    EXPECT_EQ(filtered_rank(pruned, {1, 1}, a, 25, TiePolicy::strict).value(), 24.0);
}

TEST(FilteredRank, ErrorsOnBadInputs) {
    auto a = two_answers();
    ScoreTable t{2, {}};
    EXPECT_THROW(filtered_rank(t, {0, 0}, a, 25), Error);  // easy answer is not ranked
    EXPECT_THROW(filtered_rank(t, {1, 1}, a, 1), Error);
    ScoreTable neg{2, {{{3, 3}, -0.1}}};
    EXPECT_THROW(filtered_rank(neg, {1, 1}, a, 25), Error);
    EXPECT_THROW(AnswerSplit(2, {{0, 0}}, {{0, 0}}), Error);
    EXPECT_THROW(AnswerSplit(2, {{0}}, {}), Error);
    EXPECT_THROW(parse_tie_policy("optimistic"), Error);
}

TEST(FilteredRank, MatchesNaiveScanIncludingHalves) {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 300; ++trial) {
        auto in = gen::random_metric_instance(rng);
        auto all = in.answers.all();
        std::uint64_t u = universe_size(in.entities, in.answers.arity);
        for (const auto& t : in.answers.hard)
            for (auto policy : {TiePolicy::mid, TiePolicy::strict})
                EXPECT_EQ(filtered_rank(in.joint, t, in.answers, u, policy).twice,
                          oracle::naive_twice_rank(in.joint, t, all, in.entities, in.answers.arity,
                                                   policy == TiePolicy::strict));
    }
}

TEST(FilteredRank, InvariantUnderIncreasingTransforms) {
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 100; ++trial) {
        auto in = gen::random_metric_instance(rng);
        ScoreTable warped = in.joint;
        for (auto& [t, s] : warped.scores) s = std::sqrt(s) * 0.5 + 0.25;  // still positive, order kept
        std::uint64_t u = universe_size(in.entities, in.answers.arity);
        for (const auto& t : in.answers.hard) {
            // Zero scores map to an implicit zero, positives stay above it.
            EXPECT_EQ(filtered_rank(in.joint, t, in.answers, u), filtered_rank(warped, t, in.answers, u));
        }
    }
}

TEST(FilteredRank, LargeUniverseWithoutOverflow) {
    const std::uint64_t ne = 63361;
    AnswerSplit a(3, {{0, 0, 0}}, {{1, 1, 1}, {2, 2, 2}});
    ScoreTable t{3, {{{1, 1, 1}, 0.5}, {{5, 5, 5}, 0.9}, {{6, 6, 6}, 0.5}, {{7, 7, 7}, 0.1}}};
    std::uint64_t u = universe_size(ne, 3);
    unsigned __int128 expect_u = static_cast<unsigned __int128>(ne) * ne * ne;
    EXPECT_EQ(u, static_cast<std::uint64_t>(expect_u));
    EXPECT_EQ(u, 254370104714881ull);
    // (1,1,1): one greater, one equal.
    EXPECT_EQ(filtered_rank(t, {1, 1, 1}, a, u).twice, 2u + 2u + 1u);
    // (2,2,2) scores 0: three positive non-answers ahead, the rest tie.
    std::uint64_t zeros = u - 3 - 3;  // 3 answers, 3 positive non-answers
    EXPECT_EQ(filtered_rank(t, {2, 2, 2}, a, u).twice, 2u + 2u * 3u + zeros);
    EXPECT_THROW(universe_size(1ull << 32, 3), Error);
}

TEST(JointEstimate, WorkedExamples) {
    std::uint64_t a[] = {2, 3};
    auto e = joint_rank_estimate(a);
    EXPECT_EQ(e.r_hat, 3u);
    EXPECT_EQ(e.estimate, 10u);
    std::uint64_t b[] = {1, 1, 1};
    EXPECT_EQ(joint_rank_estimate(b).estimate, 1u);
    std::uint64_t c[] = {5};
    EXPECT_EQ(joint_rank_estimate(c).estimate, 5u);
    std::uint64_t zero[] = {0};
    EXPECT_THROW(joint_rank_estimate(zero), Error);
}

TEST(JointEstimate, EqualsLatticePointCount) {
    for (std::size_t k = 1; k <= 4; ++k)
        for (std::uint64_t r = 0; r <= 50; ++r) {
            std::vector<std::uint64_t> ranks(k, 1);
            ranks[0] += r;
            EXPECT_EQ(joint_rank_estimate(ranks).estimate, oracle::lattice_points(r, k)) << "k=" << k << " r=" << r;
        }
}

TEST(JointEstimate, SaturatesInsteadOfWrapping) {
    std::uint64_t big[] = {1ull << 40, 1ull << 40, 1ull << 40, 1ull << 40};
    auto e = joint_rank_estimate(big);
    EXPECT_TRUE(e.saturated);
    EXPECT_EQ(e.estimate, std::numeric_limits<std::uint64_t>::max());
    bool sat = false;
    EXPECT_EQ(binomial(60, 30, &sat), 118264581564861424ull);
    EXPECT_FALSE(sat);
}

TEST(JointEstimate, RealFormWithHalves) {
    Rank r[] = {Rank{5}, Rank{2}};  // 2.5 and 1
    // R = 1.5, (R + 1)(R + 2) / 2
    EXPECT_DOUBLE_EQ(joint_rank_estimate_real(r), 2.5 * 3.5 / 2.0);
    Rank i[] = {Rank{4}, Rank{6}};
    EXPECT_DOUBLE_EQ(joint_rank_estimate_real(i), 10.0);
}

TEST(Metrics, PerProtocolExamples) {
    Rank a[] = {Rank{6}, Rank{24}};
    Rank b[] = {Rank{6}, Rank{14}};
    EXPECT_EQ(multiply_metric(a, 10), 0);
    EXPECT_EQ(multiply_metric(b, 10), 1);

    // Two variables with single hard answers ranked 1 and 11.
    AnswerSplit s(2, {}, {{0, 0}});
    ScoreTable first{1, {{{0}, 1.0}}};
    ScoreTable second{1, {}};
    for (EntityId e = 1; e <= 10; ++e) second.scores[{e}] = 1.0;
    second.scores[{0}] = 0.5;
    std::vector<ScoreTable> tables{first, second};
    auto m = marginal_metrics(tables, s, 12);
    EXPECT_DOUBLE_EQ(m.hits[2], 0.5);
    EXPECT_DOUBLE_EQ(m.mrr, (1.0 + 1.0 / 11.0) / 2.0);
    auto mult = multiply_metrics(component_ranks(tables, s, 12));
    EXPECT_DOUBLE_EQ(mult.mrr, 1.0 / 11.0);
    EXPECT_EQ(mult.hits[2], 0.0);
}

TEST(Metrics, MatchNaiveReferenceOnRandomTables) {
    std::mt19937_64 rng(101);
    for (int trial = 0; trial < 400; ++trial) {
        auto in = gen::random_metric_instance(rng);
        if (in.answers.hard.empty()) continue;
        oracle::NaiveMetrics want;
        std::size_t counted = 0;
        auto got = marginal_metrics(in.marginals, in.answers, in.entities, TiePolicy::mid, &counted);
        bool any = oracle::naive_marginal(in.marginals, in.answers, in.entities, want);
        EXPECT_EQ(counted > 0, any);
        if (any) expect_same(got, want);
        expect_same(multiply_metrics(component_ranks(in.marginals, in.answers, in.entities)),
                    oracle::naive_multiply(in.marginals, in.answers, in.entities));
        expect_same(joint_true_metrics(in.joint, in.answers, in.entities),
                    oracle::naive_joint_true(in.joint, in.answers, in.entities));
    }
}

TEST(Metrics, SingleVariableProtocolsCoincide) {
    std::mt19937_64 rng(7);
    int checked = 0;
    for (int trial = 0; trial < 400; ++trial) {
        auto in = gen::random_metric_instance(rng);
        if (in.answers.arity != 1 || in.answers.hard.empty()) continue;
        ++checked;
        QueryScores s{in.marginals, true, in.marginals[0]};
        auto q = evaluate_query("q", "1p", s, in.answers, in.entities);
        const auto& m = q.values.at(Protocol::marginal);
        for (auto p : {Protocol::multiply, Protocol::joint_estimate, Protocol::joint_true})
            for (int i = 0; i < 3; ++i) EXPECT_DOUBLE_EQ(q.values.at(p).hits[i], m.hits[i]) << to_string(p);
        EXPECT_DOUBLE_EQ(q.values.at(Protocol::multiply).mrr, m.mrr);
        EXPECT_DOUBLE_EQ(q.values.at(Protocol::joint_true).mrr, m.mrr);
    }
    EXPECT_GT(checked, 50);
}

TEST(Metrics, HitsMonotoneInLevel) {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 300; ++trial) {
        auto in = gen::random_metric_instance(rng);
        QueryScores s{in.marginals, true, in.joint};
        auto q = evaluate_query("q", "t", s, in.answers, in.entities);
        for (const auto& [p, v] : q.values) {
            EXPECT_LE(v.hits[0], v.hits[1]);
            EXPECT_LE(v.hits[1], v.hits[2]);
        }
    }
}

TEST(Metrics, RecallAfterPruning) {
    AnswerSet gold{{1, 3}, {2, 4}};
    EXPECT_EQ(recall_after_pruning({{1, 3}, {1, 4}}, gold), 0.5);
    EXPECT_EQ(recall_after_pruning({}, {}), 1.0);
}

TEST(Aggregation, PermutationInvariantAndSkipsEmpty) {
    std::mt19937_64 rng(55);
    std::vector<QueryMetrics> qs;
    for (int i = 0; i < 40; ++i) {
        auto in = gen::random_metric_instance(rng);
        QueryScores s{in.marginals, true, in.joint};
        char id[16];
        std::snprintf(id, sizeof id, "q%03d", i);
        qs.push_back(evaluate_query(id, i % 2 ? "odd" : "even", s, in.answers, in.entities));
    }
    qs.push_back(evaluate_query("empty", "even", {}, AnswerSplit(1, {{0}}, {}), 3));
    std::size_t empty = 0;
    for (const auto& q : qs) empty += q.hard_answers == 0;
    auto base = EvalReport::aggregate(qs);
    EXPECT_GE(empty, 1u);
    EXPECT_EQ(base.overall.skipped, empty);
    EXPECT_EQ(base.overall.queries + base.overall.skipped, qs.size());
    for (int round = 0; round < 5; ++round) {
        std::shuffle(qs.begin(), qs.end(), rng);
        auto other = EvalReport::aggregate(qs);
        for (auto p : kProtocols) {
            ASSERT_EQ(base.overall.means.count(p), other.overall.means.count(p));
            if (!base.overall.means.count(p)) continue;
            EXPECT_EQ(base.overall.means.at(p).mrr, other.overall.means.at(p).mrr);
            EXPECT_EQ(base.overall.means.at(p).hits, other.overall.means.at(p).hits);
        }
    }
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& q : qs)
        if (q.values.count(Protocol::joint_true)) {
            sum += q.values.at(Protocol::joint_true).mrr;
            ++n;
        }
    EXPECT_NEAR(base.overall.means.at(Protocol::joint_true).mrr, sum / static_cast<double>(n), 1e-12);
}
