#include <gtest/gtest.h>

#include <random>

#include "ns3/fuzzy.hpp"

using namespace ns3;

TEST(Fuzzy, ProductNormOperators) {
    EXPECT_DOUBLE_EQ(t_and(0.5, 0.4), 0.2);
    EXPECT_DOUBLE_EQ(t_not(0.25), 0.75);
    EXPECT_DOUBLE_EQ(t_or(0.5, 0.5), 0.75);
    EXPECT_EQ(t_and(1.0, 0.3), 0.3);
    EXPECT_DOUBLE_EQ(t_or(0.0, 0.3), 0.3);
    EXPECT_EQ(clamp_truth(1.5), 1.0);
    EXPECT_EQ(clamp_truth(-0.1), 0.0);
}

TEST(Fuzzy, DeMorganOnDyadicGrid) {
    std::mt19937_64 rng(3);
    for (int i = 0; i < 10000; ++i) {
        double a = static_cast<double>(rng() >> 11) * 0x1p-53;
        double b = static_cast<double>(rng() >> 11) * 0x1p-53;
        EXPECT_EQ(t_not(t_and(a, b)), t_or(t_not(a), t_not(b)));
    }
}

TEST(FuzzyVector, RejectsBadShapes) {
    EXPECT_THROW(FuzzyVector(2, {1, 2, 3}, {0.5}), Error);
    EXPECT_THROW(FuzzyVector(1, {1}, {1.5}), Error);
    EXPECT_THROW(FuzzyVector(0, {}, {}), Error);
}

TEST(FuzzyVector, MembershipAndCount) {
    auto v = FuzzyVector::from_entities(std::vector<EntityId>{4, 2, 7}, std::vector<double>{0.5, 0.25, 0.0});
    EXPECT_EQ(v.membership(EntityId{2}), 0.25);
    EXPECT_EQ(v.membership(EntityId{9}), 0.0);
    EXPECT_DOUBLE_EQ(fuzzy_count(v), 0.75);
    EXPECT_EQ(positive_support(v), 2u);

    auto all = FuzzyVector::over_entities(5, 0.5);
    EXPECT_EQ(all.membership(EntityId{3}), 0.5);
    EXPECT_DOUBLE_EQ(fuzzy_count(all), 2.5);

    FuzzyVector pairs(2, {0, 1, 1, 0}, {0.9, 0.1});
    std::vector<EntityId> key{1, 0};
    EXPECT_EQ(pairs.membership(key), 0.1);
    EXPECT_TRUE(pairs.has_unique_domain());
}

TEST(FuzzyVector, TopBOrdersByValueThenCandidate) {
    auto v = FuzzyVector::from_entities(std::vector<EntityId>{5, 1, 3, 0},
                                        std::vector<double>{0.5, 0.9, 0.5, 0.1});
    auto top = top_b(v, 3);
    ASSERT_EQ(top.size(), 3u);
    EXPECT_EQ(top.candidate(0)[0], 1u);
    EXPECT_EQ(top.candidate(1)[0], 3u);  // tie at 0.5 broken by smaller id
    EXPECT_EQ(top.candidate(2)[0], 5u);
    EXPECT_EQ(top_b(v, 10).size(), 4u);
}

TEST(FuzzyVector, TopBNesting) {
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<int> level(0, 4);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<EntityId> ids(30);
        std::vector<double> values(30);
        for (std::size_t i = 0; i < ids.size(); ++i) {
            ids[i] = static_cast<EntityId>(i);
            values[i] = level(rng) / 4.0;  // many ties
        }
        auto v = FuzzyVector::from_entities(ids, values);
        for (std::size_t b = 1; b < ids.size(); ++b) {
            auto small = top_b(v, b);
            auto large = top_b(v, b + 1);
            for (std::size_t i = 0; i < small.size(); ++i) EXPECT_EQ(small.candidate(i)[0], large.candidate(i)[0]);
        }
    }
}

TEST(FuzzyVector, SelectKeepsOrder) {
    FuzzyVector v(2, {0, 0, 0, 1, 1, 1}, {0.1, 0.2, 0.3});
    std::vector<std::size_t> idx{2, 0};
    auto s = v.select(idx);
    EXPECT_EQ(s.size(), 2u);
    EXPECT_EQ(s.value(0), 0.3);
    EXPECT_EQ(s.candidate(1)[1], 0u);
}
