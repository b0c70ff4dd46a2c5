#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "ns3/kg.hpp"

using namespace ns3;

namespace {

std::filesystem::path temp_dir(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("ns3_kg_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

void write(const std::filesystem::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    out << text;
}

}  // namespace

TEST(LabelMap, AddAndLookup) {
    LabelMap m;
    EXPECT_EQ(m.add("a"), 0u);
    EXPECT_EQ(m.add("b"), 1u);
    EXPECT_EQ(m.id("b"), 1u);
    EXPECT_EQ(m.label(0), "a");
    EXPECT_THROW(m.add("a"), Error);
    EXPECT_THROW(m.id("zz"), Error);
    EXPECT_THROW(m.label(5), Error);
}

TEST(TripleSet, DedupAndAdjacency) {
    TripleSet s({{0, 0, 2}, {0, 0, 1}, {0, 0, 1}, {1, 1, 0}, {2, 0, 1}});
    EXPECT_EQ(s.size(), 4u);
    EXPECT_TRUE(s.contains(0, 0, 2));
    EXPECT_FALSE(s.contains(2, 0, 0));
    auto fwd = s.neighbors(0, 0, Direction::forward);
    ASSERT_EQ(fwd.size(), 2u);
    EXPECT_EQ(fwd[0], 1u);
    EXPECT_EQ(fwd[1], 2u);
    auto back = s.neighbors(1, 0, Direction::backward);
    ASSERT_EQ(back.size(), 2u);
    EXPECT_EQ(back[0], 0u);
    EXPECT_EQ(back[1], 2u);
    EXPECT_TRUE(s.neighbors(5, 0, Direction::forward).empty());
}

TEST(TripleSet, SubsetAndUnion) {
    TripleSet a({{0, 0, 1}});
    TripleSet b({{0, 0, 1}, {1, 0, 2}});
    EXPECT_TRUE(a.is_subset_of(b));
    EXPECT_FALSE(b.is_subset_of(a));
    auto u = TripleSet::united(a, TripleSet({{3, 0, 3}}));
    EXPECT_EQ(u.size(), 2u);
}

TEST(KnowledgeGraph, NeighborRangeChecks) {
    KnowledgeGraph kg;
    kg.vocab = Vocab::numbered(3, 1);
    kg.test = kg.valid = kg.train = TripleSet({{0, 0, 1}});
    EXPECT_EQ(neighbors(kg, Split::train, 0, 0, Direction::forward).size(), 1u);
    EXPECT_THROW(neighbors(kg, Split::train, 7, 0, Direction::forward), Error);
    EXPECT_THROW(neighbors(kg, Split::train, 0, 3, Direction::forward), Error);
}

TEST(KnowledgeGraph, ValidateRejectsUnnestedSplits) {
    KnowledgeGraph kg;
    kg.vocab = Vocab::numbered(3, 1);
    kg.train = TripleSet({{0, 0, 1}});
    kg.valid = TripleSet({{1, 0, 2}});
    kg.test = TripleSet({{1, 0, 2}});
    EXPECT_THROW(kg.validate(), Error);
}

TEST(KnowledgeGraph, LoadsDeltaSplitsAsNested) {
    auto dir = temp_dir("delta");
    write(dir / "entities.txt", "a\nb\nc\n");
    write(dir / "relations.txt", "likes\n");
    write(dir / "train.tsv", "a\tlikes\tb\n");
    write(dir / "valid.tsv", "b\tlikes\tc\n");
    write(dir / "test.tsv", "c\tlikes\ta\r\n");
    auto kg = load_kg(dir);
    EXPECT_EQ(kg.train.size(), 1u);
    EXPECT_EQ(kg.valid.size(), 2u);
    EXPECT_EQ(kg.test.size(), 3u);
    EXPECT_NO_THROW(kg.validate());
}

TEST(KnowledgeGraph, SaveLoadRoundTrip) {
    KnowledgeGraph kg;
    kg.vocab = Vocab::numbered(4, 2);
    kg.train = TripleSet({{0, 0, 1}});
    kg.valid = TripleSet({{0, 0, 1}, {1, 1, 2}});
    kg.test = TripleSet({{0, 0, 1}, {1, 1, 2}, {3, 0, 0}});
    auto dir = temp_dir("roundtrip");
    save_kg(kg, dir);
    auto back = load_kg(dir);
    EXPECT_EQ(back.num_entities(), 4u);
    EXPECT_TRUE(back.train == kg.train);
    EXPECT_TRUE(back.valid == kg.valid);
    EXPECT_TRUE(back.test == kg.test);
}

TEST(KnowledgeGraph, LoadErrorsAreDataErrors) {
    auto dir = temp_dir("bad");
    write(dir / "entities.txt", "a\n");
    write(dir / "relations.txt", "r\n");
    write(dir / "train.tsv", "a\tr\n");
    write(dir / "valid.tsv", "");
    write(dir / "test.tsv", "");
    try {
        load_kg(dir);
        FAIL() << "expected an error";
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::data);
        EXPECT_NE(std::string(e.what()).find("train.tsv:1"), std::string::npos);
    }
    write(dir / "train.tsv", "a\tr\tz\n");
    EXPECT_THROW(load_kg(dir), Error);
    EXPECT_THROW(load_kg(dir / "missing"), Error);
}
