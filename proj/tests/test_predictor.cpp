#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <filesystem>
#include <fstream>
#include <random>

#include "ns3/predictor.hpp"

using namespace ns3;

namespace {

EmbeddingModel random_model(Scoring scoring, std::uint64_t ne, std::uint64_t nr, std::uint32_t dim, unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<float> u(-1.0f, 1.0f);
    EmbeddingModel m;
    m.num_entities = ne;
    m.num_relations = nr;
    m.dim = dim;
    m.scoring = scoring;
    m.bias = 0.25;
    m.temperature = 0.5;
    m.entity.resize(ne * dim);
    m.relation.resize(nr * m.relation_width());
    for (auto& x : m.entity) x = u(rng);
    for (auto& x : m.relation) x = u(rng);
    return m;
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace

TEST(ExactProvider, CrispDegreesAndSlices) {
    TripleSet s({{0, 0, 1}, {0, 0, 2}, {2, 1, 0}});
    ExactProvider p(s, 3, 2);
    EXPECT_EQ(p.truth(0, 0, 1), 1.0);
    EXPECT_EQ(p.truth(1, 0, 0), 0.0);
    std::vector<EntityId> cands{2, 1, 0};
    auto fwd = p.truth_slice(Anchor::head, 0, 0, cands);
    EXPECT_EQ(fwd.degrees, (std::vector<double>{1.0, 1.0, 0.0}));
    auto back = p.truth_slice(Anchor::tail, 0, 1, cands);
    EXPECT_EQ(back.degrees, (std::vector<double>{1.0, 0.0, 0.0}));
    EXPECT_THROW(p.truth(3, 0, 0), Error);
    EXPECT_THROW(p.truth(0, 2, 0), Error);
    EXPECT_THROW(p.truth_slice(Anchor::head, 0, 0, std::vector<EntityId>{}), Error);
}

TEST(NoisyOracle, FlipsAHashedFraction) {
    std::vector<Triple> triples;
    for (EntityId h = 0; h < 20; ++h) triples.push_back({h, 0, static_cast<EntityId>((h + 1) % 20)});
    TripleSet s(triples);
    NoisyOracleProvider p(s, 20, 1, 0.3, 42, 0.25);
    NoisyOracleProvider same(s, 20, 1, 0.3, 42, 0.25);
    std::size_t perturbed = 0;
    for (EntityId h = 0; h < 20; ++h)
        for (EntityId t = 0; t < 20; ++t) {
            double d = p.truth(h, 0, t);
            double base = s.contains(h, 0, t) ? 1.0 : 0.0;
            EXPECT_EQ(d, same.truth(h, 0, t));
            if (d != base) {
                ++perturbed;
                EXPECT_EQ(d, base == 1.0 ? 0.7 : 0.3);
            }
        }
    // 400 triples at fraction 0.25: expect about 100 changed.
    EXPECT_GT(perturbed, 60u);
    EXPECT_LT(perturbed, 140u);
    EXPECT_THROW(NoisyOracleProvider(s, 20, 1, 0.7, 1), Error);
}

TEST(TableProvider, LoadsLabelledDegrees) {
    Vocab v = Vocab::numbered(3, 1);
    auto path = std::filesystem::temp_directory_path() / "ns3_table.tsv";
    {
        std::ofstream out(path);
        out << "# degrees\ne0\tr0\te1\t0.75\ne2\tr0\te2\t1\n";
    }
    auto p = TableProvider::load(path, v);
    EXPECT_EQ(p.truth(0, 0, 1), 0.75);
    EXPECT_EQ(p.truth(2, 0, 2), 1.0);
    EXPECT_EQ(p.truth(1, 0, 1), 0.0);
    {
        std::ofstream out(path);
        out << "e0\tr0\te1\t1.5\n";
    }
    EXPECT_THROW(TableProvider::load(path, v), Error);
}

TEST(Embedding, DistMultAndDotMatchDirectFormulas) {
    for (auto scoring : {Scoring::distmult, Scoring::dot}) {
        auto m = random_model(scoring, 5, 2, 4, 9);
        EmbeddingProvider p(m);
        for (EntityId h = 0; h < 5; ++h)
            for (EntityId t = 0; t < 5; ++t) {
                double raw = 0.0;
                for (int i = 0; i < 4; ++i) {
                    double eh = m.entity[h * 4 + i], r = m.relation[1 * 4 + i], et = m.entity[t * 4 + i];
                    raw += scoring == Scoring::distmult ? eh * r * et : (eh + r) * et;
                }
                EXPECT_NEAR(p.truth(h, 1, t), sigmoid((raw - 0.25) / 0.5), 1e-12);
            }
    }
}

TEST(Embedding, ComplexMatchesComplexArithmetic) {
    auto m = random_model(Scoring::complex, 4, 3, 6, 17);
    EmbeddingProvider p(m);
    const int half = 3;
    auto vec = [&](const std::vector<float>& table, std::size_t row, std::size_t width, std::size_t offset) {
        std::vector<std::complex<double>> out;
        for (int i = 0; i < half; ++i)
            out.emplace_back(table[row * width + offset + i], table[row * width + offset + half + i]);
        return out;
    };
    for (EntityId h = 0; h < 4; ++h)
        for (RelationId r = 0; r < 3; ++r)
            for (EntityId t = 0; t < 4; ++t) {
                auto eh = vec(m.entity, h, 6, 0), et = vec(m.entity, t, 6, 0);
                auto fw = vec(m.relation, r, 12, 0), inv = vec(m.relation, r, 12, 6);
                std::complex<double> a, b;
                for (int i = 0; i < half; ++i) {
                    a += eh[i] * fw[i] * std::conj(et[i]);
                    b += et[i] * inv[i] * std::conj(eh[i]);
                }
                double raw = 0.5 * (a.real() + b.real());
                EXPECT_NEAR(p.truth(h, r, t), sigmoid((raw - 0.25) / 0.5), 1e-12);
            }
}

TEST(Embedding, FileRoundTripAndErrors) {
    auto m = random_model(Scoring::complex, 3, 2, 4, 5);
    auto path = std::filesystem::temp_directory_path() / "ns3_model.bin";
    save_embedding_model(m, path);
    auto back = load_embedding_model(path);
    EXPECT_EQ(back.entity, m.entity);
    EXPECT_EQ(back.relation, m.relation);
    EXPECT_EQ(back.scoring, Scoring::complex);
    EXPECT_EQ(back.bias, m.bias);
    EXPECT_EQ(std::filesystem::file_size(path), 4 + 4 + 8 + 8 + 4 + 1 + 8 + 8 + 4 * (3 * 4 + 2 * 8));

    EXPECT_THROW(EmbeddingProvider(back, Vocab::numbered(4, 2)), Error);
    EXPECT_NO_THROW(EmbeddingProvider(back, Vocab::numbered(3, 2)));

    std::filesystem::resize_file(path, std::filesystem::file_size(path) - 3);
    try {
        load_embedding_model(path);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::data);
    }
    {
        std::ofstream out(path, std::ios::binary);
        out << "XXXX";
    }
    EXPECT_THROW(load_embedding_model(path), Error);
}
