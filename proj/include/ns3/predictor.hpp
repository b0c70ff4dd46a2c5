#pragma once

#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <memory>
#include <span>
#include <type_traits>
#include <string>
#include <unordered_map>
#include <vector>

#include "ns3/error.hpp"
#include "ns3/kg.hpp"

namespace ns3 {

/// Which endpoint of a slice is held fixed.
enum class Anchor { head, tail };

struct ProviderCapabilities {
    bool row_slice = true;     // anchored head, varying tail
    bool column_slice = true;  // anchored tail, varying head
    bool single_lookup = true;
};

struct RelationTruthSlice {
    RelationId relation = 0;
    Anchor anchor = Anchor::head;
    EntityId anchor_id = 0;
    std::vector<EntityId> candidates;
    std::vector<double> degrees;
};

/// Source of truth degrees T_r(h, t) in [0, 1]. Implementations are immutable
/// after construction and safe to share across threads.
class TruthProvider {
   public:
    virtual ~TruthProvider() = default;

    virtual std::size_t num_entities() const = 0;
    virtual std::size_t num_relations() const = 0;
    virtual ProviderCapabilities capabilities() const { return {}; }

    double truth(EntityId head, RelationId relation, EntityId tail) const {
        check(head, relation);
        check_entity(tail);
        return degree(head, relation, tail);
    }

    /// out[i] = T_r(anchor, candidates[i]) for a head anchor, T_r(candidates[i], anchor) for a tail anchor.
    void truth_slice(Anchor anchor, EntityId anchor_id, RelationId relation, std::span<const EntityId> candidates,
                     std::span<double> out) const {
        require(!candidates.empty(), "truth slice needs at least one candidate");
        require(out.size() == candidates.size(), "truth slice output size mismatch");
        check(anchor_id, relation);
        for (EntityId c : candidates) check_entity(c);
        slice(anchor, anchor_id, relation, candidates, out);
    }

    RelationTruthSlice truth_slice(Anchor anchor, EntityId anchor_id, RelationId relation,
                                   std::span<const EntityId> candidates) const {
        RelationTruthSlice s{relation, anchor, anchor_id, {candidates.begin(), candidates.end()},
                             std::vector<double>(candidates.size())};
        truth_slice(anchor, anchor_id, relation, candidates, s.degrees);
        return s;
    }

   protected:
    /// Unchecked single lookup.
    virtual double degree(EntityId head, RelationId relation, EntityId tail) const = 0;

    /// Unchecked batched lookup; must agree bit-exactly with degree().
    virtual void slice(Anchor anchor, EntityId anchor_id, RelationId relation, std::span<const EntityId> candidates,
                       std::span<double> out) const {
        for (std::size_t i = 0; i < candidates.size(); ++i)
            out[i] = anchor == Anchor::head ? degree(anchor_id, relation, candidates[i])
                                            : degree(candidates[i], relation, anchor_id);
    }

   private:
    void check_entity(EntityId e) const {
        if (e >= num_entities()) fail(ErrorKind::logic, "entity id " + std::to_string(e) + " out of range");
    }
    void check(EntityId e, RelationId r) const {
        check_entity(e);
        if (r >= num_relations()) fail(ErrorKind::logic, "relation id " + std::to_string(r) + " out of range");
    }
};

/// Crisp provider: 1 for triples in the configured set, 0 otherwise. Keeps a
/// reference to the triple set, which must outlive the provider.
class ExactProvider : public TruthProvider {
   public:
    ExactProvider(const TripleSet& triples, std::size_t num_entities, std::size_t num_relations)
        : triples_(&triples), num_entities_(num_entities), num_relations_(num_relations) {}

    ExactProvider(const KnowledgeGraph& kg, Split split)
        : ExactProvider(kg.split(split), kg.num_entities(), kg.num_relations()) {}

    std::size_t num_entities() const override { return num_entities_; }
    std::size_t num_relations() const override { return num_relations_; }

   protected:
    double degree(EntityId head, RelationId relation, EntityId tail) const override {
        return triples_->contains(head, relation, tail) ? 1.0 : 0.0;
    }

    void slice(Anchor anchor, EntityId anchor_id, RelationId relation, std::span<const EntityId> candidates,
               std::span<double> out) const override {
        auto adj = triples_->neighbors(anchor_id, relation, anchor == Anchor::head ? Direction::forward : Direction::backward);
        for (std::size_t i = 0; i < candidates.size(); ++i)
            out[i] = std::binary_search(adj.begin(), adj.end(), candidates[i]) ? 1.0 : 0.0;
    }

   private:
    const TripleSet* triples_;
    std::size_t num_entities_;
    std::size_t num_relations_;
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline double unit_hash(std::uint64_t seed, EntityId h, RelationId r, EntityId t) {
    std::uint64_t x = splitmix64(seed ^ splitmix64((static_cast<std::uint64_t>(h) << 32) | r) ^ (static_cast<std::uint64_t>(t) << 17));
    x = splitmix64(x ^ t);
    return static_cast<double>(x >> 11) * 0x1.0p-53;
}

}  // namespace detail

/// Exact provider with seeded perturbation: a hashed fraction of all triples
/// is pulled toward 0.5 by epsilon (1 -> 1-eps, 0 -> eps).
class NoisyOracleProvider : public TruthProvider {
   public:
    NoisyOracleProvider(const TripleSet& triples, std::size_t num_entities, std::size_t num_relations, double epsilon,
                        std::uint64_t seed, double fraction = 0.1)
        : exact_(triples, num_entities, num_relations), epsilon_(epsilon), fraction_(fraction), seed_(seed) {
        if (!(epsilon >= 0.0 && epsilon <= 0.5)) fail(ErrorKind::config, "noise epsilon must be in [0, 0.5]");
        if (!(fraction >= 0.0 && fraction <= 1.0)) fail(ErrorKind::config, "noise fraction must be in [0, 1]");
    }

    NoisyOracleProvider(const KnowledgeGraph& kg, Split split, double epsilon, std::uint64_t seed, double fraction = 0.1)
        : NoisyOracleProvider(kg.split(split), kg.num_entities(), kg.num_relations(), epsilon, seed, fraction) {}

    std::size_t num_entities() const override { return exact_.num_entities(); }
    std::size_t num_relations() const override { return exact_.num_relations(); }

   protected:
    double degree(EntityId head, RelationId relation, EntityId tail) const override {
        return perturb(exact_.truth(head, relation, tail), head, relation, tail);
    }

   private:
    double perturb(double base, EntityId h, RelationId r, EntityId t) const {
        if (detail::unit_hash(seed_, h, r, t) >= fraction_) return base;
        return base > 0.5 ? 1.0 - epsilon_ : epsilon_;
    }

    ExactProvider exact_;
    double epsilon_;
    double fraction_;
    std::uint64_t seed_;
};

/// Explicit degrees per triple; unlisted triples have degree 0.
class TableProvider : public TruthProvider {
   public:
    TableProvider(std::size_t num_entities, std::size_t num_relations)
        : num_entities_(num_entities), num_relations_(num_relations) {}

    void set(EntityId head, RelationId relation, EntityId tail, double degree) {
        require(head < num_entities_ && tail < num_entities_ && relation < num_relations_, "table entry out of range");
        if (!(degree >= 0.0 && degree <= 1.0)) fail(ErrorKind::data, "table degree outside [0,1]");
        table_[Triple{head, relation, tail}] = degree;
    }

    /// Stores degrees for the row (head, relation, candidates[i]).
    void set_row(EntityId head, RelationId relation, std::span<const EntityId> tails, std::span<const double> degrees) {
        require(tails.size() == degrees.size(), "row size mismatch");
        for (std::size_t i = 0; i < tails.size(); ++i) set(head, relation, tails[i], degrees[i]);
    }

    std::size_t num_entities() const override { return num_entities_; }
    std::size_t num_relations() const override { return num_relations_; }

    /// Reads `head<TAB>relation<TAB>tail<TAB>degree` lines using vocabulary labels.
    static TableProvider load(const std::filesystem::path& path, const Vocab& vocab) {
        TableProvider p(vocab.num_entities(), vocab.num_relations());
        auto lines = detail::read_lines(path);
        for (std::size_t n = 0; n < lines.size(); ++n) {
            if (lines[n].empty() || lines[n][0] == '#') continue;
            auto f = detail::split_tabs(lines[n]);
            if (f.size() != 4) fail(ErrorKind::data, path.string() + ":" + std::to_string(n + 1) + ": expected 4 fields");
            double value = 0.0;
            try {
                value = std::stod(std::string(f[3]));
            } catch (const std::exception&) {
                fail(ErrorKind::data, path.string() + ":" + std::to_string(n + 1) + ": bad degree");
            }
            p.set(vocab.entities.id(f[0]), vocab.relations.id(f[1]), vocab.entities.id(f[2]), value);
        }
        return p;
    }

   protected:
    double degree(EntityId head, RelationId relation, EntityId tail) const override {
        auto it = table_.find(Triple{head, relation, tail});
        return it == table_.end() ? 0.0 : it->second;
    }

   private:
    struct TripleHash {
        std::size_t operator()(const Triple& t) const noexcept {
            return detail::splitmix64((static_cast<std::uint64_t>(t.head) << 32 | t.tail) ^ (std::uint64_t{t.relation} * 0x9e3779b97f4a7c15ULL));
        }
    };

    std::size_t num_entities_;
    std::size_t num_relations_;
    std::unordered_map<Triple, double, TripleHash> table_;
};

// ---------------------------------------------------------------------------
// Embedding-backed provider

enum class Scoring : std::uint8_t { dot = 0, distmult = 1, complex = 2 };

/// Pretrained entity/relation embeddings plus a logistic calibration
/// sigma((score - bias) / temperature).
struct EmbeddingModel {
    std::uint64_t num_entities = 0;
    std::uint64_t num_relations = 0;
    std::uint32_t dim = 0;
    Scoring scoring = Scoring::distmult;
    double bias = 0.0;
    double temperature = 1.0;
    std::vector<float> entity;    // num_entities x dim
    std::vector<float> relation;  // num_relations x relation_width()

    std::size_t relation_width() const noexcept { return scoring == Scoring::complex ? 2u * dim : dim; }

    void validate() const {
        if (dim == 0) fail(ErrorKind::data, "embedding dimension must be positive");
        if (scoring == Scoring::complex && dim % 2 != 0) fail(ErrorKind::data, "complex scoring needs an even dimension");
        if (!(temperature > 0.0)) fail(ErrorKind::data, "calibration temperature must be positive");
        if (entity.size() != num_entities * dim) fail(ErrorKind::data, "entity table size mismatch");
        if (relation.size() != num_relations * relation_width()) fail(ErrorKind::data, "relation table size mismatch");
    }

    /// Raw score. dot: <h + r, t>. distmult: sum h*r*t. complex: entity rows
    /// are [re | im] halves; a relation row holds the forward vector followed
    /// by the reciprocal one, and the score averages Re<h, r, conj t> with
    /// Re<t, r_inv, conj h>.
    double score(EntityId h, RelationId r, EntityId t) const {
        const float* eh = entity.data() + static_cast<std::size_t>(h) * dim;
        const float* et = entity.data() + static_cast<std::size_t>(t) * dim;
        const float* wr = relation.data() + static_cast<std::size_t>(r) * relation_width();
        double s = 0.0;
        switch (scoring) {
            case Scoring::dot:
                for (std::uint32_t i = 0; i < dim; ++i) s += (double{eh[i]} + wr[i]) * et[i];
                break;
            case Scoring::distmult:
                for (std::uint32_t i = 0; i < dim; ++i) s += double{eh[i]} * wr[i] * et[i];
                break;
            case Scoring::complex: {
                const std::uint32_t half = dim / 2;
                auto trilinear = [half](const float* a, const float* w, const float* b) {
                    double acc = 0.0;
                    for (std::uint32_t i = 0; i < half; ++i) {
                        double ar = a[i], ai = a[half + i], wr_ = w[i], wi = w[half + i], br = b[i], bi = b[half + i];
                        acc += ar * wr_ * br + ai * wr_ * bi + ar * wi * bi - ai * wi * br;
                    }
                    return acc;
                };
                s = 0.5 * (trilinear(eh, wr, et) + trilinear(et, wr + dim, eh));
                break;
            }
        }
        return s;
    }

    double calibrate(double raw) const { return 1.0 / (1.0 + std::exp(-(raw - bias) / temperature)); }
};

namespace detail {

inline constexpr char kEmbeddingMagic[4] = {'N', 'S', '3', 'E'};

class ByteReader {
   public:
    explicit ByteReader(std::vector<unsigned char> bytes) : bytes_(std::move(bytes)) {}

    template <typename T>
    T read() {
        static_assert(std::is_trivially_copyable_v<T>);
        if (pos_ + sizeof(T) > bytes_.size()) fail(ErrorKind::data, "embedding file truncated");
        std::array<unsigned char, sizeof(T)> raw{};
        std::memcpy(raw.data(), bytes_.data() + pos_, sizeof(T));
        if constexpr (std::endian::native == std::endian::big) std::reverse(raw.begin(), raw.end());
        pos_ += sizeof(T);
        return std::bit_cast<T>(raw);
    }

    std::size_t remaining() const noexcept { return bytes_.size() - pos_; }

   private:
    std::vector<unsigned char> bytes_;
    std::size_t pos_ = 0;
};

template <typename T>
void write_le(std::ostream& out, T value) {
    auto raw = std::bit_cast<std::array<unsigned char, sizeof(T)>>(value);
    if constexpr (std::endian::native == std::endian::big) std::reverse(raw.begin(), raw.end());
    out.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
}

}  // namespace detail

/// Reads the little-endian `NS3E` embedding layout.
inline EmbeddingModel load_embedding_model(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorKind::data, "cannot open embedding file " + path.string());
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    detail::ByteReader reader(std::move(bytes));
    for (char expected : detail::kEmbeddingMagic)
        if (reader.read<char>() != expected) fail(ErrorKind::data, "embedding file magic mismatch");
    if (reader.read<std::uint32_t>() != 1) fail(ErrorKind::data, "unsupported embedding file version");
    EmbeddingModel m;
    m.num_entities = reader.read<std::uint64_t>();
    m.num_relations = reader.read<std::uint64_t>();
    m.dim = reader.read<std::uint32_t>();
    auto scoring = reader.read<std::uint8_t>();
    if (scoring > 2) fail(ErrorKind::data, "unknown scoring id " + std::to_string(scoring));
    m.scoring = static_cast<Scoring>(scoring);
    m.bias = reader.read<double>();
    m.temperature = reader.read<double>();
    const std::uint64_t floats = m.num_entities * m.dim + m.num_relations * m.relation_width();
    if (reader.remaining() < floats * sizeof(float)) fail(ErrorKind::data, "embedding file truncated");
    m.entity.resize(m.num_entities * m.dim);
    for (auto& x : m.entity) x = reader.read<float>();
    m.relation.resize(m.num_relations * m.relation_width());
    for (auto& x : m.relation) x = reader.read<float>();
    m.validate();
    return m;
}

inline void save_embedding_model(const EmbeddingModel& m, const std::filesystem::path& path) {
    m.validate();
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorKind::data, "cannot write " + path.string());
    out.write(detail::kEmbeddingMagic, 4);
    detail::write_le<std::uint32_t>(out, 1);
    detail::write_le(out, m.num_entities);
    detail::write_le(out, m.num_relations);
    detail::write_le(out, m.dim);
    detail::write_le(out, static_cast<std::uint8_t>(m.scoring));
    detail::write_le(out, m.bias);
    detail::write_le(out, m.temperature);
    for (float x : m.entity) detail::write_le(out, x);
    for (float x : m.relation) detail::write_le(out, x);
}

class EmbeddingProvider : public TruthProvider {
   public:
    explicit EmbeddingProvider(EmbeddingModel model) : model_(std::move(model)) { model_.validate(); }

    /// Rejects models whose header counts disagree with the vocabulary.
    EmbeddingProvider(EmbeddingModel model, const Vocab& vocab) : EmbeddingProvider(std::move(model)) {
        if (model_.num_entities != vocab.num_entities() || model_.num_relations != vocab.num_relations())
            fail(ErrorKind::data, "embedding counts (" + std::to_string(model_.num_entities) + ", " +
                                      std::to_string(model_.num_relations) + ") do not match the graph (" +
                                      std::to_string(vocab.num_entities()) + ", " +
                                      std::to_string(vocab.num_relations()) + ")");
    }

    std::size_t num_entities() const override { return model_.num_entities; }
    std::size_t num_relations() const override { return model_.num_relations; }
    const EmbeddingModel& model() const noexcept { return model_; }

   protected:
    double degree(EntityId head, RelationId relation, EntityId tail) const override {
        return model_.calibrate(model_.score(head, relation, tail));
    }

   private:
    EmbeddingModel model_;
};

}  // namespace ns3
