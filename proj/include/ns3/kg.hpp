#pragma once

#include <algorithm>
#include <compare>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <string_view>
#include <tuple>
#include <unordered_map>
#include <utility>
#include <vector>

#include "ns3/error.hpp"

namespace ns3 {

using EntityId = std::uint32_t;
using RelationId = std::uint32_t;

struct Triple {
    EntityId head = 0;
    RelationId relation = 0;
    EntityId tail = 0;

    friend auto operator<=>(const Triple&, const Triple&) = default;
};

enum class Split { train, valid, test };
enum class Direction { forward, backward };

inline const char* to_string(Split split) {
    switch (split) {
        case Split::train: return "train";
        case Split::valid: return "valid";
        case Split::test: return "test";
    }
    return "?";
}

inline Split parse_split(std::string_view text) {
    if (text == "train") return Split::train;
    if (text == "valid") return Split::valid;
    if (text == "test") return Split::test;
    fail(ErrorKind::config, "unknown split '" + std::string(text) + "'");
}

/// Label <-> dense id map for one namespace (entities or relations).
class LabelMap {
   public:
    std::uint32_t add(std::string label) {
        auto [it, inserted] = index_.emplace(label, static_cast<std::uint32_t>(labels_.size()));
        if (!inserted) fail(ErrorKind::data, "duplicate label '" + label + "'");
        labels_.push_back(std::move(label));
        return it->second;
    }

    const std::string& label(std::uint32_t id) const {
        if (id >= labels_.size()) fail(ErrorKind::data, "id " + std::to_string(id) + " out of range");
        return labels_[id];
    }

    std::uint32_t id(std::string_view label) const {
        auto it = index_.find(std::string(label));
        if (it == index_.end()) fail(ErrorKind::data, "unknown label '" + std::string(label) + "'");
        return it->second;
    }

    bool contains(std::string_view label) const { return index_.count(std::string(label)) != 0; }
    std::size_t size() const noexcept { return labels_.size(); }
    const std::vector<std::string>& labels() const noexcept { return labels_; }

   private:
    std::vector<std::string> labels_;
    std::unordered_map<std::string, std::uint32_t> index_;
};

struct Vocab {
    LabelMap entities;
    LabelMap relations;

    std::size_t num_entities() const noexcept { return entities.size(); }
    std::size_t num_relations() const noexcept { return relations.size(); }

    /// Vocabulary with labels e0..e{n-1} and r0..r{m-1}.
    static Vocab numbered(std::size_t num_entities, std::size_t num_relations) {
        Vocab vocab;
        for (std::size_t i = 0; i < num_entities; ++i) vocab.entities.add("e" + std::to_string(i));
        for (std::size_t i = 0; i < num_relations; ++i) vocab.relations.add("r" + std::to_string(i));
        return vocab;
    }
};

/// Deduplicated triple set with forward (head, relation) -> tails and
/// backward (tail, relation) -> heads indices. Neighbor lists are sorted.
class TripleSet {
   public:
    TripleSet() = default;

    explicit TripleSet(std::vector<Triple> triples) : triples_(std::move(triples)) {
        std::sort(triples_.begin(), triples_.end());
        triples_.erase(std::unique(triples_.begin(), triples_.end()), triples_.end());
        build_index();
    }

    std::size_t size() const noexcept { return triples_.size(); }
    bool empty() const noexcept { return triples_.empty(); }
    std::span<const Triple> triples() const noexcept { return triples_; }

    bool contains(EntityId head, RelationId relation, EntityId tail) const {
        auto tails = neighbors(head, relation, Direction::forward);
        return std::binary_search(tails.begin(), tails.end(), tail);
    }
    bool contains(const Triple& t) const { return contains(t.head, t.relation, t.tail); }

    /// Tails of (node, relation) for forward, heads of (node, relation) for backward.
    std::span<const EntityId> neighbors(EntityId node, RelationId relation, Direction direction) const {
        const auto& index = direction == Direction::forward ? forward_ : backward_;
        const auto& store = direction == Direction::forward ? forward_nodes_ : backward_nodes_;
        auto it = index.find(key(node, relation));
        if (it == index.end()) return {};
        return std::span<const EntityId>(store).subspan(it->second.first, it->second.second - it->second.first);
    }

    bool is_subset_of(const TripleSet& other) const {
        return std::includes(other.triples_.begin(), other.triples_.end(), triples_.begin(), triples_.end());
    }

    static TripleSet united(const TripleSet& a, const TripleSet& b) {
        std::vector<Triple> all;
        all.reserve(a.size() + b.size());
        std::set_union(a.triples_.begin(), a.triples_.end(), b.triples_.begin(), b.triples_.end(),
                       std::back_inserter(all));
        return TripleSet(std::move(all));
    }

    friend bool operator==(const TripleSet& a, const TripleSet& b) { return a.triples_ == b.triples_; }

   private:
    using Range = std::pair<std::uint32_t, std::uint32_t>;

    static std::uint64_t key(EntityId node, RelationId relation) {
        return (static_cast<std::uint64_t>(node) << 32) | relation;
    }

    void build_index() {
        forward_nodes_.clear();
        backward_nodes_.clear();
        forward_.clear();
        backward_.clear();
        // triples_ is sorted by (head, relation, tail), so forward runs are contiguous.
        forward_nodes_.reserve(triples_.size());
        for (std::size_t i = 0; i < triples_.size(); ++i) {
            const auto& t = triples_[i];
            forward_nodes_.push_back(t.tail);
            auto [it, inserted] = forward_.try_emplace(key(t.head, t.relation), Range{i, i + 1});
            if (!inserted) it->second.second = static_cast<std::uint32_t>(i + 1);
        }
        std::vector<Triple> by_tail(triples_);
        std::sort(by_tail.begin(), by_tail.end(), [](const Triple& a, const Triple& b) {
            return std::tie(a.tail, a.relation, a.head) < std::tie(b.tail, b.relation, b.head);
        });
        backward_nodes_.reserve(by_tail.size());
        for (std::size_t i = 0; i < by_tail.size(); ++i) {
            const auto& t = by_tail[i];
            backward_nodes_.push_back(t.head);
            auto [it, inserted] = backward_.try_emplace(key(t.tail, t.relation), Range{i, i + 1});
            if (!inserted) it->second.second = static_cast<std::uint32_t>(i + 1);
        }
    }

    std::vector<Triple> triples_;
    std::vector<EntityId> forward_nodes_;
    std::vector<EntityId> backward_nodes_;
    std::unordered_map<std::uint64_t, Range> forward_;
    std::unordered_map<std::uint64_t, Range> backward_;
};

/// In-memory graph with nested observation splits (train within valid within test).
struct KnowledgeGraph {
    Vocab vocab;
    TripleSet train;
    TripleSet valid;
    TripleSet test;

    std::size_t num_entities() const noexcept { return vocab.num_entities(); }
    std::size_t num_relations() const noexcept { return vocab.num_relations(); }

    const TripleSet& split(Split which) const {
        switch (which) {
            case Split::train: return train;
            case Split::valid: return valid;
            case Split::test: return test;
        }
        return test;
    }

    /// Throws unless the splits are nested and every id is in range.
    void validate() const {
        if (!train.is_subset_of(valid) || !valid.is_subset_of(test))
            fail(ErrorKind::data, "splits are not nested (train within valid within test)");
        for (const auto& t : test.triples()) {
            if (t.head >= num_entities() || t.tail >= num_entities() || t.relation >= num_relations())
                fail(ErrorKind::data, "triple references an id outside the vocabulary");
        }
    }
};

inline std::span<const EntityId> neighbors(const KnowledgeGraph& kg, Split split, EntityId node,
                                           RelationId relation, Direction direction) {
    if (node >= kg.num_entities()) fail(ErrorKind::logic, "entity id " + std::to_string(node) + " out of range");
    if (relation >= kg.num_relations())
        fail(ErrorKind::logic, "relation id " + std::to_string(relation) + " out of range");
    return kg.split(split).neighbors(node, relation, direction);
}

namespace detail {

inline std::vector<std::string> read_lines(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorKind::data, "cannot open " + path.string());
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(std::move(line));
    }
    while (!lines.empty() && lines.back().empty()) lines.pop_back();
    return lines;
}

inline std::vector<std::string_view> split_tabs(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        auto pos = line.find('\t', start);
        fields.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return fields;
}

inline TripleSet read_triples(const std::filesystem::path& path, const Vocab& vocab) {
    std::vector<Triple> triples;
    auto lines = read_lines(path);
    for (std::size_t n = 0; n < lines.size(); ++n) {
        if (lines[n].empty()) continue;
        auto fields = split_tabs(lines[n]);
        if (fields.size() != 3)
            fail(ErrorKind::data, path.string() + ":" + std::to_string(n + 1) + ": expected 3 tab-separated fields");
        try {
            triples.push_back({vocab.entities.id(fields[0]), vocab.relations.id(fields[1]), vocab.entities.id(fields[2])});
        } catch (const Error& e) {
            fail(ErrorKind::data, path.string() + ":" + std::to_string(n + 1) + ": " + e.what());
        }
    }
    return TripleSet(std::move(triples));
}

inline void write_triples(const std::filesystem::path& path, const TripleSet& set, const Vocab& vocab) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorKind::data, "cannot write " + path.string());
    for (const auto& t : set.triples())
        out << vocab.entities.label(t.head) << '\t' << vocab.relations.label(t.relation) << '\t'
            << vocab.entities.label(t.tail) << '\n';
}

}  // namespace detail

/// Loads entities.txt, relations.txt and {train,valid,test}.tsv from a directory.
/// Split files may be nested or disjoint deltas; deltas are accumulated.
inline KnowledgeGraph load_kg(const std::filesystem::path& dir) {
    KnowledgeGraph kg;
    for (auto& label : detail::read_lines(dir / "entities.txt")) kg.vocab.entities.add(std::move(label));
    for (auto& label : detail::read_lines(dir / "relations.txt")) kg.vocab.relations.add(std::move(label));
    kg.train = detail::read_triples(dir / "train.tsv", kg.vocab);
    auto valid = detail::read_triples(dir / "valid.tsv", kg.vocab);
    auto test = detail::read_triples(dir / "test.tsv", kg.vocab);
    kg.valid = kg.train.is_subset_of(valid) ? std::move(valid) : TripleSet::united(kg.train, valid);
    kg.test = kg.valid.is_subset_of(test) ? std::move(test) : TripleSet::united(kg.valid, test);
    return kg;
}

/// Writes the nested form of every split.
inline void save_kg(const KnowledgeGraph& kg, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    {
        std::ofstream out(dir / "entities.txt", std::ios::binary);
        for (const auto& label : kg.vocab.entities.labels()) out << label << '\n';
    }
    {
        std::ofstream out(dir / "relations.txt", std::ios::binary);
        for (const auto& label : kg.vocab.relations.labels()) out << label << '\n';
    }
    detail::write_triples(dir / "train.tsv", kg.train, kg.vocab);
    detail::write_triples(dir / "valid.tsv", kg.valid, kg.vocab);
    detail::write_triples(dir / "test.tsv", kg.test, kg.vocab);
}

}  // namespace ns3
