#pragma once

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "ns3/error.hpp"
#include "ns3/kg.hpp"

namespace ns3 {

// Product t-norm algebra. Inputs and outputs are truth degrees in [0, 1].

constexpr double t_and(double a, double b) noexcept { return a * b; }
constexpr double t_not(double a) noexcept { return 1.0 - a; }
constexpr double t_or(double a, double b) noexcept { return 1.0 - (1.0 - a) * (1.0 - b); }

constexpr double clamp_truth(double a) noexcept { return a < 0.0 ? 0.0 : (a > 1.0 ? 1.0 : a); }

/// Membership degrees over an explicit candidate domain. Candidates are
/// entity tuples of a fixed arity (arity 1 for plain entity domains), stored
/// flat and row-major.
class FuzzyVector {
   public:
    FuzzyVector() = default;

    FuzzyVector(std::size_t arity, std::vector<EntityId> flat, std::vector<double> values)
        : arity_(arity), flat_(std::move(flat)), values_(std::move(values)) {
        require(arity_ >= 1, "fuzzy vector arity must be at least 1");
        require(flat_.size() == arity_ * values_.size(), "fuzzy vector domain and value sizes disagree");
        for (double v : values_) require(v >= 0.0 && v <= 1.0, "fuzzy vector value outside [0,1]");
    }

    /// Entity domain 0..n-1 with every membership set to `value`.
    static FuzzyVector over_entities(std::size_t n, double value = 1.0) {
        std::vector<EntityId> ids(n);
        std::iota(ids.begin(), ids.end(), EntityId{0});
        return FuzzyVector(1, std::move(ids), std::vector<double>(n, value));
    }

    /// Entity-domain vector from (entity, value) pairs.
    static FuzzyVector from_entities(std::span<const EntityId> ids, std::span<const double> values) {
        return FuzzyVector(1, {ids.begin(), ids.end()}, {values.begin(), values.end()});
    }

    std::size_t arity() const noexcept { return arity_; }
    std::size_t size() const noexcept { return values_.size(); }
    bool empty() const noexcept { return values_.empty(); }

    std::span<const EntityId> candidate(std::size_t i) const {
        return std::span<const EntityId>(flat_).subspan(i * arity_, arity_);
    }
    std::span<const EntityId> flat() const noexcept { return flat_; }
    double value(std::size_t i) const { return values_[i]; }
    std::span<const double> values() const noexcept { return values_; }
    std::span<double> values() noexcept { return values_; }

    /// Stored degree of `candidate`, or 0 when it lies outside the domain.
    double membership(std::span<const EntityId> candidate) const {
        if (candidate.size() != arity_) return 0.0;
        if (arity_ == 1 && candidate[0] < size() && flat_[candidate[0]] == candidate[0]) return values_[candidate[0]];
        for (std::size_t i = 0; i < size(); ++i) {
            if (std::equal(candidate.begin(), candidate.end(), flat_.begin() + static_cast<std::ptrdiff_t>(i * arity_)))
                return values_[i];
        }
        return 0.0;
    }
    double membership(EntityId candidate) const { return membership(std::span<const EntityId>(&candidate, 1)); }

    /// True when no candidate occurs twice.
    bool has_unique_domain() const {
        std::vector<std::size_t> order(size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        auto less = [&](std::size_t a, std::size_t b) { return lex_less(a, b); };
        std::sort(order.begin(), order.end(), less);
        for (std::size_t i = 1; i < order.size(); ++i)
            if (!less(order[i - 1], order[i])) return false;
        return true;
    }

    /// Lexicographic comparison of candidates i and j.
    bool lex_less(std::size_t i, std::size_t j) const {
        auto a = candidate(i);
        auto b = candidate(j);
        return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
    }

    /// Candidate indices ordered by (value desc, candidate asc).
    std::vector<std::size_t> ranked_order() const {
        std::vector<std::size_t> order(size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return ranks_before(a, b); });
        return order;
    }

    bool ranks_before(std::size_t a, std::size_t b) const {
        if (values_[a] != values_[b]) return values_[a] > values_[b];
        return lex_less(a, b);
    }

    /// Sub-vector holding the given candidate indices, in that order.
    FuzzyVector select(std::span<const std::size_t> indices) const {
        std::vector<EntityId> flat;
        std::vector<double> values;
        flat.reserve(indices.size() * arity_);
        values.reserve(indices.size());
        for (std::size_t i : indices) {
            auto c = candidate(i);
            flat.insert(flat.end(), c.begin(), c.end());
            values.push_back(values_[i]);
        }
        return FuzzyVector(arity_, std::move(flat), std::move(values));
    }

   private:
    std::size_t arity_ = 1;
    std::vector<EntityId> flat_;
    std::vector<double> values_;
};

inline double membership(const FuzzyVector& v, std::span<const EntityId> candidate) { return v.membership(candidate); }
inline double membership(const FuzzyVector& v, EntityId candidate) { return v.membership(candidate); }

/// Sum of membership degrees.
inline double fuzzy_count(const FuzzyVector& v) {
    double sum = 0.0;
    for (double x : v.values()) sum += x;
    return sum;
}

inline std::size_t positive_support(const FuzzyVector& v) {
    return static_cast<std::size_t>(std::count_if(v.values().begin(), v.values().end(), [](double x) { return x > 0.0; }));
}

/// The b highest-valued candidates, ties broken by ascending candidate, in
/// ranked order. When b covers the domain the whole vector comes back ranked.
inline FuzzyVector top_b(const FuzzyVector& v, std::size_t b) {
    b = std::min(b, v.size());
    std::vector<std::size_t> order(v.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    auto before = [&](std::size_t x, std::size_t y) { return v.ranks_before(x, y); };
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(b), order.end(), before);
    order.resize(b);
    return v.select(order);
}

}  // namespace ns3
