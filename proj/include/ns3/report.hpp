#pragma once

#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

#include "ns3/error.hpp"
#include "ns3/metrics.hpp"

namespace ns3 {

inline nlohmann::ordered_json metric_json(const MetricValues& m) {
    nlohmann::ordered_json j;
    j["mrr"] = m.mrr;
    for (std::size_t i = 0; i < kHitLevels.size(); ++i) j["hit@" + std::to_string(kHitLevels[i])] = m.hits[i];
    return j;
}

inline nlohmann::ordered_json block_json(const MetricBlock& b) {
    nlohmann::ordered_json j;
    j["queries"] = b.queries;
    j["skipped"] = b.skipped;
    j["hard_answers"] = b.hard_answers;
    nlohmann::ordered_json metrics = nlohmann::ordered_json::object();
    for (auto p : kProtocols) {
        auto it = b.means.find(p);
        if (it == b.means.end()) continue;
        auto m = metric_json(it->second);
        m["queries"] = b.counts.at(p);
        metrics[to_string(p)] = std::move(m);
    }
    j["metrics"] = std::move(metrics);
    return j;
}

/// Conventions that the numbers depend on, recorded in every report.
inline nlohmann::ordered_json report_conventions(TiePolicy policy) {
    nlohmann::ordered_json j;
    j["ties"] = to_string(policy);
    j["aggregation"] = "mean over hard answers within a query, then unweighted mean over queries";
    j["multiply"] = "hit@n requires every component rank <= n; mrr uses the worst component rank";
    j["joint_estimate"] = "C(R+k,k) with R the sum of zero-based marginal ranks";
    j["marginal_hard"] = "projection of all answers minus projection of easy answers";
    return j;
}

inline nlohmann::ordered_json report_json(const EvalReport& r, const nlohmann::ordered_json& header) {
    nlohmann::ordered_json j;
    j["header"] = header;
    j["overall"] = block_json(r.overall);
    nlohmann::ordered_json types = nlohmann::ordered_json::object();
    for (const auto& [type, block] : r.per_type) types[type] = block_json(block);
    j["per_type"] = std::move(types);
    return j;
}

/// One row per (scope, protocol); scope is `all` or a query type.
inline std::string to_tsv(const EvalReport& r) {
    std::string out = "scope\tprotocol\tqueries\tmrr";
    for (auto n : kHitLevels) out += "\thit@" + std::to_string(n);
    out += '\n';
    auto rows = [&](const std::string& scope, const MetricBlock& b) {
        for (auto p : kProtocols) {
            auto it = b.means.find(p);
            if (it == b.means.end()) continue;
            out += scope + '\t' + to_string(p) + '\t' + std::to_string(b.counts.at(p)) + '\t' +
                   nlohmann::json(it->second.mrr).dump();
            for (double h : it->second.hits) out += '\t' + nlohmann::json(h).dump();
            out += '\n';
        }
    };
    rows("all", r.overall);
    for (const auto& [type, block] : r.per_type) rows(type, block);
    return out;
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorKind::data, "cannot write " + path.string());
    out << text;
}

}  // namespace ns3
