#pragma once

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "ns3/bench.hpp"
#include "ns3/error.hpp"
#include "ns3/kg.hpp"
#include "ns3/metrics.hpp"
#include "ns3/planner.hpp"

namespace ns3 {

enum class AnswerMode { joint, marginal };

inline const char* to_string(AnswerMode m) { return m == AnswerMode::joint ? "joint" : "marginal"; }

inline AnswerMode parse_answer_mode(std::string_view s) {
    if (s == "joint") return AnswerMode::joint;
    if (s == "marginal") return AnswerMode::marginal;
    fail(ErrorKind::config, "unknown answer mode '" + std::string(s) + "'");
}

/// Scores emitted for one query.
struct ScoreRecord {
    std::string id;
    std::vector<std::string> free_vars;
    QueryScores scores;
};

inline ScoreTable to_score_table(const FuzzyVector& v) {
    ScoreTable t;
    t.arity = v.arity();
    for (std::size_t i = 0; i < v.size(); ++i)
        if (v.value(i) > 0.0) {
            auto c = v.candidate(i);
            t.scores.emplace(Tuple(c.begin(), c.end()), v.value(i));
        }
    return t;
}

inline ScoreTable to_score_table(const JointResult& r) {
    ScoreTable t;
    t.arity = r.free_vars.size();
    for (const auto& s : r.tuples) t.scores.emplace(s.tuple, s.score);
    return t;
}

namespace detail {

inline std::string format_score(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline void write_table(std::ostream& out, const ScoreTable& table, const Vocab& vocab) {
    std::vector<std::pair<const Tuple*, double>> rows;
    for (const auto& [tuple, score] : table.scores)
        if (score > 0.0) rows.emplace_back(&tuple, score);
    std::stable_sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
    for (const auto& [tuple, score] : rows) out << join_tuple(*tuple, vocab) << '\t' << format_score(score) << '\n';
}

inline std::string join_names(const std::vector<std::string>& names) {
    std::string out;
    for (std::size_t i = 0; i < names.size(); ++i) out += (i ? "," : "") + names[i];
    return out;
}

}  // namespace detail

/// Score file: `#query id=... mode=joint vars=y1,y2` blocks followed by
/// `e1,e2<TAB>score` lines, and `#query id=... mode=marginal var=y1` blocks
/// with one entity per line. Only positive scores are written, best first.
inline void write_scores(std::ostream& out, const std::vector<ScoreRecord>& records, const Vocab& vocab) {
    for (const auto& r : records) {
        if (r.scores.has_joint) {
            out << "#query id=" << r.id << " mode=joint vars=" << detail::join_names(r.free_vars) << '\n';
            detail::write_table(out, r.scores.joint, vocab);
        }
        for (std::size_t i = 0; i < r.scores.marginals.size(); ++i) {
            out << "#query id=" << r.id << " mode=marginal var=" << r.free_vars.at(i) << '\n';
            detail::write_table(out, r.scores.marginals[i], vocab);
        }
    }
}

inline void write_scores(const std::filesystem::path& path, const std::vector<ScoreRecord>& records,
                         const Vocab& vocab) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorKind::data, "cannot write " + path.string());
    write_scores(out, records, vocab);
}

inline std::map<std::string, ScoreRecord> read_scores(const std::filesystem::path& path, const Vocab& vocab) {
    std::map<std::string, ScoreRecord> out;
    ScoreTable* current = nullptr;
    auto lines = detail::read_lines(path);
    for (std::size_t n = 0; n < lines.size(); ++n) {
        const auto& line = lines[n];
        auto where = path.string() + ":" + std::to_string(n + 1) + ": ";
        if (line.empty()) continue;
        if (line.rfind("#query", 0) == 0) {
            std::map<std::string, std::string> fields;
            std::size_t pos = 6;
            while (pos < line.size()) {
                while (pos < line.size() && line[pos] == ' ') ++pos;
                auto end = line.find(' ', pos);
                auto token = line.substr(pos, end == std::string::npos ? std::string::npos : end - pos);
                auto eq = token.find('=');
                if (eq != std::string::npos) fields[token.substr(0, eq)] = token.substr(eq + 1);
                pos = end == std::string::npos ? line.size() : end;
            }
            if (!fields.count("id") || !fields.count("mode")) fail(ErrorKind::data, where + "score header needs id and mode");
            auto& rec = out[fields["id"]];
            rec.id = fields["id"];
            if (fields["mode"] == "joint") {
                std::vector<std::string> vars;
                std::string list = fields["vars"];
                for (std::size_t s = 0; s <= list.size();) {
                    auto e = list.find(',', s);
                    vars.push_back(list.substr(s, e == std::string::npos ? std::string::npos : e - s));
                    if (e == std::string::npos) break;
                    s = e + 1;
                }
                if (!rec.free_vars.empty() && rec.free_vars != vars)
                    fail(ErrorKind::data, where + "joint block disagrees with earlier variables");
                rec.free_vars = vars;
                rec.scores.has_joint = true;
                rec.scores.joint.arity = vars.size();
                current = &rec.scores.joint;
            } else if (fields["mode"] == "marginal") {
                auto var = fields["var"];
                auto it = std::find(rec.free_vars.begin(), rec.free_vars.end(), var);
                std::size_t index = static_cast<std::size_t>(it - rec.free_vars.begin());
                if (it == rec.free_vars.end()) {
                    if (rec.scores.has_joint) fail(ErrorKind::data, where + "unknown variable '" + var + "'");
                    rec.free_vars.push_back(var);
                }
                if (rec.scores.marginals.size() <= index) rec.scores.marginals.resize(index + 1);
                current = &rec.scores.marginals[index];
            } else {
                fail(ErrorKind::data, where + "unknown score mode '" + fields["mode"] + "'");
            }
            continue;
        }
        if (line[0] == '#') continue;
        if (!current) fail(ErrorKind::data, where + "score line before any #query header");
        auto fields = detail::split_tabs(line);
        if (fields.size() != 2) fail(ErrorKind::data, where + "expected tuple<TAB>score");
        Tuple t;
        double score = 0.0;
        try {
            t = detail::split_tuple(fields[0], vocab);
            std::size_t used = 0;
            score = std::stod(std::string(fields[1]), &used);
            if (used != fields[1].size()) throw std::invalid_argument("trailing characters");
        } catch (const Error& e) {
            fail(ErrorKind::data, where + e.what());
        } catch (const std::exception&) {
            fail(ErrorKind::data, where + "malformed score");
        }
        if (t.size() != current->arity) fail(ErrorKind::data, where + "tuple arity does not match its block");
        if (!(score >= 0.0 && score <= 1.0)) fail(ErrorKind::data, where + "score outside [0,1]");
        current->scores[std::move(t)] = score;
    }
    return out;
}

}  // namespace ns3
