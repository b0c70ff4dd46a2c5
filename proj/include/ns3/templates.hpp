#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "ns3/error.hpp"
#include "ns3/query.hpp"

namespace ns3 {

/// Default query-type skeletons. `s` anchors are `(e ?N)` placeholders and
/// relations are `?rN` placeholders. Suffixes: p chain, d disconnected,
/// c cyclic, m multi-edge, n negation. The 1-free-variable block is used by
/// the single-target exactness checks.
inline constexpr std::string_view kDefaultTemplates = R"(# name  skeleton
2fp   (q (f y1 y2) (and (r ?r1 (e ?1) (v y1)) (r ?r2 (v y1) (v y2))))
2fpn  (q (f y1 y2) (and (r ?r1 (e ?1) (v y1)) (r ?r2 (v y1) (v y2)) (not (r ?r3 (e ?2) (v y2)))))
2fpm  (q (f y1 y2) (and (r ?r1 (e ?1) (v y1)) (r ?r2 (v y1) (v y2)) (r ?r3 (v y1) (v y2))))
2fd   (q (f y1 y2) (and (r ?r1 (e ?1) (v y1)) (r ?r2 (e ?2) (v y2))))
2fdm  (q (f y1 y2) (and (r ?r1 (e ?1) (v y1)) (r ?r2 (e ?1) (v y1)) (r ?r3 (e ?2) (v y2))))
2fc   (q (f y1 y2) (and (r ?r1 (e ?1) (v y1)) (r ?r2 (e ?1) (v y2)) (r ?r3 (v y1) (v y2))))
2fcn  (q (f y1 y2) (and (r ?r1 (e ?1) (v y1)) (r ?r2 (e ?1) (v y2)) (not (r ?r3 (v y1) (v y2)))))
3fp   (q (f y1 y2 y3) (and (r ?r1 (e ?1) (v y1)) (r ?r2 (v y1) (v y2)) (r ?r3 (v y2) (v y3))))
3fpn  (q (f y1 y2 y3) (and (r ?r1 (e ?1) (v y1)) (r ?r2 (v y1) (v y2)) (r ?r3 (v y2) (v y3)) (not (r ?r4 (e ?2) (v y3)))))
3fpm  (q (f y1 y2 y3) (and (r ?r1 (e ?1) (v y1)) (r ?r2 (v y1) (v y2)) (r ?r3 (v y2) (v y3)) (r ?r4 (v y2) (v y3))))
3fd   (q (f y1 y2 y3) (and (r ?r1 (e ?1) (v y1)) (r ?r2 (e ?2) (v y2)) (r ?r3 (e ?3) (v y3))))
3fdm  (q (f y1 y2 y3) (and (r ?r1 (e ?1) (v y1)) (r ?r2 (e ?1) (v y1)) (r ?r3 (e ?2) (v y2)) (r ?r4 (e ?3) (v y3))))
3fc   (q (f y1 y2 y3) (and (r ?r1 (e ?1) (v y1)) (r ?r2 (v y1) (v y2)) (r ?r3 (v y2) (v y3)) (r ?r4 (v y1) (v y3))))
3fcn  (q (f y1 y2 y3) (and (r ?r1 (e ?1) (v y1)) (r ?r2 (v y1) (v y2)) (r ?r3 (v y2) (v y3)) (not (r ?r4 (v y1) (v y3)))))
1p    (q (f y) (r ?r1 (e ?1) (v y)))
2p    (q (f y) (exists (x) (and (r ?r1 (e ?1) (x x)) (r ?r2 (x x) (v y)))))
3p    (q (f y) (exists (x1 x2) (and (r ?r1 (e ?1) (x x1)) (r ?r2 (x x1) (x x2)) (r ?r3 (x x2) (v y)))))
2i    (q (f y) (and (r ?r1 (e ?1) (v y)) (r ?r2 (e ?2) (v y))))
2in   (q (f y) (and (r ?r1 (e ?1) (v y)) (not (r ?r2 (e ?2) (v y)))))
pin   (q (f y) (exists (x) (and (r ?r1 (e ?1) (x x)) (r ?r2 (x x) (v y)) (not (r ?r3 (e ?2) (v y))))))
inp   (q (f y) (exists (x) (and (r ?r1 (e ?1) (x x)) (not (r ?r2 (e ?2) (x x))) (r ?r3 (x x) (v y)))))
2m    (q (f y) (exists (x) (and (r ?r1 (e ?1) (x x)) (r ?r2 (x x) (v y)) (r ?r3 (x x) (v y)))))
1c    (q (f y) (exists (x1 x2) (and (r ?r1 (e ?1) (x x1)) (r ?r2 (x x1) (x x2)) (r ?r3 (x x2) (v y)) (r ?r4 (x x1) (v y)))))
2c    (q (f y) (exists (x1 x2 x3) (and (r ?r1 (e ?1) (x x1)) (r ?r2 (x x1) (x x2)) (r ?r3 (x x2) (x x3)) (r ?r4 (x x3) (x x1)) (r ?r5 (x x2) (v y)))))
2cn   (q (f y) (exists (x1 x2) (and (r ?r1 (e ?1) (x x1)) (r ?r2 (x x1) (x x2)) (r ?r3 (x x2) (v y)) (not (r ?r4 (x x1) (v y))))))
)";

/// The fourteen multi-variable benchmark types, in reporting order.
inline const std::vector<std::string>& benchmark_type_names() {
    static const std::vector<std::string> names{"2fp", "2fpn", "2fpm", "2fd", "2fdm", "2fc", "2fcn",
                                                "3fp", "3fpn", "3fpm", "3fd", "3fdm", "3fc", "3fcn"};
    return names;
}

/// Single-free-variable types used for the solver exactness suites.
inline const std::vector<std::string>& efo1_type_names() {
    static const std::vector<std::string> names{"1p", "2p", "3p", "2i", "2in", "pin", "inp", "2m", "1c", "2c", "2cn"};
    return names;
}

/// Editable name -> skeleton registry. Lines are `name skeleton`; `#` starts a comment.
class TemplateRegistry {
   public:
    static TemplateRegistry parse(std::string_view text) {
        TemplateRegistry registry;
        std::istringstream in{std::string(text)};
        std::string line;
        std::size_t number = 0;
        while (std::getline(in, line)) {
            ++number;
            auto first = line.find_first_not_of(" \t\r");
            if (first == std::string::npos || line[first] == '#') continue;
            auto space = line.find_first_of(" \t", first);
            if (space == std::string::npos)
                fail(ErrorKind::data, "template line " + std::to_string(number) + ": missing skeleton");
            std::string name = line.substr(first, space - first);
            try {
                auto skeleton = parse_template(std::string_view(line).substr(space));
                if (!registry.templates_.emplace(name, std::move(skeleton)).second)
                    fail(ErrorKind::data, "duplicate template '" + name + "'");
            } catch (const ParseError& e) {
                fail(ErrorKind::data, "template '" + name + "': " + e.what());
            }
            registry.order_.push_back(name);
        }
        return registry;
    }

    static TemplateRegistry defaults() { return parse(kDefaultTemplates); }

    static TemplateRegistry load(const std::filesystem::path& path) {
        std::ifstream in(path);
        if (!in) fail(ErrorKind::data, "cannot open template registry " + path.string());
        std::stringstream buffer;
        buffer << in.rdbuf();
        return parse(buffer.str());
    }

    bool contains(std::string_view name) const { return templates_.count(std::string(name)) != 0; }
    const std::vector<std::string>& names() const noexcept { return order_; }

    const DnfQuery& get(std::string_view name) const {
        auto it = templates_.find(std::string(name));
        if (it == templates_.end()) fail(ErrorKind::config, "unknown query type '" + std::string(name) + "'");
        return it->second;
    }

   private:
    std::map<std::string, DnfQuery> templates_;
    std::vector<std::string> order_;
};

/// Ungrounded skeleton of a registered query type.
inline DnfQuery template_expand(std::string_view type_name, const TemplateRegistry& registry) {
    return registry.get(type_name);
}

}  // namespace ns3
