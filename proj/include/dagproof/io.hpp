#ifndef DAGPROOF_IO_HPP
#define DAGPROOF_IO_HPP

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "dagproof/assignment.hpp"
#include "dagproof/deduction.hpp"
#include "dagproof/error.hpp"
#include "dagproof/formula.hpp"
#include "dagproof/fst.hpp"

namespace dagproof {

inline constexpr int kDeductionFormatVersion = 1;
inline constexpr int kChoiceFormatVersion = 1;
inline constexpr int kThreadFormatVersion = 1;
inline constexpr int kTupleFormatVersion = 1;

using Json = nlohmann::ordered_json;

namespace detail {

template <class T>
T field(const Json& obj, const char* key, const std::string& where) {
    if (!obj.is_object() || !obj.contains(key)) {
        throw InputError(where + ": missing field \"" + key + "\"");
    }
    try {
        return obj.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw InputError(where + ": field \"" + key + "\" has the wrong type");
    }
}

inline Json parse_json(std::istream& is) {
    try {
        return Json::parse(is);
    } catch (const nlohmann::json::parse_error& e) {
        throw InputError(std::string("malformed JSON: ") + e.what());
    }
}

}

inline Json to_json(const Deduction& d) {
    Json nodes = Json::array();
    for (const Node& n : d.nodes()) {
        nodes.push_back({{"id", n.id},
                         {"formula", print_infix(n.formula)},
                         {"rule", to_string(n.rule)},
                         {"height", n.height},
                         {"children", n.children}});
    }
    return Json{{"root", d.root()}, {"nodes", std::move(nodes)}};
}

inline Deduction deduction_from_json(const Json& j) {
    if (!j.is_object()) throw InputError("deduction: expected an object with \"root\" and \"nodes\"");
    auto root = detail::field<NodeId>(j, "root", "deduction");
    if (!j.contains("nodes") || !j.at("nodes").is_array()) throw InputError("deduction: missing array \"nodes\"");
    std::vector<Node> nodes;
    std::size_t k = 0;
    for (const Json& e : j.at("nodes")) {
        std::string where = "node #" + std::to_string(k++);
        if (e.is_object() && e.contains("id") && e.at("id").is_number_unsigned()) {
            where = "node " + std::to_string(e.at("id").get<NodeId>());
        }
        Node n;
        n.id = detail::field<NodeId>(e, "id", where);
        auto text = detail::field<std::string>(e, "formula", where);
        try {
            n.formula = parse_infix(text);
        } catch (const SyntaxError& err) {
            throw InputError(where + ": formula \"" + text + "\": " + err.what());
        }
        auto rule = detail::field<std::string>(e, "rule", where);
        auto parsed = rule_from_string(rule);
        if (!parsed) throw InputError(where + ": unknown rule \"" + rule + "\"");
        n.rule = *parsed;
        n.height = detail::field<std::size_t>(e, "height", where);
        n.children = detail::field<std::vector<NodeId>>(e, "children", where);
        nodes.push_back(std::move(n));
    }
    return Deduction::build(std::move(nodes), root);
}

inline void write_deduction(std::ostream& os, const Deduction& d) { os << to_json(d).dump(2) << '\n'; }

inline Deduction read_deduction(std::istream& is) { return deduction_from_json(detail::parse_json(is)); }

inline Json to_json(const Choice& c) {
    Json out = Json::array();
    for (const auto& [edge, index] : c.entries()) {
        out.push_back({{"parent", edge.parent}, {"sep", edge.sep}, {"index", index}});
    }
    return out;
}

inline Choice choice_from_json(const Json& j) {
    if (!j.is_array()) throw InputError("choice: expected a list of {parent, sep, index}");
    Choice c;
    std::size_t k = 0;
    for (const Json& e : j) {
        std::string where = "choice entry #" + std::to_string(k++);
        auto parent = detail::field<NodeId>(e, "parent", where);
        auto sep = detail::field<NodeId>(e, "sep", where);
        auto index = detail::field<std::size_t>(e, "index", where);
        if (c.get(parent, sep)) {
            throw InputError(where + ": duplicate edge " + std::to_string(parent) + " -> " + std::to_string(sep));
        }
        c.set(parent, sep, index);
    }
    return c;
}

inline void write_choice(std::ostream& os, const Choice& c) { os << to_json(c).dump(2) << '\n'; }

inline Choice read_choice(std::istream& is) { return choice_from_json(detail::parse_json(is)); }

inline ThreadSet threads_from_json(const Json& j) {
    if (!j.is_array()) throw InputError("thread set: expected a list of id sequences");
    try {
        return j.get<ThreadSet>();
    } catch (const nlohmann::json::exception&) {
        throw InputError("thread set: every thread must be a list of node ids");
    }
}

inline void write_threads(std::ostream& os, const ThreadSet& t) {
    Json out = Json::array();
    for (const Thread& th : t) out.push_back(th);
    os << out.dump() << '\n';
}

inline ThreadSet read_threads(std::istream& is) { return threads_from_json(detail::parse_json(is)); }

/// Reads `path`, or standard input when `path` is "-".
inline std::string slurp(const std::string& path, std::istream& in = std::cin) {
    std::ostringstream buf;
    if (path == "-") {
        buf << in.rdbuf();
        return buf.str();
    }
    std::ifstream f(path);
    if (!f) throw InputError("cannot open " + path);
    buf << f.rdbuf();
    return buf.str();
}

}

#endif
