#pragma once

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "dagproof/dagproof.hpp"

namespace dagproof::testing {

// Reference implementations written straight from the definitions, with
// their own data representations (prefix strings, id maps, recursion).

using NameSet = std::set<std::string>;

/// A(x) by plain recursion on an S-free dag, formulas as prefix strings.
inline NameSet naive_assignment(const Deduction& d, NodeId id) {
    const Node& x = d.at(id);
    switch (x.rule) {
    case Rule::Leaf:
        return {x.formula.prefix()};
    case Rule::R:
        return naive_assignment(d, x.children[0]);
    case Rule::I: {
        NameSet s = naive_assignment(d, x.children[0]);
        s.erase(x.formula.antecedent().prefix());
        return s;
    }
    case Rule::E: {
        NameSet s = naive_assignment(d, x.children[0]);
        NameSet t = naive_assignment(d, x.children[1]);
        s.insert(t.begin(), t.end());
        return s;
    }
    case Rule::S:
        break;
    }
    throw std::logic_error("naive_assignment: S-node");
}

/// Every root-to-leaf path closed, by exhaustive recursion with a discharge multiset.
inline bool naive_all_paths_closed(const Deduction& d) {
    std::multiset<std::string> discharged;
    std::function<bool(NodeId)> go = [&](NodeId id) -> bool {
        const Node& x = d.at(id);
        if (x.rule == Rule::Leaf) return discharged.count(x.formula.prefix()) > 0;
        std::optional<std::multiset<std::string>::iterator> pushed;
        if (x.rule == Rule::I) pushed = discharged.insert(x.formula.antecedent().prefix());
        bool ok = true;
        for (NodeId c : x.children) {
            if (!go(c)) {
                ok = false;
                break;
            }
        }
        if (pushed) discharged.erase(*pushed);
        return ok;
    };
    return go(d.root());
}

inline std::size_t naive_path_count(const Deduction& d) {
    std::map<NodeId, std::size_t> memo;
    std::function<std::size_t(NodeId)> go = [&](NodeId id) -> std::size_t {
        if (auto it = memo.find(id); it != memo.end()) return it->second;
        const Node& x = d.at(id);
        std::size_t n = x.children.empty() ? 1 : 0;
        for (NodeId c : x.children) n += go(c);
        return memo[id] = n;
    };
    return go(d.root());
}

/// Three-colour DFS over the child relation.
inline bool is_acyclic(const Deduction& d) {
    std::map<NodeId, int> colour;
    std::function<bool(NodeId)> go = [&](NodeId id) -> bool {
        int& c = colour[id];
        if (c == 1) return false;
        if (c == 2) return true;
        c = 1;
        for (NodeId ch : d.at(id).children) {
            if (!go(ch)) return false;
        }
        colour[id] = 2;
        return true;
    };
    for (const Node& n : d.nodes()) {
        if (!go(n.id)) return false;
    }
    return true;
}

/// A(root) under a full choice, by recursion that resolves S-nodes per incoming edge.
inline NameSet naive_choice_value(const Deduction& d, const Choice& c) {
    std::function<NameSet(NodeId, NodeId)> go = [&](NodeId parent, NodeId id) -> NameSet {
        const Node& x = d.at(id);
        switch (x.rule) {
        case Rule::Leaf:
            return {x.formula.prefix()};
        case Rule::R:
            return go(id, x.children[0]);
        case Rule::I: {
            NameSet s = go(id, x.children[0]);
            s.erase(x.formula.antecedent().prefix());
            return s;
        }
        case Rule::E: {
            NameSet s = go(id, x.children[0]);
            NameSet t = go(id, x.children[1]);
            s.insert(t.begin(), t.end());
            return s;
        }
        case Rule::S:
            return go(id, x.children[*c.get(parent, id) - 1]);
        }
        return {};
    };
    return go(kNoNode, d.root());
}

/// Lexicographically least choice (edges in separation_edges order) making A(root) empty.
inline std::optional<Choice> brute_force_choice(const Deduction& d, std::size_t limit = 1u << 16) {
    std::vector<SepEdge> edges = separation_edges(d);
    std::vector<std::size_t> arity;
    std::size_t total = 1;
    for (const SepEdge& e : edges) {
        arity.push_back(d.at(e.sep).children.size());
        total *= arity.back();
        if (total > limit) throw std::length_error("brute_force_choice: too many choices");
    }
    std::vector<std::size_t> idx(edges.size(), 1);
    for (std::size_t n = 0; n < total; ++n) {
        Choice c;
        for (std::size_t k = 0; k < edges.size(); ++k) c.set(edges[k].parent, edges[k].sep, idx[k]);
        if (naive_choice_value(d, c).empty()) return c;
        for (std::size_t k = edges.size(); k-- > 0;) {
            if (++idx[k] <= arity[k]) break;
            idx[k] = 1;
        }
    }
    return std::nullopt;
}

/// Kripke semantics over rooted trees of worlds (parent[i] < i).
struct KripkeModel {
    std::vector<std::size_t> parent;                // parent[0] unused
    std::map<std::string, std::vector<bool>> atoms;  // up-closed truth sets
};

inline bool forces(const KripkeModel& m, std::size_t w, const Formula& f) {
    const std::size_t n = m.parent.size();
    auto above = [&](std::size_t v) {  // w <= v
        while (v != w && v != 0) v = m.parent[v];
        return v == w;
    };
    if (f.is_atom()) {
        auto it = m.atoms.find(f.name());
        return it != m.atoms.end() && it->second[w];
    }
    for (std::size_t v = 0; v < n; ++v) {
        if (above(v) && forces(m, v, f.antecedent()) && !forces(m, v, f.consequent())) return false;
    }
    return true;
}

/// Searches tree-shaped Kripke models with up to `max_worlds` worlds for one refuting `f` at the root.
inline std::optional<KripkeModel> kripke_countermodel(const Formula& f, std::size_t max_worlds = 4) {
    std::set<std::string> names;
    for (const Formula& s : subformulas(f)) {
        if (s.is_atom()) names.insert(s.name());
    }
    std::vector<std::string> atoms(names.begin(), names.end());
    for (std::size_t n = 1; n <= max_worlds; ++n) {
        std::vector<std::size_t> parent(n, 0);
        std::function<std::optional<KripkeModel>(std::size_t)> shapes = [&](std::size_t i) -> std::optional<KripkeModel> {
            if (i < n) {
                for (std::size_t p = 0; p < i; ++p) {
                    parent[i] = p;
                    if (auto m = shapes(i + 1)) return m;
                }
                return std::nullopt;
            }
            KripkeModel m{parent, {}};
            auto up_closed = [&](std::size_t mask) {
                for (std::size_t v = 1; v < n; ++v) {
                    if ((mask >> parent[v] & 1) && !(mask >> v & 1)) return false;
                }
                return true;
            };
            std::vector<std::size_t> masks(atoms.size(), 0);
            std::function<bool(std::size_t)> valuations = [&](std::size_t a) -> bool {
                if (a == atoms.size()) {
                    for (std::size_t k = 0; k < atoms.size(); ++k) {
                        std::vector<bool> truth(n);
                        for (std::size_t v = 0; v < n; ++v) truth[v] = masks[k] >> v & 1;
                        m.atoms[atoms[k]] = truth;
                    }
                    return !forces(m, 0, f);
                }
                for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
                    if (!up_closed(mask)) continue;
                    masks[a] = mask;
                    if (valuations(a + 1)) return true;
                }
                return false;
            };
            if (valuations(0)) return m;
            return std::nullopt;
        };
        if (auto m = shapes(1)) return m;
    }
    return std::nullopt;
}

/// Every purely implicational formula of weight at most `max_weight` over `atoms`.
inline std::vector<Formula> all_formulas(std::size_t max_weight, const std::vector<std::string>& atoms) {
    std::vector<std::vector<Formula>> by_weight(max_weight + 1);
    for (const auto& a : atoms) by_weight[1].push_back(Formula::atom(a));
    for (std::size_t w = 3; w <= max_weight; w += 2) {
        for (std::size_t l = 1; l + 1 < w; l += 2) {
            for (const Formula& x : by_weight[l]) {
                for (const Formula& y : by_weight[w - 1 - l]) by_weight[w].push_back(Formula::implies(x, y));
            }
        }
    }
    std::vector<Formula> out;
    for (const auto& v : by_weight) out.insert(out.end(), v.begin(), v.end());
    return out;
}

}
