#ifndef DAGPROOF_DEDUCTION_HPP
#define DAGPROOF_DEDUCTION_HPP

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <optional>
#include <sstream>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "dagproof/error.hpp"
#include "dagproof/formula.hpp"

namespace dagproof {

/// Node ids are positive; 0 is reserved for "no node" (tuple encoding, root pseudo-parent).
using NodeId = std::uint64_t;
inline constexpr NodeId kNoNode = 0;

inline constexpr std::size_t kDefaultThreadCap = 100000;

enum class Rule { Leaf, R, I, E, S };

inline const char* to_string(Rule rule) {
    switch (rule) {
    case Rule::Leaf: return "LEAF";
    case Rule::R: return "R";
    case Rule::I: return "I";
    case Rule::E: return "E";
    case Rule::S: return "S";
    }
    return "?";
}

inline std::optional<Rule> rule_from_string(std::string_view text) {
    if (text == "LEAF") return Rule::Leaf;
    if (text == "R") return Rule::R;
    if (text == "I") return Rule::I;
    if (text == "E") return Rule::E;
    if (text == "S") return Rule::S;
    return std::nullopt;
}

/// A deduction node. Children are premises; for E the order is (minor, major).
struct Node {
    NodeId id = kNoNode;
    Formula formula;
    Rule rule = Rule::Leaf;
    std::size_t height = 0;
    std::vector<NodeId> children;

    friend bool operator==(const Node& a, const Node& b) {
        return a.id == b.id && a.formula == b.formula && a.rule == b.rule && a.height == b.height &&
               a.children == b.children;
    }
};

struct StructureIssue {
    NodeId node = kNoNode;
    std::string message;
};

/// Thrown by Deduction::build; lists every violated structural invariant.
class StructureError : public InputError {
public:
    explicit StructureError(std::vector<StructureIssue> issues)
        : InputError(summarize(issues)), issues_(std::move(issues)) {}

    const std::vector<StructureIssue>& issues() const noexcept { return issues_; }

private:
    static std::string summarize(const std::vector<StructureIssue>& issues) {
        std::ostringstream os;
        os << "invalid deduction:";
        for (const auto& issue : issues) {
            os << " [node " << issue.node << ": " << issue.message << "]";
        }
        return os.str();
    }

    std::vector<StructureIssue> issues_;
};

/// Checks arity, leveling, root and reachability invariants without building.
inline std::vector<StructureIssue> validate_structure(const std::vector<Node>& nodes, NodeId root) {
    std::vector<StructureIssue> issues;
    std::unordered_map<NodeId, std::size_t> index;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const Node& n = nodes[i];
        if (n.id == kNoNode) {
            issues.push_back({n.id, "node id 0 is reserved"});
            continue;
        }
        if (!n.formula.valid()) {
            issues.push_back({n.id, "missing formula"});
        }
        if (!index.emplace(n.id, i).second) {
            issues.push_back({n.id, "duplicate node id"});
        }
    }
    if (!issues.empty()) {
        return issues;
    }

    auto root_it = index.find(root);
    if (root_it == index.end()) {
        issues.push_back({root, "root does not exist"});
        return issues;
    }

    bool dangling = false;
    for (const Node& n : nodes) {
        const std::size_t arity = n.children.size();
        switch (n.rule) {
        case Rule::Leaf:
            if (arity != 0) issues.push_back({n.id, "leaf has children"});
            break;
        case Rule::R:
        case Rule::I:
            if (arity != 1) issues.push_back({n.id, std::string("rule ") + to_string(n.rule) + " needs exactly 1 child"});
            break;
        case Rule::E:
            if (arity != 2) {
                issues.push_back({n.id, "rule E needs exactly 2 children"});
            } else if (n.children[0] == n.children[1]) {
                issues.push_back({n.id, "rule E needs two distinct children"});
            }
            break;
        case Rule::S:
            if (arity < 2) issues.push_back({n.id, "rule S needs at least 2 children"});
            break;
        }
        for (NodeId c : n.children) {
            auto it = index.find(c);
            if (it == index.end()) {
                issues.push_back({n.id, "child " + std::to_string(c) + " does not exist"});
                dangling = true;
                continue;
            }
            if (c == root) {
                issues.push_back({n.id, "root is listed as a child"});
            }
            if (nodes[it->second].height != n.height + 1) {
                issues.push_back({c, "child height != parent height + 1 (parent " + std::to_string(n.id) + ")"});
            }
        }
    }
    if (nodes[root_it->second].height != 0) {
        issues.push_back({root, "root height is not 0"});
    }
    if (dangling) {
        return issues;
    }

    std::vector<char> seen(nodes.size(), 0);
    std::vector<std::size_t> stack{root_it->second};
    seen[root_it->second] = 1;
    while (!stack.empty()) {
        std::size_t i = stack.back();
        stack.pop_back();
        for (NodeId c : nodes[i].children) {
            std::size_t j = index.at(c);
            if (!seen[j]) {
                seen[j] = 1;
                stack.push_back(j);
            }
        }
    }
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (!seen[i]) {
            issues.push_back({nodes[i].id, "not reachable from root"});
        }
    }
    return issues;
}

/// A leveled rooted dag of labeled nodes. Immutable after build().
class Deduction {
public:
    Deduction() = default;

    /// Validates and indexes `nodes`. E-nodes given as (major, minor) are
    /// normalized to (minor, major). Throws StructureError.
    static Deduction build(std::vector<Node> nodes, NodeId root) {
        auto issues = validate_structure(nodes, root);
        if (!issues.empty()) {
            throw StructureError(std::move(issues));
        }
        Deduction d;
        std::sort(nodes.begin(), nodes.end(), [](const Node& a, const Node& b) { return a.id < b.id; });
        d.nodes_ = std::move(nodes);
        for (std::size_t i = 0; i < d.nodes_.size(); ++i) {
            d.index_.emplace(d.nodes_[i].id, i);
        }
        for (Node& n : d.nodes_) {
            if (n.rule == Rule::E) {
                const Formula& first = d.nodes_[d.index_.at(n.children[0])].formula;
                const Formula& second = d.nodes_[d.index_.at(n.children[1])].formula;
                if (first.is_implication() && first.antecedent() == second && first.consequent() == n.formula &&
                    !(second.is_implication() && second.antecedent() == first && second.consequent() == n.formula)) {
                    std::swap(n.children[0], n.children[1]);
                }
            }
        }
        d.root_ = d.index_.at(root);
        d.children_.resize(d.nodes_.size());
        d.parents_.resize(d.nodes_.size());
        for (std::size_t i = 0; i < d.nodes_.size(); ++i) {
            for (NodeId c : d.nodes_[i].children) {
                std::size_t j = d.index_.at(c);
                d.children_[i].push_back(j);
                d.parents_[j].push_back(i);
            }
            d.max_height_ = std::max(d.max_height_, d.nodes_[i].height);
            d.has_separation_ = d.has_separation_ || d.nodes_[i].rule == Rule::S;
        }
        for (auto& ps : d.parents_) {
            ps.erase(std::unique(ps.begin(), ps.end()), ps.end());
        }
        d.tree_like_ = std::all_of(d.parents_.begin(), d.parents_.end(), [](const auto& ps) { return ps.size() <= 1; });
        // Same-parent duplicates (only possible for S) also break tree shape.
        for (std::size_t i = 0; i < d.nodes_.size() && d.tree_like_; ++i) {
            std::vector<std::size_t> cs = d.children_[i];
            std::sort(cs.begin(), cs.end());
            d.tree_like_ = std::adjacent_find(cs.begin(), cs.end()) == cs.end();
        }

        // Breadth-first order from the root; children in stored order.
        std::vector<char> seen(d.nodes_.size(), 0);
        std::deque<std::size_t> queue{d.root_};
        seen[d.root_] = 1;
        while (!queue.empty()) {
            std::size_t i = queue.front();
            queue.pop_front();
            d.bfs_.push_back(i);
            for (std::size_t j : d.children_[i]) {
                if (!seen[j]) {
                    seen[j] = 1;
                    queue.push_back(j);
                }
            }
        }
        return d;
    }

    std::size_t size() const noexcept { return nodes_.size(); }
    const std::vector<Node>& nodes() const noexcept { return nodes_; }
    const Node& node(std::size_t index) const { return nodes_[index]; }
    const Node& at(NodeId id) const { return nodes_[index_of(id)]; }
    bool contains(NodeId id) const { return index_.count(id) != 0; }
    std::size_t index_of(NodeId id) const {
        auto it = index_.find(id);
        if (it == index_.end()) {
            throw InputError("unknown node id " + std::to_string(id));
        }
        return it->second;
    }

    std::size_t root_index() const noexcept { return root_; }
    NodeId root() const { return nodes_[root_].id; }
    const Formula& root_formula() const { return nodes_[root_].formula; }

    const std::vector<std::size_t>& children(std::size_t index) const { return children_[index]; }
    /// Distinct parents of a node (indices).
    const std::vector<std::size_t>& parents(std::size_t index) const { return parents_[index]; }

    /// Node indices in breadth-first order from the root (ascending height).
    const std::vector<std::size_t>& bfs_order() const noexcept { return bfs_; }

    std::size_t max_height() const noexcept { return max_height_; }
    bool tree_like() const noexcept { return tree_like_; }
    bool has_separation() const noexcept { return has_separation_; }
    bool is_leaf(std::size_t index) const { return nodes_[index].rule == Rule::Leaf; }

    std::size_t edge_count() const {
        std::size_t n = 0;
        for (const auto& cs : children_) n += cs.size();
        return n;
    }

    /// Total number of formula symbols over all nodes.
    std::size_t weight() const {
        std::size_t w = 0;
        for (const Node& n : nodes_) w += n.formula.weight();
        return w;
    }

    friend bool operator==(const Deduction& a, const Deduction& b) {
        return a.root() == b.root() && a.nodes_ == b.nodes_;
    }

private:
    std::vector<Node> nodes_;
    std::unordered_map<NodeId, std::size_t> index_;
    std::size_t root_ = 0;
    std::vector<std::vector<std::size_t>> children_;
    std::vector<std::vector<std::size_t>> parents_;
    std::vector<std::size_t> bfs_;
    std::size_t max_height_ = 0;
    bool tree_like_ = true;
    bool has_separation_ = false;
};

/// Root-to-leaf chain of node ids.
using Thread = std::vector<NodeId>;

/// Result of a capped enumeration: `overflow` means the cap was exceeded and `value` is partial.
template <class T>
struct Capped {
    bool overflow = false;
    T value{};
};

/// All maximal root-to-leaf chains, depth-first with children in stored order.
inline Capped<std::vector<Thread>> threads(const Deduction& d, std::size_t cap = kDefaultThreadCap) {
    Capped<std::vector<Thread>> out;
    std::vector<std::size_t> path;
    auto visit = [&](auto&& self, std::size_t i) -> bool {
        path.push_back(i);
        if (d.children(i).empty()) {
            if (out.value.size() == cap) {
                out.overflow = true;
                return false;
            }
            Thread t;
            t.reserve(path.size());
            for (std::size_t j : path) t.push_back(d.node(j).id);
            out.value.push_back(std::move(t));
        } else {
            for (std::size_t j : d.children(i)) {
                if (!self(self, j)) return false;
            }
        }
        path.pop_back();
        return true;
    };
    visit(visit, d.root_index());
    return out;
}

/// True iff some I-node on `t` concludes (leaf formula) -> (formula of its successor on `t`).
inline bool is_closed(const Deduction& d, const Thread& t) {
    if (t.empty()) {
        return false;
    }
    const Formula& leaf = d.at(t.back()).formula;
    for (std::size_t i = 0; i + 1 < t.size(); ++i) {
        const Node& x = d.at(t[i]);
        if (x.rule == Rule::I && x.formula.is_implication() && x.formula.antecedent() == leaf &&
            x.formula.consequent() == d.at(t[i + 1]).formula) {
            return true;
        }
    }
    return false;
}

/// Every maximal thread closed. Enumerates implicitly; overflow once more than `cap` threads are seen.
inline Capped<bool> proves_by_threads(const Deduction& d, std::size_t cap = kDefaultThreadCap) {
    Capped<bool> out{false, true};
    std::size_t count = 0;
    std::vector<std::size_t> path;
    auto visit = [&](auto&& self, std::size_t i) -> bool {
        path.push_back(i);
        if (d.children(i).empty()) {
            if (++count > cap) {
                out.overflow = true;
                return false;
            }
            const Formula& leaf = d.node(i).formula;
            bool closed = false;
            for (std::size_t k = 0; k + 1 < path.size() && !closed; ++k) {
                const Node& x = d.node(path[k]);
                closed = x.rule == Rule::I && x.formula.is_implication() && x.formula.antecedent() == leaf &&
                         x.formula.consequent() == d.node(path[k + 1]).formula;
            }
            if (!closed) {
                out.value = false;
            }
        } else {
            for (std::size_t j : d.children(i)) {
                if (!self(self, j)) return false;
            }
        }
        path.pop_back();
        return true;
    };
    visit(visit, d.root_index());
    return out;
}

}

#endif
