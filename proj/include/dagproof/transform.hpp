#ifndef DAGPROOF_TRANSFORM_HPP
#define DAGPROOF_TRANSFORM_HPP

#include <algorithm>
#include <cstddef>
#include <deque>
#include <map>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "dagproof/assignment.hpp"
#include "dagproof/deduction.hpp"

namespace dagproof {

inline constexpr std::size_t kDefaultUnfoldCap = 1000000;

namespace detail {

inline NodeId max_id(const Deduction& d) {
    NodeId m = 0;
    for (const Node& n : d.nodes()) m = std::max(m, n.id);
    return m;
}

}

/// Duplicates every shared node once per incoming edge. The first copy met
/// breadth-first keeps the original id; further copies get fresh ids.
/// Overflows when the tree would exceed `cap` nodes.
inline Capped<Deduction> unfold(const Deduction& d, std::size_t cap = kDefaultUnfoldCap) {
    Capped<Deduction> out;
    std::vector<Node> nodes;
    std::vector<char> used(d.size(), 0);
    NodeId fresh = detail::max_id(d);
    auto claim = [&](std::size_t i) -> NodeId {
        if (!used[i]) {
            used[i] = 1;
            return d.node(i).id;
        }
        return ++fresh;
    };

    struct Item {
        std::size_t source;
        NodeId id;
    };
    std::deque<Item> queue{{d.root_index(), claim(d.root_index())}};
    while (!queue.empty()) {
        Item item = queue.front();
        queue.pop_front();
        if (nodes.size() >= cap) {
            out.overflow = true;
            return out;
        }
        const Node& src = d.node(item.source);
        Node n{item.id, src.formula, src.rule, src.height, {}};
        for (std::size_t c : d.children(item.source)) {
            NodeId cid = claim(c);
            n.children.push_back(cid);
            queue.push_back({c, cid});
        }
        nodes.push_back(std::move(n));
    }
    out.value = Deduction::build(std::move(nodes), d.root());
    return out;
}

/// Pads short branches of a tree with R-nodes so every leaf sits at the maximum height.
/// A padded leaf keeps its id and moves up; the inserted R-nodes get fresh ids.
inline Deduction level(const Deduction& t) {
    if (!t.tree_like()) {
        throw InputError("level expects a tree-like deduction");
    }
    const std::size_t top = t.max_height();
    NodeId fresh = detail::max_id(t);
    std::vector<Node> nodes = t.nodes();
    std::unordered_map<NodeId, NodeId> replace;
    std::vector<Node> added;
    for (Node& n : nodes) {
        if (n.rule != Rule::Leaf || n.height == top || n.id == t.root()) continue;
        NodeId below = ++fresh;
        replace[n.id] = below;
        for (std::size_t h = n.height; h < top; ++h) {
            NodeId next = (h + 1 == top) ? n.id : fresh + 1;
            added.push_back(Node{below, n.formula, Rule::R, h, {next}});
            if (h + 1 != top) below = ++fresh;
        }
        n.height = top;
    }
    for (Node& n : nodes) {
        for (NodeId& c : n.children) {
            if (auto it = replace.find(c); it != replace.end()) c = it->second;
        }
    }
    nodes.insert(nodes.end(), added.begin(), added.end());
    return Deduction::build(std::move(nodes), t.root());
}

/// Output of compress().
struct Compression {
    Deduction dag;
    /// Image of the tree's threads, without duplicates, in tree thread order.
    std::vector<Thread> thread_image;
    /// Per original level h: node count of the tree, distinct formulas (merge layer), premise groups (dispatch layer).
    std::vector<std::size_t> tree_width;
    std::vector<std::size_t> merge_width;
    std::vector<std::size_t> dispatch_width;
};

/// Horizontal compression of a leveled tree.
///
/// Original level h becomes two dag levels: 2h holds one merge node per
/// distinct formula, 2h+1 one dispatch node per distinct premise group
/// (rule plus merged premises) of that formula. A merge node with several
/// groups is an S-node over its dispatch nodes, otherwise an R-node over its
/// single dispatch node. Merge nodes of the top level are the leaves.
inline Compression compress(const Deduction& t) {
    if (!t.tree_like()) {
        throw InputError("compress expects a tree-like deduction");
    }
    const std::size_t top = t.max_height();
    for (const Node& n : t.nodes()) {
        if (n.rule == Rule::Leaf && n.height != top) {
            throw InputError("compress expects a leveled tree (leaf " + std::to_string(n.id) + " is below the top level)");
        }
        if (n.rule == Rule::S) {
            throw InputError("compress expects an S-free tree");
        }
    }

    const std::size_t levels = top + 1;
    // Tree nodes per level in breadth-first order.
    std::vector<std::vector<std::size_t>> by_level(levels);
    for (std::size_t i : t.bfs_order()) by_level[t.node(i).height].push_back(i);

    struct Group {
        Rule rule;
        std::vector<std::size_t> premises;  // merge node slots at level h+1
        auto key() const { return std::tie(rule, premises); }
    };
    struct Merge {
        Formula formula;
        std::vector<Group> groups;
    };
    std::vector<std::vector<Merge>> merges(levels);
    std::vector<std::size_t> merge_slot(t.size());
    std::vector<std::size_t> group_slot(t.size());

    for (std::size_t h = levels; h-- > 0;) {
        std::unordered_map<Formula, std::size_t> slot_of;
        for (std::size_t i : by_level[h]) {
            const Node& x = t.node(i);
            auto [it, inserted] = slot_of.emplace(x.formula, merges[h].size());
            if (inserted) merges[h].push_back(Merge{x.formula, {}});
            Merge& m = merges[h][it->second];
            merge_slot[i] = it->second;
            if (h == top) continue;
            Group g{x.rule, {}};
            for (std::size_t c : t.children(i)) g.premises.push_back(merge_slot[c]);
            auto git = std::find_if(m.groups.begin(), m.groups.end(), [&](const Group& o) { return o.key() == g.key(); });
            group_slot[i] = static_cast<std::size_t>(git - m.groups.begin());
            if (git == m.groups.end()) m.groups.push_back(std::move(g));
        }
    }

    // Ids: dag level by dag level, merge nodes in first-appearance order, dispatch nodes grouped by merge node.
    std::vector<std::vector<NodeId>> merge_id(levels);
    std::vector<std::vector<std::vector<NodeId>>> dispatch_id(levels);
    NodeId next = 0;
    for (std::size_t h = 0; h < levels; ++h) {
        for (std::size_t m = 0; m < merges[h].size(); ++m) merge_id[h].push_back(++next);
        dispatch_id[h].resize(merges[h].size());
        for (std::size_t m = 0; m < merges[h].size(); ++m) {
            for (std::size_t g = 0; g < merges[h][m].groups.size(); ++g) dispatch_id[h][m].push_back(++next);
        }
    }

    Compression out;
    std::vector<Node> nodes;
    for (std::size_t h = 0; h < levels; ++h) {
        std::size_t groups = 0;
        for (std::size_t m = 0; m < merges[h].size(); ++m) {
            const Merge& merge = merges[h][m];
            if (h == top) {
                nodes.push_back(Node{merge_id[h][m], merge.formula, Rule::Leaf, 2 * h, {}});
                continue;
            }
            Rule rule = merge.groups.size() > 1 ? Rule::S : Rule::R;
            nodes.push_back(Node{merge_id[h][m], merge.formula, rule, 2 * h, dispatch_id[h][m]});
            for (std::size_t g = 0; g < merge.groups.size(); ++g) {
                Node dn{dispatch_id[h][m][g], merge.formula, merge.groups[g].rule, 2 * h + 1, {}};
                for (std::size_t p : merge.groups[g].premises) dn.children.push_back(merge_id[h + 1][p]);
                nodes.push_back(std::move(dn));
                ++groups;
            }
        }
        out.tree_width.push_back(by_level[h].size());
        out.merge_width.push_back(merges[h].size());
        out.dispatch_width.push_back(groups);
    }
    out.dag = Deduction::build(std::move(nodes), merge_id[0][merge_slot[t.root_index()]]);

    // Thread image.
    std::map<Thread, bool> seen;
    Thread path;
    auto visit = [&](auto&& self, std::size_t i) -> void {
        const std::size_t h = t.node(i).height;
        path.push_back(merge_id[h][merge_slot[i]]);
        if (h == top) {
            if (seen.emplace(path, true).second) out.thread_image.push_back(path);
        } else {
            path.push_back(dispatch_id[h][merge_slot[i]][group_slot[i]]);
            for (std::size_t c : t.children(i)) self(self, c);
            path.pop_back();
        }
        path.pop_back();
    };
    visit(visit, t.root_index());
    return out;
}

/// Replaces every S-node by R-nodes according to `choice`: one R copy per
/// distinct branch index chosen among its live parents, each parent wired to
/// its own copy. Nodes no longer reachable are dropped. The first copy of an
/// S-node keeps its id.
inline Deduction s_eliminate(const Deduction& d, const Choice& choice) {
    NodeId fresh = detail::max_id(d);
    std::vector<Node> nodes;
    std::vector<char> queued(d.size(), 0);
    std::map<std::pair<std::size_t, std::size_t>, NodeId> copies;
    std::vector<char> copied(d.size(), 0);
    std::deque<std::size_t> queue;

    auto target = [&](auto&& self, NodeId parent, std::size_t c) -> NodeId {
        const Node& x = d.node(c);
        if (x.rule != Rule::S) {
            if (!queued[c]) {
                queued[c] = 1;
                queue.push_back(c);
            }
            return x.id;
        }
        auto idx = choice.get(parent, x.id);
        if (!idx) throw MissingChoice({parent, x.id});
        const auto& bs = d.children(c);
        if (*idx < 1 || *idx > bs.size()) {
            throw InputError("choice index " + std::to_string(*idx) + " out of range for S-node " + std::to_string(x.id));
        }
        auto key = std::make_pair(c, *idx);
        if (auto it = copies.find(key); it != copies.end()) return it->second;
        NodeId id = copied[c] ? ++fresh : x.id;
        copied[c] = 1;
        copies.emplace(key, id);
        Node r{id, x.formula, Rule::R, x.height, {}};
        r.children.push_back(self(self, x.id, bs[*idx - 1]));
        nodes.push_back(std::move(r));
        return id;
    };

    NodeId root = target(target, kNoNode, d.root_index());
    while (!queue.empty()) {
        std::size_t i = queue.front();
        queue.pop_front();
        const Node& x = d.node(i);
        Node n{x.id, x.formula, x.rule, x.height, {}};
        for (std::size_t c : d.children(i)) n.children.push_back(target(target, x.id, c));
        nodes.push_back(std::move(n));
    }
    return Deduction::build(std::move(nodes), root);
}

}

#endif
