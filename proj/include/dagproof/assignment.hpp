#ifndef DAGPROOF_ASSIGNMENT_HPP
#define DAGPROOF_ASSIGNMENT_HPP

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "dagproof/deduction.hpp"
#include "dagproof/formula.hpp"

namespace dagproof {

// ---------------------------------------------------------------------------
// Symbolic assignment terms
// ---------------------------------------------------------------------------

using TermRef = std::size_t;

struct Term {
    enum class Kind { Singleton, Union, Minus, Sep };

    Kind kind = Kind::Singleton;
    /// Singleton element, or the formula removed by Minus.
    Formula formula;
    TermRef left = 0;   // Union
    TermRef right = 0;  // Union
    TermRef inner = 0;  // Minus
    NodeId node = kNoNode;  // Sep
    std::vector<TermRef> branches;  // Sep
};

/// Shared-subterm store: one term per non-R node; an R-node shares its premise's term.
class TermStore {
public:
    const Term& term(TermRef ref) const { return terms_.at(ref); }
    std::size_t size() const noexcept { return terms_.size(); }
    /// Term of the node with the given index in the deduction.
    TermRef of_index(std::size_t index) const { return node_term_.at(index); }

private:
    friend TermStore build_terms(const Deduction& d);
    std::vector<Term> terms_;
    std::vector<TermRef> node_term_;
};

/// A(x) for every node: leaf {φ}; R premise term; I premise \ {α}; E minor ∪ major; S sep(premises).
inline TermStore build_terms(const Deduction& d) {
    TermStore store;
    store.node_term_.assign(d.size(), 0);
    std::vector<std::size_t> order = d.bfs_order();
    std::reverse(order.begin(), order.end());
    for (std::size_t i : order) {
        const Node& x = d.node(i);
        const auto& cs = d.children(i);
        Term t;
        switch (x.rule) {
        case Rule::Leaf:
            t.kind = Term::Kind::Singleton;
            t.formula = x.formula;
            break;
        case Rule::R:
            store.node_term_[i] = store.node_term_[cs.at(0)];
            continue;
        case Rule::I:
            t.kind = Term::Kind::Minus;
            t.inner = store.node_term_[cs.at(0)];
            if (!x.formula.is_implication()) {
                throw InputError("I-node " + std::to_string(x.id) + " does not conclude an implication");
            }
            t.formula = x.formula.antecedent();
            break;
        case Rule::E:
            t.kind = Term::Kind::Union;
            t.left = store.node_term_[cs.at(0)];
            t.right = store.node_term_[cs.at(1)];
            break;
        case Rule::S:
            t.kind = Term::Kind::Sep;
            t.node = x.id;
            for (std::size_t j : cs) t.branches.push_back(store.node_term_[j]);
            break;
        }
        store.node_term_[i] = store.terms_.size();
        store.terms_.push_back(std::move(t));
    }
    return store;
}

/// Fully expanded rendering; exponential on heavily shared dags.
inline void print_term(std::ostream& os, const TermStore& store, TermRef ref) {
    const Term& t = store.term(ref);
    switch (t.kind) {
    case Term::Kind::Singleton:
        os << '{' << t.formula << '}';
        break;
    case Term::Kind::Union:
        os << '(';
        print_term(os, store, t.left);
        os << " | ";
        print_term(os, store, t.right);
        os << ')';
        break;
    case Term::Kind::Minus:
        os << '(';
        print_term(os, store, t.inner);
        os << " \\ {" << t.formula << "})";
        break;
    case Term::Kind::Sep:
        os << "sep(";
        for (std::size_t k = 0; k < t.branches.size(); ++k) {
            if (k) os << ", ";
            print_term(os, store, t.branches[k]);
        }
        os << ')';
        break;
    }
}

inline std::string term_to_string(const TermStore& store, TermRef ref) {
    std::ostringstream os;
    print_term(os, store, ref);
    return os.str();
}

/// A term with ∪ and \ pushed into sep branches and evaluated: either a
/// literal formula set or sep(...) over normal terms.
struct NormalTerm {
    FormulaSet set;
    std::vector<NormalTerm> branches;

    bool is_sep() const noexcept { return !branches.empty(); }

    static NormalTerm literal(FormulaSet s) { return NormalTerm{std::move(s), {}}; }
    static NormalTerm sep(std::vector<NormalTerm> bs) { return NormalTerm{{}, std::move(bs)}; }

    friend bool operator==(const NormalTerm& a, const NormalTerm& b) {
        return a.branches == b.branches && (a.is_sep() || a.set == b.set);
    }
};

inline std::ostream& operator<<(std::ostream& os, const NormalTerm& t) {
    if (!t.is_sep()) return os << t.set;
    os << "sep(";
    for (std::size_t k = 0; k < t.branches.size(); ++k) {
        if (k) os << ", ";
        os << t.branches[k];
    }
    return os << ')';
}

namespace detail {

inline NormalTerm remove_formula(const NormalTerm& t, const Formula& f) {
    if (!t.is_sep()) return NormalTerm::literal(t.set.without(f));
    std::vector<NormalTerm> bs;
    for (const auto& b : t.branches) bs.push_back(remove_formula(b, f));
    return NormalTerm::sep(std::move(bs));
}

inline NormalTerm combine(const NormalTerm& l, const NormalTerm& r) {
    if (l.is_sep()) {
        std::vector<NormalTerm> bs;
        for (const auto& b : l.branches) bs.push_back(combine(b, r));
        return NormalTerm::sep(std::move(bs));
    }
    if (r.is_sep()) {
        std::vector<NormalTerm> bs;
        for (const auto& b : r.branches) bs.push_back(combine(l, b));
        return NormalTerm::sep(std::move(bs));
    }
    return NormalTerm::literal(set_union(l.set, r.set));
}

}

inline NormalTerm normalize(const TermStore& store, TermRef ref) {
    std::vector<std::optional<NormalTerm>> memo(store.size());
    auto go = [&](auto&& self, TermRef r) -> const NormalTerm& {
        if (memo[r]) return *memo[r];
        const Term& t = store.term(r);
        NormalTerm out;
        switch (t.kind) {
        case Term::Kind::Singleton:
            out = NormalTerm::literal(FormulaSet::singleton(t.formula));
            break;
        case Term::Kind::Minus:
            out = detail::remove_formula(self(self, t.inner), t.formula);
            break;
        case Term::Kind::Union:
            out = detail::combine(self(self, t.left), self(self, t.right));
            break;
        case Term::Kind::Sep: {
            std::vector<NormalTerm> bs;
            for (TermRef b : t.branches) bs.push_back(self(self, b));
            out = NormalTerm::sep(std::move(bs));
            break;
        }
        }
        memo[r] = std::move(out);
        return *memo[r];
    };
    return go(go, ref);
}

// ---------------------------------------------------------------------------
// Choices and evaluation
// ---------------------------------------------------------------------------

/// An edge into an S-node. `parent` is kNoNode when the S-node is the root.
struct SepEdge {
    NodeId parent = kNoNode;
    NodeId sep = kNoNode;

    friend auto operator<=>(const SepEdge&, const SepEdge&) = default;
};

/// Branch selection per S-edge; indices are 1-based.
class Choice {
public:
    void set(NodeId parent, NodeId sep, std::size_t index) { entries_[{parent, sep}] = index; }
    std::optional<std::size_t> get(NodeId parent, NodeId sep) const {
        auto it = entries_.find({parent, sep});
        if (it == entries_.end()) return std::nullopt;
        return it->second;
    }
    bool empty() const noexcept { return entries_.empty(); }
    std::size_t size() const noexcept { return entries_.size(); }
    const std::map<SepEdge, std::size_t>& entries() const noexcept { return entries_; }

    friend bool operator==(const Choice&, const Choice&) = default;

private:
    std::map<SepEdge, std::size_t> entries_;
};

/// Every S-edge, ordered breadth-first by parent, then by the parent's child order.
inline std::vector<SepEdge> separation_edges(const Deduction& d) {
    std::vector<SepEdge> out;
    if (d.node(d.root_index()).rule == Rule::S) out.push_back({kNoNode, d.root()});
    for (std::size_t i : d.bfs_order()) {
        std::vector<std::size_t> seen;
        for (std::size_t j : d.children(i)) {
            if (d.node(j).rule != Rule::S || std::find(seen.begin(), seen.end(), j) != seen.end()) continue;
            seen.push_back(j);
            out.push_back({d.node(i).id, d.node(j).id});
        }
    }
    return out;
}

/// Thrown when an evaluation or elimination reaches an S-edge without a choice entry.
class MissingChoice : public InputError {
public:
    explicit MissingChoice(SepEdge edge)
        : InputError("no choice for S-edge (parent " + std::to_string(edge.parent) + ", sep " +
                     std::to_string(edge.sep) + ")"),
          edge_(edge) {}
    SepEdge edge() const noexcept { return edge_; }

private:
    SepEdge edge_;
};

struct Evaluation {
    /// Value per node index; empty for S-nodes and nodes cut off by the choice.
    std::vector<std::optional<FormulaSet>> values;
    FormulaSet root;
};

namespace detail {

/// Follows `choice` from `parent` into child `c`, passing through S-nodes.
inline std::size_t resolve(const Deduction& d, const Choice& choice, std::size_t parent_index, std::size_t c,
                           bool parent_is_pseudo = false) {
    while (d.node(c).rule == Rule::S) {
        NodeId pid = parent_is_pseudo ? kNoNode : d.node(parent_index).id;
        auto idx = choice.get(pid, d.node(c).id);
        if (!idx) throw MissingChoice({pid, d.node(c).id});
        const auto& bs = d.children(c);
        if (*idx < 1 || *idx > bs.size()) {
            throw InputError("choice index " + std::to_string(*idx) + " out of range for S-node " +
                             std::to_string(d.node(c).id));
        }
        parent_index = c;
        parent_is_pseudo = false;
        c = bs[*idx - 1];
    }
    return c;
}

}

/// Set-valued evaluation where each parent reads its S-children through `choice`.
inline Evaluation evaluate(const Deduction& d, const Choice& choice) {
    Evaluation ev;
    ev.values.assign(d.size(), std::nullopt);
    std::vector<char> live(d.size(), 0);
    const std::size_t start = detail::resolve(d, choice, d.root_index(), d.root_index(), true);
    live[start] = 1;
    for (std::size_t i : d.bfs_order()) {
        if (!live[i]) continue;
        for (std::size_t c : d.children(i)) live[detail::resolve(d, choice, i, c)] = 1;
    }
    std::vector<std::size_t> order = d.bfs_order();
    std::reverse(order.begin(), order.end());
    for (std::size_t i : order) {
        if (!live[i]) continue;
        const Node& x = d.node(i);
        const auto& cs = d.children(i);
        auto child = [&](std::size_t k) -> const FormulaSet& {
            return *ev.values[detail::resolve(d, choice, i, cs[k])];
        };
        switch (x.rule) {
        case Rule::Leaf: ev.values[i] = FormulaSet::singleton(x.formula); break;
        case Rule::R: ev.values[i] = child(0); break;
        case Rule::I: ev.values[i] = child(0).without(x.formula.antecedent()); break;
        case Rule::E: ev.values[i] = set_union(child(0), child(1)); break;
        case Rule::S: break;
        }
    }
    ev.root = *ev.values[start];
    return ev;
}

/// A(root) = ∅ on an S-free deduction.
inline bool prov(const Deduction& d) {
    if (d.has_separation()) {
        throw InputError("prov is defined for S-free deductions; use search_choice");
    }
    return evaluate(d, Choice{}).root.empty();
}

/// Root cannot reach a leaf z once every edge out of an I-node discharging ℓ(z) is deleted.
inline bool prov1(const Deduction& d) {
    if (d.has_separation()) {
        throw InputError("prov1 is defined for S-free deductions");
    }
    std::vector<Formula> targets;
    for (const Node& n : d.nodes()) {
        if (n.rule == Rule::Leaf) targets.push_back(n.formula);
    }
    std::sort(targets.begin(), targets.end());
    targets.erase(std::unique(targets.begin(), targets.end()), targets.end());

    std::vector<char> seen(d.size());
    std::vector<std::size_t> stack;
    for (const Formula& target : targets) {
        std::fill(seen.begin(), seen.end(), 0);
        stack.assign(1, d.root_index());
        seen[d.root_index()] = 1;
        while (!stack.empty()) {
            std::size_t i = stack.back();
            stack.pop_back();
            const Node& x = d.node(i);
            if (x.rule == Rule::Leaf && x.formula == target) return false;
            if (x.rule == Rule::I && x.formula.is_implication() && x.formula.antecedent() == target) continue;
            for (std::size_t j : d.children(i)) {
                if (!seen[j]) {
                    seen[j] = 1;
                    stack.push_back(j);
                }
            }
        }
    }
    return true;
}

// ---------------------------------------------------------------------------
// Certificate search
// ---------------------------------------------------------------------------

namespace detail {

/// Backtracking over S-edge branch indices in separation_edges() order.
///
/// A partial assignment is abandoned as soon as some leaf that is already
/// reachable through decided edges has its formula outside the intersection
/// of the discharge sets of its known paths; adding edges only shrinks those
/// intersections, so no completion can succeed.
class ChoiceSearch {
public:
    ChoiceSearch(const Deduction& d, std::size_t max_steps) : d_(d), max_steps_(max_steps) {
        edges_ = separation_edges(d);
        for (std::size_t k = 0; k < edges_.size(); ++k) edge_index_[edges_[k]] = k;
        picks_.assign(edges_.size(), 0);
        for (std::size_t i = 0; i < d.size(); ++i) {
            const Node& x = d.node(i);
            if (x.rule == Rule::I && x.formula.is_implication()) discharge_.emplace(i, x.formula.antecedent());
        }
    }

    std::optional<Choice> run() {
        if (!descend(0)) return std::nullopt;
        Choice c;
        for (std::size_t k = 0; k < edges_.size(); ++k) c.set(edges_[k].parent, edges_[k].sep, picks_[k]);
        return c;
    }

private:
    enum class Status { Failed, Open, Complete };

    bool descend(std::size_t k) {
        if (max_steps_ && ++steps_ > max_steps_) {
            throw ResourceLimit("certificate search exceeded " + std::to_string(max_steps_) + " steps", "search-steps");
        }
        std::vector<char> live_parent;
        Status s = propagate(live_parent);
        if (s == Status::Failed) return false;
        const std::size_t first = k;
        while (k < edges_.size() && !parent_live(edges_[k], live_parent)) {
            picks_[k++] = 1;
        }
        if (k == edges_.size()) {
            if (s == Status::Complete) return true;
            std::fill(picks_.begin() + first, picks_.end(), 0);
            return false;
        }
        const std::size_t arity = d_.children(d_.index_of(edges_[k].sep)).size();
        for (std::size_t idx = 1; idx <= arity; ++idx) {
            picks_[k] = idx;
            if (descend(k + 1)) return true;
        }
        std::fill(picks_.begin() + first, picks_.end(), 0);
        return false;
    }

    bool parent_live(const SepEdge& e, const std::vector<char>& live) const {
        return e.parent == kNoNode || live[d_.index_of(e.parent)];
    }

    /// Forward pass over decided edges computing liveness and discharge intersections.
    Status propagate(std::vector<char>& live) const {
        const std::size_t n = d_.size();
        live.assign(n, 0);
        std::vector<std::optional<FormulaSet>> ctx(n);
        bool pending = false;

        auto reach = [&](std::size_t c, const FormulaSet& context) {
            if (!ctx[c]) ctx[c] = context;
            else ctx[c] = set_intersection(*ctx[c], context);
            live[c] = 1;
        };
        // Returns the node reached from `parent` through `c`, or nullopt if an undecided edge blocks.
        auto follow = [&](std::optional<std::size_t> parent, std::size_t c) -> std::optional<std::size_t> {
            while (d_.node(c).rule == Rule::S) {
                SepEdge e{parent ? d_.node(*parent).id : kNoNode, d_.node(c).id};
                std::size_t pick = picks_[edge_index_.at(e)];
                if (pick == 0) return std::nullopt;
                parent = c;
                c = d_.children(c)[pick - 1];
            }
            return c;
        };

        auto start = follow(std::nullopt, d_.root_index());
        if (!start) return Status::Open;
        reach(*start, FormulaSet{});
        for (std::size_t i : d_.bfs_order()) {
            if (!live[i]) continue;
            const Node& x = d_.node(i);
            if (x.rule == Rule::Leaf) {
                if (!ctx[i]->contains(x.formula)) return Status::Failed;
                continue;
            }
            FormulaSet passed = *ctx[i];
            if (auto it = discharge_.find(i); it != discharge_.end()) passed.insert(it->second);
            for (std::size_t c : d_.children(i)) {
                auto target = follow(i, c);
                if (!target) {
                    pending = true;
                    continue;
                }
                reach(*target, passed);
            }
        }
        return pending ? Status::Open : Status::Complete;
    }

    const Deduction& d_;
    std::size_t max_steps_;
    std::size_t steps_ = 0;
    std::vector<SepEdge> edges_;
    std::map<SepEdge, std::size_t> edge_index_;
    std::vector<std::size_t> picks_;
    std::map<std::size_t, Formula> discharge_;
};

}

/// Lexicographically least total choice (over separation_edges() order) with
/// A(root) = ∅, or nullopt. Exponential in the number of S-edges in the worst
/// case; `max_steps` (0 = unlimited) bounds the number of search nodes.
inline std::optional<Choice> search_choice(const Deduction& d, std::size_t max_steps = 0) {
    return detail::ChoiceSearch(d, max_steps).run();
}

}

#endif
