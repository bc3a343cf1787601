#ifndef DAGPROOF_PROVER_HPP
#define DAGPROOF_PROVER_HPP

#include <algorithm>
#include <cstddef>
#include <deque>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "dagproof/assignment.hpp"
#include "dagproof/checker.hpp"
#include "dagproof/deduction.hpp"
#include "dagproof/formula.hpp"

namespace dagproof {

struct ProverLimits {
    /// Sequent search calls before giving up.
    std::size_t max_steps = 2000000;
    /// Nodes of the emitted tree.
    std::size_t max_nodes = 2000000;
};

struct ProofStats {
    std::size_t height = 0;
    std::size_t node_count = 0;
    std::size_t distinct_formulas = 0;
    std::size_t max_formula_weight = 0;
    std::size_t search_steps = 0;
};

struct Proof {
    Deduction deduction;
    ProofStats stats;
};

namespace detail {

/// Natural-deduction tree under construction; subtrees may be shared until materialized.
struct ProofNode;
using ProofTree = std::shared_ptr<const ProofNode>;

struct ProofNode {
    Formula formula;
    Rule rule;
    std::vector<ProofTree> premises;
};

inline ProofTree make_node(Formula f, Rule rule, std::vector<ProofTree> premises = {}) {
    return std::make_shared<const ProofNode>(ProofNode{std::move(f), rule, std::move(premises)});
}

/// Replaces every leaf labeled `target` that is not discharged on its path by `replacement`.
inline ProofTree substitute(const ProofTree& tree, const Formula& target, const ProofTree& replacement) {
    std::map<const ProofNode*, ProofTree> memo;  // only valid while `target` is not discharged
    auto go = [&](auto&& self, const ProofTree& t, bool discharged) -> ProofTree {
        if (t->rule == Rule::Leaf) {
            return (!discharged && t->formula == target) ? replacement : t;
        }
        if (!discharged) {
            if (auto it = memo.find(t.get()); it != memo.end()) return it->second;
        }
        bool below = discharged || (t->rule == Rule::I && t->formula.antecedent() == target);
        std::vector<ProofTree> ps;
        bool changed = false;
        for (const auto& p : t->premises) {
            ps.push_back(self(self, p, below));
            changed = changed || ps.back() != p;
        }
        ProofTree out = changed ? make_node(t->formula, t->rule, std::move(ps)) : t;
        if (!discharged) memo.emplace(t.get(), out);
        return out;
    };
    return go(go, tree, false);
}

using Context = std::vector<Formula>;  // sorted, distinct

inline Context with(Context ctx, const Formula& f) {
    auto it = std::lower_bound(ctx.begin(), ctx.end(), f);
    if (it == ctx.end() || *it != f) ctx.insert(it, f);
    return ctx;
}

inline Context without(Context ctx, const Formula& f) {
    auto it = std::lower_bound(ctx.begin(), ctx.end(), f);
    if (it != ctx.end() && *it == f) ctx.erase(it);
    return ctx;
}

inline bool holds(const Context& ctx, const Formula& f) { return std::binary_search(ctx.begin(), ctx.end(), f); }

/// Goal-directed search in the contraction-free implicational calculus
/// (axiom on atoms, right implication, left rule for atomic antecedents,
/// left rule for implicational antecedents), each step translated into a
/// natural-deduction tree whose open leaves are context formulas.
class SequentProver {
public:
    explicit SequentProver(const ProverLimits& limits) : limits_(limits) {}

    std::optional<ProofTree> prove(const Context& ctx, const Formula& goal) {
        if (++steps_ > limits_.max_steps) {
            throw ResourceLimit("proof search exceeded " + std::to_string(limits_.max_steps) + " steps", "max_steps");
        }
        std::string key = goal.prefix();
        for (const auto& f : ctx) {
            key += " ; ";
            key += f.prefix();
        }
        if (auto it = memo_.find(key); it != memo_.end()) return it->second;
        auto result = search(ctx, goal);
        memo_.emplace(std::move(key), result);
        return result;
    }

    std::size_t steps() const noexcept { return steps_; }

private:
    std::optional<ProofTree> search(const Context& ctx, const Formula& goal) {
        if (goal.is_implication()) {
            auto body = prove(with(ctx, goal.antecedent()), goal.consequent());
            if (!body) return std::nullopt;
            return make_node(goal, Rule::I, {*body});
        }
        if (holds(ctx, goal)) return make_node(goal, Rule::Leaf);

        // p, p -> B  ==>  p, B   (invertible)
        for (const Formula& f : ctx) {
            if (f.is_implication() && f.antecedent().is_atom() && holds(ctx, f.antecedent())) {
                const Formula& b = f.consequent();
                auto sub = prove(with(without(ctx, f), b), goal);
                if (!sub) return std::nullopt;
                ProofTree derive_b = make_node(b, Rule::E, {make_node(f.antecedent(), Rule::Leaf), make_node(f, Rule::Leaf)});
                return substitute(*sub, b, derive_b);
            }
        }

        // (C -> D) -> B:  from  D -> B |- C -> D  and  B |- goal
        for (const Formula& f : ctx) {
            if (!f.is_implication() || !f.antecedent().is_implication()) continue;
            const Formula& cd = f.antecedent();
            const Formula& d = cd.consequent();
            const Formula& b = f.consequent();
            const Formula db = Formula::implies(d, b);
            Context rest = without(ctx, f);
            auto left = prove(with(rest, db), cd);
            if (!left) continue;
            auto right = prove(with(rest, b), goal);
            if (!right) continue;

            // D -> B from (C -> D) -> B:  [D] gives C -> D, then B, then D -> B discharging D.
            ProofTree c_to_d = make_node(cd, Rule::I, {make_node(d, Rule::Leaf)});
            ProofTree derive_db = make_node(db, Rule::I, {make_node(b, Rule::E, {c_to_d, make_node(f, Rule::Leaf)})});
            ProofTree proof_cd = substitute(*left, db, derive_db);
            ProofTree derive_b = make_node(b, Rule::E, {proof_cd, make_node(f, Rule::Leaf)});
            return substitute(*right, b, derive_b);
        }
        return std::nullopt;
    }

    ProverLimits limits_;
    std::size_t steps_ = 0;
    std::unordered_map<std::string, std::optional<ProofTree>> memo_;
};

inline Deduction materialize(const ProofTree& tree, std::size_t max_nodes) {
    std::unordered_map<const ProofNode*, std::size_t> sizes;
    auto size = [&](auto&& self, const ProofTree& t) -> std::size_t {
        if (auto it = sizes.find(t.get()); it != sizes.end()) return it->second;
        std::size_t s = 1;
        for (const auto& p : t->premises) s = std::min(max_nodes + 1, s + self(self, p));
        sizes.emplace(t.get(), s);
        return s;
    };
    if (size(size, tree) > max_nodes) {
        throw ResourceLimit("proof tree exceeds " + std::to_string(max_nodes) + " nodes", "max_nodes");
    }

    std::vector<Node> nodes;
    struct Item {
        const ProofNode* node;
        NodeId id;
        std::size_t height;
    };
    NodeId next = 1;
    std::deque<Item> queue{{tree.get(), next++, 0}};
    while (!queue.empty()) {
        Item item = queue.front();
        queue.pop_front();
        Node n{item.id, item.node->formula, item.node->rule, item.height, {}};
        for (const auto& p : item.node->premises) {
            n.children.push_back(next);
            queue.push_back({p.get(), next++, item.height + 1});
        }
        nodes.push_back(std::move(n));
    }
    return Deduction::build(std::move(nodes), 1);
}

}

/// Tree-like natural-deduction proof of `f`, or nullopt if `f` is not valid in
/// minimal logic. Every returned proof has been re-checked for local
/// correctness and A(root) = ∅. Throws ResourceLimit when a budget runs out.
inline std::optional<Proof> prove(const Formula& f, const ProverLimits& limits = {}) {
    detail::SequentProver prover(limits);
    auto tree = prover.prove({}, f);
    if (!tree) return std::nullopt;
    Proof proof{detail::materialize(*tree, limits.max_nodes), {}};
    const Deduction& d = proof.deduction;
    if (d.root_formula() != f || !d.tree_like() || !check_local_correctness(d).ok || !prov(d)) {
        throw Error("prover emitted an incorrect proof of " + print_infix(f));
    }
    std::unordered_set<Formula> distinct;
    for (const Node& n : d.nodes()) {
        distinct.insert(n.formula);
        proof.stats.max_formula_weight = std::max(proof.stats.max_formula_weight, n.formula.weight());
    }
    proof.stats.height = d.max_height();
    proof.stats.node_count = d.size();
    proof.stats.distinct_formulas = distinct.size();
    proof.stats.search_steps = prover.steps();
    return proof;
}

struct OracleLimits {
    std::size_t max_weight = 256;
};

namespace detail {

/// Decision-only search over interned formulas. Saturates the atomic left
/// rule first, then tries the implicational left rule on context entries in
/// reverse order; failures and successes are memoized per sequent.
class ValidityOracle {
public:
    bool valid(const Formula& f) { return decide({}, intern(f)); }

private:
    struct Entry {
        int antecedent = -1;  // -1 for atoms
        int consequent = -1;
    };

    int intern(const Formula& f) {
        if (auto it = ids_.find(f.prefix()); it != ids_.end()) return it->second;
        Entry e;
        if (f.is_implication()) {
            e.antecedent = intern(f.antecedent());
            e.consequent = intern(f.consequent());
        }
        int id = static_cast<int>(table_.size());
        table_.push_back(e);
        ids_.emplace(f.prefix(), id);
        return id;
    }

    int implies(int a, int b) {
        auto key = std::make_pair(a, b);
        if (auto it = arrows_.find(key); it != arrows_.end()) return it->second;
        for (int i = 0; i < static_cast<int>(table_.size()); ++i) {
            if (table_[i].antecedent == a && table_[i].consequent == b) return arrows_[key] = i;
        }
        int id = static_cast<int>(table_.size());
        table_.push_back({a, b});
        return arrows_[key] = id;
    }

    bool atom(int f) const { return table_[f].antecedent < 0; }

    static std::vector<int> add(std::vector<int> ctx, int f) {
        auto it = std::lower_bound(ctx.begin(), ctx.end(), f);
        if (it == ctx.end() || *it != f) ctx.insert(it, f);
        return ctx;
    }

    bool decide(std::vector<int> ctx, int goal) {
        // Saturate: p, p -> B  ==>  p, B.
        for (bool changed = true; changed;) {
            changed = false;
            for (std::size_t k = 0; k < ctx.size(); ++k) {
                const Entry& e = table_[ctx[k]];
                if (e.antecedent >= 0 && atom(e.antecedent) && std::binary_search(ctx.begin(), ctx.end(), e.antecedent)) {
                    int b = e.consequent;
                    ctx.erase(ctx.begin() + static_cast<std::ptrdiff_t>(k));
                    ctx = add(std::move(ctx), b);
                    changed = true;
                    break;
                }
            }
        }
        if (!atom(goal)) {
            return decide(add(std::move(ctx), table_[goal].antecedent), table_[goal].consequent);
        }
        if (std::binary_search(ctx.begin(), ctx.end(), goal)) return true;

        auto key = std::make_pair(ctx, goal);
        if (auto it = memo_.find(key); it != memo_.end()) return it->second;
        bool result = false;
        for (std::size_t k = ctx.size(); k-- > 0 && !result;) {
            const Entry& e = table_[ctx[k]];
            if (e.antecedent < 0 || atom(e.antecedent)) continue;
            const int cd = e.antecedent;
            const int b = e.consequent;
            std::vector<int> rest = ctx;
            rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(k));
            result = decide(add(rest, implies(table_[cd].consequent, b)), cd) && decide(add(rest, b), goal);
        }
        memo_.emplace(std::move(key), result);
        return result;
    }

    std::vector<Entry> table_;
    std::unordered_map<std::string, int> ids_;
    std::map<std::pair<int, int>, int> arrows_;
    std::map<std::pair<std::vector<int>, int>, bool> memo_;
};

}

/// Validity in minimal logic of a purely implicational formula (which
/// coincides with intuitionistic validity on this fragment). Independent of
/// prove(): no proof objects, different rule order.
inline bool oracle_valid(const Formula& f, const OracleLimits& limits = {}) {
    if (f.weight() > limits.max_weight) {
        throw ResourceLimit("formula weight " + std::to_string(f.weight()) + " exceeds oracle bound " +
                                std::to_string(limits.max_weight),
                            "max_weight");
    }
    return detail::ValidityOracle{}.valid(f);
}

/// Benchmark family: p0 -> H0 -> ... -> H{n-1} -> pn with
/// Hi = pi -> pi -> pi -> pi -> p{i+1}.
///
/// Each hypothesis consumes its antecedent four times, so the tree proof of pn
/// holds four copies of the proof of p{n-1} (about 2.7·4^n nodes) while only
/// O(n) distinct formulas occur.
inline Formula family(std::size_t n) {
    if (n < 1) {
        throw InputError("family(n) needs n >= 1");
    }
    auto p = [](std::size_t i) { return Formula::atom("p" + std::to_string(i)); };
    Formula f = p(n);
    for (std::size_t i = n; i-- > 0;) {
        Formula h = p(i + 1);
        for (int use = 0; use < 4; ++use) h = Formula::implies(p(i), h);
        f = Formula::implies(h, f);
    }
    return Formula::implies(p(0), f);
}

}

#endif
