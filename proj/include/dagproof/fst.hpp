#ifndef DAGPROOF_FST_HPP
#define DAGPROOF_FST_HPP

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <queue>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "dagproof/assignment.hpp"
#include "dagproof/deduction.hpp"
#include "dagproof/transform.hpp"

namespace dagproof {

/// An explicit set of maximal threads of one deduction, in stored order.
using ThreadSet = std::vector<Thread>;

struct FstWitness {
    enum class Kind { UncoveredNode, OpenThread, MissingPremiseThread };
    Kind kind;
    NodeId node = kNoNode;       // uncovered node, or the E-node lacking a partner thread
    std::size_t thread = 0;      // index into the thread set (OpenThread, MissingPremiseThread)
    NodeId premise = kNoNode;    // premise with no partner thread (MissingPremiseThread)
};

struct FstReport {
    bool dense = true;
    bool all_closed = true;
    bool e_preserving = true;
    std::vector<FstWitness> witnesses;

    bool is_fst() const noexcept { return dense && all_closed && e_preserving; }
};

namespace detail {

/// Prefix trie over a thread set; node 0 is the empty prefix.
class ThreadTrie {
public:
    explicit ThreadTrie(const ThreadSet& threads) {
        nodes_.emplace_back();
        for (std::size_t t = 0; t < threads.size(); ++t) {
            std::size_t at = 0;
            for (NodeId id : threads[t]) {
                auto [it, inserted] = nodes_[at].next.emplace(id, nodes_.size());
                if (inserted) nodes_.emplace_back();
                at = it->second;
                nodes_[at].threads.push_back(t);
            }
        }
    }

    std::optional<std::size_t> step(std::size_t at, NodeId id) const {
        auto it = nodes_[at].next.find(id);
        if (it == nodes_[at].next.end()) return std::nullopt;
        return it->second;
    }

    /// Threads through this trie node, in thread-set order.
    const std::vector<std::size_t>& threads(std::size_t at) const { return nodes_[at].threads; }
    std::size_t size() const noexcept { return nodes_.size(); }

private:
    struct TrieNode {
        std::map<NodeId, std::size_t> next;
        std::vector<std::size_t> threads;
    };
    std::vector<TrieNode> nodes_;
};

inline void require_threads_of(const Deduction& d, const ThreadSet& threads) {
    std::set<Thread> distinct;
    for (std::size_t t = 0; t < threads.size(); ++t) {
        const Thread& th = threads[t];
        auto bad = [&](const std::string& why) {
            return InputError("thread " + std::to_string(t) + " is not a maximal thread: " + why);
        };
        if (th.empty() || th.front() != d.root()) throw bad("does not start at the root");
        for (std::size_t i = 0; i < th.size(); ++i) {
            if (!d.contains(th[i])) throw bad("unknown node " + std::to_string(th[i]));
            if (i + 1 < th.size()) {
                const auto& cs = d.at(th[i]).children;
                if (std::find(cs.begin(), cs.end(), th[i + 1]) == cs.end()) {
                    throw bad("no edge " + std::to_string(th[i]) + " -> " + std::to_string(th[i + 1]));
                }
            }
        }
        if (d.at(th.back()).rule != Rule::Leaf) throw bad("does not end at a leaf");
        if (!distinct.insert(th).second) throw InputError("thread " + std::to_string(t) + " is a duplicate");
    }
}

}

/// Density, closure and E-preservation of `threads` in `d`.
inline FstReport check_fst(const Deduction& d, const ThreadSet& threads) {
    detail::require_threads_of(d, threads);
    FstReport report;

    std::vector<char> covered(d.size(), 0);
    for (const Thread& th : threads) {
        for (NodeId id : th) covered[d.index_of(id)] = 1;
    }
    for (std::size_t i = 0; i < d.size(); ++i) {
        if (!covered[i]) {
            report.dense = false;
            report.witnesses.push_back({FstWitness::Kind::UncoveredNode, d.node(i).id});
        }
    }

    for (std::size_t t = 0; t < threads.size(); ++t) {
        if (!is_closed(d, threads[t])) {
            report.all_closed = false;
            report.witnesses.push_back({FstWitness::Kind::OpenThread, threads[t].back(), t});
        }
    }

    detail::ThreadTrie trie(threads);
    for (std::size_t t = 0; t < threads.size(); ++t) {
        const Thread& th = threads[t];
        std::size_t at = 0;
        for (std::size_t i = 0; i + 1 < th.size(); ++i) {
            at = *trie.step(at, th[i]);
            const Node& u = d.at(th[i]);
            if (u.rule != Rule::E) continue;
            NodeId other = u.children[0] == th[i + 1] ? u.children[1] : u.children[0];
            if (!trie.step(at, other)) {
                report.e_preserving = false;
                report.witnesses.push_back({FstWitness::Kind::MissingPremiseThread, u.id, t, other});
            }
        }
    }
    return report;
}

/// All threads of `d` as a candidate fst.
inline Capped<ThreadSet> all_threads_fst(const Deduction& d, std::size_t cap = kDefaultThreadCap) {
    return threads(d, cap);
}

struct Cleansing {
    Choice choice;
    Deduction cleansed;
    /// Indices into the input thread set of the threads the choice was read from.
    std::vector<std::size_t> retained;
};

namespace detail {

/// Ascending recursion along a thread set: every E-node on a retained thread
/// pulls in a partner thread (same prefix, other premise), lowest E-nodes
/// first. Retained threads fix the branch of every S-edge they pass; a
/// candidate disagreeing with an earlier fixed branch is skipped, and when
/// several candidates remain the first is tried before the others.
class FstCleanser {
public:
    struct State {
        std::map<SepEdge, std::size_t> picks;
        std::vector<std::size_t> retained_through;  // per trie node
        std::vector<std::size_t> retained;
        std::set<std::tuple<std::size_t, NodeId, std::size_t>> pending;  // (position, E-node, thread)
    };

    FstCleanser(const Deduction& d, const ThreadSet& threads) : d_(d), threads_(threads), trie_(threads) {}

    std::optional<State> run() {
        State empty;
        empty.retained_through.assign(trie_.size(), 0);
        for (std::size_t t = 0; t < threads_.size(); ++t) {
            State s = empty;
            if (!adopt(s, t, 0)) continue;
            if (auto done = solve(std::move(s))) return done;
        }
        return std::nullopt;
    }

private:
    std::vector<std::pair<SepEdge, std::size_t>> sep_picks(std::size_t t) const {
        std::vector<std::pair<SepEdge, std::size_t>> out;
        const Thread& th = threads_[t];
        for (std::size_t j = 0; j + 1 < th.size(); ++j) {
            const Node& x = d_.at(th[j]);
            if (x.rule != Rule::S) continue;
            auto it = std::find(x.children.begin(), x.children.end(), th[j + 1]);
            out.push_back({{j ? th[j - 1] : kNoNode, x.id}, static_cast<std::size_t>(it - x.children.begin()) + 1});
        }
        return out;
    }

    bool consistent(const State& s, std::size_t t) const {
        for (const auto& [edge, idx] : sep_picks(t)) {
            auto it = s.picks.find(edge);
            if (it != s.picks.end() && it->second != idx) return false;
        }
        return true;
    }

    bool adopt(State& s, std::size_t t, std::size_t from) const {
        if (!consistent(s, t)) return false;
        for (const auto& [edge, idx] : sep_picks(t)) s.picks.emplace(edge, idx);
        s.retained.push_back(t);
        const Thread& th = threads_[t];
        std::size_t at = 0;
        for (std::size_t i = 0; i < th.size(); ++i) {
            at = *trie_.step(at, th[i]);
            ++s.retained_through[at];
            if (i >= from && i + 1 < th.size() && d_.at(th[i]).rule == Rule::E) s.pending.emplace(i, th[i], t);
        }
        return true;
    }

    std::optional<State> solve(State s) const {
        while (!s.pending.empty()) {
            auto [pos, enode, t] = *s.pending.begin();
            s.pending.erase(s.pending.begin());
            const Thread& th = threads_[t];
            std::size_t at = 0;
            for (std::size_t i = 0; i <= pos; ++i) at = *trie_.step(at, th[i]);
            const Node& u = d_.at(enode);
            NodeId other = u.children[0] == th[pos + 1] ? u.children[1] : u.children[0];
            auto target = trie_.step(at, other);
            if (!target) return std::nullopt;
            if (s.retained_through[*target] > 0) continue;

            std::vector<std::size_t> candidates;
            for (std::size_t c : trie_.threads(*target)) {
                if (consistent(s, c)) candidates.push_back(c);
            }
            if (candidates.empty()) return std::nullopt;
            if (candidates.size() == 1) {
                adopt(s, candidates[0], pos + 1);
                continue;
            }
            for (std::size_t c : candidates) {
                State next = s;
                adopt(next, c, pos + 1);
                if (auto done = solve(std::move(next))) return done;
            }
            return std::nullopt;
        }
        return s;
    }

    const Deduction& d_;
    const ThreadSet& threads_;
    ThreadTrie trie_;
};

}

/// Horizontal cleansing guided by a fundamental set of threads.
///
/// Collects a branch index for every S-edge met on the retained threads,
/// gives index 1 to S-edges no retained thread touches, and eliminates the
/// S-nodes. Every path of the result is a retained thread, hence closed.
/// Throws InputError if `threads` is not an fst of `d`, or if no selection of
/// partner threads agrees on the branch of every shared S-edge.
inline Cleansing cleanse_via_fst(const Deduction& d, const ThreadSet& threads) {
    FstReport report = check_fst(d, threads);
    if (!report.is_fst()) {
        throw InputError(std::string("thread set is not an fst:") + (report.dense ? "" : " not dense") +
                         (report.all_closed ? "" : " has open threads") +
                         (report.e_preserving ? "" : " does not preserve E"));
    }
    auto state = detail::FstCleanser(d, threads).run();
    if (!state) {
        throw InputError("fst admits no cleansing with one branch per S-edge");
    }
    Cleansing out;
    for (const SepEdge& e : separation_edges(d)) {
        auto it = state->picks.find(e);
        out.choice.set(e.parent, e.sep, it == state->picks.end() ? 1 : it->second);
    }
    out.retained = state->retained;
    std::sort(out.retained.begin(), out.retained.end());
    out.cleansed = s_eliminate(d, out.choice);
    if (!prov(out.cleansed)) {
        throw Error("cleansing produced a deduction that does not prove its root formula");
    }
    return out;
}

}

#endif
