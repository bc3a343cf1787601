#ifndef DAGPROOF_CHECKER_HPP
#define DAGPROOF_CHECKER_HPP

#include <algorithm>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "dagproof/deduction.hpp"
#include "dagproof/formula.hpp"

namespace dagproof {

/// One failed local-correctness condition.
///
/// `condition` is the number ("1".."8") of the per-tuple condition the failure
/// corresponds to, "S" for the separation clause (premises share the
/// conclusion formula and are not themselves S), or "0" for malformed tuple
/// fields (bad rule letter, formula code outside the table).
struct Violation {
    std::string condition;
    NodeId node = kNoNode;
    std::string message;
};

struct LCReport {
    bool ok = true;
    std::vector<Violation> violations;

    bool flags(std::string_view condition) const {
        return std::any_of(violations.begin(), violations.end(),
                           [&](const Violation& v) { return v.condition == condition; });
    }
};

namespace detail {

inline void finish(LCReport& report) {
    std::stable_sort(report.violations.begin(), report.violations.end(), [](const Violation& a, const Violation& b) {
        if (a.condition != b.condition) return a.condition < b.condition;
        return a.node < b.node;
    });
    report.ok = report.violations.empty();
}

}

/// Per-node check of the inference rules and regularity of a built deduction.
inline LCReport check_local_correctness(const Deduction& d) {
    LCReport report;
    auto fail = [&](const char* condition, const Node& n, std::string message) {
        report.violations.push_back({condition, n.id, std::move(message)});
    };

    const Node& root = d.node(d.root_index());
    if (root.height != 0) fail("3", root, "root height is not 0");
    if (root.rule == Rule::Leaf) fail("3", root, "root is a leaf");
    if (!d.parents(d.root_index()).empty()) fail("3", root, "root has a parent");

    for (std::size_t i = 0; i < d.size(); ++i) {
        const Node& x = d.node(i);
        const auto& cs = d.children(i);
        if (x.rule == Rule::Leaf) {
            if (!cs.empty()) fail("4", x, "leaf has children");
            continue;
        }
        for (std::size_t j : cs) {
            if (d.node(j).height != x.height + 1) fail("5", x, "child not one level above");
        }
        switch (x.rule) {
        case Rule::R:
            if (cs.size() != 1 || d.node(cs[0]).formula != x.formula) fail("6", x, "R premise formula differs from conclusion");
            break;
        case Rule::I:
            if (cs.size() != 1 || !x.formula.is_implication() || x.formula.consequent() != d.node(cs[0]).formula) {
                fail("7", x, "I conclusion is not alpha -> premise");
            }
            break;
        case Rule::E: {
            if (cs.size() != 2 || cs[0] == cs[1]) {
                fail("8", x, "E needs two distinct premises");
                break;
            }
            const Formula& minor = d.node(cs[0]).formula;
            const Formula& major = d.node(cs[1]).formula;
            if (!major.is_implication() || major.antecedent() != minor || major.consequent() != x.formula) {
                fail("8", x, "E major premise is not minor -> conclusion");
            }
            break;
        }
        case Rule::S:
            if (cs.size() < 2) fail("S", x, "S needs at least two premises");
            for (std::size_t j : cs) {
                if (d.node(j).formula != x.formula) fail("S", x, "S premise formula differs from conclusion");
                if (d.node(j).rule == Rule::S) fail("S", x, "S premise is itself an S-node");
            }
            break;
        case Rule::Leaf:
            break;
        }
    }
    detail::finish(report);
    return report;
}

/// One t(x) record. Node and formula codes are 1-based; 0 means "none".
struct TupleRow {
    std::size_t x = 0, y1 = 0, y2 = 0;
    std::size_t h = 0, h1 = 0, h2 = 0;
    char chi = 'L';
    std::size_t gamma = 0, beta1 = 0, beta2 = 0;

    friend bool operator==(const TupleRow&, const TupleRow&) = default;
};

/// Flat per-node encoding of an S-free deduction.
struct TupleEncoding {
    std::size_t a = 0;
    std::size_t b = 0;
    std::vector<Formula> formula_table;
    std::vector<TupleRow> rows;
    /// Original node id per node code; not serialized. Empty means ids are the codes.
    std::vector<NodeId> source_ids;
    /// Set when the formula table is larger than `a`.
    bool table_exceeds_bound = false;
};

inline char rule_letter(Rule r) {
    switch (r) {
    case Rule::Leaf: return 'L';
    case Rule::R: return 'R';
    case Rule::I: return 'I';
    case Rule::E: return 'E';
    case Rule::S: return 'S';
    }
    return '?';
}

/// Encodes an S-free deduction. Nodes are renumbered 1..b breadth-first from the root.
inline TupleEncoding encode(const Deduction& d) {
    if (d.has_separation()) {
        throw InputError("tuple encoding is defined for S-free deductions only");
    }
    TupleEncoding t;
    t.b = d.size();
    t.a = 2 * d.root_formula().weight();

    std::vector<std::size_t> code(d.size());
    for (std::size_t k = 0; k < d.bfs_order().size(); ++k) {
        code[d.bfs_order()[k]] = k + 1;
    }

    for (const Node& n : d.nodes()) t.formula_table.push_back(n.formula);
    std::sort(t.formula_table.begin(), t.formula_table.end(), [](const Formula& x, const Formula& y) {
        return x.weight() != y.weight() ? x.weight() < y.weight() : x.prefix() < y.prefix();
    });
    t.formula_table.erase(std::unique(t.formula_table.begin(), t.formula_table.end()), t.formula_table.end());
    t.table_exceeds_bound = t.formula_table.size() > t.a;
    std::unordered_map<Formula, std::size_t> fcode;
    for (std::size_t k = 0; k < t.formula_table.size(); ++k) fcode.emplace(t.formula_table[k], k + 1);

    for (std::size_t i : d.bfs_order()) {
        const Node& n = d.node(i);
        const auto& cs = d.children(i);
        TupleRow row;
        row.x = code[i];
        row.h = n.height;
        row.chi = rule_letter(n.rule);
        row.gamma = fcode.at(n.formula);
        if (!cs.empty()) {
            row.y1 = code[cs[0]];
            row.beta1 = fcode.at(d.node(cs[0]).formula);
            row.h1 = row.h2 = n.height + 1;
            if (cs.size() > 1) {
                row.y2 = code[cs[1]];
                row.beta2 = fcode.at(d.node(cs[1]).formula);
            }
        }
        t.rows.push_back(row);
        t.source_ids.push_back(n.id);
    }
    return t;
}

/// Rebuilds a deduction from its encoding; restores original ids when `source_ids` is present.
inline Deduction decode(const TupleEncoding& t) {
    if (t.b == 0 || t.rows.empty()) {
        throw InputError("no root: encoding has no nodes");
    }
    const std::size_t table = t.formula_table.size();
    std::vector<const TupleRow*> by_code(t.b + 1, nullptr);
    for (const TupleRow& r : t.rows) {
        if (r.x == 0 || r.x > t.b) {
            throw InputError("row references node code " + std::to_string(r.x) + " outside 1.." + std::to_string(t.b));
        }
        if (by_code[r.x] && !(*by_code[r.x] == r)) {
            throw InputError("conflicting rows for node code " + std::to_string(r.x));
        }
        by_code[r.x] = &r;
    }
    auto id_of = [&](std::size_t c) -> NodeId {
        if (c == 0 || c > t.b) {
            throw InputError("dangling node code " + std::to_string(c));
        }
        return t.source_ids.empty() ? static_cast<NodeId>(c) : t.source_ids.at(c - 1);
    };
    auto formula_of = [&](std::size_t c, std::size_t x) -> const Formula& {
        if (c == 0 || c > table) {
            throw InputError("dangling formula code " + std::to_string(c) + " in row " + std::to_string(x));
        }
        return t.formula_table[c - 1];
    };

    std::vector<Node> nodes;
    for (std::size_t x = 1; x <= t.b; ++x) {
        const TupleRow* r = by_code[x];
        if (!r) {
            throw InputError("missing row for node code " + std::to_string(x));
        }
        Node n;
        n.id = id_of(x);
        n.formula = formula_of(r->gamma, x);
        n.height = r->h;
        switch (r->chi) {
        case 'L': n.rule = Rule::Leaf; break;
        case 'R': n.rule = Rule::R; break;
        case 'I': n.rule = Rule::I; break;
        case 'E': n.rule = Rule::E; break;
        default: throw InputError(std::string("invalid rule letter '") + r->chi + "' in row " + std::to_string(x));
        }
        if (n.rule != Rule::Leaf) n.children.push_back(id_of(r->y1));
        if (n.rule == Rule::E) n.children.push_back(id_of(r->y2));
        nodes.push_back(std::move(n));
    }
    return Deduction::build(std::move(nodes), id_of(1));
}

/// Runs the eight per-tuple conditions directly on the rows. Node code 1 is the root.
///
/// `comparisons`, when given, receives the number of elementary comparisons
/// performed (a formula equality test counts as the weight of the smaller
/// operand). The count is at most 16·|rows|·(a + 1) for rows whose formulas
/// respect the weight bound `a`, well within c·b²·a with c = 16.
inline LCReport check_tuples(const TupleEncoding& t, std::size_t* comparisons = nullptr) {
    LCReport report;
    std::size_t ops = 0;
    const std::size_t table = t.formula_table.size();
    auto fail = [&](const char* condition, std::size_t x, std::string message) {
        NodeId id = (!t.source_ids.empty() && x >= 1 && x <= t.source_ids.size()) ? t.source_ids[x - 1] : x;
        report.violations.push_back({condition, id, std::move(message)});
    };
    auto formula = [&](std::size_t c) -> const Formula* {
        ++ops;
        return (c >= 1 && c <= table) ? &t.formula_table[c - 1] : nullptr;
    };
    auto same = [&](const Formula& p, const Formula& q) {
        ops += std::min(p.weight(), q.weight());
        return p == q;
    };

    std::vector<const TupleRow*> by_code(t.b + 1, nullptr);
    for (const TupleRow& r : t.rows) {
        ++ops;
        if (r.x == 0 || r.x > t.b) {
            fail("1", r.x, "row id outside 1..b");
            continue;
        }
        if (by_code[r.x]) {
            ops += 10;
            if (!(*by_code[r.x] == r)) fail("1", r.x, "two different rows share this node code");
            continue;
        }
        by_code[r.x] = &r;
    }
    for (std::size_t x = 1; x <= t.b; ++x) {
        if (!by_code[x]) fail("1", x, "missing row");
    }

    for (std::size_t x = 1; x <= t.b; ++x) {
        const TupleRow* row = by_code[x];
        if (!row) continue;
        const TupleRow& r = *row;
        if (r.chi != 'L' && r.chi != 'R' && r.chi != 'I' && r.chi != 'E') {
            fail("0", x, std::string("invalid rule letter '") + r.chi + "'");
            continue;
        }
        const Formula* gamma = formula(r.gamma);
        if (!gamma) fail("0", x, "gamma is not a formula code");
        const Formula* beta1 = r.beta1 ? formula(r.beta1) : nullptr;
        const Formula* beta2 = r.beta2 ? formula(r.beta2) : nullptr;
        if (r.beta1 && !beta1) fail("0", x, "beta1 is not a formula code");
        if (r.beta2 && !beta2) fail("0", x, "beta2 is not a formula code");

        // 2: child rows agree with the heights and formulas recorded here.
        const std::size_t ys[2] = {r.y1, r.y2};
        const std::size_t hs[2] = {r.h1, r.h2};
        const std::size_t bs[2] = {r.beta1, r.beta2};
        for (int k = 0; k < 2; ++k) {
            if (ys[k] == 0) continue;
            ops += 2;
            if (ys[k] > t.b) {
                fail("2", x, "premise code " + std::to_string(ys[k]) + " outside 1..b");
                continue;
            }
            const TupleRow* child = by_code[ys[k]];
            if (!child) continue;
            if (child->h != hs[k]) fail("2", x, "premise height disagrees with premise row");
            if (child->gamma != bs[k]) fail("2", x, "premise formula disagrees with premise row");
        }

        // 3: root.
        ++ops;
        if (x == 1) {
            if (r.h != 0) fail("3", x, "root height is not 0");
            if (r.chi == 'L') fail("3", x, "root is a leaf");
        }
        if (r.y1 == 1 || r.y2 == 1) fail("3", x, "root appears as a premise");

        ops += 6;
        if (r.chi == 'L') {
            // 4
            if (r.y1 || r.y2 || r.h1 || r.h2 || r.beta1 || r.beta2) fail("4", x, "leaf with non-zero premise fields");
            continue;
        }
        // 5
        if (r.h1 != r.h + 1 || r.h2 != r.h + 1) fail("5", x, "premise heights are not h+1");

        switch (r.chi) {
        case 'R':  // 6
            if (r.y2 != 0 || r.beta2 != 0) fail("6", x, "R with a second premise");
            if (r.y1 == 0) fail("6", x, "R without a premise");
            if (r.gamma != r.beta1 && !(gamma && beta1 && same(*gamma, *beta1))) fail("6", x, "R conclusion differs from premise");
            break;
        case 'I':  // 7
            if (r.y2 != 0 || r.beta2 != 0) fail("7", x, "I with a second premise");
            if (r.y1 == 0) fail("7", x, "I without a premise");
            if (!gamma || !beta1 || !gamma->is_implication() || !same(gamma->consequent(), *beta1)) {
                fail("7", x, "I conclusion is not alpha -> premise");
            }
            break;
        case 'E':  // 8
            if (r.y1 == 0 || r.y2 == 0 || r.y1 == r.y2) fail("8", x, "E needs two distinct premises");
            if (!gamma || !beta1 || !beta2 || !beta2->is_implication() || !same(beta2->antecedent(), *beta1) ||
                !same(beta2->consequent(), *gamma)) {
                fail("8", x, "E major premise is not minor -> conclusion");
            }
            break;
        default:
            break;
        }
    }
    detail::finish(report);
    if (comparisons) *comparisons = ops;
    return report;
}

/// Tuple file: "a b", then "code<TAB>prefix" lines, then one space-separated row per node.
inline void write_tuples(std::ostream& os, const TupleEncoding& t) {
    os << t.a << ' ' << t.b << '\n';
    for (std::size_t k = 0; k < t.formula_table.size(); ++k) {
        os << (k + 1) << '\t' << t.formula_table[k].prefix() << '\n';
    }
    for (const TupleRow& r : t.rows) {
        os << r.x << ' ' << r.y1 << ' ' << r.y2 << ' ' << r.h << ' ' << r.h1 << ' ' << r.h2 << ' ' << r.chi << ' '
           << r.gamma << ' ' << r.beta1 << ' ' << r.beta2 << '\n';
    }
}

inline TupleEncoding read_tuples(std::istream& is) {
    TupleEncoding t;
    std::string line;
    std::size_t lineno = 0;
    auto bad = [&](const std::string& what) {
        return InputError("tuple file line " + std::to_string(lineno) + ": " + what);
    };
    bool header = false;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        if (!header) {
            std::istringstream ls(line);
            if (!(ls >> t.a >> t.b)) throw bad("expected 'a b'");
            header = true;
            continue;
        }
        auto tab = line.find('\t');
        if (tab != std::string::npos) {
            std::size_t code = 0;
            try {
                code = std::stoul(line.substr(0, tab));
            } catch (const std::exception&) {
                throw bad("bad formula code");
            }
            if (code != t.formula_table.size() + 1) throw bad("formula codes must be consecutive from 1");
            try {
                t.formula_table.push_back(parse_prefix(line.substr(tab + 1)));
            } catch (const SyntaxError& e) {
                throw bad(e.what());
            }
            continue;
        }
        std::istringstream ls(line);
        TupleRow r;
        std::string chi;
        if (!(ls >> r.x >> r.y1 >> r.y2 >> r.h >> r.h1 >> r.h2 >> chi >> r.gamma >> r.beta1 >> r.beta2) || chi.size() != 1) {
            throw bad("expected 'x y1 y2 h h1 h2 chi gamma beta1 beta2'");
        }
        r.chi = chi[0];
        t.rows.push_back(r);
    }
    if (!header) throw InputError("tuple file is empty");
    t.table_exceeds_bound = t.formula_table.size() > t.a;
    return t;
}

}

#endif
