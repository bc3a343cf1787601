#ifndef DAGPROOF_FORMULA_HPP
#define DAGPROOF_FORMULA_HPP

#include <algorithm>
#include <cctype>
#include <cstddef>
#include <functional>
#include <memory>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "dagproof/error.hpp"

namespace dagproof {

/// A purely implicational formula: an atom or `antecedent -> consequent`.
///
/// Formulas are immutable and cheap to copy (shared structure). Equality is
/// syntactic. The total order `<` compares the single-space prefix rendering
/// lexicographically; it is the canonical order for formula sets.
class Formula {
public:
    Formula() = default;

    static Formula atom(std::string name);
    static Formula implies(const Formula& antecedent, const Formula& consequent);

    bool valid() const noexcept { return node_ != nullptr; }
    bool is_atom() const;
    bool is_implication() const { return !is_atom(); }

    /// Atom name. Empty for implications.
    const std::string& name() const;
    const Formula& antecedent() const;
    const Formula& consequent() const;

    /// Number of atom occurrences plus number of arrows.
    std::size_t weight() const;
    std::size_t hash() const;

    /// Canonical prefix rendering, e.g. `> a > b a`.
    const std::string& prefix() const;

    friend bool operator==(const Formula& lhs, const Formula& rhs);
    friend bool operator!=(const Formula& lhs, const Formula& rhs) { return !(lhs == rhs); }
    friend bool operator<(const Formula& lhs, const Formula& rhs) { return lhs.prefix() < rhs.prefix(); }

private:
    struct Node;
    explicit Formula(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

    std::shared_ptr<const Node> node_;
};

struct Formula::Node {
    std::string name;
    Formula antecedent;
    Formula consequent;
    std::size_t weight = 1;
    std::size_t hash = 0;
    std::string prefix;
};

inline Formula Formula::atom(std::string name) {
    auto node = std::make_shared<Node>();
    node->hash = std::hash<std::string>{}(name);
    node->prefix = name;
    node->name = std::move(name);
    return Formula(std::move(node));
}

inline Formula Formula::implies(const Formula& antecedent, const Formula& consequent) {
    auto node = std::make_shared<Node>();
    node->antecedent = antecedent;
    node->consequent = consequent;
    node->weight = 1 + antecedent.weight() + consequent.weight();
    node->hash = (antecedent.hash() * 1000003u) ^ (consequent.hash() + 0x9e3779b97f4a7c15ull + (antecedent.hash() << 6));
    node->prefix.reserve(antecedent.prefix().size() + consequent.prefix().size() + 3);
    node->prefix += "> ";
    node->prefix += antecedent.prefix();
    node->prefix += ' ';
    node->prefix += consequent.prefix();
    return Formula(std::move(node));
}

inline bool Formula::is_atom() const { return !node_->antecedent.valid(); }
inline const std::string& Formula::name() const { return node_->name; }
inline const Formula& Formula::antecedent() const { return node_->antecedent; }
inline const Formula& Formula::consequent() const { return node_->consequent; }
inline std::size_t Formula::weight() const { return node_->weight; }
inline std::size_t Formula::hash() const { return node_->hash; }
inline const std::string& Formula::prefix() const { return node_->prefix; }

inline bool operator==(const Formula& lhs, const Formula& rhs) {
    if (lhs.node_ == rhs.node_) {
        return true;
    }
    if (!lhs.node_ || !rhs.node_) {
        return false;
    }
    return lhs.node_->hash == rhs.node_->hash && lhs.node_->prefix == rhs.node_->prefix;
}

inline std::size_t weight(const Formula& f) { return f.weight(); }

inline std::string print_prefix(const Formula& f) { return f.prefix(); }

inline void print_infix(std::ostream& os, const Formula& f) {
    if (f.is_atom()) {
        os << f.name();
        return;
    }
    if (f.antecedent().is_implication()) {
        os << '(';
        print_infix(os, f.antecedent());
        os << ')';
    } else {
        os << f.antecedent().name();
    }
    os << " -> ";
    print_infix(os, f.consequent());
}

inline std::string print_infix(const Formula& f) {
    std::ostringstream os;
    print_infix(os, f);
    return os.str();
}

inline std::ostream& operator<<(std::ostream& os, const Formula& f) {
    print_infix(os, f);
    return os;
}

namespace detail {

inline bool is_atom_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) != 0; }
inline bool is_atom_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_'; }

class InfixParser {
public:
    explicit InfixParser(std::string_view text) : text_(text) {}

    Formula parse() {
        Formula f = formula();
        skip_space();
        if (pos_ != text_.size()) {
            throw SyntaxError("unexpected trailing input", pos_);
        }
        return f;
    }

private:
    // formula := primary ("->" formula)?
    Formula formula() {
        Formula lhs = primary();
        skip_space();
        if (text_.substr(pos_, 2) == "->") {
            pos_ += 2;
            return Formula::implies(lhs, formula());
        }
        return lhs;
    }

    Formula primary() {
        skip_space();
        if (pos_ >= text_.size()) {
            throw SyntaxError("unexpected end of input", pos_);
        }
        if (text_[pos_] == '(') {
            ++pos_;
            Formula inner = formula();
            skip_space();
            if (pos_ >= text_.size() || text_[pos_] != ')') {
                throw SyntaxError("expected ')'", pos_);
            }
            ++pos_;
            return inner;
        }
        if (!is_atom_start(text_[pos_])) {
            throw SyntaxError(std::string("unexpected character '") + text_[pos_] + "'", pos_);
        }
        std::size_t start = pos_;
        while (pos_ < text_.size() && is_atom_char(text_[pos_])) {
            ++pos_;
        }
        return Formula::atom(std::string(text_.substr(start, pos_ - start)));
    }

    void skip_space() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) {
            ++pos_;
        }
    }

    std::string_view text_;
    std::size_t pos_ = 0;
};

}

/// Parses `a -> (b -> c)` style text; `->` associates to the right.
inline Formula parse_infix(std::string_view text) { return detail::InfixParser(text).parse(); }

/// Parses whitespace-separated Łukasiewicz prefix tokens; `>` is the arrow.
inline Formula parse_prefix(std::string_view text) {
    std::vector<std::pair<std::string, std::size_t>> tokens;
    std::size_t pos = 0;
    while (pos < text.size()) {
        if (std::isspace(static_cast<unsigned char>(text[pos]))) {
            ++pos;
            continue;
        }
        std::size_t start = pos;
        while (pos < text.size() && !std::isspace(static_cast<unsigned char>(text[pos]))) {
            ++pos;
        }
        tokens.emplace_back(std::string(text.substr(start, pos - start)), start);
    }

    std::size_t next = 0;
    std::function<Formula()> read = [&]() -> Formula {
        if (next >= tokens.size()) {
            throw SyntaxError("arity error: tokens exhausted", text.size());
        }
        const auto& [token, at] = tokens[next++];
        if (token == ">") {
            Formula lhs = read();
            Formula rhs = read();
            return Formula::implies(lhs, rhs);
        }
        if (!detail::is_atom_start(token[0]) ||
            !std::all_of(token.begin(), token.end(), detail::is_atom_char)) {
            throw SyntaxError("invalid atom '" + token + "'", at);
        }
        return Formula::atom(token);
    };

    Formula f = read();
    if (next != tokens.size()) {
        throw SyntaxError("arity error: leftover tokens", tokens[next].second);
    }
    return f;
}

/// Subformulas ordered by weight, then by prefix rendering. Contains `f` itself.
inline std::vector<Formula> subformulas(const Formula& f) {
    std::vector<Formula> out;
    std::vector<Formula> stack{f};
    while (!stack.empty()) {
        Formula g = stack.back();
        stack.pop_back();
        out.push_back(g);
        if (g.is_implication()) {
            stack.push_back(g.antecedent());
            stack.push_back(g.consequent());
        }
    }
    std::sort(out.begin(), out.end(), [](const Formula& x, const Formula& y) {
        if (x.weight() != y.weight()) {
            return x.weight() < y.weight();
        }
        return x.prefix() < y.prefix();
    });
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

/// Finite set of formulas kept sorted by prefix rendering.
class FormulaSet {
public:
    FormulaSet() = default;
    FormulaSet(std::initializer_list<Formula> items) {
        for (const auto& f : items) {
            insert(f);
        }
    }

    static FormulaSet singleton(const Formula& f) {
        FormulaSet s;
        s.items_.push_back(f);
        return s;
    }

    bool empty() const noexcept { return items_.empty(); }
    std::size_t size() const noexcept { return items_.size(); }
    auto begin() const { return items_.begin(); }
    auto end() const { return items_.end(); }
    const std::vector<Formula>& items() const { return items_; }

    bool contains(const Formula& f) const { return std::binary_search(items_.begin(), items_.end(), f); }

    void insert(const Formula& f) {
        auto it = std::lower_bound(items_.begin(), items_.end(), f);
        if (it == items_.end() || *it != f) {
            items_.insert(it, f);
        }
    }

    void erase(const Formula& f) {
        auto it = std::lower_bound(items_.begin(), items_.end(), f);
        if (it != items_.end() && *it == f) {
            items_.erase(it);
        }
    }

    FormulaSet without(const Formula& f) const {
        FormulaSet out = *this;
        out.erase(f);
        return out;
    }

    friend FormulaSet set_union(const FormulaSet& a, const FormulaSet& b) {
        FormulaSet out;
        out.items_.reserve(a.size() + b.size());
        std::set_union(a.items_.begin(), a.items_.end(), b.items_.begin(), b.items_.end(),
                       std::back_inserter(out.items_));
        return out;
    }

    friend FormulaSet set_intersection(const FormulaSet& a, const FormulaSet& b) {
        FormulaSet out;
        std::set_intersection(a.items_.begin(), a.items_.end(), b.items_.begin(), b.items_.end(),
                              std::back_inserter(out.items_));
        return out;
    }

    friend bool operator==(const FormulaSet& a, const FormulaSet& b) { return a.items_ == b.items_; }
    friend bool operator!=(const FormulaSet& a, const FormulaSet& b) { return !(a == b); }

private:
    std::vector<Formula> items_;
};

inline std::ostream& operator<<(std::ostream& os, const FormulaSet& s) {
    os << '{';
    bool first = true;
    for (const auto& f : s) {
        if (!first) {
            os << ", ";
        }
        first = false;
        os << f;
    }
    return os << '}';
}

}

template <>
struct std::hash<dagproof::Formula> {
    std::size_t operator()(const dagproof::Formula& f) const noexcept { return f.hash(); }
};

#endif
