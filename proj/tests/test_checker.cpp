#include <gtest/gtest.h>

#include <set>
#include <sstream>

#include "support/builders.hpp"
#include "support/random.hpp"

using namespace dagproof;
using namespace dagproof::testing;

namespace {

std::set<std::pair<std::string, NodeId>> flags(const LCReport& r) {
    std::set<std::pair<std::string, NodeId>> out;
    for (const auto& v : r.violations) out.emplace(v.condition, v.node);
    return out;
}

std::size_t code(const TupleEncoding& t, const Formula& f) {
    for (std::size_t k = 0; k < t.formula_table.size(); ++k) {
        if (t.formula_table[k] == f) return k + 1;
    }
    return 0;
}

}

TEST(LocalCorrectness, SeparationExampleIsOk) {
    EXPECT_TRUE(check_local_correctness(sep_example(true)).ok);
    EXPECT_TRUE(check_local_correctness(sep_example(false)).ok);
    EXPECT_TRUE(check_local_correctness(aa_proof()).ok);
}

TEST(LocalCorrectness, EWithMismatchedMajor) {
    Deduction d = Deduction::build({N(1, "c", Rule::E, 0, {2, 3}), N(2, "a", Rule::Leaf, 1), N(3, "b->c", Rule::Leaf, 1)}, 1);
    LCReport r = check_local_correctness(d);
    EXPECT_FALSE(r.ok);
    EXPECT_TRUE(r.flags("8"));
}

TEST(LocalCorrectness, SeparationOverSeparation) {
    Deduction d = Deduction::build(
        {N(1, "a->a", Rule::I, 0, {2}), N(2, "a", Rule::S, 1, {3, 4}), N(3, "a", Rule::S, 2, {5, 6}), N(4, "a", Rule::R, 2, {7}),
         N(5, "a", Rule::Leaf, 3), N(6, "a", Rule::R, 3, {8}), N(7, "a", Rule::Leaf, 3), N(8, "a", Rule::Leaf, 4)},
        1);
    LCReport r = check_local_correctness(d);
    EXPECT_FALSE(r.ok);
    EXPECT_TRUE(r.flags("S"));
    EXPECT_EQ(r.violations.front().node, 2u);
}

TEST(LocalCorrectness, RuleMismatches) {
    auto root_leaf = Deduction::build({N(1, "a", Rule::Leaf, 0)}, 1);
    EXPECT_TRUE(check_local_correctness(root_leaf).flags("3"));
    auto bad_r = Deduction::build({N(1, "a", Rule::R, 0, {2}), N(2, "b", Rule::Leaf, 1)}, 1);
    EXPECT_TRUE(check_local_correctness(bad_r).flags("6"));
    auto bad_i = Deduction::build({N(1, "a->b", Rule::I, 0, {2}), N(2, "a", Rule::Leaf, 1)}, 1);
    EXPECT_TRUE(check_local_correctness(bad_i).flags("7"));
    auto atom_i = Deduction::build({N(1, "a", Rule::I, 0, {2}), N(2, "a", Rule::Leaf, 1)}, 1);
    EXPECT_TRUE(check_local_correctness(atom_i).flags("7"));
}

TEST(Encode, IdentityProofRows) {
    TupleEncoding t = encode(aa_proof());
    EXPECT_EQ(t.b, 2u);
    EXPECT_EQ(t.a, 6u);
    const std::size_t aa = code(t, F("a->a")), a = code(t, F("a"));
    ASSERT_NE(aa, 0u);
    ASSERT_NE(a, 0u);
    ASSERT_EQ(t.rows.size(), 2u);
    EXPECT_EQ(t.rows[0], (TupleRow{1, 2, 0, 0, 1, 1, 'I', aa, a, 0}));
    EXPECT_EQ(t.rows[1], (TupleRow{2, 0, 0, 1, 0, 0, 'L', a, 0, 0}));
    EXPECT_TRUE(check_tuples(t).ok);
}

TEST(Encode, RejectsSeparation) { EXPECT_THROW(encode(sep_example(true)), InputError); }

TEST(Encode, CleansedSeparationExample) {
    Choice c;
    c.set(2, 3, 1);
    Deduction d0 = s_eliminate(sep_example(true), c);
    TupleEncoding t = encode(d0);
    EXPECT_EQ(t.rows.size(), 5u);
    EXPECT_TRUE(check_tuples(t).ok);
}

TEST(Decode, RoundTrip) {
    Deduction d = aa_proof();
    EXPECT_EQ(decode(encode(d)), d);
}

TEST(Decode, Errors) {
    TupleEncoding t = encode(aa_proof());
    t.rows[0].y1 = t.b + 1;
    EXPECT_THROW(decode(t), InputError);

    TupleEncoding empty;
    try {
        decode(empty);
        FAIL();
    } catch (const InputError& e) {
        EXPECT_NE(std::string(e.what()).find("no root"), std::string::npos);
    }
}

TEST(CheckTuples, ConflictingRowsAndRootHeight) {
    TupleEncoding t = encode(aa_proof());
    TupleRow dup = t.rows[1];
    dup.gamma = code(t, F("a->a"));
    t.rows.push_back(dup);
    EXPECT_TRUE(check_tuples(t).flags("1"));

    TupleEncoding u = encode(aa_proof());
    u.rows[0].h = 1;
    EXPECT_TRUE(check_tuples(u).flags("3"));
}

TEST(CheckTuples, CountsComparisonsWithinBound) {
    Rng rng(3);
    for (int k = 0; k < 50; ++k) {
        Deduction d = random_dag(rng, DagOptions{});
        TupleEncoding t = encode(d);
        std::size_t ops = 0;
        check_tuples(t, &ops);
        EXPECT_LE(ops, 16 * t.rows.size() * (t.a + 1));
    }
}

TEST(TupleFile, WriteReadRoundTrip) {
    Rng rng(5);
    for (int k = 0; k < 50; ++k) {
        TupleEncoding t = encode(random_dag(rng, DagOptions{}));
        std::stringstream ss;
        write_tuples(ss, t);
        TupleEncoding u = read_tuples(ss);
        EXPECT_EQ(u.a, t.a);
        EXPECT_EQ(u.b, t.b);
        EXPECT_EQ(u.rows, t.rows);
        EXPECT_EQ(u.formula_table, t.formula_table);
    }
    std::istringstream bad("2 2\n1\t> a\n");
    EXPECT_THROW(read_tuples(bad), InputError);
}

// The two checkers must report the same (condition, node) pairs on deductions
// whose formulas were scrambled after construction.
TEST(CheckerProperty, TuplesAgreeWithDirectCheckUnderRelabeling) {
    Rng rng(17);
    int disagreements = 0, broken = 0;
    for (int k = 0; k < 400; ++k) {
        Deduction d = random_dag(rng, DagOptions{});
        std::vector<Node> nodes = d.nodes();
        for (int m = 0; m < 1 + k % 3; ++m) {
            nodes[pick(rng, nodes.size())].formula = random_formula(rng, 5);
        }
        Deduction bad = Deduction::build(nodes, d.root());
        LCReport direct = check_local_correctness(bad);
        LCReport tuples = check_tuples(encode(bad));
        broken += !direct.ok;
        if (flags(direct) != flags(tuples)) ++disagreements;
    }
    EXPECT_EQ(disagreements, 0);
    EXPECT_GT(broken, 200);
}
