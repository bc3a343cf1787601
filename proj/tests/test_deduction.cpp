#include <gtest/gtest.h>

#include "support/builders.hpp"
#include "support/oracles.hpp"
#include "support/random.hpp"

using namespace dagproof;
using namespace dagproof::testing;

namespace {

bool has_issue(const std::vector<Node>& nodes, NodeId root, const std::string& fragment) {
    try {
        Deduction::build(nodes, root);
    } catch (const StructureError& e) {
        for (const auto& i : e.issues()) {
            if (i.message.find(fragment) != std::string::npos) return true;
        }
    }
    return false;
}

/// Root E over a binary tree of E-nodes of the given depth; leaves are minors and majors.
Deduction e_tree(std::size_t depth) {
    std::vector<Node> nodes;
    NodeId next = 1;
    auto grow = [&](auto&& self, const Formula& f, std::size_t h) -> NodeId {
        NodeId id = next++;
        if (h == depth) {
            nodes.push_back(Node{id, f, Rule::Leaf, h, {}});
            return id;
        }
        Node n{id, f, Rule::E, h, {}};
        nodes.push_back(n);
        NodeId minor = self(self, F("a"), h + 1);
        NodeId major = self(self, Formula::implies(F("a"), f), h + 1);
        for (auto& m : nodes) {
            if (m.id == id) m.children = {minor, major};
        }
        return id;
    };
    grow(grow, F("b"), 0);
    return Deduction::build(nodes, 1);
}

}

TEST(Deduction, BuildsTheIdentityProof) {
    Deduction d = aa_proof();
    EXPECT_EQ(d.size(), 2u);
    EXPECT_EQ(d.root(), 1u);
    EXPECT_EQ(d.root_formula(), F("a->a"));
    EXPECT_TRUE(d.tree_like());
    EXPECT_FALSE(d.has_separation());
    EXPECT_EQ(d.max_height(), 1u);
}

TEST(Deduction, RejectsHeightMismatch) {
    EXPECT_TRUE(has_issue({N(1, "a->a", Rule::I, 0, {2}), N(2, "a", Rule::Leaf, 2)}, 1, "child height != parent height + 1"));
}

TEST(Deduction, RejectsStructuralErrors) {
    EXPECT_TRUE(has_issue({N(1, "a->a", Rule::I, 0, {3}), N(2, "a", Rule::Leaf, 1)}, 1, "does not exist"));
    EXPECT_TRUE(has_issue({N(1, "a->a", Rule::I, 0, {2}), N(1, "a", Rule::Leaf, 1)}, 1, "duplicate"));
    EXPECT_TRUE(has_issue({N(1, "a", Rule::E, 0, {2, 2}), N(2, "a", Rule::Leaf, 1)}, 1, "distinct"));
    EXPECT_TRUE(has_issue({N(1, "a", Rule::S, 0, {2}), N(2, "a", Rule::Leaf, 1)}, 1, "at least 2"));
    EXPECT_TRUE(has_issue({N(1, "a->a", Rule::I, 0, {2}), N(2, "a", Rule::Leaf, 1), N(3, "a", Rule::Leaf, 1)}, 1,
                          "not reachable"));
    EXPECT_TRUE(has_issue({N(1, "a->a", Rule::I, 1, {2}), N(2, "a", Rule::Leaf, 2)}, 1, "root height"));
    EXPECT_TRUE(has_issue({N(1, "a->a", Rule::I, 0, {2})}, 9, "root does not exist"));
    EXPECT_TRUE(has_issue({N(0, "a", Rule::Leaf, 0)}, 0, "reserved"));
}

TEST(Deduction, CyclesAreRejectedByLeveling) {
    // 2 -> 3 -> 2 cannot satisfy child height = parent height + 1.
    EXPECT_TRUE(has_issue({N(1, "a", Rule::R, 0, {2}), N(2, "a", Rule::R, 1, {3}), N(3, "a", Rule::R, 2, {2})}, 1,
                          "child height"));
}

TEST(Deduction, NormalizesMajorMinorOrder) {
    Deduction d = Deduction::build({N(1, "b", Rule::E, 0, {3, 2}), N(2, "a", Rule::Leaf, 1), N(3, "a->b", Rule::Leaf, 1)}, 1);
    EXPECT_EQ(d.at(1).children, (std::vector<NodeId>{2, 3}));
}

TEST(Deduction, SeparationExampleIsValid) {
    Deduction d = sep_example(true);
    EXPECT_EQ(d.size(), 8u);
    EXPECT_TRUE(d.has_separation());
    EXPECT_EQ(d.at(3).rule, Rule::S);
    EXPECT_EQ(d.max_height(), 4u);
}

TEST(Threads, IdentityProof) {
    auto t = threads(aa_proof());
    ASSERT_FALSE(t.overflow);
    EXPECT_EQ(t.value, (std::vector<Thread>{{1, 2}}));
    EXPECT_TRUE(is_closed(aa_proof(), {1, 2}));
}

TEST(Threads, SeparationExample) {
    Deduction d = sep_example(true);
    auto t = threads(d);
    ASSERT_FALSE(t.overflow);
    EXPECT_EQ(t.value, (std::vector<Thread>{{1, 2, 3, 4, 6}, {1, 2, 3, 5, 7}, {1, 2, 3, 5, 8}}));
    EXPECT_TRUE(is_closed(d, t.value[0]));
    EXPECT_TRUE(is_closed(d, t.value[1]));
    EXPECT_FALSE(is_closed(d, t.value[2]));
    EXPECT_FALSE(proves_by_threads(d).value);
}

TEST(Threads, NoDischargeMeansOpen) {
    Deduction d = Deduction::build({N(1, "a", Rule::R, 0, {2}), N(2, "a", Rule::Leaf, 1)}, 1);
    EXPECT_FALSE(is_closed(d, {1, 2}));
    EXPECT_FALSE(proves_by_threads(d).value);
}

TEST(Threads, KProof) {
    Deduction d = Deduction::build({N(1, "b->a->b", Rule::I, 0, {2}), N(2, "a->b", Rule::I, 1, {3}), N(3, "b", Rule::Leaf, 2)}, 1);
    EXPECT_TRUE(proves_by_threads(d).value);
    EXPECT_TRUE(proves_by_threads(aa_proof()).value);
}

TEST(Threads, BinaryTreeCountsAndCap) {
    for (std::size_t n = 1; n <= 5; ++n) {
        auto t = threads(e_tree(n));
        ASSERT_FALSE(t.overflow);
        EXPECT_EQ(t.value.size(), std::size_t{1} << n);
    }
    EXPECT_TRUE(threads(e_tree(3), 4).overflow);
    EXPECT_FALSE(threads(e_tree(3), 8).overflow);
    EXPECT_TRUE(proves_by_threads(e_tree(3), 4).overflow);
}

TEST(DeductionProperty, RandomDagsAreLeveledAndAcyclic) {
    Rng rng(11);
    for (int k = 0; k < 300; ++k) {
        DagOptions o;
        o.p_sep = k % 2 ? 0.2 : 0.0;
        Deduction d = random_dag(rng, o);
        EXPECT_TRUE(is_acyclic(d));
        EXPECT_LE(d.size(), o.max_nodes + 3);
        for (const Node& n : d.nodes()) {
            for (NodeId c : n.children) EXPECT_EQ(d.at(c).height, n.height + 1);
        }
        auto t = threads(d);
        ASSERT_FALSE(t.overflow);
        EXPECT_EQ(t.value.size(), naive_path_count(d));
    }
}
