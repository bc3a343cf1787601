#include <gtest/gtest.h>

#include "support/builders.hpp"
#include "support/oracles.hpp"
#include "support/random.hpp"

using namespace dagproof;
using namespace dagproof::testing;

namespace {

/// (a -> b) -> a -> b with an S over two closed proofs of a -> b: a repeated
/// hypothesis, and a -> b rebuilt by discharging a.
Deduction two_closed_branches() {
    return Deduction::build({N(1, "(a->b)->a->b", Rule::I, 0, {2}), N(2, "a->b", Rule::S, 1, {3, 4}),
                             N(3, "a->b", Rule::R, 2, {9}), N(9, "a->b", Rule::R, 3, {5}), N(5, "a->b", Rule::Leaf, 4),
                             N(4, "a->b", Rule::I, 2, {6}), N(6, "b", Rule::E, 3, {7, 8}), N(7, "a", Rule::Leaf, 4),
                             N(8, "a->b", Rule::Leaf, 4)},
                            1);
}

}

TEST(Fst, IdentityProof) {
    EXPECT_TRUE(check_fst(aa_proof(), {{1, 2}}).is_fst());
    FstReport empty = check_fst(aa_proof(), {});
    EXPECT_FALSE(empty.dense);
    ASSERT_FALSE(empty.witnesses.empty());
    EXPECT_EQ(empty.witnesses.front().kind, FstWitness::Kind::UncoveredNode);
}

TEST(Fst, KProofAllThreads) {
    Deduction k = Deduction::build({N(1, "b->a->b", Rule::I, 0, {2}), N(2, "a->b", Rule::I, 1, {3}), N(3, "b", Rule::Leaf, 2)}, 1);
    auto all = all_threads_fst(k);
    ASSERT_FALSE(all.overflow);
    EXPECT_EQ(all.value.size(), 1u);
    EXPECT_TRUE(check_fst(k, all.value).is_fst());
}

TEST(Fst, SeparationOuterHasOpenThread) {
    Deduction d = sep_example(true);
    auto all = all_threads_fst(d);
    ASSERT_EQ(all.value.size(), 3u);
    FstReport r = check_fst(d, all.value);
    EXPECT_TRUE(r.dense);
    EXPECT_FALSE(r.all_closed);
    EXPECT_FALSE(r.is_fst());
    EXPECT_THROW(cleanse_via_fst(d, all.value), InputError);
    // Dropping the open thread loses the E partner.
    FstReport partial = check_fst(d, {all.value[0], all.value[1]});
    EXPECT_FALSE(partial.e_preserving);
    EXPECT_FALSE(partial.dense);
}

TEST(Fst, RejectsNonThreads) {
    EXPECT_THROW(check_fst(aa_proof(), {{2}}), InputError);
    EXPECT_THROW(check_fst(aa_proof(), {{1}}), InputError);
    EXPECT_THROW(check_fst(aa_proof(), {{1, 2}, {1, 2}}), InputError);
    EXPECT_THROW(check_fst(aa_proof(), {{1, 7}}), InputError);
}

TEST(Cleanse, SFreeProvingDagUnchanged) {
    auto all = all_threads_fst(aa_proof());
    Cleansing c = cleanse_via_fst(aa_proof(), all.value);
    EXPECT_TRUE(c.choice.empty());
    EXPECT_EQ(c.cleansed, aa_proof());
}

TEST(Cleanse, TwoClosedBranchesPicksFirst) {
    Deduction d = two_closed_branches();
    EXPECT_TRUE(check_local_correctness(d).ok);
    auto all = all_threads_fst(d);
    ASSERT_TRUE(check_fst(d, all.value).is_fst());
    Cleansing c = cleanse_via_fst(d, all.value);
    EXPECT_EQ(c.choice.get(1, 2), std::optional<std::size_t>(1));
    EXPECT_TRUE(prov(c.cleansed));
    EXPECT_FALSE(c.cleansed.has_separation());
    EXPECT_EQ(c.retained, (std::vector<std::size_t>{0}));

    // Without the first branch's thread the fst must pick branch 2.
    ThreadSet second{all.value[1], all.value[2]};
    FstReport r = check_fst(d, second);
    EXPECT_FALSE(r.dense);
}

TEST(Cleanse, CompressedProverTreesViaThreadImage) {
    Rng rng(51);
    int done = 0;
    while (done < 80) {
        Formula f = random_formula(rng, 13);
        if (!oracle_valid(f)) continue;
        auto p = prove(f);
        ASSERT_TRUE(p);
        // Tree proofs: all threads form an fst.
        auto all = all_threads_fst(p->deduction);
        ASSERT_FALSE(all.overflow);
        EXPECT_TRUE(check_fst(p->deduction, all.value).is_fst());

        Compression c = compress(level(p->deduction));
        FstReport r = check_fst(c.dag, c.thread_image);
        EXPECT_TRUE(r.is_fst()) << print_infix(f);
        if (r.is_fst()) {
            try {
                Cleansing cl = cleanse_via_fst(c.dag, c.thread_image);
                EXPECT_TRUE(prov(cl.cleansed));
                EXPECT_EQ(cl.cleansed.root_formula(), f);
                EXPECT_TRUE(check_local_correctness(cl.cleansed).ok);
            } catch (const InputError& e) {
                ADD_FAILURE() << print_infix(f) << ": " << e.what();
            }
        }
        ++done;
    }
}

TEST(Cleanse, AgreesWithSearchOnSeparationDags) {
    // Whenever a cleansing via all threads works, the result proves; and an
    // fst on an S-dag implies some certificate exists.
    Rng rng(53);
    DagOptions o;
    o.p_sep = 0.25;
    o.max_nodes = 35;
    int fsts = 0;
    for (int k = 0; k < 800; ++k) {
        Deduction d = random_dag(rng, o);
        if (!d.has_separation()) continue;
        auto all = all_threads_fst(d);
        if (all.overflow || !check_fst(d, all.value).is_fst()) continue;
        ++fsts;
        Cleansing c = cleanse_via_fst(d, all.value);
        EXPECT_TRUE(prov(c.cleansed));
        EXPECT_TRUE(search_choice(d).has_value());
    }
    EXPECT_GT(fsts, 5);
}
