#include <gtest/gtest.h>

#include "example_values.hpp"
#include "robust_vdp/error.hpp"
#include "support.hpp"

using namespace rvt;

namespace {

const TabulatedStrategy& strategy(const Instance& inst, const std::string& name) {
    for (const auto& s : std::get<TabulatedSpec>(inst.problem.spec).strategies) {
        if (s.name == name) return s;
    }
    throw std::runtime_error("no strategy " + name);
}

void expect_table(const Instance& inst, const std::string& name, const example::Table& table) {
    const auto& tree = inst.problem.tree;
    const auto& loss = strategy(inst, name).loss;
    for (const auto& [id, row] : table) {
        const auto& model = inst.problem.family.by_id(id);
        auto e1 = cond_expect(tree, model, loss, 1);
        auto e0 = cond_expect(tree, model, loss, 0);
        EXPECT_EQ(e1.values.at(0), parse_vec(row[0])) << name << " " << id << " u";
        EXPECT_EQ(e1.values.at(1), parse_vec(row[1])) << name << " " << id << " d";
        EXPECT_EQ(e0.values.at(0), parse_vec(row[2])) << name << " " << id << " root";
    }
}

}  // namespace

TEST(ScenarioTreeTest, LevelsAndLabels) {
    auto inst = bundled("binomial_tables.json");
    const auto& tree = inst.problem.tree;
    EXPECT_EQ(tree.horizon(), 2);
    EXPECT_EQ(tree.num_nodes(), 7u);
    EXPECT_EQ(tree.level(2).size(), 4u);
    EXPECT_EQ(tree.node(tree.index_of("ud")).label, "down");
    EXPECT_EQ(tree.node(tree.index_of("ud")).parent, tree.index_of("u"));
    EXPECT_EQ(tree.leaves_under(tree.index_of("d")).size(), 2u);
    EXPECT_THROW(tree.index_of("zz"), Error);
    EXPECT_EQ(ScenarioTree::build(tree.level_names(), tree.adjacency()), tree);
}

TEST(ScenarioTreeTest, RejectsMalformedTrees) {
    ScenarioTree::Adjacency cyc{{"a", {{"b", ""}}}, {"b", {{"a", ""}}}};
    EXPECT_THROW(ScenarioTree::from_children("a", cyc), Error);
    // leaves at different depths
    ScenarioTree::Adjacency ragged{{"r", {{"x", ""}, {"y", ""}}}, {"x", {{"x1", ""}}}};
    EXPECT_THROW(ScenarioTree::from_children("r", ragged), Error);
}

TEST(ModelValidation, ProbabilityVectors) {
    EXPECT_NO_THROW(validate_probability_vector({rational(1, 4), rational(3, 4)}, 2, "x"));
    EXPECT_THROW(validate_probability_vector({rational(1, 4), rational(1, 2)}, 2, "x"), Error);
    EXPECT_THROW(validate_probability_vector({rational(-1, 4), rational(5, 4)}, 2, "x"), Error);
    EXPECT_THROW(validate_probability_vector({rational(1)}, 2, "x"), Error);
}

TEST(CondExpect, PhiExpectationsFullFamily) { expect_table(bundled("binomial_tables.json"), "phi", example::phi_table()); }

TEST(CondExpect, PsiExpectationsFullFamily) { expect_table(bundled("binomial_tables.json"), "psi", example::psi_table()); }

TEST(CondExpect, OneStepAndIdentity) {
    auto inst = bundled("binomial_tables.json");
    const auto& tree = inst.problem.tree;
    const auto& m = inst.problem.family.by_id("theta1");
    const auto& loss = strategy(inst, "phi").loss;
    EXPECT_EQ(cond_expect(tree, m, loss, 2), loss);
    auto e1 = cond_expect(tree, m, loss, 1);
    EXPECT_EQ(one_step_expect(tree, m, tree.root(), e1), V({"4", "4"}));
    auto ones = constant_adapted(tree, 2, Vec::ones(2));
    EXPECT_EQ(cond_expect(tree, m, ones, 0).values.at(0), Vec::ones(2));
    EXPECT_THROW(cond_expect(tree, m, e1, 2), Error);
}

TEST(VsupAdapted, TimeOneSupremaForBothFamilies) {
    for (const char* file : {"binomial_tables.json", "binomial_tables_theta0.json"}) {
        auto inst = bundled(file);
        const auto& p = inst.problem;
        for (const auto& [name, expected] :
             {std::pair{"phi", example::kPhiSupT1}, std::pair{"psi", example::kPsiSupT1}}) {
            std::vector<AdaptedVector> xs;
            for (const auto& m : p.family.models()) xs.push_back(cond_expect(p.tree, m, strategy(inst, name).loss, 1));
            auto r = vsup_adapted(p.cone, xs);
            ASSERT_EQ(r.status, SupStatus::Unique);
            EXPECT_EQ(r.value->values.at(0), parse_vec(expected[0])) << file << " " << name;
            EXPECT_EQ(r.value->values.at(1), parse_vec(expected[1])) << file << " " << name;
        }
    }
}

TEST(VsupAdapted, SingletonAndMismatchedTimes) {
    auto inst = bundled("binomial_tables.json");
    const auto& tree = inst.problem.tree;
    AdaptedVector x{1, {V({"1", "2"}), V({"3", "4"})}};
    auto r = vsup_adapted(inst.problem.cone, {x});
    EXPECT_EQ(*r.value, x);
    EXPECT_THROW(vsup_adapted(inst.problem.cone, {x, constant_adapted(tree, 0, Vec(2))}), Error);
    EXPECT_THROW(vsup_adapted(inst.problem.cone, {}), Error);
}

TEST(VsupAdapted, NotExistsIfAnyNodeFails) {
    auto cone = parse_cone(read_file(data_path("example_octagon_cone.json")));
    AdaptedVector x{1, {V({"0", "0", "0"}), V({"0", "0", "0"})}};
    AdaptedVector y{1, {V({"0", "0", "1"}), V({"1/4", "-1/4", "0"})}};
    auto r = vsup_adapted(cone, {x, y});
    EXPECT_EQ(r.status, SupStatus::NotExists);
    EXPECT_EQ(r.per_node.at(0).status, SupStatus::Unique);
    EXPECT_EQ(r.per_node.at(1).status, SupStatus::NotExists);
}

TEST(VsupAdapted, MatchesJointDefinitionCheck) {
    Gen g(41);
    for (int i = 0; i < 200; ++i) {
        auto tree = g.tree(2, 3);
        const std::size_t d = static_cast<std::size_t>(g.integer(1, 3));
        auto cone = g.simple_cone(d);
        const int t = g.integer(0, 2);
        std::vector<AdaptedVector> xs;
        for (int k = 0, n = g.integer(1, 3); k < n; ++k) {
            AdaptedVector x{t, g.vecs(tree.level(t).size(), d)};
            xs.push_back(x);
        }
        auto r = vsup_adapted(cone, xs);
        ASSERT_TRUE(r.exists());
        // upper bound on the whole adapted vector
        for (const auto& x : xs) EXPECT_TRUE(leq_t(cone, x, *r.value));
        // least: any adapted upper bound built from cone shifts dominates it
        AdaptedVector a = *r.value;
        for (auto& v : a.values) v += g.cone_element(cone);
        EXPECT_TRUE(leq_t(cone, *r.value, a));
        // node-wise factorization
        for (std::size_t pos = 0; pos < tree.level(t).size(); ++pos) {
            std::vector<Vec> local;
            for (const auto& x : xs) local.push_back(x.values[pos]);
            EXPECT_EQ(*vsup(cone, local).value, r.value->values[pos]);
        }
    }
}

TEST(Rectangularity, BundledFamilies) {
    auto full = bundled("binomial_tables.json");
    auto sub = bundled("binomial_tables_theta0.json");
    EXPECT_TRUE(is_m_rectangular(full.problem.tree, full.problem.family));
    EXPECT_FALSE(is_m_rectangular(sub.problem.tree, sub.problem.family));
}

TEST(Rectangularity, MarginalsRebuildTheFamily) {
    auto full = bundled("binomial_tables.json");
    auto marg = bundled("binomial_marginals.json");
    ASSERT_TRUE(marg.marginals);
    const auto& tree = marg.problem.tree;
    auto family = rectangularize(tree, *marg.marginals);
    EXPECT_EQ(family.size(), 8u);
    std::set<std::vector<std::vector<Scalar>>> a, b;
    for (const auto& m : family.models()) a.insert(m.transition);
    for (const auto& m : full.problem.family.models()) b.insert(m.transition);
    EXPECT_EQ(a, b);
    EXPECT_EQ(family[0].id, "theta1");
    EXPECT_TRUE(is_m_rectangular(tree, family));
    EXPECT_EQ(extract_marginals(tree, family), *marg.marginals);
}

TEST(Rectangularity, SingletonFamilyIsRectangular) {
    auto full = bundled("binomial_tables.json");
    auto one = full.problem.family.subset(full.problem.tree, {"theta3"});
    EXPECT_TRUE(is_m_rectangular(full.problem.tree, one));
}

TEST(Rectangularity, RejectsBadMarginals) {
    auto marg = bundled("binomial_marginals.json");
    auto bad = *marg.marginals;
    bad.candidates[0].clear();
    EXPECT_THROW(validate_marginals(marg.problem.tree, bad), Error);
}

TEST(Rectangularity, PreorderCheckOnBundledFamilies) {
    auto full = bundled("binomial_tables.json");
    auto sub = bundled("binomial_tables_theta0.json");
    const auto& tree = full.problem.tree;
    auto vectors = random_test_vectors(tree, 2, 100, 0);
    auto rf = check_preorder_rectangularity(full.problem.cone, tree, full.problem.family, vectors);
    EXPECT_EQ(rf.vectors_checked, 100u);
    EXPECT_TRUE(rf.no_counterexample());
    EXPECT_EQ(rf.reverse_failures, 0u);
    auto rs = check_preorder_rectangularity(sub.problem.cone, tree, sub.problem.family, vectors);
    EXPECT_GT(rs.counterexamples, 0u);
    EXPECT_EQ(rs.reverse_failures, 0u);

    // the strategy losses themselves witness the gap for the small family
    std::vector<AdaptedVector> phi{strategy(sub, "phi").loss};
    auto r = check_preorder_rectangularity(sub.problem.cone, tree, sub.problem.family, phi);
    ASSERT_EQ(r.entries.size(), 1u);
    EXPECT_EQ(r.entries[0].nested->values.at(0), parse_vec(example::kPhiNested));
    EXPECT_EQ(r.entries[0].direct->values.at(0), V({"4", "4"}));
    EXPECT_FALSE(r.entries[0].nested_below_direct);
    EXPECT_TRUE(r.entries[0].direct_below_nested);
}

TEST(Rectangularity, RandomProductFamiliesAreRectangular) {
    Gen g(3);
    for (int i = 0; i < 100; ++i) {
        auto tree = g.tree(g.integer(1, 3), 3);
        auto marg = g.marginals(tree, 2);
        auto fam = rectangularize(tree, marg);
        EXPECT_TRUE(is_m_rectangular(tree, fam));
        auto vectors = random_test_vectors(tree, 2, 5, static_cast<std::uint64_t>(i));
        auto r = check_preorder_rectangularity(Cone::componentwise(2), tree, fam, vectors);
        EXPECT_TRUE(r.no_counterexample()) << r.summary();
    }
}
