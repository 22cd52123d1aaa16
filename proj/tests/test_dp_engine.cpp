#include <gtest/gtest.h>

#include "example_values.hpp"
#include "robust_vdp/error.hpp"
#include "support.hpp"

using namespace rvt;

namespace {

const VectorSet& root_set(const ValueSet& vs) { return vs.locals.at(0).elements; }

/// Depth-2 binary tree with path states, two controls everywhere, one model.
ControlledProblem binary_path_problem(int controls) {
    Gen g(1);
    ScenarioTree::Adjacency adj{{"r", {{"u", "up"}, {"d", "down"}}},
                                {"u", {{"uu", "up"}, {"ud", "down"}}},
                                {"d", {{"du", "up"}, {"dd", "down"}}}};
    auto tree = ScenarioTree::from_children("r", adj);
    DynamicsSpec spec;
    spec.initial_state = "s";
    spec.states = {"s"};
    std::vector<std::string> ctl;
    for (int c = 0; c < controls; ++c) ctl.push_back(std::string(1, static_cast<char>('a' + c)));
    std::vector<std::string> frontier{"s"};
    for (int t = 0; t < 2; ++t) {
        std::vector<std::string> next;
        for (const auto& s : frontier) {
            spec.admissible.push_back({t, s, ctl});
            for (const auto& a : ctl) {
                for (const char* b : {"up", "down"}) {
                    auto n = s + a + b;
                    spec.transitions.push_back({t, s, a, b, n});
                    spec.states.push_back(n);
                    next.push_back(n);
                }
            }
        }
        frontier = next;
    }
    int k = 0;
    for (const auto& s : frontier) spec.loss[s] = V({std::to_string(k++ % 5).c_str(), "1"});
    auto models = g.models(tree, 1);
    ModelFamily family(tree, models);
    return ControlledProblem{tree, family, Cone::componentwise(2), spec, {}};
}

}  // namespace

TEST(Strategies, TabulatedExampleHasTwoNamedStrategies) {
    auto inst = bundled("binomial_tables.json");
    auto strategies = enumerate_strategies(inst.problem);
    ASSERT_EQ(strategies.size(), 2u);
    EXPECT_EQ(strategies[0].describe(inst.problem.tree), "phi");
    EXPECT_EQ(strategies[1].describe(inst.problem.tree), "psi");
    auto loss = terminal_loss(inst.problem, strategies[0]);
    EXPECT_EQ(loss.values, (std::vector<Vec>{V({"8", "0"}), V({"0", "8"}), V({"0", "0"}), V({"8", "8"})}));
    EXPECT_EQ(terminal_loss(inst.problem, strategies[1]).values,
              (std::vector<Vec>{V({"0", "8"}), V({"0", "0"}), V({"6", "0"}), V({"6", "8"})}));
}

TEST(Strategies, DynamicsCounts) {
    EXPECT_EQ(enumerate_strategies(binary_path_problem(1)).size(), 1u);
    auto p = binary_path_problem(2);
    EXPECT_EQ(enumerate_strategies(p).size(), 8u);
    ControlSystem sys(p);
    EXPECT_EQ(count_strategies(sys, p.tree.root(), sys.initial_state(), 1000), 8u);
    EXPECT_EQ(count_strategies(sys, p.tree.root(), sys.initial_state(), 5), 6u);
    p.options.budget = 4;
    EXPECT_THROW(enumerate_strategies(p), Error);
    try {
        enumerate_strategies(p);
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::DeskScaleExceeded);
    }
}

TEST(Strategies, ZeroLossGivesZeroVector) {
    auto p = binary_path_problem(2);
    auto& spec = std::get<DynamicsSpec>(p.spec);
    for (auto& [s, v] : spec.loss) v = Vec(2);
    for (const auto& st : enumerate_strategies(p)) {
        for (const auto& v : terminal_loss(p, st).values) EXPECT_TRUE(v.is_zero());
    }
}

TEST(Strategies, TimedRuleBeatsUntimedRule) {
    auto p = binary_path_problem(2);
    auto& spec = std::get<DynamicsSpec>(p.spec);
    spec.admissible.insert(spec.admissible.begin(), {std::nullopt, "s", {"a"}});
    ControlSystem sys(p);
    EXPECT_EQ(sys.controls(p.tree.root(), "s"), (std::vector<std::string>{"a", "b"}));
    spec.admissible.erase(spec.admissible.begin() + 1);  // drop the timed root rule
    ControlSystem sys2(p);
    EXPECT_EQ(sys2.controls(p.tree.root(), "s"), (std::vector<std::string>{"a"}));
}

TEST(ValueFunctionTest, ExampleValueSets) {
    auto full = bundled("binomial_tables.json");
    auto sub = bundled("binomial_tables_theta0.json");
    EXPECT_EQ(root_set(value_function(full.problem, 0)), parse_set(example::kV0Theta));
    EXPECT_EQ(root_set(value_function(sub.problem, 0)), parse_set(example::kV0Theta0));
    EXPECT_EQ(root_set(backward_value(full.problem).at(0)), parse_set(example::kB0Both));
    EXPECT_EQ(root_set(backward_value(sub.problem).at(0)), parse_set(example::kB0Both));
    auto v1 = value_function(full.problem, 1);
    EXPECT_EQ(one_step_R(full.problem, 0, v1).locals.at(0).elements, parse_set(example::kB0Both));
    EXPECT_EQ(one_step_R(sub.problem, 0, value_function(sub.problem, 1)).locals.at(0).elements,
              parse_set(example::kB0Both));
}

TEST(ValueFunctionTest, TerminalSetsAreLosses) {
    auto full = bundled("binomial_tables.json");
    auto vt = value_function(full.problem, 2);
    for (const auto& local : vt.locals) EXPECT_EQ(local.elements.size(), 1u);
    EXPECT_EQ(vt.total_elements(), vt.locals.size());
}

TEST(ValueFunctionTest, DynamicsInstanceMatchesBruteForce) {
    auto inst = bundled("dynamics_two_step.json");
    auto expected = parse_set(
        "{(5,71/12), (6,19/4), (5,5), (6,23/6), (19/4,61/12), (35/6,71/12), (3,4), (13/3,29/6)}");
    EXPECT_EQ(root_set(value_function(inst.problem, 0)), expected);
    auto report = check_bellman(inst.problem);
    EXPECT_TRUE(report.m_rectangular);
    EXPECT_TRUE(report.expectations_met());
}

TEST(ValueFunctionTest, SingletonFamilyIsScalarExpectation) {
    auto full = bundled("binomial_tables.json");
    auto p = full.problem;
    p.family = p.family.subset(p.tree, {"theta3"});
    auto v0 = root_set(value_function(p, 0));
    EXPECT_EQ(v0, (VectorSet{V({"5", "3"}), V({"3", "5"})}));
    auto report = check_bellman(p);
    EXPECT_TRUE(report.holds(RelationKind::Equality));
}

TEST(ValueFunctionTest, HorizonOneBackwardEqualsValue) {
    Gen g(8);
    auto tree = g.tree(1, 3);
    ModelFamily fam(tree, g.models(tree, 3));
    ControlledProblem p{tree, fam, Cone::componentwise(2), g.dynamics(tree, 2, 2), {}};
    EXPECT_EQ(root_set(backward_value(p).at(0)), root_set(value_function(p, 0)));
    EXPECT_EQ(root_set(one_step_R(p, 0, value_function(p, 1))), root_set(value_function(p, 0)));
}

TEST(Bellman, FullFamilyStrongPrinciple) {
    auto report = check_bellman(bundled("binomial_tables.json").problem);
    EXPECT_TRUE(report.m_rectangular);
    EXPECT_TRUE(report.strong_expected);
    EXPECT_TRUE(report.equality_expected);
    EXPECT_TRUE(report.holds(RelationKind::Weak));
    EXPECT_TRUE(report.holds(RelationKind::Strong));
    EXPECT_TRUE(report.holds(RelationKind::Equality));
    EXPECT_TRUE(report.times.at(0).relation("V = B").holds);
    EXPECT_FALSE(report.strict_weak(0));
    EXPECT_TRUE(report.expectations_met());
}

TEST(Bellman, SubfamilyOnlyWeakPrinciple) {
    auto report = check_bellman(bundled("binomial_tables_theta0.json").problem);
    EXPECT_FALSE(report.m_rectangular);
    EXPECT_FALSE(report.strong_expected);
    EXPECT_TRUE(report.holds(RelationKind::Weak));
    EXPECT_FALSE(report.holds(RelationKind::Strong, 0));
    EXPECT_FALSE(report.holds(RelationKind::Equality, 0));
    EXPECT_TRUE(report.strict_weak(0));
    const auto& eq = report.times.at(0).relation("V = B");
    EXPECT_FALSE(eq.holds);
    EXPECT_FALSE(eq.witness.empty());
    EXPECT_TRUE(report.holds(RelationKind::Equality, 1));
    EXPECT_TRUE(report.expectations_met());
}

TEST(Bellman, PruningKeepsInclusionVerdicts) {
    for (const char* file : {"binomial_tables.json", "binomial_tables_theta0.json", "dynamics_two_step.json"}) {
        auto p = bundled(file).problem;
        auto exact = check_bellman(p);
        auto pruned = check_bellman(p, BellmanOptions{true});
        for (int t = 0; t < p.tree.horizon(); ++t) {
            EXPECT_EQ(exact.holds(RelationKind::Weak, t), pruned.holds(RelationKind::Weak, t)) << file;
            EXPECT_EQ(exact.holds(RelationKind::Strong, t), pruned.holds(RelationKind::Strong, t)) << file;
            const auto& tr = pruned.times.at(static_cast<std::size_t>(t));
            if (exact.times.at(static_cast<std::size_t>(t)).relation("V = B").holds) {
                EXPECT_TRUE(tr.relation("ext(V) = B").holds) << file << " t=" << t;
            }
        }
    }
}

TEST(Bellman, PrunedBackwardSetIsExtremalPart) {
    auto p = bundled("dynamics_two_step.json").problem;
    auto exact = backward_value(p, false);
    auto pruned = backward_value(p, true);
    for (std::size_t t = 0; t < exact.size(); ++t) {
        for (const auto& local : exact[t].locals) {
            const auto& got = pruned[t].at(local.node, local.state).elements;
            VectorSet want;
            for (const auto& x : local.elements) {
                bool above = false, below = false;
                for (const auto& y : local.elements) {
                    if (y == x) continue;
                    above = above || leq(p.cone, y, x);
                    below = below || leq(p.cone, x, y);
                }
                if (!above || !below) want.insert(x);
            }
            EXPECT_EQ(got, want) << "t=" << t;
        }
    }
    EXPECT_LT(pruned[0].total_elements(), exact[0].total_elements());
}

TEST(Bellman, SelectorBudgetEnforced) {
    auto p = bundled("dynamics_two_step.json").problem;
    p.options.budget = 2;
    EXPECT_THROW(backward_value(p), Error);
}

TEST(Pareto, PruneExamples) {
    auto c = Cone::componentwise(2);
    EXPECT_EQ(prune_pareto(S({V({"1", "1"}), V({"2", "2"}), V({"0", "3"})}), c), S({V({"1", "1"}), V({"0", "3"})}));
    EXPECT_EQ(prune_pareto(S({V({"5", "4"}), V({"9/2", "5"})}), c), S({V({"5", "4"}), V({"9/2", "5"})}));
    EXPECT_EQ(prune_pareto(S({V({"7", "7"})}), c), S({V({"7", "7"})}));
    EXPECT_THROW(prune_pareto(S({V({"1", "1"})}), Cone::halfspace(V({"1", "0"}))), Error);
}

TEST(Pareto, UpperImagesOfExample) {
    auto full = bundled("binomial_tables.json").problem;
    auto sub = bundled("binomial_tables_theta0.json").problem;
    EXPECT_EQ(root_set(upper_image(full, 0)), parse_set("{(5,4), (9/2,5)}"));
    EXPECT_EQ(root_set(upper_image(sub, 0)), parse_set("{(4,4)}"));
    auto rf = check_upper_image_recursion(full);
    EXPECT_TRUE(rf.inclusion_holds);
    ASSERT_TRUE(rf.equality_holds);
    EXPECT_TRUE(*rf.equality_holds);
    EXPECT_GT(rf.combinations, 0u);
    auto rs = check_upper_image_recursion(sub);
    EXPECT_TRUE(rs.inclusion_holds);
    EXPECT_FALSE(rs.equality_holds);
}

TEST(Pareto, UpperImageNeedsComponentwiseCone) {
    auto p = bundled("binomial_tables.json").problem;
    p.cone = Cone::from_duals({V({"1", "0"}), V({"1", "1"})});
    EXPECT_THROW(upper_image(p, 0), Error);
}

TEST(Pareto, HorizonOneUpperImageIsParetoOfValue) {
    Gen g(12);
    for (int i = 0; i < 20; ++i) {
        auto tree = g.tree(1, 3);
        ModelFamily fam(tree, g.models(tree, 2));
        ControlledProblem p{tree, fam, Cone::componentwise(2), g.dynamics(tree, 2, 2), {}};
        EXPECT_EQ(root_set(upper_image(p, 0)), prune_pareto(root_set(value_function(p, 0)), p.cone));
    }
}

TEST(Validation, ProblemInvariants) {
    auto p = binary_path_problem(2);
    auto& spec = std::get<DynamicsSpec>(p.spec);
    auto broken = p;
    std::get<DynamicsSpec>(broken.spec).loss.erase(spec.loss.begin()->first);
    EXPECT_THROW(validate_problem(broken), Error);
    auto empty = p;
    std::get<DynamicsSpec>(empty.spec).admissible[0].controls.clear();
    EXPECT_THROW(validate_problem(empty), Error);
    EXPECT_NO_THROW(validate_problem(p));
}
