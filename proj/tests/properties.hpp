#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>

#include "robust_vdp/error.hpp"
#include "support.hpp"

// Randomized property checks shared by the gtest suite and the acceptance runner.
// Each returns a tally; a check passes when failures == 0 and cases reach the target.

namespace rvt::props {

struct Tally {
    std::size_t cases = 0;
    std::size_t failures = 0;
    std::size_t skipped = 0;  // generated instances rejected before checking
    std::string first_failure;

    void check(bool ok, const std::function<std::string()>& what) {
        ++cases;
        if (!ok && failures++ == 0) first_failure = what();
    }
    bool passed(std::size_t target) const { return failures == 0 && cases >= target; }
    std::string summary() const {
        std::ostringstream os;
        os << cases << " cases, " << failures << " failures";
        if (skipped) os << ", " << skipped << " regenerated";
        if (!first_failure.empty()) os << "; first: " << first_failure;
        return os.str();
    }
};

/// Reflexivity, transitivity, translation and scaling compatibility of leq.
inline Tally leq_axioms(std::uint64_t seed, std::size_t n) {
    Gen g(seed);
    Tally tally;
    for (std::size_t i = 0; i < n; ++i) {
        const auto d = static_cast<std::size_t>(g.integer(1, 3));
        auto cone = g.simple_cone(d);
        Vec x = g.vec(d);
        Vec y = x + g.cone_element(cone);
        Vec z = y + g.cone_element(cone);
        Vec shift = g.vec(d);
        Scalar a = g.nonnegative(4);
        // an unrelated triple exercises the implication, not only its premise
        Vec p = g.vec(d, 3), q = g.vec(d, 3), r = g.vec(d, 3);
        const bool ok = leq(cone, x, x) && leq(cone, x, y) && leq(cone, y, z) && leq(cone, x, z) &&
                        leq(cone, x + shift, y + shift) && leq(cone, a * x, a * y) &&
                        (!(leq(cone, p, q) && leq(cone, q, r)) || leq(cone, p, r)) &&
                        (leq(cone, p, q) == leq(cone, p + shift, q + shift));
        tally.check(ok, [&] { return "cone dim " + std::to_string(d) + " x=" + to_string(x); });
    }
    return tally;
}

/// X <= Y at t+1 implies E_t[X] <= E_t[Y]; Y = X + cone-valued adapted vector.
inline Tally expectation_order(std::uint64_t seed, std::size_t n) {
    Gen g(seed);
    Tally tally;
    for (std::size_t i = 0; i < n; ++i) {
        auto tree = g.tree(g.integer(1, 3), 3);
        const auto d = static_cast<std::size_t>(g.integer(1, 3));
        auto cone = g.simple_cone(d);
        auto model = g.models(tree, 1).front();
        const int s = g.integer(1, tree.horizon());
        const int t = g.integer(0, s - 1);
        AdaptedVector x{s, g.vecs(tree.level(s).size(), d)};
        AdaptedVector y = x;
        for (auto& v : y.values) v += g.cone_element(cone);
        const bool ok = leq_t(cone, x, y) &&
                        leq_t(cone, cond_expect(tree, model, x, t), cond_expect(tree, model, y, t));
        tally.check(ok, [&] { return "t=" + std::to_string(t) + " s=" + std::to_string(s); });
    }
    return tally;
}

/// x_theta <= y_theta for all theta implies vsup(xs) <= vsup(ys).
inline Tally monotone(std::uint64_t seed, std::size_t n) {
    Gen g(seed);
    Tally tally;
    for (std::size_t i = 0; i < n; ++i) {
        const auto d = static_cast<std::size_t>(g.integer(1, 3));
        auto cone = g.simple_cone(d);
        auto xs = g.vecs(static_cast<std::size_t>(g.integer(1, 4)), d);
        std::vector<Vec> ys;
        for (const auto& x : xs) ys.push_back(x + g.cone_element(cone));
        auto sx = vsup(cone, xs);
        auto sy = vsup(cone, ys);
        const bool ok = sx.exists() && sy.exists() && leq(cone, *sx.value, *sy.value) &&
                        (!sy.witness || leq(cone, *sx.value, *sy.witness));
        tally.check(ok, [&] { return "xs[0]=" + to_string(xs[0]) + " kind " + to_string(cone.kind()); });
    }
    return tally;
}

namespace detail {

/// A nonzero element of the lineality space when the cone has one, else zero.
inline Vec lineality_element(Gen& g, const Cone& cone) {
    auto w = cone.lineality_witness();
    if (!w) return Vec(cone.dim());
    if (cone.has_duals()) {
        Vec acc(cone.dim());
        for (const auto& v : linalg::null_space(cone.duals(), cone.dim())) acc += g.rational(3) * v;
        return acc;
    }
    return g.rational(3) * *w;
}

/// Pointed cones mixing the fast and the general code paths.
inline Cone pointed_cone(Gen& g, std::size_t d) {
    switch (g.integer(0, 2)) {
        case 0: return Cone::componentwise(d);
        case 1: return Cone::from_duals(g.independent_duals(d, d));
        default: {
            // d independent duals plus their sum: dependent rows, same cone
            auto b = g.independent_duals(d, d);
            Vec sum(d);
            for (const auto& v : b) sum += v;
            b.push_back(sum);
            return Cone::from_duals(b);
        }
    }
}

}  // namespace detail

/// (a) suprema dominate each other, (b) they agree modulo +-C, (c) pointed
/// cones give Unique, (d) translation equivariance.
struct SupInvarianceTallies {
    Tally a, b, c, d;
};

inline SupInvarianceTallies sup_invariance(std::uint64_t seed, std::size_t n) {
    Gen g(seed);
    SupInvarianceTallies out;
    for (std::size_t i = 0; i < n; ++i) {
        const auto d = static_cast<std::size_t>(g.integer(1, 3));
        auto cone = g.simple_cone(d);
        auto xs = g.vecs(static_cast<std::size_t>(g.integer(1, 4)), d);
        auto r = vsup(cone, xs);
        if (!r.exists()) {
            ++out.a.skipped;
            continue;
        }
        const Vec& v = *r.value;
        // a second supremum: the reported witness, or v shifted along the lineality space
        const Vec w = r.witness ? *r.witness : v + detail::lineality_element(g, cone);
        const bool w_is_sup = is_upper_bound(cone, xs, w) && leq(cone, w, v);
        out.a.check(w_is_sup && leq(cone, v, w) && leq(cone, w, v),
                    [&] { return "v=" + to_string(v) + " w=" + to_string(w); });

        bool mod_ok = true;
        for (int k = 0; k < 3; ++k) {
            const Vec c = g.cone_element(cone);
            mod_ok = mod_ok && leq(cone, w, v + c) && leq(cone, v, w + c) && leq(cone, v - c, w) &&
                     leq(cone, w - c, v);
        }
        // the canonical representative of w's class is the reported v
        const auto canon = vsup(cone, {w});
        mod_ok = mod_ok && canon.exists() && *canon.value == v;
        out.b.check(mod_ok, [&] { return "v=" + to_string(v) + " w=" + to_string(w); });

        auto pc = detail::pointed_cone(g, d);
        auto pr = vsup(pc, xs);
        out.c.check(pr.status == SupStatus::Unique && !pr.witness,
                    [&] { return "pointed cone gave " + to_string(pr.status); });

        const Vec shift = g.vec(d);
        std::vector<Vec> moved;
        for (const auto& x : xs) moved.push_back(x + shift);
        auto rm = vsup(cone, moved);
        bool tr_ok = rm.exists() && rm.status == r.status;
        if (tr_ok) {
            const Vec vb = v + shift;
            // set level: v + b is a supremum of the shifted family
            tr_ok = is_upper_bound(cone, moved, vb) && leq(cone, vb, *rm.value);
            if (r.status == SupStatus::Unique) {
                tr_ok = tr_ok && *rm.value == vb;
            } else {
                // elementwise on canonical representatives
                tr_ok = tr_ok && *rm.value == *vsup(cone, {vb}).value;
            }
        }
        auto pm = vsup(pc, moved);
        tr_ok = tr_ok && pm.exists() && *pm.value == *pr.value + shift;
        out.d.check(tr_ok, [&] { return "v=" + to_string(v) + " b=" + to_string(shift); });
    }
    return out;
}

/// E_t[E_{t+1}[x]] == E_t[x] and E_t[1] == 1.
inline Tally tower(std::uint64_t seed, std::size_t n) {
    Gen g(seed);
    Tally tally;
    for (std::size_t i = 0; i < n; ++i) {
        auto tree = g.tree(g.integer(1, 3), 3);
        const auto d = static_cast<std::size_t>(g.integer(1, 3));
        auto model = g.models(tree, 1).front();
        const int T = tree.horizon();
        const int t = g.integer(0, T - 1);
        AdaptedVector x{T, g.vecs(tree.level(T).size(), d)};
        const auto inner = cond_expect(tree, model, x, t + 1);
        const auto ones = constant_adapted(tree, T, Vec::ones(d));
        const bool ok = cond_expect(tree, model, inner, t) == cond_expect(tree, model, x, t) &&
                        cond_expect(tree, model, ones, t) == constant_adapted(tree, t, Vec::ones(d));
        tally.check(ok, [&] { return "T=" + std::to_string(T) + " t=" + std::to_string(t); });
    }
    return tally;
}

/// Random controlled problem within the desk-scale envelope.
struct RandomProblemSpec {
    int max_depth = 3;
    int max_children = 3;
    int max_controls = 2;
    std::size_t max_models = 4;
    std::size_t max_dim = 3;
    std::size_t max_strategies = 300;
};

/// Half the families are products of node-wise marginals (at most max_models
/// combinations), half are arbitrary model lists.
inline std::optional<ControlledProblem> random_problem(Gen& g, const RandomProblemSpec& spec) {
    auto tree = g.tree(g.integer(1, spec.max_depth), spec.max_children);
    const auto d = static_cast<std::size_t>(g.integer(1, static_cast<int>(spec.max_dim)));
    std::vector<Model> models;
    if (g.coin()) {
        MarginalSets marg;
        marg.candidates.resize(tree.num_nodes());
        std::size_t product = 1;
        for (auto n : tree.internal_nodes()) {
            const std::size_t kids = tree.node(n).children.size();
            const int k = product * 2 <= spec.max_models ? g.integer(1, 2) : 1;
            for (int c = 0; c < k; ++c) marg.candidates[n].push_back(g.probability(kids));
            product *= static_cast<std::size_t>(k);
        }
        models = rectangularize(tree, marg, "m").models();
    } else {
        models = g.models(tree, static_cast<std::size_t>(g.integer(1, static_cast<int>(spec.max_models))));
    }
    ModelFamily family(tree, models);
    ControlledProblem p{tree, family, Cone::componentwise(d), g.dynamics(tree, d, spec.max_controls), {}};
    ControlSystem sys(p);
    if (count_strategies(sys, tree.root(), sys.initial_state(), spec.max_strategies + 1) > spec.max_strategies) {
        return std::nullopt;
    }
    return p;
}

struct BellmanTallies {
    Tally weak;        // every instance
    Tally equality;    // m-rectangular subset: V = B = R
    Tally strong;      // m-rectangular subset: reverse inclusions
    Tally pruning;     // weak verdicts unchanged by pruning
};

inline BellmanTallies bellman_instances(std::uint64_t seed, std::size_t instances, const RandomProblemSpec& spec = {}) {
    Gen g(seed);
    BellmanTallies out;
    while (out.weak.cases < instances) {
        auto p = random_problem(g, spec);
        if (!p) {
            ++out.weak.skipped;
            continue;
        }
        BellmanReport report;
        try {
            report = check_bellman(*p);
        } catch (const Error& e) {
            if (e.code() != ErrorCode::DeskScaleExceeded) throw;
            ++out.weak.skipped;
            continue;
        }
        const auto id = [&] {
            return "instance " + std::to_string(out.weak.cases) + " horizon " + std::to_string(p->tree.horizon());
        };
        out.weak.check(report.holds(RelationKind::Weak), id);
        if (report.m_rectangular) {
            bool eq = true;
            for (int t = 0; t < p->tree.horizon(); ++t) {
                for (const auto& [rel, loc] : {std::pair{&report.value, &report.backward},
                                              std::pair{&report.value, &report.one_step}}) {
                    const auto& a = rel->at(static_cast<std::size_t>(t)).locals;
                    const auto& b = loc->at(static_cast<std::size_t>(t)).locals;
                    eq = eq && a.size() == b.size();
                    for (std::size_t k = 0; eq && k < a.size(); ++k) {
                        const auto* other = loc->at(static_cast<std::size_t>(t)).find(a[k].node, a[k].state);
                        eq = other && other->elements == a[k].elements;
                    }
                }
            }
            out.equality.check(eq && report.holds(RelationKind::Equality), id);
            out.strong.check(report.holds(RelationKind::Strong), id);
        }
        auto pruned = check_bellman(*p, BellmanOptions{true});
        bool same = true;
        for (int t = 0; t < p->tree.horizon(); ++t) {
            same = same && pruned.holds(RelationKind::Weak, t) == report.holds(RelationKind::Weak, t);
        }
        out.pruning.check(same, id);
    }
    return out;
}

/// Scalar, single-model problems against plain backward induction on the tree.
struct ScalarTallies {
    Tally value_set;
    Tally classical;
};

namespace detail {

using Memo = std::map<std::pair<NodeIndex, std::string>, std::set<Scalar>>;

inline const std::vector<std::string>& controls_for(const DynamicsSpec& spec, int t, const std::string& s) {
    for (const auto& rule : spec.admissible) {
        if (rule.time == t && rule.state == s) return rule.controls;
    }
    throw std::runtime_error("no admissible rule");
}

inline const std::string& successor(const DynamicsSpec& spec, int t, const std::string& s, const std::string& a,
                                    const std::string& branch) {
    for (const auto& tr : spec.transitions) {
        if (tr.time == t && tr.state == s && tr.control == a && tr.branch == branch) return tr.next;
    }
    throw std::runtime_error("no transition");
}

/// Every expected loss reachable from (node, state) under some strategy.
inline const std::set<Scalar>& achievable(const ScenarioTree& tree, const Model& model, const DynamicsSpec& spec,
                                          NodeIndex n, const std::string& s, Memo& memo) {
    auto key = std::pair{n, s};
    if (auto it = memo.find(key); it != memo.end()) return it->second;
    std::set<Scalar> out;
    const auto& node = tree.node(n);
    if (node.children.empty()) {
        out.insert(spec.loss.at(s)[0]);
    } else {
        for (const auto& a : controls_for(spec, node.time, s)) {
            std::set<Scalar> acc{Scalar(0)};
            for (std::size_t c = 0; c < node.children.size(); ++c) {
                const auto child = node.children[c];
                const auto& next = successor(spec, node.time, s, a, tree.node(child).label);
                const auto& sub = achievable(tree, model, spec, child, next, memo);
                std::set<Scalar> grown;
                for (const auto& x : acc) {
                    for (const auto& y : sub) grown.insert(x + model.transition[n][c] * y);
                }
                acc = std::move(grown);
            }
            out.insert(acc.begin(), acc.end());
        }
    }
    return memo.emplace(key, std::move(out)).first->second;
}

/// Classical scalar dynamic programming: min over controls of expected continuation.
inline Scalar classical_min(const ScenarioTree& tree, const Model& model, const DynamicsSpec& spec, NodeIndex n,
                            const std::string& s) {
    const auto& node = tree.node(n);
    if (node.children.empty()) return spec.loss.at(s)[0];
    std::optional<Scalar> best;
    for (const auto& a : controls_for(spec, node.time, s)) {
        Scalar acc = 0;
        for (std::size_t c = 0; c < node.children.size(); ++c) {
            const auto child = node.children[c];
            acc += model.transition[n][c] *
                   classical_min(tree, model, spec, child, successor(spec, node.time, s, a, tree.node(child).label));
        }
        if (!best || acc < *best) best = acc;
    }
    return *best;
}

}  // namespace detail

inline ScalarTallies scalar_reduction(std::uint64_t seed, std::size_t instances) {
    Gen g(seed);
    ScalarTallies out;
    while (out.value_set.cases < instances) {
        auto tree = g.tree(g.integer(1, 3), 3);
        ModelFamily family(tree, g.models(tree, 1));
        ControlledProblem p{tree, family, Cone::componentwise(1), g.dynamics(tree, 1, 2, 20), {}};
        ControlSystem sys(p);
        if (count_strategies(sys, tree.root(), sys.initial_state(), 2001) > 2000) {
            ++out.value_set.skipped;
            continue;
        }
        const auto& spec = std::get<DynamicsSpec>(p.spec);
        detail::Memo memo;
        const auto& expected = detail::achievable(tree, family[0], spec, tree.root(), spec.initial_state, memo);
        VectorSet expected_set;
        for (const auto& x : expected) expected_set.insert(Vec{x});
        const auto v0 = value_function(p, 0).locals.at(0).elements;
        const auto id = [&] { return "instance " + std::to_string(out.value_set.cases); };
        out.value_set.check(v0 == expected_set, id);
        Scalar lowest = v0[0][0];
        for (const auto& v : v0) lowest = std::min(lowest, v[0]);
        out.classical.check(lowest == detail::classical_min(tree, family[0], spec, tree.root(), spec.initial_state),
                            id);
    }
    return out;
}

}  // namespace rvt::props
