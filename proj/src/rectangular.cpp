#include "robust_vdp/rectangular.hpp"

#include <random>
#include <set>

#include "robust_vdp/error.hpp"

namespace robust_vdp {

void validate_marginals(const ScenarioTree& tree, const MarginalSets& marginals) {
    if (marginals.candidates.size() != tree.num_nodes()) {
        throw Error(ErrorCode::Validation, "marginals: table does not match the tree");
    }
    for (NodeIndex n = 0; n < tree.num_nodes(); ++n) {
        const auto& node = tree.node(n);
        const auto& cands = marginals.candidates[n];
        if (node.children.empty()) {
            if (!cands.empty()) {
                throw Error(ErrorCode::Validation, "marginals: terminal node \"" + node.name + "\" has candidates");
            }
            continue;
        }
        if (cands.empty()) {
            throw Error(ErrorCode::Validation, "marginals: empty candidate set at node \"" + node.name + "\"");
        }
        for (std::size_t k = 0; k < cands.size(); ++k) {
            validate_probability_vector(cands[k], node.children.size(),
                                        "marginals at node \"" + node.name + "\" candidate " + std::to_string(k));
        }
    }
}

ModelFamily rectangularize(const ScenarioTree& tree, const MarginalSets& marginals, const std::string& id_prefix) {
    validate_marginals(tree, marginals);
    const auto internal = tree.internal_nodes();
    std::vector<std::size_t> choice(internal.size(), 0);
    std::vector<Model> models;
    for (;;) {
        Model m;
        m.id = id_prefix + std::to_string(models.size() + 1);
        m.transition.resize(tree.num_nodes());
        for (std::size_t k = 0; k < internal.size(); ++k) {
            m.transition[internal[k]] = marginals.candidates[internal[k]][choice[k]];
        }
        models.push_back(std::move(m));
        // odometer, last node fastest
        std::size_t k = internal.size();
        while (k > 0) {
            --k;
            if (++choice[k] < marginals.candidates[internal[k]].size()) break;
            choice[k] = 0;
            if (k == 0) return ModelFamily(tree, std::move(models));
        }
        if (internal.empty()) return ModelFamily(tree, std::move(models));
    }
}

MarginalSets extract_marginals(const ScenarioTree& tree, const ModelFamily& family) {
    MarginalSets out;
    out.candidates.resize(tree.num_nodes());
    for (auto n : tree.internal_nodes()) {
        std::set<std::vector<Scalar>> seen;
        for (const auto& m : family.models()) {
            if (seen.insert(m.transition[n]).second) out.candidates[n].push_back(m.transition[n]);
        }
    }
    return out;
}

bool is_m_rectangular(const ScenarioTree& tree, const ModelFamily& family) {
    const auto marginals = extract_marginals(tree, family);
    std::set<std::vector<std::vector<Scalar>>> assignments;
    for (const auto& m : family.models()) assignments.insert(m.transition);
    // every model already lies in the product of its marginals, so equality is a count check
    std::size_t product = 1;
    for (auto n : tree.internal_nodes()) {
        product *= marginals.candidates[n].size();
        if (product > assignments.size()) return false;
    }
    return product == assignments.size();
}

std::string RectangularityReport::summary() const {
    std::string s;
    if (no_counterexample()) {
        s = "no counterexample found among " + std::to_string(vectors_checked) + " vectors";
    } else {
        s = std::to_string(counterexamples) + " counterexample(s) among " + std::to_string(vectors_checked) +
            " vectors";
        if (nonexistent) s += ", " + std::to_string(nonexistent) + " check(s) without a supremum";
    }
    if (reverse_failures) s += "; reverse relation failed " + std::to_string(reverse_failures) + " time(s)";
    if (seed) s += " (seed " + std::to_string(*seed) + ")";
    return s;
}

namespace {

AdaptedSupResult sup_of_expectations(const Cone& cone, const ScenarioTree& tree, const ModelFamily& family,
                                     const AdaptedVector& x, int t, VsupLimits limits) {
    std::vector<AdaptedVector> ex;
    ex.reserve(family.size());
    for (const auto& m : family.models()) ex.push_back(cond_expect(tree, m, x, t));
    return vsup_adapted(cone, ex, limits);
}

}  // namespace

RectangularityReport check_preorder_rectangularity(const Cone& cone, const ScenarioTree& tree,
                                                   const ModelFamily& family,
                                                   const std::vector<AdaptedVector>& test_vectors,
                                                   VsupLimits limits) {
    RectangularityReport report;
    report.pointed = cone.is_pointed();
    report.vectors_checked = test_vectors.size();
    const int horizon = tree.horizon();
    for (std::size_t i = 0; i < test_vectors.size(); ++i) {
        const auto& x = test_vectors[i];
        validate_adapted(tree, x);
        if (x.time != horizon) {
            throw Error(ErrorCode::InvalidArgument, "rectangularity test vectors must live at the terminal time");
        }
        for (int t = 0; t + 1 < horizon; ++t) {
            RectangularityEntry e;
            e.vector_index = i;
            e.time = t;
            auto inner = sup_of_expectations(cone, tree, family, x, t + 1, limits);
            auto direct = sup_of_expectations(cone, tree, family, x, t, limits);
            if (!inner.exists() || !direct.exists()) {
                e.note = !inner.exists() ? "supremum at time " + std::to_string(t + 1) + " does not exist"
                                         : "supremum at time " + std::to_string(t) + " does not exist";
                ++report.nonexistent;
                report.entries.push_back(std::move(e));
                continue;
            }
            auto nested = sup_of_expectations(cone, tree, family, *inner.value, t, limits);
            if (!nested.exists()) {
                e.note = "nested supremum at time " + std::to_string(t) + " does not exist";
                ++report.nonexistent;
                report.entries.push_back(std::move(e));
                continue;
            }
            e.nested = *nested.value;
            e.direct = *direct.value;
            e.nested_below_direct = leq_t(cone, *e.nested, *e.direct);
            e.direct_below_nested = leq_t(cone, *e.direct, *e.nested);
            if (report.pointed) e.equal = *e.nested == *e.direct;
            if (!e.nested_below_direct) ++report.counterexamples;
            if (!e.direct_below_nested) ++report.reverse_failures;
            report.entries.push_back(std::move(e));
        }
    }
    return report;
}

std::vector<AdaptedVector> random_test_vectors(const ScenarioTree& tree, std::size_t dim, std::size_t count,
                                               std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> num(-8, 8);
    std::uniform_int_distribution<int> den_pick(0, 2);
    static constexpr long dens[] = {1, 2, 4};
    std::vector<AdaptedVector> out;
    const auto& leaves = tree.level(tree.horizon());
    for (std::size_t k = 0; k < count; ++k) {
        AdaptedVector x;
        x.time = tree.horizon();
        for (std::size_t l = 0; l < leaves.size(); ++l) {
            Vec v(dim);
            for (std::size_t i = 0; i < dim; ++i) v[i] = rational(num(rng), dens[den_pick(rng)]);
            x.values.push_back(std::move(v));
        }
        out.push_back(std::move(x));
    }
    return out;
}

}  // namespace robust_vdp
