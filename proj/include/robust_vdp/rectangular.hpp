#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "robust_vdp/stochastic.hpp"

namespace robust_vdp {

/// Candidate transition vectors per non-terminal node (indexed by NodeIndex;
/// leaves hold no candidates).
struct MarginalSets {
    std::vector<std::vector<std::vector<Scalar>>> candidates;

    friend bool operator==(const MarginalSets&, const MarginalSets&) = default;
};

void validate_marginals(const ScenarioTree& tree, const MarginalSets& marginals);

/// Every combination of one candidate per node. Models are numbered
/// "<prefix>1", "<prefix>2", ... in lexicographic order of the choice tuple,
/// the first internal node (level order) being the most significant digit.
ModelFamily rectangularize(const ScenarioTree& tree, const MarginalSets& marginals,
                           const std::string& id_prefix = "theta");

/// Distinct transition vectors per node, in order of first appearance.
MarginalSets extract_marginals(const ScenarioTree& tree, const ModelFamily& family);

/// Product structure test: the family, as a set of transition assignments,
/// equals the rectangular hull of its own marginals.
bool is_m_rectangular(const ScenarioTree& tree, const ModelFamily& family);

struct RectangularityEntry {
    std::size_t vector_index = 0;
    int time = 0;
    std::optional<AdaptedVector> nested;  // vsup_t E_t[ vsup_{t+1} E_{t+1}[X] ]
    std::optional<AdaptedVector> direct;  // vsup_t E_t[X]
    bool nested_below_direct = false;     // the rectangularity relation
    bool direct_below_nested = false;     // always expected to hold
    std::optional<bool> equal;            // reported for pointed cones only
    std::string note;                     // set when a supremum does not exist
};

struct RectangularityReport {
    std::size_t vectors_checked = 0;
    std::vector<RectangularityEntry> entries;
    std::size_t counterexamples = 0;        // entries where nested <= direct fails
    std::size_t reverse_failures = 0;       // entries where direct <= nested fails
    std::size_t nonexistent = 0;            // entries skipped because a supremum is missing
    bool pointed = false;
    std::optional<std::uint64_t> seed;

    bool no_counterexample() const noexcept { return counterexamples == 0 && nonexistent == 0; }
    /// "no counterexample found among N vectors" or a failure count.
    std::string summary() const;
};

/// Empirical check of the rectangularity relation on the given terminal
/// vectors, for every pair (t, t+1) with t < T-1. Never claims the property
/// for all X.
RectangularityReport check_preorder_rectangularity(const Cone& cone, const ScenarioTree& tree,
                                                   const ModelFamily& family,
                                                   const std::vector<AdaptedVector>& test_vectors,
                                                   VsupLimits limits = {});

/// Terminal vectors with components p/q, p in -8..8, q in {1,2,4}.
std::vector<AdaptedVector> random_test_vectors(const ScenarioTree& tree, std::size_t dim, std::size_t count,
                                               std::uint64_t seed);

}  // namespace robust_vdp
