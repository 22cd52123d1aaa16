#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "robust_vdp/cone.hpp"

namespace robust_vdp {

enum class SupStatus { Unique, NonUniqueWitness, NotExists };

std::string to_string(SupStatus status);

/// Outcome of an ideal-point supremum computation.
///
/// Unique / NonUniqueWitness: `value` is a least upper bound. For
/// NonUniqueWitness, `witness` is a second least upper bound different from
/// `value`; both dominate each other.
/// NotExists: `candidate` is a minimal upper bound and `certificate` an upper
/// bound that does not dominate it. When the upper bounds do not intersect
/// at all, both are empty and `explanation` says so.
struct SupResult {
    SupStatus status = SupStatus::NotExists;
    std::optional<Vec> value;
    std::optional<Vec> witness;
    std::optional<Vec> candidate;
    std::optional<Vec> certificate;
    std::string explanation;

    bool exists() const noexcept { return status != SupStatus::NotExists; }
    /// Throws Error(SupNotExists) with the explanation when absent.
    const Vec& supremum() const;
};

/// Refusal thresholds for exact existence detection.
struct VsupLimits {
    std::size_t max_dim = 4;
    std::size_t max_inequalities = 16;
};

/// Coordinate-wise maximum: the supremum for the orthant order.
Vec vsup_componentwise(const std::vector<Vec>& xs);

/// Supremum for a cone whose dual generators are linearly independent:
/// solve <b_i, V> = max_theta <b_i, x_theta>. Collections are folded pairwise
/// in input order. Throws Error(DualNotLI) when the duals are dependent.
SupResult vsup_dual_li(const Cone& cone, const std::vector<Vec>& xs);

/// Exact existence test for any cone with a dual representation: the upper
/// bounds form P = {V : <b_i, V> >= alpha_i}; a lexicographic LP picks a
/// minimal candidate and the vertices of P decide whether P = candidate + C.
SupResult vsup_general(const Cone& cone, const std::vector<Vec>& xs, VsupLimits limits = {});

/// Dispatches to the cheapest applicable method.
SupResult vsup(const Cone& cone, const std::vector<Vec>& xs, VsupLimits limits = {});

/// x <= v for every x in xs.
bool is_upper_bound(const Cone& cone, const std::vector<Vec>& xs, const Vec& v);

/// Vertices (minimal-face representatives, canonical pivoting) of
/// {V : rows * V >= rhs}. Exposed for tests.
std::vector<Vec> polyhedron_vertices(const std::vector<Vec>& rows, const std::vector<Scalar>& rhs, std::size_t dim);

}  // namespace robust_vdp
