#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "robust_vdp/vec.hpp"

namespace robust_vdp {

enum class ConeKind { ComponentWise, Halfspace, PolyhedralDual, PolyhedralGenerators };

std::string to_string(ConeKind kind);

/// Polyhedral ordering cone C, inducing the vector preorder x <= y iff y - x in C.
///
/// A cone carries a generator list (C = cone(G)), a dual list
/// (C = {x : <b_i, x> >= 0 for all i}), or both. No conversion between the two
/// is attempted; operations that need a representation that is absent throw
/// Error(MissingRepresentation).
class Cone {
public:
    /// The nonnegative orthant R^d_+.
    static Cone componentwise(std::size_t dim);
    /// {x : <w, x> >= 0}, w != 0.
    static Cone halfspace(Vec w);
    static Cone from_duals(std::vector<Vec> duals);
    /// When `duals` is supplied both representations are cross-checked and
    /// Error(InconsistentCone) is thrown if they visibly disagree.
    static Cone from_generators(std::vector<Vec> generators, std::optional<std::vector<Vec>> duals = std::nullopt);

    ConeKind kind() const noexcept { return kind_; }
    std::size_t dim() const noexcept { return dim_; }

    bool has_generators() const noexcept { return generators_.has_value(); }
    bool has_duals() const noexcept { return duals_.has_value(); }
    const std::vector<Vec>& generators() const;
    const std::vector<Vec>& duals() const;
    /// Only meaningful with has_duals().
    bool duals_linearly_independent() const noexcept { return duals_li_; }
    /// For Halfspace kind.
    const Vec& normal() const;

    bool contains(const Vec& x) const;
    /// Membership decided from one representation only (for consistency checks).
    bool contains_by_duals(const Vec& x) const;
    bool contains_by_generators(const Vec& x) const;

    bool is_pointed() const;
    bool is_solid() const;

    /// A nonzero x with x in C and -x in C, when the cone is not pointed.
    std::optional<Vec> lineality_witness() const;

    friend bool operator==(const Cone& a, const Cone& b);

private:
    Cone() = default;
    void check_dims(const std::vector<Vec>& vs, const char* what);

    ConeKind kind_ = ConeKind::ComponentWise;
    std::size_t dim_ = 0;
    std::optional<std::vector<Vec>> generators_;
    std::optional<std::vector<Vec>> duals_;
    bool duals_li_ = false;
};

bool leq(const Cone& cone, const Vec& x, const Vec& y);

/// A ≼ B  iff  B ⊆ A + C.
bool set_precurly(const Cone& cone, const VectorSet& a, const VectorSet& b);
/// A ⋞ B  iff  A ⊆ B - C.
bool set_curlyprec(const Cone& cone, const VectorSet& a, const VectorSet& b);

/// First b in B with no a in A below it, i.e. a witness that B ⊄ A + C.
std::optional<Vec> precurly_violation(const Cone& cone, const VectorSet& a, const VectorSet& b);
/// First a in A with no b in B above it, i.e. a witness that A ⊄ B - C.
std::optional<Vec> curlyprec_violation(const Cone& cone, const VectorSet& a, const VectorSet& b);

/// Checks that generators satisfy every dual inequality, that each dual is
/// tight on some nonzero generator, and that a fixed grid of points satisfying
/// the duals is generated. Partial by nature: it samples, it does not prove.
/// Returns a description of the first disagreement found.
std::optional<std::string> representation_mismatch(const std::vector<Vec>& generators, const std::vector<Vec>& duals);

}  // namespace robust_vdp
