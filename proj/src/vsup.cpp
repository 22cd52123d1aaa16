#include "robust_vdp/vsup.hpp"

#include <functional>

#include "robust_vdp/error.hpp"
#include "robust_vdp/linalg.hpp"
#include "robust_vdp/simplex.hpp"

namespace robust_vdp {

std::string to_string(SupStatus status) {
    switch (status) {
        case SupStatus::Unique: return "Unique";
        case SupStatus::NonUniqueWitness: return "NonUniqueWitness";
        case SupStatus::NotExists: return "NotExists";
    }
    return "Unknown";
}

const Vec& SupResult::supremum() const {
    if (!value) throw Error(ErrorCode::SupNotExists, explanation.empty() ? "supremum does not exist" : explanation);
    return *value;
}

namespace {

void require_points(const std::vector<Vec>& xs, std::size_t dim, const char* where) {
    if (xs.empty()) throw Error(ErrorCode::InvalidArgument, std::string(where) + ": empty collection");
    for (const auto& x : xs) {
        if (x.dim() != dim) {
            throw Error(ErrorCode::DimensionMismatch, std::string(where) + ": point of dimension " +
                                                          std::to_string(x.dim()) + ", expected " +
                                                          std::to_string(dim));
        }
    }
}

std::vector<Scalar> upper_levels(const std::vector<Vec>& duals, const std::vector<Vec>& xs) {
    std::vector<Scalar> alpha;
    alpha.reserve(duals.size());
    for (const auto& b : duals) {
        Scalar best = dot(b, xs.front());
        for (std::size_t i = 1; i < xs.size(); ++i) {
            Scalar v = dot(b, xs[i]);
            if (v > best) best = v;
        }
        alpha.push_back(best);
    }
    return alpha;
}

SupResult exists_result(const Cone& cone, Vec value) {
    SupResult r;
    auto ns = linalg::null_space(cone.duals(), cone.dim());
    if (ns.empty()) {
        r.status = SupStatus::Unique;
        r.value = std::move(value);
    } else {
        r.status = SupStatus::NonUniqueWitness;
        r.witness = value + ns.front();
        r.value = std::move(value);
        r.explanation = "supremum determined up to the lineality space of the cone";
    }
    return r;
}

}  // namespace

Vec vsup_componentwise(const std::vector<Vec>& xs) {
    if (xs.empty()) throw Error(ErrorCode::InvalidArgument, "vsup_componentwise: empty collection");
    require_points(xs, xs.front().dim(), "vsup_componentwise");
    Vec out = xs.front();
    for (std::size_t k = 1; k < xs.size(); ++k) {
        for (std::size_t i = 0; i < out.dim(); ++i) {
            if (xs[k][i] > out[i]) out[i] = xs[k][i];
        }
    }
    return out;
}

SupResult vsup_dual_li(const Cone& cone, const std::vector<Vec>& xs) {
    require_points(xs, cone.dim(), "vsup_dual_li");
    const auto& duals = cone.duals();
    if (!cone.duals_linearly_independent()) {
        throw Error(ErrorCode::DualNotLI, "vsup_dual_li: dual generators are linearly dependent; use vsup_general");
    }
    auto solve = [&](const std::vector<Scalar>& alpha) {
        auto v = linalg::solve_canonical(duals, alpha, cone.dim());
        // full row rank makes the system always consistent
        return *v;
    };
    Vec acc = solve(upper_levels(duals, {xs.front()}));
    for (std::size_t k = 1; k < xs.size(); ++k) acc = solve(upper_levels(duals, {acc, xs[k]}));
    return exists_result(cone, std::move(acc));
}

std::vector<Vec> polyhedron_vertices(const std::vector<Vec>& rows, const std::vector<Scalar>& rhs, std::size_t dim) {
    const std::size_t r = linalg::rank(rows, dim);
    VectorSet found;
    std::vector<std::size_t> pick;
    std::function<void(std::size_t)> choose = [&](std::size_t start) {
        if (pick.size() == r) {
            linalg::Matrix sub;
            std::vector<Scalar> sub_rhs;
            for (auto i : pick) {
                sub.push_back(rows[i]);
                sub_rhs.push_back(rhs[i]);
            }
            if (linalg::rank(sub, dim) != r) return;
            auto v = linalg::solve_canonical(sub, sub_rhs, dim);
            if (!v) return;
            for (std::size_t i = 0; i < rows.size(); ++i) {
                if (dot(rows[i], *v) < rhs[i]) return;
            }
            found.insert(*v);
            return;
        }
        for (std::size_t i = start; i < rows.size(); ++i) {
            pick.push_back(i);
            choose(i + 1);
            pick.pop_back();
        }
    };
    choose(0);
    return found.items();
}

SupResult vsup_general(const Cone& cone, const std::vector<Vec>& xs, VsupLimits limits) {
    require_points(xs, cone.dim(), "vsup_general");
    if (!cone.has_duals()) {
        throw Error(ErrorCode::UnsupportedCone, "vsup_general needs a dual (halfspace) representation of the cone");
    }
    const auto& duals = cone.duals();
    const std::size_t d = cone.dim();
    if (d > limits.max_dim || duals.size() > limits.max_inequalities) {
        throw Error(ErrorCode::DeskScaleExceeded, "vsup_general: dimension " + std::to_string(d) + " with " +
                                                      std::to_string(duals.size()) +
                                                      " inequalities exceeds the exact vertex-enumeration limit (d <= " +
                                                      std::to_string(limits.max_dim) + ", <= " +
                                                      std::to_string(limits.max_inequalities) + " inequalities)");
    }
    const auto alpha = upper_levels(duals, xs);

    // Lexicographic minimisation of <b_1,V>, <b_2,V>, ... over P.
    LinearProgram lp;
    lp.add_variables(d, /*free=*/true);
    for (std::size_t i = 0; i < duals.size(); ++i) {
        lp.add_constraint(duals[i].components(), LinearProgram::Sense::GreaterEq, alpha[i]);
    }
    if (lp.find_feasible().status != LpStatus::Optimal) {
        SupResult r;
        r.status = SupStatus::NotExists;
        r.explanation = "the points have no common upper bound: the shifted cones do not intersect";
        return r;
    }
    Vec candidate(d);
    for (std::size_t i = 0; i < duals.size(); ++i) {
        lp.set_objective(duals[i].components());
        auto res = lp.minimize();
        // bounded below by alpha_i, feasible by the check above
        candidate = Vec(res.x);
        lp.add_constraint(duals[i].components(), LinearProgram::Sense::Equal, res.objective);
    }

    for (const auto& v : polyhedron_vertices(duals, alpha, d)) {
        if (!cone.contains(v - candidate)) {
            SupResult r;
            r.status = SupStatus::NotExists;
            r.candidate = candidate;
            r.certificate = v;
            r.explanation = "the upper-bound set has vertex " + to_string(v) +
                            " outside candidate + C, so it is not a shifted cone";
            return r;
        }
    }

    std::vector<Scalar> levels;
    for (const auto& b : duals) levels.push_back(dot(b, candidate));
    return exists_result(cone, *linalg::solve_canonical(duals, levels, d));
}

SupResult vsup(const Cone& cone, const std::vector<Vec>& xs, VsupLimits limits) {
    if (cone.kind() == ConeKind::ComponentWise) {
        require_points(xs, cone.dim(), "vsup");
        SupResult r;
        r.status = SupStatus::Unique;
        r.value = vsup_componentwise(xs);
        return r;
    }
    if (!cone.has_duals()) {
        throw Error(ErrorCode::UnsupportedCone, "vsup needs a dual (halfspace) representation of the cone");
    }
    if (cone.duals_linearly_independent()) return vsup_dual_li(cone, xs);
    return vsup_general(cone, xs, limits);
}

bool is_upper_bound(const Cone& cone, const std::vector<Vec>& xs, const Vec& v) {
    for (const auto& x : xs) {
        if (!leq(cone, x, v)) return false;
    }
    return true;
}

}  // namespace robust_vdp
