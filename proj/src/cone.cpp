#include "robust_vdp/cone.hpp"

#include "robust_vdp/error.hpp"
#include "robust_vdp/linalg.hpp"
#include "robust_vdp/simplex.hpp"

namespace robust_vdp {

std::string to_string(ConeKind kind) {
    switch (kind) {
        case ConeKind::ComponentWise: return "componentwise";
        case ConeKind::Halfspace: return "halfspace";
        case ConeKind::PolyhedralDual: return "dual";
        case ConeKind::PolyhedralGenerators: return "generators";
    }
    return "unknown";
}

void Cone::check_dims(const std::vector<Vec>& vs, const char* what) {
    for (const auto& v : vs) {
        if (v.dim() != dim_) {
            throw Error(ErrorCode::DimensionMismatch, std::string(what) + " of dimension " + std::to_string(v.dim()) +
                                                          " in a cone of dimension " + std::to_string(dim_));
        }
    }
}

Cone Cone::componentwise(std::size_t dim) {
    if (dim == 0) throw Error(ErrorCode::InvalidArgument, "cone dimension must be at least 1");
    Cone c;
    c.kind_ = ConeKind::ComponentWise;
    c.dim_ = dim;
    std::vector<Vec> basis;
    for (std::size_t i = 0; i < dim; ++i) basis.push_back(Vec::unit(dim, i));
    c.generators_ = basis;
    c.duals_ = basis;
    c.duals_li_ = true;
    return c;
}

Cone Cone::halfspace(Vec w) {
    if (w.dim() == 0) throw Error(ErrorCode::InvalidArgument, "cone dimension must be at least 1");
    if (w.is_zero()) throw Error(ErrorCode::InvalidArgument, "halfspace normal must be nonzero");
    Cone c;
    c.kind_ = ConeKind::Halfspace;
    c.dim_ = w.dim();
    c.duals_ = std::vector<Vec>{std::move(w)};
    c.duals_li_ = true;
    return c;
}

Cone Cone::from_duals(std::vector<Vec> duals) {
    if (duals.empty()) throw Error(ErrorCode::InvalidArgument, "dual cone description needs at least one vector");
    Cone c;
    c.kind_ = ConeKind::PolyhedralDual;
    c.dim_ = duals.front().dim();
    if (c.dim_ == 0) throw Error(ErrorCode::InvalidArgument, "cone dimension must be at least 1");
    c.check_dims(duals, "dual generator");
    c.duals_li_ = linalg::linearly_independent(duals, c.dim_);
    c.duals_ = std::move(duals);
    return c;
}

Cone Cone::from_generators(std::vector<Vec> generators, std::optional<std::vector<Vec>> duals) {
    Cone c;
    c.kind_ = ConeKind::PolyhedralGenerators;
    if (!generators.empty()) {
        c.dim_ = generators.front().dim();
    } else if (duals && !duals->empty()) {
        c.dim_ = duals->front().dim();
    }
    if (c.dim_ == 0) throw Error(ErrorCode::InvalidArgument, "cannot infer cone dimension from an empty description");
    c.check_dims(generators, "generator");
    if (duals) {
        c.check_dims(*duals, "dual generator");
        if (auto why = representation_mismatch(generators, *duals)) {
            throw Error(ErrorCode::InconsistentCone, "generator and dual representations disagree: " + *why);
        }
        c.duals_li_ = linalg::linearly_independent(*duals, c.dim_);
    }
    c.generators_ = std::move(generators);
    c.duals_ = std::move(duals);
    return c;
}

const std::vector<Vec>& Cone::generators() const {
    if (!generators_) throw Error(ErrorCode::MissingRepresentation, "cone has no generator representation");
    return *generators_;
}

const std::vector<Vec>& Cone::duals() const {
    if (!duals_) throw Error(ErrorCode::MissingRepresentation, "cone has no dual (halfspace) representation");
    return *duals_;
}

const Vec& Cone::normal() const {
    if (kind_ != ConeKind::Halfspace) throw Error(ErrorCode::InvalidArgument, "cone is not a halfspace");
    return duals_->front();
}

bool Cone::contains_by_duals(const Vec& x) const {
    for (const auto& b : duals()) {
        if (dot(b, x) < 0) return false;
    }
    return true;
}

bool Cone::contains_by_generators(const Vec& x) const {
    const auto& g = generators();
    if (x.dim() != dim_) {
        throw Error(ErrorCode::DimensionMismatch, "point of dimension " + std::to_string(x.dim()) +
                                                      " tested against a cone of dimension " + std::to_string(dim_));
    }
    if (x.is_zero()) return true;
    if (g.empty()) return false;
    LinearProgram lp;
    lp.add_variables(g.size());
    for (std::size_t i = 0; i < dim_; ++i) {
        std::vector<Scalar> row(g.size());
        for (std::size_t j = 0; j < g.size(); ++j) row[j] = g[j][i];
        lp.add_constraint(std::move(row), LinearProgram::Sense::Equal, x[i]);
    }
    return lp.find_feasible().status == LpStatus::Optimal;
}

bool Cone::contains(const Vec& x) const {
    if (x.dim() != dim_) {
        throw Error(ErrorCode::DimensionMismatch, "point of dimension " + std::to_string(x.dim()) +
                                                      " tested against a cone of dimension " + std::to_string(dim_));
    }
    if (duals_) return contains_by_duals(x);
    return contains_by_generators(x);
}

namespace {

// lambda >= 0, sum lambda = 1, G lambda = 0 over the nonzero generators.
std::optional<std::vector<Scalar>> positive_dependence(const std::vector<Vec>& g, std::size_t dim) {
    if (g.empty()) return std::nullopt;
    LinearProgram lp;
    lp.add_variables(g.size());
    for (std::size_t i = 0; i < dim; ++i) {
        std::vector<Scalar> row(g.size());
        for (std::size_t j = 0; j < g.size(); ++j) row[j] = g[j][i];
        lp.add_constraint(std::move(row), LinearProgram::Sense::Equal, 0);
    }
    lp.add_constraint(std::vector<Scalar>(g.size(), 1), LinearProgram::Sense::Equal, 1);
    auto res = lp.find_feasible();
    if (res.status != LpStatus::Optimal) return std::nullopt;
    return res.x;
}

std::vector<Vec> nonzero(const std::vector<Vec>& vs) {
    std::vector<Vec> out;
    for (const auto& v : vs) {
        if (!v.is_zero()) out.push_back(v);
    }
    return out;
}

}  // namespace

std::optional<Vec> Cone::lineality_witness() const {
    if (duals_) {
        auto ns = linalg::null_space(*duals_, dim_);
        if (ns.empty()) return std::nullopt;
        return ns.front();
    }
    auto g = nonzero(generators());
    auto lambda = positive_dependence(g, dim_);
    if (!lambda) return std::nullopt;
    for (std::size_t j = 0; j < g.size(); ++j) {
        if ((*lambda)[j] > 0) return g[j];
    }
    return std::nullopt;
}

bool Cone::is_pointed() const { return !lineality_witness().has_value(); }

bool Cone::is_solid() const {
    if (duals_) {
        LinearProgram lp;
        lp.add_variables(dim_, /*free=*/true);
        for (const auto& b : *duals_) lp.add_constraint(b.components(), LinearProgram::Sense::GreaterEq, 1);
        return lp.find_feasible().status == LpStatus::Optimal;
    }
    return linalg::rank(generators(), dim_) == dim_;
}

bool operator==(const Cone& a, const Cone& b) {
    return a.kind_ == b.kind_ && a.dim_ == b.dim_ && a.generators_ == b.generators_ && a.duals_ == b.duals_;
}

bool leq(const Cone& cone, const Vec& x, const Vec& y) {
    require_same_dim(x, y, "leq");
    return cone.contains(y - x);
}

std::optional<Vec> precurly_violation(const Cone& cone, const VectorSet& a, const VectorSet& b) {
    for (const auto& y : b) {
        bool covered = false;
        for (const auto& x : a) {
            if (leq(cone, x, y)) {
                covered = true;
                break;
            }
        }
        if (!covered) return y;
    }
    return std::nullopt;
}

std::optional<Vec> curlyprec_violation(const Cone& cone, const VectorSet& a, const VectorSet& b) {
    for (const auto& x : a) {
        bool covered = false;
        for (const auto& y : b) {
            if (leq(cone, x, y)) {
                covered = true;
                break;
            }
        }
        if (!covered) return x;
    }
    return std::nullopt;
}

bool set_precurly(const Cone& cone, const VectorSet& a, const VectorSet& b) {
    return !precurly_violation(cone, a, b).has_value();
}

bool set_curlyprec(const Cone& cone, const VectorSet& a, const VectorSet& b) {
    return !curlyprec_violation(cone, a, b).has_value();
}

std::optional<std::string> representation_mismatch(const std::vector<Vec>& generators, const std::vector<Vec>& duals) {
    if (generators.empty() || duals.empty()) return std::nullopt;
    const std::size_t dim = generators.front().dim();
    for (std::size_t j = 0; j < generators.size(); ++j) {
        for (std::size_t i = 0; i < duals.size(); ++i) {
            if (dot(duals[i], generators[j]) < 0) {
                return "generator " + to_string(generators[j]) + " violates dual " + to_string(duals[i]);
            }
        }
    }
    for (const auto& b : duals) {
        bool tight = false;
        for (const auto& g : generators) {
            if (!g.is_zero() && dot(b, g) == 0) tight = true;
        }
        if (!tight) return "dual " + to_string(b) + " is not tight on any generator";
    }
    if (dim > 4) return std::nullopt;

    Cone by_gen = Cone::from_generators(generators);
    std::size_t count = 1;
    for (std::size_t i = 0; i < dim; ++i) count *= 3;
    for (std::size_t code = 0; code < count; ++code) {
        Vec x(dim);
        std::size_t rest = code;
        for (std::size_t i = 0; i < dim; ++i) {
            x[i] = static_cast<long>(rest % 3) - 1;
            rest /= 3;
        }
        bool in_duals = true;
        for (const auto& b : duals) in_duals = in_duals && dot(b, x) >= 0;
        if (in_duals != by_gen.contains_by_generators(x)) {
            return "sample point " + to_string(x) + " is classified differently by the two representations";
        }
    }
    return std::nullopt;
}

}  // namespace robust_vdp
