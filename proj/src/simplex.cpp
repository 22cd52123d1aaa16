#include "robust_vdp/simplex.hpp"

#include <optional>

#include "robust_vdp/error.hpp"

namespace robust_vdp {

namespace {

struct Tableau {
    std::vector<std::vector<Scalar>> a;  // m rows x (n + 1); last column is the rhs
    std::vector<std::size_t> basis;
    std::size_t n = 0;

    void pivot(std::size_t r, std::size_t c) {
        Scalar inv = 1 / a[r][c];
        for (auto& x : a[r]) x *= inv;
        for (std::size_t i = 0; i < a.size(); ++i) {
            if (i == r || a[i][c] == 0) continue;
            Scalar f = a[i][c];
            for (std::size_t j = 0; j <= n; ++j) a[i][j] -= f * a[r][j];
        }
        basis[r] = c;
    }

    // Minimizes cost over columns flagged in `allowed`, from the current feasible basis.
    LpStatus run(const std::vector<Scalar>& cost, const std::vector<bool>& allowed) {
        for (;;) {
            std::optional<std::size_t> entering;
            for (std::size_t j = 0; j < n && !entering; ++j) {
                if (!allowed[j]) continue;
                Scalar rc = cost[j];
                for (std::size_t i = 0; i < a.size(); ++i) rc -= cost[basis[i]] * a[i][j];
                if (rc < 0) entering = j;
            }
            if (!entering) return LpStatus::Optimal;
            std::size_t c = *entering;

            std::optional<std::size_t> leaving;
            Scalar best;
            for (std::size_t i = 0; i < a.size(); ++i) {
                if (a[i][c] <= 0) continue;
                Scalar ratio = a[i][n] / a[i][c];
                if (!leaving || ratio < best || (ratio == best && basis[i] < basis[*leaving])) {
                    leaving = i;
                    best = ratio;
                }
            }
            if (!leaving) return LpStatus::Unbounded;
            pivot(*leaving, c);
        }
    }

    Scalar value(const std::vector<Scalar>& cost) const {
        Scalar v = 0;
        for (std::size_t i = 0; i < a.size(); ++i) v += cost[basis[i]] * a[i][n];
        return v;
    }
};

}  // namespace

std::size_t LinearProgram::add_variable(bool free) {
    free_.push_back(free);
    return free_.size() - 1;
}

std::size_t LinearProgram::add_variables(std::size_t count, bool free) {
    std::size_t first = free_.size();
    for (std::size_t i = 0; i < count; ++i) free_.push_back(free);
    return first;
}

void LinearProgram::add_constraint(std::vector<Scalar> coeffs, Sense sense, Scalar rhs) {
    if (coeffs.size() > free_.size()) {
        throw Error(ErrorCode::InvalidArgument, "constraint has more coefficients than variables");
    }
    rows_.push_back(Row{std::move(coeffs), sense, std::move(rhs)});
}

void LinearProgram::set_objective(std::vector<Scalar> cost) {
    if (cost.size() > free_.size()) {
        throw Error(ErrorCode::InvalidArgument, "objective has more coefficients than variables");
    }
    cost_ = std::move(cost);
}

LpResult LinearProgram::minimize() const { return solve(true); }
LpResult LinearProgram::find_feasible() const { return solve(false); }

LpResult LinearProgram::solve(bool with_objective) const {
    const std::size_t nv = free_.size();
    // Column layout: split user variables, then one slack per inequality, then artificials.
    std::vector<std::size_t> pos_col(nv), neg_col(nv, SIZE_MAX);
    std::size_t n_struct = 0;
    for (std::size_t v = 0; v < nv; ++v) {
        pos_col[v] = n_struct++;
        if (free_[v]) neg_col[v] = n_struct++;
    }
    std::size_t n_slack = 0;
    for (const auto& r : rows_) n_slack += r.sense != Sense::Equal;
    const std::size_t m = rows_.size();
    const std::size_t n_art_start = n_struct + n_slack;

    Tableau t;
    t.n = n_art_start + m;
    t.a.assign(m, std::vector<Scalar>(t.n + 1));
    t.basis.resize(m);
    std::size_t slack = n_struct;
    for (std::size_t i = 0; i < m; ++i) {
        const auto& row = rows_[i];
        auto& a = t.a[i];
        for (std::size_t v = 0; v < row.coeffs.size(); ++v) {
            a[pos_col[v]] = row.coeffs[v];
            if (neg_col[v] != SIZE_MAX) a[neg_col[v]] = -row.coeffs[v];
        }
        if (row.sense == Sense::LessEq) a[slack++] = 1;
        if (row.sense == Sense::GreaterEq) a[slack++] = -1;
        a[t.n] = row.rhs;
        if (a[t.n] < 0) {
            for (auto& x : a) x = -x;
        }
        a[n_art_start + i] = 1;
        t.basis[i] = n_art_start + i;
    }

    // Phase 1: minimize the sum of artificials.
    std::vector<Scalar> phase1(t.n, 0);
    for (std::size_t j = n_art_start; j < t.n; ++j) phase1[j] = 1;
    std::vector<bool> all(t.n, true);
    t.run(phase1, all);
    LpResult result;
    if (t.value(phase1) != 0) {
        result.status = LpStatus::Infeasible;
        return result;
    }

    // Drive remaining (zero-valued) artificials out of the basis; drop redundant rows.
    for (std::size_t i = 0; i < t.a.size();) {
        if (t.basis[i] < n_art_start) {
            ++i;
            continue;
        }
        std::optional<std::size_t> col;
        for (std::size_t j = 0; j < n_art_start && !col; ++j) {
            if (t.a[i][j] != 0) col = j;
        }
        if (col) {
            t.pivot(i, *col);
            ++i;
        } else {
            t.a.erase(t.a.begin() + static_cast<std::ptrdiff_t>(i));
            t.basis.erase(t.basis.begin() + static_cast<std::ptrdiff_t>(i));
        }
    }

    std::vector<bool> structural(t.n, false);
    for (std::size_t j = 0; j < n_art_start; ++j) structural[j] = true;
    std::vector<Scalar> phase2(t.n, 0);
    if (with_objective) {
        for (std::size_t v = 0; v < cost_.size(); ++v) {
            phase2[pos_col[v]] = cost_[v];
            if (neg_col[v] != SIZE_MAX) phase2[neg_col[v]] = -cost_[v];
        }
        if (t.run(phase2, structural) == LpStatus::Unbounded) {
            result.status = LpStatus::Unbounded;
            return result;
        }
    }

    std::vector<Scalar> col_value(t.n, 0);
    for (std::size_t i = 0; i < t.a.size(); ++i) col_value[t.basis[i]] = t.a[i][t.n];
    result.status = LpStatus::Optimal;
    result.x.resize(nv);
    for (std::size_t v = 0; v < nv; ++v) {
        result.x[v] = col_value[pos_col[v]];
        if (neg_col[v] != SIZE_MAX) result.x[v] -= col_value[neg_col[v]];
    }
    result.objective = 0;
    for (std::size_t v = 0; v < cost_.size(); ++v) result.objective += cost_[v] * result.x[v];
    return result;
}

}  // namespace robust_vdp
