#include "robust_vdp/linalg.hpp"

#include "robust_vdp/error.hpp"

namespace robust_vdp::linalg {

namespace {

// Gauss-Jordan on a dense copy; `cols` is the number of coefficient columns,
// any extra columns (augmentation) are carried along but never pivoted on.
std::vector<std::size_t> gauss_jordan(std::vector<std::vector<Scalar>>& a, std::size_t cols) {
    std::vector<std::size_t> pivots;
    std::size_t row = 0;
    for (std::size_t col = 0; col < cols && row < a.size(); ++col) {
        std::size_t sel = row;
        while (sel < a.size() && a[sel][col] == 0) ++sel;
        if (sel == a.size()) continue;
        std::swap(a[row], a[sel]);
        Scalar inv = 1 / a[row][col];
        for (auto& x : a[row]) x *= inv;
        for (std::size_t r = 0; r < a.size(); ++r) {
            if (r == row || a[r][col] == 0) continue;
            Scalar f = a[r][col];
            for (std::size_t c = 0; c < a[r].size(); ++c) a[r][c] -= f * a[row][c];
        }
        pivots.push_back(col);
        ++row;
    }
    return pivots;
}

std::vector<std::vector<Scalar>> dense(const Matrix& rows, std::size_t cols) {
    std::vector<std::vector<Scalar>> a;
    a.reserve(rows.size());
    for (const auto& r : rows) {
        if (r.dim() != cols) {
            throw Error(ErrorCode::DimensionMismatch, "matrix row of dimension " + std::to_string(r.dim()) +
                                                          ", expected " + std::to_string(cols));
        }
        a.push_back(r.components());
    }
    return a;
}

}  // namespace

Echelon row_reduce(const Matrix& rows, std::size_t cols) {
    auto a = dense(rows, cols);
    auto pivots = gauss_jordan(a, cols);
    Echelon e;
    e.pivot_cols = pivots;
    for (std::size_t r = 0; r < pivots.size(); ++r) e.rref.emplace_back(a[r]);
    return e;
}

std::size_t rank(const Matrix& rows, std::size_t cols) {
    return row_reduce(rows, cols).pivot_cols.size();
}

bool linearly_independent(const Matrix& rows, std::size_t cols) {
    return rank(rows, cols) == rows.size();
}

std::vector<std::size_t> row_basis(const Matrix& rows, std::size_t cols) {
    std::vector<std::size_t> basis;
    Matrix chosen;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        chosen.push_back(rows[i]);
        if (rank(chosen, cols) == chosen.size()) {
            basis.push_back(i);
        } else {
            chosen.pop_back();
        }
    }
    return basis;
}

std::vector<Vec> null_space(const Matrix& rows, std::size_t cols) {
    Echelon e = row_reduce(rows, cols);
    std::vector<bool> is_pivot(cols, false);
    for (auto c : e.pivot_cols) is_pivot[c] = true;
    std::vector<Vec> basis;
    for (std::size_t free = 0; free < cols; ++free) {
        if (is_pivot[free]) continue;
        Vec v(cols);
        v[free] = 1;
        for (std::size_t r = 0; r < e.pivot_cols.size(); ++r) v[e.pivot_cols[r]] = -e.rref[r][free];
        basis.push_back(std::move(v));
    }
    return basis;
}

std::optional<Vec> solve_canonical(const Matrix& rows, const std::vector<Scalar>& rhs, std::size_t cols) {
    if (rhs.size() != rows.size()) {
        throw Error(ErrorCode::DimensionMismatch, "right-hand side length does not match row count");
    }
    auto a = dense(rows, cols);
    for (std::size_t r = 0; r < a.size(); ++r) a[r].push_back(rhs[r]);
    auto pivots = gauss_jordan(a, cols);
    for (std::size_t r = pivots.size(); r < a.size(); ++r) {
        if (a[r][cols] != 0) return std::nullopt;
    }
    Vec x(cols);
    for (std::size_t r = 0; r < pivots.size(); ++r) x[pivots[r]] = a[r][cols];
    return x;
}

}  // namespace robust_vdp::linalg
