#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "robust_vdp/vec.hpp"

namespace robust_vdp::linalg {

/// Row-major matrix; every row has the same dimension.
using Matrix = std::vector<Vec>;

struct Echelon {
    Matrix rref;                          // reduced rows, zero rows dropped
    std::vector<std::size_t> pivot_cols;  // ascending
};

Echelon row_reduce(const Matrix& rows, std::size_t cols);
std::size_t rank(const Matrix& rows, std::size_t cols);
bool linearly_independent(const Matrix& rows, std::size_t cols);

/// Indices of the first linearly independent rows, scanning in order.
std::vector<std::size_t> row_basis(const Matrix& rows, std::size_t cols);

/// Basis of {x : rows * x = 0}: one vector per free column, that column set to 1.
std::vector<Vec> null_space(const Matrix& rows, std::size_t cols);

/// Solves rows * x = rhs. Pivots on the leftmost linearly independent columns
/// and sets every free coordinate to zero, so the answer is deterministic.
/// Returns nullopt when the system is inconsistent.
std::optional<Vec> solve_canonical(const Matrix& rows, const std::vector<Scalar>& rhs, std::size_t cols);

}  // namespace robust_vdp::linalg
