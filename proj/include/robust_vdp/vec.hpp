#pragma once

#include <cstddef>
#include <initializer_list>
#include <set>
#include <string>
#include <vector>

#include "robust_vdp/rational.hpp"

namespace robust_vdp {

/// A point of R^d with exact rational components.
class Vec {
public:
    Vec() = default;
    explicit Vec(std::size_t dim) : c_(dim) {}
    explicit Vec(std::vector<Scalar> components) : c_(std::move(components)) {}
    Vec(std::initializer_list<Scalar> components) : c_(components) {}

    static Vec zero(std::size_t dim) { return Vec(dim); }
    static Vec unit(std::size_t dim, std::size_t i);
    static Vec ones(std::size_t dim);

    std::size_t dim() const noexcept { return c_.size(); }
    const Scalar& operator[](std::size_t i) const { return c_[i]; }
    Scalar& operator[](std::size_t i) { return c_[i]; }
    const std::vector<Scalar>& components() const noexcept { return c_; }

    bool is_zero() const;

    Vec& operator+=(const Vec& o);
    Vec& operator-=(const Vec& o);
    Vec& operator*=(const Scalar& a);

    friend Vec operator+(Vec a, const Vec& b) { return a += b; }
    friend Vec operator-(Vec a, const Vec& b) { return a -= b; }
    friend Vec operator*(const Scalar& s, Vec a) { return a *= s; }
    friend Vec operator-(Vec a) { return a *= Scalar(-1); }

    friend bool operator==(const Vec& a, const Vec& b) { return a.c_ == b.c_; }
    friend bool operator!=(const Vec& a, const Vec& b) { return !(a == b); }
    /// Lexicographic; only used for canonical ordering and set membership.
    friend bool operator<(const Vec& a, const Vec& b) { return a.c_ < b.c_; }

private:
    std::vector<Scalar> c_;
};

Scalar dot(const Vec& a, const Vec& b);

/// Throws Error(DimensionMismatch) naming `where` when dims differ.
void require_same_dim(const Vec& a, const Vec& b, const char* where);

/// "(5,4)" or "(9/2,5)".
std::string to_string(const Vec& v);
/// "(5,4)" or "(4.5,5)".
std::string to_decimal(const Vec& v, int digits = 6);

/// Finite set of vectors, deduplicated by exact equality, remembering
/// first-insertion order (the order is what emitted reports show).
class VectorSet {
public:
    VectorSet() = default;
    VectorSet(std::initializer_list<Vec> items);
    explicit VectorSet(const std::vector<Vec>& items);

    /// Returns true when `v` was not already present.
    bool insert(const Vec& v);
    bool contains(const Vec& v) const { return index_.count(v) != 0; }

    std::size_t size() const noexcept { return items_.size(); }
    bool empty() const noexcept { return items_.empty(); }
    const std::vector<Vec>& items() const noexcept { return items_; }
    auto begin() const { return items_.begin(); }
    auto end() const { return items_.end(); }
    const Vec& operator[](std::size_t i) const { return items_[i]; }

    /// Set equality, ignoring insertion order.
    friend bool operator==(const VectorSet& a, const VectorSet& b) { return a.index_ == b.index_; }
    friend bool operator!=(const VectorSet& a, const VectorSet& b) { return !(a == b); }

private:
    std::vector<Vec> items_;
    std::set<Vec> index_;
};

/// "{(5,4), (9/2,5)}"; the empty set renders as "∅".
std::string to_string(const VectorSet& s);
std::string to_decimal(const VectorSet& s, int digits = 6);

}  // namespace robust_vdp
