#include "robust_vdp/vec.hpp"

#include "robust_vdp/error.hpp"

namespace robust_vdp {

Vec Vec::unit(std::size_t dim, std::size_t i) {
    Vec v(dim);
    v[i] = 1;
    return v;
}

Vec Vec::ones(std::size_t dim) {
    Vec v(dim);
    for (auto& x : v.c_) x = 1;
    return v;
}

bool Vec::is_zero() const {
    for (const auto& x : c_) {
        if (x != 0) return false;
    }
    return true;
}

Vec& Vec::operator+=(const Vec& o) {
    require_same_dim(*this, o, "vector addition");
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
    return *this;
}

Vec& Vec::operator-=(const Vec& o) {
    require_same_dim(*this, o, "vector subtraction");
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
    return *this;
}

Vec& Vec::operator*=(const Scalar& a) {
    for (auto& x : c_) x *= a;
    return *this;
}

Scalar dot(const Vec& a, const Vec& b) {
    require_same_dim(a, b, "inner product");
    Scalar s = 0;
    for (std::size_t i = 0; i < a.dim(); ++i) s += a[i] * b[i];
    return s;
}

void require_same_dim(const Vec& a, const Vec& b, const char* where) {
    if (a.dim() != b.dim()) {
        throw Error(ErrorCode::DimensionMismatch, std::string(where) + ": dimension " + std::to_string(a.dim()) +
                                                      " vs " + std::to_string(b.dim()));
    }
}

std::string to_string(const Vec& v) {
    std::string out = "(";
    for (std::size_t i = 0; i < v.dim(); ++i) {
        if (i) out += ",";
        out += to_string(v[i]);
    }
    return out + ")";
}

std::string to_decimal(const Vec& v, int digits) {
    std::string out = "(";
    for (std::size_t i = 0; i < v.dim(); ++i) {
        if (i) out += ",";
        out += to_decimal(v[i], digits);
    }
    return out + ")";
}

VectorSet::VectorSet(std::initializer_list<Vec> items) {
    for (const auto& v : items) insert(v);
}

VectorSet::VectorSet(const std::vector<Vec>& items) {
    for (const auto& v : items) insert(v);
}

bool VectorSet::insert(const Vec& v) {
    if (!items_.empty()) require_same_dim(items_.front(), v, "VectorSet::insert");
    if (!index_.insert(v).second) return false;
    items_.push_back(v);
    return true;
}

std::string to_string(const VectorSet& s) {
    if (s.empty()) return "∅";
    std::string out = "{";
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (i) out += ", ";
        out += to_string(s[i]);
    }
    return out + "}";
}

std::string to_decimal(const VectorSet& s, int digits) {
    if (s.empty()) return "∅";
    std::string out = "{";
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (i) out += ", ";
        out += to_decimal(s[i], digits);
    }
    return out + "}";
}

}  // namespace robust_vdp
