#include "robust_vdp/rational.hpp"

#include <cctype>

#include "robust_vdp/error.hpp"

namespace robust_vdp {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::MissingRepresentation: return "MissingRepresentation";
        case ErrorCode::InconsistentCone: return "InconsistentCone";
        case ErrorCode::DualNotLI: return "DualNotLI";
        case ErrorCode::UnsupportedCone: return "UnsupportedCone";
        case ErrorCode::DeskScaleExceeded: return "DeskScaleExceeded";
        case ErrorCode::SupNotExists: return "SupNotExists";
        case ErrorCode::Validation: return "Validation";
        case ErrorCode::Syntax: return "Syntax";
    }
    return "Unknown";
}

namespace {

bool all_digits(std::string_view s) {
    if (s.empty()) return false;
    for (char ch : s) {
        if (!std::isdigit(static_cast<unsigned char>(ch))) return false;
    }
    return true;
}

[[noreturn]] void bad_scalar(std::string_view text) {
    throw Error(ErrorCode::InvalidArgument,
                "not an exact rational: \"" + std::string(text) + "\" (expected \"p/q\", integer or decimal)");
}

}  // namespace

Scalar parse_scalar(std::string_view text) {
    std::string_view body = text;
    bool negative = false;
    if (!body.empty() && (body.front() == '-' || body.front() == '+')) {
        negative = body.front() == '-';
        body.remove_prefix(1);
    }

    Scalar value;
    if (auto slash = body.find('/'); slash != std::string_view::npos) {
        auto num = body.substr(0, slash);
        auto den = body.substr(slash + 1);
        if (!all_digits(num) || !all_digits(den)) bad_scalar(text);
        mpz_class n(std::string(num), 10);
        mpz_class d(std::string(den), 10);
        if (d == 0) bad_scalar(text);
        value = Scalar(n, d);
    } else if (auto dot = body.find('.'); dot != std::string_view::npos) {
        auto whole = body.substr(0, dot);
        auto frac = body.substr(dot + 1);
        if ((!whole.empty() && !all_digits(whole)) || !all_digits(frac)) bad_scalar(text);
        mpz_class n(std::string(whole.empty() ? "0" : whole) + std::string(frac), 10);
        mpz_class d;
        mpz_ui_pow_ui(d.get_mpz_t(), 10, frac.size());
        value = Scalar(n, d);
    } else {
        if (!all_digits(body)) bad_scalar(text);
        value = Scalar(mpz_class(std::string(body), 10));
    }
    value.canonicalize();
    return negative ? Scalar(-value) : value;
}

std::string to_string(const Scalar& x) {
    if (x.get_den() == 1) return x.get_num().get_str();
    return x.get_num().get_str() + "/" + x.get_den().get_str();
}

std::string to_decimal(const Scalar& x, int digits) {
    mpz_class scale;
    mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(digits));
    mpz_class num = abs(x.get_num()) * scale;
    mpz_class den = x.get_den();
    // round half away from zero
    mpz_class q = (2 * num + den) / (2 * den);
    std::string s = q.get_str();
    if (digits > 0) {
        if (s.size() <= static_cast<std::size_t>(digits)) {
            s.insert(0, static_cast<std::size_t>(digits) + 1 - s.size(), '0');
        }
        s.insert(s.size() - static_cast<std::size_t>(digits), ".");
        while (s.back() == '0') s.pop_back();
        if (s.back() == '.') s.pop_back();
    }
    if (x < 0 && s != "0") s.insert(0, "-");
    return s;
}

}  // namespace robust_vdp
