#include "stripes/rational.hpp"

#include <cctype>

namespace stripes {

using boost::multiprecision::cpp_int;

std::string to_string(const Rational& r) {
    const cpp_int num = boost::multiprecision::numerator(r);
    const cpp_int den = boost::multiprecision::denominator(r);
    if (den == 1) return num.str();
    return num.str() + "/" + den.str();
}

std::string to_string(const ExtendedRational& r) {
    switch (r.kind()) {
        case ExtendedRational::Kind::NegInf: return "-inf";
        case ExtendedRational::Kind::PosInf: return "+inf";
        case ExtendedRational::Kind::Finite: break;
    }
    return to_string(r.value());
}

namespace {

bool all_digits(std::string_view s) {
    if (s.empty()) return false;
    for (char c : s) {
        if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    }
    return true;
}

}  // namespace

std::optional<Rational> parse_rational(std::string_view text) {
    bool negative = false;
    if (!text.empty() && (text.front() == '-' || text.front() == '+')) {
        negative = text.front() == '-';
        text.remove_prefix(1);
    }
    const auto slash = text.find('/');
    const std::string_view num_text = text.substr(0, slash);
    const std::string_view den_text =
        slash == std::string_view::npos ? std::string_view{"1"} : text.substr(slash + 1);
    if (!all_digits(num_text) || !all_digits(den_text)) return std::nullopt;

    const cpp_int num{std::string(num_text)};
    const cpp_int den{std::string(den_text)};
    if (den == 0) return std::nullopt;
    Rational r(num, den);
    return negative ? Rational(-r) : r;
}

Rational pow(const Rational& r, std::int64_t n) {
    Rational base = n < 0 ? Rational(1 / r) : r;
    // Negating INT64_MIN is undefined; callers never get near it, but stay safe.
    std::uint64_t e = n < 0 ? std::uint64_t(0) - static_cast<std::uint64_t>(n)
                            : static_cast<std::uint64_t>(n);
    Rational result{1};
    while (e != 0) {
        if (e & 1U) result *= base;
        e >>= 1U;
        if (e != 0) base *= base;
    }
    return result;
}

}  // namespace stripes
