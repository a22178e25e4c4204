#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include <boost/multiprecision/cpp_int.hpp>

namespace stripes {

/// Exact arbitrary-precision rational. Always kept in lowest terms with a
/// positive denominator.
using Rational = boost::multiprecision::cpp_rational;

/// Canonical text form: "p" for integers, "p/q" otherwise.
std::string to_string(const Rational& r);

/// Parses "p", "-p", "+p", "p/q". Returns nullopt on malformed input or a
/// zero denominator.
std::optional<Rational> parse_rational(std::string_view text);

/// r^n for any integer n; r must be nonzero when n < 0.
Rational pow(const Rational& r, std::int64_t n);

/// A rational extended by -inf and +inf.
class ExtendedRational {
public:
    enum class Kind : std::uint8_t { NegInf, Finite, PosInf };

    ExtendedRational() = default;
    ExtendedRational(Rational value) : kind_(Kind::Finite), value_(std::move(value)) {}
    ExtendedRational(int value) : kind_(Kind::Finite), value_(value) {}

    static ExtendedRational neg_inf() { return ExtendedRational(Kind::NegInf); }
    static ExtendedRational pos_inf() { return ExtendedRational(Kind::PosInf); }

    Kind kind() const { return kind_; }
    bool is_finite() const { return kind_ == Kind::Finite; }
    /// Precondition: is_finite().
    const Rational& value() const { return value_; }

    friend bool operator==(const ExtendedRational& a, const ExtendedRational& b) {
        return a.kind_ == b.kind_ && (a.kind_ != Kind::Finite || a.value_ == b.value_);
    }
    friend std::strong_ordering operator<=>(const ExtendedRational& a,
                                            const ExtendedRational& b) {
        if (a.kind_ != b.kind_) return a.kind_ <=> b.kind_;
        if (a.kind_ != Kind::Finite) return std::strong_ordering::equal;
        if (a.value_ < b.value_) return std::strong_ordering::less;
        if (b.value_ < a.value_) return std::strong_ordering::greater;
        return std::strong_ordering::equal;
    }

private:
    explicit ExtendedRational(Kind kind) : kind_(kind) {}

    Kind kind_ = Kind::Finite;
    Rational value_{0};
};

/// "-inf", "+inf" or the canonical rational.
std::string to_string(const ExtendedRational& r);

}  // namespace stripes
