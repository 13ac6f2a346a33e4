#pragma once

#include <compare>
#include <cstdint>
#include <ostream>
#include <string>
#include <string_view>

namespace apportion {

__extension__ typedef __int128 int128;
__extension__ typedef unsigned __int128 uint128;

/// Exact rational number with 64-bit numerator and denominator.
///
/// Always kept in lowest terms with a positive denominator. Every arithmetic
/// operation is carried out in 128-bit intermediates; a result that does not
/// fit back into 64 bits throws std::overflow_error instead of wrapping.
class Rational {
public:
    constexpr Rational() = default;
    constexpr Rational(std::int64_t value) : num_(value) {}  // NOLINT: implicit by design of integer literals
    Rational(std::int64_t numerator, std::int64_t denominator);

    /// Accepts "7", "-3/4", "0.125" and "1.5". Decimals are converted
    /// exactly (0.1 is 1/10, never a binary approximation).
    static Rational parse(std::string_view text);

    constexpr std::int64_t num() const { return num_; }
    constexpr std::int64_t den() const { return den_; }

    constexpr bool is_integer() const { return den_ == 1; }
    std::int64_t floor() const;
    std::int64_t ceil() const;
    /// x - floor(x), in [0, 1).
    Rational fractional_part() const;

    double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }

    /// Canonical "num/den" form; integers print as "n/1".
    std::string to_string() const;

    Rational operator-() const;
    Rational& operator+=(const Rational& rhs);
    Rational& operator-=(const Rational& rhs);
    Rational& operator*=(const Rational& rhs);
    Rational& operator/=(const Rational& rhs);

    friend Rational operator+(Rational lhs, const Rational& rhs) { return lhs += rhs; }
    friend Rational operator-(Rational lhs, const Rational& rhs) { return lhs -= rhs; }
    friend Rational operator*(Rational lhs, const Rational& rhs) { return lhs *= rhs; }
    friend Rational operator/(Rational lhs, const Rational& rhs) { return lhs /= rhs; }

    friend constexpr bool operator==(const Rational&, const Rational&) = default;
    friend std::strong_ordering operator<=>(const Rational& lhs, const Rational& rhs);

    friend std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.to_string(); }

private:
    static Rational from_wide(int128 numerator, int128 denominator);

    std::int64_t num_ = 0;
    std::int64_t den_ = 1;
};

/// Least common multiple, throwing std::overflow_error past 2^62.
std::int64_t checked_lcm(std::int64_t a, std::int64_t b);

}  // namespace apportion
