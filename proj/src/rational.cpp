#include "apportion/rational.hpp"

#include <charconv>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace apportion {
namespace {

int128 gcd_wide(int128 a, int128 b) {
    if (a < 0) a = -a;
    if (b < 0) b = -b;
    while (b != 0) {
        int128 t = a % b;
        a = b;
        b = t;
    }
    return a;
}

bool fits64(int128 v) {
    return v >= std::numeric_limits<std::int64_t>::min() && v <= std::numeric_limits<std::int64_t>::max();
}

std::int64_t parse_int(std::string_view text, std::string_view whole) {
    std::int64_t value = 0;
    if (text.empty()) throw std::invalid_argument("malformed number '" + std::string(whole) + "'");
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec == std::errc::result_out_of_range)
        throw std::overflow_error("number '" + std::string(whole) + "' does not fit in 64 bits");
    if (ec != std::errc{} || ptr != text.data() + text.size())
        throw std::invalid_argument("malformed number '" + std::string(whole) + "'");
    return value;
}

}  // namespace

Rational::Rational(std::int64_t numerator, std::int64_t denominator) {
    if (denominator == 0) throw std::invalid_argument("rational with zero denominator");
    *this = from_wide(numerator, denominator);
}

Rational Rational::from_wide(int128 numerator, int128 denominator) {
    if (denominator == 0) throw std::domain_error("division by zero");
    if (denominator < 0) {
        numerator = -numerator;
        denominator = -denominator;
    }
    int128 g = gcd_wide(numerator, denominator);
    if (g > 1) {
        numerator /= g;
        denominator /= g;
    }
    if (!fits64(numerator) || !fits64(denominator)) throw std::overflow_error("rational arithmetic overflow");
    Rational r;
    r.num_ = static_cast<std::int64_t>(numerator);
    r.den_ = static_cast<std::int64_t>(denominator);
    return r;
}

Rational Rational::parse(std::string_view text) {
    std::string_view s = text;
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
    if (s.empty()) throw std::invalid_argument("empty number");

    if (auto slash = s.find('/'); slash != std::string_view::npos) {
        std::int64_t n = parse_int(s.substr(0, slash), text);
        std::int64_t d = parse_int(s.substr(slash + 1), text);
        if (d == 0) throw std::invalid_argument("zero denominator in '" + std::string(text) + "'");
        return Rational(n, d);
    }
    if (auto dot = s.find('.'); dot != std::string_view::npos) {
        std::string_view int_part = s.substr(0, dot);
        std::string_view frac_part = s.substr(dot + 1);
        bool negative = !int_part.empty() && int_part.front() == '-';
        if (negative || (!int_part.empty() && int_part.front() == '+')) int_part.remove_prefix(1);
        if (frac_part.empty() && int_part.empty()) throw std::invalid_argument("malformed number '" + std::string(text) + "'");
        for (char c : frac_part)
            if (c < '0' || c > '9') throw std::invalid_argument("malformed number '" + std::string(text) + "'");
        if (frac_part.size() > 18) throw std::overflow_error("too many decimal digits in '" + std::string(text) + "'");
        std::int64_t whole = int_part.empty() ? 0 : parse_int(int_part, text);
        if (whole < 0) throw std::invalid_argument("malformed number '" + std::string(text) + "'");
        std::int64_t scale = 1;
        for (std::size_t i = 0; i < frac_part.size(); ++i) scale *= 10;
        std::int64_t frac = frac_part.empty() ? 0 : parse_int(frac_part, text);
        Rational r = Rational(whole) + Rational(frac, scale);
        return negative ? -r : r;
    }
    return Rational(parse_int(s, text));
}

std::int64_t Rational::floor() const {
    std::int64_t q = num_ / den_;
    if (num_ % den_ != 0 && num_ < 0) --q;
    return q;
}

std::int64_t Rational::ceil() const {
    std::int64_t q = num_ / den_;
    if (num_ % den_ != 0 && num_ > 0) ++q;
    return q;
}

Rational Rational::fractional_part() const { return *this - Rational(floor()); }

std::string Rational::to_string() const { return std::to_string(num_) + "/" + std::to_string(den_); }

Rational Rational::operator-() const { return from_wide(-static_cast<int128>(num_), den_); }

Rational& Rational::operator+=(const Rational& rhs) {
    if (den_ == rhs.den_) return *this = from_wide(static_cast<int128>(num_) + rhs.num_, den_);
    return *this = from_wide(static_cast<int128>(num_) * rhs.den_ + static_cast<int128>(rhs.num_) * den_,
                             static_cast<int128>(den_) * rhs.den_);
}

Rational& Rational::operator-=(const Rational& rhs) {
    if (den_ == rhs.den_) return *this = from_wide(static_cast<int128>(num_) - rhs.num_, den_);
    return *this = from_wide(static_cast<int128>(num_) * rhs.den_ - static_cast<int128>(rhs.num_) * den_,
                             static_cast<int128>(den_) * rhs.den_);
}

Rational& Rational::operator*=(const Rational& rhs) {
    return *this = from_wide(static_cast<int128>(num_) * rhs.num_, static_cast<int128>(den_) * rhs.den_);
}

Rational& Rational::operator/=(const Rational& rhs) {
    if (rhs.num_ == 0) throw std::domain_error("division by zero");
    return *this = from_wide(static_cast<int128>(num_) * rhs.den_, static_cast<int128>(den_) * rhs.num_);
}

std::strong_ordering operator<=>(const Rational& lhs, const Rational& rhs) {
    int128 l = static_cast<int128>(lhs.num_) * rhs.den_;
    int128 r = static_cast<int128>(rhs.num_) * lhs.den_;
    if (l < r) return std::strong_ordering::less;
    if (l > r) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
}

std::int64_t checked_lcm(std::int64_t a, std::int64_t b) {
    if (a <= 0 || b <= 0) throw std::invalid_argument("lcm of non-positive value");
    int128 l = static_cast<int128>(a) / std::gcd(a, b) * b;
    if (l > (static_cast<int128>(1) << 62)) throw std::overflow_error("common denominator exceeds 2^62");
    return static_cast<std::int64_t>(l);
}

}  // namespace apportion
