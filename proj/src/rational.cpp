#include "biharm/rational.hpp"

#include <charconv>
#include <numeric>
#include <stdexcept>

namespace biharm {

namespace {

using i128 = __int128;

std::int64_t narrow(i128 v) {
    if (v > INT64_MAX || v < INT64_MIN)
        throw std::overflow_error("rational arithmetic overflow");
    return static_cast<std::int64_t>(v);
}

Rational make(i128 num, i128 den) {
    if (den == 0)
        throw std::domain_error("rational with zero denominator");
    if (den < 0) {
        num = -num;
        den = -den;
    }
    i128 a = num < 0 ? -num : num;
    i128 b = den;
    while (b != 0) {
        i128 t = a % b;
        a = b;
        b = t;
    }
    if (a > 1) {
        num /= a;
        den /= a;
    }
    return Rational(narrow(num), narrow(den));
}

std::int64_t parse_int(std::string_view s, std::string_view whole) {
    std::int64_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
        throw std::invalid_argument("not a rational number: '" + std::string(whole) + "'");
    return v;
}

} // namespace

Rational::Rational(std::int64_t num, std::int64_t den) {
    if (den == 0)
        throw std::domain_error("rational with zero denominator");
    std::int64_t g = std::gcd(num, den);
    if (g == 0) g = 1;
    num_ = num / g;
    den_ = den / g;
    if (den_ < 0) {
        num_ = -num_;
        den_ = -den_;
    }
}

Rational Rational::parse(std::string_view text) {
    const std::string_view whole = text;
    while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
    while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r'))
        text.remove_suffix(1);
    if (text.empty())
        throw std::invalid_argument("empty rational");

    if (auto slash = text.find('/'); slash != std::string_view::npos) {
        return make(parse_int(text.substr(0, slash), whole), parse_int(text.substr(slash + 1), whole));
    }

    int exp10 = 0;
    if (auto e = text.find_first_of("eE"); e != std::string_view::npos) {
        exp10 = static_cast<int>(parse_int(text.substr(e + 1), whole));
        text = text.substr(0, e);
    }
    bool negative = false;
    if (!text.empty() && (text.front() == '-' || text.front() == '+')) {
        negative = text.front() == '-';
        text.remove_prefix(1);
    }
    std::string digits;
    if (auto dot = text.find('.'); dot != std::string_view::npos) {
        digits = std::string(text.substr(0, dot)) + std::string(text.substr(dot + 1));
        exp10 -= static_cast<int>(text.size() - dot - 1);
    } else {
        digits = std::string(text);
    }
    if (digits.empty() || digits.find_first_not_of("0123456789") != std::string::npos)
        throw std::invalid_argument("not a rational number: '" + std::string(whole) + "'");
    if (exp10 > 18 || exp10 < -18)
        throw std::overflow_error("rational exponent out of range: '" + std::string(whole) + "'");

    i128 num = parse_int(digits, whole);
    i128 den = 1;
    for (; exp10 > 0; --exp10) num *= 10;
    for (; exp10 < 0; ++exp10) den *= 10;
    return make(negative ? -num : num, den);
}

std::string Rational::to_string() const {
    if (den_ == 1) return std::to_string(num_);
    return std::to_string(num_) + "/" + std::to_string(den_);
}

Rational operator+(const Rational& a, const Rational& b) {
    return make(i128(a.num_) * b.den_ + i128(b.num_) * a.den_, i128(a.den_) * b.den_);
}

Rational operator-(const Rational& a, const Rational& b) {
    return make(i128(a.num_) * b.den_ - i128(b.num_) * a.den_, i128(a.den_) * b.den_);
}

Rational operator*(const Rational& a, const Rational& b) {
    return make(i128(a.num_) * b.num_, i128(a.den_) * b.den_);
}

Rational operator/(const Rational& a, const Rational& b) {
    if (b.num_ == 0)
        throw std::domain_error("rational division by zero");
    return make(i128(a.num_) * b.den_, i128(a.den_) * b.num_);
}

std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
    return i128(a.num_) * b.den_ <=> i128(b.num_) * a.den_;
}

} // namespace biharm
