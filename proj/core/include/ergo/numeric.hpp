#pragma once

#include <boost/multiprecision/gmp.hpp>

#include <cctype>
#include <cmath>
#include <cstdint>
#include <string>

#include "ergo/errors.hpp"

namespace ergo {

using Rational = boost::multiprecision::mpq_rational;
using BigInt = boost::multiprecision::mpz_int;

// The toolkit runs every algorithm in one of two numeric modes:
//   - exact:  arbitrary-precision rationals; sign, equality and ordering
//             decisions carry no thresholds at all,
//   - float:  IEEE doubles with the documented tolerances below.
// All tolerance constants of the float mode live here so that each decision
// threshold is written down exactly once.
template <class S>
struct num_traits;

template <>
struct num_traits<Rational> {
    static constexpr bool exact = true;
    static bool is_positive(const Rational& x) { return x > 0; }
    static bool row_sum_ok(const Rational& s) { return s == 1; }
    static bool belief_sum_ok(const Rational& s) { return s == 1; }
    static bool near_equal(const Rational& a, const Rational& b) { return a == b; }
    static double to_double(const Rational& x) { return x.template convert_to<double>(); }
    static const char* mode_name() { return "exact"; }
};

template <>
struct num_traits<double> {
    static constexpr bool exact = false;
    // Strict positivity threshold for sign decisions (supports, patterns).
    static constexpr double positive_tol = 1e-12;
    // Row-stochasticity check on parsed/derived matrices.
    static constexpr double row_sum_tol = 1e-9;
    // Belief mass drift allowed before renormalization.
    static constexpr double belief_tol = 1e-12;
    // Entrywise comparison used by is_stable and belief deduplication.
    static constexpr double entry_tol = 1e-12;

    static bool is_positive(double x) { return x > positive_tol; }
    static bool row_sum_ok(double s) { return std::abs(s - 1.0) <= row_sum_tol; }
    static bool belief_sum_ok(double s) { return std::abs(s - 1.0) <= belief_tol; }
    static bool near_equal(double a, double b) { return std::abs(a - b) <= entry_tol; }
    static double to_double(double x) { return x; }
    static const char* mode_name() { return "float"; }
};

namespace detail {

// Exact value of a decimal literal such as "-12.5e-3". Exponents and signs
// follow the JSON grammar.
inline Rational decimal_to_rational(const std::string& text) {
    std::size_t pos = 0;
    bool negative = false;
    if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) {
        negative = (text[pos] == '-');
        ++pos;
    }
    std::string digits;
    long frac_digits = 0;
    bool seen_digit = false;
    for (; pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos])); ++pos) {
        digits += text[pos];
        seen_digit = true;
    }
    if (pos < text.size() && text[pos] == '.') {
        ++pos;
        for (; pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos])); ++pos) {
            digits += text[pos];
            ++frac_digits;
            seen_digit = true;
        }
    }
    long exponent = 0;
    if (pos < text.size() && (text[pos] == 'e' || text[pos] == 'E')) {
        ++pos;
        bool exp_neg = false;
        if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) {
            exp_neg = (text[pos] == '-');
            ++pos;
        }
        if (pos >= text.size()) throw ParseError("malformed exponent in number '" + text + "'");
        for (; pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos])); ++pos) {
            exponent = exponent * 10 + (text[pos] - '0');
            if (exponent > 1000000) throw ParseError("exponent out of range in '" + text + "'");
        }
        if (exp_neg) exponent = -exponent;
    }
    if (!seen_digit || pos != text.size())
        throw ParseError("malformed number literal '" + text + "'");

    // GMP reads a leading zero as an octal prefix; trim to plain base 10.
    std::size_t first = digits.find_first_not_of('0');
    digits = first == std::string::npos ? "0" : digits.substr(first);
    BigInt mantissa(digits);
    Rational value(mantissa);
    long shift = exponent - frac_digits;
    BigInt ten_pow = boost::multiprecision::pow(BigInt(10), static_cast<unsigned>(std::abs(shift)));
    if (shift >= 0)
        value *= Rational(ten_pow);
    else
        value /= Rational(ten_pow);
    return negative ? -value : value;
}

}  // namespace detail

// Parses "p/q", integer, or decimal literals into the scalar type of the
// active mode. Rational strings stay exact in float mode up to one rounding.
template <class S>
S scalar_from_string(const std::string& text);

namespace detail {

inline BigInt integer_from_string(std::string text, const std::string& original) {
    bool negative = false;
    if (!text.empty() && (text[0] == '+' || text[0] == '-')) {
        negative = text[0] == '-';
        text.erase(0, 1);
    }
    if (text.empty() || text.find_first_not_of("0123456789") != std::string::npos)
        throw ParseError("malformed rational literal '" + original + "'");
    std::size_t first = text.find_first_not_of('0');
    text = first == std::string::npos ? "0" : text.substr(first);
    BigInt v(text);
    return negative ? BigInt(-v) : v;
}

}  // namespace detail

template <>
inline Rational scalar_from_string<Rational>(const std::string& text) {
    if (text.empty()) throw ParseError("empty number literal");
    std::size_t slash = text.find('/');
    if (slash != std::string::npos) {
        BigInt num = detail::integer_from_string(text.substr(0, slash), text);
        BigInt den = detail::integer_from_string(text.substr(slash + 1), text);
        if (den == 0) throw ParseError("zero denominator in '" + text + "'");
        return Rational(num, den);
    }
    return detail::decimal_to_rational(text);
}

template <>
inline double scalar_from_string<double>(const std::string& text) {
    if (text.empty()) throw ParseError("empty number literal");
    std::size_t slash = text.find('/');
    try {
        if (slash != std::string::npos) {
            double num = std::stod(text.substr(0, slash));
            double den = std::stod(text.substr(slash + 1));
            if (den == 0.0) throw ParseError("zero denominator in '" + text + "'");
            return num / den;
        }
        std::size_t used = 0;
        double v = std::stod(text, &used);
        if (used != text.size()) throw ParseError("malformed number literal '" + text + "'");
        return v;
    } catch (const ParseError&) {
        throw;
    } catch (const std::exception&) {
        throw ParseError("malformed number literal '" + text + "'");
    }
}

inline std::string rational_to_string(const Rational& x) {
    return x.str();
}

template <class S>
S pow_int(const S& base, long long e) {
    S result(1);
    S b = base;
    long long n = e;
    while (n > 0) {
        if (n & 1) result *= b;
        b *= b;
        n >>= 1;
    }
    return result;
}

// Smallest m >= 1 with base^m <= target, for base, target in (0, 1).
// The float mode evaluates ceil(ln target / ln base) directly; the exact mode
// starts from that estimate and settles the boundary with exact powers, so the
// returned m is correct even when target is exactly a power of base.
template <class S>
long long smallest_power_leq(const S& base, const S& target);

template <>
inline long long smallest_power_leq<double>(const double& base, const double& target) {
    long long m = static_cast<long long>(std::ceil(std::log(target) / std::log(base)));
    if (m < 1) m = 1;
    while (std::pow(base, static_cast<double>(m)) > target) ++m;
    return m;
}

template <>
inline long long smallest_power_leq<Rational>(const Rational& base, const Rational& target) {
    static constexpr long long kExactPowerCap = 1000000;
    double est = std::log(num_traits<Rational>::to_double(target)) /
                 std::log(num_traits<Rational>::to_double(base));
    long long m = est < 1.0 ? 1 : static_cast<long long>(std::ceil(est));
    if (m > kExactPowerCap)
        throw BudgetExceededError("block-length exponent exceeds exact verification cap (" +
                                  std::to_string(m) + " > " + std::to_string(kExactPowerCap) + ")");
    while (pow_int(base, m) > target) {
        ++m;
        if (m > kExactPowerCap)
            throw BudgetExceededError("block-length exponent exceeds exact verification cap");
    }
    while (m > 1 && pow_int(base, m - 1) <= target) --m;
    return m;
}

template <class S>
double to_double(const S& x) {
    return num_traits<S>::to_double(x);
}

}  // namespace ergo
