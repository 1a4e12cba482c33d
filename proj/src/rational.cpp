#include "assouadlab/rational.hpp"

#include "assouadlab/errors.hpp"

#include <cctype>
#include <cmath>

namespace assouadlab {

namespace {

bool all_digits(std::string_view s) {
    if (s.empty()) {
        return false;
    }
    for (char c : s) {
        if (!std::isdigit(static_cast<unsigned char>(c))) {
            return false;
        }
    }
    return true;
}

BigInt parse_integer(std::string_view s, std::string_view whole) {
    bool negative = false;
    if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
        negative = s.front() == '-';
        s.remove_prefix(1);
    }
    if (!all_digits(s)) {
        throw invalid_input("not a rational number: '" + std::string(whole) + "'");
    }
    BigInt v{std::string(s)};
    return negative ? BigInt(-v) : v;
}

} // namespace

Rational parse_rational(std::string_view text) {
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) {
        text.remove_prefix(1);
    }
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) {
        text.remove_suffix(1);
    }
    if (text.empty()) {
        throw invalid_input("empty rational");
    }
    if (auto slash = text.find('/'); slash != std::string_view::npos) {
        BigInt num = parse_integer(text.substr(0, slash), text);
        BigInt den = parse_integer(text.substr(slash + 1), text);
        if (den == 0) {
            throw invalid_input("zero denominator in '" + std::string(text) + "'");
        }
        return Rational(num, den);
    }
    if (auto dot = text.find('.'); dot != std::string_view::npos) {
        std::string_view int_part = text.substr(0, dot);
        std::string_view frac_part = text.substr(dot + 1);
        bool negative = !int_part.empty() && int_part.front() == '-';
        if (!int_part.empty() && (int_part.front() == '-' || int_part.front() == '+')) {
            int_part.remove_prefix(1);
        }
        if ((!int_part.empty() && !all_digits(int_part)) || !all_digits(frac_part)) {
            throw invalid_input("not a rational number: '" + std::string(text) + "'");
        }
        BigInt whole = int_part.empty() ? BigInt(0) : BigInt(std::string(int_part));
        BigInt frac{std::string(frac_part)};
        BigInt scale = ipow(BigInt(10), frac_part.size());
        Rational v(whole * scale + frac, scale);
        return negative ? Rational(-v) : v;
    }
    return Rational(parse_integer(text, text));
}

std::string to_string(const Rational& value) {
    BigInt num = boost::multiprecision::numerator(value);
    BigInt den = boost::multiprecision::denominator(value);
    if (den == 1) {
        return num.str();
    }
    return num.str() + "/" + den.str();
}

double to_double(const Rational& value) { return value.convert_to<double>(); }

long double log_big(const BigInt& value) {
    if (value <= 0) {
        throw invalid_input("log of non-positive integer");
    }
    std::size_t bits = boost::multiprecision::msb(value) + 1;
    if (bits <= 1000) {
        return std::log(value.convert_to<long double>());
    }
    std::size_t shift = bits - 64;
    BigInt top = value >> shift;
    return std::log(top.convert_to<long double>()) + static_cast<long double>(shift) * std::log(2.0L);
}

long double log_rational(const Rational& value) {
    if (value <= 0) {
        throw invalid_input("log of non-positive rational");
    }
    return log_big(boost::multiprecision::numerator(value)) - log_big(boost::multiprecision::denominator(value));
}

unsigned __int128 probability_threshold(const Rational& value) {
    if (value <= 0) {
        return 0;
    }
    const BigInt two64 = BigInt(1) << 64;
    if (value >= 1) {
        return static_cast<unsigned __int128>(1) << 64;
    }
    BigInt num = boost::multiprecision::numerator(value) * two64;
    BigInt den = boost::multiprecision::denominator(value);
    BigInt t = (num + den - 1) / den;
    BigInt hi = t >> 64;
    BigInt lo = t & (two64 - 1);
    return (static_cast<unsigned __int128>(hi.convert_to<std::uint64_t>()) << 64) |
           static_cast<unsigned __int128>(lo.convert_to<std::uint64_t>());
}

BigInt ipow(const BigInt& base, std::uint64_t exponent) {
    BigInt result = 1;
    BigInt b = base;
    while (exponent > 0) {
        if (exponent & 1U) {
            result *= b;
        }
        exponent >>= 1U;
        if (exponent > 0) {
            b *= b;
        }
    }
    return result;
}

} // namespace assouadlab
