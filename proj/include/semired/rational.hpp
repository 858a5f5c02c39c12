#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <optional>
#include <stdexcept>
#include <string>

namespace semired {

using Int = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

// 3-adic valuation of a nonzero rational, normalized v(3) = 1.
inline long val3(const Rat& q) {
    if (q == 0) throw std::domain_error("val3(0) is infinite");
    Int n = boost::multiprecision::numerator(q);
    Int d = boost::multiprecision::denominator(q);
    long v = 0;
    while (n % 3 == 0) { n /= 3; ++v; }
    while (d % 3 == 0) { d /= 3; --v; }
    return v;
}

inline std::string rat_str(const Rat& q) {
    std::string s = boost::multiprecision::numerator(q).str();
    if (boost::multiprecision::denominator(q) != 1)
        s += "/" + boost::multiprecision::denominator(q).str();
    return s;
}

// Parses "p/q" or "p"; rejects zero denominators and garbage.
inline Rat rat_parse(const std::string& s) {
    auto slash = s.find('/');
    try {
        if (slash == std::string::npos) return Rat(Int(s));
        Int num(s.substr(0, slash));
        Int den(s.substr(slash + 1));
        if (den == 0) throw std::invalid_argument("zero denominator");
        return Rat(num, den);
    } catch (const std::runtime_error&) {
        throw std::invalid_argument("malformed rational: " + s);
    }
}

inline long lcm_long(long a, long b) {
    long g = a, h = b;
    while (h) { long t = g % h; g = h; h = t; }
    return a / g * b;
}

// Denominator of q (assumed > 0 form).
inline long rat_den(const Rat& q) {
    Int d = boost::multiprecision::denominator(q);
    return static_cast<long>(d);
}

inline long rat_num_long(const Rat& q) {
    Int n = boost::multiprecision::numerator(q);
    return static_cast<long>(n);
}

}  // namespace semired
