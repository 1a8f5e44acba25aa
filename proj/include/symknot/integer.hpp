#pragma once

#include <boost/multiprecision/cpp_int.hpp>

namespace symknot {

using integer = boost::multiprecision::cpp_int;

inline integer gcd(const integer& a, const integer& b) { return boost::multiprecision::gcd(a, b); }

inline integer abs(const integer& a) { return a < 0 ? integer(-a) : a; }

inline int sign(const integer& a) { return a.sign(); }

// floor division; divisor must be nonzero
inline integer floor_div(const integer& a, const integer& b) {
    integer q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

} // namespace symknot
