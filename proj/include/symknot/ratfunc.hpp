#pragma once

#include <string>

#include "bilaurent.hpp"

namespace symknot {

// Reduced quotient num/den in the fraction field of Z[s^{±1/2}, t^{±1/2}].
// Normal form: gcd(num, den) = 1 and den's lexicographically-leading term is
// a positive coefficient at exponent (0, 0).
class ratfunc {
public:
    ratfunc() : den_(1) {}
    ratfunc(const bilaurent& num) : num_(num), den_(1) {}
    ratfunc(long long c) : num_(c), den_(1) {}
    ratfunc(const bilaurent& num, const bilaurent& den) : num_(num), den_(den) {
        if (den_.is_zero()) throw not_divisible("zero denominator");
        normalize();
    }

    const bilaurent& num() const { return num_; }
    const bilaurent& den() const { return den_; }

    bool is_zero() const { return num_.is_zero(); }
    bool is_laurent() const { return den_.is_unit(); }

    bilaurent to_laurent() const {
        if (!is_laurent()) throw not_laurent();
        return den_.lead_coeff() == 1 ? num_ : -num_;
    }

    ratfunc operator-() const {
        ratfunc r = *this;
        r.num_ = -r.num_;
        return r;
    }
    friend ratfunc operator+(const ratfunc& a, const ratfunc& b) {
        if (a.den_ == b.den_) return ratfunc(a.num_ + b.num_, a.den_);
        return ratfunc(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_);
    }
    friend ratfunc operator-(const ratfunc& a, const ratfunc& b) { return a + (-b); }
    friend ratfunc operator*(const ratfunc& a, const ratfunc& b) {
        return ratfunc(a.num_ * b.num_, a.den_ * b.den_);
    }
    friend ratfunc operator/(const ratfunc& a, const ratfunc& b) {
        if (b.is_zero()) throw not_divisible("division by zero");
        return ratfunc(a.num_ * b.den_, a.den_ * b.num_);
    }
    ratfunc& operator+=(const ratfunc& o) { return *this = *this + o; }
    ratfunc& operator*=(const ratfunc& o) { return *this = *this * o; }

    // cross-multiplication equality; agrees with structural equality of normal forms
    friend bool operator==(const ratfunc& a, const ratfunc& b) {
        return a.num_ * b.den_ == b.num_ * a.den_;
    }
    friend bool operator!=(const ratfunc& a, const ratfunc& b) { return !(a == b); }

    bool structurally_equal(const ratfunc& o) const { return num_ == o.num_ && den_ == o.den_; }

    std::string str() const {
        if (den_ == bilaurent(1)) return num_.str();
        return "(" + num_.str() + ")/(" + den_.str() + ")";
    }

private:
    void normalize() {
        if (num_.is_zero()) {
            den_ = bilaurent(1);
            return;
        }
        bilaurent g = gcd(num_, den_);
        if (!(g == bilaurent(1))) {
            num_ = divide_exact(num_, g);
            den_ = divide_exact(den_, g);
        }
        auto [a, b] = den_.lead();
        integer c = den_.lead_coeff();
        int flip = c < 0 ? -1 : 1;
        num_ = num_.shifted(-a, -b);
        den_ = den_.shifted(-a, -b);
        if (flip < 0) {
            num_ = -num_;
            den_ = -den_;
        }
    }

    bilaurent num_, den_;
};

} // namespace symknot
