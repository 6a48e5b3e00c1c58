#pragma once

#include <boost/multiprecision/mpfr.hpp>

#include <complex>
#include <string>

namespace orthowave {

// Arbitrary-precision real with runtime decimal precision (MPFR-backed).
using MpReal =
    boost::multiprecision::number<boost::multiprecision::mpfr_float_backend<0>,
                                  boost::multiprecision::et_off>;

inline void set_mp_digits(unsigned digits) {
    MpReal::default_precision(digits);
}

// Minimal complex over MpReal. std::complex is not specified for
// user-defined scalars, so the few operations the quadrature oracle and the
// big-complex series ring need are spelled out here.
struct MpComplex {
    MpReal re, im;

    MpComplex() : re(0), im(0) {}
    MpComplex(MpReal r) : re(std::move(r)), im(0) {}
    MpComplex(MpReal r, MpReal i) : re(std::move(r)), im(std::move(i)) {}
    MpComplex(double r) : re(r), im(0) {}
    MpComplex(double r, double i) : re(r), im(i) {}
    explicit MpComplex(const std::complex<double>& z) : re(z.real()), im(z.imag()) {}

    std::complex<double> to_double() const {
        return {re.convert_to<double>(), im.convert_to<double>()};
    }

    MpComplex& operator+=(const MpComplex& o) { re += o.re; im += o.im; return *this; }
    MpComplex& operator-=(const MpComplex& o) { re -= o.re; im -= o.im; return *this; }
    MpComplex& operator*=(const MpComplex& o) {
        MpReal r = re * o.re - im * o.im;
        im = re * o.im + im * o.re;
        re = std::move(r);
        return *this;
    }
    friend MpComplex operator+(MpComplex a, const MpComplex& b) { return a += b; }
    friend MpComplex operator-(MpComplex a, const MpComplex& b) { return a -= b; }
    friend MpComplex operator*(MpComplex a, const MpComplex& b) { return a *= b; }
    friend MpComplex operator-(const MpComplex& a) { return {-a.re, -a.im}; }
    friend MpComplex operator*(const MpReal& s, MpComplex a) { a.re *= s; a.im *= s; return a; }
    friend MpComplex operator*(MpComplex a, const MpReal& s) { a.re *= s; a.im *= s; return a; }
    bool operator==(const MpComplex& o) const { return re == o.re && im == o.im; }

    MpComplex conjugated() const { return {re, -im}; }
    MpReal norm2() const { return re * re + im * im; }
    MpReal abs() const { return boost::multiprecision::sqrt(norm2()); }

    friend MpComplex operator/(const MpComplex& a, const MpComplex& b) {
        MpReal d = b.norm2();
        return {(a.re * b.re + a.im * b.im) / d, (a.im * b.re - a.re * b.im) / d};
    }
    friend MpComplex operator/(const MpComplex& a, const MpReal& s) {
        return {a.re / s, a.im / s};
    }
};

inline MpComplex mp_exp(const MpComplex& z) {
    MpReal m = boost::multiprecision::exp(z.re);
    return {m * boost::multiprecision::cos(z.im), m * boost::multiprecision::sin(z.im)};
}

inline MpComplex mp_log(const MpComplex& z) {
    return {boost::multiprecision::log(z.abs()), boost::multiprecision::atan2(z.im, z.re)};
}

inline MpComplex mp_sqrt(const MpComplex& z) {
    return mp_exp(MpComplex(MpReal(0.5)) * mp_log(z));
}

inline MpComplex mp_pow_int(MpComplex base, long e) {
    MpComplex r(MpReal(1));
    bool inv = e < 0;
    if (inv) e = -e;
    while (e > 0) {
        if (e & 1) r *= base;
        base *= base;
        e >>= 1;
    }
    if (inv) r = MpComplex(MpReal(1)) / r;
    return r;
}

} // namespace orthowave
