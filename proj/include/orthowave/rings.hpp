#pragma once

#include <complex>
#include <string>

#include "orthowave/jet.hpp"
#include "orthowave/mp.hpp"

namespace orthowave {

// Scalar-ring glue used by the series templates. A ring element supports
// +, -, *, and the operations below. Three rings are provided:
//   complex<double>   -- the working ring,
//   Jet               -- truncated polynomials in a formal small parameter,
//   MpComplex         -- extended-precision complex (MPFR).
template <class R>
struct RingOps;

template <>
struct RingOps<std::complex<double>> {
    using R = std::complex<double>;
    static constexpr const char* name = "complex-double";
    static R zero() { return {}; }
    static R from(const std::complex<double>& z) { return z; }
    static R conj(const R& x) { return std::conj(x); }
    static double mag(const R& x) { return std::abs(x); }
    static std::complex<double> leading(const R& x) { return x; }
    static R mul_double(const R& x, double s) { return x * s; }
    static R recip(const R& x) { return 1.0 / x; }
    static R exp(const R& x) { return std::exp(x); }
    static R log(const R& x) { return std::log(x); }
    static R sqrt(const R& x) { return std::sqrt(x); }
};

template <>
struct RingOps<Jet> {
    using R = Jet;
    static constexpr const char* name = "theta-jet";
    static R zero() { return Jet(); }
    static R conj(const R& x) { return x.conjugated(); }
    static double mag(const R& x) { return x.mag(); }
    static std::complex<double> leading(const R& x) { return x.value(); }
    static R mul_double(const R& x, double s) { return x * s; }
    static R recip(const R& x) { return x.reciprocal(); }
    static R exp(const R& x) { return x.exp(); }
    static R log(const R& x) { return x.log(); }
    static R sqrt(const R& x) { return x.sqrt(); }
};

template <>
struct RingOps<MpComplex> {
    using R = MpComplex;
    static constexpr const char* name = "big-complex";
    static R zero() { return {}; }
    static R from(const std::complex<double>& z) { return MpComplex(z); }
    static R conj(const R& x) { return x.conjugated(); }
    static double mag(const R& x) { return x.abs().convert_to<double>(); }
    static std::complex<double> leading(const R& x) { return x.to_double(); }
    static R mul_double(const R& x, double s) { return x * MpReal(s); }
    static R recip(const R& x) { return MpComplex(MpReal(1)) / x; }
    static R exp(const R& x) { return mp_exp(x); }
    static R log(const R& x) { return mp_log(x); }
    static R sqrt(const R& x) { return mp_sqrt(x); }
};

} // namespace orthowave
