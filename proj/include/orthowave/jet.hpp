#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <string>

#include "orthowave/errors.hpp"

namespace orthowave {

// Truncated polynomial u_0 + u_1 t + ... + u_K t^K in a formal small
// parameter t, with complex coefficients. Arithmetic is exact modulo t^{K+1}.
// Mixed-order operands broadcast to the larger order, so plain scalars embed
// as order-0 jets.
class Jet {
public:
    using C = std::complex<double>;
    static constexpr int kMaxJetOrder = 7;

    Jet() : order_(0) { u_.fill(C(0.0)); }
    Jet(double v) : order_(0) { u_.fill(C(0.0)); u_[0] = C(v); }
    Jet(C v) : order_(0) { u_.fill(C(0.0)); u_[0] = v; }

    static Jet zero(int order) {
        Jet j;
        j.set_order(order);
        return j;
    }
    static Jet constant(int order, C value) {
        Jet j;
        j.set_order(order);
        j.u_[0] = value;
        return j;
    }
    // The generator t itself (order >= 1).
    static Jet variable(int order) {
        Jet j;
        j.set_order(order);
        if (order < 1) throw UsageError("jet variable needs order >= 1");
        j.u_[1] = C(1.0);
        return j;
    }

    int order() const { return order_; }
    C& operator[](int k) { return u_[static_cast<std::size_t>(k)]; }
    const C& operator[](int k) const { return u_[static_cast<std::size_t>(k)]; }
    C value() const { return u_[0]; }
    C coeff(int k) const { return k <= order_ ? u_[static_cast<std::size_t>(k)] : C(0.0); }

    friend Jet operator+(const Jet& a, const Jet& b) {
        Jet r;
        r.set_order(std::max(a.order_, b.order_));
        for (int k = 0; k <= r.order_; ++k) r.u_[k] = a.coeff(k) + b.coeff(k);
        return r;
    }
    friend Jet operator-(const Jet& a, const Jet& b) {
        Jet r;
        r.set_order(std::max(a.order_, b.order_));
        for (int k = 0; k <= r.order_; ++k) r.u_[k] = a.coeff(k) - b.coeff(k);
        return r;
    }
    friend Jet operator-(const Jet& a) {
        Jet r = a;
        for (int k = 0; k <= a.order_; ++k) r.u_[k] = -a.u_[k];
        return r;
    }
    friend Jet operator*(const Jet& a, const Jet& b) {
        Jet r;
        r.set_order(std::max(a.order_, b.order_));
        for (int i = 0; i <= a.order_; ++i) {
            if (a.u_[i] == C(0.0)) continue;
            for (int j = 0; i + j <= r.order_ && j <= b.order_; ++j)
                r.u_[i + j] += a.u_[i] * b.u_[j];
        }
        return r;
    }
    Jet& operator+=(const Jet& o) { return *this = *this + o; }
    Jet& operator-=(const Jet& o) { return *this = *this - o; }
    Jet& operator*=(const Jet& o) { return *this = *this * o; }

    bool operator==(const Jet& o) const {
        for (int k = 0; k <= std::max(order_, o.order_); ++k)
            if (coeff(k) != o.coeff(k)) return false;
        return true;
    }

    Jet conjugated() const {
        Jet r = *this;
        for (int k = 0; k <= order_; ++k) r.u_[k] = std::conj(u_[k]);
        return r;
    }

    double mag() const {
        double m = 0.0;
        for (int k = 0; k <= order_; ++k) m = std::max(m, std::abs(u_[k]));
        return m;
    }

    // Derivative-recurrence lifts of the scalar analytic functions; the
    // constant term must be in the usual domain of the scalar function.
    Jet reciprocal() const {
        if (u_[0] == C(0.0)) throw NumericError("jet reciprocal at zero constant term");
        Jet r;
        r.set_order(order_);
        r.u_[0] = C(1.0) / u_[0];
        for (int k = 1; k <= order_; ++k) {
            C acc(0.0);
            for (int j = 1; j <= k; ++j) acc += u_[j] * r.u_[k - j];
            r.u_[k] = -acc / u_[0];
        }
        return r;
    }

    Jet exp() const {
        Jet r;
        r.set_order(order_);
        r.u_[0] = std::exp(u_[0]);
        for (int k = 1; k <= order_; ++k) {
            C acc(0.0);
            for (int j = 1; j <= k; ++j) acc += double(j) * u_[j] * r.u_[k - j];
            r.u_[k] = acc / double(k);
        }
        return r;
    }

    Jet log() const {
        if (u_[0] == C(0.0)) throw NumericError("jet log at zero constant term");
        Jet r;
        r.set_order(order_);
        r.u_[0] = std::log(u_[0]);
        for (int k = 1; k <= order_; ++k) {
            C acc = double(k) * u_[k];
            for (int j = 1; j < k; ++j) acc -= double(j) * r.u_[j] * u_[k - j];
            r.u_[k] = acc / (double(k) * u_[0]);
        }
        return r;
    }

    Jet sqrt() const {
        if (u_[0] == C(0.0)) throw NumericError("jet sqrt at zero constant term");
        Jet r;
        r.set_order(order_);
        r.u_[0] = std::sqrt(u_[0]);
        for (int k = 1; k <= order_; ++k) {
            C acc = u_[k];
            for (int j = 1; j < k; ++j) acc -= r.u_[j] * r.u_[k - j];
            r.u_[k] = acc / (2.0 * r.u_[0]);
        }
        return r;
    }

private:
    void set_order(int order) {
        if (order < 0 || order > kMaxJetOrder)
            throw UsageError("jet order out of range [0," + std::to_string(kMaxJetOrder) + "]");
        order_ = order;
    }

    std::array<C, kMaxJetOrder + 1> u_;
    int order_;
};

} // namespace orthowave
