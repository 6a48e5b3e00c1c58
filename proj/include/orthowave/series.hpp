#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include "orthowave/errors.hpp"
#include "orthowave/rings.hpp"

namespace orthowave {

// Annulus band parameter. rho is tied to sigma by
//   rho(sigma) = 1 / (sigma + sqrt(1 + sigma^2)),
// so that rho in (0,1) and rho = 1 - sigma + O(sigma^2).
struct Band {
    double sigma;
    double rho;

    explicit Band(double sigma_) : sigma(sigma_), rho(rho_of_sigma(sigma_)) {
        if (!(sigma > 0.0 && sigma < 1.0)) throw UsageError("band sigma must lie in (0,1)");
    }
    static double rho_of_sigma(double s) { return 1.0 / (s + std::sqrt(1.0 + s * s)); }
};

// Fourier-Laurent data of a function on the unit circle:
// b(theta) = sum_{d=-D}^{D} b_d e^{i d theta}, with e^{i d theta} <-> zeta^d.
template <class R>
class CircleSeries {
public:
    CircleSeries() : degree_(0), b_(1, RingOps<R>::zero()) {}
    explicit CircleSeries(int degree)
        : degree_(degree), b_(2 * static_cast<std::size_t>(degree) + 1, RingOps<R>::zero()) {
        if (degree < 0) throw UsageError("circle series degree must be >= 0");
    }

    int degree() const { return degree_; }
    R& at(int d) { return b_[static_cast<std::size_t>(d + degree_)]; }
    const R& at(int d) const { return b_[static_cast<std::size_t>(d + degree_)]; }

    double max_abs() const {
        double m = 0.0;
        for (const auto& v : b_) m = std::max(m, RingOps<R>::mag(v));
        return m;
    }

    // max_d |b_d - conj(b_{-d})|, zero for real-valued circle functions.
    double reality_defect() const {
        double m = 0.0;
        for (int d = 0; d <= degree_; ++d)
            m = std::max(m, RingOps<R>::mag(at(d) - RingOps<R>::conj(at(-d))));
        return m;
    }

private:
    int degree_;
    std::vector<R> b_;
};

enum class AnalyticFn { Log, Exp, Sqrt, Reciprocal };

// Truncated two-variable Laurent series
//   F(zeta,eta) = sum_{|j|,|k| <= N} c_{jk} zeta^j eta^k,
// realized as f(z) = F(phi(z), conj(phi(z))) near the curve. Dense storage.
// Every truncating operation accumulates the plain coefficient mass of
// dropped terms into `tail()` (the rho -> 1 limit of the majorant, a lower
// bound for the dropped majorant mass at any band).
template <class R>
class HermitianSeries {
public:
    explicit HermitianSeries(int order)
        : order_(order),
          c_((2 * static_cast<std::size_t>(order) + 1) * (2 * static_cast<std::size_t>(order) + 1),
             RingOps<R>::zero()),
          tail_(0.0) {
        if (order < 1) throw UsageError("series order must be >= 1");
    }

    static HermitianSeries constant(int order, const R& value) {
        HermitianSeries f(order);
        f.at(0, 0) = value;
        return f;
    }

    int order() const { return order_; }
    double tail() const { return tail_; }
    void add_tail(double t) { tail_ += t; }

    R& at(int j, int k) { return c_[index(j, k)]; }
    const R& at(int j, int k) const { return c_[index(j, k)]; }

    bool tail_flagged(const Band& band) const {
        return tail_ > 1e-6 * majorant_norm(band);
    }

    HermitianSeries& operator+=(const HermitianSeries& o) {
        check_order(o);
        for (std::size_t i = 0; i < c_.size(); ++i) c_[i] = c_[i] + o.c_[i];
        tail_ += o.tail_;
        return *this;
    }
    HermitianSeries& operator-=(const HermitianSeries& o) {
        check_order(o);
        for (std::size_t i = 0; i < c_.size(); ++i) c_[i] = c_[i] - o.c_[i];
        tail_ += o.tail_;
        return *this;
    }
    friend HermitianSeries operator+(HermitianSeries a, const HermitianSeries& b) { return a += b; }
    friend HermitianSeries operator-(HermitianSeries a, const HermitianSeries& b) { return a -= b; }

    HermitianSeries& scale(const R& s) {
        for (auto& v : c_) v = v * s;
        tail_ *= RingOps<R>::mag(s);
        return *this;
    }

    // Coefficient-wise convolution; out-of-band products are dropped into tail.
    friend HermitianSeries multiply(const HermitianSeries& f, const HermitianSeries& g) {
        f.check_order(g);
        const int N = f.order_;
        HermitianSeries r(N);
        double dropped = 0.0;
        for (int j1 = -N; j1 <= N; ++j1)
            for (int k1 = -N; k1 <= N; ++k1) {
                const R& a = f.at(j1, k1);
                if (RingOps<R>::mag(a) == 0.0) continue;
                for (int j2 = -N; j2 <= N; ++j2)
                    for (int k2 = -N; k2 <= N; ++k2) {
                        const R& b = g.at(j2, k2);
                        if (RingOps<R>::mag(b) == 0.0) continue;
                        const int j = j1 + j2, k = k1 + k2;
                        R prod = a * b;
                        if (std::abs(j) <= N && std::abs(k) <= N)
                            r.at(j, k) = r.at(j, k) + prod;
                        else
                            dropped += RingOps<R>::mag(prod);
                    }
            }
        r.tail_ = dropped + f.tail_ + g.tail_;
        return r;
    }

    // c_{jk} -> conj(c_{kj}); realizes complex conjugation of the function.
    friend HermitianSeries hermitian_transpose(const HermitianSeries& f) {
        HermitianSeries r(f.order_);
        for (int j = -f.order_; j <= f.order_; ++j)
            for (int k = -f.order_; k <= f.order_; ++k)
                r.at(j, k) = RingOps<R>::conj(f.at(k, j));
        r.tail_ = f.tail_;
        return r;
    }

    // Restriction to the curve (eta = 1/zeta): b_d = sum_k c_{d+k,k}.
    friend CircleSeries<R> diag_restrict(const HermitianSeries& f) {
        const int N = f.order_;
        CircleSeries<R> b(2 * N);
        for (int j = -N; j <= N; ++j)
            for (int k = -N; k <= N; ++k) b.at(j - k) = b.at(j - k) + f.at(j, k);
        return b;
    }

    // Exact division by (1 - zeta*eta) on retained bands, for series whose
    // diagonal restriction vanishes (below tol * majorant at `band`).
    friend HermitianSeries diag_divide(const HermitianSeries& f, double vanish_tol = 1e-9,
                                       const Band& band = Band(0.1)) {
        const int N = f.order_;
        CircleSeries<R> b = diag_restrict(f);
        const double scale = f.majorant_norm(band);
        const double worst = b.max_abs();
        if (worst > vanish_tol * std::max(scale, 1e-300)) {
            int bad = 0;
            double m = 0.0;
            for (int d = -2 * N; d <= 2 * N; ++d)
                if (RingOps<R>::mag(b.at(d)) > m) { m = RingOps<R>::mag(b.at(d)); bad = d; }
            throw NumericError("diag_divide: diagonal restriction does not vanish (|b_" +
                               std::to_string(bad) + "| = " + std::to_string(m) +
                               " vs tol " + std::to_string(vanish_tol * scale) + ")");
        }
        HermitianSeries g(N);
        for (int j = N; j >= -N; --j)
            for (int k = N; k >= -N; --k) {
                R acc = RingOps<R>::zero();
                for (int l = 1; j + l <= N && k + l <= N; ++l) acc = acc + f.at(j + l, k + l);
                g.at(j, k) = -acc;
            }
        g.tail_ = f.tail_;
        return g;
    }

    // Bounded harmonic extension of circle data to the exterior disk, in
    // polarized form: modes d<0 -> zeta^d, d>0 -> eta^{-d}, constants fixed.
    friend HermitianSeries poisson_extend(const CircleSeries<R>& b, int order) {
        HermitianSeries r(order);
        double dropped = 0.0;
        for (int d = -b.degree(); d <= b.degree(); ++d) {
            const R& v = b.at(d);
            if (RingOps<R>::mag(v) == 0.0) continue;
            if (d == 0)
                r.at(0, 0) = r.at(0, 0) + v;
            else if (d < 0 && -d <= order)
                r.at(d, 0) = r.at(d, 0) + v;
            else if (d > 0 && d <= order)
                r.at(0, -d) = r.at(0, -d) + v;
            else
                dropped += RingOps<R>::mag(v);
        }
        r.tail_ = dropped;
        return r;
    }

    // fn(f) expanded around the scalar center c = F(1,1); requires the
    // centered part f/c - 1 to have majorant norm below `safety` and, for
    // sqrt/log, Re c > 0.
    friend HermitianSeries analytic_apply(AnalyticFn fn, const HermitianSeries& f,
                                          const Band& band = Band(0.1), double safety = 0.8) {
        const int N = f.order_;
        R c = RingOps<R>::zero();
        for (const auto& v : f.c_) c = c + v;
        const std::complex<double> c0 = RingOps<R>::leading(c);
        if ((fn == AnalyticFn::Sqrt || fn == AnalyticFn::Log) && !(c0.real() > 0.0))
            throw NumericError("analytic_apply: center off the right half-plane for sqrt/log");
        if (RingOps<R>::mag(c) == 0.0)
            throw NumericError("analytic_apply: zero center value");

        HermitianSeries u = f;
        u.scale(RingOps<R>::recip(c));
        u.at(0, 0) = u.at(0, 0) - R(1.0);
        const double nu = u.majorant_norm(band);
        if (!(nu < safety))
            throw NumericError("analytic_apply: centered part norm " + std::to_string(nu) +
                               " exceeds safety factor " + std::to_string(safety));

        // Coefficients alpha_k of fn(c(1+t)) = sum alpha_k t^k.
        auto alpha = [&](int k, const R& prev) -> R {
            switch (fn) {
                case AnalyticFn::Exp:
                    return k == 0 ? RingOps<R>::exp(c) : prev * c * (1.0 / double(k));
                case AnalyticFn::Log:
                    return k == 0 ? RingOps<R>::log(c)
                                  : (k == 1 ? R(1.0)
                                            : RingOps<R>::mul_double(prev, -double(k - 1) / double(k)));
                case AnalyticFn::Sqrt:
                    return k == 0 ? RingOps<R>::sqrt(c)
                                  : RingOps<R>::mul_double(prev, (1.5 - double(k)) / double(k));
                case AnalyticFn::Reciprocal:
                    return k == 0 ? RingOps<R>::recip(c) : RingOps<R>::mul_double(prev, -1.0);
            }
            return RingOps<R>::zero();
        };

        const int k_hard_cap = std::max(8 * N, 64);
        HermitianSeries acc(N);
        HermitianSeries upow = constant(N, R(1.0));
        R a = RingOps<R>::zero();
        for (int k = 0; k <= k_hard_cap; ++k) {
            a = alpha(k, a);
            HermitianSeries term = upow;
            term.scale(a);
            acc += term;
            const double tail_bound = RingOps<R>::mag(a) * std::pow(nu, k);
            if (k >= 2 && tail_bound < 1e-17 * (1.0 + acc.majorant_norm(band))) break;
            if (k < k_hard_cap) upow = multiply(upow, u);
        }
        return acc;
    }

    // Formal term-by-term derivative in zeta (var=0) or eta (var=1).
    friend HermitianSeries differentiate(const HermitianSeries& f, int var) {
        if (var != 0 && var != 1) throw UsageError("differentiate: var must be 0 (zeta) or 1 (eta)");
        const int N = f.order_;
        HermitianSeries r(N);
        double dropped = 0.0;
        for (int j = -N; j <= N; ++j)
            for (int k = -N; k <= N; ++k) {
                const R& v = f.at(j, k);
                if (RingOps<R>::mag(v) == 0.0) continue;
                const int e = (var == 0) ? j : k;
                if (e == 0) continue;
                R d = RingOps<R>::mul_double(v, double(e));
                const int jj = (var == 0) ? j - 1 : j;
                const int kk = (var == 0) ? k : k - 1;
                if (std::abs(jj) <= N && std::abs(kk) <= N)
                    r.at(jj, kk) = r.at(jj, kk) + d;
                else
                    dropped += RingOps<R>::mag(d);
            }
        r.tail_ = f.tail_ + dropped;
        return r;
    }

    // Coefficient majorant sum |c_{jk}| rho^{-|j|-|k|}; an upper bound for the
    // sup of the polarization over the bi-annulus with radii [rho, 1/rho].
    double majorant_norm(const Band& band) const {
        double s = 0.0;
        for (int j = -order_; j <= order_; ++j)
            for (int k = -order_; k <= order_; ++k) {
                const double m = RingOps<R>::mag(at(j, k));
                if (m != 0.0) s += m * std::pow(band.rho, -double(std::abs(j) + std::abs(k)));
            }
        return s;
    }

    R evaluate(const std::complex<double>& zeta, const std::complex<double>& eta) const {
        // Horner in eta per fixed j, then Horner-style in zeta.
        const int N = order_;
        R total = RingOps<R>::zero();
        const std::complex<double> inv_zeta = 1.0 / zeta;
        const std::complex<double> inv_eta = 1.0 / eta;
        for (int j = -N; j <= N; ++j) {
            R row = RingOps<R>::zero();
            for (int k = N; k >= 1; --k) row = (row + at(j, k)) * R(eta);
            R row_neg = RingOps<R>::zero();
            for (int k = -N; k <= -1; ++k) row_neg = (row_neg + at(j, k)) * R(inv_eta);
            R full = row + row_neg + at(j, 0);
            std::complex<double> zj = std::pow(j >= 0 ? zeta : inv_zeta, std::abs(j));
            total = total + full * R(zj);
        }
        return total;
    }

    // Value of the realized function at a physical chart point (eta = conj zeta).
    R evaluate_physical(const std::complex<double>& zeta) const {
        return evaluate(zeta, std::conj(zeta));
    }

    // max over 8 circle points of |F(zeta, conj zeta) - diag_restrict(F)(zeta)|.
    double evaluation_consistency_defect() const {
        CircleSeries<R> b = diag_restrict(*this);
        double worst = 0.0;
        for (int i = 0; i < 8; ++i) {
            const double th = 2.0 * M_PI * (i + 0.37) / 8.0;
            const std::complex<double> zeta = std::polar(1.0, th);
            R lhs = evaluate_physical(zeta);
            R rhs = RingOps<R>::zero();
            for (int d = -b.degree(); d <= b.degree(); ++d)
                rhs = rhs + b.at(d) * R(std::pow(zeta, d));
            worst = std::max(worst, RingOps<R>::mag(lhs - rhs));
        }
        return worst;
    }

    double hermitian_symmetry_defect() const {
        double m = 0.0;
        for (int j = -order_; j <= order_; ++j)
            for (int k = -order_; k <= order_; ++k)
                m = std::max(m, RingOps<R>::mag(at(j, k) - RingOps<R>::conj(at(k, j))));
        return m;
    }

    // CSV block: comment line, header, one row per nonzero coefficient.
    void to_csv(std::ostream& os) const {
        os << "# hermitian-series N=" << order_ << " ring=" << RingOps<R>::name << "\n";
        os << "j,k,re,im\n";
        os.precision(17);
        for (int j = -order_; j <= order_; ++j)
            for (int k = -order_; k <= order_; ++k) {
                const auto z = RingOps<R>::leading(at(j, k));
                if (z == std::complex<double>(0.0)) continue;
                os << j << "," << k << "," << z.real() << "," << z.imag() << "\n";
            }
    }

private:
    std::size_t index(int j, int k) const {
        if (std::abs(j) > order_ || std::abs(k) > order_)
            throw UsageError("series coefficient index out of band");
        const std::size_t w = 2 * static_cast<std::size_t>(order_) + 1;
        return static_cast<std::size_t>(j + order_) * w + static_cast<std::size_t>(k + order_);
    }
    void check_order(const HermitianSeries& o) const {
        if (order_ != o.order_) throw UsageError("series order mismatch");
    }

    int order_;
    std::vector<R> c_;
    double tail_;
};

using SeriesD = HermitianSeries<std::complex<double>>;
using CircleD = CircleSeries<std::complex<double>>;

} // namespace orthowave
