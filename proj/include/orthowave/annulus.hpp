#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "orthowave/errors.hpp"
#include "orthowave/rings.hpp"
#include "orthowave/series.hpp"

namespace orthowave {

// Diagonal-centered representation of a truncated Hermitian-analytic
// function near the curve:
//
//   F(zeta,eta) = sum_{|q| <= Q} sum_{p=0}^{P} d_{qp} zeta^q v^p,   v = 1 - zeta*eta.
//
// v vanishes on the curve, so restriction is the p=0 row and division by
// (1 - zeta*eta) is an exact shift in p. Monomial bases lose the vanishing
// structure to binomial cancellation at engine orders; this basis keeps it.
// Dropped terms are tracked in a tail figure weighted at the nominal band.
template <class R>
class AnnulusSeries {
public:
    AnnulusSeries() : AnnulusSeries(1, 1, Band(0.1)) {}

    AnnulusSeries(int modes, int depth, const Band& nominal)
        : Q_(modes), P_(depth), rho_nom_(nominal.rho),
          rv_nom_(1.0 / (nominal.rho * nominal.rho) - 1.0),
          d_((2 * static_cast<std::size_t>(modes) + 1) * (static_cast<std::size_t>(depth) + 1),
             RingOps<R>::zero()),
          tail_(0.0) {
        if (modes < 1 || depth < 1) throw UsageError("annulus series needs modes, depth >= 1");
    }

    static AnnulusSeries constant(int modes, int depth, const Band& nominal, const R& value) {
        AnnulusSeries f(modes, depth, nominal);
        f.at(0, 0) = value;
        return f;
    }

    // zeta^q * v^p
    static AnnulusSeries basis(int modes, int depth, const Band& nominal, int q, int p) {
        AnnulusSeries f(modes, depth, nominal);
        f.at(q, p) = R(1.0);
        return f;
    }

    int modes() const { return Q_; }
    int depth() const { return P_; }
    double tail() const { return tail_; }
    void add_tail(double t) { tail_ += t; }
    double nominal_rho() const { return rho_nom_; }

    R& at(int q, int p) { return d_[index(q, p)]; }
    const R& at(int q, int p) const { return d_[index(q, p)]; }

    AnnulusSeries& operator+=(const AnnulusSeries& o) {
        check_shape(o);
        for (std::size_t i = 0; i < d_.size(); ++i) d_[i] = d_[i] + o.d_[i];
        tail_ += o.tail_;
        return *this;
    }
    AnnulusSeries& operator-=(const AnnulusSeries& o) {
        check_shape(o);
        for (std::size_t i = 0; i < d_.size(); ++i) d_[i] = d_[i] - o.d_[i];
        tail_ += o.tail_;
        return *this;
    }
    friend AnnulusSeries operator+(AnnulusSeries a, const AnnulusSeries& b) { return a += b; }
    friend AnnulusSeries operator-(AnnulusSeries a, const AnnulusSeries& b) { return a -= b; }
    friend AnnulusSeries operator-(const AnnulusSeries& a) {
        AnnulusSeries r = a;
        for (auto& v : r.d_) v = -v;
        return r;
    }

    AnnulusSeries& scale(const R& s) {
        for (auto& v : d_) v = v * s;
        tail_ *= RingOps<R>::mag(s);
        return *this;
    }
    AnnulusSeries& scale(double s) {
        for (auto& v : d_) v = RingOps<R>::mul_double(v, s);
        tail_ *= std::abs(s);
        return *this;
    }

    friend AnnulusSeries multiply(const AnnulusSeries& f, const AnnulusSeries& g) {
        f.check_shape(g);
        const int Q = f.Q_, P = f.P_;
        AnnulusSeries r(Q, P, f.nominal_band());
        double dropped = 0.0;
        // gather nonzero entries of g once
        struct Entry { int q, p; const R* v; };
        std::vector<Entry> gs;
        gs.reserve(g.d_.size());
        for (int q = -Q; q <= Q; ++q)
            for (int p = 0; p <= P; ++p)
                if (RingOps<R>::mag(g.at(q, p)) != 0.0) gs.push_back({q, p, &g.at(q, p)});
        for (int q1 = -Q; q1 <= Q; ++q1)
            for (int p1 = 0; p1 <= P; ++p1) {
                const R& a = f.at(q1, p1);
                if (RingOps<R>::mag(a) == 0.0) continue;
                for (const auto& e : gs) {
                    const int q = q1 + e.q, p = p1 + e.p;
                    if (std::abs(q) <= Q && p <= P)
                        r.at(q, p) = r.at(q, p) + a * (*e.v);
                    else
                        dropped += RingOps<R>::mag(a * (*e.v)) * f.weight(q, p);
                }
            }
        r.tail_ = dropped + f.tail_ + g.tail_;
        return r;
    }

    // Restriction to the curve: the p=0 row.
    friend CircleSeries<R> diag_restrict(const AnnulusSeries& f) {
        CircleSeries<R> b(f.Q_);
        for (int q = -f.Q_; q <= f.Q_; ++q) b.at(q) = f.at(q, 0);
        return b;
    }

    double restriction_mass() const {
        double m = 0.0;
        for (int q = -Q_; q <= Q_; ++q) m = std::max(m, RingOps<R>::mag(at(q, 0)));
        return m;
    }

    // Exact division by v = (1 - zeta*eta); the restriction row must vanish.
    friend AnnulusSeries diag_divide(const AnnulusSeries& f, double vanish_tol = 1e-9) {
        const double scale = std::max(f.working_norm(), 1e-300);
        if (f.restriction_mass() > vanish_tol * scale)
            throw NumericError("diag_divide: restriction row mass " +
                               std::to_string(f.restriction_mass()) + " above tol " +
                               std::to_string(vanish_tol * scale));
        AnnulusSeries r(f.Q_, f.P_, f.nominal_band());
        for (int q = -f.Q_; q <= f.Q_; ++q)
            for (int p = 0; p < f.P_; ++p) r.at(q, p) = f.at(q, p + 1);
        r.tail_ = f.tail_;
        return r;
    }

    // Division by v that never throws: whatever restriction mass is present
    // goes into the tail figure. Used to keep building invalid geometries so
    // that validation can report on them.
    friend AnnulusSeries diag_divide_forced(const AnnulusSeries& f) {
        AnnulusSeries r(f.Q_, f.P_, f.nominal_band());
        for (int q = -f.Q_; q <= f.Q_; ++q)
            for (int p = 0; p < f.P_; ++p) r.at(q, p) = f.at(q, p + 1);
        r.tail_ = f.tail_ + f.restriction_mass();
        return r;
    }

    // Multiplication by v = (1 - zeta*eta): shift up in p.
    friend AnnulusSeries v_multiply(const AnnulusSeries& f) {
        AnnulusSeries r(f.Q_, f.P_, f.nominal_band());
        double dropped = 0.0;
        for (int q = -f.Q_; q <= f.Q_; ++q) {
            for (int p = f.P_ - 1; p >= 0; --p) r.at(q, p + 1) = f.at(q, p);
            dropped += RingOps<R>::mag(f.at(q, f.P_)) * f.weight(q, f.P_ + 1);
        }
        r.tail_ = f.tail_ + dropped;
        return r;
    }

    // Bounded harmonic extension of circle data: modes d<0 extend as zeta^d
    // (exact), modes d>0 as eta^{-d} = zeta^d (1-v)^{-d} (v-expansion).
    friend AnnulusSeries poisson_extend(const CircleSeries<R>& b, int modes, int depth,
                                        const Band& nominal) {
        AnnulusSeries r(modes, depth, nominal);
        double dropped = 0.0;
        for (int d = -b.degree(); d <= b.degree(); ++d) {
            const R& v = b.at(d);
            if (RingOps<R>::mag(v) == 0.0) continue;
            if (std::abs(d) > modes) {
                dropped += RingOps<R>::mag(v) * r.weight(d, 0);
                continue;
            }
            if (d <= 0) {
                r.at(d, 0) = r.at(d, 0) + v;
            } else {
                // (1-v)^{-d} = sum_p C(d-1+p, p) v^p
                double binom = 1.0;
                for (int p = 0; p <= depth; ++p) {
                    r.at(d, p) = r.at(d, p) + RingOps<R>::mul_double(v, binom);
                    binom *= double(d + p) / double(p + 1);
                }
                // next-term tail estimate with geometric slack
                const double t_next = RingOps<R>::mag(v) * binom * r.weight(d, depth + 1);
                const double ratio = double(d + depth + 1) / double(depth + 2) * r.rv_nom_;
                dropped += (ratio < 0.9) ? t_next / (1.0 - ratio) : t_next * 10.0;
            }
        }
        r.tail_ = dropped;
        return r;
    }

    AnnulusSeries poisson_of_restriction() const {
        return poisson_extend(diag_restrict(*this), Q_, P_, nominal_band());
    }

    // Complex conjugation of the realized function:
    // (zeta^q v^p)* = eta^q v^p = zeta^{-q} (1-v)^q v^p.
    friend AnnulusSeries hermitian_transpose(const AnnulusSeries& f) {
        const int Q = f.Q_, P = f.P_;
        AnnulusSeries r(Q, P, f.nominal_band());
        double dropped = 0.0;
        for (int q = -Q; q <= Q; ++q) {
            // coefficients of (1-v)^q as a v-series
            std::vector<double> w(static_cast<std::size_t>(P) + 2, 0.0);
            if (q >= 0) {
                double binom = 1.0;
                for (int i = 0; i <= std::min(q, P + 1); ++i) {
                    w[static_cast<std::size_t>(i)] = (i % 2 == 0) ? binom : -binom;
                    binom *= double(q - i) / double(i + 1);
                }
            } else {
                double binom = 1.0;
                for (int i = 0; i <= P + 1; ++i) {
                    w[static_cast<std::size_t>(i)] = binom;
                    binom *= double(-q + i) / double(i + 1);
                }
            }
            for (int p = 0; p <= P; ++p) {
                const R a = RingOps<R>::conj(f.at(q, p));
                if (RingOps<R>::mag(a) == 0.0) continue;
                const int imax = (q >= 0) ? std::min(q, P - p) : (P - p);
                for (int i = 0; i <= imax; ++i)
                    if (w[static_cast<std::size_t>(i)] != 0.0)
                        r.at(-q, p + i) =
                            r.at(-q, p + i) + RingOps<R>::mul_double(a, w[static_cast<std::size_t>(i)]);
                // dropped depth for truncated binomial expansions
                if ((q >= 0 && q > P - p) || q < 0) {
                    const int inext = imax + 1;
                    if (!(q >= 0 && inext > q))
                        dropped += RingOps<R>::mag(a) * std::abs(w[static_cast<std::size_t>(inext)]) *
                                   f.weight(-q, p + inext);
                }
            }
        }
        r.tail_ = f.tail_ + dropped;
        return r;
    }

    // d/dzeta (zeta^q v^p) = zeta^{q-1} ((q+p) v^p - p v^{p-1})
    friend AnnulusSeries d_zeta(const AnnulusSeries& f) {
        const int Q = f.Q_, P = f.P_;
        AnnulusSeries r(Q, P, f.nominal_band());
        double dropped = 0.0;
        for (int q = -Q; q <= Q; ++q)
            for (int p = 0; p <= P; ++p) {
                const R& a = f.at(q, p);
                if (RingOps<R>::mag(a) == 0.0) continue;
                if (q - 1 >= -Q) {
                    if (q + p != 0)
                        r.at(q - 1, p) = r.at(q - 1, p) + RingOps<R>::mul_double(a, double(q + p));
                    if (p > 0)
                        r.at(q - 1, p - 1) = r.at(q - 1, p - 1) - RingOps<R>::mul_double(a, double(p));
                } else {
                    dropped += RingOps<R>::mag(a) * (std::abs(double(q + p)) + double(p)) *
                               f.weight(q - 1, p);
                }
            }
        r.tail_ = f.tail_ + dropped;
        return r;
    }

    // d/deta (zeta^q v^p) = -p zeta^{q+1} v^{p-1}
    friend AnnulusSeries d_eta(const AnnulusSeries& f) {
        const int Q = f.Q_, P = f.P_;
        AnnulusSeries r(Q, P, f.nominal_band());
        double dropped = 0.0;
        for (int q = -Q; q <= Q; ++q)
            for (int p = 1; p <= P; ++p) {
                const R& a = f.at(q, p);
                if (RingOps<R>::mag(a) == 0.0) continue;
                if (q + 1 <= Q)
                    r.at(q + 1, p - 1) = r.at(q + 1, p - 1) - RingOps<R>::mul_double(a, double(p));
                else
                    dropped += RingOps<R>::mag(a) * double(p) * f.weight(q + 1, p - 1);
            }
        r.tail_ = f.tail_ + dropped;
        return r;
    }

    // Weighted coefficient sum bounding the sup over the working polydomain
    // {|log zeta| <= log(1/rho)} x {|v| <= rv}; submultiplicative.
    double working_norm(const Band& band) const {
        const double rho = band.rho;
        const double rv = 1.0 / (rho * rho) - 1.0;
        double s = 0.0;
        for (int q = -Q_; q <= Q_; ++q)
            for (int p = 0; p <= P_; ++p) {
                const double m = RingOps<R>::mag(at(q, p));
                if (m != 0.0) s += m * std::pow(rho, -double(std::abs(q))) * std::pow(rv, double(p));
            }
        return s;
    }
    double working_norm() const { return working_norm_nominal(); }

    R evaluate(const std::complex<double>& zeta, const std::complex<double>& eta) const {
        const std::complex<double> v = 1.0 - zeta * eta;
        R total = RingOps<R>::zero();
        const std::complex<double> inv_zeta = 1.0 / zeta;
        std::complex<double> zq = std::pow(inv_zeta, Q_);
        for (int q = -Q_; q <= Q_; ++q) {
            R row = RingOps<R>::zero();
            for (int p = P_; p >= 0; --p) row = row * R(v) + at(q, p);
            total = total + row * R(zq);
            zq *= zeta;
        }
        return total;
    }
    R evaluate_physical(const std::complex<double>& zeta) const {
        return evaluate(zeta, std::conj(zeta));
    }

    // Conversion to the public monomial representation:
    // zeta^q v^p -> sum_i C(p,i) (-1)^i zeta^{q+i} eta^i.
    HermitianSeries<R> to_hermitian(int order) const {
        HermitianSeries<R> h(order);
        double dropped = 0.0;
        for (int q = -Q_; q <= Q_; ++q)
            for (int p = 0; p <= P_; ++p) {
                const R& a = at(q, p);
                if (RingOps<R>::mag(a) == 0.0) continue;
                double binom = 1.0;
                for (int i = 0; i <= p; ++i) {
                    const double coef = (i % 2 == 0) ? binom : -binom;
                    const int j = q + i, k = i;
                    if (std::abs(j) <= order && k <= order)
                        h.at(j, k) = h.at(j, k) + RingOps<R>::mul_double(a, coef);
                    else
                        dropped += RingOps<R>::mag(a) * std::abs(coef);
                    binom *= double(p - i) / double(i + 1);
                }
            }
        h.add_tail(dropped);
        return h;
    }

    // Conversion from the monomial representation:
    // zeta^j eta^k = zeta^{j-k} (1-v)^k, expanded in v.
    static AnnulusSeries from_hermitian(const HermitianSeries<R>& h, int modes, int depth,
                                        const Band& nominal) {
        AnnulusSeries r(modes, depth, nominal);
        double dropped = 0.0;
        for (int j = -h.order(); j <= h.order(); ++j)
            for (int k = -h.order(); k <= h.order(); ++k) {
                const R& a = h.at(j, k);
                if (RingOps<R>::mag(a) == 0.0) continue;
                const int q = j - k;
                if (std::abs(q) > modes) {
                    dropped += RingOps<R>::mag(a) * r.weight(q, 0);
                    continue;
                }
                if (k >= 0) {
                    double binom = 1.0;
                    for (int i = 0; i <= std::min(k, depth); ++i) {
                        const double coef = (i % 2 == 0) ? binom : -binom;
                        r.at(q, i) = r.at(q, i) + RingOps<R>::mul_double(a, coef);
                        binom *= double(k - i) / double(i + 1);
                    }
                    if (k > depth) dropped += RingOps<R>::mag(a) * binom * r.weight(q, depth + 1);
                } else {
                    double binom = 1.0; // (1-v)^k, k<0: sum_p C(-k-1+p, p) v^p
                    for (int p = 0; p <= depth; ++p) {
                        r.at(q, p) = r.at(q, p) + RingOps<R>::mul_double(a, binom);
                        binom *= double(-k + p) / double(p + 1);
                    }
                    dropped += RingOps<R>::mag(a) * binom * r.weight(q, depth + 1);
                }
            }
        r.tail_ = dropped;
        return r;
    }

    Band nominal_band() const {
        // invert rho -> sigma: sigma = (1 - rho^2) / (2 rho)
        return Band((1.0 - rho_nom_ * rho_nom_) / (2.0 * rho_nom_));
    }

    double weight(int q, int p) const {
        return std::pow(rho_nom_, -double(std::abs(q))) * std::pow(rv_nom_, double(p));
    }

private:
    double working_norm_nominal() const {
        double s = 0.0;
        for (int q = -Q_; q <= Q_; ++q)
            for (int p = 0; p <= P_; ++p) {
                const double m = RingOps<R>::mag(at(q, p));
                if (m != 0.0) s += m * weight(q, p);
            }
        return s;
    }

    std::size_t index(int q, int p) const {
        if (std::abs(q) > Q_ || p < 0 || p > P_)
            throw UsageError("annulus series index out of range");
        return static_cast<std::size_t>(q + Q_) * (static_cast<std::size_t>(P_) + 1) +
               static_cast<std::size_t>(p);
    }
    void check_shape(const AnnulusSeries& o) const {
        if (Q_ != o.Q_ || P_ != o.P_) throw UsageError("annulus series shape mismatch");
    }

    int Q_, P_;
    double rho_nom_, rv_nom_;
    std::vector<R> d_;
    double tail_;
};

// fn(f) expanded around the scalar center c = F at (zeta=1, v=0).
template <class R>
AnnulusSeries<R> analytic_apply(AnalyticFn fn, const AnnulusSeries<R>& f, double safety = 0.95,
                                int max_terms = 160, double stop_rel = 1e-17) {
    R c = RingOps<R>::zero();
    for (int q = -f.modes(); q <= f.modes(); ++q) c = c + f.at(q, 0);
    const std::complex<double> c0 = RingOps<R>::leading(c);
    if ((fn == AnalyticFn::Sqrt || fn == AnalyticFn::Log) && !(c0.real() > 0.0))
        throw NumericError("analytic_apply: center off the right half-plane for sqrt/log");
    if (RingOps<R>::mag(c) == 0.0) throw NumericError("analytic_apply: zero center value");

    AnnulusSeries<R> u = f;
    u.scale(RingOps<R>::recip(c));
    u.at(0, 0) = u.at(0, 0) - R(1.0);
    const double nu = u.working_norm();
    if (!(nu < safety))
        throw NumericError("analytic_apply: centered part norm " + std::to_string(nu) +
                           " exceeds safety factor " + std::to_string(safety));

    auto alpha = [&](int k, const R& prev) -> R {
        switch (fn) {
            case AnalyticFn::Exp:
                return k == 0 ? RingOps<R>::exp(c) : prev * c * R(1.0 / double(k));
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

    AnnulusSeries<R> acc(f.modes(), f.depth(), f.nominal_band());
    AnnulusSeries<R> upow = AnnulusSeries<R>::constant(f.modes(), f.depth(), f.nominal_band(), R(1.0));
    R a = RingOps<R>::zero();
    double base = 0.0;
    for (int k = 0; k <= max_terms; ++k) {
        a = alpha(k, a);
        AnnulusSeries<R> term = upow;
        term.scale(a);
        acc += term;
        if (k == 0) base = std::max(1.0, RingOps<R>::mag(a));
        const double bound = RingOps<R>::mag(a) * std::pow(nu, k);
        if (k >= 2 && bound < stop_rel * base) break;
        if (k == max_terms)
            throw NumericError("analytic_apply: power series did not converge in " +
                               std::to_string(max_terms) + " terms (norm " + std::to_string(nu) + ")");
        upow = multiply(upow, u);
    }
    return acc;
}

// Component extraction / lifting between rings (declared below analytic_apply
// so the jet fast path can use them).
inline AnnulusSeries<Jet> lift_to_jets(const AnnulusSeries<std::complex<double>>& f, int jet_order) {
    AnnulusSeries<Jet> r(f.modes(), f.depth(), f.nominal_band());
    for (int q = -f.modes(); q <= f.modes(); ++q)
        for (int p = 0; p <= f.depth(); ++p)
            if (std::abs(f.at(q, p)) != 0.0) r.at(q, p) = Jet::constant(jet_order, f.at(q, p));
    r.add_tail(f.tail());
    return r;
}

inline AnnulusSeries<std::complex<double>> jet_component(const AnnulusSeries<Jet>& f, int k) {
    AnnulusSeries<std::complex<double>> r(f.modes(), f.depth(), f.nominal_band());
    for (int q = -f.modes(); q <= f.modes(); ++q)
        for (int p = 0; p <= f.depth(); ++p) r.at(q, p) = f.at(q, p).coeff(k);
    r.add_tail(f.tail());
    return r;
}

inline CircleSeries<std::complex<double>> jet_component(const CircleSeries<Jet>& b, int k) {
    CircleSeries<std::complex<double>> r(b.degree());
    for (int d = -b.degree(); d <= b.degree(); ++d) r.at(d) = b.at(d).coeff(k);
    return r;
}

using AnnulusD = AnnulusSeries<std::complex<double>>;
using AnnulusJ = AnnulusSeries<Jet>;

// Jet fast path for analytic_apply: expand around the scalar leading center,
// run the power series in the base ring, and add the nilpotent correction
//   fn(f) = sum_r G_r * delta^r,   G_r = sum_k alpha_k C(k,r) u0^{k-r},
// where u0 is the leading component of the centered part and delta the rest.
inline AnnulusJ analytic_apply_jets(AnalyticFn fn, const AnnulusJ& f, int jet_order,
                                    double safety = 0.95, int max_terms = 160,
                                    double stop_rel = 1e-17) {
    using C = std::complex<double>;
    Jet c = Jet::zero(jet_order);
    for (int q = -f.modes(); q <= f.modes(); ++q) c = c + f.at(q, 0);
    const C c0 = c.value();
    if ((fn == AnalyticFn::Sqrt || fn == AnalyticFn::Log) && !(c0.real() > 0.0))
        throw NumericError("analytic_apply: center off the right half-plane for sqrt/log");
    if (std::abs(c0) == 0.0) throw NumericError("analytic_apply: zero center value");

    AnnulusJ u = f;
    u.scale(Jet(1.0 / c0));
    u.at(0, 0) = u.at(0, 0) - Jet(1.0);
    const double nu = u.working_norm();
    if (!(nu < safety))
        throw NumericError("analytic_apply: centered part norm " + std::to_string(nu) +
                           " exceeds safety factor " + std::to_string(safety));

    AnnulusD u0 = jet_component(u, 0);
    AnnulusJ delta = u - lift_to_jets(u0, jet_order);

    auto alpha = [&](int k, C prev) -> C {
        switch (fn) {
            case AnalyticFn::Exp: return k == 0 ? std::exp(c0) : prev * c0 / double(k);
            case AnalyticFn::Log:
                return k == 0 ? std::log(c0)
                              : (k == 1 ? C(1.0) : prev * (-double(k - 1) / double(k)));
            case AnalyticFn::Sqrt:
                return k == 0 ? std::sqrt(c0) : prev * ((1.5 - double(k)) / double(k));
            case AnalyticFn::Reciprocal: return k == 0 ? 1.0 / c0 : -prev;
        }
        return C(0.0);
    };

    const int K = jet_order;
    std::vector<AnnulusD> G(static_cast<std::size_t>(K) + 1,
                            AnnulusD(f.modes(), f.depth(), f.nominal_band()));
    // ring buffer of the last K+1 powers of u0
    std::vector<AnnulusD> pow_buf;
    pow_buf.reserve(static_cast<std::size_t>(K) + 1);
    AnnulusD upow = AnnulusD::constant(f.modes(), f.depth(), f.nominal_band(), C(1.0));
    C a(0.0);
    double nu0 = u0.working_norm();
    for (int k = 0; k <= max_terms; ++k) {
        a = alpha(k, a);
        if (static_cast<int>(pow_buf.size()) <= K)
            pow_buf.push_back(upow);
        else {
            for (int i = 0; i < K; ++i) pow_buf[static_cast<std::size_t>(i)] = std::move(pow_buf[static_cast<std::size_t>(i) + 1]);
            pow_buf[static_cast<std::size_t>(K)] = upow;
        }
        // pow_buf.back() is u0^k; u0^{k-r} sits r slots earlier when available
        double binom = 1.0;
        for (int r = 0; r <= std::min(k, K); ++r) {
            const int slot = static_cast<int>(pow_buf.size()) - 1 - r;
            AnnulusD term = pow_buf[static_cast<std::size_t>(slot)];
            term.scale(a * binom);
            G[static_cast<std::size_t>(r)] += term;
            binom *= double(k - r) / double(r + 1);
        }
        const double crude = std::abs(a) * std::max(1.0, binom * double(k + 1)) *
                             std::pow(std::max(nu0, nu), std::max(0, k - K));
        if (k >= K + 2 && crude < stop_rel * std::max(1.0, std::abs(alpha(0, C(0.0))))) break;
        if (k == max_terms)
            throw NumericError("analytic_apply: power series did not converge in " +
                               std::to_string(max_terms) + " terms (norm " + std::to_string(nu) + ")");
        upow = multiply(upow, u0);
    }

    AnnulusJ result = lift_to_jets(G[0], jet_order);
    AnnulusJ dpow = delta;
    for (int r = 1; r <= K; ++r) {
        result += multiply(lift_to_jets(G[static_cast<std::size_t>(r)], jet_order), dpow);
        if (r < K) dpow = multiply(dpow, delta);
    }
    return result;
}

} // namespace orthowave
