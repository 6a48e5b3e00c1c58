#pragma once

#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "orthowave/annulus.hpp"
#include "orthowave/geometry.hpp"

namespace orthowave {

struct EngineParams {
    double theta = 0.01;       // small parameter 1/m
    int iterations = -1;       // -1: auto (plateau rule with cap eps*theta^{-1/2})
    double auto_cap_eps = 1.0; // eps in the auto iteration cap
    double vanish_tol = 1e-9;
    double divergence_factor = 10.0;
    int jet_order = 2;
};

// Iterates, residuals and expansion coefficients. The double-ring run fills
// iterates/residuals; the jet run fills ehat/hhat (theta-independent).
struct ExpansionTable {
    std::vector<AnnulusD> iterates;
    std::vector<double> residuals;   // residuals[j] = ||E_j - T[E_j]||
    std::vector<double> tail_masses;
    int plateau_index = -1;

    std::vector<AnnulusD> ehat;      // Ehat_0..Ehat_K
    std::vector<CircleD> hhat;       // Fourier data on the curve of hhat_0..hhat_K
    std::vector<double> remainder_bounds;
};

// Computable surrogates for the iteration-control constants, assembled from
// measured norms. Diagnostics, not certified bounds.
struct Budget {
    double sigma = 0.0, sigma_prime = 0.0, theta = 0.0, eps0 = 0.0;
    double norm_dV = 0.0;            // ||dV||_sigma
    double norm_recip_dV2 = 0.0;     // ||(dV)^{-2}||_sigma'
    double norm_unit_over_V = 0.0;   // ||(1-|phi|^2)/V||_sigma
    double norm_phiprime = 0.0;      // ||phi'||_sigma
    double norm_recip_L = 0.0;       // sup_{|theta|<=eps0} ||1/L||_sigma
    double norm_lapV = 0.0;          // ||lap V||_sigma
    double norm_P_logL = 0.0;        // ||P[log L]||_sigma
    double C0 = 0.0, C1 = 0.0, C3 = 0.0;
    double M0 = 0.0, M1 = 0.0;
    double m0 = 0.0, m1 = 0.0;
    double r0 = 0.0;
    double C2 = 0.0;
    int k_cap = 0;
    double rho0 = 0.0;

    static double shape_M0(double C0, double s, double sp, double th) {
        return C0 * (1.0 / ((s - sp) * sp) + std::abs(th) / (std::pow(s - sp, 3) * sp));
    }
    static double shape_M1(double C1, double s, double sp, double th) {
        return C1 * (1.0 / (sp * sp * (s - sp) * (s - sp)) +
                     std::abs(th) / (sp * sp * std::pow(s - sp, 4)));
    }
    std::string to_text() const;
};

// Harmonic/auxiliary fields derived from an approximate solution E at a
// numeric theta: Poisson data of h (constant already shifted), Poisson data
// of the harmonic part of H (H = log|phi|^2 + that part), and the smooth G.
struct ApproxFields {
    double theta = 0.0;
    CircleD h_data;
    CircleD H_harm_data;
    AnnulusD G;
    AnnulusD E;
};

// ---------------------------------------------------------------------------
// Operators over any scalar ring (complex<double> or Jet).

template <class R>
struct EngineContext {
    const DropletGeometry* geom;
    R theta;
    AnnulusSeries<R> phiprime, phiprime_bar, dV, dVbar, absdV2, lapV;
    AnnulusSeries<R> inv_sqrt_unit, recip_absdV2, L;
    double vanish_tol;
    int jet_order = 0;
};

// analytic_apply dispatch: generic for scalars, fast path for jets.
template <class R>
struct ApplyFn {
    static AnnulusSeries<R> run(AnalyticFn fn, const AnnulusSeries<R>& f, int) {
        return analytic_apply(fn, f);
    }
};
template <>
struct ApplyFn<Jet> {
    static AnnulusJ run(AnalyticFn fn, const AnnulusJ& f, int jet_order) {
        return analytic_apply_jets(fn, f, jet_order);
    }
};

EngineContext<Cd> make_context(const DropletGeometry& geom, Cd theta, double vanish_tol = 1e-9);
EngineContext<Jet> make_context_jets(const DropletGeometry& geom, int jet_order,
                                     double vanish_tol = 1e-9);

template <class R>
AnnulusSeries<R> ctx_laplacian(const EngineContext<R>& ctx, const AnnulusSeries<R>& f) {
    return multiply(multiply(ctx.phiprime, ctx.phiprime_bar), d_zeta(d_eta(f)));
}

template <class R>
AnnulusSeries<R> ctx_over_V(const EngineContext<R>& ctx, const AnnulusSeries<R>& f) {
    AnnulusSeries<R> g = multiply(diag_divide(f, ctx.vanish_tol), ctx.inv_sqrt_unit);
    g.scale(-1.0);
    return g;
}

// S[f] = dV dbar f + dVbar d f + f lapV + |dV|^2 (P-I)f/V + (theta/4) lap((P-I)f/V)
template <class R>
AnnulusSeries<R> op_S_ctx(const EngineContext<R>& ctx, const AnnulusSeries<R>& f) {
    const AnnulusSeries<R> df = multiply(ctx.phiprime, d_zeta(f));
    const AnnulusSeries<R> dbarf = multiply(ctx.phiprime_bar, d_eta(f));
    AnnulusSeries<R> pdiff = f.poisson_of_restriction();
    pdiff -= f;
    // (P-I)f vanishes on the curve by construction in this representation.
    const AnnulusSeries<R> pv = ctx_over_V(ctx, pdiff);
    AnnulusSeries<R> s = multiply(ctx.dV, dbarf);
    s += multiply(ctx.dVbar, df);
    s += multiply(f, ctx.lapV);
    s += multiply(ctx.absdV2, pv);
    AnnulusSeries<R> corr = ctx_laplacian(ctx, pv);
    corr.scale(ctx.theta * R(0.25));
    s += corr;
    return s;
}

// T[f] = (1/(4 V |dV|^2)) { L + theta S[f] - exp(P[log(L + theta S[f])]) }
template <class R>
AnnulusSeries<R> op_T_ctx(const EngineContext<R>& ctx, const AnnulusSeries<R>& f) {
    AnnulusSeries<R> A = op_S_ctx(ctx, f);
    A.scale(ctx.theta);
    A += ctx.L;

    // positivity of the argument on the curve
    {
        CircleSeries<R> row = diag_restrict(A);
        for (int i = 0; i < 8; ++i) {
            const Cd zeta = std::polar(1.0, 2.0 * M_PI * (i + 0.13) / 8.0);
            R val = RingOps<R>::zero();
            for (int d = -row.degree(); d <= row.degree(); ++d)
                val = val + row.at(d) * R(std::pow(zeta, d));
            if (!(RingOps<R>::leading(val).real() > 0.0))
                throw NumericError("op_T: L + theta*S[f] is not positive on the curve");
        }
    }

    const AnnulusSeries<R> logA = ApplyFn<R>::run(AnalyticFn::Log, A, ctx.jet_order);
    const AnnulusSeries<R> PlogA = logA.poisson_of_restriction();
    const AnnulusSeries<R> expP = ApplyFn<R>::run(AnalyticFn::Exp, PlogA, ctx.jet_order);
    AnnulusSeries<R> bracket = A - expP;

    const double scale = std::max(bracket.working_norm(), std::max(A.working_norm(), 1e-300));
    if (bracket.restriction_mass() > 1e-9 * scale)
        throw NumericError("op_T: bracket does not vanish on the curve (mass " +
                           std::to_string(bracket.restriction_mass()) + " vs scale " +
                           std::to_string(scale) + ")");

    AnnulusSeries<R> t = multiply(ctx_over_V(ctx, bracket), ctx.recip_absdV2);
    t.scale(0.25);
    return t;
}

// Convenience wrappers matching the module surface.
AnnulusD op_S(const DropletGeometry& geom, Cd theta, const AnnulusD& f);
AnnulusD op_T(const DropletGeometry& geom, Cd theta, const AnnulusD& f);
AnnulusJ op_S_jets(const DropletGeometry& geom, int jet_order, const AnnulusJ& f);
AnnulusJ op_T_jets(const DropletGeometry& geom, int jet_order, const AnnulusJ& f);

// Fixed-point iteration E_0 = T[0], E_{j+1} = T[E_j].
ExpansionTable iterate(const DropletGeometry& geom, const EngineParams& params,
                       const Budget* budget = nullptr);

// Jet-ring iteration; extracts Ehat_j (j <= K) and hhat_j from the final iterate.
ExpansionTable coeffs_via_jets(const DropletGeometry& geom, int jet_order, int iterations,
                               double vanish_tol = 1e-9);

// h = (1/2) P[log(L + theta S[E])] - (1/4) log(pi/2),
// H = log|phi|^2 + theta P[E],  G = (H - theta E)/(2V).
ApproxFields h_approx(const DropletGeometry& geom, double theta, const AnnulusD& E,
                      double vanish_tol = 1e-9);

// Truncated expansion sum_{j<=k'} theta^j hhat_j with a Taylor remainder bound.
struct TruncatedH {
    CircleD data;
    double remainder_bound;
};
double truncation_bound(int k, double z_ratio, double norm);
TruncatedH truncate_h(const std::vector<CircleD>& hhat, int k_prime, double theta,
                      double theta_max, double norm_estimate);

// Assemble numeric-theta fields from jet coefficients:
// E = sum theta^j Ehat_j, h truncated at k_prime, H and G from E.
ApproxFields assemble_from_jets(const DropletGeometry& geom, const ExpansionTable& jets,
                                double theta, int k_prime, double vanish_tol = 1e-9);

// Closed-form first coefficients, evaluated directly (independent of the jet
// route): Ehat_0, Ehat_1 and the boundary data of hhat_0, hhat_1, hhat_2.
struct DirectCoefficients {
    AnnulusD e0, e1;
    CircleD h0, h1, h2;
};
DirectCoefficients direct_coefficients(const DropletGeometry& geom, double vanish_tol = 1e-9);

Budget lipschitz_budget(const DropletGeometry& geom, double sigma, double sigma_prime,
                        double theta, double eps0 = 0.1);

} // namespace orthowave
