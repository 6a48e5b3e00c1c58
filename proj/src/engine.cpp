#include "orthowave/engine.hpp"

#include <cmath>
#include <iostream>
#include <sstream>

namespace orthowave {

namespace {
const double kQuarterLogHalfPi = 0.25 * std::log(M_PI / 2.0);

CircleD scale_circle(const CircleD& b, double s) {
    CircleD r(b.degree());
    for (int d = -b.degree(); d <= b.degree(); ++d) r.at(d) = b.at(d) * s;
    return r;
}
} // namespace

EngineContext<Cd> make_context(const DropletGeometry& geom, Cd theta, double vanish_tol) {
    EngineContext<Cd> ctx{&geom,
                          theta,
                          geom.phiprime,
                          geom.phiprime_bar,
                          geom.dV,
                          geom.dVbar,
                          geom.absdV2,
                          geom.lapV,
                          geom.inv_sqrt_unit,
                          geom.recip_absdV2,
                          compute_L<Cd>(geom, theta),
                          vanish_tol,
                          0};
    return ctx;
}

EngineContext<Jet> make_context_jets(const DropletGeometry& geom, int jet_order,
                                     double vanish_tol) {
    const Jet theta = Jet::variable(jet_order);
    EngineContext<Jet> ctx{&geom,
                           theta,
                           lift_to_jets(geom.phiprime, jet_order),
                           lift_to_jets(geom.phiprime_bar, jet_order),
                           lift_to_jets(geom.dV, jet_order),
                           lift_to_jets(geom.dVbar, jet_order),
                           lift_to_jets(geom.absdV2, jet_order),
                           lift_to_jets(geom.lapV, jet_order),
                           lift_to_jets(geom.inv_sqrt_unit, jet_order),
                           lift_to_jets(geom.recip_absdV2, jet_order),
                           compute_L<Jet>(geom, theta),
                           vanish_tol,
                           jet_order};
    return ctx;
}

AnnulusD op_S(const DropletGeometry& geom, Cd theta, const AnnulusD& f) {
    return op_S_ctx(make_context(geom, theta), f);
}
AnnulusD op_T(const DropletGeometry& geom, Cd theta, const AnnulusD& f) {
    return op_T_ctx(make_context(geom, theta), f);
}
AnnulusJ op_S_jets(const DropletGeometry& geom, int jet_order, const AnnulusJ& f) {
    return op_S_ctx(make_context_jets(geom, jet_order), f);
}
AnnulusJ op_T_jets(const DropletGeometry& geom, int jet_order, const AnnulusJ& f) {
    return op_T_ctx(make_context_jets(geom, jet_order), f);
}

ExpansionTable iterate(const DropletGeometry& geom, const EngineParams& params,
                       const Budget* budget) {
    ExpansionTable table;
    const EngineContext<Cd> ctx = make_context(geom, Cd(params.theta), params.vanish_tol);

    if (budget && params.theta != 0.0 && std::abs(params.theta) > budget->rho0)
        std::cerr << "[engine] warning: |theta| = " << std::abs(params.theta)
                  << " exceeds the budget radius rho0 = " << budget->rho0 << "\n";

    int cap = params.iterations;
    if (cap < 0) {
        cap = params.theta != 0.0
                  ? std::max(3, int(std::floor(params.auto_cap_eps /
                                               std::sqrt(std::abs(params.theta)))))
                  : 3;
        if (budget && budget->k_cap > 0) cap = std::min(cap, budget->k_cap);
    }

    AnnulusD zero = geom.zero_like();
    AnnulusD e = op_T_ctx(ctx, zero); // E_0
    if (budget && e.working_norm() > budget->r0 && budget->r0 > 0.0)
        std::cerr << "[engine] warning: ||E_0|| outside the budget ball r0\n";
    table.iterates.push_back(e);
    table.tail_masses.push_back(e.tail());

    double best = 1e300;
    int stall = 0;
    for (int j = 0; j < cap; ++j) {
        AnnulusD next = op_T_ctx(ctx, e);
        const double res = (e - next).working_norm();
        table.residuals.push_back(res);
        if (res > params.divergence_factor * best && best < 1e300)
            throw NumericError("iterate: residual diverged (" + std::to_string(res) +
                               " vs best " + std::to_string(best) + ")");
        if (res < best) {
            best = res;
            stall = 0;
        } else if (++stall >= 3) {
            table.plateau_index = j;
            table.iterates.push_back(next);
            table.tail_masses.push_back(next.tail());
            e = std::move(next);
            break;
        }
        table.iterates.push_back(next);
        table.tail_masses.push_back(next.tail());
        e = std::move(next);
    }
    // residual of the final iterate
    {
        AnnulusD last = op_T_ctx(ctx, e);
        table.residuals.push_back((e - last).working_norm());
    }
    return table;
}

ExpansionTable coeffs_via_jets(const DropletGeometry& geom, int jet_order, int iterations,
                               double vanish_tol) {
    if (jet_order > iterations)
        throw UsageError("coeffs_via_jets: jet order must not exceed the iteration count "
                         "(coefficients are stable only up to the iteration order)");
    const EngineContext<Jet> ctx = make_context_jets(geom, jet_order, vanish_tol);

    AnnulusJ e(geom.params.modes, geom.params.depth, Band(geom.params.band_sigma));
    for (int j = 0; j <= iterations; ++j) e = op_T_ctx(ctx, e);

    ExpansionTable table;
    for (int j = 0; j <= jet_order; ++j) table.ehat.push_back(jet_component(e, j));

    // h = (1/2) P[log(L + theta S[E])] - (1/4) log(pi/2); P only sees the
    // boundary data, so the jet components of the restriction are the hhat_j.
    AnnulusJ A = op_S_ctx(ctx, e);
    A.scale(ctx.theta);
    A += ctx.L;
    AnnulusJ logA = analytic_apply_jets(AnalyticFn::Log, A, jet_order);
    CircleSeries<Jet> b = diag_restrict(logA);
    for (int j = 0; j <= jet_order; ++j) {
        CircleD data = scale_circle(jet_component(b, j), 0.5);
        if (j == 0) data.at(0) -= kQuarterLogHalfPi;
        table.hhat.push_back(data);
    }
    return table;
}

ApproxFields h_approx(const DropletGeometry& geom, double theta, const AnnulusD& E,
                      double vanish_tol) {
    const EngineContext<Cd> ctx = make_context(geom, Cd(theta), vanish_tol);
    ApproxFields out;
    out.theta = theta;
    out.E = E;

    AnnulusD A = op_S_ctx(ctx, E);
    A.scale(Cd(theta));
    A += ctx.L;
    {
        CircleD row = diag_restrict(A);
        for (int i = 0; i < 8; ++i) {
            const Cd zeta = std::polar(1.0, 2.0 * M_PI * (i + 0.39) / 8.0);
            Cd val(0.0);
            for (int d = -row.degree(); d <= row.degree(); ++d)
                val += row.at(d) * std::pow(zeta, d);
            if (!(val.real() > 0.0))
                throw NumericError("h_approx: L + theta*S[E] is not positive on the curve");
        }
    }
    AnnulusD logA = analytic_apply(AnalyticFn::Log, A);
    out.h_data = scale_circle(diag_restrict(logA), 0.5);
    out.h_data.at(0) -= kQuarterLogHalfPi;

    out.H_harm_data = scale_circle(diag_restrict(E), theta);

    // G = (theta (P - I) E + log|phi|^2) / (2V)
    AnnulusD numer = E.poisson_of_restriction() - E;
    numer.scale(Cd(theta));
    AnnulusD log2(geom.params.modes, geom.params.depth, Band(geom.params.band_sigma));
    for (int p = 1; p <= geom.params.depth; ++p) log2.at(0, p) = Cd(-1.0 / double(p));
    numer += log2;
    out.G = geom.over_V(numer);
    out.G.scale(0.5);
    return out;
}

double truncation_bound(int k, double z_ratio, double norm) {
    if (!(z_ratio >= 0.0 && z_ratio < 1.0))
        throw UsageError("truncation_bound: |z| ratio must lie in [0,1)");
    return std::pow(z_ratio, k + 1) *
           (1.0 + std::log(1.0 / (1.0 - z_ratio * z_ratio)) / M_PI) * norm;
}

TruncatedH truncate_h(const std::vector<CircleD>& hhat, int k_prime, double theta,
                      double theta_max, double norm_estimate) {
    if (k_prime < 0 || k_prime >= static_cast<int>(hhat.size()))
        throw UsageError("truncate_h: truncation order exceeds available jet order");
    int deg = 0;
    for (const auto& h : hhat) deg = std::max(deg, h.degree());
    TruncatedH out{CircleD(deg), 0.0};
    double th_pow = 1.0;
    for (int j = 0; j <= k_prime; ++j) {
        for (int d = -hhat[static_cast<std::size_t>(j)].degree();
             d <= hhat[static_cast<std::size_t>(j)].degree(); ++d)
            out.data.at(d) += hhat[static_cast<std::size_t>(j)].at(d) * th_pow;
        th_pow *= theta;
    }
    // full jets leave no polynomial remainder; otherwise the Taylor bound
    if (k_prime + 1 >= static_cast<int>(hhat.size()))
        out.remainder_bound = 0.0;
    else
        out.remainder_bound = truncation_bound(k_prime, std::abs(theta) / theta_max, norm_estimate);
    return out;
}

ApproxFields assemble_from_jets(const DropletGeometry& geom, const ExpansionTable& jets,
                                double theta, int k_prime, double vanish_tol) {
    if (jets.ehat.empty() || jets.hhat.empty())
        throw UsageError("assemble_from_jets: table has no jet coefficients");
    k_prime = std::min<int>(k_prime, static_cast<int>(jets.hhat.size()) - 1);

    ApproxFields out;
    out.theta = theta;

    // E(theta) = sum theta^j Ehat_j
    AnnulusD E = jets.ehat[0];
    double th_pow = theta;
    for (std::size_t j = 1; j < jets.ehat.size(); ++j) {
        AnnulusD term = jets.ehat[j];
        term.scale(Cd(th_pow));
        E += term;
        th_pow *= theta;
    }
    out.E = E;

    double norm_est = 0.0;
    for (const auto& h : jets.hhat) norm_est = std::max(norm_est, h.max_abs());
    const double theta_max = std::max(0.5, 2.0 * std::abs(theta));
    TruncatedH th = truncate_h(jets.hhat, k_prime, theta, theta_max, std::max(norm_est, 1.0));
    out.h_data = th.data;

    out.H_harm_data = scale_circle(diag_restrict(E), theta);

    AnnulusD numer = E.poisson_of_restriction() - E;
    numer.scale(Cd(theta));
    AnnulusD log2(geom.params.modes, geom.params.depth, Band(geom.params.band_sigma));
    for (int p = 1; p <= geom.params.depth; ++p) log2.at(0, p) = Cd(-1.0 / double(p));
    numer += log2;
    out.G = geom.over_V(numer);
    out.G.scale(0.5);
    (void)vanish_tol;
    return out;
}

DirectCoefficients direct_coefficients(const DropletGeometry& geom, double vanish_tol) {
    const EngineContext<Cd> ctx0 = make_context(geom, Cd(0.0), vanish_tol);
    DirectCoefficients out{geom.zero_like(), geom.zero_like(), CircleD(0), CircleD(0), CircleD(0)};

    const AnnulusD& L0 = geom.l0;
    const AnnulusD& L1 = geom.l1;
    AnnulusD logL0 = analytic_apply(AnalyticFn::Log, L0);
    AnnulusD PlogL0 = logL0.poisson_of_restriction();
    AnnulusD expP = analytic_apply(AnalyticFn::Exp, PlogL0);

    // Ehat_0 = (L0 - exp(P[log L0])) / (4 V |dV|^2)
    out.e0 = multiply(ctx_over_V(ctx0, L0 - expP), geom.recip_absdV2);
    out.e0.scale(0.25);

    // Ehat_1 = (L1 + S0[E0] - exp(P[log L0]) P[(L1 + S0[E0])/L0]) / (4 V |dV|^2)
    AnnulusD w1 = L1 + op_S_ctx(ctx0, out.e0);
    AnnulusD recipL0 = analytic_apply(AnalyticFn::Reciprocal, L0);
    AnnulusD r1 = multiply(w1, recipL0);
    AnnulusD P1 = r1.poisson_of_restriction();
    out.e1 = multiply(ctx_over_V(ctx0, w1 - multiply(expP, P1)), geom.recip_absdV2);
    out.e1.scale(0.25);

    // hhat_0 = (1/2) P[log L0] - (1/4) log(pi/2)
    out.h0 = scale_circle(diag_restrict(logL0), 0.5);
    out.h0.at(0) -= kQuarterLogHalfPi;

    // hhat_1 = (1/2) P[(L1 + S0[E0]) / L0]
    out.h1 = scale_circle(diag_restrict(r1), 0.5);

    // hhat_2 = (1/2) P[(S1[E0] + S0[E1]) / L0 - (1/2) ((L1 + S0[E0])/L0)^2]
    AnnulusD pdiff = out.e0.poisson_of_restriction() - out.e0;
    AnnulusD s1e0 = ctx_laplacian(ctx0, ctx_over_V(ctx0, pdiff));
    s1e0.scale(0.25);
    AnnulusD a2 = multiply(s1e0 + op_S_ctx(ctx0, out.e1), recipL0);
    AnnulusD r1sq = multiply(r1, r1);
    r1sq.scale(0.5);
    out.h2 = scale_circle(diag_restrict(a2 - r1sq), 0.5);
    return out;
}

Budget lipschitz_budget(const DropletGeometry& geom, double sigma, double sigma_prime,
                        double theta, double eps0) {
    if (!(0.0 < sigma_prime && sigma_prime < sigma && sigma < 1.0))
        throw UsageError("lipschitz_budget: need 0 < sigma' < sigma < 1");
    Budget b;
    b.sigma = sigma;
    b.sigma_prime = sigma_prime;
    b.theta = theta;
    b.eps0 = eps0;
    const Band bs(sigma);
    const Band bsp(sigma_prime);
    const double sigma_star = geom.params.sigma_star;

    b.norm_dV = geom.dV.working_norm(bs);
    b.norm_recip_dV2 = geom.recip_absdV2.working_norm(bsp);
    b.norm_unit_over_V = geom.inv_sqrt_unit.working_norm(bs);
    b.norm_phiprime = geom.phiprime.working_norm(bs);
    b.norm_lapV = geom.lapV.working_norm(bs);

    double norm_dV2 = geom.absdV2.working_norm(bs);
    double recipL = 0.0, plogL = 0.0;
    for (double th : {0.0, 0.5 * eps0, eps0}) {
        AnnulusD L = compute_L<Cd>(geom, Cd(th));
        recipL = std::max(recipL, analytic_apply(AnalyticFn::Reciprocal, L).working_norm(bsp));
        AnnulusD PlogL = analytic_apply(AnalyticFn::Log, L).poisson_of_restriction();
        plogL = std::max(plogL, PlogL.working_norm(bs));
    }
    b.norm_recip_L = recipL;
    b.norm_P_logL = plogL;

    b.C0 = b.norm_lapV + 12.0 * b.norm_dV * b.norm_phiprime +
           42.0 * norm_dV2 * b.norm_unit_over_V +
           10206.0 * b.norm_phiprime * b.norm_phiprime * b.norm_unit_over_V;
    b.M0 = Budget::shape_M0(b.C0, sigma, sigma_prime, theta);

    const double sigma_mid = 0.5 * (sigma + sigma_prime);
    const double expP = std::exp(std::min(b.norm_P_logL, 700.0));
    const double lip_factor = 1.5 * b.norm_recip_dV2 * b.norm_unit_over_V *
                              (1.0 + (36.0 / sigma_mid) * b.norm_recip_L * expP);
    b.C1 = 24.0 * lip_factor * b.C0;
    b.M1 = Budget::shape_M1(b.C1, sigma, sigma_prime, theta);

    // r0 = 2 sup_{|theta| <= eps0} ||T[0]||  (sampled over three theta values)
    double t0 = 0.0;
    for (double th : {0.0, 0.5 * eps0, eps0}) {
        AnnulusD e0 = op_T(geom, Cd(th), geom.zero_like());
        t0 = std::max(t0, e0.working_norm(Band(sigma_star)));
    }
    b.r0 = 2.0 * t0;

    b.m0 = std::max(1.0 / eps0, 4.0 * b.M0 * b.norm_recip_L * b.r0);
    b.m1 = std::max(b.m0, 2.0 * (6.0 / sigma_prime) * b.M0 * b.norm_recip_L * b.r0);

    b.C2 = 2.0 * std::max(1.0, b.C1 * (16.0 / std::pow(sigma_star, 4) +
                                       64.0 / std::pow(sigma_star, 6)));
    b.C3 = b.C0 * std::max(4.0 / (sigma_star * sigma_star), 16.0 / std::pow(sigma_star, 4)) *
           b.norm_recip_L * std::max(2.0, 12.0 / sigma_star) * b.r0;
    b.k_cap = theta != 0.0
                  ? int(std::floor(1.0 / (std::sqrt(std::abs(theta)) * std::sqrt(b.C2))))
                  : 0;
    const double c2inv = 1.0 + 1.0 / b.C2;
    b.rho0 = b.C2 / (b.C3 * b.C3 * c2inv * c2inv);
    return b;
}

std::string Budget::to_text() const {
    std::ostringstream os;
    os.precision(12);
    os << "sigma = " << sigma << "\n"
       << "sigma_prime = " << sigma_prime << "\n"
       << "theta = " << theta << "\n"
       << "eps0 = " << eps0 << "\n"
       << "norm_dV = " << norm_dV << "\n"
       << "norm_recip_dV2 = " << norm_recip_dV2 << "\n"
       << "norm_unit_over_V = " << norm_unit_over_V << "\n"
       << "norm_phiprime = " << norm_phiprime << "\n"
       << "norm_recip_L = " << norm_recip_L << "\n"
       << "norm_lapV = " << norm_lapV << "\n"
       << "norm_P_logL = " << norm_P_logL << "\n"
       << "C0 = " << C0 << "\n"
       << "C1 = " << C1 << "\n"
       << "C2 = " << C2 << "\n"
       << "C3 = " << C3 << "\n"
       << "M0 = " << M0 << "\n"
       << "M1 = " << M1 << "\n"
       << "m0 = " << m0 << "\n"
       << "m1 = " << m1 << "\n"
       << "r0 = " << r0 << "\n"
       << "k_cap = " << k_cap << "\n"
       << "rho0 = " << rho0 << "\n";
    return os.str();
}

} // namespace orthowave
