#include "orthowave/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace orthowave {

namespace {

AnnulusD laurent_to_annulus(const std::vector<std::pair<int, Cd>>& coeffs,
                            const GeometryParams& p) {
    AnnulusD f(p.modes, p.depth, Band(p.band_sigma));
    for (const auto& [d, c] : coeffs) {
        if (std::abs(d) > p.modes) throw UsageError("laurent coefficient outside mode band");
        f.at(d, 0) += c;
    }
    return f;
}

// psi-bar(eta): conjugate-coefficient map evaluated in eta.
AnnulusD conj_map(const AnnulusD& psi_ann) { return hermitian_transpose(psi_ann); }

// log|phi| pulled back = (1/2) log(zeta*eta) = (1/2) log(1-v).
AnnulusD half_log_zeta_eta(const GeometryParams& p) {
    AnnulusD f(p.modes, p.depth, Band(p.band_sigma));
    for (int k = 1; k <= p.depth; ++k) f.at(0, k) = Cd(-0.5 / double(k));
    return f;
}

AnnulusD scrq_to_annulus(const std::vector<Cd>& g, const GeometryParams& p) {
    AnnulusD f(p.modes, p.depth, Band(p.band_sigma));
    for (std::size_t d = 0; d < g.size(); ++d) {
        if (int(d) > p.modes) break;
        f.at(-int(d), 0) += g[d];
    }
    return f;
}

AnnulusD integer_power(const AnnulusD& f, int n) {
    AnnulusD r = AnnulusD::constant(f.modes(), f.depth(), f.nominal_band(), Cd(1.0));
    for (int i = 0; i < n; ++i) r = multiply(r, f);
    return r;
}

} // namespace

EllipticAxes elliptic_axes(double t, double tau) {
    EllipticAxes ax;
    ax.A = std::sqrt(tau * (1.0 - t) / (1.0 + t));
    ax.B = std::sqrt(tau * (1.0 + t) / (1.0 - t));
    ax.c = 0.5 * (ax.A + ax.B);
    ax.d = 0.5 * (ax.A - ax.B);
    return ax;
}

std::vector<Cd> holomorphic_extension(const CircleD& boundary, double reality_tol) {
    const double defect = boundary.reality_defect();
    const double scale = std::max(boundary.max_abs(), 1e-300);
    if (defect > reality_tol * scale)
        throw UsageError("holomorphic_extension: boundary data is not real (defect " +
                         std::to_string(defect) + ")");
    std::vector<Cd> g(static_cast<std::size_t>(boundary.degree()) + 1);
    g[0] = Cd(boundary.at(0).real(), 0.0);
    for (int d = 1; d <= boundary.degree(); ++d) g[static_cast<std::size_t>(d)] = 2.0 * boundary.at(-d);
    return g;
}

Cd DropletGeometry::psi_eval(Cd zeta) const {
    Cd s(0.0);
    for (const auto& [d, c] : psi) s += c * std::pow(zeta, d);
    return s;
}

Cd DropletGeometry::psi_prime_eval(Cd zeta) const {
    Cd s(0.0);
    for (const auto& [d, c] : psi)
        if (d != 0) s += c * double(d) * std::pow(zeta, d - 1);
    return s;
}

Cd DropletGeometry::scrQ_eval(Cd zeta) const {
    Cd s(0.0);
    Cd w(1.0);
    const Cd izeta = 1.0 / zeta;
    for (const auto& g : scrQ) {
        s += g * w;
        w *= izeta;
    }
    return s;
}

double DropletGeometry::Q_phys(Cd z) const {
    switch (spec.kind) {
        case PotentialKind::Ginibre:
            return 0.5 * std::norm(z);
        case PotentialKind::Elliptic:
            return 0.5 * std::norm(z) + 0.5 * spec.t * (z * z).real();
        case PotentialKind::Custom: {
            Cd s(0.0);
            for (const auto& term : spec.q_table)
                s += term.coeff * std::pow(z, term.a) * std::pow(std::conj(z), term.b);
            return s.real();
        }
    }
    return 0.0;
}

double DropletGeometry::Qbreve_chart(Cd zeta) const {
    return tau * std::log(std::abs(zeta)) + scrQ_eval(zeta).real();
}

double DropletGeometry::V_chart(Cd zeta) const {
    const double v2 = V2_chart(zeta);
    const double root = std::sqrt(std::max(v2, 0.0));
    return std::abs(zeta) >= 1.0 ? root : -root;
}

Cd DropletGeometry::invert_map(Cd z) const {
    const double psi1 = psi.front().second.real();
    Cd zeta = z / psi1;
    for (int it = 0; it < 50; ++it) {
        const Cd r = psi_eval(zeta) - z;
        if (std::abs(r) <= 1e-12 * (1.0 + std::abs(z))) return zeta;
        const Cd dp = psi_prime_eval(zeta);
        if (std::abs(dp) == 0.0) break;
        zeta -= r / dp;
    }
    throw NumericError("invert_map: Newton did not converge; point outside chart");
}

AnnulusD DropletGeometry::laplacian(const AnnulusD& f) const {
    return multiply(multiply(phiprime, phiprime_bar), d_zeta(d_eta(f)));
}

AnnulusD DropletGeometry::over_V(const AnnulusD& f) const {
    // V = -(1-zeta*eta) * sqrt_unit, so f/V = -diag_divide(f) * inv_sqrt_unit.
    AnnulusD g = multiply(diag_divide(f, params.vanish_tol), inv_sqrt_unit);
    g.scale(-1.0);
    return g;
}

DropletGeometry build_geometry(const PotentialSpec& spec, double tau,
                               const GeometryParams& params) {
    DropletGeometry g = build_geometry_unchecked(spec, tau, params);
    ValidationReport rep = validate_droplet(g);
    if (!rep.all_pass()) {
        std::string names;
        for (const auto& c : rep.checks)
            if (!c.pass) names += (names.empty() ? "" : ", ") + c.name;
        throw NumericError("build_geometry: droplet validation failed (" + names + ")");
    }
    return g;
}

DropletGeometry build_geometry_unchecked(const PotentialSpec& spec, double tau,
                                         const GeometryParams& params) {
    if (!(tau > 0.0 && tau <= 1.0)) throw UsageError("tau must lie in (0,1]");
    DropletGeometry g;
    g.spec = spec;
    g.tau = tau;
    g.params = params;
    const Band band(params.band_sigma);

    switch (spec.kind) {
        case PotentialKind::Ginibre:
            g.psi = {{1, Cd(std::sqrt(tau))}};
            break;
        case PotentialKind::Elliptic: {
            if (!(std::abs(spec.t) < 1.0))
                throw UsageError("elliptic potential requires |t| < 1 (growth condition)");
            const EllipticAxes ax = elliptic_axes(spec.t, tau);
            g.psi = {{1, Cd(ax.c)}, {-1, Cd(ax.d)}};
            break;
        }
        case PotentialKind::Custom:
            if (spec.psi_custom.empty())
                throw UsageError("custom potential requires exterior-map coefficients");
            g.psi = spec.psi_custom;
            break;
    }
    // leading coefficient first, psi_1 > 0
    std::sort(g.psi.begin(), g.psi.end(),
              [](const auto& a, const auto& b) { return a.first > b.first; });
    if (g.psi.front().first != 1 || !(g.psi.front().second.real() > 0.0) ||
        g.psi.front().second.imag() != 0.0)
        throw UsageError("exterior map must have psi_1 > 0 as leading coefficient");

    AnnulusD psi_ann = laurent_to_annulus(g.psi, params);
    AnnulusD psibar_ann = conj_map(psi_ann);

    std::vector<std::pair<int, Cd>> dpsi;
    for (const auto& [d, c] : g.psi)
        if (d != 0) dpsi.push_back({d - 1, c * double(d)});
    AnnulusD psiprime_ann = laurent_to_annulus(dpsi, params);
    g.phiprime = analytic_apply(AnalyticFn::Reciprocal, psiprime_ann);
    g.phiprime_bar = hermitian_transpose(g.phiprime);

    // Pull back the potential.
    switch (spec.kind) {
        case PotentialKind::Ginibre:
            g.qpol = multiply(psi_ann, psibar_ann);
            g.qpol.scale(0.5);
            break;
        case PotentialKind::Elliptic: {
            AnnulusD mixed = multiply(psi_ann, psibar_ann);
            mixed.scale(0.5);
            AnnulusD sq = multiply(psi_ann, psi_ann);
            sq += multiply(psibar_ann, psibar_ann);
            sq.scale(0.25 * spec.t);
            g.qpol = mixed + sq;
            break;
        }
        case PotentialKind::Custom: {
            g.qpol = g.zero_like();
            for (const auto& term : spec.q_table) {
                AnnulusD m = multiply(integer_power(psi_ann, term.a),
                                      integer_power(psibar_ann, term.b));
                m.scale(term.coeff);
                g.qpol += m;
            }
            break;
        }
    }

    // Holomorphic extension of Q on the curve, then Qbreve and V^2.
    g.scrQ = holomorphic_extension(diag_restrict(g.qpol));
    AnnulusD scrq_ann = scrq_to_annulus(g.scrQ, params);
    AnnulusD re_scrq = scrq_ann + hermitian_transpose(scrq_ann);
    re_scrq.scale(0.5);
    AnnulusD qbreve = half_log_zeta_eta(params);
    qbreve.scale(tau);
    qbreve += re_scrq;
    g.v2 = g.qpol - qbreve;

    // Signed square root V = (zeta*eta - 1) sqrt(V^2/(1-zeta*eta)^2). Forced
    // division keeps bad droplet data buildable; validation reports on it.
    AnnulusD unit2 = diag_divide_forced(diag_divide_forced(g.v2));
    AnnulusD sqrt_unit = analytic_apply(AnalyticFn::Sqrt, unit2);
    g.inv_sqrt_unit = analytic_apply(AnalyticFn::Reciprocal, sqrt_unit);
    g.V = v_multiply(sqrt_unit);
    g.V.scale(-1.0);
    // realized sign check: positive outside
    {
        const double probe = g.V.evaluate_physical(Cd(1.05, 0.0)).real();
        if (probe < 0.0) {
            g.V.scale(-1.0);
            g.inv_sqrt_unit.scale(-1.0);
        }
    }

    g.dV = multiply(g.phiprime, d_zeta(g.V));
    g.dVbar = multiply(g.phiprime_bar, d_eta(g.V));
    g.absdV2 = multiply(g.dV, hermitian_transpose(g.dV));
    g.lapV = g.laplacian(g.V);
    g.recip_absdV2 = analytic_apply(AnalyticFn::Reciprocal, g.absdV2);

    // log|phi| / V and the split L = l0 + theta*l1.
    g.logphi_over_V = g.over_V(half_log_zeta_eta(params));
    g.l0 = multiply(g.absdV2, g.logphi_over_V);
    g.l0.scale(2.0);
    g.l1 = g.laplacian(g.logphi_over_V);
    g.l1.scale(0.5);

    // L must be positive on the curve for small theta.
    {
        CircleD l0_gamma = diag_restrict(g.l0);
        for (int i = 0; i < 16; ++i) {
            const Cd zeta = std::polar(1.0, 2.0 * M_PI * i / 16.0);
            Cd val(0.0);
            for (int d = -l0_gamma.degree(); d <= l0_gamma.degree(); ++d)
                val += l0_gamma.at(d) * std::pow(zeta, d);
            if (!(val.real() > 0.0))
                throw NumericError("build_geometry: L is not positive on the curve");
        }
    }
    return g;
}

ValidationReport validate_droplet(const DropletGeometry& geom) {
    ValidationReport rep;
    const auto& p = geom.params;

    // (i) second-order vanishing of V^2 on the curve
    {
        const double scale = std::max(geom.v2.working_norm(), 1e-300);
        double m0 = geom.v2.restriction_mass();
        double m1 = 0.0;
        for (int q = -p.modes; q <= p.modes; ++q)
            m1 = std::max(m1, std::abs(geom.v2.at(q, 1)));
        const double rel = std::max(m0, m1) / scale;
        rep.checks.push_back({"v2_second_order_vanishing", rel <= p.vanish_tol, p.vanish_tol - rel,
                              "relative diagonal mass " + std::to_string(rel)});
    }

    // (ii) Q - Qbreve >= 0 on a realized grid on both sides of the curve
    {
        double worst = 1e300;
        for (int ir = -4; ir <= 4; ++ir) {
            const double x = p.grid_halfwidth * ir / 4.0;
            for (int ia = 0; ia < 16; ++ia) {
                const Cd zeta = std::polar(std::exp(x), 2.0 * M_PI * ia / 16.0);
                worst = std::min(worst, geom.V2_chart(zeta));
            }
        }
        rep.checks.push_back({"obstacle_nonnegative", worst >= -1e-10, worst,
                              "min Q - Qbreve = " + std::to_string(worst)});
    }

    // (iii) univalence proxy: psi' bounded away from zero on the grid
    {
        double worst = 1e300;
        for (int ir = -4; ir <= 4; ++ir) {
            const double x = p.grid_halfwidth * ir / 4.0;
            for (int ia = 0; ia < 16; ++ia) {
                const Cd zeta = std::polar(std::exp(x), 2.0 * M_PI * ia / 16.0);
                worst = std::min(worst, std::abs(geom.psi_prime_eval(zeta)));
            }
        }
        rep.checks.push_back({"map_derivative_nonvanishing", worst > 1e-8, worst,
                              "min |psi'| = " + std::to_string(worst)});
    }

    // (iv) |dV|^2 > 0 on the curve
    {
        double worst = 1e300;
        for (int ia = 0; ia < 16; ++ia) {
            const Cd zeta = std::polar(1.0, 2.0 * M_PI * (ia + 0.21) / 16.0);
            worst = std::min(worst, geom.absdV2.evaluate_physical(zeta).real());
        }
        rep.checks.push_back({"gradient_nonvanishing_on_curve", worst > 1e-8, worst,
                              "min |dV|^2 on curve = " + std::to_string(worst)});
    }
    return rep;
}

} // namespace orthowave
