#pragma once

#include <complex>
#include <string>
#include <vector>

#include "orthowave/annulus.hpp"
#include "orthowave/series.hpp"

namespace orthowave {

using Cd = std::complex<double>;

enum class PotentialKind { Ginibre, Elliptic, Custom };

// External potential choice. The elliptic family is
//   Q_t(z) = |z|^2/2 + (t/2) Re z^2,  |t| < 1,
// which keeps the required growth at infinity. Custom potentials supply a
// Hermitian coefficient table Q(z, conj z) = sum q_ab z^a conj(z)^b together
// with exterior-map Laurent coefficients psi_d (d <= 1, psi_1 > 0).
struct PotentialSpec {
    PotentialKind kind = PotentialKind::Ginibre;
    double t = 0.0;
    struct QTerm { int a, b; Cd coeff; };
    std::vector<QTerm> q_table;                      // custom only
    std::vector<std::pair<int, Cd>> psi_custom;      // custom only: (d, psi_d)

    static PotentialSpec ginibre() { return {}; }
    static PotentialSpec elliptic(double t_) {
        if (!(std::abs(t_) < 1.0))
            throw UsageError("elliptic potential requires |t| < 1 (growth condition)");
        PotentialSpec s;
        s.kind = PotentialKind::Elliptic;
        s.t = t_;
        return s;
    }
};

struct GeometryParams {
    int modes = 48;            // zeta-winding band of the working series
    int depth = 20;            // power-of-(1 - zeta*eta) depth
    double band_sigma = 0.10;  // nominal band for norms and tail weights
    double sigma_star = 0.30;  // outer band for budget diagnostics
    double vanish_tol = 1e-9;  // diagonal-vanishing tolerance (relative)
    double grid_halfwidth = 0.10;  // validation grid halfwidth in log|zeta|
};

struct ValidationCheck {
    std::string name;
    bool pass;
    double margin;
    std::string detail;
};

struct ValidationReport {
    std::vector<ValidationCheck> checks;
    bool all_pass() const {
        for (const auto& c : checks)
            if (!c.pass) return false;
        return true;
    }
};

// Everything attached to a validated (potential, tau) pair: the exterior map
// data, pullbacks of the potential, the obstacle root V and its derivatives,
// and the split L = l0 + theta*l1.
class DropletGeometry {
public:
    PotentialSpec spec;
    double tau = 1.0;
    GeometryParams params;

    std::vector<std::pair<int, Cd>> psi;  // exterior-map Laurent coefficients
    std::vector<Cd> scrQ;                 // scrQ[d] multiplies zeta^{-d}

    AnnulusD phiprime;       // (phi' of psi)(zeta), zeta-only
    AnnulusD phiprime_bar;   // its conjugate
    AnnulusD qpol;           // Q pulled back
    AnnulusD v2;             // V^2 = Q - Qbreve, pulled back
    AnnulusD V;              // signed square root, positive outside
    AnnulusD dV, dVbar;      // dV = (d/dz V) pulled back, and conjugate
    AnnulusD absdV2;         // |dV|^2
    AnnulusD lapV;           // quarter-Laplacian of V
    AnnulusD inv_sqrt_unit;  // 1/sqrt(V^2 / (1-zeta*eta)^2)
    AnnulusD logphi_over_V;  // log|phi| / V
    AnnulusD recip_absdV2;   // 1/|dV|^2
    AnnulusD l0, l1;         // L(theta) = l0 + theta l1

    // -- scalar chart evaluation --------------------------------------------
    Cd psi_eval(Cd zeta) const;
    Cd psi_prime_eval(Cd zeta) const;
    Cd phi_prime_eval(Cd zeta) const { return 1.0 / psi_prime_eval(zeta); }
    Cd scrQ_eval(Cd zeta) const;
    double Q_phys(Cd z) const;
    double Qbreve_chart(Cd zeta) const;  // tau log|zeta| + Re scrQ
    double V2_chart(Cd zeta) const { return Q_phys(psi_eval(zeta)) - Qbreve_chart(zeta); }
    double V_chart(Cd zeta) const;       // signed root, positive for |zeta| > 1

    // Newton solve of psi(zeta) = z from initial guess z/psi_1.
    Cd invert_map(Cd z) const;

    // Quarter-Laplacian pullback |phi'|^2 * d_zeta d_eta.
    AnnulusD laplacian(const AnnulusD& f) const;
    // Division by V for fields vanishing on the curve.
    AnnulusD over_V(const AnnulusD& f) const;

    // Spec-facing monomial views (conversion of the internal representation).
    SeriesD qpol_series(int order) const { return qpol.to_hermitian(order); }
    SeriesD v_series(int order) const { return V.to_hermitian(order); }
    SeriesD dv_series(int order) const { return dV.to_hermitian(order); }
    SeriesD absdv2_series(int order) const { return absdV2.to_hermitian(order); }
    SeriesD lapv_series(int order) const { return lapV.to_hermitian(order); }
    SeriesD logphi_over_v_series(int order) const { return logphi_over_V.to_hermitian(order); }

    AnnulusD zero_like() const {
        return AnnulusD(params.modes, params.depth, Band(params.band_sigma));
    }
};

// Builds and validates; throws NumericError when validation fails.
DropletGeometry build_geometry(const PotentialSpec& spec, double tau, const GeometryParams& params);

// Builds without the validation gate (divisions by the curve factor are
// forced), so that validate_droplet can report on bad droplet data.
DropletGeometry build_geometry_unchecked(const PotentialSpec& spec, double tau,
                                         const GeometryParams& params);

// Coefficients g_d of g(zeta) = sum_d g_d zeta^{-d} with Re g = boundary on
// the circle, g bounded and holomorphic outside, Im g(infinity) = 0.
std::vector<Cd> holomorphic_extension(const CircleD& boundary, double reality_tol = 1e-9);

ValidationReport validate_droplet(const DropletGeometry& geom);

// L(theta) = l0 + theta*l1 over any scalar ring.
template <class R>
AnnulusSeries<R> compute_L(const DropletGeometry& geom, const R& theta);

template <>
inline AnnulusD compute_L<Cd>(const DropletGeometry& geom, const Cd& theta) {
    AnnulusD L = geom.l1;
    L.scale(theta);
    L += geom.l0;
    return L;
}

template <>
inline AnnulusJ compute_L<Jet>(const DropletGeometry& geom, const Jet& theta) {
    AnnulusJ L = lift_to_jets(geom.l1, theta.order());
    L.scale(theta);
    L += lift_to_jets(geom.l0, theta.order());
    return L;
}

// Elliptic droplet semi-axes for Q_t at mass parameter tau:
//   A = sqrt(tau (1-t)/(1+t)),  B = sqrt(tau (1+t)/(1-t)).
// They are always re-verified by validate_droplet rather than trusted.
struct EllipticAxes { double A, B, c, d; };
EllipticAxes elliptic_axes(double t, double tau);

} // namespace orthowave
