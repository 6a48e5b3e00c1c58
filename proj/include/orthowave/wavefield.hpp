#pragma once

#include <complex>
#include <vector>

#include "orthowave/engine.hpp"
#include "orthowave/geometry.hpp"

namespace orthowave {

// Gaussian-CDF error function: erf(x) = (2 pi)^{-1/2} int_{-inf}^x e^{-t^2/2} dt,
// so erf(x) + erf(-x) = 1 and erf(0) = 1/2.
double erf_paper(double x);

// Bounded harmonic function near the curve given by Poisson data a_d (plus an
// optional multiple of log|zeta|^2), evaluated on the exterior chart.
class HarmonicField {
public:
    HarmonicField() : data_(0), log_coeff_(0.0) {}
    explicit HarmonicField(CircleD data, double log_coeff = 0.0, double reality_tol = 1e-8);

    double value(Cd zeta) const;       // h
    double conjugate(Cd zeta) const;   // h*, vanishing at infinity (needs log_coeff == 0)
    Cd analytic_completion(Cd zeta) const;  // g with Re g = h, Im g = h*
    double log_coeff() const { return log_coeff_; }
    const CircleD& data() const { return data_; }

private:
    CircleD data_;
    double log_coeff_;
};

// h* for Poisson data without a log term; errors on complex data or log term.
HarmonicField harmonic_conjugate_field(const HarmonicField& h);

enum class WaveVariant { ThmMain, Section8 };

struct WaveConfig {
    int m = 0;
    int n = 0;
    WaveVariant variant = WaveVariant::ThmMain;
    // cutoff radii in x = log|zeta|: chi1 = 1 on |x| <= chi1_inner, 0 beyond
    // chi1_outer; chi2 = 1 for x >= -chi2_inner, 0 below -chi2_outer.
    double chi1_inner = 0.0, chi1_outer = 0.0;
    double chi2_inner = 0.0, chi2_outer = 0.0;

    static WaveConfig make(int m, double tau, double sigma_star = 0.30,
                           WaveVariant variant = WaveVariant::ThmMain);
};

double smoothstep_quintic(double t);
double chi1_cutoff(const WaveConfig& cfg, double x);
double chi2_cutoff(const WaveConfig& cfg, double x);

struct FieldPoint {
    Cd z;
    double V = 0.0, h = 0.0, hstar = 0.0, H = 0.0, G = 0.0, U = 0.0, wave = 0.0;
    Cd P;
};

struct FieldSample {
    std::vector<FieldPoint> pts;
};

// Binds geometry + engine fields + wave parameters for point evaluation.
class WavePredictor {
public:
    WavePredictor(const DropletGeometry& geom, const ApproxFields& fields, WaveConfig cfg);

    const WaveConfig& config() const { return cfg_; }
    const DropletGeometry& geometry() const { return *geom_; }

    // chart-coordinate evaluations (zeta on the exterior chart)
    Cd predict_P_chart(Cd zeta) const;
    double predict_wave_chart(Cd zeta) const;
    double potential_U_chart(Cd zeta) const;
    double h_chart(Cd zeta) const { return h_.value(zeta); }
    double hstar_chart(Cd zeta) const { return h_.conjugate(zeta); }
    double H_chart(Cd zeta) const;
    double G_chart(Cd zeta) const;

    // physical-point evaluations (invert the map; domain error off the chart)
    Cd predict_P(Cd z) const { return predict_P_chart(geom_->invert_map(z)); }
    double predict_wave(Cd z) const { return predict_wave_chart(geom_->invert_map(z)); }
    double potential_U(Cd z) const { return potential_U_chart(geom_->invert_map(z)); }
    // quadrature-safe: zero outside the cutoff support instead of an error
    Cd predict_P_or_zero(Cd z) const;

    FieldPoint sample_chart(Cd zeta) const;

    const HarmonicField& h_field() const { return h_; }

private:
    const DropletGeometry* geom_;
    WaveConfig cfg_;
    HarmonicField h_;
    HarmonicField H_harm_;
    AnnulusD G_;
    double theta_;
};

// Grid evaluation of all fields over x = log|zeta| in [x_min, x_max].
FieldSample build_potential_U(const WavePredictor& pred, double x_min, double x_max, int nx,
                              int ntheta);

struct PotentialEquationReport {
    double max_rel_residual = 0.0;
    double fd_error_estimate = 0.0;
    bool inconclusive = false;
    int points = 0;
};

// Five-point quarter-Laplacian of U on the chi1 == 1 band, compared with
// sqrt(m) e^{2h - 2mV^2}; relative residual over the band.
PotentialEquationReport check_potential_equation(const WavePredictor& pred, int nx = 9,
                                                 int ntheta = 24, double fd_step = 0.0);

} // namespace orthowave
