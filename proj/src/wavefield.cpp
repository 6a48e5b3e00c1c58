#include "orthowave/wavefield.hpp"

#include <cmath>

namespace orthowave {

double erf_paper(double x) { return 0.5 * std::erfc(-x * M_SQRT1_2); }

HarmonicField::HarmonicField(CircleD data, double log_coeff, double reality_tol)
    : data_(std::move(data)), log_coeff_(log_coeff) {
    const double defect = data_.reality_defect();
    const double scale = std::max(data_.max_abs(), 1e-300);
    if (defect > reality_tol * scale)
        throw UsageError("harmonic field: Poisson data is not real (defect " +
                         std::to_string(defect) + ")");
}

Cd HarmonicField::analytic_completion(Cd zeta) const {
    Cd g(data_.at(0).real(), 0.0);
    Cd w(1.0);
    const Cd izeta = 1.0 / zeta;
    for (int d = 1; d <= data_.degree(); ++d) {
        w *= izeta;
        g += 2.0 * data_.at(-d) * w;
    }
    return g;
}

double HarmonicField::value(Cd zeta) const {
    return analytic_completion(zeta).real() + log_coeff_ * 2.0 * std::log(std::abs(zeta));
}

double HarmonicField::conjugate(Cd zeta) const {
    if (log_coeff_ != 0.0)
        throw UsageError("harmonic conjugate: data carries a log|zeta| component");
    return analytic_completion(zeta).imag();
}

HarmonicField harmonic_conjugate_field(const HarmonicField& h) {
    if (h.log_coeff() != 0.0)
        throw UsageError("harmonic conjugate: data carries a log|zeta| component");
    return h; // evaluation goes through conjugate()
}

WaveConfig WaveConfig::make(int m, double tau, double sigma_star, WaveVariant variant) {
    WaveConfig cfg;
    cfg.m = m;
    const double n_real = tau * m;
    cfg.n = int(std::lround(n_real));
    if (std::abs(n_real - cfg.n) > 1e-9)
        throw UsageError("wave config: tau*m = " + std::to_string(n_real) +
                         " is not an integer degree");
    cfg.variant = variant;
    cfg.chi1_inner = std::log(1.0 / Band::rho_of_sigma(sigma_star / 3.0));
    cfg.chi1_outer = std::log(1.0 / Band::rho_of_sigma(sigma_star / 2.0));
    cfg.chi2_inner = cfg.chi1_inner;
    cfg.chi2_outer = cfg.chi1_outer;
    return cfg;
}

double smoothstep_quintic(double t) {
    if (t <= 0.0) return 0.0;
    if (t >= 1.0) return 1.0;
    return t * t * t * (10.0 + t * (-15.0 + 6.0 * t));
}

double chi1_cutoff(const WaveConfig& cfg, double x) {
    const double ax = std::abs(x);
    if (ax <= cfg.chi1_inner) return 1.0;
    if (ax >= cfg.chi1_outer) return 0.0;
    return smoothstep_quintic((cfg.chi1_outer - ax) / (cfg.chi1_outer - cfg.chi1_inner));
}

double chi2_cutoff(const WaveConfig& cfg, double x) {
    if (x >= -cfg.chi2_inner) return 1.0;
    if (x <= -cfg.chi2_outer) return 0.0;
    return smoothstep_quintic((x + cfg.chi2_outer) / (cfg.chi2_outer - cfg.chi2_inner));
}

WavePredictor::WavePredictor(const DropletGeometry& geom, const ApproxFields& fields,
                             WaveConfig cfg)
    : geom_(&geom), cfg_(cfg), h_(fields.h_data), H_harm_(fields.H_harm_data),
      G_(fields.G), theta_(fields.theta) {
    const double n_real = geom.tau * cfg.m;
    if (std::abs(n_real - cfg.n) > 1e-9)
        throw UsageError("wave predictor: n = tau*m violated");
    if (cfg.m >= 2 && std::abs(fields.theta - 1.0 / cfg.m) > 1e-12)
        throw UsageError("wave predictor: engine fields were built at a different theta than 1/m");
}

double WavePredictor::H_chart(Cd zeta) const {
    return 2.0 * std::log(std::abs(zeta)) + H_harm_.value(zeta);
}

double WavePredictor::G_chart(Cd zeta) const { return G_.evaluate_physical(zeta).real(); }

Cd WavePredictor::predict_P_chart(Cd zeta) const {
    const double x = std::log(std::abs(zeta));
    const double chi2 = chi2_cutoff(cfg_, x);
    if (chi2 == 0.0) return Cd(0.0);
    const Cd g = h_.analytic_completion(zeta);
    Cd val = std::pow(double(cfg_.m), 0.25) * std::pow(zeta, cfg_.n) *
             std::exp(g + double(cfg_.m) * geom_->scrQ_eval(zeta));
    if (cfg_.variant == WaveVariant::Section8)
        val *= std::sqrt(geom_->phi_prime_eval(zeta));
    return chi2 * val;
}

double WavePredictor::predict_wave_chart(Cd zeta) const {
    const double x = std::log(std::abs(zeta));
    const double chi2 = chi2_cutoff(cfg_, x);
    if (chi2 == 0.0) return 0.0;
    const double v = geom_->V_chart(zeta);
    double w = std::sqrt(double(cfg_.m)) *
               std::exp(2.0 * h_.value(zeta) - 2.0 * cfg_.m * v * v);
    if (cfg_.variant == WaveVariant::Section8) w *= std::abs(geom_->phi_prime_eval(zeta));
    return chi2 * chi2 * w;
}

double WavePredictor::potential_U_chart(Cd zeta) const {
    const double x = std::log(std::abs(zeta));
    const double chi1 = chi1_cutoff(cfg_, x);
    const double chi2 = chi2_cutoff(cfg_, x);
    if (chi1 == 0.0 && chi2 == 0.0) return 0.0;
    const double H = H_chart(zeta);
    double u = 0.0;
    if (chi1 != 0.0) {
        const double v = geom_->V_chart(zeta);
        const double g = G_chart(zeta);
        u += chi1 * (H * erf_paper(2.0 * std::sqrt(double(cfg_.m)) * v) +
                     g / std::sqrt(2.0 * M_PI * cfg_.m) * std::exp(-2.0 * cfg_.m * v * v));
    }
    u += (chi2 - chi1) * H;
    return u;
}

Cd WavePredictor::predict_P_or_zero(Cd z) const {
    Cd zeta;
    try {
        zeta = geom_->invert_map(z);
    } catch (const NumericError&) {
        return Cd(0.0); // off the chart: deep interior, outside the cutoff support
    }
    return predict_P_chart(zeta);
}

FieldPoint WavePredictor::sample_chart(Cd zeta) const {
    FieldPoint pt;
    pt.z = geom_->psi_eval(zeta);
    pt.V = geom_->V_chart(zeta);
    pt.h = h_.value(zeta);
    pt.hstar = h_.conjugate(zeta);
    pt.H = H_chart(zeta);
    pt.G = G_chart(zeta);
    pt.U = potential_U_chart(zeta);
    pt.P = predict_P_chart(zeta);
    pt.wave = predict_wave_chart(zeta);
    return pt;
}

FieldSample build_potential_U(const WavePredictor& pred, double x_min, double x_max, int nx,
                              int ntheta) {
    if (nx < 2 || ntheta < 1) throw UsageError("build_potential_U: grid too small");
    FieldSample out;
    out.pts.reserve(static_cast<std::size_t>(nx) * ntheta);
    for (int i = 0; i < nx; ++i) {
        const double x = x_min + (x_max - x_min) * i / (nx - 1);
        for (int a = 0; a < ntheta; ++a) {
            const double th = 2.0 * M_PI * a / ntheta;
            out.pts.push_back(pred.sample_chart(std::polar(std::exp(x), th)));
        }
    }
    return out;
}

PotentialEquationReport check_potential_equation(const WavePredictor& pred, int nx, int ntheta,
                                                 double fd_step) {
    const auto& geom = pred.geometry();
    const auto& cfg = pred.config();
    PotentialEquationReport rep;

    // physical diameter of the cutoff band, for the default step
    const double map_scale = std::abs(geom.psi_prime_eval(Cd(1.0)));
    const double diam = 2.0 * cfg.chi1_outer * std::max(map_scale, 1.0);
    double h = fd_step > 0.0 ? fd_step : 1e-3 * diam;

    auto quarter_lap = [&](Cd z, double step) {
        const double u0 = pred.potential_U(z);
        const double ur = pred.potential_U(z + Cd(step, 0.0));
        const double ul = pred.potential_U(z - Cd(step, 0.0));
        const double ut = pred.potential_U(z + Cd(0.0, step));
        const double ub = pred.potential_U(z - Cd(0.0, step));
        return 0.25 * (ur + ul + ut + ub - 4.0 * u0) / (step * step);
    };

    // keep the whole stencil inside the chi1 == 1 band
    const double margin = 4.0 * h / std::max(map_scale, 1e-9);
    const double x_hw = cfg.chi1_inner - margin;
    if (x_hw <= 0.0) throw UsageError("check_potential_equation: step too large for the band");

    double worst = 0.0, worst_fd = 0.0;
    for (int i = 0; i < nx; ++i) {
        const double x = -x_hw + 2.0 * x_hw * i / (nx - 1);
        for (int a = 0; a < ntheta; ++a) {
            const double th = 2.0 * M_PI * a / ntheta;
            const Cd zeta = std::polar(std::exp(x), th);
            const Cd z = geom.psi_eval(zeta);
            const double lap = quarter_lap(z, h);
            const double lap2 = quarter_lap(z, 2.0 * h);
            const double v = geom.V_chart(zeta);
            const double rhs = std::sqrt(double(cfg.m)) *
                               std::exp(2.0 * pred.h_chart(zeta) - 2.0 * cfg.m * v * v);
            const double rel = std::abs(lap - rhs) / rhs;
            const double fd_est = std::abs(lap - lap2) / (3.0 * rhs);
            worst = std::max(worst, rel);
            worst_fd = std::max(worst_fd, fd_est);
            ++rep.points;
        }
    }
    rep.max_rel_residual = worst;
    rep.fd_error_estimate = worst_fd;
    rep.inconclusive = worst_fd > 0.5 * std::max(worst, 1e-300);
    return rep;
}

} // namespace orthowave
