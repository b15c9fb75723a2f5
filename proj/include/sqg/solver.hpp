#pragma once

// Integrating-factor RK4 for the dissipative quasi-geostrophic equation
//
//     theta_t = s * u.grad(theta) - (-Delta)^alpha theta,   u = (-R2 theta, R1 theta),
//
// with s = +1 (AdvectionSign::paper) or s = -1 (AdvectionSign::standard).
// The linear part is diagonal in Fourier space and is integrated exactly.

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "sqg/error.hpp"
#include "sqg/record.hpp"
#include "sqg/spectral.hpp"

namespace sqg {

enum class AdvectionSign { paper, standard };

inline double sign_factor(AdvectionSign s) { return s == AdvectionSign::paper ? 1.0 : -1.0; }

struct SolverConfig {
    double alpha = 0.5;
    double t_end = 1.0;
    double cfl = 0.4;
    double dt_max = 1e-2;
    bool dealias_enabled = true;
    AdvectionSign advection_sign = AdvectionSign::paper;
    int snapshot_every = 10;
    bool nonlinear_enabled = true;  // off only for pure-dissipation experiments
    double blowup_factor = 1e6;

    void validate() const {
        require(alpha >= 0.0, "SolverConfig: alpha must be >= 0");
        require(t_end > 0.0, "SolverConfig: t_end must be > 0");
        require(cfl > 0.0 && cfl <= 1.0, "SolverConfig: cfl must be in (0, 1]");
        require(dt_max > 0.0, "SolverConfig: dt_max must be > 0");
        require(snapshot_every >= 1, "SolverConfig: snapshot_every must be >= 1");
    }
};

/// Floor on the velocity in the CFL step-size formula.
inline constexpr double cfl_velocity_floor = 1e-12;

struct BlowUpReport {
    double t = 0.0;
    double sup_theta = 0.0;
    double l2 = 0.0;
    std::string reason;
};

class BlowUp : public Error {
public:
    explicit BlowUp(BlowUpReport report)
        : Error("blow-up at t=" + std::to_string(report.t) + ": " + report.reason), report_(std::move(report)) {}
    const BlowUpReport& report() const { return report_; }

private:
    BlowUpReport report_;
};

struct Trajectory {
    std::vector<double> times;  // snapshot times
    std::vector<ScalarField> snapshots;
    std::vector<DiagnosticsRecord> diagnostics;  // one row per step, plus the initial state
    std::size_t steps = 0;
    std::optional<BlowUpReport> blow_up;

    bool completed() const { return !blow_up; }
};

/// s * u.grad(theta) in spectral form; dealiased on request.
inline SpectralField nonlinear_term(const SpectralField& F, AdvectionSign sign, bool dealias_enabled = true) {
    const VelocityField u = velocity_from_theta(F);
    const auto [g1, g2] = gradient(F);
    ScalarField product(F.grid());
    auto out = product.values();
    const auto a1 = u.u1.values(), a2 = u.u2.values();
    const auto b1 = g1.values(), b2 = g2.values();
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = a1[i] * b1[i] + a2[i] * b2[i];
    if (!product.all_finite()) throw BlowUp({0.0, INFINITY, INFINITY, "non-finite advection term"});
    SpectralField N = to_spectral(product);
    if (dealias_enabled) N = dealias(std::move(N));
    N *= sign_factor(sign);
    return N;
}

namespace detail {

/// exp(-|k|^{2 alpha} tau) per stored coefficient.
inline std::vector<double> decay_factors(const TorusGrid& g, double alpha, double tau) {
    std::vector<double> e(g.spectral_size());
    for (int i1 = 0; i1 < g.n(); ++i1) {
        const double k1 = g.wavenumber(i1);
        for (int i2 = 0; i2 < g.half(); ++i2) {
            const double k2 = i2;
            const double k_sq = k1 * k1 + k2 * k2;
            e[static_cast<std::size_t>(i1) * g.half() + i2] = k_sq == 0.0 ? 1.0 : std::exp(-std::pow(k_sq, alpha) * tau);
        }
    }
    return e;
}

}  // namespace detail

/// One integrating-factor RK4 step. Throws BlowUp on non-finite output.
inline SpectralField step(const SpectralField& F, double dt, const SolverConfig& cfg) {
    require(dt > 0.0, "step: dt must be > 0");
    const TorusGrid& g = F.grid();
    const std::vector<double> e_half = detail::decay_factors(g, cfg.alpha, 0.5 * dt);
    const std::size_t m = g.spectral_size();

    auto N = [&](const SpectralField& X) {
        if (!cfg.nonlinear_enabled) return SpectralField(g);
        return nonlinear_term(X, cfg.advection_sign, cfg.dealias_enabled);
    };

    const auto f = F.coeffs();
    const SpectralField a = N(F);
    SpectralField stage(g);
    auto s = stage.coeffs();
    for (std::size_t i = 0; i < m; ++i) s[i] = e_half[i] * (f[i] + 0.5 * dt * a.coeffs()[i]);
    const SpectralField b = N(stage);
    for (std::size_t i = 0; i < m; ++i) s[i] = e_half[i] * f[i] + 0.5 * dt * b.coeffs()[i];
    const SpectralField c = N(stage);
    for (std::size_t i = 0; i < m; ++i) s[i] = e_half[i] * (e_half[i] * f[i] + dt * c.coeffs()[i]);
    const SpectralField d = N(stage);

    SpectralField out(g);
    auto o = out.coeffs();
    for (std::size_t i = 0; i < m; ++i) {
        const double e1 = e_half[i] * e_half[i];
        o[i] = e1 * f[i] + dt / 6.0 *
                               (e1 * a.coeffs()[i] + 2.0 * e_half[i] * (b.coeffs()[i] + c.coeffs()[i]) + d.coeffs()[i]);
    }
    if (!out.all_finite()) throw BlowUp({0.0, INFINITY, INFINITY, "non-finite spectral coefficients"});
    return out;
}

/// Measures the per-step diagnostics of a spectral state (min_C left empty).
inline DiagnosticsRecord measure(double t, const SpectralField& F) {
    const ScalarField theta = from_spectral(F);
    return {t, theta.sup_norm(), sup_gradient(F), F.l2_norm(), std::nullopt};
}

struct RunHooks {
    /// Optional per-snapshot probe filling DiagnosticsRecord::min_C.
    std::function<double(const ScalarField&)> snapshot_probe;
};

/// Integrates theta0 to cfg.t_end with dt = min(dt_max, cfl h / max(|u|_inf, floor)).
/// A blow-up stops the run and is reported in the returned trajectory.
inline Trajectory run(const ScalarField& theta0, const SolverConfig& cfg, const RunHooks& hooks = {}) {
    cfg.validate();
    if (!theta0.all_finite()) throw InvalidArgument("run: initial field contains non-finite values");
    const TorusGrid& g = theta0.grid();

    SpectralField F = to_spectral(theta0);
    if (cfg.dealias_enabled) F = dealias(std::move(F));

    Trajectory traj;
    const double sup0 = from_spectral(F).sup_norm();
    const double blowup_level = cfg.blowup_factor * std::max(sup0, 1e-300);

    auto record = [&](double t, bool snapshot) {
        DiagnosticsRecord rec = measure(t, F);
        if (snapshot) {
            ScalarField theta = from_spectral(F);
            if (hooks.snapshot_probe) rec.min_C = hooks.snapshot_probe(theta);
            traj.times.push_back(t);
            traj.snapshots.push_back(std::move(theta));
        }
        traj.diagnostics.push_back(rec);
        return rec;
    };

    record(0.0, true);
    double t = 0.0;
    while (t < cfg.t_end) {
        const double speed = std::max(velocity_from_theta(F).sup_norm(), cfl_velocity_floor);
        double dt = std::min(cfg.dt_max, cfg.cfl * g.h() / speed);
        bool last = false;
        if (t + dt * (1.0 + 1e-9) >= cfg.t_end) {  // no sliver step from accumulated rounding
            dt = cfg.t_end - t;
            last = true;
        }
        try {
            F = step(F, dt, cfg);
        } catch (const BlowUp& e) {
            BlowUpReport rep = e.report();
            rep.t = t + dt;
            traj.blow_up = rep;
            return traj;
        }
        t = last ? cfg.t_end : t + dt;
        ++traj.steps;
        const bool snap = last || traj.steps % static_cast<std::size_t>(cfg.snapshot_every) == 0;
        const DiagnosticsRecord rec = record(t, snap);
        if (rec.sup_theta > blowup_level) {
            std::ostringstream why;
            why << "sup norm " << rec.sup_theta << " exceeds " << cfg.blowup_factor << " x initial";
            traj.blow_up = BlowUpReport{t, rec.sup_theta, rec.l2, why.str()};
            return traj;
        }
    }
    return traj;
}

}  // namespace sqg
