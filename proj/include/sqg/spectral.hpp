#pragma once

// Fourier-multiplier operators on the torus: transforms, Riesz transforms,
// fractional Laplacian, spectral gradient and two-thirds dealiasing.

#include <cmath>
#include <utility>

#include "sqg/error.hpp"
#include "sqg/fft.hpp"
#include "sqg/field.hpp"

namespace sqg {

/// Divergence-free velocity u = (-R2 theta, R1 theta).
struct VelocityField {
    ScalarField u1;
    ScalarField u2;

    double sup_norm() const {
        double m = 0.0;
        const auto a = u1.values();
        const auto b = u2.values();
        for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::hypot(a[i], b[i]));
        return m;
    }
};

inline SpectralField to_spectral(const ScalarField& f) {
    if (!f.all_finite()) throw InvalidArgument("to_spectral: field contains non-finite values");
    SpectralField out(f.grid());
    std::vector<double> in(f.values().begin(), f.values().end());
    detail::FftPlans::for_size(f.n()).forward(in.data(), out.coeffs().data());
    out *= 1.0 / static_cast<double>(f.grid().size());
    return out;
}

inline ScalarField from_spectral(const SpectralField& F) {
    ScalarField out(F.grid());
    std::vector<Complex> scratch(F.coeffs().begin(), F.coeffs().end());  // c2r overwrites its input
    detail::FftPlans::for_size(F.n()).backward(scratch.data(), out.values().data());
    return out;
}

/// Riesz transform R_j with multiplier -i k_j / |k| (j = 1 or 2). The zero mode
/// and the Nyquist line k_j = n/2, where an odd multiplier has no real
/// counterpart, are annihilated.
inline SpectralField riesz(int j, SpectralField F) {
    require(j == 1 || j == 2, "riesz: axis index must be 1 or 2");
    const int nyq = F.n() / 2;
    F.apply([&](int k1, int k2) -> Complex {
        const int kj = j == 1 ? k1 : k2;
        if ((k1 == 0 && k2 == 0) || kj == nyq) return 0.0;
        return Complex(0.0, -kj / std::hypot(double(k1), double(k2)));
    });
    return F;
}

/// (-Delta)^alpha: multiplier |k|^(2 alpha), zero mode mapped to 0.
inline SpectralField frac_laplacian(double alpha, SpectralField F) {
    require(alpha >= 0.0, "frac_laplacian: alpha must be non-negative");
    F.apply([&](int k1, int k2) -> Complex {
        if (k1 == 0 && k2 == 0) return 0.0;
        return std::pow(double(k1) * k1 + double(k2) * k2, alpha);
    });
    return F;
}

/// Zeroes both Nyquist lines (|k1| = n/2 or k2 = n/2).
inline SpectralField drop_nyquist(SpectralField F) {
    const int nyq = F.n() / 2;
    F.apply([&](int k1, int k2) -> Complex { return (k1 == nyq || k2 == nyq) ? 0.0 : 1.0; });
    return F;
}

/// Velocity in physical space. The Nyquist lines of theta are filtered first
/// so both components see the same support and stay spectrally divergence-free.
inline VelocityField velocity_from_theta(const SpectralField& F) {
    SpectralField filtered = drop_nyquist(F);
    SpectralField u1 = riesz(2, filtered);
    u1 *= -1.0;
    return {from_spectral(u1), from_spectral(riesz(1, std::move(filtered)))};
}

/// Spectral derivative along axis j (multiplier i k_j, Nyquist line of axis j zeroed).
inline SpectralField derivative(int j, SpectralField F) {
    require(j == 1 || j == 2, "derivative: axis index must be 1 or 2");
    const int nyq = F.n() / 2;
    F.apply([&](int k1, int k2) -> Complex {
        const int kj = j == 1 ? k1 : k2;
        if (kj == nyq) return 0.0;
        return Complex(0.0, double(kj));
    });
    return F;
}

inline std::pair<ScalarField, ScalarField> gradient(const SpectralField& F) {
    return {from_spectral(derivative(1, F)), from_spectral(derivative(2, F))};
}

/// Pointwise maximum of |grad f|.
inline double sup_gradient(const SpectralField& F) {
    const auto [g1, g2] = gradient(F);
    double m = 0.0;
    const auto a = g1.values();
    const auto b = g2.values();
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::hypot(a[i], b[i]));
    return m;
}

/// Two-thirds rule: keeps max(|k1|, |k2|) <= n/3.
inline SpectralField dealias(SpectralField F) {
    const int n = F.n();
    F.apply([&](int k1, int k2) -> Complex {
        return (3 * std::abs(k1) > n || 3 * std::abs(k2) > n) ? 0.0 : 1.0;
    });
    return F;
}

/// Largest |k1 u1(k) + k2 u2(k)| over the lattice, for checking incompressibility.
inline double spectral_divergence(const VelocityField& u) {
    const SpectralField a = to_spectral(u.u1);
    const SpectralField b = to_spectral(u.u2);
    const TorusGrid& g = a.grid();
    double m = 0.0;
    for (int i1 = 0; i1 < g.n(); ++i1)
        for (int i2 = 0; i2 < g.half(); ++i2)
            m = std::max(m, std::abs(double(g.wavenumber(i1)) * a.at_index(i1, i2) + double(i2) * b.at_index(i1, i2)));
    return m;
}

}  // namespace sqg
