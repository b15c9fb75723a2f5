#pragma once

// Discrete periodic fields on the square [0, 2*pi)^2.
//
// Physical layout: ScalarField::values is row-major with the x1 index as the
// row, i.e. values[i1 * n + i2] = f(i1 * h, i2 * h).
//
// Spectral layout: the real-to-complex half spectrum. Row i1 in [0, n) carries
// wavenumber k1 = wavenumber(i1) in {-n/2+1, ..., n/2}; column i2 in [0, n/2]
// carries k2 = i2. Negative k2 follow from Hermitian symmetry.
//
// Normalization: coefficients are amplitudes of exp(i k.x), so
//   f(x) = sum_k c_k exp(i k.x),
//   (1/|T|) int_T f^2 = sum_k |c_k|^2,  with |T| = (2 pi)^2.

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sqg/error.hpp"

namespace sqg {

using Complex = std::complex<double>;

class TorusGrid {
public:
    explicit TorusGrid(int n) : n_(n) {
        require(n >= 8, "TorusGrid: n must be at least 8, got " + std::to_string(n));
        require(n % 2 == 0, "TorusGrid: n must be even, got " + std::to_string(n));
    }

    int n() const { return n_; }
    double h() const { return 2.0 * std::numbers::pi / n_; }
    std::size_t size() const { return static_cast<std::size_t>(n_) * n_; }
    int half() const { return n_ / 2 + 1; }
    std::size_t spectral_size() const { return static_cast<std::size_t>(n_) * half(); }

    /// Signed wavenumber of a full-axis index.
    int wavenumber(int index) const { return index <= n_ / 2 ? index : index - n_; }
    /// Full-axis storage index of a signed wavenumber (taken modulo n).
    int index_of(int k) const { return ((k % n_) + n_) % n_; }

    double coordinate(int index) const { return index * h(); }

    friend bool operator==(const TorusGrid&, const TorusGrid&) = default;

private:
    int n_;
};

class ScalarField {
public:
    explicit ScalarField(TorusGrid grid) : grid_(grid), values_(grid.size(), 0.0) {}
    ScalarField(TorusGrid grid, std::vector<double> values) : grid_(grid), values_(std::move(values)) {
        require(values_.size() == grid_.size(), "ScalarField: expected " + std::to_string(grid_.size()) +
                                                    " samples, got " + std::to_string(values_.size()));
    }

    /// Samples f at every grid point.
    template <class F>
    static ScalarField sample(TorusGrid grid, F&& f) {
        ScalarField out(grid);
        const int n = grid.n();
        for (int i1 = 0; i1 < n; ++i1)
            for (int i2 = 0; i2 < n; ++i2) out.at(i1, i2) = f(grid.coordinate(i1), grid.coordinate(i2));
        return out;
    }

    const TorusGrid& grid() const { return grid_; }
    int n() const { return grid_.n(); }

    double& at(int i1, int i2) { return values_[static_cast<std::size_t>(i1) * grid_.n() + i2]; }
    double at(int i1, int i2) const { return values_[static_cast<std::size_t>(i1) * grid_.n() + i2]; }

    std::span<double> values() { return values_; }
    std::span<const double> values() const { return values_; }

    bool all_finite() const {
        for (double v : values_)
            if (!std::isfinite(v)) return false;
        return true;
    }

    double sup_norm() const {
        double m = 0.0;
        for (double v : values_) m = std::max(m, std::abs(v));
        return m;
    }

    ScalarField& operator*=(double s) {
        for (double& v : values_) v *= s;
        return *this;
    }
    friend ScalarField operator*(double s, ScalarField f) { return f *= s; }

    ScalarField& operator+=(const ScalarField& other) {
        require(grid_ == other.grid_, "ScalarField: grid mismatch");
        for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
        return *this;
    }

    friend bool operator==(const ScalarField&, const ScalarField&) = default;

private:
    TorusGrid grid_;
    std::vector<double> values_;
};

class SpectralField {
public:
    explicit SpectralField(TorusGrid grid) : grid_(grid), coeffs_(grid.spectral_size(), Complex{}) {}

    const TorusGrid& grid() const { return grid_; }
    int n() const { return grid_.n(); }

    Complex& at_index(int i1, int i2) { return coeffs_[static_cast<std::size_t>(i1) * grid_.half() + i2]; }
    Complex at_index(int i1, int i2) const { return coeffs_[static_cast<std::size_t>(i1) * grid_.half() + i2]; }

    /// Coefficient of exp(i k.x) for any integer k (aliased modulo n; k2 < 0 via conjugate symmetry).
    Complex coeff(int k1, int k2) const {
        const int n = grid_.n();
        int j2 = ((k2 % n) + n) % n;
        if (j2 > n / 2) return std::conj(at_index(grid_.index_of(-k1), n - j2));
        return at_index(grid_.index_of(k1), j2);
    }

    std::span<Complex> coeffs() { return coeffs_; }
    std::span<const Complex> coeffs() const { return coeffs_; }

    /// Mean value of the represented function (the k = 0 coefficient).
    double mean() const { return coeffs_[0].real(); }

    /// Sum over the full lattice of |c_k|^2, i.e. the spatial mean of f^2.
    double mean_square() const {
        const int n = grid_.n();
        double total = 0.0;
        for (int i1 = 0; i1 < n; ++i1)
            for (int i2 = 0; i2 <= n / 2; ++i2) {
                const double weight = (i2 == 0 || i2 == n / 2) ? 1.0 : 2.0;
                total += weight * std::norm(at_index(i1, i2));
            }
        return total;
    }

    /// L2 norm over the period cell: sqrt((2 pi)^2 * sum |c_k|^2).
    double l2_norm() const { return 2.0 * std::numbers::pi * std::sqrt(mean_square()); }

    double max_abs() const {
        double m = 0.0;
        for (const auto& c : coeffs_) m = std::max(m, std::abs(c));
        return m;
    }

    bool all_finite() const {
        for (const auto& c : coeffs_)
            if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) return false;
        return true;
    }

    SpectralField& operator+=(const SpectralField& other) {
        for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += other.coeffs_[i];
        return *this;
    }
    SpectralField& operator*=(double s) {
        for (auto& c : coeffs_) c *= s;
        return *this;
    }

    /// Applies a per-wavenumber multiplier m(k1, k2) -> Complex.
    template <class Multiplier>
    SpectralField& apply(Multiplier&& m) {
        const int n = grid_.n();
        for (int i1 = 0; i1 < n; ++i1) {
            const int k1 = grid_.wavenumber(i1);
            for (int i2 = 0; i2 <= n / 2; ++i2) at_index(i1, i2) *= m(k1, i2);
        }
        return *this;
    }

private:
    TorusGrid grid_;
    std::vector<Complex> coeffs_;
};

}  // namespace sqg
