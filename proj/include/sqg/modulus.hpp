#pragma once

// Moduli of continuity: increasing, continuous, concave w: [0, inf) -> [0, inf)
// with w(0) = 0.

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "sqg/error.hpp"

namespace sqg {

enum class Side { left, right };

/// Evaluable modulus of continuity.
///
/// Implementations supply values, one-sided derivatives and their kinks; the
/// remaining members have generic defaults that a closed form may sharpen.
class ModulusOfContinuity {
public:
    virtual ~ModulusOfContinuity() = default;

    virtual double omega(double xi) const = 0;
    virtual double omega_prime_left(double xi) const = 0;
    virtual double omega_prime_right(double xi) const = 0;
    /// Points where the derivative may jump, ascending.
    virtual std::vector<double> breakpoints() const { return {}; }

    /// w(x + h) - w(x) for h >= 0, ideally without cancellation when h << x.
    virtual double increment(double x, double h) const { return omega(x + h) - omega(x); }

    /// w''(xi) where w is twice differentiable at xi.
    virtual std::optional<double> second_derivative(double) const { return std::nullopt; }

    /// Relative slack s(H) with  w(H)/H <= int_H^inf w/eta^2 <= (1 + s) w(H)/H.
    /// The default reads the local growth exponent p = H w'(H) / w(H) and uses
    /// the pure power law bound p / (1 - p); p >= 1 means the tail diverges.
    virtual double tail_slack(double H) const {
        const double w = omega(H);
        if (w <= 0.0) return 0.0;
        const double p = H * omega_prime_right(H) / w;
        if (p >= 1.0 - 1e-12) return std::numeric_limits<double>::infinity();
        return std::max(0.0, p) / (1.0 - p);
    }

    virtual bool is_concave() const { return true; }

    /// Optional closed forms of int_a^b w/eta and int_a^b w/eta^2.
    virtual std::optional<double> head_integral(double, double) const { return std::nullopt; }
    virtual std::optional<double> tail_integral(double, double) const { return std::nullopt; }

    /// Largest breakpoint, or 1 for smooth moduli: the natural length scale.
    double length_scale() const {
        const auto b = breakpoints();
        return b.empty() ? 1.0 : b.back();
    }
};

// ---------------------------------------------------------------------------
// Explicit two-branch modulus
//
//   w(xi) = xi - xi^{3/2}                            for 0 <= xi <= delta
//   w'(xi) = gamma / (xi (4 + log(xi / delta)))      for xi > delta
//
// Integrating the second branch (s = log(eta / delta)) gives the closed form
//   w(xi) = w(delta) + gamma log(1 + log(xi / delta) / 4).
// ---------------------------------------------------------------------------

struct KnvModulusParams {
    double delta = 1e-4;
    double gamma = 1e-5;
};

/// Upper end of the default admissibility window for delta.
inline constexpr double knv_delta_max = 1e-2;

/// Violated admissibility conditions (empty when admissible).
inline std::vector<std::string> admissibility_violations(const KnvModulusParams& p) {
    std::vector<std::string> v;
    if (!(p.delta > 0.0)) v.emplace_back("delta > 0 violated");
    if (!(p.gamma > 0.0)) v.emplace_back("gamma > 0 violated");
    if (!(p.gamma < p.delta / 2.0)) v.emplace_back("gamma < delta/2 violated");
    if (!(p.delta <= knv_delta_max)) v.emplace_back("delta <= 0.01 violated");
    return v;
}

inline void require_positive(const KnvModulusParams& p) {
    require(p.delta > 0.0 && p.gamma > 0.0, "KnvModulusParams: delta and gamma must be positive");
}

inline double knv_omega(double xi, const KnvModulusParams& p) {
    require(xi >= 0.0, "knv_omega: xi must be non-negative");
    require_positive(p);
    if (xi <= p.delta) return xi - xi * std::sqrt(xi);
    const double at_delta = p.delta - p.delta * std::sqrt(p.delta);
    return at_delta + p.gamma * std::log1p(std::log(xi / p.delta) / 4.0);
}

/// One-sided first derivative. xi = 0 gives the right derivative 1.
inline double knv_omega_prime(double xi, Side side, const KnvModulusParams& p) {
    require(xi >= 0.0, "knv_omega_prime: xi must be non-negative");
    require_positive(p);
    const bool power_branch = xi < p.delta || (xi == p.delta && side == Side::left);
    if (power_branch) return 1.0 - 1.5 * std::sqrt(xi);
    return p.gamma / (xi * (4.0 + std::log(xi / p.delta)));
}

/// Second derivative on the power branch, -(3/4) xi^{-1/2}. xi = delta gives
/// the left limit.
inline double knv_omega_second(double xi, const KnvModulusParams& p) {
    require_positive(p);
    require(xi > 0.0 && xi <= p.delta, "knv_omega_second: xi must lie in (0, delta]");
    return -0.75 / std::sqrt(xi);
}

/// The right derivative at delta never exceeds the left one.
inline bool knv_is_concave(const KnvModulusParams& p) {
    const double left = 1.0 - 1.5 * std::sqrt(p.delta);
    return left > 0.0 && p.gamma / (4.0 * p.delta) <= left;
}

class KnvModulus final : public ModulusOfContinuity {
public:
    explicit KnvModulus(KnvModulusParams p) : p_(p) { require_positive(p); }

    const KnvModulusParams& params() const { return p_; }

    double omega(double xi) const override { return knv_omega(xi, p_); }
    double omega_prime_left(double xi) const override { return knv_omega_prime(xi, Side::left, p_); }
    double omega_prime_right(double xi) const override { return knv_omega_prime(xi, Side::right, p_); }
    std::vector<double> breakpoints() const override { return {p_.delta}; }
    bool is_concave() const override { return knv_is_concave(p_); }

    double increment(double x, double h) const override {
        if (h <= 0.0) return 0.0;
        const double d = p_.delta;
        const double y = x + h;
        if (y <= d) return power_increment(x, h);
        if (x >= d) return log_increment(x, h);
        return power_increment(x, d - x) + log_increment(d, y - d);
    }

    std::optional<double> second_derivative(double xi) const override {
        if (xi <= 0.0 || xi == p_.delta) return std::nullopt;
        if (xi < p_.delta) return -0.75 / std::sqrt(xi);
        const double level = 4.0 + std::log(xi / p_.delta);
        return -p_.gamma * (level + 1.0) / (xi * xi * level * level);
    }

    // int_H^inf w/eta^2 = w(H)/H + gamma int_H^inf deta / (eta^2 (4 + log(eta/delta)))
    //                  <= w(H)/H + gamma / (H (4 + log(H/delta)))
    double tail_slack(double H) const override {
        if (H < p_.delta) return ModulusOfContinuity::tail_slack(H);
        return p_.gamma / ((4.0 + std::log(H / p_.delta)) * omega(H));
    }

    std::optional<double> head_integral(double a, double b) const override {
        if (a < 0.0 || b > p_.delta) return std::nullopt;
        return (b - a) - (2.0 / 3.0) * (b * std::sqrt(b) - a * std::sqrt(a));
    }
    std::optional<double> tail_integral(double a, double b) const override {
        if (a <= 0.0 || b > p_.delta) return std::nullopt;
        return std::log(b / a) - 2.0 * (std::sqrt(b) - std::sqrt(a));
    }

private:
    // (y - x) - (y^{3/2} - x^{3/2}) with y^{3/2} - x^{3/2} = h (y^2 + xy + x^2) / (y^{3/2} + x^{3/2})
    static double power_increment(double x, double h) {
        const double y = x + h;
        const double ys = y * std::sqrt(y), xs = x * std::sqrt(x);
        return h - h * (y * y + x * y + x * x) / (ys + xs);
    }
    double log_increment(double x, double h) const {
        const double level = 4.0 + std::log(x / p_.delta);
        return p_.gamma * std::log1p(std::log1p(h / x) / level);
    }

    KnvModulusParams p_;
};

// ---------------------------------------------------------------------------
// Test moduli
// ---------------------------------------------------------------------------

/// Concave piecewise-linear modulus: slope slopes[0] on [0, knots[0]],
/// slopes[i] on [knots[i-1], knots[i]], slopes.back() beyond the last knot.
class PiecewiseLinearModulus final : public ModulusOfContinuity {
public:
    PiecewiseLinearModulus(std::vector<double> knots, std::vector<double> slopes)
        : knots_(std::move(knots)), slopes_(std::move(slopes)) {
        require(slopes_.size() == knots_.size() + 1, "PiecewiseLinearModulus: need one more slope than knots");
        for (std::size_t i = 0; i < knots_.size(); ++i) {
            require(knots_[i] > (i ? knots_[i - 1] : 0.0), "PiecewiseLinearModulus: knots must increase from 0");
        }
        for (std::size_t i = 0; i < slopes_.size(); ++i) {
            require(slopes_[i] >= 0.0, "PiecewiseLinearModulus: slopes must be non-negative");
            if (i) concave_ = concave_ && slopes_[i] <= slopes_[i - 1];
        }
        values_.push_back(0.0);
        for (std::size_t i = 0; i < knots_.size(); ++i)
            values_.push_back(values_.back() + slopes_[i] * (knots_[i] - (i ? knots_[i - 1] : 0.0)));
    }

    /// min(eta, cap)
    static PiecewiseLinearModulus clamped(double cap) { return {{cap}, {1.0, 0.0}}; }

    double omega(double xi) const override {
        const std::size_t i = segment(xi);
        const double start = i ? knots_[i - 1] : 0.0;
        return values_[i] + slopes_[i] * (xi - start);
    }
    double omega_prime_left(double xi) const override {
        for (std::size_t i = 0; i < knots_.size(); ++i)
            if (xi <= knots_[i]) return slopes_[i];
        return slopes_.back();
    }
    double omega_prime_right(double xi) const override { return slopes_[segment(xi)]; }
    std::vector<double> breakpoints() const override { return knots_; }
    std::optional<double> second_derivative(double xi) const override {
        for (double k : knots_)
            if (xi == k) return std::nullopt;
        return 0.0;
    }
    bool is_concave() const override { return concave_; }

private:
    std::size_t segment(double xi) const {
        std::size_t i = 0;
        while (i < knots_.size() && xi >= knots_[i]) ++i;
        return i;
    }

    std::vector<double> knots_;
    std::vector<double> slopes_;
    std::vector<double> values_;
    bool concave_ = true;
};

/// w(eta) = c eta. Concave, but its tail integral diverges.
class LinearModulus final : public ModulusOfContinuity {
public:
    explicit LinearModulus(double c) : c_(c) { require(c > 0.0, "LinearModulus: slope must be positive"); }
    double omega(double xi) const override { return c_ * xi; }
    double omega_prime_left(double) const override { return c_; }
    double omega_prime_right(double) const override { return c_; }
    double increment(double, double h) const override { return c_ * h; }
    std::optional<double> second_derivative(double) const override { return 0.0; }
    double tail_slack(double) const override { return std::numeric_limits<double>::infinity(); }

private:
    double c_;
};

/// w(eta) = c eta^p with 0 < p < 1.
class PowerModulus final : public ModulusOfContinuity {
public:
    PowerModulus(double c, double p) : c_(c), p_(p) {
        require(c > 0.0 && p > 0.0 && p < 1.0, "PowerModulus: need c > 0 and 0 < p < 1");
    }
    double omega(double xi) const override { return c_ * std::pow(xi, p_); }
    double omega_prime_left(double xi) const override { return c_ * p_ * std::pow(xi, p_ - 1.0); }
    double omega_prime_right(double xi) const override { return omega_prime_left(xi); }
    double increment(double x, double h) const override {
        return x > 0.0 ? c_ * std::pow(x, p_) * std::expm1(p_ * std::log1p(h / x)) : omega(h);
    }
    std::optional<double> second_derivative(double xi) const override {
        if (xi <= 0.0) return std::nullopt;
        return c_ * p_ * (p_ - 1.0) * std::pow(xi, p_ - 2.0);
    }
    double tail_slack(double) const override { return p_ / (1.0 - p_); }

private:
    double c_, p_;
};

/// w_C(xi) = w(C xi), the scaling family.
class ScaledModulus final : public ModulusOfContinuity {
public:
    ScaledModulus(std::shared_ptr<const ModulusOfContinuity> base, double C) : base_(std::move(base)), C_(C) {
        require(C > 0.0, "ScaledModulus: C must be positive");
    }
    double omega(double xi) const override { return base_->omega(C_ * xi); }
    double omega_prime_left(double xi) const override { return C_ * base_->omega_prime_left(C_ * xi); }
    double omega_prime_right(double xi) const override { return C_ * base_->omega_prime_right(C_ * xi); }
    std::vector<double> breakpoints() const override {
        auto b = base_->breakpoints();
        for (double& x : b) x /= C_;
        return b;
    }
    double increment(double x, double h) const override { return base_->increment(C_ * x, C_ * h); }
    std::optional<double> second_derivative(double xi) const override {
        auto s = base_->second_derivative(C_ * xi);
        if (s) *s *= C_ * C_;
        return s;
    }
    double tail_slack(double H) const override { return base_->tail_slack(C_ * H); }
    bool is_concave() const override { return base_->is_concave(); }

private:
    std::shared_ptr<const ModulusOfContinuity> base_;
    double C_;
};

}  // namespace sqg
