#pragma once

// Functionals of a modulus of continuity w that enter the time derivative of
// theta(x) - theta(y) at a touching pair |x - y| = xi:
//
//   Omega(xi)       = A ( int_0^xi w/eta deta + xi int_xi^inf w/eta^2 deta )
//   flow(xi)        = Omega(xi) w'(xi)
//   dissipation(xi) = 1/pi int_0^{xi/2} [w(xi+2eta) + w(xi-2eta) - 2w(xi)] / eta^2 deta
//                   + 1/pi int_{xi/2}^inf [w(2eta+xi) - w(2eta-xi) - 2w(xi)] / eta^2 deta

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "sqg/error.hpp"
#include "sqg/modulus.hpp"
#include "sqg/quadrature.hpp"

namespace sqg {

using quad::Estimate;

struct FunctionalOptions {
    quad::Tolerance tol{1e-300, 1e-10};
    int max_intervals = 4000;
    /// Use a modulus' closed-form integrals where it provides them.
    bool closed_forms = true;
    /// Truncation point of improper integrals, as a multiple of max(xi, length scale).
    double cutoff_factor = 1e8;
    /// Width of the band near eta = 0 where the first dissipation integrand is
    /// replaced by its limit, relative to xi.
    double guard_band = 1e-6;
    /// Evaluate the dissipation functional even for a non-concave modulus.
    bool allow_nonconcave = false;
};

namespace detail {

inline std::vector<double> cuts_inside(const std::vector<double>& points, double a, double b) {
    std::vector<double> out;
    for (double p : points)
        if (p > a && p < b) out.push_back(p);
    return out;
}

/// int_a^b w(eta) / eta^power deta (power 1 or 2), splitting at the modulus kinks.
inline Estimate weighted_integral(const ModulusOfContinuity& w, int power, double a, double b,
                                  const FunctionalOptions& opt) {
    if (!(b > a)) return {};
    std::vector<double> nodes{a};
    for (double c : cuts_inside(w.breakpoints(), a, b)) nodes.push_back(c);
    nodes.push_back(b);

    Estimate closed;
    std::vector<quad::Piece> pieces;
    quad::Integrand f;
    if (power == 1)
        f = [&w](double eta) { return eta > 0.0 ? w.omega(eta) / eta : w.omega_prime_right(0.0); };
    else
        f = [&w](double eta) { return w.omega(eta) / (eta * eta); };

    for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
        const double lo = nodes[i], hi = nodes[i + 1];
        if (opt.closed_forms) {
            const auto exact = power == 1 ? w.head_integral(lo, hi) : w.tail_integral(lo, hi);
            if (exact) {
                closed.value += *exact;
                closed.error += 4.0 * std::numeric_limits<double>::epsilon() * std::abs(*exact);
                continue;
            }
        }
        if (lo == 0.0) {
            pieces.push_back(quad::sqrt_start_piece(f, lo, hi));
        } else {
            auto split = quad::split_pieces(f, lo, hi, {});
            pieces.insert(pieces.end(), split.begin(), split.end());
        }
    }
    const quad::Result r = quad::integrate(pieces, opt.tol, opt.max_intervals);
    return closed + Estimate{r.value, r.error};
}

}  // namespace detail

struct BigOmegaResult {
    Estimate value;  // A (head + xi tail)
    Estimate head;   // int_0^xi w/eta
    Estimate tail;   // int_xi^inf w/eta^2, remainder enclosure included
};

/// int_xi^inf w/eta^2: quadrature to a cutoff H plus the enclosure
/// w(H)/H <= remainder <= (1 + slack) w(H)/H, counted at its midpoint.
inline Estimate tail_integral(const ModulusOfContinuity& w, double xi, const FunctionalOptions& opt = {}) {
    require(xi > 0.0, "tail_integral: xi must be positive");
    double H = opt.cutoff_factor * std::max(xi, w.length_scale());
    double slack = w.tail_slack(H);
    if (!std::isfinite(slack))
        throw DivergentTail("tail integral of w/eta^2 diverges: modulus grows linearly at infinity");
    Estimate body = detail::weighted_integral(w, 2, xi, H, opt);
    for (int extend = 0; extend < 8; ++extend) {
        const double half_width = 0.5 * slack * w.omega(H) / H;
        if (half_width <= opt.tol.target(body.value)) break;
        const double H_next = H * 1e4;
        if (!std::isfinite(H_next)) break;
        body += detail::weighted_integral(w, 2, H, H_next, opt);
        H = H_next;
        slack = w.tail_slack(H);
        if (!std::isfinite(slack)) throw DivergentTail("tail integral of w/eta^2 diverges");
    }
    const double base = w.omega(H) / H;
    return body + Estimate{base * (1.0 + 0.5 * slack), 0.5 * slack * base};
}

inline Estimate head_integral(const ModulusOfContinuity& w, double xi, const FunctionalOptions& opt = {}) {
    require(xi >= 0.0, "head_integral: xi must be non-negative");
    return detail::weighted_integral(w, 1, 0.0, xi, opt);
}

/// Velocity modulus Omega(xi) for a field with modulus w.
inline BigOmegaResult big_omega(double xi, const ModulusOfContinuity& w, double A, const FunctionalOptions& opt = {}) {
    require(xi >= 0.0, "big_omega: xi must be non-negative");
    require(A > 0.0, "big_omega: A must be positive");
    if (xi == 0.0) {
        // Convergence pre-check even at the origin.
        if (!std::isfinite(w.tail_slack(opt.cutoff_factor * w.length_scale())))
            throw DivergentTail("tail integral of w/eta^2 diverges");
        return {};
    }
    BigOmegaResult r;
    r.head = head_integral(w, xi, opt);
    r.tail = tail_integral(w, xi, opt);
    r.value = A * (r.head + xi * r.tail);
    return r;
}

struct DissipationResult {
    Estimate total;   // (first + second) / pi
    Estimate first;   // int_0^{xi/2}, without the 1/pi factor
    Estimate second;  // int_{xi/2}^inf, without the 1/pi factor
};

/// Upper bound on the dissipative contribution at separation xi.
inline DissipationResult dissipation_functional(double xi, const ModulusOfContinuity& w,
                                                const FunctionalOptions& opt = {}) {
    require(xi > 0.0, "dissipation_functional: xi must be positive");
    if (!opt.allow_nonconcave && !w.is_concave())
        throw NonConcaveModulus("dissipation_functional: the modulus is not concave");

    const double w_xi = w.omega(xi);
    const auto kinks = w.breakpoints();
    // Both integrands are bounded by multiples of w(xi)/xi^2 in size; tie the
    // absolute target to that scale so cancellation does not stall refinement.
    quad::Tolerance tol = opt.tol;
    tol.abs = std::max(tol.abs, 1e-3 * tol.rel * w_xi / xi);

    DissipationResult r;

    // First integral. Second difference D(eta) = w(xi+2eta) + w(xi-2eta) - 2w(xi),
    // formed from two one-sided increments.
    auto second_difference = [&w, xi](double eta) {
        const double step = 2.0 * eta;
        return w.increment(xi, step) - w.increment(std::max(0.0, xi - step), std::min(step, xi));
    };
    const double guard = opt.guard_band * xi;
    {
        bool kink_near = false;
        for (double b : kinks) kink_near = kink_near || std::abs(b - xi) <= 2.0 * guard;
        const double edge_value = second_difference(guard) / (guard * guard);
        const auto curvature = w.second_derivative(xi);
        if (curvature && !kink_near) {
            const double limit = 4.0 * *curvature;
            r.first = {limit * guard, std::abs(limit - edge_value) * guard};
        } else {
            r.first = {edge_value * guard, std::abs(edge_value) * guard};
        }

        std::vector<double> cuts;
        for (double b : kinks) {
            cuts.push_back(0.5 * (b - xi));
            cuts.push_back(0.5 * (xi - b));
        }
        auto integrand = [&](double eta) { return second_difference(eta) / (eta * eta); };
        const auto pieces = quad::split_pieces(integrand, guard, 0.5 * xi, detail::cuts_inside(cuts, guard, 0.5 * xi));
        const quad::Result q = quad::integrate(pieces, tol, opt.max_intervals);
        r.first += Estimate{q.value, q.error};
    }

    // Second integral, truncated at eta_max. Beyond it the -2w(xi)/eta^2 part
    // integrates exactly. For concave w, S(eta) = w(2eta + xi) - w(2eta - xi) is
    // non-increasing and at most 2 xi w'_+(2eta - xi), so the rest of the tail lies in
    // [S(far) (1/eta_max - 1/far), S(eta_max) / eta_max] for any far > eta_max.
    {
        const double eta_max = opt.cutoff_factor * std::max(xi, w.length_scale());
        std::vector<double> cuts;
        for (double b : kinks) {
            cuts.push_back(0.5 * (b - xi));
            cuts.push_back(0.5 * (b + xi));
        }
        auto integrand = [&](double eta) {
            const double lower = std::max(0.0, 2.0 * eta - xi);
            return (w.increment(lower, 2.0 * xi) - 2.0 * w_xi) / (eta * eta);
        };
        const auto pieces =
            quad::split_pieces(integrand, 0.5 * xi, eta_max, detail::cuts_inside(cuts, 0.5 * xi, eta_max));
        const quad::Result q = quad::integrate(pieces, tol, opt.max_intervals);
        auto spread = [&](double eta) { return w.increment(2.0 * eta - xi, 2.0 * xi); };
        const double far = 1e8 * eta_max;
        const double hi = spread(eta_max) / eta_max;
        const double lo = std::min(hi, spread(far) * (1.0 / eta_max - 1.0 / far));
        r.second = Estimate{q.value, q.error} + Estimate{-2.0 * w_xi / eta_max + 0.5 * (hi + lo), 0.5 * (hi - lo)};
    }

    r.total = (1.0 / std::numbers::pi) * (r.first + r.second);
    return r;
}

/// Omega(xi) w'(xi); the derivative side matters only at kinks.
inline Estimate flow_functional(double xi, const ModulusOfContinuity& w, double A, Side side = Side::left,
                                const FunctionalOptions& opt = {}) {
    require(xi >= 0.0, "flow_functional: xi must be non-negative");
    if (xi == 0.0) return {};
    const double slope = side == Side::left ? w.omega_prime_left(xi) : w.omega_prime_right(xi);
    return slope * big_omega(xi, w, A, opt).value;
}

inline Estimate flow_functional(double xi, const KnvModulusParams& p, double A, const FunctionalOptions& opt = {}) {
    return flow_functional(xi, KnvModulus(p), A, Side::left, opt);
}

}  // namespace sqg
