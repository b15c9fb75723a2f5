#pragma once

// Globally adaptive Gauss-Kronrod (7/15) quadrature over a list of pieces.
//
// The error estimate of a subinterval is the raw |K15 - G7| difference plus a
// roundoff floor. This is deliberately not the sharpened QUADPACK heuristic:
// K15 is far more accurate than G7 on resolved intervals, so the raw
// difference bounds the K15 error from above in practice.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <queue>
#include <span>
#include <vector>

#include "sqg/error.hpp"

namespace sqg::quad {

struct Tolerance {
    double abs = 1e-14;
    double rel = 1e-10;

    double target(double value) const { return std::max(abs, rel * std::abs(value)); }
};

/// Value with an error estimate; sums propagate errors additively.
struct Estimate {
    double value = 0.0;
    double error = 0.0;

    Estimate& operator+=(const Estimate& o) {
        value += o.value;
        error += o.error;
        return *this;
    }
    friend Estimate operator+(Estimate a, const Estimate& b) { return a += b; }
    friend Estimate operator*(double s, Estimate e) { return {s * e.value, std::abs(s) * e.error}; }
};

struct Result : Estimate {
    int intervals = 0;
    int evaluations = 0;
    bool converged = true;
};

using Integrand = std::function<double(double)>;

/// An integrand on [a, b] in its own (possibly transformed) variable.
struct Piece {
    Integrand f;
    double a;
    double b;
};

namespace detail {

inline constexpr std::array<double, 8> xgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> wgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
// Gauss weights for the odd-indexed Kronrod nodes xgk[1], xgk[3], xgk[5], xgk[7].
inline constexpr std::array<double, 4> wg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Interval {
    std::size_t piece;
    double a, b;
    double value, error;
    bool operator<(const Interval& o) const { return error < o.error; }
};

inline Interval gk15(const Integrand& f, std::size_t piece, double a, double b) {
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double fc = f(center);
    double kronrod = wgk[7] * fc;
    double gauss = wg[3] * fc;
    double abs_sum = std::abs(kronrod);
    for (int j = 0; j < 7; ++j) {
        const double dx = half * xgk[j];
        const double f1 = f(center - dx);
        const double f2 = f(center + dx);
        kronrod += wgk[j] * (f1 + f2);
        abs_sum += wgk[j] * (std::abs(f1) + std::abs(f2));
        if (j % 2 == 1) gauss += wg[j / 2] * (f1 + f2);
    }
    kronrod *= half;
    gauss *= half;
    abs_sum *= std::abs(half);
    const double roundoff = 50.0 * std::numeric_limits<double>::epsilon() * abs_sum;
    double err = std::abs(kronrod - gauss) + roundoff;
    if (!std::isfinite(kronrod)) err = std::numeric_limits<double>::infinity();
    return {piece, a, b, kronrod, err};
}

}  // namespace detail

/// Integrates the sum of all pieces to tol, bisecting the interval with the
/// largest error estimate until the total error meets tol or max_intervals
/// is reached (then converged = false and the estimate is still returned).
inline Result integrate(std::span<const Piece> pieces, Tolerance tol = {}, int max_intervals = 4000) {
    std::priority_queue<detail::Interval> heap;
    Result r;
    for (std::size_t p = 0; p < pieces.size(); ++p) {
        if (pieces[p].b == pieces[p].a) continue;
        auto iv = detail::gk15(pieces[p].f, p, pieces[p].a, pieces[p].b);
        r.value += iv.value;
        r.error += iv.error;
        r.evaluations += 15;
        heap.push(iv);
    }
    r.intervals = static_cast<int>(heap.size());
    while (!heap.empty() && r.error > tol.target(r.value)) {
        if (r.intervals >= max_intervals) {
            r.converged = false;
            break;
        }
        const detail::Interval worst = heap.top();
        const double mid = 0.5 * (worst.a + worst.b);
        if (mid <= std::min(worst.a, worst.b) || mid >= std::max(worst.a, worst.b)) {
            r.converged = false;  // interval exhausted at machine resolution
            break;
        }
        heap.pop();
        const auto& f = pieces[worst.piece].f;
        const auto left = detail::gk15(f, worst.piece, worst.a, mid);
        const auto right = detail::gk15(f, worst.piece, mid, worst.b);
        r.value += left.value + right.value - worst.value;
        r.error += left.error + right.error - worst.error;
        r.evaluations += 30;
        ++r.intervals;
        heap.push(left);
        heap.push(right);
    }
    // Re-sum to shed the drift of incremental updates.
    double value = 0.0, error = 0.0;
    for (; !heap.empty(); heap.pop()) {
        value += heap.top().value;
        error += heap.top().error;
    }
    r.value = value;
    r.error = error;
    if (!std::isfinite(r.value)) r.converged = false;
    return r;
}

inline Result integrate(const Integrand& f, double a, double b, Tolerance tol = {}, int max_intervals = 4000) {
    const Piece p{f, a, b};
    return integrate(std::span<const Piece>(&p, 1), tol, max_intervals);
}

// Variable changes that turn common endpoint behaviour into smooth integrands.

/// Plain piece on [a, b].
inline Piece linear_piece(Integrand f, double a, double b) { return {std::move(f), a, b}; }

/// eta = exp(s) on [log a, log b]; suited to spans of many decades. Requires 0 < a < b.
inline Piece log_piece(Integrand f, double a, double b) {
    require(a > 0.0 && b > a, "log_piece: requires 0 < a < b");
    return {[f = std::move(f)](double s) {
                const double eta = std::exp(s);
                return f(eta) * eta;
            },
            std::log(a), std::log(b)};
}

/// eta = a + (b - a) v^2 on v in [0, 1]; removes square-root behaviour at a.
inline Piece sqrt_start_piece(Integrand f, double a, double b) {
    const double w = b - a;
    return {[f = std::move(f), a, w](double v) { return f(a + w * v * v) * 2.0 * w * v; }, 0.0, 1.0};
}

/// Splits [a, b] at the given interior points and picks a variable per
/// subinterval: logarithmic when it spans more than a factor `log_ratio`.
inline std::vector<Piece> split_pieces(const Integrand& f, double a, double b, std::vector<double> cuts,
                                       double log_ratio = 4.0) {
    std::vector<double> nodes{a};
    std::sort(cuts.begin(), cuts.end());
    for (double c : cuts)
        if (c > nodes.back() && c < b) nodes.push_back(c);
    nodes.push_back(b);
    std::vector<Piece> out;
    for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
        const double lo = nodes[i], hi = nodes[i + 1];
        if (!(hi > lo)) continue;
        if (lo > 0.0 && hi / lo > log_ratio)
            out.push_back(log_piece(f, lo, hi));
        else
            out.push_back(linear_piece(f, lo, hi));
    }
    return out;
}

}  // namespace sqg::quad
