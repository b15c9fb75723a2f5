#pragma once

// Field measurements tied to moduli of continuity: empirical moduli from
// pairwise grid differences, the smallest admissible member w_C(xi) = w(C xi)
// of the scaling family, the gradient bound |grad f| <= w_C'(0), and an
// empirical estimate of the constant A in the velocity modulus Omega.

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "sqg/error.hpp"
#include "sqg/field.hpp"
#include "sqg/functionals.hpp"
#include "sqg/modulus.hpp"
#include "sqg/parallel.hpp"
#include "sqg/spectral.hpp"

namespace sqg {

struct EmpiricalModulus {
    std::vector<double> distances;  // bin lower edges, increasing
    std::vector<double> max_diff;   // max |f(x) - f(y)| over pairs in the bin
    double cutoff = 0.0;
    bool subsampled = false;

    /// Running maximum of max_diff (weakly increasing in distance).
    std::vector<double> envelope() const {
        std::vector<double> out(max_diff);
        for (std::size_t i = 1; i < out.size(); ++i) out[i] = std::max(out[i], out[i - 1]);
        return out;
    }
};

struct EmpiricalModulusOptions {
    double cutoff = std::numbers::pi;
    /// Subsample offsets on grids with n >= this (0 disables subsampling).
    int subsample_from_n = 128;
    /// Offsets with max(|d1|, |d2|) <= this radius are always kept.
    int dense_radius = 8;
};

/// Pairwise-difference modulus of a (vector) field: for every lattice offset d
/// with |d| h <= cutoff, max over x of |f(x + d) - f(x)| with periodic wrap,
/// binned by separation into bins of width h/2 represented by their lower edge.
/// When subsampling, offsets outside the dense radius are kept only when
/// d1 + d2 is even; the result is then a lower bound of the full scan.
inline EmpiricalModulus empirical_modulus(std::span<const ScalarField> components,
                                          const EmpiricalModulusOptions& opt = {}) {
    require(!components.empty(), "empirical_modulus: no components");
    const TorusGrid grid = components.front().grid();
    for (const auto& c : components) require(c.grid() == grid, "empirical_modulus: grid mismatch");
    require(opt.cutoff > 0.0 && opt.cutoff <= std::numbers::pi * std::sqrt(2.0) * (1.0 + 1e-12),
            "empirical_modulus: cutoff must lie in (0, pi*sqrt(2)]");

    const int n = grid.n();
    const double h = grid.h();
    const double radius = opt.cutoff / h * (1.0 + 1e-12);
    const int reach = static_cast<int>(std::floor(radius));
    const bool subsample = opt.subsample_from_n > 0 && n >= opt.subsample_from_n;

    struct Offset {
        int d1, d2;
    };
    std::vector<Offset> offsets;
    for (int d1 = 0; d1 <= reach; ++d1)
        for (int d2 = -reach; d2 <= reach; ++d2) {
            if (d1 == 0 && d2 <= 0) continue;  // f(x+d) - f(x) and f(x-d) - f(x) share a maximum
            if (double(d1) * d1 + double(d2) * d2 > radius * radius) continue;
            const bool dense = std::max(d1, std::abs(d2)) <= opt.dense_radius;
            if (subsample && !dense && (d1 + d2) % 2 != 0) continue;
            offsets.push_back({d1, d2});
        }

    std::vector<double> result(offsets.size(), 0.0);
    parallel_for(offsets.size(), [&](std::size_t o) {
        const int s1 = ((offsets[o].d1 % n) + n) % n;
        const int s2 = ((offsets[o].d2 % n) + n) % n;
        double best = 0.0;
        for (int i1 = 0; i1 < n; ++i1) {
            const int j1 = (i1 + s1) % n;
            for (int i2 = 0; i2 < n; ++i2) {
                const int j2 = i2 + s2 < n ? i2 + s2 : i2 + s2 - n;
                double sq = 0.0;
                for (const auto& c : components) {
                    const double diff = c.at(j1, j2) - c.at(i1, i2);
                    sq += diff * diff;
                }
                best = std::max(best, sq);
            }
        }
        result[o] = std::sqrt(best);
    });

    std::map<long, double> bins;  // bin index -> max
    for (std::size_t o = 0; o < offsets.size(); ++o) {
        const double sep = std::hypot(double(offsets[o].d1), double(offsets[o].d2));  // in units of h
        const long bin = static_cast<long>(std::floor(2.0 * sep + 1e-9));
        auto [it, inserted] = bins.try_emplace(bin, result[o]);
        if (!inserted) it->second = std::max(it->second, result[o]);
    }
    EmpiricalModulus em;
    em.cutoff = opt.cutoff;
    em.subsampled = subsample;
    for (const auto& [bin, value] : bins) {
        em.distances.push_back(0.5 * h * static_cast<double>(bin));
        em.max_diff.push_back(value);
    }
    return em;
}

inline EmpiricalModulus empirical_modulus(const ScalarField& f, const EmpiricalModulusOptions& opt = {}) {
    return empirical_modulus(std::span<const ScalarField>(&f, 1), opt);
}

// ---------------------------------------------------------------------------
// Smallest admissible scaling constant
// ---------------------------------------------------------------------------

struct MinCSearch {
    double lower = 1e-6;
    double upper = 1e12;
    double rel_tol = 1e-3;
};

struct MinCResult {
    double C = 0.0;
    bool degenerate = false;  // field has no measurable oscillation
    bool subsampled = false;
};

/// True when max_diff(xi) <= w(C xi) at every measured separation and the
/// separations beyond the cutoff are covered: 2 sup|f| <= w(C cutoff).
inline bool has_scaled_modulus(const EmpiricalModulus& em, double sup_norm, const KnvModulusParams& p, double C) {
    for (std::size_t i = 0; i < em.distances.size(); ++i)
        if (em.max_diff[i] > knv_omega(C * em.distances[i], p)) return false;
    return 2.0 * sup_norm <= knv_omega(C * em.cutoff, p);
}

/// Bisection (in log C) for the smallest C with has_scaled_modulus. Throws
/// when even the upper end of the search range fails.
inline MinCResult min_admissible_C(const EmpiricalModulus& em, double sup_norm, const KnvModulusParams& p,
                                   const MinCSearch& search = {}) {
    require(em.cutoff > 0.0, "min_admissible_C: empirical modulus has no cutoff");
    MinCResult r;
    r.subsampled = em.subsampled;
    const bool flat = std::all_of(em.max_diff.begin(), em.max_diff.end(), [](double v) { return v == 0.0; });
    if (flat) {
        r.C = search.lower;
        r.degenerate = true;
        return r;
    }
    double lo = search.lower, hi = search.upper;
    if (has_scaled_modulus(em, sup_norm, p, lo)) {
        r.C = lo;
        return r;
    }
    if (!has_scaled_modulus(em, sup_norm, p, hi))
        throw Error("min_admissible_C: no member of the family up to C=" + std::to_string(hi) +
                    " dominates the field (amplitude too large for this modulus at this grid)");
    while (hi / lo - 1.0 > search.rel_tol) {
        const double mid = std::sqrt(lo * hi);
        (has_scaled_modulus(em, sup_norm, p, mid) ? hi : lo) = mid;
    }
    r.C = hi;
    return r;
}

inline MinCResult min_admissible_C(const ScalarField& f, const KnvModulusParams& p,
                                   const EmpiricalModulusOptions& opt = {}, const MinCSearch& search = {}) {
    return min_admissible_C(empirical_modulus(f, opt), f.sup_norm(), p, search);
}

/// Probe for trajectory snapshots: min_C of `scale * theta`. A fixed scale maps
/// the field amplitude into the range where the family can dominate it.
inline std::function<double(const ScalarField&)> min_C_probe(KnvModulusParams p, double scale,
                                                             EmpiricalModulusOptions opt = {}) {
    return [p, scale, opt](const ScalarField& theta) { return min_admissible_C(scale * theta, p, opt).C; };
}

/// Scale taking a field of sup norm `sup_norm` to amplitude w(delta)/2, so its
/// oscillation w(delta) is reachable by the slowly growing outer branch.
inline double probe_scale(double sup_norm, const KnvModulusParams& p) {
    require(sup_norm > 0.0, "probe_scale: field is identically zero");
    return 0.5 * knv_omega(p.delta, p) / sup_norm;
}

// ---------------------------------------------------------------------------
// Gradient bound
// ---------------------------------------------------------------------------

struct GradientBoundReport {
    double sup_grad = 0.0;
    double bound = 0.0;       // C w'(0) (1 + tol)
    bool has_modulus = false;  // the field has modulus w_C at grid resolution
    bool passes = false;
};

/// |grad f|_inf <= w_C'(0) = C w'(0), with relative slack tol for discretization.
inline GradientBoundReport gradient_bound_check(const ScalarField& f, const KnvModulusParams& p, double C,
                                                double tol = 1e-2, const EmpiricalModulusOptions& opt = {}) {
    GradientBoundReport r;
    r.sup_grad = sup_gradient(to_spectral(f));
    r.bound = C * knv_omega_prime(0.0, Side::right, p) * (1.0 + tol);
    r.has_modulus = has_scaled_modulus(empirical_modulus(f, opt), f.sup_norm(), p, C);
    r.passes = r.sup_grad <= r.bound;
    return r;
}

// ---------------------------------------------------------------------------
// Empirical Lemma constant
// ---------------------------------------------------------------------------

struct CalibrationEntry {
    double C = 0.0;
    double ratio = 0.0;  // max over separations of max_diff_u / Omega_1(C xi)
    double xi_at_max = 0.0;
};

struct CalibrationResult {
    double A = 0.0;
    std::vector<CalibrationEntry> fields;
};

/// For each field: C = min_admissible_C, u = velocity, and the largest ratio of
/// the velocity's empirical modulus to Omega_1(C xi) (Omega with A = 1 for w;
/// Omega of w_C at xi equals Omega of w at C xi). Returns the supremum.
inline CalibrationResult calibrate_A(std::span<const ScalarField> corpus, const KnvModulusParams& p,
                                     const EmpiricalModulusOptions& opt = {}, const FunctionalOptions& fopt = {}) {
    require(!corpus.empty(), "calibrate_A: empty corpus");
    const KnvModulus w(p);
    CalibrationResult out;
    for (const auto& f : corpus) {
        const EmpiricalModulus em_f = empirical_modulus(f, opt);
        const MinCResult mc = min_admissible_C(em_f, f.sup_norm(), p);
        if (mc.degenerate) throw InvalidArgument("calibrate_A: degenerate (constant) field in corpus");
        const VelocityField u = velocity_from_theta(to_spectral(f));
        const ScalarField parts[] = {u.u1, u.u2};
        const EmpiricalModulus em_u = empirical_modulus(std::span<const ScalarField>(parts), opt);
        if (em_u.distances.empty()) throw InvalidArgument("calibrate_A: cutoff leaves no separations to measure");
        CalibrationEntry e{mc.C, 0.0, 0.0};
        for (std::size_t i = 0; i < em_u.distances.size(); ++i) {
            const double xi = em_u.distances[i];
            if (xi <= 0.0) continue;
            const double ratio = em_u.max_diff[i] / big_omega(mc.C * xi, w, 1.0, fopt).value.value;
            if (ratio > e.ratio) e = {mc.C, ratio, xi};
        }
        out.A = std::max(out.A, e.ratio);
        out.fields.push_back(e);
    }
    return out;
}

/// Single Fourier modes a cos(k.x) for a fixed list of wavevectors, with
/// amplitude w(delta)/2 so every member has a finite admissible C.
inline std::vector<ScalarField> single_mode_corpus(const TorusGrid& grid, const KnvModulusParams& p) {
    const double amp = 0.5 * knv_omega(p.delta, p);
    const int modes[][2] = {{1, 0}, {0, 1}, {1, 1}, {2, 1}, {1, -2}, {3, 0}};
    std::vector<ScalarField> corpus;
    for (const auto& k : modes)
        corpus.push_back(ScalarField::sample(grid, [&](double x1, double x2) { return amp * std::cos(k[0] * x1 + k[1] * x2); }));
    return corpus;
}

}  // namespace sqg
