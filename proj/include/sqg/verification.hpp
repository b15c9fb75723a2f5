#pragma once

// Verification of the breakthrough inequality
//
//     flow(xi) + dissipation(xi) < 0   for all xi > 0
//
// for the explicit two-branch modulus, plus the intermediate bound chains of
// the small-xi (xi <= delta) and large-xi (xi >= delta) cases.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "sqg/error.hpp"
#include "sqg/functionals.hpp"
#include "sqg/modulus.hpp"
#include "sqg/parallel.hpp"

namespace sqg {

struct MarginReport {
    double xi = 0.0;
    double flow = 0.0;
    double dissipation = 0.0;
    double margin = 0.0;  // flow + dissipation
    double quad_error = 0.0;

    /// Negative by more than twice the error estimate.
    bool certified() const { return margin < 0.0 && -margin > 2.0 * quad_error; }
};

inline MarginReport breakthrough_margin(double xi, const ModulusOfContinuity& w, double A,
                                        const FunctionalOptions& opt = {}) {
    require(xi > 0.0, "breakthrough_margin: xi must be positive");
    const Estimate flow = flow_functional(xi, w, A, Side::left, opt);
    const Estimate diss = dissipation_functional(xi, w, opt).total;
    return {xi, flow.value, diss.value, flow.value + diss.value, flow.error + diss.error};
}

inline MarginReport breakthrough_margin(double xi, const KnvModulusParams& p, double A,
                                        const FunctionalOptions& opt = {}) {
    return breakthrough_margin(xi, KnvModulus(p), A, opt);
}

inline std::vector<double> log_grid(double lo, double hi, std::size_t points) {
    require(lo > 0.0 && hi >= lo, "log_grid: need 0 < lo <= hi");
    require(points >= 1, "log_grid: need at least one point");
    if (points == 1) return {lo};
    std::vector<double> g(points);
    const double step = std::log(hi / lo) / static_cast<double>(points - 1);
    for (std::size_t i = 0; i < points; ++i) g[i] = lo * std::exp(step * static_cast<double>(i));
    g.back() = hi;
    return g;
}

struct MarginScan {
    std::vector<MarginReport> reports;
    std::size_t argmax = 0;  // index of the largest margin

    const MarginReport& worst() const { return reports.at(argmax); }
    bool all_negative() const {
        return std::all_of(reports.begin(), reports.end(), [](const auto& r) { return r.margin < 0.0; });
    }
    bool all_certified() const {
        return std::all_of(reports.begin(), reports.end(), [](const auto& r) { return r.certified(); });
    }
    double total_error() const {
        double e = 0.0;
        for (const auto& r : reports) e += r.quad_error;
        return e;
    }
};

/// Margins at every grid point; evaluated in parallel, reduced in grid order.
inline MarginScan scan_margins(const std::vector<double>& xi_grid, const ModulusOfContinuity& w, double A,
                               const FunctionalOptions& opt = {}) {
    require(!xi_grid.empty(), "scan_margins: empty grid");
    MarginScan scan;
    scan.reports.resize(xi_grid.size());
    parallel_for(xi_grid.size(), [&](std::size_t i) { scan.reports[i] = breakthrough_margin(xi_grid[i], w, A, opt); });
    for (std::size_t i = 1; i < scan.reports.size(); ++i)
        if (scan.reports[i].margin > scan.reports[scan.argmax].margin) scan.argmax = i;
    return scan;
}

inline MarginScan scan_margins(const std::vector<double>& xi_grid, const KnvModulusParams& p, double A,
                               const FunctionalOptions& opt = {}) {
    return scan_margins(xi_grid, KnvModulus(p), A, opt);
}

// ---------------------------------------------------------------------------
// Feasibility
// ---------------------------------------------------------------------------

/// delta bound from the small-xi chain at xi = delta: 3A < (3 / 4pi) delta^{-1/2}.
inline double small_case_delta_bound(double A) { return 1.0 / (16.0 * std::numbers::pi * std::numbers::pi * A * A); }

/// Sufficient conditions for certification, each named by the inequality it needs.
inline std::vector<std::string> feasibility_violations(const KnvModulusParams& p, double A) {
    std::vector<std::string> v;
    if (!(A > 0.0)) v.emplace_back("A > 0 violated");
    for (auto& s : admissibility_violations(p)) v.push_back(std::move(s));
    if (!(A * p.gamma < 1.0 / std::numbers::pi)) v.emplace_back("A*gamma < 1/pi violated");
    if (!(4.0 * std::numbers::pi * A * std::sqrt(p.delta) < 1.0)) v.emplace_back("4*pi*A*sqrt(delta) < 1 violated");
    if (p.delta > 0.0 && p.gamma > 0.0 && !knv_is_concave(p)) v.emplace_back("concavity at delta violated");
    return v;
}

// ---------------------------------------------------------------------------
// Bound chains
// ---------------------------------------------------------------------------

struct ChainLink {
    std::string name;
    double lhs = 0.0;
    double rhs = 0.0;
    double error = 0.0;  // quadrature error carried by lhs
    bool strict = false;

    bool holds() const { return strict ? lhs + error < rhs : lhs <= rhs + error; }
    double slack() const { return rhs - lhs; }
};

struct ChainRecord {
    double xi = 0.0;
    std::vector<ChainLink> links;

    bool all_hold() const {
        return std::all_of(links.begin(), links.end(), [](const auto& l) { return l.holds(); });
    }
    std::vector<std::string> failures() const {
        std::vector<std::string> f;
        for (const auto& l : links)
            if (!l.holds()) f.push_back(l.name);
        return f;
    }
};

/// Small-xi chain (0 < xi <= delta):
///   int_0^xi w/eta <= xi;  int_xi^delta w/eta^2 <= log(delta/xi);
///   int_delta^inf w/eta^2 <= 1 + gamma/(4 delta) < 2;
///   flow <= A xi (3 + log(delta/xi));
///   first dissipation integral / pi <= xi w''(xi) / pi;
///   A xi (3 + log(delta/xi)) + xi w''(xi) / pi < 0.
inline ChainRecord check_case_small(double xi, const KnvModulusParams& p, double A, const FunctionalOptions& opt = {}) {
    require_positive(p);
    require(xi > 0.0 && xi <= p.delta, "check_case_small: xi must lie in (0, delta]");
    const KnvModulus w(p);
    const double pi = std::numbers::pi;
    const double d = p.delta;

    const Estimate head = head_integral(w, xi, opt);
    const Estimate near_tail = detail::weighted_integral(w, 2, xi, d, opt);
    const Estimate far_tail = tail_integral(w, d, opt);
    const Estimate flow = flow_functional(xi, w, A, Side::left, opt);
    const Estimate first = (1.0 / pi) * dissipation_functional(xi, w, opt).first;

    const double positive_bound = A * xi * (3.0 + std::log(d / xi));
    const double negative_bound = xi * knv_omega_second(xi, p) / pi;  // = -(3/4pi) xi^{1/2}

    ChainRecord rec{xi, {}};
    rec.links.push_back({"int_0^xi w/eta <= xi", head.value, xi, head.error});
    rec.links.push_back({"int_xi^delta w/eta^2 <= log(delta/xi)", near_tail.value, std::log(d / xi), near_tail.error});
    rec.links.push_back({"int_delta^inf w/eta^2 <= 1 + gamma/(4 delta)", far_tail.value, 1.0 + p.gamma / (4.0 * d),
                         far_tail.error});
    rec.links.push_back({"1 + gamma/(4 delta) < 2", 1.0 + p.gamma / (4.0 * d), 2.0, 0.0, true});
    rec.links.push_back({"flow <= A xi (3 + log(delta/xi))", flow.value, positive_bound, flow.error});
    rec.links.push_back({"first dissipation integral <= xi w''(xi)/pi", first.value, negative_bound, first.error});
    rec.links.push_back({"A xi (3 + log(delta/xi)) + xi w''(xi)/pi < 0", positive_bound + negative_bound, 0.0, 0.0, true});
    return rec;
}

/// Large-xi chain (xi >= delta); the flow term uses the right derivative of w:
///   w(delta) > delta/2;  int_0^xi w/eta <= w(xi)(2 + log(xi/delta));
///   int_xi^inf w/eta^2 <= 2 w(xi)/xi;  Omega(xi) w'(xi) <= A gamma w(xi)/xi;
///   w(2xi) <= w(xi) + gamma/4 <= 3/2 w(xi);
///   second dissipation integral / pi <= -w(xi)/(pi xi);
///   (A gamma - 1/pi) w(xi)/xi < 0.
inline ChainRecord check_case_large(double xi, const KnvModulusParams& p, double A, const FunctionalOptions& opt = {}) {
    require_positive(p);
    require(xi >= p.delta, "check_case_large: xi must be >= delta");
    const KnvModulus w(p);
    const double pi = std::numbers::pi;
    const double d = p.delta;
    const double w_xi = w.omega(xi);

    const BigOmegaResult om = big_omega(xi, w, A, opt);
    const Estimate flow = w.omega_prime_right(xi) * om.value;
    const DissipationResult diss = dissipation_functional(xi, w, opt);
    const Estimate second = (1.0 / pi) * diss.second;
    const Estimate first = (1.0 / pi) * diss.first;

    ChainRecord rec{xi, {}};
    rec.links.push_back({"w(delta) > delta/2", d / 2.0, w.omega(d), 0.0, true});
    rec.links.push_back({"int_0^xi w/eta <= w(xi)(2 + log(xi/delta))", om.head.value, w_xi * (2.0 + std::log(xi / d)),
                         om.head.error});
    rec.links.push_back({"int_xi^inf w/eta^2 <= 2 w(xi)/xi", om.tail.value, 2.0 * w_xi / xi, om.tail.error});
    rec.links.push_back({"Omega(xi) w'(xi) <= A gamma w(xi)/xi", flow.value, A * p.gamma * w_xi / xi, flow.error});
    rec.links.push_back({"w(2 xi) <= w(xi) + gamma/4", w.omega(2.0 * xi), w_xi + p.gamma / 4.0, 0.0});
    rec.links.push_back({"w(xi) + gamma/4 <= 3/2 w(xi)", w_xi + p.gamma / 4.0, 1.5 * w_xi, 0.0});
    rec.links.push_back({"first dissipation integral <= 0", first.value, 0.0, first.error});
    rec.links.push_back({"second dissipation integral <= -w(xi)/(pi xi)", second.value, -w_xi / (pi * xi), second.error});
    rec.links.push_back({"(A gamma - 1/pi) w(xi)/xi < 0", (A * p.gamma - 1.0 / pi) * w_xi / xi, 0.0, 0.0, true});
    return rec;
}

/// Runs both chains on `points` log-spaced samples each: (0, delta] from
/// 1e-8 delta, and [delta, 1e8 delta].
struct ChainSuite {
    std::vector<ChainRecord> small;
    std::vector<ChainRecord> large;

    bool all_hold() const {
        auto ok = [](const auto& v) {
            return std::all_of(v.begin(), v.end(), [](const auto& r) { return r.all_hold(); });
        };
        return ok(small) && ok(large);
    }
};

inline ChainSuite check_case_chains(const KnvModulusParams& p, double A, std::size_t points = 64,
                                    const FunctionalOptions& opt = {}) {
    const auto small_grid = log_grid(1e-8 * p.delta, p.delta, points);
    const auto large_grid = log_grid(p.delta, 1e8 * p.delta, points);
    ChainSuite suite;
    suite.small.resize(points);
    suite.large.resize(points);
    parallel_for(2 * points, [&](std::size_t i) {
        if (i < points)
            suite.small[i] = check_case_small(small_grid[i], p, A, opt);
        else
            suite.large[i - points] = check_case_large(large_grid[i - points], p, A, opt);
    });
    return suite;
}

// ---------------------------------------------------------------------------
// Parameter search
// ---------------------------------------------------------------------------

struct ParamCandidate {
    KnvModulusParams params;
    double max_margin = 0.0;
    double xi_at_max = 0.0;
    double quad_error = 0.0;
    bool certified = false;
};

struct ParamSearchResult {
    std::optional<ParamCandidate> found;
    std::vector<ParamCandidate> tried;
    std::string message;
};

struct ParamSearchOptions {
    std::size_t scan_points = 121;
    double xi_span = 1e8;  // scan covers [delta / span, delta * span]
    FunctionalOptions functional{};
};

/// Walks delta down from the largest value allowed by the pre-filters
///   gamma < delta/2,  A gamma < 1/pi,  4 pi A sqrt(delta) < 1,  delta <= 0.01
/// and returns the first (delta, gamma) whose scanned margins are all certified
/// negative. An empty search box is reported in the message, not thrown.
inline ParamSearchResult search_params(double A, const ParamSearchOptions& opt = {}) {
    require(A > 0.0, "search_params: A must be positive");
    ParamSearchResult out;
    const double delta_top = std::min(knv_delta_max, 0.5 * small_case_delta_bound(A));
    const double gamma_cap = 1.0 / (std::numbers::pi * A);
    for (double delta_scale : {1.0, 0.1, 1e-2, 1e-3, 1e-4, 1e-6}) {
        const double delta = delta_top * delta_scale;
        if (!(delta > 1e-300)) continue;
        for (double gamma_scale : {0.2, 0.02, 2e-3}) {
            const double gamma = gamma_scale * std::min(delta / 2.0, gamma_cap);
            const KnvModulusParams p{delta, gamma};
            if (!feasibility_violations(p, A).empty()) continue;
            const auto grid = log_grid(delta / opt.xi_span, delta * opt.xi_span, opt.scan_points);
            const MarginScan scan = scan_margins(grid, p, A, opt.functional);
            ParamCandidate c{p, scan.worst().margin, scan.worst().xi, scan.total_error(), scan.all_certified()};
            out.tried.push_back(c);
            if (c.certified) {
                out.found = c;
                out.message = "certified";
                return out;
            }
        }
    }
    out.message = "no certified (delta, gamma) in the search box";
    return out;
}

}  // namespace sqg
