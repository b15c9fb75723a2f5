#pragma once

#include <cmath>
#include <optional>

namespace sqg {

/// One row of the per-step diagnostics time series.
struct DiagnosticsRecord {
    double t = 0.0;
    double sup_theta = 0.0;  // ||theta||_inf on the grid
    double sup_grad = 0.0;   // ||grad theta||_inf on the grid
    double l2 = 0.0;         // ||theta||_2 over the period cell
    std::optional<double> min_C;

    bool valid() const {
        auto ok = [](double v) { return std::isfinite(v) && v >= 0.0; };
        return ok(t) && ok(sup_theta) && ok(sup_grad) && ok(l2) && (!min_C || ok(*min_C));
    }
};

}  // namespace sqg
