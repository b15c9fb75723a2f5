#pragma once

// Experiment configuration: a sectioned key-value text format.
//
//   # comment            (also ';'; inline after a value too)
//   [section]
//   key = value
//
// Sections and keys:
//   [grid]        n
//   [solver]      alpha, t_end, cfl, dt_max, dealias (true|false),
//                 advection_sign (paper|standard), snapshot_every
//   [initial]     preset (benchmark|zero|modes|random), seed, random_kmax,
//                 mode = k1 k2 amplitude phase      (repeatable; adds a cos(k.x + phase))
//   [modulus]     delta, gamma, A
//   [diagnostics] min_C (true|false), probe_scale (number or "auto")
//   [calibration] corpus (single_modes)
//   [output]      dir
//
// Every parse or validation error names the offending line.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "sqg/error.hpp"
#include "sqg/field.hpp"
#include "sqg/modulus.hpp"
#include "sqg/solver.hpp"

namespace sqg::config {

class ConfigError : public Error {
public:
    ConfigError(const std::string& source, int line, const std::string& what)
        : Error(source + ":" + std::to_string(line) + ": " + what), line_(line) {}
    int line() const { return line_; }

private:
    int line_;
};

struct Mode {
    int k1 = 0;
    int k2 = 0;
    double amplitude = 0.0;
    double phase = 0.0;
};

enum class Preset { benchmark, zero, modes, random };

struct InitialCondition {
    Preset preset = Preset::benchmark;
    std::vector<Mode> modes;
    std::uint64_t seed = 12345;
    int random_kmax = 4;
};

struct ExperimentConfig {
    int n = 128;
    SolverConfig solver;
    InitialCondition initial;
    KnvModulusParams modulus;
    double A = 1.0;
    bool min_C = false;
    std::optional<double> probe_scale;  // empty: scale the initial field to amplitude w(delta)/2
    std::string corpus = "single_modes";
    std::filesystem::path output_dir = "out";
};

namespace detail {

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

inline std::string strip_comment(const std::string& s) {
    const auto pos = s.find_first_of("#;");
    return pos == std::string::npos ? s : s.substr(0, pos);
}

struct Cursor {
    const std::string& source;
    int line;

    [[noreturn]] void fail(const std::string& what) const { throw ConfigError(source, line, what); }

    double number(const std::string& v) const {
        try {
            std::size_t used = 0;
            const double x = std::stod(v, &used);
            if (used != v.size() || !std::isfinite(x)) fail("expected a finite number, got '" + v + "'");
            return x;
        } catch (const std::logic_error&) {
            fail("expected a number, got '" + v + "'");
        }
    }
    long integer(const std::string& v) const {
        try {
            std::size_t used = 0;
            const long x = std::stol(v, &used);
            if (used != v.size()) fail("expected an integer, got '" + v + "'");
            return x;
        } catch (const std::logic_error&) {
            fail("expected an integer, got '" + v + "'");
        }
    }
    bool boolean(const std::string& v) const {
        if (v == "true" || v == "yes" || v == "1") return true;
        if (v == "false" || v == "no" || v == "0") return false;
        fail("expected true or false, got '" + v + "'");
    }
};

}  // namespace detail

/// Parses and validates; `source` names the input in error messages.
inline ExperimentConfig parse(std::istream& in, const std::string& source = "<config>") {
    ExperimentConfig cfg;
    std::map<std::string, int> key_line;  // "section.key" -> line, for validation messages
    std::string section;
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const detail::Cursor at{source, line_no};
        const std::string line = detail::trim(detail::strip_comment(raw));
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') at.fail("unterminated section header");
            section = detail::trim(line.substr(1, line.size() - 2));
            static const char* known[] = {"grid", "solver", "initial", "modulus", "diagnostics", "calibration", "output"};
            if (std::find(std::begin(known), std::end(known), section) == std::end(known))
                at.fail("unknown section [" + section + "]");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) at.fail("expected 'key = value'");
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string value = detail::trim(line.substr(eq + 1));
        if (section.empty()) at.fail("key '" + key + "' outside of any section");
        if (value.empty()) at.fail("empty value for '" + key + "'");
        const std::string full = section + "." + key;
        if (key != "mode" && key_line.count(full)) at.fail("duplicate key '" + key + "' in [" + section + "]");
        key_line[full] = line_no;

        if (full == "grid.n") {
            cfg.n = static_cast<int>(at.integer(value));
        } else if (full == "solver.alpha") {
            cfg.solver.alpha = at.number(value);
        } else if (full == "solver.t_end") {
            cfg.solver.t_end = at.number(value);
        } else if (full == "solver.cfl") {
            cfg.solver.cfl = at.number(value);
        } else if (full == "solver.dt_max") {
            cfg.solver.dt_max = at.number(value);
        } else if (full == "solver.dealias") {
            cfg.solver.dealias_enabled = at.boolean(value);
        } else if (full == "solver.advection_sign") {
            if (value == "paper")
                cfg.solver.advection_sign = AdvectionSign::paper;
            else if (value == "standard")
                cfg.solver.advection_sign = AdvectionSign::standard;
            else
                at.fail("advection_sign must be 'paper' or 'standard'");
        } else if (full == "solver.snapshot_every") {
            cfg.solver.snapshot_every = static_cast<int>(at.integer(value));
        } else if (full == "initial.preset") {
            if (value == "benchmark")
                cfg.initial.preset = Preset::benchmark;
            else if (value == "zero")
                cfg.initial.preset = Preset::zero;
            else if (value == "modes")
                cfg.initial.preset = Preset::modes;
            else if (value == "random")
                cfg.initial.preset = Preset::random;
            else
                at.fail("unknown preset '" + value + "' (benchmark, zero, modes, random)");
        } else if (full == "initial.seed") {
            cfg.initial.seed = static_cast<std::uint64_t>(at.integer(value));
        } else if (full == "initial.random_kmax") {
            cfg.initial.random_kmax = static_cast<int>(at.integer(value));
            if (cfg.initial.random_kmax < 1) at.fail("random_kmax must be >= 1");
        } else if (full == "initial.mode") {
            std::istringstream fields(value);
            std::string a, b, c, d, extra;
            if (!(fields >> a >> b >> c >> d) || (fields >> extra)) at.fail("mode needs exactly: k1 k2 amplitude phase");
            cfg.initial.modes.push_back({static_cast<int>(at.integer(a)), static_cast<int>(at.integer(b)),
                                         at.number(c), at.number(d)});
        } else if (full == "modulus.delta") {
            cfg.modulus.delta = at.number(value);
        } else if (full == "modulus.gamma") {
            cfg.modulus.gamma = at.number(value);
        } else if (full == "modulus.A") {
            cfg.A = at.number(value);
        } else if (full == "diagnostics.min_C") {
            cfg.min_C = at.boolean(value);
        } else if (full == "diagnostics.probe_scale") {
            if (value != "auto") {
                cfg.probe_scale = at.number(value);
                if (*cfg.probe_scale <= 0.0) at.fail("probe_scale must be positive or 'auto'");
            }
        } else if (full == "calibration.corpus") {
            if (value != "single_modes") at.fail("unknown corpus '" + value + "' (single_modes)");
            cfg.corpus = value;
        } else if (full == "output.dir") {
            cfg.output_dir = value;
        } else {
            at.fail("unknown key '" + key + "' in [" + section + "]");
        }
    }

    auto line_of = [&](const std::string& key) {
        const auto it = key_line.find(key);
        return it == key_line.end() ? 0 : it->second;
    };
    auto check = [&](bool ok, const std::string& key, const std::string& what) {
        if (!ok) throw ConfigError(source, line_of(key), what);
    };
    check(cfg.n >= 8 && cfg.n % 2 == 0, "grid.n", "invariant violated: n must be even and >= 8");
    check(cfg.solver.alpha >= 0.0, "solver.alpha", "invariant violated: alpha >= 0");
    check(cfg.solver.t_end > 0.0, "solver.t_end", "invariant violated: t_end > 0");
    check(cfg.solver.cfl > 0.0 && cfg.solver.cfl <= 1.0, "solver.cfl", "invariant violated: 0 < cfl <= 1");
    check(cfg.solver.dt_max > 0.0, "solver.dt_max", "invariant violated: dt_max > 0");
    check(cfg.solver.snapshot_every >= 1, "solver.snapshot_every", "invariant violated: snapshot_every >= 1");
    check(cfg.modulus.delta > 0.0, "modulus.delta", "invariant violated: delta > 0");
    check(cfg.modulus.gamma > 0.0, "modulus.gamma", "invariant violated: gamma > 0");
    check(cfg.modulus.gamma < cfg.modulus.delta / 2.0, line_of("modulus.gamma") ? "modulus.gamma" : "modulus.delta",
          "invariant violated: gamma < delta/2");
    check(cfg.modulus.delta <= knv_delta_max, "modulus.delta", "invariant violated: delta <= 0.01");
    check(cfg.A > 0.0, "modulus.A", "invariant violated: A > 0");
    check(cfg.initial.preset != Preset::modes || !cfg.initial.modes.empty(), "initial.preset",
          "preset 'modes' needs at least one 'mode' line");
    for (const auto& m : cfg.initial.modes)
        check(std::abs(m.k1) <= cfg.n / 2 && std::abs(m.k2) <= cfg.n / 2, "initial.mode",
              "mode wavenumber exceeds n/2");
    const auto parent = std::filesystem::absolute(cfg.output_dir).parent_path();
    check(std::filesystem::is_directory(parent), "output.dir",
          "output directory parent does not exist: " + parent.string());
    return cfg;
}

inline ExperimentConfig parse_file(const std::filesystem::path& path) {
    std::ifstream f(path);
    if (!f) throw Error("cannot open config " + path.string());
    return parse(f, path.string());
}

inline ExperimentConfig parse_string(const std::string& text, const std::string& source = "<config>") {
    std::istringstream in(text);
    return parse(in, source);
}

/// sin x1 sin x2 + cos x2
inline ScalarField benchmark_field(const TorusGrid& grid) {
    return ScalarField::sample(grid, [](double x1, double x2) { return std::sin(x1) * std::sin(x2) + std::cos(x2); });
}

inline ScalarField modes_field(const TorusGrid& grid, const std::vector<Mode>& modes) {
    return ScalarField::sample(grid, [&](double x1, double x2) {
        double v = 0.0;
        for (const auto& m : modes) v += m.amplitude * std::cos(m.k1 * x1 + m.k2 * x2 + m.phase);
        return v;
    });
}

/// Random modes with |k|_inf <= kmax, Gaussian amplitudes decaying like |k|^-2 and uniform phases.
inline std::vector<Mode> random_modes(std::uint64_t seed, int kmax) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> amp(0.0, 1.0);
    std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
    std::vector<Mode> modes;
    for (int k1 = 0; k1 <= kmax; ++k1)
        for (int k2 = -kmax; k2 <= kmax; ++k2) {
            if (k1 == 0 && k2 <= 0) continue;
            const double k_sq = double(k1) * k1 + double(k2) * k2;
            modes.push_back({k1, k2, amp(rng) / k_sq, phase(rng)});
        }
    return modes;
}

inline ScalarField initial_field(const ExperimentConfig& cfg) {
    const TorusGrid grid(cfg.n);
    switch (cfg.initial.preset) {
        case Preset::benchmark: return benchmark_field(grid);
        case Preset::zero: return ScalarField(grid);
        case Preset::modes: return modes_field(grid, cfg.initial.modes);
        case Preset::random: return modes_field(grid, random_modes(cfg.initial.seed, cfg.initial.random_kmax));
    }
    return ScalarField(grid);
}

}  // namespace sqg::config
