#pragma once

// Snapshot and CSV persistence.
//
// Snapshot layout (all little-endian):
//   bytes 0..3   magic "SQG1"
//   u32          n
//   f64          t
//   f64          alpha
//   n*n f64      values, row-major, values[i1 * n + i2] = theta(i1 h, i2 h)

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "sqg/diagnostics.hpp"
#include "sqg/error.hpp"
#include "sqg/field.hpp"
#include "sqg/record.hpp"
#include "sqg/verification.hpp"

namespace sqg::io {

inline constexpr std::array<char, 4> snapshot_magic = {'S', 'Q', 'G', '1'};

struct Snapshot {
    double t = 0.0;
    double alpha = 0.0;
    ScalarField theta;
};

namespace detail {

template <class T>
void put_le(std::string& out, T value) {
    using U = std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>;
    U bits = std::bit_cast<U>(value);
    for (std::size_t i = 0; i < sizeof(U); ++i) {
        out.push_back(static_cast<char>(bits & 0xffu));
        bits >>= 8;
    }
}

template <class T>
T get_le(const std::string& in, std::size_t& pos) {
    using U = std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>;
    if (pos + sizeof(U) > in.size()) throw Error("snapshot: truncated file");
    U bits = 0;
    for (std::size_t i = 0; i < sizeof(U); ++i)
        bits |= static_cast<U>(static_cast<unsigned char>(in[pos + i])) << (8 * i);
    pos += sizeof(U);
    return std::bit_cast<T>(bits);
}

}  // namespace detail

inline std::string encode_snapshot(const Snapshot& s) {
    std::string out(snapshot_magic.begin(), snapshot_magic.end());
    detail::put_le(out, static_cast<std::uint32_t>(s.theta.n()));
    detail::put_le(out, s.t);
    detail::put_le(out, s.alpha);
    for (double v : s.theta.values()) detail::put_le(out, v);
    return out;
}

inline Snapshot decode_snapshot(const std::string& bytes) {
    if (bytes.size() < 4 || !std::equal(snapshot_magic.begin(), snapshot_magic.end(), bytes.begin()))
        throw Error("snapshot: bad magic (expected SQG1)");
    std::size_t pos = 4;
    const auto n = detail::get_le<std::uint32_t>(bytes, pos);
    const double t = detail::get_le<double>(bytes, pos);
    const double alpha = detail::get_le<double>(bytes, pos);
    const TorusGrid grid(static_cast<int>(n));
    const std::size_t expected = pos + grid.size() * 8;
    if (bytes.size() != expected)
        throw Error("snapshot: expected " + std::to_string(expected) + " bytes, found " + std::to_string(bytes.size()));
    std::vector<double> values(grid.size());
    for (double& v : values) v = detail::get_le<double>(bytes, pos);
    return {t, alpha, ScalarField(grid, std::move(values))};
}

inline void write_snapshot(const std::filesystem::path& path, const Snapshot& s) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("cannot open " + path.string() + " for writing");
    const std::string bytes = encode_snapshot(s);
    f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!f) throw Error("write failed: " + path.string());
}

inline Snapshot read_snapshot(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw Error("cannot open " + path.string());
    std::ostringstream ss;
    ss << f.rdbuf();
    return decode_snapshot(ss.str());
}

// CSV output uses 17 significant digits so values round-trip exactly.

inline std::ostream& full_precision(std::ostream& os) {
    return os << std::setprecision(std::numeric_limits<double>::max_digits10);
}

inline void write_diagnostics_csv(std::ostream& os, const std::vector<DiagnosticsRecord>& rows) {
    full_precision(os) << "t,sup_theta,sup_grad,l2,min_C\n";
    for (const auto& r : rows) {
        os << r.t << ',' << r.sup_theta << ',' << r.sup_grad << ',' << r.l2 << ',';
        if (r.min_C) os << *r.min_C;
        os << '\n';
    }
}

inline void write_margins_csv(std::ostream& os, const std::vector<MarginReport>& rows) {
    full_precision(os) << "xi,flow,dissipation,margin,quad_error\n";
    for (const auto& r : rows)
        os << r.xi << ',' << r.flow << ',' << r.dissipation << ',' << r.margin << ',' << r.quad_error << '\n';
}

inline void write_empirical_modulus_csv(std::ostream& os, const EmpiricalModulus& em) {
    full_precision(os) << "xi,max_diff\n";
    for (std::size_t i = 0; i < em.distances.size(); ++i) os << em.distances[i] << ',' << em.max_diff[i] << '\n';
}

}  // namespace sqg::io
