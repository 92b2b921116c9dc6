#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "lognls/grid.hpp"
#include "lognls/radial.hpp"

namespace lognls {

/// NLSF snapshot: magic "NLSF", u32 version, u32 dim, u32 N per axis,
/// f64 half_width per axis, f64 λ, f64 ω (NaN if absent), f64 t, then
/// interleaved (re, im) f64 samples, row-major. Everything little-endian.
struct Snapshot {
  ComplexField field;
  double lambda = 0.0;
  double omega = 0.0;  // NaN when not applicable
  double time = 0.0;
};

inline constexpr std::uint32_t kSnapshotVersion = 1;

void write_snapshot(const std::string& path, const Snapshot& snap);
Snapshot read_snapshot(const std::string& path);

/// %.17g formatting, round-trip exact for doubles.
std::string fmt17(double v);

/// Writes '#'-prefixed header lines, a column line, and rows.
void write_csv(const std::string& path, const std::vector<std::string>& header_comments,
               const std::vector<std::string>& columns, const std::vector<std::vector<double>>& rows);

/// Radial profile CSV: r, phi, dphi with λ, ω, tail parameters in the header.
void write_profile_csv(const std::string& path, const RadialProfile& profile,
                       const std::vector<std::string>& extra_comments = {});

}  // namespace lognls
