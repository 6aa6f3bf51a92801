#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>

#include "dtil/energy.hpp"

namespace dtil {

/// Binary layout, all little-endian:
///   "DTIL" | u32 version | u32 n | f64 spacing | u32 flags | payload
/// payload: A (site-major, 6 matrices x 8 reals, row-major, re/im
/// interleaved) if flags & 1, then phi (8 reals per site) if flags & 2,
/// then one f64 per site if flags & 4 (density-only snapshots).
inline constexpr std::uint32_t kSnapshotVersion = 1;

enum SnapshotFlags : std::uint32_t {
  kHasConnection = 1,
  kHasHiggs = 2,
  kDensityOnly = 4,
};

class SnapshotError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Snapshot {
  LatticeSpec spec;
  std::uint32_t flags = 0;
  std::optional<FieldState> state;     // when flags has field bits; a missing field reads as zero
  std::optional<DensityField> density;  // when kDensityOnly

  /// The energy density, computed from the fields when needed.
  DensityField energy_density() const;
};

void write_snapshot(std::ostream& os, const FieldState& state);
void write_snapshot(std::ostream& os, const DensityField& density);
void write_snapshot(const std::string& path, const FieldState& state);
void write_snapshot(const std::string& path, const DensityField& density);

/// Throws SnapshotError on bad magic, unsupported version, unknown flags,
/// truncated or oversized payload.
Snapshot read_snapshot(std::istream& is);
Snapshot read_snapshot(const std::string& path);

/// Reads a snapshot that must contain fields.
FieldState read_state(const std::string& path);

}  // namespace dtil
