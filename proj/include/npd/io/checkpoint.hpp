#pragma once

#include "npd/model.hpp"

#include <cstdint>
#include <filesystem>
#include <stdexcept>

namespace npd::io {

class CheckpointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr char kCheckpointMagic[8] = {'N', 'P', 'D', 'C', 'K', 'P', 'T', '\0'};
inline constexpr std::uint32_t kCheckpointVersion = 1;

/// Binary layout, all little-endian:
///   char[8]  magic "NPDCKPT\0"
///   u32      version
///   u32      nx, ny, nz (equal)
///   u32      species count S
///   u32      flags (bit 0: allow_unequal_valence)
///   f64      time, box_length, dealias_fraction, diffusivity
///   f64[S]   valences
///   then S blocks of nx * ny * (nz/2 + 1) complex values (re, im as f64),
///   in the half-spectrum order of Grid: index (ix * ny + iy) * (nz/2 + 1) + iz.
void write_checkpoint(const std::filesystem::path& path, const NpdState& state);

/// Rebuilds the grid from the header. Throws CheckpointError on a bad magic,
/// unknown version, truncated payload or trailing bytes.
NpdState read_checkpoint(const std::filesystem::path& path);

/// As above, but reuses `grid` (which must match the header).
NpdState read_checkpoint(const std::filesystem::path& path, const GridPtr& grid);

}  // namespace npd::io
