#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fsns/dynamics.hpp"

namespace fsns {

/// Binary snapshot of a flow state. The byte layout is documented in
/// docs/checkpoint.md; all values are little-endian.
struct Checkpoint {
  GridSpec spec;
  double eps = 0.0;
  double t = 0.0;
  double A = 1.0;
  std::vector<Field> v;  // d + 1 components, level-major
  Field h;
};

inline constexpr char kCheckpointMagic[8] = {'F', 'S', 'N', 'S', 'C', 'K', 'P', 'T'};
inline constexpr std::uint32_t kCheckpointVersion = 1;

Checkpoint capture(const FlowState& s, const Grid& grid, double A);

std::vector<std::uint8_t> encode_checkpoint(const Checkpoint& c);
/// Throws FormatError on a bad magic, version, size or checksum.
Checkpoint decode_checkpoint(const std::vector<std::uint8_t>& bytes);

void write_checkpoint(const std::string& path, const Checkpoint& c);
Checkpoint read_checkpoint(const std::string& path);

/// Rebuilds the state (and its frame) on the stepper's grid.
FlowState restore(const Checkpoint& c, const Stepper& stepper);

}  // namespace fsns
