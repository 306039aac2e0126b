#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>

#include "ellsys/grid.hpp"

namespace ellsys {

/// EFOF binary field files.
///
///   bytes  0..3   magic "EFOF"
///   u32           version (= 1)
///   u32           n
///   u32           number of components
///   u32 x n       points per axis
///   u64           payload length in bytes (= 8 * components * prod(G))
///   f64 x ...     values, component slowest, then axes row-major (axis 1 slowest)
///
/// All integers and floats are little-endian. The period L is not stored;
/// readers supply it.
inline constexpr std::uint32_t kEfofVersion = 1;

void write_efof(std::ostream& out, const GridFunction& u);
void write_efof(const std::filesystem::path& path, const GridFunction& u);

GridFunction read_efof(std::istream& in, double L = 1.0);
GridFunction read_efof(const std::filesystem::path& path, double L = 1.0);

}  // namespace ellsys
