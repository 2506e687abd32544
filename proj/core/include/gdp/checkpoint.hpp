#pragma once

#include <filesystem>

#include "gdp/netgdp.hpp"

namespace gdp::checkpoint {

/// Binary network snapshot:
///   bytes 0-7    magic "GDPCKPT" followed by a NUL byte
///   bytes 8-15   header length H as a little-endian uint64
///   next H bytes UTF-8 JSON header {"m", "d", "kappa", "seed", "step"}
///   payload      little-endian float64 arrays, in order:
///                W (m*d, row-major), w_aug (m), a (m), W0 (m*d, row-major)
void save(const netgdp::NetworkState& net, const std::filesystem::path& path);

/// Throws Errc::Io for unreadable or malformed files.
netgdp::NetworkState load(const std::filesystem::path& path);

}  // namespace gdp::checkpoint
