// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "csivid/csi.hpp"

namespace csivid {

// CSIL is the bit-exact binary container for timestamped CSI records.
// Layout (little-endian throughout):
//   header: magic "CSIL" (4 bytes), version u16 = 1, n_tx u8, n_rx u8,
//           n_c u16, nominal_rate_hz f64                        -> 18 bytes
//   records, zero or more, each:
//           timestamp_us u64, then n_tx*n_rx*n_c complex samples as
//           (re f32, im f32) pairs in tx-major, rx, subcarrier order
constexpr char kCsilMagic[4] = {'C', 'S', 'I', 'L'};
constexpr std::uint16_t kCsilVersion = 1;
constexpr std::size_t kCsilHeaderSize = 18;

/// Bytes per record for the given header dimensions.
std::size_t csil_record_size(const CsiHeader& header);

/// Parses a CSIL byte stream.
/// Throws BadMagic, TruncatedRecord, NonMonotonicTimestamps, DimensionMismatch.
CsiSequence parse_csil(std::span<const std::uint8_t> bytes);

/// Serializes a sequence. Byte-for-byte deterministic; the output parses back
/// to an identical sequence provided all components are f32-representable.
/// Throws DimensionMismatch if a record disagrees with the header and
/// NonMonotonicTimestamps if record order is broken.
std::vector<std::uint8_t> write_csil(const CsiSequence& seq);

CsiSequence read_csil_file(const std::filesystem::path& path);
void write_csil_file(const std::filesystem::path& path, const CsiSequence& seq);

}  // namespace csivid
