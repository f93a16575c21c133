// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>

#include "csivid/tensor.hpp"

namespace csivid {

// Checkpoint container: trainable parameters, optional optimizer moments,
// named auxiliary tensors (e.g. input normalization statistics), and string
// metadata. On disk (little-endian):
//   magic "CVCK", version u16 = 1
//   param count u32, then per parameter in sorted name order:
//     name (u16 length + bytes), ndim u8, dims u32 each, data f64 raw
//   adam flag u8; when 1: step counter u64, then m and v arrays (f64) per
//     parameter in the same order
//   extra tensor count u32 (same encoding as parameters)
//   metadata count u32, then key/value string pairs (u16 length + bytes)
// All floats are stored as raw f64 bits, so save/load round-trips bit-exactly.
struct Checkpoint {
    ParamSet params;
    std::optional<AdamState> adam;
    std::map<std::string, Tensor> extra;
    std::map<std::string, std::string> meta;
};

constexpr char kCheckpointMagic[4] = {'C', 'V', 'C', 'K'};
constexpr std::uint16_t kCheckpointVersion = 1;

std::vector<std::uint8_t> serialize_checkpoint(const Checkpoint& ckpt);
Checkpoint parse_checkpoint(std::span<const std::uint8_t> bytes);

void write_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint read_checkpoint(const std::filesystem::path& path);

// Width conversions for the f32 fast path. f32 -> f64 is exact, so training
// in float and saving still round-trips bit-exactly.
ParamSetF to_float(const ParamSet& params);
ParamSet to_double(const ParamSetF& params);
AdamStateF to_float(const AdamState& state);
AdamState to_double(const AdamStateF& state);

}  // namespace csivid
