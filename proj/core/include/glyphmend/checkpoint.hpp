// Model checkpoint container: a small binary format with a JSON header
// describing named tensors followed by a raw little-endian float64 payload.
//
// Layout: magic "GMND" | u32 format version | u64 header length |
//         header JSON | payload of doubles.
// Header JSON: {"meta": {...}, "tensors": [{name, rows, cols, offset, count}]}
// with offsets counted in elements from the start of the payload.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace glyphmend {

struct TensorEntry {
  std::string name;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;  // rows * cols values, row-major
};

struct Checkpoint {
  nlohmann::json meta;  // architecture, config, training step, val loss, ...
  std::vector<TensorEntry> tensors;
};

inline constexpr std::uint32_t kCheckpointVersion = 1;

void save_checkpoint(const Checkpoint& ckpt, const std::string& path);

// Throws std::runtime_error on missing files, bad magic, version mismatch,
// or truncated payloads.
Checkpoint load_checkpoint(const std::string& path);

}  // namespace glyphmend
