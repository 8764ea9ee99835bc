#pragma once

// Versioned named-tensor container.
//
//   u32 format_version | u64 tensor_count
//   per tensor: u32 name_bytes | utf-8 name | u64 rows | u64 cols | rows*cols f64
//
// All integers and reals little-endian; values row-major.

#include "decgan/tensor.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace decgan {

inline constexpr std::uint32_t kTensorFormatVersion = 1;

using NamedTensors = std::vector<std::pair<std::string, Matrix>>;

void write_tensors(std::ostream& out, const NamedTensors& tensors);
NamedTensors read_tensors(std::istream& in);

void save_tensors(const std::filesystem::path& path, const NamedTensors& tensors);
NamedTensors load_tensors(const std::filesystem::path& path);

}  // namespace decgan
