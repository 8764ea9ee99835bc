#pragma once

// Command-line front end. Exit codes: 0 success, 2 usage or validation
// failure, 3 numeric failure during training.

#include <filesystem>
#include <string>
#include <vector>

namespace decgan {

inline constexpr const char* kArtifactVersion = "0.1.0";

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitNumeric = 3;

int run_cli(const std::vector<std::string>& args);

// Hex SHA-256 over the dataset manifest and every file it lists, in
// manifest order.
std::string dataset_hash(const std::filesystem::path& dir);

}  // namespace decgan
