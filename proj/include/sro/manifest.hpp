#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "sro/types.hpp"

namespace sro {

inline constexpr const char* kVersion = "0.1.0";

// Record of one CLI run: the fully resolved configuration, hashes of every
// input file, and the artifact paths written. Re-running the same command
// with the recorded configuration reproduces all outputs byte for byte.
struct RunManifest {
  std::string version = kVersion;
  std::string command;
  std::map<std::string, std::string> config;
  std::map<std::string, std::string> input_hashes;  // path -> fnv1a64 hex
  std::vector<std::string> outputs;
};

std::uint64_t fnv1a64(const void* data, std::size_t len);
std::string hash_file_hex(const std::filesystem::path& path);

void write_manifest(const RunManifest& m, const std::filesystem::path& path);
RunManifest read_manifest(const std::filesystem::path& path);

}  // namespace sro
