#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "semflow/mesh.hpp"

namespace semflow {

inline constexpr std::uint32_t kMeshFormatVersion = 1;

/// Serializes to the versioned little-endian mesh format (see
/// docs/mesh_format.md).
std::vector<std::uint8_t> encode_mesh(const Mesh& mesh);
Mesh decode_mesh(const std::vector<std::uint8_t>& bytes);

void write_mesh(const Mesh& mesh, const std::filesystem::path& path);
Mesh read_mesh(const std::filesystem::path& path);

}  // namespace semflow
