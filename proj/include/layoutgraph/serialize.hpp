#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>

#include <json.hpp>

#include "layoutgraph/layout_graph.hpp"
#include "layoutgraph/reorder.hpp"
#include "layoutgraph/tensor.hpp"
#include "layoutgraph/token_mask.hpp"

namespace layoutgraph {

struct SerializeError : std::runtime_error {
  explicit SerializeError(const std::string& what)
      : std::runtime_error(what) {}
};

// Canonical text form: sorted object keys (nlohmann::json's default map
// ordering), UTF-8, doubles printed with 17 significant digits. Re-parsing
// and re-dumping is byte stable.
std::string canonical_json_dump(const nlohmann::json& j);

nlohmann::json graph_to_json(const LayoutGraph& graph);
LayoutGraph graph_from_json(const nlohmann::json& j);

nlohmann::json order_to_json(const ReadingOrder& order);

enum class ScalarWidth : uint8_t { Single = 4, Double = 8 };

// Binary matrix container: 8-byte magic "LGMASK01", u32 rows, u32 cols,
// u8 scalar width (4 or 8), then row-major little-endian scalars.
inline constexpr char kMaskMagic[] = "LGMASK01";

std::string encode_matrix(const Matrix& m, ScalarWidth width);
Matrix decode_matrix(const std::string& bytes);

std::string encode_mask(const GraphMask& mask, ScalarWidth width);
nlohmann::json mask_to_json(const GraphMask& mask);

// Tensor export: one binary container per tensor plus a manifest mapping
// tensor names to file names.
void write_tensors(const std::filesystem::path& dir,
                   const std::map<std::string, Matrix>& tensors,
                   ScalarWidth width);
std::map<std::string, Matrix> read_tensors(const std::filesystem::path& manifest);

// Writes via a temp file in the same directory, then renames.
void atomic_write_file(const std::filesystem::path& path,
                       const std::string& bytes);

std::string read_file(const std::filesystem::path& path);

}  // namespace layoutgraph
