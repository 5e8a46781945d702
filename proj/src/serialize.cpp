#include "layoutgraph/serialize.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace layoutgraph {

using nlohmann::json;

namespace {

void dump_value(const json& j, std::string& out) {
  switch (j.type()) {
    case json::value_t::object: {
      out.push_back('{');
      bool first = true;
      for (const auto& [key, value] : j.items()) {
        if (!first) out.push_back(',');
        first = false;
        out += json(key).dump();
        out.push_back(':');
        dump_value(value, out);
      }
      out.push_back('}');
      break;
    }
    case json::value_t::array: {
      out.push_back('[');
      for (size_t i = 0; i < j.size(); ++i) {
        if (i) out.push_back(',');
        dump_value(j[i], out);
      }
      out.push_back(']');
      break;
    }
    case json::value_t::number_float: {
      char buf[64];
      std::snprintf(buf, sizeof(buf), "%.17g", j.get<double>());
      out += buf;
      break;
    }
    default:
      out += j.dump();
  }
}

void append_u32(std::string& out, uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

uint32_t read_u32(const std::string& bytes, size_t off) {
  uint32_t v = 0;
  for (int i = 0; i < 4; ++i) {
    v |= static_cast<uint32_t>(static_cast<unsigned char>(bytes[off + i])) << (8 * i);
  }
  return v;
}

void append_scalar(std::string& out, double v, ScalarWidth width) {
  if (width == ScalarWidth::Double) {
    uint64_t bits;
    std::memcpy(&bits, &v, 8);
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((bits >> (8 * i)) & 0xff));
  } else {
    float f = static_cast<float>(v);
    uint32_t bits;
    std::memcpy(&bits, &f, 4);
    append_u32(out, bits);
  }
}

}  // namespace

std::string canonical_json_dump(const json& j) {
  std::string out;
  dump_value(j, out);
  out.push_back('\n');
  return out;
}

json graph_to_json(const LayoutGraph& graph) {
  json nodes = json::array();
  for (const auto& [id, n] : graph.nodes) {
    json jn{{"id", n.id}, {"text", n.text}, {"children", n.children}};
    if (n.box) {
      jn["box"] = {n.box->x_min, n.box->y_min, n.box->x_max, n.box->y_max};
    }
    if (n.parent) jn["parent"] = *n.parent;
    nodes.push_back(std::move(jn));
  }
  json tree = json::array();
  for (const auto& [p, c] : graph.tree_edges) tree.push_back({p, c});
  json siblings = json::array();
  for (const auto& e : graph.sibling_edges) {
    siblings.push_back({e.from, e.to, relation_name(e.label)});
  }
  return json{{"nodes", nodes},
              {"root_id", graph.root_id},
              {"tree_edges", tree},
              {"sibling_edges", siblings}};
}

LayoutGraph graph_from_json(const json& j) {
  LayoutGraph g;
  if (!j.is_object() || !j.contains("nodes") || !j.contains("root_id")) {
    throw SerializeError("graph JSON needs 'nodes' and 'root_id'");
  }
  g.root_id = j["root_id"].get<int>();
  for (const json& jn : j["nodes"]) {
    LayoutNode n;
    n.id = jn.at("id").get<int>();
    n.text = jn.value("text", std::string{});
    if (jn.contains("box")) {
      const json& b = jn["box"];
      n.box = BoundingBox{b[0].get<double>(), b[1].get<double>(),
                          b[2].get<double>(), b[3].get<double>()};
    }
    if (jn.contains("parent")) n.parent = jn["parent"].get<int>();
    n.children = jn.value("children", std::vector<int>{});
    g.nodes.emplace(n.id, std::move(n));
  }
  for (const json& e : j.value("tree_edges", json::array())) {
    g.tree_edges.emplace_back(e[0].get<int>(), e[1].get<int>());
  }
  for (const json& e : j.value("sibling_edges", json::array())) {
    auto rel = relation_from_name(e[2].get<std::string>());
    if (!rel) throw SerializeError("unknown relation label " + e[2].dump());
    g.sibling_edges.push_back({e[0].get<int>(), e[1].get<int>(), *rel});
  }
  g.check_invariants();
  return g;
}

json order_to_json(const ReadingOrder& order) { return json(order.sequence); }

std::string encode_matrix(const Matrix& m, ScalarWidth width) {
  std::string out(kMaskMagic, 8);
  append_u32(out, static_cast<uint32_t>(m.rows()));
  append_u32(out, static_cast<uint32_t>(m.cols()));
  out.push_back(static_cast<char>(width));
  for (size_t i = 0; i < m.size(); ++i) append_scalar(out, m.data()[i], width);
  return out;
}

Matrix decode_matrix(const std::string& bytes) {
  if (bytes.size() < 17 || std::memcmp(bytes.data(), kMaskMagic, 8) != 0) {
    throw SerializeError("bad matrix container magic");
  }
  const uint32_t rows = read_u32(bytes, 8);
  const uint32_t cols = read_u32(bytes, 12);
  const uint8_t width = static_cast<uint8_t>(bytes[16]);
  if (width != 4 && width != 8) throw SerializeError("bad scalar width code");
  const size_t need = 17 + static_cast<size_t>(rows) * cols * width;
  if (bytes.size() != need) throw SerializeError("matrix container truncated");
  Matrix m(static_cast<int>(rows), static_cast<int>(cols));
  size_t off = 17;
  for (size_t i = 0; i < m.size(); ++i, off += width) {
    if (width == 8) {
      uint64_t bits = 0;
      for (int b = 0; b < 8; ++b) {
        bits |= static_cast<uint64_t>(static_cast<unsigned char>(bytes[off + b]))
                << (8 * b);
      }
      std::memcpy(&m.data()[i], &bits, 8);
    } else {
      uint32_t bits = read_u32(bytes, off);
      float f;
      std::memcpy(&f, &bits, 4);
      m.data()[i] = f;
    }
  }
  return m;
}

std::string encode_mask(const GraphMask& mask, ScalarWidth width) {
  Matrix m(mask.size, mask.size);
  std::copy(mask.values.begin(), mask.values.end(), m.data());
  return encode_matrix(m, width);
}

json mask_to_json(const GraphMask& mask) {
  json rows = json::array();
  for (int i = 0; i < mask.size; ++i) {
    json row = json::array();
    for (int j = 0; j < mask.size; ++j) row.push_back(mask.at(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_tensors(const std::filesystem::path& dir,
                   const std::map<std::string, Matrix>& tensors,
                   ScalarWidth width) {
  std::filesystem::create_directories(dir);
  json manifest = json::object();
  for (const auto& [name, m] : tensors) {
    const std::string file = name + ".bin";
    atomic_write_file(dir / file, encode_matrix(m, width));
    manifest[name] = file;
  }
  atomic_write_file(dir / "manifest.json", canonical_json_dump(manifest));
}

std::map<std::string, Matrix> read_tensors(
    const std::filesystem::path& manifest) {
  json j = json::parse(read_file(manifest));
  std::map<std::string, Matrix> out;
  for (const auto& [name, file] : j.items()) {
    out[name] = decode_matrix(
        read_file(manifest.parent_path() / file.get<std::string>()));
  }
  return out;
}

void atomic_write_file(const std::filesystem::path& path,
                       const std::string& bytes) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw SerializeError("cannot open " + tmp.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw SerializeError("short write to " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SerializeError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace layoutgraph
