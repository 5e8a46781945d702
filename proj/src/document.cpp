#include "layoutgraph/document.hpp"

#include <algorithm>
#include <cctype>
#include <iostream>
#include <set>

#include <json.hpp>

namespace layoutgraph {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
  throw ParseError(path + ": " + msg);
}

double require_number(const json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  return j.get<double>();
}

BoundingBox parse_box(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 4) {
    fail(path, "expected a box of four numbers [x1,y1,x2,y2]");
  }
  BoundingBox box{require_number(j[0], path + "[0]"),
                  require_number(j[1], path + "[1]"),
                  require_number(j[2], path + "[2]"),
                  require_number(j[3], path + "[3]")};
  if (!box.valid()) fail(path, "invalid box (needs finite, non-negative, min<=max)");
  return box;
}

// OCR boxes sometimes carry slightly negative coordinates; clamp instead of
// rejecting.
BoundingBox clamped_box(double x1, double y1, double x2, double y2,
                        const std::string& path) {
  BoundingBox box{std::max(0.0, std::min(x1, x2)), std::max(0.0, std::min(y1, y2)),
                  std::max(0.0, std::max(x1, x2)), std::max(0.0, std::max(y1, y2))};
  if (!box.valid()) fail(path, "invalid box coordinates");
  return box;
}

json parse_json(const std::string& bytes) {
  json j = json::parse(bytes, nullptr, false);
  if (j.is_discarded()) throw ParseError("malformed JSON input");
  return j;
}

struct LeafValidator {
  std::set<int> seen;
  void check(const Leaf& leaf, const GenericDocument& doc,
             const std::string& path) {
    if (!seen.insert(leaf.id).second) {
      fail(path, "duplicate leaf id " + std::to_string(leaf.id));
    }
    if (doc.page_width > 0 &&
        (leaf.box.x_max > doc.page_width || leaf.box.y_max > doc.page_height)) {
      std::cerr << "warning: " << path << ": leaf " << leaf.id
                << " extends beyond the page\n";
    }
  }
};

RegionSpec parse_region(const json& j, const std::string& path,
                        GenericDocument& doc, LeafValidator& validator) {
  if (!j.is_object()) fail(path, "expected a region object");
  RegionSpec region;
  for (const auto& [key, value] : j.items()) {
    if (key == "bounds") {
      region.bounds = parse_box(value, path + ".bounds");
    } else if (key == "leaves") {
      if (!value.is_array()) fail(path + ".leaves", "expected an array");
      for (size_t i = 0; i < value.size(); ++i) {
        const std::string lpath = path + ".leaves[" + std::to_string(i) + "]";
        const json& lj = value[i];
        if (!lj.is_object()) fail(lpath, "expected a leaf object");
        Leaf leaf;
        if (!lj.contains("id") || !lj["id"].is_number_integer()) {
          fail(lpath, "missing integer field 'id'");
        }
        leaf.id = lj["id"].get<int>();
        if (!lj.contains("text") || !lj["text"].is_string()) {
          fail(lpath, "missing string field 'text'");
        }
        leaf.text = lj["text"].get<std::string>();
        if (!lj.contains("box")) fail(lpath, "missing field 'box'");
        leaf.box = parse_box(lj["box"], lpath + ".box");
        if (lj.contains("metadata") && lj["metadata"].is_object()) {
          for (const auto& [mk, mv] : lj["metadata"].items()) {
            leaf.metadata[mk] = mv.is_string() ? mv.get<std::string>() : mv.dump();
          }
        }
        validator.check(leaf, doc, lpath);
        region.leaves.push_back(std::move(leaf));
      }
    } else if (key == "regions") {
      if (!value.is_array()) fail(path + ".regions", "expected an array");
      for (size_t i = 0; i < value.size(); ++i) {
        region.children.push_back(
            parse_region(value[i], path + ".regions[" + std::to_string(i) + "]",
                         doc, validator));
      }
    } else {
      std::cerr << "warning: ignoring unknown field " << path << "." << key
                << "\n";
    }
  }
  return region;
}

}  // namespace

GenericDocument parse_generic(const std::string& bytes) {
  json j = parse_json(bytes);
  if (!j.is_object()) throw ParseError("$: expected a top-level object");
  GenericDocument doc;
  if (j.contains("id") && j["id"].is_string()) doc.id = j["id"].get<std::string>();
  if (j.contains("page")) {
    const json& p = j["page"];
    if (!p.is_object() || !p.contains("width") || !p.contains("height")) {
      fail("$.page", "expected an object with width and height");
    }
    doc.page_width = require_number(p["width"], "$.page.width");
    doc.page_height = require_number(p["height"], "$.page.height");
  }
  if (!j.contains("regions") || !j["regions"].is_array()) {
    fail("$", "missing array field 'regions'");
  }
  LeafValidator validator;
  for (size_t i = 0; i < j["regions"].size(); ++i) {
    doc.regions.push_back(parse_region(
        j["regions"][i], "$.regions[" + std::to_string(i) + "]", doc, validator));
  }
  return doc;
}

namespace {

bool blank(const std::string& s) {
  return std::all_of(s.begin(), s.end(),
                     [](unsigned char c) { return std::isspace(c); });
}

void infer_page_size(GenericDocument& doc) {
  if (doc.page_width > 0 && doc.page_height > 0) return;
  double w = 0, h = 0;
  for (const auto& region : doc.regions) {
    for (const auto& leaf : region.leaves) {
      w = std::max(w, leaf.box.x_max);
      h = std::max(h, leaf.box.y_max);
    }
  }
  doc.page_width = w + 1;
  doc.page_height = h + 1;
}

}  // namespace

GenericDocument adapt_funsd(const std::string& bytes) {
  json j = parse_json(bytes);
  if (!j.is_object() || !j.contains("form") || !j["form"].is_array()) {
    throw ParseError("$: FUNSD input needs a top-level 'form' array");
  }
  GenericDocument doc;
  doc.id = "funsd";
  int next_id = 0;
  for (size_t e = 0; e < j["form"].size(); ++e) {
    const json& entity = j["form"][e];
    const std::string epath = "$.form[" + std::to_string(e) + "]";
    if (!entity.contains("words") || !entity["words"].is_array()) {
      fail(epath, "missing 'words' array");
    }
    RegionSpec region;
    if (entity.contains("box")) {
      region.bounds = parse_box(entity["box"], epath + ".box");
    }
    for (size_t w = 0; w < entity["words"].size(); ++w) {
      const json& word = entity["words"][w];
      const std::string wpath = epath + ".words[" + std::to_string(w) + "]";
      if (!word.contains("text") || !word["text"].is_string() ||
          !word.contains("box")) {
        fail(wpath, "word needs 'text' and 'box'");
      }
      Leaf leaf;
      leaf.text = word["text"].get<std::string>();
      if (blank(leaf.text)) continue;  // FUNSD has empty word slots
      leaf.id = next_id++;
      leaf.box = parse_box(word["box"], wpath + ".box");
      if (entity.contains("label") && entity["label"].is_string()) {
        leaf.metadata["label"] = entity["label"].get<std::string>();
      }
      region.leaves.push_back(std::move(leaf));
    }
    if (!region.leaves.empty()) doc.regions.push_back(std::move(region));
  }
  infer_page_size(doc);
  return doc;
}

GenericDocument adapt_xfund(const std::string& bytes) {
  json j = parse_json(bytes);
  if (j.is_object() && j.contains("documents") && j["documents"].is_array() &&
      !j["documents"].empty()) {
    j = j["documents"][0];
  }
  if (!j.is_object() || !j.contains("document") || !j["document"].is_array()) {
    throw ParseError("$: XFUND input needs a 'document' entity array");
  }
  GenericDocument doc;
  doc.id = j.contains("id") && j["id"].is_string() ? j["id"].get<std::string>()
                                                   : "xfund";
  if (j.contains("img") && j["img"].is_object()) {
    const json& img = j["img"];
    if (img.contains("width")) doc.page_width = require_number(img["width"], "$.img.width");
    if (img.contains("height")) doc.page_height = require_number(img["height"], "$.img.height");
  }
  int next_id = 0;
  for (size_t e = 0; e < j["document"].size(); ++e) {
    const json& entity = j["document"][e];
    const std::string epath = "$.document[" + std::to_string(e) + "]";
    if (!entity.contains("words") || !entity["words"].is_array()) {
      fail(epath, "missing 'words' array");
    }
    RegionSpec region;
    if (entity.contains("box")) {
      region.bounds = parse_box(entity["box"], epath + ".box");
    }
    for (size_t w = 0; w < entity["words"].size(); ++w) {
      const json& word = entity["words"][w];
      const std::string wpath = epath + ".words[" + std::to_string(w) + "]";
      if (!word.contains("text") || !word["text"].is_string() ||
          !word.contains("box")) {
        fail(wpath, "word needs 'text' and 'box'");
      }
      Leaf leaf;
      leaf.text = word["text"].get<std::string>();
      if (blank(leaf.text)) continue;
      leaf.id = next_id++;
      leaf.box = parse_box(word["box"], wpath + ".box");
      if (entity.contains("label") && entity["label"].is_string()) {
        leaf.metadata["label"] = entity["label"].get<std::string>();
      }
      region.leaves.push_back(std::move(leaf));
    }
    if (!region.leaves.empty()) doc.regions.push_back(std::move(region));
  }
  infer_page_size(doc);
  return doc;
}

GenericDocument adapt_cord(const std::string& bytes) {
  json j = parse_json(bytes);
  if (!j.is_object() || !j.contains("valid_line") || !j["valid_line"].is_array()) {
    throw ParseError("$: CORD input needs a top-level 'valid_line' array");
  }
  GenericDocument doc;
  doc.id = "cord";
  if (j.contains("meta") && j["meta"].is_object() &&
      j["meta"].contains("image_size") && j["meta"]["image_size"].is_object()) {
    const json& sz = j["meta"]["image_size"];
    if (sz.contains("width")) doc.page_width = require_number(sz["width"], "$.meta.image_size.width");
    if (sz.contains("height")) doc.page_height = require_number(sz["height"], "$.meta.image_size.height");
  }
  int next_id = 0;
  for (size_t l = 0; l < j["valid_line"].size(); ++l) {
    const json& line = j["valid_line"][l];
    const std::string lpath = "$.valid_line[" + std::to_string(l) + "]";
    if (!line.contains("words") || !line["words"].is_array()) {
      fail(lpath, "missing 'words' array");
    }
    RegionSpec region;
    for (size_t w = 0; w < line["words"].size(); ++w) {
      const json& word = line["words"][w];
      const std::string wpath = lpath + ".words[" + std::to_string(w) + "]";
      if (!word.contains("text") || !word["text"].is_string() ||
          !word.contains("quad") || !word["quad"].is_object()) {
        fail(wpath, "word needs 'text' and 'quad'");
      }
      Leaf leaf;
      leaf.text = word["text"].get<std::string>();
      if (blank(leaf.text)) continue;
      leaf.id = next_id++;
      const json& q = word["quad"];
      for (const char* key : {"x1", "y1", "x2", "y2", "x3", "y3", "x4", "y4"}) {
        if (!q.contains(key)) fail(wpath + ".quad", std::string("missing ") + key);
      }
      const double xs[] = {q["x1"].get<double>(), q["x2"].get<double>(),
                           q["x3"].get<double>(), q["x4"].get<double>()};
      const double ys[] = {q["y1"].get<double>(), q["y2"].get<double>(),
                           q["y3"].get<double>(), q["y4"].get<double>()};
      leaf.box = clamped_box(*std::min_element(xs, xs + 4),
                             *std::min_element(ys, ys + 4),
                             *std::max_element(xs, xs + 4),
                             *std::max_element(ys, ys + 4), wpath + ".quad");
      if (line.contains("category") && line["category"].is_string()) {
        leaf.metadata["category"] = line["category"].get<std::string>();
      }
      leaf.metadata["group_id"] =
          line.contains("group_id") ? line["group_id"].dump() : "0";
      region.leaves.push_back(std::move(leaf));
    }
    if (!region.leaves.empty()) doc.regions.push_back(std::move(region));
  }
  infer_page_size(doc);
  return doc;
}

}  // namespace layoutgraph
