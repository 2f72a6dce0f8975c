#include "cli/spec_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "sigmalab/rational.hpp"

namespace sigmalab::cli {

using nlohmann::json;

namespace {

std::string line_column(std::string_view text, std::size_t byte) {
  std::size_t line = 1;
  std::size_t column = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(column);
}

Rational rational_from(const json& node, const std::string& where) {
  if (node.is_number_integer()) {
    return node.is_number_unsigned() ? Rational(std::to_string(node.get<std::uint64_t>()))
                                     : Rational(std::to_string(node.get<std::int64_t>()));
  }
  if (node.is_string()) {
    try {
      return parse_rational(node.get<std::string>());
    } catch (const std::invalid_argument& e) {
      throw SpecError(where, e.what());
    }
  }
  if (node.is_number_float()) {
    throw SpecError(where, "floating-point value; write rationals as strings \"p/q\"");
  }
  throw SpecError(where, "expected an integer or a rational string");
}

const json& array_at(const json& node, const std::string& where) {
  if (!node.is_array()) throw SpecError(where, "expected an array");
  return node;
}

}  // namespace

ProcessSpec parse_spec(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw SpecError(line_column(text, e.byte == 0 ? 0 : e.byte - 1), "invalid JSON");
  }
  if (!doc.is_object()) throw SpecError("/", "spec must be a JSON object");
  for (const auto& [key, value] : doc.items()) {
    if (key != "kind" && key != "horizon" && key != "values" && key != "edge_probs") {
      throw SpecError("/" + key, "unknown field");
    }
  }

  ProcessSpec spec;
  if (!doc.contains("kind") || !doc["kind"].is_string()) throw SpecError("/kind", "missing or not a string");
  try {
    spec.kind = parse_kind(doc["kind"].get<std::string>());
  } catch (const std::invalid_argument& e) {
    throw SpecError("/kind", e.what());
  }
  if (!doc.contains("horizon") || !doc["horizon"].is_number_integer()) {
    throw SpecError("/horizon", "missing or not an integer");
  }
  const auto horizon = doc["horizon"].get<std::int64_t>();
  if (horizon < 1) throw SpecError("/horizon", "horizon must be at least 1");
  if (horizon > 64) throw SpecError("/horizon", "horizon too large");
  spec.horizon = static_cast<int>(horizon);

  const bool custom = spec.kind == ProcessKind::kCustom;
  if (!custom && (doc.contains("values") || doc.contains("edge_probs"))) {
    throw SpecError(doc.contains("values") ? "/values" : "/edge_probs", "only custom specs carry values or edge_probs");
  }
  if (custom) {
    if (!doc.contains("values")) throw SpecError("/values", "custom spec needs values");
    const json& levels = array_at(doc["values"], "/values");
    for (std::size_t d = 0; d < levels.size(); ++d) {
      const std::string where = "/values/" + std::to_string(d);
      std::vector<Rational> level;
      for (std::size_t k = 0; k < array_at(levels[d], where).size(); ++k) {
        level.push_back(rational_from(levels[d][k], where + "/" + std::to_string(k)));
      }
      spec.values.push_back(std::move(level));
    }
    if (doc.contains("edge_probs")) {
      const json& by_depth = array_at(doc["edge_probs"], "/edge_probs");
      std::vector<std::vector<std::vector<Rational>>> branching;
      for (std::size_t d = 0; d < by_depth.size(); ++d) {
        const std::string where_d = "/edge_probs/" + std::to_string(d);
        std::vector<std::vector<Rational>> level;
        for (std::size_t k = 0; k < array_at(by_depth[d], where_d).size(); ++k) {
          const std::string where_k = where_d + "/" + std::to_string(k);
          std::vector<Rational> probs;
          for (std::size_t c = 0; c < array_at(by_depth[d][k], where_k).size(); ++c) {
            probs.push_back(rational_from(by_depth[d][k][c], where_k + "/" + std::to_string(c)));
          }
          level.push_back(std::move(probs));
        }
        branching.push_back(std::move(level));
      }
      spec.edge_probs = std::move(branching);
    }
  }
  return spec;
}

ProcessSpec load_spec(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SpecError(path, "cannot open spec file");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_spec(buffer.str());
}

json spec_to_json(const ProcessSpec& spec) {
  json out;
  out["kind"] = std::string(kind_name(spec.kind));
  out["horizon"] = spec.horizon;
  if (spec.kind == ProcessKind::kCustom) {
    json values = json::array();
    for (const auto& level : spec.values) {
      json row = json::array();
      for (const auto& v : level) row.push_back(to_string(v));
      values.push_back(std::move(row));
    }
    out["values"] = std::move(values);
    if (spec.edge_probs) {
      json by_depth = json::array();
      for (const auto& level : *spec.edge_probs) {
        json row = json::array();
        for (const auto& probs : level) {
          json children = json::array();
          for (const auto& p : probs) children.push_back(to_string(p));
          row.push_back(std::move(children));
        }
        by_depth.push_back(std::move(row));
      }
      out["edge_probs"] = std::move(by_depth);
    }
  }
  return out;
}

std::string spec_digest(const ProcessSpec& spec) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char c : spec_to_json(spec).dump()) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
  return std::string("fnv1a64:") + buf;
}

}  // namespace sigmalab::cli
