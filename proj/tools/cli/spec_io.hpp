#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

#include <json.hpp>

#include "sigmalab/process_spec.hpp"

namespace sigmalab::cli {

// Spec file problem. `where` is "line L, column C" for syntax errors and a
// JSON pointer (e.g. "/values/2/1") for schema errors.
class SpecError : public std::runtime_error {
 public:
  SpecError(std::string where, const std::string& message)
      : std::runtime_error(where + ": " + message), where_(std::move(where)) {}
  const std::string& where() const { return where_; }

 private:
  std::string where_;
};

// Spec file format:
//   {"kind": "reflected_srw" | "drawdown" | "positive_part" | "custom",
//    "horizon": H,
//    "values": [[x_root], [x_0, x_1], ...],            custom only, by depth
//    "edge_probs": [[["1/3", "2/3"]], [[...], [...]], ...]}  custom only, optional
// Rationals are integers or strings "p/q"; floating-point numbers are rejected.
ProcessSpec parse_spec(std::string_view text);
ProcessSpec load_spec(const std::string& path);

nlohmann::json spec_to_json(const ProcessSpec& spec);

// FNV-1a 64 of the canonical JSON dump, as "fnv1a64:<16 hex digits>".
std::string spec_digest(const ProcessSpec& spec);

}  // namespace sigmalab::cli
