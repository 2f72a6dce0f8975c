#include "sigmalab/gallery.hpp"

#include <algorithm>
#include <array>
#include <stdexcept>
#include <string>

namespace sigmalab {

namespace {

constexpr std::array<std::pair<ProcessKind, std::string_view>, 4> kKindNames{{
    {ProcessKind::kReflectedSrw, "reflected_srw"},
    {ProcessKind::kDrawdown, "drawdown"},
    {ProcessKind::kPositivePart, "positive_part"},
    {ProcessKind::kCustom, "custom"},
}};

}  // namespace

std::string_view kind_name(ProcessKind kind) {
  for (const auto& [k, name] : kKindNames) {
    if (k == kind) return name;
  }
  return "unknown";
}

ProcessKind parse_kind(std::string_view name) {
  for (const auto& [k, n] : kKindNames) {
    if (n == name) return k;
  }
  throw std::invalid_argument("unknown process kind '" + std::string(name) +
                              "' (expected reflected_srw, drawdown, positive_part or custom)");
}

int walk_step(int child_rank) {
  if (child_rank != 0 && child_rank != 1) throw std::invalid_argument("walk paths are binary");
  return child_rank == 0 ? 1 : -1;
}

long long gallery_value(ProcessKind kind, std::span<const int> path) {
  long long s = 0;
  long long running_max = 0;
  for (int rank : path) {
    s += walk_step(rank);
    running_max = std::max(running_max, s);
  }
  switch (kind) {
    case ProcessKind::kReflectedSrw:
      return s < 0 ? -s : s;
    case ProcessKind::kDrawdown:
      return running_max - s;
    case ProcessKind::kPositivePart:
      return std::max(s, 0LL);
    case ProcessKind::kCustom:
      break;
  }
  throw std::invalid_argument("gallery_value: custom processes have no closed form");
}

std::pair<SpacePtr, AdaptedProcess> make_process(const ProcessSpec& spec) {
  SpacePtr space = build_space(spec);
  if (spec.kind != ProcessKind::kCustom) {
    const PathSpace& s = *space;
    AdaptedProcess x = AdaptedProcess::from_function(
        space, [&](NodeId v) { return Rational(static_cast<long>(gallery_value(spec.kind, s.path_of(v)))); });
    return {space, std::move(x)};
  }

  if (static_cast<int>(spec.values.size()) != spec.horizon + 1) {
    throw std::invalid_argument("custom values list " + std::to_string(spec.values.size()) +
                                " levels; expected horizon + 1 = " + std::to_string(spec.horizon + 1));
  }
  std::vector<Rational> values;
  values.reserve(space->node_count());
  for (int d = 0; d <= spec.horizon; ++d) {
    const auto& level = spec.values[static_cast<std::size_t>(d)];
    if (level.size() != space->level_size(d)) {
      throw std::invalid_argument("custom values at depth " + std::to_string(d) + " list " +
                                  std::to_string(level.size()) + " entries for " +
                                  std::to_string(space->level_size(d)) + " nodes");
    }
    values.insert(values.end(), level.begin(), level.end());
  }
  return {space, AdaptedProcess(space, std::move(values))};
}

ProcessSpec reflected_plus_time_spec(int horizon) {
  if (horizon < 1) throw std::invalid_argument("horizon must be at least 1");
  ProcessSpec spec;
  spec.kind = ProcessKind::kCustom;
  spec.horizon = horizon;
  std::vector<int> path;
  for (int d = 0; d <= horizon; ++d) {
    std::vector<Rational> level;
    const std::size_t width = std::size_t{1} << d;
    path.assign(static_cast<std::size_t>(d), 0);
    for (std::size_t k = 0; k < width; ++k) {
      for (int j = 0; j < d; ++j) path[static_cast<std::size_t>(j)] = static_cast<int>((k >> (d - 1 - j)) & 1U);
      level.emplace_back(static_cast<long>(gallery_value(ProcessKind::kReflectedSrw, path) + d));
    }
    spec.values.push_back(std::move(level));
  }
  return spec;
}

}  // namespace sigmalab
