#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sigmalab/pathspace.hpp"

namespace sigmalab {

// A random time on the leaves of a finite tree: a value in [0, H] per leaf,
// or never (std::nullopt). What "never" means depends on the time: +infinity
// for hitting times, -infinity for the last zero.
class RandomTime {
 public:
  using Value = std::optional<int>;

  RandomTime(SpacePtr space, std::vector<Value> per_leaf);
  static RandomTime never(SpacePtr space);
  static RandomTime constant(SpacePtr space, int value);

  const PathSpace& space() const { return *space_; }
  const SpacePtr& space_ptr() const { return space_; }
  const Value& at_leaf(std::size_t ordinal) const { return values_.at(ordinal); }
  std::span<const Value> values() const { return values_; }

  friend bool operator==(const RandomTime&, const RandomTime&) = default;

 private:
  SpacePtr space_;
  std::vector<Value> values_;
};

// Every event {tau = n} is a union of depth-n atoms.
bool is_stopping_time(const RandomTime& tau);

// d_n: least p in (n, H] with X_p = 0 on the leaf's path, else never.
RandomTime first_zero_after(const AdaptedProcess& x, int n);

// g: greatest n in [0, H] with X_n = 0 on the path; never (read as -infinity)
// on zero-free paths. Not a stopping time in general.
RandomTime last_zero(const AdaptedProcess& x);

// Indicator events over the leaves, under the conventions of last_zero.
// A never value satisfies both (g < n and g <= n hold for every n).
std::vector<bool> last_zero_before(const RandomTime& g, int n);     // {g < n}
std::vector<bool> last_zero_at_most(const RandomTime& g, int n);    // {g <= n}

// X stopped at tau. Never is +infinity, so such paths are not stopped.
// Throws std::invalid_argument unless tau is a stopping time on X's space.
AdaptedProcess stop_process(const AdaptedProcess& x, const RandomTime& tau);

std::string format_time(const RandomTime::Value& value);

}  // namespace sigmalab
