#pragma once

// Batch runner over the cross product of override lists. Runs are
// independent and may execute in parallel; rows come back in a fixed order.

#include <iosfwd>
#include <string>
#include <vector>

#include "orbitgrasp/config.hpp"
#include "orbitgrasp/sim.hpp"

namespace orbitgrasp {

struct SweepAxis {
  std::string key;
  std::vector<std::string> values;  // value literals, e.g. "10" or "[1, 1, 1]"
};

// Parses "KEY=v1,v2,..." (commas inside [...] do not split).
SweepAxis parse_sweep_axis(const std::string& spec);

struct SweepRow {
  std::vector<std::string> values;  // one per axis
  int status = 1;                   // 0 captured, 2 not captured, 1 error
  std::string error;
  RunMetrics metrics;
};

// Orders value tuples lexicographically; numeric literals compare by value
// and sort before words.
bool sweep_value_less(const std::string& a, const std::string& b);

std::vector<SweepRow> run_sweep(const ConfigDocument& base, const std::vector<SweepAxis>& axes,
                                bool parallel = true);

void write_sweep_csv(std::ostream& out, const std::vector<SweepAxis>& axes,
                     const std::vector<SweepRow>& rows);

}  // namespace orbitgrasp
