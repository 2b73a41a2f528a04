#include "orbitgrasp/sweep.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <ostream>

#include "orbitgrasp/error.hpp"

namespace orbitgrasp {

namespace {

std::string trim(const std::string& s) {
  const size_t a = s.find_first_not_of(" \t");
  if (a == std::string::npos) return "";
  return s.substr(a, s.find_last_not_of(" \t") - a + 1);
}

bool as_number(const std::string& s, double& x) {
  const char* first = s.data() + (!s.empty() && s[0] == '+');
  const auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), x);
  return !s.empty() && ec == std::errc() && ptr == s.data() + s.size();
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.10g", x);
  return buf;
}

}  // namespace

SweepAxis parse_sweep_axis(const std::string& spec) {
  const size_t eq = spec.find('=');
  if (eq == std::string::npos) throw Error("sweep axis must look like KEY=v1,v2,...");
  SweepAxis axis;
  axis.key = trim(spec.substr(0, eq));
  if (axis.key.empty()) throw Error("sweep axis has an empty key");
  std::string item;
  int depth = 0;
  const std::string rest = spec.substr(eq + 1);
  for (size_t i = 0; i <= rest.size(); ++i) {
    const char c = i < rest.size() ? rest[i] : ',';
    if (c == '[') ++depth;
    if (c == ']') --depth;
    if (c == ',' && depth == 0) {
      const std::string v = trim(item);
      if (!v.empty()) axis.values.push_back(v);
      item.clear();
    } else {
      item += c;
    }
  }
  if (axis.values.empty()) throw Error("sweep axis '" + axis.key + "' has no values");
  return axis;
}

bool sweep_value_less(const std::string& a, const std::string& b) {
  double x = 0.0, y = 0.0;
  const bool na = as_number(a, x), nb = as_number(b, y);
  if (na && nb) return x < y || (x == y && a < b);
  if (na != nb) return na;
  return a < b;
}

std::vector<SweepRow> run_sweep(const ConfigDocument& base, const std::vector<SweepAxis>& axes,
                                bool parallel) {
  if (axes.empty()) throw Error("sweep needs at least one axis");
  std::vector<std::vector<std::string>> sorted;
  for (const SweepAxis& a : axes) {
    if (a.values.empty()) throw Error("sweep axis '" + a.key + "' has no values");
    std::vector<std::string> v = a.values;
    std::stable_sort(v.begin(), v.end(), sweep_value_less);
    sorted.push_back(v);
  }
  // Odometer enumeration with the last axis fastest gives lexicographic order.
  std::vector<SweepRow> rows;
  std::vector<size_t> idx(axes.size(), 0);
  while (true) {
    SweepRow r;
    for (size_t i = 0; i < axes.size(); ++i) r.values.push_back(sorted[i][idx[i]]);
    rows.push_back(r);
    int i = static_cast<int>(axes.size()) - 1;
    while (i >= 0 && ++idx[i] == sorted[i].size()) idx[i--] = 0;
    if (i < 0) break;
  }

  const long n = static_cast<long>(rows.size());
#pragma omp parallel for schedule(dynamic) if (parallel)
  for (long r = 0; r < n; ++r) {
    SweepRow& row = rows[r];
    try {
      ConfigDocument doc = base;
      std::vector<std::string> overrides;
      for (size_t i = 0; i < axes.size(); ++i) overrides.push_back(axes[i].key + "=" + row.values[i]);
      apply_overrides(doc, overrides);
      const ScenarioConfig cfg = scenario_from_config(doc);
      row.metrics = run_scenario(cfg);
      row.status = exit_code(row.metrics);
    } catch (const std::exception& e) {
      row.status = 1;
      row.error = e.what();
    }
  }
  return rows;
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepAxis>& axes,
                     const std::vector<SweepRow>& rows) {
  for (const SweepAxis& a : axes) out << csv_field(a.key) << ',';
  out << "status,captured,aborted,capture_position_error,capture_attitude_error,"
         "max_tracking_position_error,max_tracking_attitude_error,saturated_samples_total,"
         "h_flips,pendulum_max_excursion,error\n";
  for (const SweepRow& r : rows) {
    for (const std::string& v : r.values) out << csv_field(v) << ',';
    const RunMetrics& m = r.metrics;
    out << r.status << ',';
    if (r.status == 1) {
      out << ",,,,,,,,," << csv_field(r.error) << '\n';
      continue;
    }
    out << (m.captured ? "true" : "false") << ',' << (m.aborted ? "true" : "false") << ','
        << fmt(m.capture_position_error) << ',' << fmt(m.capture_attitude_error) << ','
        << fmt(m.max_tracking_position_error) << ',' << fmt(m.max_tracking_attitude_error) << ','
        << m.saturated_total() << ',' << m.h_flips << ',' << fmt(m.pendulum_max_excursion) << ','
        << csv_field(m.aborted ? m.abort_cause : "") << '\n';
  }
}

}  // namespace orbitgrasp
