#include "grassmann/report.hpp"

#include <ctime>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <utility>
#include <vector>

#ifndef GRASSMANN_BUILD_ID
#define GRASSMANN_BUILD_ID "unknown"
#endif

namespace grassmann {

ordered_json json_complex(cplx z) {
  return ordered_json::array({z.real(), z.imag()});
}

ordered_json json_matrix(const Mat& m) {
  ordered_json data = ordered_json::array();
  for (long i = 0; i < m.rows(); ++i)
    for (long j = 0; j < m.cols(); ++j) data.push_back(json_complex(m(i, j)));
  ordered_json out;
  out["rows"] = m.rows();
  out["cols"] = m.cols();
  out["data"] = std::move(data);
  return out;
}

Mat matrix_from_json(const ordered_json& j) {
  const long rows = j.at("rows").get<long>();
  const long cols = j.at("cols").get<long>();
  const auto& data = j.at("data");
  if (rows < 1 || cols < 1 || (long)data.size() != rows * cols)
    throw std::invalid_argument("matrix_from_json: shape mismatch");
  Mat m(rows, cols);
  long k = 0;
  for (long i = 0; i < rows; ++i)
    for (long c = 0; c < cols; ++c, ++k)
      m(i, c) = cplx(data[k].at(0).get<double>(), data[k].at(1).get<double>());
  return m;
}

Report::Report(std::string subcommand) : subcommand_(std::move(subcommand)) {}

void Report::set_config(const ordered_json& cfg) { config_ = cfg; }

void Report::add_seed(const std::string& name, std::uint64_t seed) {
  seeds_[name] = seed;
}

void Report::add_point(const ordered_json& point, const ordered_json& value,
                       const ordered_json& aux) {
  ordered_json entry;
  entry["point"] = point;
  entry["value"] = value;
  entry["aux"] = aux;
  grid_.push_back(std::move(entry));
}

void Report::set_constant(const std::string& name, double v) {
  constants_[name] = v;
}

void Report::add_check(const std::string& name, bool ok, double measured,
                       double bound) {
  ordered_json c;
  c["name"] = name;
  c["pass"] = ok;
  c["measured"] = measured;
  c["bound"] = bound;
  checks_.push_back(std::move(c));
  pass_ = pass_ && ok;
}

static std::string utc_timestamp() {
  std::time_t now = std::time(nullptr);
  std::tm tm_utc;
  gmtime_r(&now, &tm_utc);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  return buf;
}

ordered_json Report::to_json(bool with_timestamp) const {
  ordered_json meta;
  meta["tool"] = "grassmann";
  meta["subcommand"] = subcommand_;
  meta["build_id"] = GRASSMANN_BUILD_ID;
  meta["config"] = config_;
  meta["seeds"] = seeds_;
  if (with_timestamp) meta["timestamp"] = utc_timestamp();

  ordered_json summary;
  summary["fitted_constants"] = constants_;
  summary["checks"] = checks_;
  summary["pass"] = pass_;

  ordered_json out;
  out["meta"] = std::move(meta);
  out["grid"] = grid_;
  out["summary"] = std::move(summary);
  return out;
}

/* Flattens one grid entry into (column, cell) pairs: arrays get index
 * suffixes, nested objects dotted paths, so homogeneous grids produce a
 * rectangular table. */
static void flatten(const std::string& prefix, const ordered_json& j,
                    std::vector<std::pair<std::string, std::string>>& out) {
  if (j.is_object()) {
    for (auto it = j.begin(); it != j.end(); ++it)
      flatten(prefix.empty() ? it.key() : prefix + "." + it.key(), it.value(),
              out);
  } else if (j.is_array()) {
    for (size_t i = 0; i < j.size(); ++i)
      flatten(prefix + "_" + std::to_string(i), j[i], out);
  } else if (j.is_string()) {
    out.emplace_back(prefix, j.get<std::string>());
  } else {
    out.emplace_back(prefix, j.dump());
  }
}

void Report::write(const std::string& json_path) const {
  {
    std::ofstream os(json_path);
    if (!os) throw std::runtime_error("report: cannot open " + json_path);
    os << to_json().dump(2) << "\n";
  }

  std::string csv_path = json_path;
  const size_t dot = csv_path.find_last_of('.');
  if (dot != std::string::npos && csv_path.find('/', dot) == std::string::npos)
    csv_path.erase(dot);
  csv_path += ".csv";

  std::ofstream cs(csv_path);
  if (!cs) throw std::runtime_error("report: cannot open " + csv_path);
  bool header_done = false;
  for (const auto& entry : grid_) {
    std::vector<std::pair<std::string, std::string>> cells;
    flatten("", entry, cells);
    if (!header_done) {
      for (size_t i = 0; i < cells.size(); ++i)
        cs << (i ? "," : "") << cells[i].first;
      cs << "\n";
      header_done = true;
    }
    for (size_t i = 0; i < cells.size(); ++i)
      cs << (i ? "," : "") << cells[i].second;
    cs << "\n";
  }
}

}  // namespace grassmann
