#ifndef GRASSMANN_REPORT_HPP
#define GRASSMANN_REPORT_HPP

#include <cstdint>
#include <string>

#include "json.hpp"

#include "grassmann/geometry.hpp"

namespace grassmann {

using ordered_json = nlohmann::ordered_json;

ordered_json json_complex(cplx z);                 // [re, im]
ordered_json json_matrix(const Mat& m);            // {rows, cols, data: row-major [re,im]}
Mat matrix_from_json(const ordered_json& j);

/* Verification report with the fixed shape
 *   {meta: {tool, subcommand, build_id, config, seeds, timestamp},
 *    grid: [{point, value, aux}...],
 *    summary: {fitted_constants, checks, pass}}.
 * Serialization is deterministic except for meta.timestamp, which consumers
 * drop before byte comparison. write() also emits a flat CSV mirror of the
 * grid next to the JSON file. */
class Report {
 public:
  Report(std::string subcommand);

  void set_config(const ordered_json& cfg);
  void add_seed(const std::string& name, std::uint64_t seed);
  void add_point(const ordered_json& point, const ordered_json& value,
                 const ordered_json& aux = ordered_json::object());
  void set_constant(const std::string& name, double v);
  /* Records one assertion; overall pass is the conjunction. */
  void add_check(const std::string& name, bool ok, double measured,
                 double bound);
  bool pass() const { return pass_; }

  ordered_json to_json(bool with_timestamp = true) const;
  void write(const std::string& json_path) const;

 private:
  std::string subcommand_;
  ordered_json config_ = ordered_json::object();
  ordered_json seeds_ = ordered_json::object();
  ordered_json grid_ = ordered_json::array();
  ordered_json constants_ = ordered_json::object();
  ordered_json checks_ = ordered_json::array();
  bool pass_ = true;
};

}  // namespace grassmann

#endif
