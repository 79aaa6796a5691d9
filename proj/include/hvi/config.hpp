#ifndef HVI_CONFIG_HPP
#define HVI_CONFIG_HPP

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hvi/core.hpp"
#include "hvi/solvers.hpp"

namespace hvi {

// Flat key-value configuration with fixed sections; unknown keys are
// rejected with a line-anchored message.
struct Config {
  // [problem]
  std::string problem = "gnep";
  int n = 9;               // gave grid size
  bool normalize = true;   // gave operator normalization
  // [run]
  Variant variant = Variant::oeg;
  long iterations = 1000;
  long log_every = 100;
  uint64_t seed = 0;
  std::string energy_ref = "none";  // none | truth
  std::optional<double> stop_tol_step, stop_tol_gap;
  std::optional<std::vector<double>> z1;
  // [schedule]
  double a = 1.0, b = 1.0, delta = 0.5, mu = 0.0;
  std::string step_mode = "constant_monotone";
  std::optional<double> explicit_t;
  // [anchors]
  bool anchors_default = true;
  std::string anchors_file;
  int anchor_segment_samples = 64;
  // [output]
  std::string out_dir = "out";

  void validate() const;  // throws ConfigError
};

Config parse_config_text(const std::string& text, const std::string& filename);
Config parse_config_file(const std::string& path);
std::string serialize_config(const Config& c);
bool config_equal(const Config& a, const Config& b);

// Builds the problem the config names; consults the custom registry first.
HierarchicalProblem build_problem(const Config& c);

// Registration hook for custom problems (consumed by build_problem).
void register_problem(const std::string& name,
                      std::function<HierarchicalProblem(const Config&)> builder);

// Assembles the SolverConfig for a run: schedule, anchors, energy reference.
SolverConfig solver_config_from(const Config& c, const HierarchicalProblem& p);

}  // namespace hvi

#endif
