#pragma once

#include <map>
#include <string>
#include <vector>

#include "ofsc/abstraction.hpp"
#include "ofsc/grid.hpp"
#include "ofsc/synthesis.hpp"

namespace ofsc {

enum class Method { direct, knowledge, observer, detector };
enum class MonitorLevel { symbol, concrete };

// Flat `section.key = value` configuration; arrays in brackets; unknown keys
// rejected with line numbers.
struct CaseStudyConfig {
  std::string model_id;
  std::map<std::string, double> model_params;

  Vec state_lb, state_ub, state_eta;
  GridConvention convention = GridConvention::partition;
  Vec input_lb, input_ub, input_eta;
  double tau = 0;

  AbstractionMode mode = AbstractionMode::growth;
  double epsilon = 0;
  int substeps = 5;

  int output_coordinate = 0;
  double output_eta = 0;
  double output_lb = 0, output_ub = 0;  // default: state bounds on the coordinate

  Spec::Kind spec_kind = Spec::Kind::Safe;
  std::vector<std::pair<double, double>> target_intervals;
  int hold = 1;
  int window_from = 0, window_to = 0;
  Snap snap = Snap::inner;
  MonitorLevel monitor = MonitorLevel::symbol;
  int min_cycles = 3;

  Method method = Method::direct;
  std::vector<double> observer_poles;
  double observer_epsilon = 0;
  size_t game_cap = 2000000;

  Vec sim_x0;
  Vec sim_xhat0;
  int sim_steps = 100;
  uint64_t sim_seed = 1;

  GridQuantizer make_state_grid() const;
  std::vector<Vec> make_inputs() const;
  OutputRelationSpec output_spec() const;
};

CaseStudyConfig load_config(const std::string& path);
CaseStudyConfig parse_config(std::istream& is, const std::string& name);

SymbolicModel build_from_config(const CaseStudyConfig& cfg);

}  // namespace ofsc
