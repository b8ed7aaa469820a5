#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "ofsc/finite_system.hpp"
#include "ofsc/grid.hpp"
#include "ofsc/models.hpp"

namespace ofsc {

enum class AbstractionMode { growth, nominal };

struct ReachBox {
  Vec lo, hi;
};

// Box containing the tau-reach set of `cell` under constant input u:
// RK4 image of the box center plus the growth-bound radius applied to
// (cell radius + epsilon), clamped to at least epsilon. In nominal mode the
// radius is epsilon alone (the paper's case-study construction).
ReachBox reach_box(const ContinuousSystem& sys, const Vec& cell_lo, const Vec& cell_hi,
                   const Vec& u, double tau, int substeps, double epsilon,
                   AbstractionMode mode, const Mat& growth_exp);

// Precomputed exp(K tau) for the growth dynamics of `sys` over the grid hull.
Mat growth_exponential(const ContinuousSystem& sys, const GridQuantizer& grid, double tau);

// The symbolic model S_q: states are grid cells, inputs are lattice points,
// outputs come through the output relation. Out-of-domain reach boxes omit
// the input for that cell. Margins record the depth of each (cell, input)
// image point inside its containing cell.
struct SymbolicModel {
  FiniteSystem system;
  GridQuantizer state_grid;
  std::vector<Vec> inputs;
  OutputRelation output_rel;
  double tau = 0;
  double epsilon = 0;
  int substeps = 5;
  AbstractionMode mode = AbstractionMode::growth;
  std::string model_id;
  std::map<std::string, double> model_params;

  StateId cell_to_state(long cell) const { return StateId(cell); }
  long state_to_cell(StateId x) const { return long(x); }
};

struct OutputRelationSpec {
  int coordinate = 0;
  double eta = 0;
  double lb = 0, ub = 0;
};

SymbolicModel build_symbolic_model(const ContinuousSystem& sys, const GridQuantizer& state_grid,
                                   const std::vector<Vec>& inputs,
                                   const OutputRelationSpec& out_spec, double tau,
                                   double epsilon, AbstractionMode mode, int substeps = 5);

struct ModelStats {
  long states = 0;
  long transitions = 0;
  int inputs = 0;
  int outputs = 0;  // used output symbols
};

ModelStats model_stats(const SymbolicModel& m);

// Sidecar header: grids, tau, epsilon, mode, model id and parameters as
// `key value` lines, then `m s u margin` lines. The core system itself is
// written in the flat core format.
void write_meta(const SymbolicModel& m, std::ostream& os);
SymbolicModel read_model(std::istream& core, std::istream& meta);

}  // namespace ofsc
