#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <optional>
#include <vector>

#include "ofsc/errors.hpp"

namespace ofsc {

using Vec = Eigen::VectorXd;

enum class GridConvention { partition, centered };

// Uniform hyper-rectangular quantizer over a real box.
//
// partition: cells are half-open boxes [lb + i*eta, lb + (i+1)*eta) tiling
//   [lb, ub) exactly, with the upper domain face folded into the last cell.
// centered: cells are boxes of radius eta/2 centered at lb + i*eta; the
//   domain hull extends eta/2 past the declared bounds and face points
//   quantize to the lower-index center.
class GridQuantizer {
 public:
  static GridQuantizer partition(const Vec& lb, const Vec& ub, const Vec& eta);
  static GridQuantizer centered(const Vec& lb, const Vec& ub, const Vec& eta);

  int dim() const { return int(eta_.size()); }
  GridConvention convention() const { return conv_; }
  long num_cells() const;
  const std::vector<int>& cells_per_dim() const { return n_; }
  const Vec& eta() const { return eta_; }
  const Vec& lower_bounds() const { return lb_; }

  // Hull actually covered by cells (closed).
  Vec hull_lo() const;
  Vec hull_hi() const;

  std::optional<long> quantize(const Vec& x) const;  // nullopt = OutOfDomain
  std::pair<Vec, Vec> cell_box(long cell) const;     // closed hull of the cell
  Vec center(long cell) const;

  std::vector<int> coords(long cell) const;
  long index(const std::vector<int>& c) const;

  // Depth of a point inside its containing cell (min face distance over
  // dims); negative when out of domain.
  double depth(const Vec& x) const;

  // 1-D restriction of this grid along one dimension.
  GridQuantizer axis(int dim) const;

 private:
  GridQuantizer() = default;
  Vec lb_, eta_;
  std::vector<int> n_;
  GridConvention conv_ = GridConvention::partition;
};

// Finite input lattice: floor((ub-lb)/eta)+1 points spaced eta per dimension,
// centered inside the box so every point is admissible.
std::vector<Vec> input_lattice(const Vec& lb, const Vec& ub, const Vec& eta);

enum class Snap { inner, outer };

// The OFRR Z and the abstract output map H_q for single-coordinate output
// maps. The real output axis is partitioned by the state grid's measured-axis
// cells; symbol names come from the declared output quantization applied to
// the axis-cell representative points, so published symbol indices are
// reproduced while every state cell maps to exactly one output symbol
// (alignment condition). Requires the state cell width on the measured axis
// to be an integer multiple of the output cell width, with aligned origins.
class OutputRelation {
 public:
  static OutputRelation build(const GridQuantizer& state_grid, int output_coordinate,
                              double output_eta, double output_lb, double output_ub);

  int output_coordinate() const { return coord_; }
  int num_symbols() const { return num_names_; }  // name space (incl. unused)
  int num_axis_cells() const { return int(axis_to_name_.size()); }

  // Z: concrete output value -> symbol id; nullopt = OutOfDomain.
  std::optional<OutputId> z(double y) const;
  // H_q on a state cell of the grid this relation was built from.
  OutputId symbol_of_state_cell(const GridQuantizer& state_grid, long cell) const;
  OutputId symbol_of_axis_cell(int axis_cell) const { return axis_to_name_[axis_cell]; }
  int axis_cell_of_symbol(OutputId y) const;  // -1 when unused
  std::vector<OutputId> used_symbols() const { return axis_to_name_; }

  // Concrete interval -> symbol set via axis cells. inner: cells whose hull
  // is contained in [lo,hi]; outer: cells intersecting it.
  std::vector<OutputId> snap_interval(double lo, double hi, Snap snap) const;

  const GridQuantizer& axis_grid() const { return axis_; }
  double output_eta() const { return name_eta_; }
  double output_lb() const { return name_lb_; }
  double output_ub() const { return name_ub_; }

  // `z y_index cell_low cell_high` lines for inspection.
  void write_table(std::ostream& os) const;

 private:
  int coord_ = 0;
  GridQuantizer axis_;
  double name_eta_ = 0, name_lb_ = 0, name_ub_ = 0;
  int num_names_ = 0;
  std::vector<OutputId> axis_to_name_;
};

}  // namespace ofsc
