#include "ofsc/grid.hpp"

#include <cmath>
#include <ostream>
#include <string>

namespace ofsc {

namespace {
constexpr double kDivTol = 1e-9;

void check_box(const Vec& lb, const Vec& ub, const Vec& eta) {
  if (lb.size() != ub.size() || lb.size() != eta.size() || lb.size() == 0)
    throw ConfigError("grid: dimension mismatch or empty box");
  for (int i = 0; i < lb.size(); ++i) {
    if (!(eta[i] > 0)) throw ConfigError("grid: eta must be positive");
    if (!(ub[i] >= lb[i])) throw ConfigError("grid: empty bounds");
  }
}
}  // namespace

GridQuantizer GridQuantizer::partition(const Vec& lb, const Vec& ub, const Vec& eta) {
  check_box(lb, ub, eta);
  GridQuantizer g;
  g.lb_ = lb;
  g.eta_ = eta;
  g.conv_ = GridConvention::partition;
  g.n_.resize(lb.size());
  for (int i = 0; i < lb.size(); ++i) {
    double r = (ub[i] - lb[i]) / eta[i];
    if (std::abs(r - std::round(r)) > 0.5e-6 * std::max(1.0, std::abs(r)))
      throw ConfigError("grid: bounds not divisible by eta in dimension " + std::to_string(i));
    g.n_[i] = std::max(1, int(std::lround(r)));
  }
  return g;
}

GridQuantizer GridQuantizer::centered(const Vec& lb, const Vec& ub, const Vec& eta) {
  check_box(lb, ub, eta);
  GridQuantizer g;
  g.lb_ = lb;
  g.eta_ = eta;
  g.conv_ = GridConvention::centered;
  g.n_.resize(lb.size());
  for (int i = 0; i < lb.size(); ++i)
    g.n_[i] = int(std::lround((ub[i] - lb[i]) / eta[i])) + 1;
  return g;
}

long GridQuantizer::num_cells() const {
  long n = 1;
  for (int k : n_) n *= k;
  return n;
}

Vec GridQuantizer::hull_lo() const {
  if (conv_ == GridConvention::partition) return lb_;
  return lb_ - eta_ / 2.0;
}

Vec GridQuantizer::hull_hi() const {
  Vec hi(dim());
  for (int i = 0; i < dim(); ++i) hi[i] = lb_[i] + n_[i] * eta_[i];
  if (conv_ == GridConvention::centered)
    for (int i = 0; i < dim(); ++i) hi[i] = lb_[i] + (n_[i] - 1) * eta_[i] + eta_[i] / 2.0;
  return hi;
}

std::optional<long> GridQuantizer::quantize(const Vec& x) const {
  if (x.size() != dim()) throw DomainError("quantize: dimension mismatch");
  long idx = 0;
  for (int i = 0; i < dim(); ++i) {
    int c;
    if (conv_ == GridConvention::partition) {
      double hi = lb_[i] + n_[i] * eta_[i];
      if (x[i] < lb_[i] || x[i] > hi) return std::nullopt;
      c = int(std::floor((x[i] - lb_[i]) / eta_[i]));
      if (c >= n_[i]) c = n_[i] - 1;  // upper face folds into the last cell
    } else {
      // nearest center, ties toward the lower index
      double t = (x[i] - lb_[i]) / eta_[i];
      c = int(std::ceil(t - 0.5));
      if (c < 0 || c >= n_[i]) {
        if (x[i] < lb_[i] - eta_[i] / 2.0 || x[i] > lb_[i] + (n_[i] - 1 + 0.5) * eta_[i])
          return std::nullopt;
        c = std::clamp(c, 0, n_[i] - 1);
      }
    }
    idx = idx * n_[i] + c;
  }
  return idx;
}

std::vector<int> GridQuantizer::coords(long cell) const {
  if (cell < 0 || cell >= num_cells()) throw DomainError("invalid cell id");
  std::vector<int> c(dim());
  for (int i = dim() - 1; i >= 0; --i) {
    c[i] = int(cell % n_[i]);
    cell /= n_[i];
  }
  return c;
}

long GridQuantizer::index(const std::vector<int>& c) const {
  long idx = 0;
  for (int i = 0; i < dim(); ++i) {
    if (c[i] < 0 || c[i] >= n_[i]) throw DomainError("invalid cell coordinates");
    idx = idx * n_[i] + c[i];
  }
  return idx;
}

std::pair<Vec, Vec> GridQuantizer::cell_box(long cell) const {
  auto c = coords(cell);
  Vec lo(dim()), hi(dim());
  for (int i = 0; i < dim(); ++i) {
    if (conv_ == GridConvention::partition) {
      lo[i] = lb_[i] + c[i] * eta_[i];
      hi[i] = lo[i] + eta_[i];
    } else {
      lo[i] = lb_[i] + c[i] * eta_[i] - eta_[i] / 2.0;
      hi[i] = lo[i] + eta_[i];
    }
  }
  return {lo, hi};
}

Vec GridQuantizer::center(long cell) const {
  auto [lo, hi] = cell_box(cell);
  return (lo + hi) / 2.0;
}

double GridQuantizer::depth(const Vec& x) const {
  auto cell = quantize(x);
  if (!cell) return -1.0;
  auto [lo, hi] = cell_box(*cell);
  double d = std::numeric_limits<double>::infinity();
  for (int i = 0; i < dim(); ++i) d = std::min({d, x[i] - lo[i], hi[i] - x[i]});
  return d;
}

GridQuantizer GridQuantizer::axis(int d) const {
  if (d < 0 || d >= dim()) throw DomainError("axis: bad dimension");
  GridQuantizer g;
  g.lb_ = Vec::Constant(1, lb_[d]);
  g.eta_ = Vec::Constant(1, eta_[d]);
  g.n_ = {n_[d]};
  g.conv_ = conv_;
  return g;
}

std::vector<Vec> input_lattice(const Vec& lb, const Vec& ub, const Vec& eta) {
  check_box(lb, ub, eta);
  int d = int(lb.size());
  std::vector<int> n(d);
  Vec first(d);
  for (int i = 0; i < d; ++i) {
    int steps = int(std::floor((ub[i] - lb[i]) / eta[i] + kDivTol));
    n[i] = steps + 1;
    first[i] = lb[i] + ((ub[i] - lb[i]) - steps * eta[i]) / 2.0;
  }
  long total = 1;
  for (int k : n) total *= k;
  std::vector<Vec> pts;
  pts.reserve(total);
  std::vector<int> c(d, 0);
  for (long k = 0; k < total; ++k) {
    Vec v(d);
    for (int i = 0; i < d; ++i) v[i] = first[i] + c[i] * eta[i];
    pts.push_back(v);
    for (int i = d - 1; i >= 0; --i) {
      if (++c[i] < n[i]) break;
      c[i] = 0;
    }
  }
  return pts;
}

OutputRelation OutputRelation::build(const GridQuantizer& state_grid, int output_coordinate,
                                     double output_eta, double output_lb, double output_ub) {
  if (output_coordinate < 0 || output_coordinate >= state_grid.dim())
    throw ConfigError("output relation: bad output coordinate");
  if (!(output_eta > 0) || !(output_ub > output_lb))
    throw ConfigError("output relation: bad output quantization");

  OutputRelation r;
  r.coord_ = output_coordinate;
  r.axis_ = state_grid.axis(output_coordinate);
  r.name_eta_ = output_eta;
  r.name_lb_ = output_lb;
  r.name_ub_ = output_ub;
  r.num_names_ = int(std::lround((output_ub - output_lb) / output_eta)) + 1;

  double sx = r.axis_.eta()[0];
  double k = sx / output_eta;
  if (std::abs(k - std::round(k)) > 1e-6 || std::lround(k) < 1)
    throw ConfigError(
        "output relation: state cell width is not an integer multiple of the output cell "
        "width in dimension " + std::to_string(output_coordinate));
  double off = (r.axis_.lower_bounds()[0] - output_lb) / output_eta;
  if (std::abs(off - std::round(off)) > 1e-6)
    throw ConfigError("output relation: grid origins are misaligned in dimension " +
                      std::to_string(output_coordinate));

  r.axis_to_name_.resize(r.axis_.cells_per_dim()[0]);
  for (int c = 0; c < int(r.axis_to_name_.size()); ++c) {
    double rep = r.axis_.center(c)[0];
    int name = int(std::floor((rep - output_lb) / output_eta + 1e-9));
    name = std::clamp(name, 0, r.num_names_ - 1);
    r.axis_to_name_[c] = name;
  }
  // alignment condition: distinct cells must get distinct symbols, and each
  // symbol's preimage projects exactly onto its axis cell by construction
  for (size_t a = 0; a + 1 < r.axis_to_name_.size(); ++a)
    if (r.axis_to_name_[a] >= r.axis_to_name_[a + 1])
      throw ConfigError("output relation: symbol naming is not injective in dimension " +
                        std::to_string(output_coordinate));
  return r;
}

std::optional<OutputId> OutputRelation::z(double y) const {
  Vec v = Vec::Constant(1, y);
  auto cell = axis_.quantize(v);
  if (!cell) return std::nullopt;
  return axis_to_name_[size_t(*cell)];
}

OutputId OutputRelation::symbol_of_state_cell(const GridQuantizer& state_grid, long cell) const {
  auto c = state_grid.coords(cell);
  return axis_to_name_[c[coord_]];
}

int OutputRelation::axis_cell_of_symbol(OutputId y) const {
  for (int c = 0; c < int(axis_to_name_.size()); ++c)
    if (axis_to_name_[c] == y) return c;
  return -1;
}

std::vector<OutputId> OutputRelation::snap_interval(double lo, double hi, Snap snap) const {
  if (!(hi >= lo)) throw ConfigError("snap_interval: empty interval");
  std::vector<OutputId> res;
  for (int c = 0; c < num_axis_cells(); ++c) {
    auto [clo, chi] = axis_.cell_box(c);
    bool take = snap == Snap::inner ? (clo[0] >= lo - 1e-12 && chi[0] <= hi + 1e-12)
                                    : (chi[0] > lo + 1e-12 && clo[0] < hi - 1e-12);
    if (take) res.push_back(axis_to_name_[c]);
  }
  return res;
}

void OutputRelation::write_table(std::ostream& os) const {
  for (int c = 0; c < num_axis_cells(); ++c) {
    auto [lo, hi] = axis_.cell_box(c);
    os << "z " << axis_to_name_[c] << ' ' << lo[0] << ' ' << hi[0] << "\n";
  }
}

}  // namespace ofsc
