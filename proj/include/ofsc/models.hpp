#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>

#include "ofsc/grid.hpp"
#include "ofsc/linalg.hpp"

namespace ofsc {

// A registered continuous-time control system dx/dt = f(x, u) with a
// single-coordinate measurement and an analytic growth bound: the
// componentwise radius map r(tau) = exp(K tau) r(0), K the Jacobian bound
// with signed diagonal and absolute off-diagonals.
struct ContinuousSystem {
  std::string id;
  int state_dim = 0;
  int input_dim = 0;
  int output_coordinate = 0;
  std::map<std::string, double> params;
  std::function<Vec(const Vec&, const Vec&)> vector_field;
  // K may depend on the state box the abstraction covers.
  std::function<Mat(const Vec& box_lo, const Vec& box_hi)> jacobian_bound;
  std::optional<std::pair<Mat, Mat>> linear;  // (A, B) when LTI
};

// Builtins: dcmotor, double_integrator, pendulum. Unknown parameter names are
// rejected; omitted ones take the cited defaults.
ContinuousSystem make_continuous_system(const std::string& id,
                                        const std::map<std::string, double>& params = {});

// Classical fixed-step RK4 under constant input.
Vec integrate_rk4(const std::function<Vec(const Vec&, const Vec&)>& f, Vec x, const Vec& u,
                  double tau, int substeps);

}  // namespace ofsc
