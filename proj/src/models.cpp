#include "ofsc/models.hpp"

#include <cmath>

#include "ofsc/errors.hpp"

namespace ofsc {

Vec integrate_rk4(const std::function<Vec(const Vec&, const Vec&)>& f, Vec x, const Vec& u,
                  double tau, int substeps) {
  if (substeps < 1) throw DomainError("integrate_rk4: substeps must be >= 1");
  if (tau == 0.0) return x;
  const double h = tau / substeps;
  for (int s = 0; s < substeps; ++s) {
    Vec k1 = f(x, u);
    Vec k2 = f(x + 0.5 * h * k1, u);
    Vec k3 = f(x + 0.5 * h * k2, u);
    Vec k4 = f(x + h * k3, u);
    x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!x.allFinite()) throw NumericError("integrate_rk4: non-finite state");
  }
  return x;
}

namespace {

std::map<std::string, double> merge_params(const std::map<std::string, double>& defaults,
                                           const std::map<std::string, double>& user,
                                           const std::string& id) {
  auto out = defaults;
  for (const auto& [k, v] : user) {
    if (!out.count(k)) throw ConfigError("model " + id + ": unknown parameter '" + k + "'");
    out[k] = v;
  }
  return out;
}

Mat jacobian_bound_linear(const Mat& a) {
  Mat k = a.cwiseAbs();
  k.diagonal() = a.diagonal();
  return k;
}

}  // namespace

ContinuousSystem make_continuous_system(const std::string& id,
                                        const std::map<std::string, double>& params) {
  ContinuousSystem sys;
  sys.id = id;
  if (id == "dcmotor") {
    auto p = merge_params({{"L", 5e-2}, {"R", 5.0}, {"J", 5e-4}, {"b", 1e-2}, {"K", 0.1}},
                          params, id);
    Mat a(3, 3), b(3, 1);
    a << -p["R"] / p["L"], 0, -p["K"] / p["L"],
         0, 0, 1,
         p["K"] / p["J"], 0, -p["b"] / p["J"];
    b << 1.0 / p["L"], 0, 0;
    sys.state_dim = 3;
    sys.input_dim = 1;
    sys.output_coordinate = 1;  // rotor angle
    sys.params = p;
    sys.linear = {a, b};
    sys.vector_field = [a, b](const Vec& x, const Vec& u) -> Vec { return a * x + b * u; };
    sys.jacobian_bound = [a](const Vec&, const Vec&) { return jacobian_bound_linear(a); };
  } else if (id == "double_integrator") {
    (void)merge_params({}, params, id);
    Mat a(2, 2), b(2, 1);
    a << 0, 1, 0, 0;
    b << 0, 1;
    sys.state_dim = 2;
    sys.input_dim = 1;
    sys.output_coordinate = 0;  // position
    sys.linear = {a, b};
    sys.vector_field = [a, b](const Vec& x, const Vec& u) -> Vec { return a * x + b * u; };
    sys.jacobian_bound = [a](const Vec&, const Vec&) { return jacobian_bound_linear(a); };
  } else if (id == "pendulum") {
    auto p = merge_params({{"g", 9.8}, {"l", 5.0}, {"m", 0.5}, {"k", 3.0}}, params, id);
    const double gl = p["g"] / p["l"], km = p["k"] / p["m"];
    sys.state_dim = 2;
    sys.input_dim = 1;
    sys.output_coordinate = 0;  // angle
    sys.params = p;
    sys.vector_field = [gl, km](const Vec& x, const Vec& u) -> Vec {
      Vec dx(2);
      dx[0] = x[1];
      dx[1] = -gl * std::sin(x[0]) - km * x[1] + u[0];
      return dx;
    };
    sys.jacobian_bound = [gl, km](const Vec& lo, const Vec& hi) {
      // max |cos| over the angle range of the box
      double maxcos = (lo[0] <= 0.0 && hi[0] >= 0.0)
                          ? 1.0
                          : std::max(std::abs(std::cos(lo[0])), std::abs(std::cos(hi[0])));
      Mat k(2, 2);
      k << 0, 1, gl * maxcos, -km;
      return k;
    };
  } else {
    throw ConfigError("unknown model id '" + id + "'");
  }
  return sys;
}

}  // namespace ofsc
