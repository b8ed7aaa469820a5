#include "ofsc/observer.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

namespace ofsc {

LinearPlant make_linear_plant(const Mat& a, const Mat& b, int output_coordinate, double tau) {
  LinearPlant p;
  p.a = a;
  p.b = b;
  p.c = Eigen::RowVectorXd::Zero(a.rows());
  p.c[output_coordinate] = 1.0;
  auto [ad, bd] = discretize_zoh(a, b, tau);
  p.ad = ad;
  p.bd = bd;
  p.tau = tau;
  return p;
}

ObserverSpec design_luenberger(const LinearPlant& plant, const std::vector<double>& poles,
                               double epsilon) {
  const int n = int(plant.ad.rows());
  if (int(poles.size()) != n) throw ConfigError("observer: need one pole per state dimension");
  if (n > 4) throw ConfigError("observer: pole placement supported up to n = 4");
  for (double p : poles)
    if (std::abs(p) >= 1.0) throw ConfigError("observer: poles must be inside the unit circle");

  // observability matrix of (Ad, C)
  Mat obs(n, n);
  Eigen::RowVectorXd row = plant.c;
  for (int i = 0; i < n; ++i) {
    obs.row(i) = row;
    row = row * plant.ad;
  }
  Eigen::FullPivLU<Mat> lu(obs);
  if (lu.rank() < n)
    throw ConfigError("observer: (A, C) pair is unobservable; cannot place poles");

  // desired characteristic polynomial coefficients (monic, ascending powers)
  std::vector<double> coef{1.0};
  for (double p : poles) {
    std::vector<double> next(coef.size() + 1, 0.0);
    for (size_t i = 0; i < coef.size(); ++i) {
      next[i + 1] += coef[i];
      next[i] += -p * coef[i];
    }
    coef = next;
  }
  // q(Ad) = Ad^n + c_{n-1} Ad^{n-1} + ... + c_0 I
  Mat q = Mat::Zero(n, n);
  Mat power = Mat::Identity(n, n);
  for (int i = 0; i <= n; ++i) {
    q += coef[i] * power;
    power = power * plant.ad;
  }
  Vec en = Vec::Zero(n);
  en[n - 1] = 1.0;
  ObserverSpec spec;
  spec.l_pred = q * lu.solve(Mat::Identity(n, n)) * en;
  spec.l_curr = plant.ad.fullPivLu().solve(spec.l_pred);
  spec.epsilon = epsilon;
  spec.tau = plant.tau;

  if (observer_error_spectral_radius(spec, plant) >= 1.0 + 1e-9)
    throw ConfigError("observer: placed error dynamics are not stable");
  return spec;
}

Vec observer_step(const ObserverSpec& spec, const LinearPlant& plant, const Vec& xhat,
                  const Vec& u, double y) {
  return plant.ad * xhat + plant.bd * u + spec.l_pred * (y - plant.c * xhat);
}

Vec measurement_update(const ObserverSpec& spec, const LinearPlant& plant, const Vec& xhat_prior,
                       double y) {
  return xhat_prior + spec.l_curr * (y - plant.c * xhat_prior);
}

double observer_error_spectral_radius(const ObserverSpec& spec, const LinearPlant& plant) {
  Mat err = plant.ad - spec.l_pred * plant.c;
  Eigen::EigenSolver<Mat> es(err);
  double r = 0;
  for (int i = 0; i < err.rows(); ++i) r = std::max(r, std::abs(es.eigenvalues()[i]));
  return r;
}

std::optional<BlindPlan> blind_period_plan(const SymbolicModel& model,
                                           const std::vector<StateId>& domain,
                                           const std::vector<InputId>& candidate_inputs) {
  std::vector<char> indomain(model.system.num_states(), 0);
  for (StateId x : domain) indomain[x] = 1;

  std::vector<InputId> order = candidate_inputs;
  std::stable_sort(order.begin(), order.end(), [&](InputId a, InputId b) {
    double va = model.inputs[a].lpNorm<Eigen::Infinity>();
    double vb = model.inputs[b].lpNorm<Eigen::Infinity>();
    if (va != vb) return va < vb;
    return model.inputs[a][0] < model.inputs[b][0];
  });

  for (InputId u : order) {
    std::vector<StateId> xp;
    for (StateId x : domain) {
      auto p = model.system.post(x, u);
      if (p.empty()) continue;  // input inadmissible here
      bool all = true;
      for (StateId s : p)
        if (!indomain[s]) { all = false; break; }
      if (all) xp.push_back(x);
    }
    if (!xp.empty()) return BlindPlan{u, std::move(xp)};
  }
  return std::nullopt;
}

}  // namespace ofsc
