#pragma once

#include <optional>
#include <vector>

#include "ofsc/abstraction.hpp"
#include "ofsc/linalg.hpp"

namespace ofsc {

// Sampled LTI plant with a single measured coordinate.
struct LinearPlant {
  Mat a, b;                  // continuous-time
  Eigen::RowVectorXd c;      // measurement row
  Mat ad;                    // exp(A tau)
  Mat bd;                    // ZOH input matrix
  double tau = 0;
};

LinearPlant make_linear_plant(const Mat& a, const Mat& b, int output_coordinate, double tau);

// Luenberger observer gains. The runtime is the current-estimator form
//   filtered:  xh = xh_prior + l_curr (y - C xh_prior)
//   predict:   xh_prior' = Ad xh + Bd u
// whose composition is the predictor update with gain l_pred = Ad l_curr.
struct ObserverSpec {
  Vec l_pred;
  Vec l_curr;
  double epsilon = 0;
  double tau = 0;
};

// Pole placement via Ackermann's formula on the single-output pair (Ad, C);
// real poles, n <= 4. Throws ConfigError when (Ad, C) is unobservable.
ObserverSpec design_luenberger(const LinearPlant& plant, const std::vector<double>& poles,
                               double epsilon);

// One predictor-form step: xh' = Ad xh + Bd u + L (y - C xh).
Vec observer_step(const ObserverSpec& spec, const LinearPlant& plant, const Vec& xhat,
                  const Vec& u, double y);

// Current-estimator measurement update.
Vec measurement_update(const ObserverSpec& spec, const LinearPlant& plant, const Vec& xhat_prior,
                       double y);

// Largest-magnitude eigenvalue of the predictor error matrix (Ad - L C).
double observer_error_spectral_radius(const ObserverSpec& spec, const LinearPlant& plant);

struct BlindPlan {
  InputId u_p;
  std::vector<StateId> x_p;
};

// Condition (11): an input u_p and a cell set X_p such that every abstract
// u_p-successor of every X_p cell lies in the controller domain. Candidates
// are tried ordered by (|value|, value); X_p starts from the domain cells and
// shrinks to the cells where the condition holds.
std::optional<BlindPlan> blind_period_plan(const SymbolicModel& model,
                                           const std::vector<StateId>& domain,
                                           const std::vector<InputId>& candidate_inputs);

}  // namespace ofsc
