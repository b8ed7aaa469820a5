#include "ofsc/linalg.hpp"

#include <cmath>

#include "ofsc/errors.hpp"

namespace ofsc {

Mat expm(const Mat& a) {
  const int n = int(a.rows());
  if (a.cols() != n) throw NumericError("expm: square matrix required");
  double norm = a.cwiseAbs().rowwise().sum().maxCoeff();  // infinity norm
  int squarings = 0;
  if (norm > 0.5) squarings = std::max(0, int(std::ceil(std::log2(norm / 0.5))));
  Mat as = a / std::pow(2.0, squarings);

  Mat result = Mat::Identity(n, n);
  Mat term = Mat::Identity(n, n);
  double scaled_norm = norm / std::pow(2.0, squarings);
  double term_bound = 1.0;
  for (int k = 1; k < 64; ++k) {
    term = term * as / double(k);
    result += term;
    term_bound *= scaled_norm / k;
    // remaining tail is bounded by a geometric series with ratio <= 1/2
    if (term_bound * 2.0 < 1e-12) break;
    if (k == 63) throw NumericError("expm: series did not converge");
  }
  for (int s = 0; s < squarings; ++s) result = result * result;
  if (!result.allFinite()) throw NumericError("expm: non-finite result");
  return result;
}

std::pair<Mat, Mat> discretize_zoh(const Mat& a, const Mat& b, double tau) {
  if (!(tau > 0)) throw NumericError("discretize: tau must be positive");
  const int n = int(a.rows()), m = int(b.cols());
  Mat aug = Mat::Zero(n + m, n + m);
  aug.topLeftCorner(n, n) = a * tau;
  aug.topRightCorner(n, m) = b * tau;
  Mat e = expm(aug);
  return {e.topLeftCorner(n, n), e.topRightCorner(n, m)};
}

}  // namespace ofsc
