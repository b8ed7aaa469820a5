#pragma once

#include <Eigen/Dense>

namespace ofsc {

using Mat = Eigen::MatrixXd;

// Matrix exponential by scaling and squaring of the truncated Taylor series,
// iterated until the series residual bound drops below 1e-12.
Mat expm(const Mat& a);

// Zero-order-hold discretization: Ad = exp(A tau), Bd = int_0^tau exp(As) ds B,
// computed through the augmented matrix [[A, B], [0, 0]].
std::pair<Mat, Mat> discretize_zoh(const Mat& a, const Mat& b, double tau);

}  // namespace ofsc
