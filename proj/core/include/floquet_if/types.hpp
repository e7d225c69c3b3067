// types.hpp — Scalar and dense matrix aliases shared by every module

#pragma once

#include <complex>

#include <Eigen/Dense>

namespace floquet {

using cd = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RowVector = Eigen::RowVectorXcd;
using RealVector = Eigen::VectorXd;

inline constexpr cd kI{0.0, 1.0};
inline constexpr double kPi = 3.14159265358979323846;

}  // namespace floquet
