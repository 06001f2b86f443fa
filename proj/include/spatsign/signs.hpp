#pragma once

#include <span>

#include "spatsign/data.hpp"
#include "spatsign/matalg.hpp"
#include "spatsign/vec.hpp"

namespace spatsign {

// u(y) = y/||y||, u(0) = 0. The gradient of the Euclidean norm.
Vec spatial_sign(std::span<const double> y);

// In-place variant: writes u(y) into out, returns ||y||.
double spatial_sign_into(std::span<const double> y, std::span<double> out);

// A(y) = ||y||^{-1} [I - ||y||^{-2} y y'], the Hessian of the Euclidean norm;
// A(0) = 0.
SymMatrix sign_hessian(std::span<const double> y);

// B(y) = u(y) u(y)', rank one with trace 1 for y != 0; B(0) = 0.
SymMatrix sign_outer(std::span<const double> y);

// Estimated signed-rank function q(e) = n^{-1} sum_i u((y_i + e)/2).
Vec signed_rank_fn(const DataMatrix& data, std::span<const double> e);

}  // namespace spatsign
