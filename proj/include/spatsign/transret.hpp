#pragma once

#include "spatsign/data.hpp"
#include "spatsign/location.hpp"
#include "spatsign/matalg.hpp"

namespace spatsign {

// Where the standardizing scatter comes from. The iterative sources center
// the shape at their own simultaneous location fit; the transformed location
// estimate is computed afterward in standardized coordinates.
enum class ScatterSource {
    tyler_at_hr,    // sign-based simultaneous fit
    rank_hr,        // signed-rank simultaneous fit
    user_supplied,  // caller-provided SPD shape
};

struct TrChoice {
    ScatterSource source = ScatterSource::tyler_at_hr;
    SymMatrix user_shape;  // consulted only for user_supplied
    double scatter_tol = 1e-9;
    int scatter_max_iter = 1000;
};

// Standardize rows by S^{-1/2}, run the plain estimator, map the estimate
// back through S^{1/2} and the covariance through S^{1/2} (.) S^{1/2}.
// With a user-supplied identity shape this reproduces the plain estimator
// exactly. `converged` also requires the scatter iteration to have converged
// when an iterative source is chosen.
LocationFit tr_spatial_median(const DataMatrix& data, const TrChoice& choice,
                              const SolverConfig& cfg = {});
LocationFit tr_hl(const DataMatrix& data, const TrChoice& choice, const SolverConfig& cfg = {},
                  const BhatSpec& bhat = {});

// Defaults pair each estimator with the scatter built from its own score
// function: sign-based shape for the median, rank-based shape for the
// pairwise estimator.
LocationFit tr_spatial_median(const DataMatrix& data, const SolverConfig& cfg = {});
LocationFit tr_hl(const DataMatrix& data, const SolverConfig& cfg = {}, const BhatSpec& bhat = {});

}  // namespace spatsign
