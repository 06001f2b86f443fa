#pragma once

#include <cstdint>
#include <limits>
#include <span>

#include "spatsign/data.hpp"
#include "spatsign/matalg.hpp"
#include "spatsign/vec.hpp"

namespace spatsign {

struct SolverConfig {
    double tol = 1e-10;  // relative step tolerance
    int max_iter = 500;
    // Residuals with norm <= eta * data scale count as coincident with the
    // iterate and are handled by the Vardi-Zhang anchor step.
    double eta = std::numeric_limits<double>::epsilon();
};

// Location-only solve. objective_trace holds the criterion value at every
// visited iterate, final iterate included; Weiszfeld descent keeps it
// non-increasing.
struct SolveSummary {
    Vec estimate;
    int iterations = 0;
    bool converged = false;
    double objective = 0.0;
    Vec objective_trace;
};

struct LocationFit {
    Vec estimate;
    SymMatrix cov_of_estimate;  // per-sample sandwich, zero when the Hessian mean is singular
    int iterations = 0;
    bool converged = false;
    double objective = 0.0;
};

enum class BhatMode {
    automatic,      // exact triples for 3 <= n <= 200, rank-based otherwise
    exact_triples,  // O(n^3 p) triple U-statistic
    rank_based,     // n^{-1} sum q(e_i) q(e_i)', O(n^2 p)
    subsampled,     // triple U-statistic over `subsample` random triples
};

struct BhatSpec {
    BhatMode mode = BhatMode::automatic;
    std::int64_t subsample = 2000000;
    std::uint64_t seed = 20240517;
};

// Minimizer of n^{-1} sum {||y_i - mu|| - ||y_i||} (modified Weiszfeld with
// the Vardi-Zhang anchor correction).
SolveSummary spatial_median_solve(const DataMatrix& data, const SolverConfig& cfg = {});
LocationFit spatial_median(const DataMatrix& data, const SolverConfig& cfg = {});

// Spatial median of the Walsh averages, streamed pairwise; covariance uses
// the factor 4 of the pairwise objective.
SolveSummary hl_solve(const DataMatrix& data, const SolverConfig& cfg = {});
LocationFit hl_estimator(const DataMatrix& data, const SolverConfig& cfg = {},
                         const BhatSpec& bhat = {});

// Mean sign Hessian / sign outer product of residuals about center.
SymMatrix ahat_median(const DataMatrix& data, std::span<const double> center);
SymMatrix bhat_median(const DataMatrix& data, std::span<const double> center);

// Pairwise versions on centered Walsh averages.
SymMatrix ahat_hl(const DataMatrix& data, std::span<const double> center);
SymMatrix bhat_hl(const DataMatrix& data, std::span<const double> center,
                  const BhatSpec& spec = {});

// factor * inv(ahat) * bhat * inv(ahat); zero matrix when ahat is singular,
// so degenerate fits carry a usable (if uninformative) covariance.
SymMatrix sandwich(const SymMatrix& ahat, const SymMatrix& bhat, double factor);

}  // namespace spatsign
