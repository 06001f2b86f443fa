#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "spatsign/data.hpp"
#include "spatsign/location.hpp"
#include "spatsign/sim.hpp"
#include "spatsign/vec.hpp"

// Finite-sample error of the asymptotic linearization of the HL estimator,
// and the Monte Carlo study of its norm across (n, p/n) cells.
namespace spatsign {

// delta = sqrt(n) * a_hat * mu_HL - sqrt(n) * (mean pairwise direction),
// where a_hat is the pairwise mean of 1/||z_ij|| over Walsh averages z_ij.
// Scale-free in the data and orthogonally equivariant.
struct DeltaStat {
    Vec delta;
    double a_hat = 0.0;
    Vec hl;  // HL location estimate behind delta
    bool hl_converged = false;
};

// Streams the Walsh pairs once for a_hat and the direction mean, then runs
// one HL fit. Throws DegenerateWalshAverage (with the offending pair) when
// some z_ij is exactly zero, since 1/r is then undefined.
DeltaStat delta_statistic(const DataMatrix& data, const SolverConfig& cfg = {});

struct RepFailure {
    int replication = -1;
    std::string message;
};

// One study cell. Parallel vectors hold the successful replications in
// ascending replication order; failed replications are recorded separately
// and excluded from the quantiles.
struct DeltaReport {
    int n = 0;
    int p = 0;
    Family family = Family::normal;
    int df = 3;
    std::uint64_t seed = 0;
    std::vector<int> replication;
    std::vector<double> per_rep_norms;    // ||delta||, all >= 0
    std::vector<double> a_hat;
    std::vector<double> scaled_hl_norms;  // sqrt(n) * a_hat * ||mu_HL||, boundedness readout
    std::vector<char> hl_converged;
    std::vector<RepFailure> failures;
    double q25 = 0.0;
    double median = 0.0;
    double q75 = 0.0;
};

struct GridCell {
    int n = 0;
    double gamma = 0.0;  // aspect ratio p/n; the cell dimension is round(gamma * n)
};

// Desk-scale default grid and replication count; the full-size study is the
// same call with a larger replication count.
inline const std::vector<GridCell> kDefaultGrid = {
    {100, 0.5}, {200, 0.5}, {500, 0.5}, {100, 1.0}, {200, 1.0}, {500, 1.0}};
inline constexpr int kDefaultReplications = 200;

// Replications run in parallel; each is a pure function of
// (seed, cell, replication index) and lands in its own slot, so the report
// does not depend on scheduling or thread count. Per-replication solver
// errors are recorded and do not abort the cell.
std::vector<DeltaReport> figure3_study(const std::vector<GridCell>& grid, Family family,
                                       std::uint64_t seed, int replications, int df = 3);

// One CSV row per successful replication:
// n,p,family,rep,delta_norm,a_hat,converged. 17 significant digits.
void write_figure3_csv(const std::vector<DeltaReport>& reports, std::ostream& out);

// Per-cell JSON summary: quantiles of ||delta||, failure counts, and the
// descriptive range of the scaled HL norm.
std::string figure3_summary_json(const std::vector<DeltaReport>& reports);

inline constexpr double kEigenFlagThreshold = 0.9;
inline constexpr double kMomentRatioFlagThreshold = 1e3;

// Empirical checks behind the high-dimensional regularity condition: pairwise
// inverse-radius moments c_k = mean(r^{-k}), their scale-free ratios
// c_k / c_1^k, and the top eigenvalue of the sample covariance of the pair
// directions. Pairs with r exactly zero are skipped and counted.
struct Assumption3Report {
    double c[4] = {0.0, 0.0, 0.0, 0.0};
    double ratios[4] = {0.0, 0.0, 0.0, 0.0};
    double lambda_max = 0.0;
    std::int64_t zero_pairs = 0;
    bool eigen_flag = false;   // lambda_max >= kEigenFlagThreshold
    bool moment_flag = false;  // max ratio >= kMomentRatioFlagThreshold
};

Assumption3Report assumption3_diagnostics(const DataMatrix& data);

}  // namespace spatsign
