#pragma once

#include <cstdint>
#include <span>

#include "spatsign/data.hpp"
#include "spatsign/matalg.hpp"
#include "spatsign/vec.hpp"

// Data-parallel sweeps over points, Walsh pairs and triples. The parallel
// kernels partition the index range into chunks whose layout depends only on
// the range length, accumulate each chunk serially in index order, and fold
// the partials in chunk order. The result is therefore bit-identical for any
// thread count, and the library always routes through these kernels. The _ref
// variants are naive serial loops kept as the testing and benchmarking
// reference; they agree with the chunked kernels up to reassociation error.
namespace spatsign::kernels {

inline constexpr std::int64_t kMinChunk = 1024;
inline constexpr int kMaxChunks = 64;

int chunk_count(std::int64_t total);

// One Weiszfeld step's sufficient statistics at mu: with residuals
// v_t = q_t - mu and r_t = ||v_t||, over the non-coincident range r_t > zero_radius:
//   dir_sum = sum v_t/r_t, inv_r_sum = sum 1/r_t, radius_sum = sum r_t;
// coincident counts r_t <= zero_radius.
struct SweepStats {
    Vec dir_sum;
    double inv_r_sum = 0.0;
    double radius_sum = 0.0;
    std::int64_t coincident = 0;
};

// q_t = rows of data.
SweepStats point_sweep(const DataMatrix& data, std::span<const double> mu, double zero_radius);
SweepStats point_sweep_ref(const DataMatrix& data, std::span<const double> mu, double zero_radius);

// q_t = Walsh averages of data, streamed in lexicographic pair order.
SweepStats pair_sweep(const DataMatrix& data, std::span<const double> mu, double zero_radius);
SweepStats pair_sweep_ref(const DataMatrix& data, std::span<const double> mu, double zero_radius);

// Directions and inverse radii of centered Walsh averages z_ij - center.
// Exactly zero residuals are counted, not summed; the first offending pair is
// recorded so callers can report it.
struct PairDirectionStats {
    Vec u_sum;
    double inv_r_sum = 0.0;
    std::int64_t zero_pairs = 0;
    int first_zero_i = -1;
    int first_zero_j = -1;
};
PairDirectionStats pair_direction_stats(const DataMatrix& data, std::span<const double> center);
PairDirectionStats pair_direction_stats_ref(const DataMatrix& data, std::span<const double> center);

// n^{-1} sum_i A(y_i - center) and n^{-1} sum_i B(y_i - center); A and B are
// the norm Hessian and the sign outer product, zero at the origin.
SymMatrix hessian_point_mean(const DataMatrix& data, std::span<const double> center);
SymMatrix outer_point_mean(const DataMatrix& data, std::span<const double> center);

// C(n,2)^{-1} sum_{i<j} A(z_ij - center).
SymMatrix hessian_pair_mean(const DataMatrix& data, std::span<const double> center);
SymMatrix hessian_pair_mean_ref(const DataMatrix& data, std::span<const double> center);

// Signed-rank scores: row i is q_i = n^{-1} sum_j u((e_i + e_j)/2) with
// e = rows - center, j running over all rows including i.
Matrix rank_scores(const DataMatrix& data, std::span<const double> center);
Matrix rank_scores_ref(const DataMatrix& data, std::span<const double> center);

// n^{-1} sum_i q_i q_i' from precomputed score rows.
SymMatrix score_outer_mean(const Matrix& scores);

// C(n,3)^{-1} sum_{i<j<k} (u_ij u_jk' + u_jk u_ij')/2 on centered Walsh
// averages. Serial lexicographic accumulation with the per-triple update
// acc(a,b) += 0.5*(u_ij[a]*u_jk[b] + u_ij[b]*u_jk[a]); kept reproducible
// term-for-term so independent loops can match it exactly.
SymMatrix triples_outer_mean(const DataMatrix& data, std::span<const double> center);

// Same U-statistic averaged over m distinct triples drawn uniformly without
// replacement; falls back to the full sum when m >= C(n,3).
SymMatrix subsampled_outer_mean(const DataMatrix& data, std::span<const double> center,
                                std::int64_t m, std::uint64_t seed);

// One pass of pairwise second-order summaries for diagnostics: sums of
// u u', u, and r^{-k} for k = 1..4 over pairs with r > 0.
struct PairMomentStats {
    SymMatrix outer_sum;
    Vec u_sum;
    double inv_pow_sum[4] = {0.0, 0.0, 0.0, 0.0};
    std::int64_t zero_pairs = 0;
};
PairMomentStats pair_moment_stats(const DataMatrix& data, std::span<const double> center);
PairMomentStats pair_moment_stats_ref(const DataMatrix& data, std::span<const double> center);

}  // namespace spatsign::kernels
