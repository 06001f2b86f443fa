#include "spatsign/location.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "spatsign/errors.hpp"
#include "spatsign/kernels.hpp"

namespace spatsign {

namespace {

void check_config(const SolverConfig& cfg) {
    if (!(cfg.tol > 0.0)) throw InvalidInput("SolverConfig: tol must be positive");
    if (cfg.max_iter < 1) throw InvalidInput("SolverConfig: max_iter must be at least 1");
    if (!(cfg.eta >= 0.0)) throw InvalidInput("SolverConfig: eta must be non-negative");
}

double max_row_norm(const DataMatrix& data) {
    double m = 0.0;
    for (int i = 0; i < data.n(); ++i) m = std::max(m, norm2(data.row(i)));
    return m;
}

// Lower-median convention averaged with the upper one; two selections, O(n).
double median_in_place(std::vector<double>& v) {
    const std::size_t m = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + m, v.end());
    const double hi = v[m];
    if (v.size() % 2 == 1) return hi;
    const double lo = *std::max_element(v.begin(), v.begin() + m);
    return 0.5 * (lo + hi);
}

Vec coordinatewise_median(const DataMatrix& data) {
    const int n = data.n();
    const int p = data.p();
    Vec mu(p);
    std::vector<double> col(n);
    for (int k = 0; k < p; ++k) {
        for (int i = 0; i < n; ++i) col[i] = data.row(i)[k];
        mu[k] = median_in_place(col);
    }
    return mu;
}

// Column-at-a-time selection over the streamed pair values: O(n^2) scratch for
// one coordinate, never the full n(n-1)/2 x p matrix.
Vec coordinatewise_walsh_median(const DataMatrix& data) {
    const int n = data.n();
    const int p = data.p();
    Vec mu(p);
    std::vector<double> col;
    col.reserve(static_cast<std::size_t>(n) * (n - 1) / 2);
    for (int k = 0; k < p; ++k) {
        col.clear();
        for (int i = 0; i < n - 1; ++i)
            for (int j = i + 1; j < n; ++j) col.push_back(0.5 * (data.row(i)[k] + data.row(j)[k]));
        mu[k] = median_in_place(col);
    }
    return mu;
}

// Weiszfeld iteration with the Vardi-Zhang anchor step. `sweep(mu)` returns
// the step statistics over the target cloud of `count` points; `const0` is
// the mean norm of the uncentered cloud, making the reported objective the
// paper-style criterion mean(||q - mu|| - ||q||).
template <typename Sweep>
SolveSummary weiszfeld_solve(Sweep&& sweep, Vec mu, std::int64_t count, double const0,
                             const SolverConfig& cfg) {
    SolveSummary out;
    bool step_converged = false;
    for (;;) {
        const kernels::SweepStats s = sweep(mu);
        out.objective_trace.push_back(s.radius_sum / static_cast<double>(count) - const0);
        if (s.inv_r_sum == 0.0) {
            // Every point coincides with the iterate: global minimum.
            out.converged = true;
            break;
        }
        const double dir_norm = norm2(s.dir_sum);
        double shrink = 1.0;
        if (s.coincident > 0) {
            const double w = static_cast<double>(s.coincident);
            if (dir_norm <= w) {
                // Anchor optimality: the pull of the other points does not
                // exceed the multiplicity at the iterate.
                out.converged = true;
                break;
            }
            shrink = 1.0 - w / dir_norm;
        }
        if (step_converged) {
            out.converged = true;
            break;
        }
        if (out.iterations >= cfg.max_iter) break;

        Vec next = mu;
        axpy(shrink / s.inv_r_sum, s.dir_sum, next);
        const double step = dist(next, mu);
        if (step <= cfg.tol * std::max(1.0, norm2(next))) step_converged = true;
        mu = std::move(next);
        ++out.iterations;
    }
    out.estimate = std::move(mu);
    out.objective = out.objective_trace.back();
    return out;
}

}  // namespace

SolveSummary spatial_median_solve(const DataMatrix& data, const SolverConfig& cfg) {
    check_config(cfg);
    const int p = data.p();
    const Vec zero(p, 0.0);
    const double const0 =
        kernels::point_sweep(data, zero, 0.0).radius_sum / static_cast<double>(data.n());
    const double zero_radius = cfg.eta * std::max(1.0, max_row_norm(data));
    return weiszfeld_solve(
        [&](std::span<const double> mu) { return kernels::point_sweep(data, mu, zero_radius); },
        coordinatewise_median(data), data.n(), const0, cfg);
}

SolveSummary hl_solve(const DataMatrix& data, const SolverConfig& cfg) {
    check_config(cfg);
    const int p = data.p();
    const WalshStream stream(data);  // validates n >= 2
    const Vec zero(p, 0.0);
    const double const0 =
        kernels::pair_sweep(data, zero, 0.0).radius_sum / static_cast<double>(stream.count());
    const double zero_radius = cfg.eta * std::max(1.0, max_row_norm(data));
    return weiszfeld_solve(
        [&](std::span<const double> mu) { return kernels::pair_sweep(data, mu, zero_radius); },
        coordinatewise_walsh_median(data), stream.count(), const0, cfg);
}

LocationFit spatial_median(const DataMatrix& data, const SolverConfig& cfg) {
    SolveSummary s = spatial_median_solve(data, cfg);
    LocationFit fit;
    fit.cov_of_estimate = sandwich(ahat_median(data, s.estimate), bhat_median(data, s.estimate),
                                   1.0 / static_cast<double>(data.n()));
    fit.estimate = std::move(s.estimate);
    fit.iterations = s.iterations;
    fit.converged = s.converged;
    fit.objective = s.objective;
    return fit;
}

LocationFit hl_estimator(const DataMatrix& data, const SolverConfig& cfg, const BhatSpec& bhat) {
    SolveSummary s = hl_solve(data, cfg);
    LocationFit fit;
    fit.cov_of_estimate = sandwich(ahat_hl(data, s.estimate), bhat_hl(data, s.estimate, bhat),
                                   4.0 / static_cast<double>(data.n()));
    fit.estimate = std::move(s.estimate);
    fit.iterations = s.iterations;
    fit.converged = s.converged;
    fit.objective = s.objective;
    return fit;
}

SymMatrix ahat_median(const DataMatrix& data, std::span<const double> center) {
    return kernels::hessian_point_mean(data, center);
}

SymMatrix bhat_median(const DataMatrix& data, std::span<const double> center) {
    return kernels::outer_point_mean(data, center);
}

SymMatrix ahat_hl(const DataMatrix& data, std::span<const double> center) {
    return kernels::hessian_pair_mean(data, center);
}

SymMatrix bhat_hl(const DataMatrix& data, std::span<const double> center, const BhatSpec& spec) {
    const int n = data.n();
    if (n < 2) throw InvalidInput("bhat_hl: need n >= 2 observations");
    BhatMode mode = spec.mode;
    if (mode == BhatMode::automatic)
        mode = (n >= 3 && n <= 200) ? BhatMode::exact_triples : BhatMode::rank_based;
    switch (mode) {
        case BhatMode::exact_triples:
            return kernels::triples_outer_mean(data, center);
        case BhatMode::subsampled:
            return kernels::subsampled_outer_mean(data, center, spec.subsample, spec.seed);
        default:
            return kernels::score_outer_mean(kernels::rank_scores(data, center));
    }
}

SymMatrix sandwich(const SymMatrix& ahat, const SymMatrix& bhat, double factor) {
    try {
        SymMatrix c = congruence(inverse(ahat), bhat);
        c *= factor;
        return c;
    } catch (const NotPositiveDefinite&) {
        return SymMatrix(ahat.dim());
    }
}

}  // namespace spatsign
