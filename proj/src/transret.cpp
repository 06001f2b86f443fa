#include "spatsign/transret.hpp"

#include <algorithm>
#include <utility>

#include "spatsign/errors.hpp"
#include "spatsign/scatter.hpp"

namespace spatsign {

namespace {

struct ResolvedScatter {
    SymMatrix shape;
    bool converged = true;  // user-supplied shapes are trivially converged
};

ResolvedScatter resolve_scatter(const DataMatrix& data, const TrChoice& choice) {
    switch (choice.source) {
        case ScatterSource::tyler_at_hr: {
            const ScatterFit fit = hr_estimator(data, choice.scatter_tol, choice.scatter_max_iter);
            return {fit.shape, fit.converged};
        }
        case ScatterSource::rank_hr: {
            const ScatterFit fit =
                rank_hr_estimator(data, choice.scatter_tol, choice.scatter_max_iter);
            return {fit.shape, fit.converged};
        }
        case ScatterSource::user_supplied: {
            if (choice.user_shape.dim() != data.p())
                throw InvalidInput("user-supplied shape dimension does not match data");
            return {choice.user_shape, true};
        }
    }
    throw InvalidInput("unknown scatter source");
}

DataMatrix standardize(const DataMatrix& data, const SymMatrix& root_inv) {
    DataMatrix z(data.n(), data.p());
    for (int i = 0; i < data.n(); ++i) {
        const Vec w = sym_matvec(root_inv, data.row(i));
        std::copy(w.begin(), w.end(), z.row(i).begin());
    }
    return z;
}

// Shared retransformation: estimate through S^{1/2}, covariance through
// S^{1/2} (.) S^{1/2}.
LocationFit retransform(LocationFit fit, const SymMatrix& root, bool scatter_converged) {
    fit.estimate = sym_matvec(root, fit.estimate);
    fit.cov_of_estimate = congruence(root, fit.cov_of_estimate);
    fit.converged = fit.converged && scatter_converged;
    return fit;
}

}  // namespace

LocationFit tr_spatial_median(const DataMatrix& data, const TrChoice& choice,
                              const SolverConfig& cfg) {
    const ResolvedScatter sc = resolve_scatter(data, choice);
    const SymMatrix root_inv = inv_sqrt(sc.shape);  // throws NotPositiveDefinite when degenerate
    const DataMatrix z = standardize(data, root_inv);
    return retransform(spatial_median(z, cfg), sqrt_sym(sc.shape), sc.converged);
}

LocationFit tr_hl(const DataMatrix& data, const TrChoice& choice, const SolverConfig& cfg,
                  const BhatSpec& bhat) {
    const ResolvedScatter sc = resolve_scatter(data, choice);
    const SymMatrix root_inv = inv_sqrt(sc.shape);
    const DataMatrix z = standardize(data, root_inv);
    return retransform(hl_estimator(z, cfg, bhat), sqrt_sym(sc.shape), sc.converged);
}

LocationFit tr_spatial_median(const DataMatrix& data, const SolverConfig& cfg) {
    return tr_spatial_median(data, TrChoice{}, cfg);
}

LocationFit tr_hl(const DataMatrix& data, const SolverConfig& cfg, const BhatSpec& bhat) {
    TrChoice choice;
    choice.source = ScatterSource::rank_hr;
    return tr_hl(data, choice, cfg, bhat);
}

}  // namespace spatsign
