#include "spatsign/scatter.hpp"

#include <algorithm>
#include <string>

#include "spatsign/errors.hpp"
#include "spatsign/kernels.hpp"
#include "spatsign/signs.hpp"

namespace spatsign {

namespace {

void check_iteration_args(double tol, int max_iter) {
    if (!(tol > 0.0)) throw InvalidInput("tolerance must be positive");
    if (max_iter < 1) throw InvalidInput("max_iter must be at least 1");
}

Vec coordinate_median(const DataMatrix& data) {
    const int n = data.n(), p = data.p();
    Vec out(p), col(n);
    for (int j = 0; j < p; ++j) {
        for (int i = 0; i < n; ++i) col[static_cast<std::size_t>(i)] = data.row(i)[j];
        const auto m = col.begin() + n / 2;
        std::nth_element(col.begin(), m, col.end());
        double v = *m;
        if (n % 2 == 0) v = 0.5 * (v + *std::max_element(col.begin(), m));
        out[static_cast<std::size_t>(j)] = v;
    }
    return out;
}

// Residuals e_i = R (y_i - mu) for symmetric R, materialized row-major.
DataMatrix standardized_residuals(const DataMatrix& data, const Vec& mu, const SymMatrix& r) {
    const int n = data.n(), p = data.p();
    DataMatrix e(n, p);
    Vec v(p);
    for (int i = 0; i < n; ++i) {
        const auto y = data.row(i);
        for (int j = 0; j < p; ++j) v[static_cast<std::size_t>(j)] = y[j] - mu[static_cast<std::size_t>(j)];
        const Vec w = sym_matvec(r, v);
        std::copy(w.begin(), w.end(), e.row(i).begin());
    }
    return e;
}

// p * mean over nonzero residuals of u(e) u(e)'. Zero residuals are dropped
// from the denominator so the fixed point keeps trace p.
SymMatrix sign_shape_matrix(const DataMatrix& e, int* dropped) {
    const int n = e.n(), p = e.p();
    SymMatrix m(p);
    Vec u(p);
    int kept = 0;
    for (int i = 0; i < n; ++i) {
        if (spatial_sign_into(e.row(i), u) == 0.0) continue;
        ++kept;
        for (int a = 0; a < p; ++a)
            for (int b = a; b < p; ++b) m.add(a, b, u[static_cast<std::size_t>(a)] * u[static_cast<std::size_t>(b)]);
    }
    if (dropped != nullptr) *dropped = n - kept;
    if (kept > 0) m *= static_cast<double>(p) / static_cast<double>(kept);
    return m;
}

double identity_residual(const SymMatrix& m) {
    SymMatrix d = m;
    for (int j = 0; j < d.dim(); ++j) d.add(j, j, -1.0);
    return d.frobenius();
}

void renormalize_trace(SymMatrix& s) {
    const double tr = s.trace();
    if (!(tr > 0.0)) throw NotPositiveDefinite("shape update lost positive trace");
    s *= static_cast<double>(s.dim()) / tr;
}

}  // namespace

SymMatrix tyler_shape(const DataMatrix& data, std::span<const double> center, double tol,
                      int max_iter, TylerDiagnostics* diag) {
    check_iteration_args(tol, max_iter);
    const int n = data.n(), p = data.p();
    if (static_cast<int>(center.size()) != p)
        throw InvalidInput("center dimension does not match data");
    if (n <= p)
        throw Underdetermined("Tyler shape needs more observations than dimensions: n=" +
                              std::to_string(n) + ", p=" + std::to_string(p));
    const Vec mu(center.begin(), center.end());

    SymMatrix s = SymMatrix::identity(p);
    int iterations = 0;
    bool converged = false;
    int dropped = 0;
    double residual = 0.0;
    for (;;) {
        const SymMatrix r = inv_sqrt(s);
        const DataMatrix e = standardized_residuals(data, mu, r);
        const SymMatrix m = sign_shape_matrix(e, &dropped);
        if (n - dropped <= p)
            throw Underdetermined("too few observations distinct from the center: " +
                                  std::to_string(n - dropped) + " of " + std::to_string(n));
        residual = identity_residual(m);
        if (residual <= tol) {
            converged = true;
            break;
        }
        if (iterations >= max_iter) break;
        s = congruence(sqrt_sym(s), m);
        renormalize_trace(s);
        ++iterations;
    }
    if (diag != nullptr) {
        diag->iterations = iterations;
        diag->converged = converged;
        diag->dropped_rows = dropped;
        diag->residual = residual;
    }
    return s;
}

ScatterFit hr_estimator(const DataMatrix& data, double tol, int max_iter) {
    check_iteration_args(tol, max_iter);
    const int n = data.n(), p = data.p();
    if (n <= p)
        throw Underdetermined("simultaneous location/shape fit needs n > p: n=" +
                              std::to_string(n) + ", p=" + std::to_string(p));

    ScatterFit fit;
    fit.location = coordinate_median(data);
    fit.shape = SymMatrix::identity(p);
    const Vec origin(p);
    Vec nu(p);
    for (;;) {
        const SymMatrix r = inv_sqrt(fit.shape);
        const DataMatrix e = standardized_residuals(data, fit.location, r);
        const auto sweep = kernels::point_sweep(e, origin, 0.0);
        const double kept = static_cast<double>(n - sweep.coincident);
        if (kept <= static_cast<double>(p))
            throw Underdetermined("too few observations distinct from the location estimate");
        int dropped = 0;
        const SymMatrix m = sign_shape_matrix(e, &dropped);
        const double r1 = norm2(sweep.dir_sum) / kept;
        const double r2 = identity_residual(m);
        if (r1 <= tol && r2 <= tol) {
            fit.converged = true;
            break;
        }
        if (fit.iterations >= max_iter) break;
        // One Weiszfeld step for the standardized cloud, pulled back through S^{1/2}.
        const SymMatrix half = sqrt_sym(fit.shape);
        for (std::size_t j = 0; j < nu.size(); ++j) nu[j] = sweep.dir_sum[j] / sweep.inv_r_sum;
        const Vec step = sym_matvec(half, nu);
        for (std::size_t j = 0; j < step.size(); ++j) fit.location[j] += step[j];
        fit.shape = congruence(half, m);
        renormalize_trace(fit.shape);
        ++fit.iterations;
    }
    return fit;
}

ScatterFit rank_hr_estimator(const DataMatrix& data, double tol, int max_iter) {
    check_iteration_args(tol, max_iter);
    const int n = data.n(), p = data.p();
    if (n <= p)
        throw Underdetermined("simultaneous location/shape fit needs n > p: n=" +
                              std::to_string(n) + ", p=" + std::to_string(p));

    ScatterFit fit;
    fit.location = coordinate_median(data);
    fit.shape = SymMatrix::identity(p);
    const Vec origin(p);
    Vec nu(p), qbar(p);
    for (;;) {
        const SymMatrix r = inv_sqrt(fit.shape);
        const DataMatrix e = standardized_residuals(data, fit.location, r);
        const Matrix scores = kernels::rank_scores(e, origin);
        std::fill(qbar.begin(), qbar.end(), 0.0);
        for (int i = 0; i < n; ++i) axpy(1.0, scores.row(i), qbar);
        scale(qbar, 1.0 / static_cast<double>(n));
        SymMatrix m = kernels::score_outer_mean(scores);
        const double tr = m.trace();
        if (!(tr > 0.0)) break;  // all scores vanished; report non-convergence
        // The rank equations only pin the shape up to scale; match traces.
        m *= static_cast<double>(p) / tr;
        const double r1 = norm2(qbar);
        const double r2 = identity_residual(m);
        if (r1 <= tol && r2 <= tol) {
            fit.converged = true;
            break;
        }
        if (fit.iterations >= max_iter) break;
        // Weiszfeld step at the origin for the multiset of pairwise averages
        // (i < j, weight 2) joined with the points themselves (weight 1); its
        // direction sum equals the ordered-pair sum of u((e_i + e_j)/2).
        const auto points = kernels::point_sweep(e, origin, 0.0);
        const auto pairs = kernels::pair_direction_stats(e, origin);
        const double den = points.inv_r_sum + 2.0 * pairs.inv_r_sum;
        if (!(den > 0.0)) break;
        for (std::size_t j = 0; j < nu.size(); ++j)
            nu[j] = (points.dir_sum[j] + 2.0 * pairs.u_sum[j]) / den;
        const SymMatrix half = sqrt_sym(fit.shape);
        const Vec step = sym_matvec(half, nu);
        for (std::size_t j = 0; j < step.size(); ++j) fit.location[j] += step[j];
        fit.shape = congruence(half, m);
        renormalize_trace(fit.shape);
        ++fit.iterations;
    }
    return fit;
}

}  // namespace spatsign
