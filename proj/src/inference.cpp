#include "spatsign/inference.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "spatsign/errors.hpp"
#include "spatsign/kernels.hpp"

namespace spatsign {

namespace {

constexpr double kTiny = 1e-300;
constexpr double kSeriesEps = 1e-16;
constexpr int kMaxTerms = 500;

// Regularized lower incomplete gamma P(a, x) by its power series; requires
// x < a + 1 where the series converges fast.
double gamma_p_series(double a, double x) {
    double ap = a;
    double term = 1.0 / a;
    double sum = term;
    for (int i = 0; i < kMaxTerms; ++i) {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if (std::abs(term) < std::abs(sum) * kSeriesEps) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Regularized upper incomplete gamma Q(a, x) by the Lentz continued
// fraction; requires x >= a + 1.
double gamma_q_cf(double a, double x) {
    double b = x + 1.0 - a;
    double c = 1.0 / kTiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= kMaxTerms; ++i) {
        const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < kTiny) d = kTiny;
        c = b + an / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < kSeriesEps) break;
    }
    return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

double chi2_pdf(double x, int df) {
    const double a = 0.5 * df;
    if (x <= 0.0) return 0.0;
    return std::exp((a - 1.0) * std::log(x) - 0.5 * x - a * std::log(2.0) - std::lgamma(a));
}

// Regularized incomplete beta I_x(a, b) by the Lentz continued fraction with
// the symmetry switch at the convergence boundary.
double beta_inc(double a, double b, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double front =
        std::exp(std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) +
                 b * std::log1p(-x));
    if (x > (a + 1.0) / (a + b + 2.0)) return 1.0 - beta_inc(b, a, 1.0 - x);
    double c = 1.0;
    double d = 1.0 - (a + b) * x / (a + 1.0);
    if (std::abs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxTerms; ++m) {
        const double dm = static_cast<double>(m);
        double numer = dm * (b - dm) * x / ((a + 2.0 * dm - 1.0) * (a + 2.0 * dm));
        d = 1.0 + numer * d;
        if (std::abs(d) < kTiny) d = kTiny;
        d = 1.0 / d;
        c = 1.0 + numer / c;
        if (std::abs(c) < kTiny) c = kTiny;
        h *= d * c;
        numer = -(a + dm) * (a + b + dm) * x / ((a + 2.0 * dm) * (a + 2.0 * dm + 1.0));
        d = 1.0 + numer * d;
        if (std::abs(d) < kTiny) d = kTiny;
        d = 1.0 / d;
        c = 1.0 + numer / c;
        if (std::abs(c) < kTiny) c = kTiny;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < kSeriesEps) break;
    }
    return front * h / a;
}

void check_df(int df) {
    if (df < 1) throw InvalidInput("degrees of freedom must be at least 1");
}

TestResult chi2_result(double statistic, int df, std::string method) {
    TestResult r;
    r.statistic = statistic;
    r.df = df;
    r.p_value = 1.0 - chi2_cdf(statistic, df);
    r.method = std::move(method);
    return r;
}

// Shared studentization q' B^{-1} q with the degenerate-B error contract.
// An exactly zero q gives a zero form under any generalized inverse, so the
// statistic is 0 even when B is singular (symmetric fixtures).
double studentized(const SymMatrix& b, const Vec& q, const char* what) {
    if (std::all_of(q.begin(), q.end(), [](double v) { return v == 0.0; })) return 0.0;
    try {
        return quad_form(inverse(b), q);
    } catch (const NotPositiveDefinite&) {
        throw DegenerateCovariance(std::string(what) +
                                   " direction covariance is singular; the statistic is undefined");
    }
}

}  // namespace

double chi2_cdf(double x, int df) {
    check_df(df);
    if (!(x >= 0.0)) throw InvalidInput("chi-square argument must be nonnegative");
    if (x == 0.0) return 0.0;
    const double a = 0.5 * df;
    const double half = 0.5 * x;
    if (half < a + 1.0) return gamma_p_series(a, half);
    return 1.0 - gamma_q_cf(a, half);
}

double chi2_quantile(double q, int df) {
    check_df(df);
    if (!(q > 0.0) || !(q < 1.0)) throw InvalidInput("quantile level must lie in (0, 1)");
    double lo = 0.0;
    double hi = static_cast<double>(df);
    while (chi2_cdf(hi, df) < q) {
        lo = hi;
        hi *= 2.0;
        if (hi > 1e12) break;
    }
    double x = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
        const double f = chi2_cdf(x, df) - q;
        if (f > 0.0)
            hi = x;
        else
            lo = x;
        const double deriv = chi2_pdf(x, df);
        double next = deriv > 0.0 ? x - f / deriv : 0.5 * (lo + hi);
        if (!(next > lo) || !(next < hi)) next = 0.5 * (lo + hi);
        if (std::abs(next - x) <= 1e-14 * std::max(1.0, x)) return next;
        x = next;
    }
    return x;
}

double f_cdf(double x, int df1, int df2) {
    check_df(df1);
    check_df(df2);
    if (!(x >= 0.0)) throw InvalidInput("F argument must be nonnegative");
    const double d1 = static_cast<double>(df1), d2 = static_cast<double>(df2);
    return beta_inc(0.5 * d1, 0.5 * d2, d1 * x / (d1 * x + d2));
}

Vec signed_rank_statistic(const DataMatrix& data) {
    const Vec origin(data.p());
    const auto stats = kernels::pair_direction_stats(data, origin);
    Vec q = stats.u_sum;
    const WalshStream walsh(data);
    scale(q, 1.0 / static_cast<double>(walsh.count()));
    return q;
}

TestResult signed_rank_test(const DataMatrix& data, const BhatSpec& bhat) {
    const Vec q = signed_rank_statistic(data);
    const Vec origin(data.p());
    const SymMatrix b = bhat_hl(data, origin, bhat);
    const double stat =
        0.25 * static_cast<double>(data.n()) * studentized(b, q, "pairwise");
    return chi2_result(stat, data.p(), "signed-rank");
}

TestResult sign_test(const DataMatrix& data) {
    const Vec origin(data.p());
    const auto sweep = kernels::point_sweep(data, origin, 0.0);
    Vec qbar = sweep.dir_sum;
    scale(qbar, 1.0 / static_cast<double>(data.n()));
    const SymMatrix b = bhat_median(data, origin);
    const double stat = static_cast<double>(data.n()) * studentized(b, qbar, "sign");
    return chi2_result(stat, data.p(), "sign");
}

TestResult hotelling_t2(const DataMatrix& data) {
    const int n = data.n(), p = data.p();
    if (n <= p)
        throw Underdetermined("Hotelling T^2 needs n > p: n=" + std::to_string(n) +
                              ", p=" + std::to_string(p));
    Vec mean(p);
    for (int i = 0; i < n; ++i) axpy(1.0, data.row(i), mean);
    scale(mean, 1.0 / static_cast<double>(n));
    SymMatrix cov(p);
    Vec dev(p);
    for (int i = 0; i < n; ++i) {
        const auto y = data.row(i);
        for (int j = 0; j < p; ++j) dev[static_cast<std::size_t>(j)] = y[j] - mean[static_cast<std::size_t>(j)];
        for (int a = 0; a < p; ++a)
            for (int bcol = a; bcol < p; ++bcol)
                cov.add(a, bcol, dev[static_cast<std::size_t>(a)] * dev[static_cast<std::size_t>(bcol)]);
    }
    cov *= 1.0 / static_cast<double>(n - 1);
    const double t2 = static_cast<double>(n) * studentized(cov, mean, "sample");
    TestResult r;
    r.statistic = t2;
    r.df = p;
    r.method = "hotelling";
    const double fstat =
        t2 * static_cast<double>(n - p) / (static_cast<double>(p) * static_cast<double>(n - 1));
    r.p_value = 1.0 - f_cdf(fstat, p, n - p);
    return r;
}

Ellipsoid confidence_ellipsoid(const LocationFit& fit, double level) {
    if (!(level > 0.0) || !(level < 1.0))
        throw InvalidInput("confidence level must lie in (0, 1)");
    const int p = fit.cov_of_estimate.dim();
    if (p == 0 || static_cast<std::size_t>(p) != fit.estimate.size())
        throw InvalidInput("fit does not carry a covariance of matching dimension");
    try {
        (void)inv_sqrt(fit.cov_of_estimate);
    } catch (const NotPositiveDefinite&) {
        throw DegenerateCovariance("estimate covariance is singular; no ellipsoid exists");
    }
    Ellipsoid e;
    e.center = fit.estimate;
    e.shape = fit.cov_of_estimate;
    e.radius2 = chi2_quantile(level, p);
    return e;
}

}  // namespace spatsign
