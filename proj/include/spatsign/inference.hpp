#pragma once

#include <string>

#include "spatsign/data.hpp"
#include "spatsign/location.hpp"
#include "spatsign/matalg.hpp"
#include "spatsign/vec.hpp"

namespace spatsign {

struct TestResult {
    double statistic = 0.0;
    int df = 0;
    double p_value = 1.0;
    std::string method;
};

// {x : (x - center)' shape^{-1} (x - center) <= radius2}.
struct Ellipsoid {
    Vec center;
    SymMatrix shape;
    double radius2 = 0.0;
};

// Regularized lower incomplete gamma evaluated as a chi-square CDF: series
// for x < df + 1, Lentz continued fraction otherwise. x >= 0, df >= 1.
double chi2_cdf(double x, int df);
// Inverse of chi2_cdf in x for q in (0, 1); Newton refined, bisection safe.
double chi2_quantile(double q, int df);
// F distribution CDF through the regularized incomplete beta function.
double f_cdf(double x, int df1, int df2);

// Average direction of the pairwise means about the origin,
// C(n,2)^{-1} sum_{i<j} u((y_i + y_j)/2); the negated gradient of the
// pairwise criterion at 0 wherever that gradient exists. Norm <= 1.
Vec signed_rank_statistic(const DataMatrix& data);

// (n/4) q' B^{-1} q against chi-square with p degrees of freedom; B is the
// pairwise direction outer-product mean about the null center 0.
TestResult signed_rank_test(const DataMatrix& data, const BhatSpec& bhat = {});

// n qbar' B^{-1} qbar with qbar the average observation direction and B the
// direction outer-product mean, both about 0; chi-square with p df.
TestResult sign_test(const DataMatrix& data);

// n ybar' S^{-1} ybar with the (n-1)-divisor sample covariance; p-value from
// the exact F(p, n - p) calibration.
TestResult hotelling_t2(const DataMatrix& data);

// Center and shape from the fit, squared radius from the chi-square quantile
// at `level` with p degrees of freedom.
Ellipsoid confidence_ellipsoid(const LocationFit& fit, double level);

}  // namespace spatsign
