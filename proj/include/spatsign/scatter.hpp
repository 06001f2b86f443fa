#pragma once

#include <span>

#include "spatsign/data.hpp"
#include "spatsign/matalg.hpp"
#include "spatsign/vec.hpp"

namespace spatsign {

// Simultaneous location/shape fit; shape is trace-p normalized.
struct ScatterFit {
    Vec location;
    SymMatrix shape;
    int iterations = 0;
    bool converged = false;
};

struct TylerDiagnostics {
    int iterations = 0;
    bool converged = false;
    int dropped_rows = 0;   // rows equal to the center, excluded from sign averages
    double residual = 0.0;  // ||p * mean(u u') - I||_F in standardized coordinates
};

// Fixed point of p * mean(u(e) u(e)') = I for e = S^{-1/2}(y - center),
// normalized to trace p. Scale-free in the data radii.
SymMatrix tyler_shape(const DataMatrix& data, std::span<const double> center, double tol = 1e-9,
                      int max_iter = 1000, TylerDiagnostics* diag = nullptr);

// Simultaneous roots of mean u(e) = 0 and p * mean(u(e) u(e)') = I, iterated
// as alternating Weiszfeld and Tyler steps on shared residuals.
ScatterFit hr_estimator(const DataMatrix& data, double tol = 1e-9, int max_iter = 1000);

// Signed-rank analogue: mean q(e_i) = 0 and mean q(e_i) q(e_i)' proportional
// to I, the proportionality fixed by trace matching.
ScatterFit rank_hr_estimator(const DataMatrix& data, double tol = 1e-9, int max_iter = 1000);

}  // namespace spatsign
