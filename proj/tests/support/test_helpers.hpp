#pragma once

#include <random>

#include "spatsign/data.hpp"
#include "spatsign/matalg.hpp"
#include "spatsign/vec.hpp"

// Seeded random generators shared by the test suites. Everything here takes an
// explicit engine so each TEST_CASE pins its own seed.
namespace testsupport {

using spatsign::DataMatrix;
using spatsign::Matrix;
using spatsign::SymMatrix;
using spatsign::Vec;

inline Matrix gaussian_matrix(int rows, int cols, std::mt19937_64& rng) {
    std::normal_distribution<double> nd;
    Matrix m(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) m(i, j) = nd(rng);
    return m;
}

inline Vec gaussian_vec(int p, std::mt19937_64& rng) {
    std::normal_distribution<double> nd;
    Vec v(p);
    for (double& x : v) x = nd(rng);
    return v;
}

inline DataMatrix gaussian_data(int n, int p, std::mt19937_64& rng) {
    DataMatrix d(n, p);
    std::normal_distribution<double> nd;
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < p; ++k) d.row(i)[k] = nd(rng);
    return d;
}

// G'G + ridge*I for Gaussian G: SPD with probability one.
inline SymMatrix random_spd(int p, std::mt19937_64& rng, double ridge = 0.5) {
    Matrix g = gaussian_matrix(p, p, rng);
    SymMatrix m(p);
    for (int i = 0; i < p; ++i)
        for (int j = i; j < p; ++j) {
            double s = 0.0;
            for (int k = 0; k < p; ++k) s += g(k, i) * g(k, j);
            m.set(i, j, s + (i == j ? ridge : 0.0));
        }
    return m;
}

// Gram-Schmidt on a Gaussian matrix; redraws on near-dependence.
inline Matrix random_orthogonal(int p, std::mt19937_64& rng) {
    for (;;) {
        Matrix g = gaussian_matrix(p, p, rng);
        Matrix q(p, p);
        bool ok = true;
        for (int c = 0; c < p && ok; ++c) {
            Vec v(p);
            for (int i = 0; i < p; ++i) v[i] = g(i, c);
            for (int prev = 0; prev < c; ++prev) {
                double proj = 0.0;
                for (int i = 0; i < p; ++i) proj += q(i, prev) * v[i];
                for (int i = 0; i < p; ++i) v[i] -= proj * q(i, prev);
            }
            const double nrm = spatsign::norm2(v);
            if (nrm < 1e-6) {
                ok = false;
                break;
            }
            for (int i = 0; i < p; ++i) q(i, c) = v[i] / nrm;
        }
        if (ok) return q;
    }
}

// O1 * diag(s) * O2 with s in [0.5, 2]: nonsingular with condition <= 4.
inline Matrix random_nonsingular(int p, std::mt19937_64& rng) {
    Matrix o1 = random_orthogonal(p, rng);
    Matrix o2 = random_orthogonal(p, rng);
    std::uniform_real_distribution<double> ud(0.5, 2.0);
    for (int j = 0; j < p; ++j) {
        const double s = ud(rng);
        for (int i = 0; i < p; ++i) o1(i, j) *= s;
    }
    return spatsign::matmul(o1, o2);
}

// Rows b*y_i + a.
inline DataMatrix transform_rows(const DataMatrix& d, const Matrix& b, const Vec& a) {
    DataMatrix out(d.n(), b.rows());
    for (int i = 0; i < d.n(); ++i) {
        Vec y = spatsign::matvec(b, d.row(i));
        for (int k = 0; k < b.rows(); ++k) out.row(i)[k] = y[k] + a[k];
    }
    return out;
}

inline double max_abs_entry_diff(const SymMatrix& a, const SymMatrix& b) {
    double m = 0.0;
    for (int i = 0; i < a.dim(); ++i)
        for (int j = 0; j < a.dim(); ++j) m = std::max(m, std::abs(a(i, j) - b(i, j)));
    return m;
}

inline double max_abs_diff(std::span<const double> a, std::span<const double> b) {
    double m = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a[k] - b[k]));
    return m;
}

inline double identity_departure(const Matrix& q) {
    // max |(Q'Q - I)_{ij}|
    double m = 0.0;
    for (int i = 0; i < q.cols(); ++i)
        for (int j = 0; j < q.cols(); ++j) {
            double s = 0.0;
            for (int k = 0; k < q.rows(); ++k) s += q(k, i) * q(k, j);
            m = std::max(m, std::abs(s - (i == j ? 1.0 : 0.0)));
        }
    return m;
}

}  // namespace testsupport
