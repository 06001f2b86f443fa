#include "spatsign/matalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "spatsign/errors.hpp"

namespace spatsign {

namespace {

constexpr double kSpdFloorRel = 1e-12;   // relative to largest eigenvalue
constexpr double kJacobiTolRel = 1e-12;  // off-diagonal Frobenius vs ||m||_F
constexpr int kJacobiMaxSweeps = 100;

double offdiag_frobenius(const SymMatrix& m) {
    double s = 0.0;
    for (int i = 0; i < m.dim(); ++i)
        for (int j = i + 1; j < m.dim(); ++j) s += 2.0 * m(i, j) * m(i, j);
    return std::sqrt(s);
}

void check_finite(const SymMatrix& m) {
    for (int i = 0; i < m.dim(); ++i)
        for (int j = i; j < m.dim(); ++j)
            if (!std::isfinite(m(i, j))) throw InvalidInput("matrix has non-finite entries");
}

// Rebuilds V f(lambda) V' as an exactly symmetric matrix.
SymMatrix assemble(const EigenDecomposition& ed, const Vec& f) {
    const int p = ed.vectors.rows();
    SymMatrix r(p);
    for (int i = 0; i < p; ++i)
        for (int j = i; j < p; ++j) {
            double s = 0.0;
            for (int k = 0; k < p; ++k) s += f[k] * ed.vectors(i, k) * ed.vectors(j, k);
            r.set(i, j, s);
        }
    return r;
}

double spd_floor(const Vec& eigenvalues) {
    double lmax = 0.0;
    for (double v : eigenvalues) lmax = std::max(lmax, std::abs(v));
    return kSpdFloorRel * lmax;
}

void require_spd(const Vec& eigenvalues, const char* op) {
    if (eigenvalues.empty()) return;
    const double floor = spd_floor(eigenvalues);
    const double lmin = *std::min_element(eigenvalues.begin(), eigenvalues.end());
    if (lmin < floor || lmin <= 0.0)
        throw NotPositiveDefinite(std::string(op) + ": smallest eigenvalue " + std::to_string(lmin) +
                                  " below SPD floor " + std::to_string(floor));
}

}  // namespace

SymMatrix::SymMatrix(int dim) : dim_(dim), a_(static_cast<std::size_t>(dim) * dim, 0.0) {
    if (dim <= 0) throw InvalidInput("SymMatrix dimension must be positive");
}

SymMatrix SymMatrix::identity(int dim) {
    SymMatrix m(dim);
    for (int i = 0; i < dim; ++i) m.set(i, i, 1.0);
    return m;
}

SymMatrix SymMatrix::diagonal(std::span<const double> d) {
    SymMatrix m(static_cast<int>(d.size()));
    for (int i = 0; i < m.dim(); ++i) m.set(i, i, d[i]);
    return m;
}

SymMatrix SymMatrix::from_full(const Matrix& m) {
    if (m.rows() != m.cols()) throw InvalidInput("SymMatrix::from_full: matrix is not square");
    SymMatrix r(m.rows());
    for (int i = 0; i < m.rows(); ++i)
        for (int j = i; j < m.cols(); ++j) {
            if (m(i, j) != m(j, i)) throw InvalidInput("SymMatrix::from_full: matrix is not symmetric");
            if (!std::isfinite(m(i, j))) throw InvalidInput("SymMatrix::from_full: non-finite entry");
            r.set(i, j, m(i, j));
        }
    return r;
}

double SymMatrix::trace() const {
    double s = 0.0;
    for (int i = 0; i < dim_; ++i) s += (*this)(i, i);
    return s;
}

double SymMatrix::frobenius() const {
    double s = 0.0;
    for (double v : a_) s += v * v;
    return std::sqrt(s);
}

Matrix SymMatrix::to_matrix() const {
    Matrix m(dim_, dim_);
    for (int i = 0; i < dim_; ++i)
        for (int j = 0; j < dim_; ++j) m(i, j) = (*this)(i, j);
    return m;
}

SymMatrix& SymMatrix::operator+=(const SymMatrix& other) {
    if (other.dim_ != dim_) throw InvalidInput("SymMatrix::operator+=: dimension mismatch");
    for (std::size_t k = 0; k < a_.size(); ++k) a_[k] += other.a_[k];
    return *this;
}

SymMatrix& SymMatrix::operator*=(double alpha) {
    for (double& v : a_) v *= alpha;
    return *this;
}

EigenDecomposition sym_eigen(const SymMatrix& m) {
    check_finite(m);
    const int p = m.dim();
    SymMatrix a = m;
    Matrix v = Matrix::identity(p);
    const double tol = kJacobiTolRel * m.frobenius();

    for (int sweep = 0; sweep < kJacobiMaxSweeps; ++sweep) {
        if (offdiag_frobenius(a) <= tol) break;
        for (int i = 0; i < p - 1; ++i) {
            for (int j = i + 1; j < p; ++j) {
                const double apq = a(i, j);
                if (apq == 0.0) continue;
                const double app = a(i, i);
                const double aqq = a(j, j);
                // Classic stable rotation: t = sign(theta)/(|theta| + sqrt(theta^2+1))
                const double theta = (aqq - app) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;

                for (int k = 0; k < p; ++k) {
                    if (k == i || k == j) continue;
                    const double aki = a(k, i);
                    const double akj = a(k, j);
                    a.set(k, i, c * aki - s * akj);
                    a.set(k, j, s * aki + c * akj);
                }
                a.set(i, i, app - t * apq);
                a.set(j, j, aqq + t * apq);
                a.set(i, j, 0.0);

                for (int k = 0; k < p; ++k) {
                    const double vki = v(k, i);
                    const double vkj = v(k, j);
                    v(k, i) = c * vki - s * vkj;
                    v(k, j) = s * vki + c * vkj;
                }
            }
        }
    }

    EigenDecomposition ed;
    ed.values.resize(p);
    for (int i = 0; i < p; ++i) ed.values[i] = a(i, i);

    std::vector<int> order(p);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int x, int y) { return ed.values[x] > ed.values[y]; });

    EigenDecomposition sorted;
    sorted.values.resize(p);
    sorted.vectors = Matrix(p, p);
    for (int k = 0; k < p; ++k) {
        sorted.values[k] = ed.values[order[k]];
        for (int i = 0; i < p; ++i) sorted.vectors(i, k) = v(i, order[k]);
    }
    return sorted;
}

SymMatrix sqrt_sym(const SymMatrix& m) {
    const EigenDecomposition ed = sym_eigen(m);
    require_spd(ed.values, "sqrt_sym");
    Vec f(ed.values.size());
    for (std::size_t k = 0; k < f.size(); ++k) f[k] = std::sqrt(ed.values[k]);
    return assemble(ed, f);
}

SymMatrix inv_sqrt(const SymMatrix& m) {
    const EigenDecomposition ed = sym_eigen(m);
    require_spd(ed.values, "inv_sqrt");
    Vec f(ed.values.size());
    for (std::size_t k = 0; k < f.size(); ++k) f[k] = 1.0 / std::sqrt(ed.values[k]);
    return assemble(ed, f);
}

SymMatrix inverse(const SymMatrix& m) {
    const EigenDecomposition ed = sym_eigen(m);
    require_spd(ed.values, "inverse");
    Vec f(ed.values.size());
    for (std::size_t k = 0; k < f.size(); ++k) f[k] = 1.0 / ed.values[k];
    return assemble(ed, f);
}

double quad_form(const SymMatrix& m, std::span<const double> v) {
    if (static_cast<int>(v.size()) != m.dim()) throw InvalidInput("quad_form: dimension mismatch");
    double s = 0.0;
    for (int i = 0; i < m.dim(); ++i) s += v[i] * dot(m.row(i), v);
    return s;
}

Vec sym_matvec(const SymMatrix& m, std::span<const double> x) {
    if (static_cast<int>(x.size()) != m.dim()) throw InvalidInput("sym_matvec: dimension mismatch");
    Vec y(m.dim());
    for (int i = 0; i < m.dim(); ++i) y[i] = dot(m.row(i), x);
    return y;
}

SymMatrix congruence(const SymMatrix& a, const SymMatrix& b) {
    if (a.dim() != b.dim()) throw InvalidInput("congruence: dimension mismatch");
    const int p = a.dim();
    Matrix ab = matmul(a.to_matrix(), b.to_matrix());
    SymMatrix r(p);
    for (int i = 0; i < p; ++i)
        for (int j = i; j < p; ++j) {
            double s = 0.0;
            for (int k = 0; k < p; ++k) s += ab(i, k) * a(k, j);
            r.set(i, j, s);
        }
    return r;
}

double frobenius_distance(const SymMatrix& a, const SymMatrix& b) {
    if (a.dim() != b.dim()) throw InvalidInput("frobenius_distance: dimension mismatch");
    double s = 0.0;
    for (int i = 0; i < a.dim(); ++i)
        for (int j = 0; j < a.dim(); ++j) {
            const double d = a(i, j) - b(i, j);
            s += d * d;
        }
    return std::sqrt(s);
}

}  // namespace spatsign
