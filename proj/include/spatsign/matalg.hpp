#pragma once

#include <span>
#include <vector>

#include "spatsign/vec.hpp"

namespace spatsign {

// Symmetric p x p matrix. Symmetry is an invariant of the representation:
// writes go through set(), which assigns both (i,j) and (j,i).
class SymMatrix {
public:
    SymMatrix() : dim_(0) {}
    explicit SymMatrix(int dim);

    static SymMatrix identity(int dim);
    static SymMatrix diagonal(std::span<const double> d);
    // Validates exact symmetry and finiteness; throws InvalidInput otherwise.
    static SymMatrix from_full(const Matrix& m);

    int dim() const { return dim_; }

    double operator()(int i, int j) const { return a_[static_cast<std::size_t>(i) * dim_ + j]; }
    void set(int i, int j, double v) {
        a_[static_cast<std::size_t>(i) * dim_ + j] = v;
        a_[static_cast<std::size_t>(j) * dim_ + i] = v;
    }
    void add(int i, int j, double v) { set(i, j, (*this)(i, j) + v); }

    std::span<const double> row(int i) const {
        return {a_.data() + static_cast<std::size_t>(i) * dim_, static_cast<std::size_t>(dim_)};
    }

    double trace() const;
    double frobenius() const;
    Matrix to_matrix() const;

    SymMatrix& operator+=(const SymMatrix& other);
    SymMatrix& operator*=(double alpha);

private:
    int dim_;
    std::vector<double> a_;
};

struct EigenDecomposition {
    Vec values;      // descending
    Matrix vectors;  // orthonormal columns, vectors(:,k) pairs with values[k]
};

// Cyclic Jacobi eigendecomposition for symmetric input. Converges when the
// off-diagonal Frobenius norm drops below 1e-12 * ||m||_F, at most 100 sweeps.
EigenDecomposition sym_eigen(const SymMatrix& m);

// Unique symmetric SPD square root and its inverse. Eigenvalues below the
// relative floor 1e-12 * lambda_max raise NotPositiveDefinite.
SymMatrix sqrt_sym(const SymMatrix& m);
SymMatrix inv_sqrt(const SymMatrix& m);
SymMatrix inverse(const SymMatrix& m);

// v' m v; dimension mismatch raises InvalidInput.
double quad_form(const SymMatrix& m, std::span<const double> v);

// m x for symmetric m.
Vec sym_matvec(const SymMatrix& m, std::span<const double> x);

// a b a' as a symmetric matrix (used for congruence transforms S^{1/2} C S^{1/2}).
SymMatrix congruence(const SymMatrix& a, const SymMatrix& b);

double frobenius_distance(const SymMatrix& a, const SymMatrix& b);

}  // namespace spatsign
