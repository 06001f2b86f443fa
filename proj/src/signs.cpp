#include "spatsign/signs.hpp"

#include <cstddef>

#include "spatsign/errors.hpp"

namespace spatsign {

double spatial_sign_into(std::span<const double> y, std::span<double> out) {
    const double r = norm2(y);
    if (r == 0.0) {
        for (double& v : out) v = 0.0;
        return 0.0;
    }
    const double inv = 1.0 / r;
    for (std::size_t k = 0; k < y.size(); ++k) out[k] = y[k] * inv;
    return r;
}

Vec spatial_sign(std::span<const double> y) {
    Vec u(y.size());
    spatial_sign_into(y, u);
    return u;
}

SymMatrix sign_hessian(std::span<const double> y) {
    const int p = static_cast<int>(y.size());
    SymMatrix a(p);
    const double r = norm2(y);
    if (r == 0.0) return a;
    const double inv_r = 1.0 / r;
    const double inv_r3 = inv_r / (r * r);
    for (int i = 0; i < p; ++i) {
        a.set(i, i, inv_r - y[i] * y[i] * inv_r3);
        for (int j = i + 1; j < p; ++j) a.set(i, j, -y[i] * y[j] * inv_r3);
    }
    return a;
}

SymMatrix sign_outer(std::span<const double> y) {
    const int p = static_cast<int>(y.size());
    SymMatrix b(p);
    Vec u(p);
    if (spatial_sign_into(y, u) == 0.0) return b;
    for (int i = 0; i < p; ++i)
        for (int j = i; j < p; ++j) b.set(i, j, u[i] * u[j]);
    return b;
}

Vec signed_rank_fn(const DataMatrix& data, std::span<const double> e) {
    if (static_cast<int>(e.size()) != data.p())
        throw InvalidInput("signed_rank_fn: point dimension does not match data");
    const int n = data.n();
    const int p = data.p();
    Vec q(p, 0.0);
    Vec z(p);
    Vec u(p);
    for (int i = 0; i < n; ++i) {
        const auto yi = data.row(i);
        for (int k = 0; k < p; ++k) z[k] = 0.5 * (yi[k] + e[k]);
        spatial_sign_into(z, u);
        axpy(1.0, u, q);
    }
    scale(q, 1.0 / static_cast<double>(n));
    return q;
}

}  // namespace spatsign
