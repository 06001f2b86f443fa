#include "spatsign/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <unordered_set>
#include <utility>

#include "spatsign/errors.hpp"
#include "spatsign/signs.hpp"

namespace spatsign::kernels {

namespace {

struct Range {
    std::int64_t lo;
    std::int64_t hi;
};

// Chunk layout depends only on the range length, never on thread count.
Range chunk_range(std::int64_t total, int chunks, int c) {
    return {total * c / chunks, total * (c + 1) / chunks};
}

}  // namespace

int chunk_count(std::int64_t total) {
    if (total <= kMinChunk) return 1;
    const std::int64_t k = (total + kMinChunk - 1) / kMinChunk;
    return static_cast<int>(std::min<std::int64_t>(k, kMaxChunks));
}

SweepStats point_sweep(const DataMatrix& data, std::span<const double> mu, double zero_radius) {
    const int n = data.n();
    const int p = data.p();
    const int chunks = chunk_count(n);
    std::vector<SweepStats> parts(chunks);

#pragma omp parallel for schedule(static)
    for (int c = 0; c < chunks; ++c) {
        SweepStats s;
        s.dir_sum.assign(p, 0.0);
        Vec v(p);
        const Range r = chunk_range(n, chunks, c);
        for (std::int64_t t = r.lo; t < r.hi; ++t) {
            const auto y = data.row(static_cast<int>(t));
            double rr = 0.0;
            for (int k = 0; k < p; ++k) {
                v[k] = y[k] - mu[k];
                rr += v[k] * v[k];
            }
            const double rad = std::sqrt(rr);
            if (rad <= zero_radius) {
                ++s.coincident;
                continue;
            }
            const double inv = 1.0 / rad;
            for (int k = 0; k < p; ++k) s.dir_sum[k] += v[k] * inv;
            s.inv_r_sum += inv;
            s.radius_sum += rad;
        }
        parts[c] = std::move(s);
    }

    SweepStats out;
    out.dir_sum.assign(p, 0.0);
    for (const SweepStats& s : parts) {
        axpy(1.0, s.dir_sum, out.dir_sum);
        out.inv_r_sum += s.inv_r_sum;
        out.radius_sum += s.radius_sum;
        out.coincident += s.coincident;
    }
    return out;
}

SweepStats point_sweep_ref(const DataMatrix& data, std::span<const double> mu, double zero_radius) {
    const int n = data.n();
    const int p = data.p();
    SweepStats s;
    s.dir_sum.assign(p, 0.0);
    Vec v(p);
    for (int i = 0; i < n; ++i) {
        const auto y = data.row(i);
        for (int k = 0; k < p; ++k) v[k] = y[k] - mu[k];
        const double rad = norm2(v);
        if (rad <= zero_radius) {
            ++s.coincident;
            continue;
        }
        for (int k = 0; k < p; ++k) s.dir_sum[k] += v[k] / rad;
        s.inv_r_sum += 1.0 / rad;
        s.radius_sum += rad;
    }
    return s;
}

SweepStats pair_sweep(const DataMatrix& data, std::span<const double> mu, double zero_radius) {
    const WalshStream stream(data);
    const int n = data.n();
    const int p = data.p();
    const std::int64_t total = stream.count();
    const int chunks = chunk_count(total);
    std::vector<SweepStats> parts(chunks);

#pragma omp parallel for schedule(static)
    for (int c = 0; c < chunks; ++c) {
        SweepStats s;
        s.dir_sum.assign(p, 0.0);
        Vec v(p);
        const Range r = chunk_range(total, chunks, c);
        auto [i, j] = stream.pair_at(r.lo);
        for (std::int64_t t = r.lo; t < r.hi; ++t) {
            const auto yi = data.row(i);
            const auto yj = data.row(j);
            double rr = 0.0;
            for (int k = 0; k < p; ++k) {
                v[k] = 0.5 * (yi[k] + yj[k]) - mu[k];
                rr += v[k] * v[k];
            }
            const double rad = std::sqrt(rr);
            if (rad <= zero_radius) {
                ++s.coincident;
            } else {
                const double inv = 1.0 / rad;
                for (int k = 0; k < p; ++k) s.dir_sum[k] += v[k] * inv;
                s.inv_r_sum += inv;
                s.radius_sum += rad;
            }
            if (++j == n) {
                ++i;
                j = i + 1;
            }
        }
        parts[c] = std::move(s);
    }

    SweepStats out;
    out.dir_sum.assign(p, 0.0);
    for (const SweepStats& s : parts) {
        axpy(1.0, s.dir_sum, out.dir_sum);
        out.inv_r_sum += s.inv_r_sum;
        out.radius_sum += s.radius_sum;
        out.coincident += s.coincident;
    }
    return out;
}

SweepStats pair_sweep_ref(const DataMatrix& data, std::span<const double> mu, double zero_radius) {
    const WalshStream stream(data);
    const int p = data.p();
    SweepStats s;
    s.dir_sum.assign(p, 0.0);
    Vec z(p), v(p);
    for (std::int64_t t = 0; t < stream.count(); ++t) {
        stream.average_at(t, z);
        for (int k = 0; k < p; ++k) v[k] = z[k] - mu[k];
        const double rad = norm2(v);
        if (rad <= zero_radius) {
            ++s.coincident;
            continue;
        }
        for (int k = 0; k < p; ++k) s.dir_sum[k] += v[k] / rad;
        s.inv_r_sum += 1.0 / rad;
        s.radius_sum += rad;
    }
    return s;
}

PairDirectionStats pair_direction_stats(const DataMatrix& data, std::span<const double> center) {
    const WalshStream stream(data);
    const int n = data.n();
    const int p = data.p();
    const std::int64_t total = stream.count();
    const int chunks = chunk_count(total);
    std::vector<PairDirectionStats> parts(chunks);

#pragma omp parallel for schedule(static)
    for (int c = 0; c < chunks; ++c) {
        PairDirectionStats s;
        s.u_sum.assign(p, 0.0);
        Vec v(p);
        const Range r = chunk_range(total, chunks, c);
        auto [i, j] = stream.pair_at(r.lo);
        for (std::int64_t t = r.lo; t < r.hi; ++t) {
            const auto yi = data.row(i);
            const auto yj = data.row(j);
            double rr = 0.0;
            for (int k = 0; k < p; ++k) {
                v[k] = 0.5 * (yi[k] + yj[k]) - center[k];
                rr += v[k] * v[k];
            }
            if (rr == 0.0) {
                if (s.zero_pairs == 0) {
                    s.first_zero_i = i;
                    s.first_zero_j = j;
                }
                ++s.zero_pairs;
            } else {
                const double rad = std::sqrt(rr);
                const double inv = 1.0 / rad;
                for (int k = 0; k < p; ++k) s.u_sum[k] += v[k] * inv;
                s.inv_r_sum += inv;
            }
            if (++j == n) {
                ++i;
                j = i + 1;
            }
        }
        parts[c] = std::move(s);
    }

    PairDirectionStats out;
    out.u_sum.assign(p, 0.0);
    for (const PairDirectionStats& s : parts) {
        axpy(1.0, s.u_sum, out.u_sum);
        out.inv_r_sum += s.inv_r_sum;
        if (out.zero_pairs == 0 && s.zero_pairs > 0) {
            out.first_zero_i = s.first_zero_i;
            out.first_zero_j = s.first_zero_j;
        }
        out.zero_pairs += s.zero_pairs;
    }
    return out;
}

PairDirectionStats pair_direction_stats_ref(const DataMatrix& data, std::span<const double> center) {
    const WalshStream stream(data);
    const int p = data.p();
    PairDirectionStats s;
    s.u_sum.assign(p, 0.0);
    Vec z(p), v(p);
    for (std::int64_t t = 0; t < stream.count(); ++t) {
        stream.average_at(t, z);
        for (int k = 0; k < p; ++k) v[k] = z[k] - center[k];
        const double rad = norm2(v);
        if (rad == 0.0) {
            if (s.zero_pairs == 0) {
                const auto [i, j] = stream.pair_at(t);
                s.first_zero_i = i;
                s.first_zero_j = j;
            }
            ++s.zero_pairs;
            continue;
        }
        for (int k = 0; k < p; ++k) s.u_sum[k] += v[k] / rad;
        s.inv_r_sum += 1.0 / rad;
    }
    return s;
}

SymMatrix hessian_point_mean(const DataMatrix& data, std::span<const double> center) {
    const int n = data.n();
    const int p = data.p();
    SymMatrix m(p);
    double inv_sum = 0.0;
    Vec v(p);
    for (int i = 0; i < n; ++i) {
        const auto y = data.row(i);
        double rr = 0.0;
        for (int k = 0; k < p; ++k) {
            v[k] = y[k] - center[k];
            rr += v[k] * v[k];
        }
        if (rr == 0.0) continue;
        const double rad = std::sqrt(rr);
        const double inv = 1.0 / rad;
        const double inv3 = inv / rr;
        inv_sum += inv;
        for (int a = 0; a < p; ++a)
            for (int b = a; b < p; ++b) m.add(a, b, inv3 * v[a] * v[b]);
    }
    SymMatrix out(p);
    for (int a = 0; a < p; ++a)
        for (int b = a; b < p; ++b)
            out.set(a, b, ((a == b ? inv_sum : 0.0) - m(a, b)) / static_cast<double>(n));
    return out;
}

SymMatrix outer_point_mean(const DataMatrix& data, std::span<const double> center) {
    const int n = data.n();
    const int p = data.p();
    SymMatrix m(p);
    Vec v(p);
    for (int i = 0; i < n; ++i) {
        const auto y = data.row(i);
        double rr = 0.0;
        for (int k = 0; k < p; ++k) {
            v[k] = y[k] - center[k];
            rr += v[k] * v[k];
        }
        if (rr == 0.0) continue;
        const double inv2 = 1.0 / rr;
        for (int a = 0; a < p; ++a)
            for (int b = a; b < p; ++b) m.add(a, b, inv2 * v[a] * v[b]);
    }
    m *= 1.0 / static_cast<double>(n);
    return m;
}

SymMatrix hessian_pair_mean(const DataMatrix& data, std::span<const double> center) {
    const WalshStream stream(data);
    const int n = data.n();
    const int p = data.p();
    const std::int64_t total = stream.count();
    const int chunks = chunk_count(total);
    std::vector<SymMatrix> outer_parts(chunks, SymMatrix(p));
    std::vector<double> inv_parts(chunks, 0.0);

#pragma omp parallel for schedule(static)
    for (int c = 0; c < chunks; ++c) {
        SymMatrix m(p);
        double inv_sum = 0.0;
        Vec v(p);
        const Range r = chunk_range(total, chunks, c);
        auto [i, j] = stream.pair_at(r.lo);
        for (std::int64_t t = r.lo; t < r.hi; ++t) {
            const auto yi = data.row(i);
            const auto yj = data.row(j);
            double rr = 0.0;
            for (int k = 0; k < p; ++k) {
                v[k] = 0.5 * (yi[k] + yj[k]) - center[k];
                rr += v[k] * v[k];
            }
            if (rr != 0.0) {
                const double rad = std::sqrt(rr);
                const double inv = 1.0 / rad;
                const double inv3 = inv / rr;
                inv_sum += inv;
                for (int a = 0; a < p; ++a)
                    for (int b = a; b < p; ++b) m.add(a, b, inv3 * v[a] * v[b]);
            }
            if (++j == n) {
                ++i;
                j = i + 1;
            }
        }
        outer_parts[c] = std::move(m);
        inv_parts[c] = inv_sum;
    }

    SymMatrix m(p);
    double inv_sum = 0.0;
    for (int c = 0; c < chunks; ++c) {
        m += outer_parts[c];
        inv_sum += inv_parts[c];
    }
    SymMatrix out(p);
    for (int a = 0; a < p; ++a)
        for (int b = a; b < p; ++b)
            out.set(a, b, ((a == b ? inv_sum : 0.0) - m(a, b)) / static_cast<double>(total));
    return out;
}

SymMatrix hessian_pair_mean_ref(const DataMatrix& data, std::span<const double> center) {
    const WalshStream stream(data);
    const int p = data.p();
    SymMatrix acc(p);
    Vec z(p), v(p);
    for (std::int64_t t = 0; t < stream.count(); ++t) {
        stream.average_at(t, z);
        for (int k = 0; k < p; ++k) v[k] = z[k] - center[k];
        acc += sign_hessian(v);
    }
    acc *= 1.0 / static_cast<double>(stream.count());
    return acc;
}

Matrix rank_scores(const DataMatrix& data, std::span<const double> center) {
    const int n = data.n();
    const int p = data.p();
    Matrix q(n, p);

#pragma omp parallel for schedule(static)
    for (int i = 0; i < n; ++i) {
        Vec acc(p, 0.0);
        Vec z(p);
        const auto yi = data.row(i);
        for (int j = 0; j < n; ++j) {
            const auto yj = data.row(j);
            double rr = 0.0;
            for (int k = 0; k < p; ++k) {
                z[k] = 0.5 * (yi[k] + yj[k]) - center[k];
                rr += z[k] * z[k];
            }
            if (rr == 0.0) continue;
            const double inv = 1.0 / std::sqrt(rr);
            for (int k = 0; k < p; ++k) acc[k] += z[k] * inv;
        }
        for (int k = 0; k < p; ++k) q(i, k) = acc[k] / static_cast<double>(n);
    }
    return q;
}

Matrix rank_scores_ref(const DataMatrix& data, std::span<const double> center) {
    const int n = data.n();
    const int p = data.p();
    DataMatrix centered(n, p);
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < p; ++k) centered.row(i)[k] = data.row(i)[k] - center[k];
    Matrix q(n, p);
    for (int i = 0; i < n; ++i) {
        const Vec qi = signed_rank_fn(centered, centered.row(i));
        for (int k = 0; k < p; ++k) q(i, k) = qi[k];
    }
    return q;
}

SymMatrix score_outer_mean(const Matrix& scores) {
    const int n = scores.rows();
    const int p = scores.cols();
    SymMatrix acc(p);
    for (int i = 0; i < n; ++i)
        for (int a = 0; a < p; ++a)
            for (int b = a; b < p; ++b) acc.add(a, b, scores(i, a) * scores(i, b));
    acc *= 1.0 / static_cast<double>(n);
    return acc;
}

SymMatrix triples_outer_mean(const DataMatrix& data, std::span<const double> center) {
    const int n = data.n();
    const int p = data.p();
    if (n < 3) throw InvalidInput("triples_outer_mean: need n >= 3 observations");
    const WalshStream stream(data);

    // Precompute all pair signs; values are identical to on-the-fly
    // computation, so only the (unchanged) lexicographic add order matters.
    const std::int64_t npairs = stream.count();
    std::vector<double> u(static_cast<std::size_t>(npairs) * p, 0.0);
    Vec z(p);
    for (std::int64_t t = 0; t < npairs; ++t) {
        stream.average_at(t, z);
        double rr = 0.0;
        for (int k = 0; k < p; ++k) {
            z[k] -= center[k];
            rr += z[k] * z[k];
        }
        if (rr == 0.0) continue;  // u(0) = 0 keeps the slot zero
        const double rad = std::sqrt(rr);
        for (int k = 0; k < p; ++k) u[static_cast<std::size_t>(t) * p + k] = z[k] / rad;
    }

    auto pair_rank = [n](int i, int j) {
        return static_cast<std::int64_t>(i) * (2 * n - i - 1) / 2 + (j - i - 1);
    };

    SymMatrix acc(p);
    for (int i = 0; i < n - 2; ++i)
        for (int j = i + 1; j < n - 1; ++j) {
            const double* uij = &u[static_cast<std::size_t>(pair_rank(i, j)) * p];
            for (int k = j + 1; k < n; ++k) {
                const double* ujk = &u[static_cast<std::size_t>(pair_rank(j, k)) * p];
                for (int a = 0; a < p; ++a)
                    for (int b = a; b < p; ++b)
                        acc.add(a, b, 0.5 * (uij[a] * ujk[b] + uij[b] * ujk[a]));
            }
        }

    const double cnt = static_cast<double>(n) * (n - 1) * (n - 2) / 6.0;
    SymMatrix out(p);
    for (int a = 0; a < p; ++a)
        for (int b = a; b < p; ++b) out.set(a, b, acc(a, b) / cnt);
    return out;
}

SymMatrix subsampled_outer_mean(const DataMatrix& data, std::span<const double> center,
                                std::int64_t m, std::uint64_t seed) {
    const int n = data.n();
    const int p = data.p();
    if (n < 3) throw InvalidInput("subsampled_outer_mean: need n >= 3 observations");
    if (m < 1) throw InvalidInput("subsampled_outer_mean: need at least one triple");
    const std::int64_t all =
        static_cast<std::int64_t>(n) * (n - 1) / 2 * (n - 2) / 3;  // C(n,3), overflow-safe order
    if (m >= all) return triples_outer_mean(data, center);

    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> pick(0, n - 1);
    std::unordered_set<std::int64_t> seen;
    seen.reserve(static_cast<std::size_t>(m) * 2);

    auto sign_of = [&](int i, int j, Vec& out) {
        const auto yi = data.row(i);
        const auto yj = data.row(j);
        double rr = 0.0;
        for (int k = 0; k < p; ++k) {
            out[k] = 0.5 * (yi[k] + yj[k]) - center[k];
            rr += out[k] * out[k];
        }
        if (rr == 0.0) {
            for (int k = 0; k < p; ++k) out[k] = 0.0;
            return;
        }
        const double rad = std::sqrt(rr);
        for (int k = 0; k < p; ++k) out[k] /= rad;
    };

    SymMatrix acc(p);
    Vec uij(p), ujk(p);
    std::int64_t drawn = 0;
    while (drawn < m) {
        int a = pick(rng), b = pick(rng), c = pick(rng);
        if (a == b || a == c || b == c) continue;
        if (a > b) std::swap(a, b);
        if (b > c) std::swap(b, c);
        if (a > b) std::swap(a, b);
        const std::int64_t key = (static_cast<std::int64_t>(a) * n + b) * n + c;
        if (!seen.insert(key).second) continue;
        ++drawn;
        sign_of(a, b, uij);
        sign_of(b, c, ujk);
        for (int x = 0; x < p; ++x)
            for (int y = x; y < p; ++y) acc.add(x, y, 0.5 * (uij[x] * ujk[y] + uij[y] * ujk[x]));
    }
    acc *= 1.0 / static_cast<double>(m);
    return acc;
}

PairMomentStats pair_moment_stats(const DataMatrix& data, std::span<const double> center) {
    const WalshStream stream(data);
    const int n = data.n();
    const int p = data.p();
    const std::int64_t total = stream.count();
    const int chunks = chunk_count(total);
    std::vector<PairMomentStats> parts;
    parts.reserve(chunks);
    for (int c = 0; c < chunks; ++c) {
        PairMomentStats s;
        s.outer_sum = SymMatrix(p);
        s.u_sum.assign(p, 0.0);
        parts.push_back(std::move(s));
    }

#pragma omp parallel for schedule(static)
    for (int c = 0; c < chunks; ++c) {
        PairMomentStats& s = parts[c];
        Vec v(p);
        const Range r = chunk_range(total, chunks, c);
        auto [i, j] = stream.pair_at(r.lo);
        for (std::int64_t t = r.lo; t < r.hi; ++t) {
            const auto yi = data.row(i);
            const auto yj = data.row(j);
            double rr = 0.0;
            for (int k = 0; k < p; ++k) {
                v[k] = 0.5 * (yi[k] + yj[k]) - center[k];
                rr += v[k] * v[k];
            }
            if (rr == 0.0) {
                ++s.zero_pairs;
            } else {
                const double inv1 = 1.0 / std::sqrt(rr);
                const double inv2 = 1.0 / rr;
                s.inv_pow_sum[0] += inv1;
                s.inv_pow_sum[1] += inv2;
                s.inv_pow_sum[2] += inv1 * inv2;
                s.inv_pow_sum[3] += inv2 * inv2;
                for (int k = 0; k < p; ++k) s.u_sum[k] += v[k] * inv1;
                for (int a = 0; a < p; ++a)
                    for (int b = a; b < p; ++b) s.outer_sum.add(a, b, inv2 * v[a] * v[b]);
            }
            if (++j == n) {
                ++i;
                j = i + 1;
            }
        }
    }

    PairMomentStats out;
    out.outer_sum = SymMatrix(p);
    out.u_sum.assign(p, 0.0);
    for (const PairMomentStats& s : parts) {
        out.outer_sum += s.outer_sum;
        axpy(1.0, s.u_sum, out.u_sum);
        for (int k = 0; k < 4; ++k) out.inv_pow_sum[k] += s.inv_pow_sum[k];
        out.zero_pairs += s.zero_pairs;
    }
    return out;
}

PairMomentStats pair_moment_stats_ref(const DataMatrix& data, std::span<const double> center) {
    const WalshStream stream(data);
    const int p = data.p();
    PairMomentStats s;
    s.outer_sum = SymMatrix(p);
    s.u_sum.assign(p, 0.0);
    Vec z(p), v(p);
    for (std::int64_t t = 0; t < stream.count(); ++t) {
        stream.average_at(t, z);
        for (int k = 0; k < p; ++k) v[k] = z[k] - center[k];
        const double rad = norm2(v);
        if (rad == 0.0) {
            ++s.zero_pairs;
            continue;
        }
        for (int k = 1; k <= 4; ++k) s.inv_pow_sum[k - 1] += std::pow(rad, -k);
        Vec uu = spatial_sign(v);
        axpy(1.0, uu, s.u_sum);
        for (int a = 0; a < p; ++a)
            for (int b = a; b < p; ++b) s.outer_sum.add(a, b, uu[a] * uu[b]);
    }
    return s;
}

}  // namespace spatsign::kernels
