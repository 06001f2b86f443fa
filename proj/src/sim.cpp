#include "spatsign/sim.hpp"

#include <cmath>
#include <cstdint>

#include "spatsign/errors.hpp"

namespace spatsign {

namespace {

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

std::uint64_t mix(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xbf58476d1ce4e5b9ULL;
    z ^= z >> 27;
    z *= 0x94d049bb133111ebULL;
    z ^= z >> 31;
    return z;
}

std::uint64_t fold(std::uint64_t h, std::uint64_t v) {
    return mix(h ^ (v + kGolden + (h << 6) + (h >> 2)));
}

// Counter stream: value t is a pure function of (key, t), consumed here
// sequentially for the rejection loops.
struct Stream {
    std::uint64_t key;
    std::uint64_t t = 0;

    double uniform() {  // [0, 1)
        return static_cast<double>(mix(key + (++t) * kGolden) >> 11) * 0x1.0p-53;
    }
};

// Marsaglia polar pairs; the rejection count is part of the stream, so the
// draw sequence is still deterministic per key.
struct NormalSource {
    Stream stream;
    double spare = 0.0;
    bool has_spare = false;

    explicit NormalSource(std::uint64_t key) : stream{key} {}

    double next() {
        if (has_spare) {
            has_spare = false;
            return spare;
        }
        for (;;) {
            const double x = 2.0 * stream.uniform() - 1.0;
            const double y = 2.0 * stream.uniform() - 1.0;
            const double s = x * x + y * y;
            if (s >= 1.0 || s == 0.0) continue;
            const double f = std::sqrt(-2.0 * std::log(s) / s);
            spare = y * f;
            has_spare = true;
            return x * f;
        }
    }
};

constexpr int kColumnBlock = 64;
// Block index reserved for the per-row radial divisor of the t family; the
// column blocks for p columns end far below it.
constexpr std::uint64_t kRadialBlock = 0xFFFFFFFFULL;

void check_spec(const SimSpec& spec) {
    if (spec.n < 1) throw InvalidInput("sample size must be at least 1");
    if (spec.p < 2) throw InvalidInput("dimension must be at least 2");
    if (spec.replications < 1) throw InvalidInput("replication count must be at least 1");
    if (spec.family == Family::student_t && spec.df < 1)
        throw InvalidInput("t family needs df >= 1");
}

std::uint64_t context_key(const SimSpec& spec) {
    std::uint64_t h = mix(spec.seed + kGolden);
    h = fold(h, static_cast<std::uint64_t>(spec.n));
    h = fold(h, static_cast<std::uint64_t>(spec.p));
    h = fold(h, spec.family == Family::normal ? 0x6e6f726dULL : 0x742d646973ULL);
    h = fold(h, spec.family == Family::student_t ? static_cast<std::uint64_t>(spec.df) : 0ULL);
    return h;
}

}  // namespace

DataMatrix sample(const SimSpec& spec, int replication) {
    check_spec(spec);
    if (replication < 0) throw InvalidInput("replication index must be nonnegative");
    const std::uint64_t ctx = context_key(spec);
    DataMatrix out(spec.n, spec.p);
    for (int i = 0; i < spec.n; ++i) {
        const std::uint64_t row_key =
            fold(fold(ctx, static_cast<std::uint64_t>(replication)), static_cast<std::uint64_t>(i));
        auto row = out.row(i);
        for (int b = 0; b * kColumnBlock < spec.p; ++b) {
            NormalSource src(fold(row_key, static_cast<std::uint64_t>(b)));
            const int hi = std::min(spec.p, (b + 1) * kColumnBlock);
            for (int j = b * kColumnBlock; j < hi; ++j) row[j] = src.next();
        }
        if (spec.family == Family::student_t) {
            NormalSource radial(fold(row_key, kRadialBlock));
            double chisq = 0.0;
            for (int k = 0; k < spec.df; ++k) {
                const double g = radial.next();
                chisq += g * g;
            }
            const double divisor = std::sqrt(chisq / static_cast<double>(spec.df));
            for (int j = 0; j < spec.p; ++j) row[j] /= divisor;
        }
    }
    return out;
}

}  // namespace spatsign
