#pragma once

#include <cstdint>

#include "spatsign/data.hpp"

namespace spatsign {

enum class Family { normal, student_t };

struct SimSpec {
    int n = 100;
    int p = 2;
    Family family = Family::normal;
    int df = 3;  // t-family only
    std::uint64_t seed = 0;
    int replications = 1;
};

// Spherical draws for one replication: i.i.d. standard normal entries, or
// t(df) rows built as a normal vector over sqrt(chisq(df)/df) with an
// independent per-row divisor. Counter-based streams keyed by
// (seed, spec context, replication, row, column block), so the result is a
// pure function of (spec, replication) and identical under any scheduling
// of parallel replications.
DataMatrix sample(const SimSpec& spec, int replication);

}  // namespace spatsign
