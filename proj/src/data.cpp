#include "spatsign/data.hpp"

#include <cmath>
#include <string>

#include "spatsign/errors.hpp"

namespace spatsign {

DataMatrix::DataMatrix(int n, int p) : n_(n), p_(p), a_(static_cast<std::size_t>(n) * p, 0.0) {
    if (n < 1) throw InvalidInput("DataMatrix: need at least one observation");
    if (p < 2) throw InvalidInput("DataMatrix: dimension must be at least 2");
}

DataMatrix::DataMatrix(int n, int p, std::vector<double> row_major) : DataMatrix(n, p) {
    if (row_major.size() != a_.size())
        throw InvalidInput("DataMatrix: storage size does not match n*p");
    a_ = std::move(row_major);
    validate();
}

void DataMatrix::validate() const {
    for (double v : a_)
        if (!std::isfinite(v)) throw InvalidInput("DataMatrix: non-finite entry");
}

WalshStream::WalshStream(const DataMatrix& data) : data_(&data) {
    const std::int64_t n = data.n();
    if (n < 2) throw InvalidInput("WalshStream: need n >= 2 observations");
    count_ = n * (n - 1) / 2;
}

std::pair<int, int> WalshStream::pair_at(std::int64_t t) const {
    const std::int64_t n = data_->n();
    // Row i starts at rank i*(2n-i-1)/2. Invert the closed form, then correct
    // for floating error.
    const double nd = static_cast<double>(n);
    std::int64_t i = static_cast<std::int64_t>(
        std::floor(nd - 0.5 - std::sqrt((nd - 0.5) * (nd - 0.5) - 2.0 * static_cast<double>(t))));
    auto start = [n](std::int64_t r) { return r * (2 * n - r - 1) / 2; };
    if (i < 0) i = 0;
    if (i > n - 2) i = n - 2;
    while (i > 0 && start(i) > t) --i;
    while (start(i + 1) <= t) ++i;
    const std::int64_t j = i + 1 + (t - start(i));
    return {static_cast<int>(i), static_cast<int>(j)};
}

void WalshStream::average_at(std::int64_t t, std::span<double> out) const {
    const auto [i, j] = pair_at(t);
    const auto yi = data_->row(i);
    const auto yj = data_->row(j);
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = 0.5 * (yi[k] + yj[k]);
}

WalshStream walsh_averages(const DataMatrix& data) { return WalshStream(data); }

}  // namespace spatsign
