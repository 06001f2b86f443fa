#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace spatsign {

// n x p observation matrix, row-major. Entries must be finite, n >= 1, p >= 2.
class DataMatrix {
public:
    DataMatrix(int n, int p);
    DataMatrix(int n, int p, std::vector<double> row_major);

    int n() const { return n_; }
    int p() const { return p_; }

    std::span<const double> row(int i) const {
        return {a_.data() + static_cast<std::size_t>(i) * p_, static_cast<std::size_t>(p_)};
    }
    std::span<double> row(int i) {
        return {a_.data() + static_cast<std::size_t>(i) * p_, static_cast<std::size_t>(p_)};
    }

    const std::vector<double>& storage() const { return a_; }

    void validate() const;  // finiteness check after in-place fills

private:
    int n_;
    int p_;
    std::vector<double> a_;
};

// Lazy enumerator of the n(n-1)/2 pairwise means z_{i,j} = (y_i + y_j)/2,
// 1 <= i < j <= n, in lexicographic order. Never materializes the averages.
class WalshStream {
public:
    explicit WalshStream(const DataMatrix& data);

    std::int64_t count() const { return count_; }
    const DataMatrix& source() const { return *data_; }

    // Lexicographic rank -> (i, j) with i < j, 0-based.
    std::pair<int, int> pair_at(std::int64_t t) const;

    // Writes z_{i,j} for the pair of rank t into out (size p).
    void average_at(std::int64_t t, std::span<double> out) const;

    template <typename F>
    void for_each(F&& f) const {
        const int n = data_->n();
        for (int i = 0; i < n - 1; ++i)
            for (int j = i + 1; j < n; ++j) f(i, j);
    }

private:
    const DataMatrix* data_;
    std::int64_t count_;
};

WalshStream walsh_averages(const DataMatrix& data);

}  // namespace spatsign
