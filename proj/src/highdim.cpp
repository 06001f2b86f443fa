#include "spatsign/highdim.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "spatsign/errors.hpp"
#include "spatsign/kernels.hpp"
#include "spatsign/matalg.hpp"

namespace spatsign {
namespace {

double pair_count(int n) { return 0.5 * static_cast<double>(n) * (n - 1); }

// Linear-interpolation quantile on an already sorted vector.
double quantile_sorted(const std::vector<double>& sorted, double q) {
    if (sorted.empty()) return std::numeric_limits<double>::quiet_NaN();
    if (sorted.size() == 1) return sorted.front();
    const double h = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(h);
    if (lo + 1 >= sorted.size()) return sorted.back();
    const double w = h - static_cast<double>(lo);
    return sorted[lo] + w * (sorted[lo + 1] - sorted[lo]);
}

std::string family_label(Family family, int df) {
    if (family == Family::normal) return "normal";
    return "t" + std::to_string(df);
}

struct RepSlot {
    double norm = 0.0;
    double a_hat = 0.0;
    double scaled_hl = 0.0;
    char converged = 0;
    bool failed = false;
    std::string message;
};

}  // namespace

DeltaStat delta_statistic(const DataMatrix& data, const SolverConfig& cfg) {
    data.validate();
    if (data.n() < 2) throw InvalidInput("delta statistic needs at least two rows");
    const int p = data.p();
    const Vec origin(p, 0.0);

    const auto stats = kernels::pair_direction_stats(data, origin);
    if (stats.zero_pairs > 0) {
        throw DegenerateWalshAverage("zero Walsh average leaves 1/r undefined",
                                     stats.first_zero_i, stats.first_zero_j);
    }
    const double pairs = pair_count(data.n());
    const double root_n = std::sqrt(static_cast<double>(data.n()));

    const SolveSummary fit = hl_solve(data, cfg);

    DeltaStat out;
    out.a_hat = stats.inv_r_sum / pairs;
    out.hl = fit.estimate;
    out.hl_converged = fit.converged;
    out.delta.resize(p);
    for (int k = 0; k < p; ++k) {
        out.delta[k] = root_n * (out.a_hat * fit.estimate[k] - stats.u_sum[k] / pairs);
    }
    return out;
}

std::vector<DeltaReport> figure3_study(const std::vector<GridCell>& grid, Family family,
                                       std::uint64_t seed, int replications, int df) {
    if (grid.empty()) throw InvalidInput("figure3 grid is empty");
    if (replications < 1) throw InvalidInput("replications must be positive");

    std::vector<DeltaReport> reports;
    reports.reserve(grid.size());
    for (const GridCell& cell : grid) {
        const int p = static_cast<int>(std::llround(cell.gamma * cell.n));
        if (cell.n < 2 || p < 2) {
            throw InvalidInput("grid cell needs n >= 2 and round(gamma * n) >= 2");
        }
        SimSpec spec;
        spec.n = cell.n;
        spec.p = p;
        spec.family = family;
        spec.df = df;
        spec.seed = seed;
        spec.replications = replications;

        std::vector<RepSlot> slots(static_cast<std::size_t>(replications));
#pragma omp parallel for schedule(dynamic)
        for (int rep = 0; rep < replications; ++rep) {
            RepSlot& slot = slots[static_cast<std::size_t>(rep)];
            try {
                const DataMatrix draw = sample(spec, rep);
                const DeltaStat ds = delta_statistic(draw);
                slot.norm = norm2(ds.delta);
                slot.a_hat = ds.a_hat;
                slot.scaled_hl =
                    std::sqrt(static_cast<double>(cell.n)) * ds.a_hat * norm2(ds.hl);
                slot.converged = ds.hl_converged ? 1 : 0;
            } catch (const std::exception& e) {
                slot.failed = true;
                slot.message = e.what();
            }
        }

        DeltaReport report;
        report.n = cell.n;
        report.p = p;
        report.family = family;
        report.df = df;
        report.seed = seed;
        for (int rep = 0; rep < replications; ++rep) {
            const RepSlot& slot = slots[static_cast<std::size_t>(rep)];
            if (slot.failed) {
                report.failures.push_back({rep, slot.message});
                continue;
            }
            report.replication.push_back(rep);
            report.per_rep_norms.push_back(slot.norm);
            report.a_hat.push_back(slot.a_hat);
            report.scaled_hl_norms.push_back(slot.scaled_hl);
            report.hl_converged.push_back(slot.converged);
        }
        std::vector<double> sorted = report.per_rep_norms;
        std::sort(sorted.begin(), sorted.end());
        report.q25 = quantile_sorted(sorted, 0.25);
        report.median = quantile_sorted(sorted, 0.50);
        report.q75 = quantile_sorted(sorted, 0.75);
        reports.push_back(std::move(report));
    }
    return reports;
}

void write_figure3_csv(const std::vector<DeltaReport>& reports, std::ostream& out) {
    out << "n,p,family,rep,delta_norm,a_hat,converged\n";
    out << std::setprecision(17);
    for (const DeltaReport& report : reports) {
        const std::string label = family_label(report.family, report.df);
        for (std::size_t k = 0; k < report.per_rep_norms.size(); ++k) {
            out << report.n << ',' << report.p << ',' << label << ','
                << report.replication[k] << ',' << report.per_rep_norms[k] << ','
                << report.a_hat[k] << ',' << static_cast<int>(report.hl_converged[k])
                << '\n';
        }
    }
}

std::string figure3_summary_json(const std::vector<DeltaReport>& reports) {
    nlohmann::json cells = nlohmann::json::array();
    for (const DeltaReport& report : reports) {
        nlohmann::json cell;
        cell["n"] = report.n;
        cell["p"] = report.p;
        cell["family"] = family_label(report.family, report.df);
        cell["seed"] = report.seed;
        cell["replications"] = report.per_rep_norms.size() + report.failures.size();
        cell["failures"] = report.failures.size();
        cell["delta_norm"] = {{"q25", report.q25}, {"median", report.median}, {"q75", report.q75}};
        if (!report.a_hat.empty()) {
            cell["a_hat_mean"] =
                std::accumulate(report.a_hat.begin(), report.a_hat.end(), 0.0) /
                static_cast<double>(report.a_hat.size());
        }
        if (!report.scaled_hl_norms.empty()) {
            const auto [lo, hi] = std::minmax_element(report.scaled_hl_norms.begin(),
                                                      report.scaled_hl_norms.end());
            cell["scaled_hl_norm"] = {{"min", *lo}, {"max", *hi}};
        }
        cells.push_back(std::move(cell));
    }
    nlohmann::json summary;
    summary["study"] = "figure3";
    summary["cells"] = std::move(cells);
    return summary.dump(2);
}

Assumption3Report assumption3_diagnostics(const DataMatrix& data) {
    data.validate();
    if (data.n() < 3) throw InvalidInput("assumption diagnostics need at least three rows");
    const int p = data.p();
    const Vec origin(p, 0.0);

    const auto stats = kernels::pair_moment_stats(data, origin);
    Assumption3Report report;
    report.zero_pairs = stats.zero_pairs;
    const double kept = pair_count(data.n()) - static_cast<double>(stats.zero_pairs);
    if (kept <= 0.0) return report;  // every Walsh average vanished; nothing to estimate

    for (int k = 0; k < 4; ++k) report.c[k] = stats.inv_pow_sum[k] / kept;
    for (int k = 0; k < 4; ++k) {
        report.ratios[k] = report.c[k] / std::pow(report.c[0], k + 1);
    }

    // Cov(u) over the kept pairs: mean outer product minus outer of the mean.
    SymMatrix cov = stats.outer_sum;
    cov *= 1.0 / kept;
    for (int i = 0; i < p; ++i) {
        for (int j = 0; j <= i; ++j) {
            cov.add(i, j, -(stats.u_sum[i] / kept) * (stats.u_sum[j] / kept));
        }
    }
    report.lambda_max = sym_eigen(cov).values.front();

    report.eigen_flag = report.lambda_max >= kEigenFlagThreshold;
    const double worst_ratio = *std::max_element(report.ratios, report.ratios + 4);
    report.moment_flag = worst_ratio >= kMomentRatioFlagThreshold;
    return report;
}

}  // namespace spatsign
