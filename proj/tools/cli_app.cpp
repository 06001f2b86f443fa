#include "cli_app.hpp"

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "spatsign/data.hpp"
#include "spatsign/errors.hpp"
#include "spatsign/highdim.hpp"
#include "spatsign/inference.hpp"
#include "spatsign/io.hpp"
#include "spatsign/location.hpp"
#include "spatsign/matalg.hpp"
#include "spatsign/sim.hpp"
#include "spatsign/transret.hpp"
#include "spatsign/vec.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace spatsign::cli {
namespace {

using nlohmann::json;

enum class Command { estimate, test, ellipsoid, simulate, figure3, demo_equivariance };

struct RunConfig {
    Command command = Command::estimate;
    std::string input_path;
    std::string output_path;  // empty writes to the primary stream
    std::string method;
    std::string bhat = "rank";
    double level = 0.95;
    int n = 100;
    int p = 0;  // 0 derives the dimension from gamma
    double gamma = 0.5;
    std::string family = "normal";
    int df = 3;
    std::uint64_t seed = 0;
    int replications = kDefaultReplications;
    std::string format = "csv";
    std::vector<std::string> cells;
    int threads = 0;
};

std::string iso_timestamp() {
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

json vec_json(std::span<const double> v) {
    json a = json::array();
    for (double x : v) a.push_back(x);
    return a;
}

json sym_json(const SymMatrix& m) {
    json rows = json::array();
    for (int i = 0; i < m.dim(); ++i) {
        json row = json::array();
        for (int j = 0; j < m.dim(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

BhatSpec parse_bhat(const std::string& text) {
    BhatSpec spec;
    if (text == "rank") {
        spec.mode = BhatMode::rank_based;
    } else if (text == "exact") {
        spec.mode = BhatMode::exact_triples;
    } else if (text.rfind("subsample=", 0) == 0) {
        spec.mode = BhatMode::subsampled;
        try {
            spec.subsample = std::stoll(text.substr(10));
        } catch (const std::exception&) {
            throw InvalidInput("bad --bhat subsample count in '" + text + "'");
        }
        if (spec.subsample < 1) throw InvalidInput("--bhat subsample count must be positive");
    } else {
        throw InvalidInput("unknown --bhat mode '" + text + "' (rank|exact|subsample=M)");
    }
    return spec;
}

Family parse_family(const std::string& text) {
    return text == "normal" ? Family::normal : Family::student_t;
}

LocationFit mean_fit(const DataMatrix& data) {
    const int n = data.n();
    const int p = data.p();
    LocationFit fit;
    fit.estimate.assign(static_cast<std::size_t>(p), 0.0);
    for (int i = 0; i < n; ++i) axpy(1.0 / n, data.row(i), fit.estimate);
    fit.cov_of_estimate = SymMatrix(p);
    if (n >= 2) {
        for (int i = 0; i < n; ++i) {
            const Vec e = sub(data.row(i), fit.estimate);
            for (int a = 0; a < p; ++a) {
                for (int b = 0; b <= a; ++b) {
                    fit.cov_of_estimate.add(
                        a, b,
                        e[static_cast<std::size_t>(a)] * e[static_cast<std::size_t>(b)] /
                            (static_cast<double>(n - 1) * n));
                }
            }
        }
    }
    fit.iterations = 0;
    fit.converged = true;
    return fit;
}

LocationFit fit_by_method(const DataMatrix& data, const std::string& method,
                          const BhatSpec& bhat) {
    if (method == "spatial-median") return spatial_median(data);
    if (method == "hl") return hl_estimator(data, {}, bhat);
    if (method == "tr-spatial-median") return tr_spatial_median(data);
    if (method == "tr-hl") return tr_hl(data, {}, bhat);
    return mean_fit(data);
}

template <typename WriteFn>
void deliver(const RunConfig& cfg, std::ostream& fallback, WriteFn&& write) {
    if (cfg.output_path.empty()) {
        write(fallback);
        return;
    }
    std::ofstream file(cfg.output_path);
    if (!file) throw InvalidInput("cannot open output file " + cfg.output_path);
    write(file);
}

void run_estimate(const RunConfig& cfg, std::ostream& out) {
    const BhatSpec bhat = parse_bhat(cfg.bhat);
    const DataMatrix data = ingest_csv(cfg.input_path);
    const LocationFit fit = fit_by_method(data, cfg.method, bhat);
    json j;
    j["method"] = cfg.method;
    j["estimate"] = vec_json(fit.estimate);
    j["covariance"] = sym_json(fit.cov_of_estimate);
    j["iterations"] = fit.iterations;
    j["converged"] = fit.converged;
    j["generated_at"] = iso_timestamp();
    deliver(cfg, out, [&](std::ostream& s) { s << j.dump(2) << '\n'; });
}

void run_test(const RunConfig& cfg, std::ostream& out) {
    const BhatSpec bhat = parse_bhat(cfg.bhat);
    const DataMatrix data = ingest_csv(cfg.input_path);
    TestResult result;
    if (cfg.method == "sign") {
        result = sign_test(data);
    } else if (cfg.method == "signed-rank") {
        result = signed_rank_test(data, bhat);
    } else {
        result = hotelling_t2(data);
    }
    json j;
    j["method"] = result.method;
    j["statistic"] = result.statistic;
    j["df"] = result.df;
    j["p_value"] = result.p_value;
    j["generated_at"] = iso_timestamp();
    deliver(cfg, out, [&](std::ostream& s) { s << j.dump(2) << '\n'; });
}

void run_ellipsoid(const RunConfig& cfg, std::ostream& out) {
    const BhatSpec bhat = parse_bhat(cfg.bhat);
    const DataMatrix data = ingest_csv(cfg.input_path);
    const LocationFit fit = fit_by_method(data, cfg.method, bhat);
    const Ellipsoid region = confidence_ellipsoid(fit, cfg.level);
    json j;
    j["method"] = cfg.method;
    j["level"] = cfg.level;
    j["center"] = vec_json(region.center);
    j["shape"] = sym_json(region.shape);
    j["radius2"] = region.radius2;
    j["generated_at"] = iso_timestamp();
    deliver(cfg, out, [&](std::ostream& s) { s << j.dump(2) << '\n'; });
}

GridCell parse_cell(const std::string& text) {
    const auto colon = text.find(':');
    if (colon == std::string::npos) {
        throw InvalidInput("bad --cell '" + text + "', expected n:gamma");
    }
    GridCell cell;
    try {
        cell.n = std::stoi(text.substr(0, colon));
        cell.gamma = std::stod(text.substr(colon + 1));
    } catch (const std::exception&) {
        throw InvalidInput("bad --cell '" + text + "', expected n:gamma");
    }
    return cell;
}

void write_study(const RunConfig& cfg, const std::vector<DeltaReport>& reports,
                 std::ostream& out) {
    deliver(cfg, out, [&](std::ostream& s) {
        if (cfg.format == "csv") {
            write_figure3_csv(reports, s);
        } else {
            json j = json::parse(figure3_summary_json(reports));
            j["generated_at"] = iso_timestamp();
            s << j.dump(2) << '\n';
        }
    });
}

void run_simulate(const RunConfig& cfg, std::ostream& out) {
    GridCell cell{cfg.n, cfg.gamma};
    if (cfg.p > 0) cell.gamma = static_cast<double>(cfg.p) / cfg.n;
    const auto reports =
        figure3_study({cell}, parse_family(cfg.family), cfg.seed, cfg.replications, cfg.df);
    write_study(cfg, reports, out);
}

void run_figure3(const RunConfig& cfg, std::ostream& out) {
    std::vector<GridCell> grid;
    for (const std::string& text : cfg.cells) grid.push_back(parse_cell(text));
    if (grid.empty()) grid = kDefaultGrid;
    const auto reports =
        figure3_study(grid, parse_family(cfg.family), cfg.seed, cfg.replications, cfg.df);
    write_study(cfg, reports, out);
}

// The frozen five-point configuration whose plain pairwise estimate visibly
// fails affine equivariance under diag(3, 1), while the retransformed
// estimate maps exactly. Emitted as plot-ready rows.
void run_demo(const RunConfig& cfg, std::ostream& out) {
    const DataMatrix original(5, 2, {1.4, -2.3, -1.5, 0.1, 2.0, 2.8, 1.6, -1.3, 1.4, -1.9});
    const double stretch_x = 3.0;
    std::vector<double> stretched_rows = original.storage();
    for (std::size_t k = 0; k < stretched_rows.size(); k += 2) stretched_rows[k] *= stretch_x;
    const DataMatrix stretched(5, 2, std::move(stretched_rows));

    const Vec hl_original = hl_estimator(original).estimate;
    const Vec hl_stretched = hl_estimator(stretched).estimate;
    const Vec tr_original = tr_hl(original).estimate;
    const Vec tr_stretched = tr_hl(stretched).estimate;

    deliver(cfg, out, [&](std::ostream& s) {
        s << std::setprecision(17);
        s << "role,set,x,y\n";
        const auto row = [&](const char* role, const char* set, double x, double y) {
            s << role << ',' << set << ',' << x << ',' << y << '\n';
        };
        for (int i = 0; i < 5; ++i) {
            row("data", "original", original.row(i)[0], original.row(i)[1]);
        }
        for (int i = 0; i < 5; ++i) {
            row("data", "stretched", stretched.row(i)[0], stretched.row(i)[1]);
        }
        row("hl", "original", hl_original[0], hl_original[1]);
        row("hl", "stretched", hl_stretched[0], hl_stretched[1]);
        row("hl", "mapped", stretch_x * hl_original[0], hl_original[1]);
        row("tr-hl", "original", tr_original[0], tr_original[1]);
        row("tr-hl", "stretched", tr_stretched[0], tr_stretched[1]);
        row("tr-hl", "mapped", stretch_x * tr_original[0], tr_original[1]);
    });
}

void apply_threads(const RunConfig& cfg) {
    int threads = cfg.threads;
    if (threads <= 0) {
        if (const char* env = std::getenv("SPATSIGN_THREADS")) {
            threads = std::atoi(env);
        }
    }
#ifdef _OPENMP
    if (threads > 0) omp_set_num_threads(threads);
#else
    (void)threads;
#endif
}

int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    try {
        apply_threads(cfg);
        switch (cfg.command) {
            case Command::estimate: run_estimate(cfg, out); break;
            case Command::test: run_test(cfg, out); break;
            case Command::ellipsoid: run_ellipsoid(cfg, out); break;
            case Command::simulate: run_simulate(cfg, out); break;
            case Command::figure3: run_figure3(cfg, out); break;
            case Command::demo_equivariance: run_demo(cfg, out); break;
        }
        return 0;
    } catch (const ParseError& e) {
        json j;
        j["error"] = {{"type", "ParseError"}, {"message", e.what()}, {"line", e.line}};
        err << j.dump() << '\n';
        return 2;
    } catch (const InvalidInput& e) {
        json j;
        j["error"] = {{"type", "InvalidInput"}, {"message", e.what()}};
        err << j.dump() << '\n';
        return 4;
    } catch (const DegenerateWalshAverage& e) {
        json j;
        j["error"] = {{"type", "DegenerateWalshAverage"},
                      {"message", e.what()},
                      {"pair_i", e.pair_i},
                      {"pair_j", e.pair_j}};
        err << j.dump() << '\n';
        return 3;
    } catch (const NotPositiveDefinite& e) {
        json j;
        j["error"] = {{"type", "NotPositiveDefinite"}, {"message", e.what()}};
        err << j.dump() << '\n';
        return 3;
    } catch (const DegenerateCovariance& e) {
        json j;
        j["error"] = {{"type", "DegenerateCovariance"}, {"message", e.what()}};
        err << j.dump() << '\n';
        return 3;
    } catch (const Underdetermined& e) {
        json j;
        j["error"] = {{"type", "Underdetermined"}, {"message", e.what()}};
        err << j.dump() << '\n';
        return 3;
    } catch (const Error& e) {
        json j;
        j["error"] = {{"type", "Error"}, {"message", e.what()}};
        err << j.dump() << '\n';
        return 3;
    }
}

}  // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    RunConfig cfg;
    CLI::App app{"Spatial-sign and signed-rank multivariate location toolkit"};
    app.require_subcommand(1);
    app.add_option("--threads", cfg.threads,
                   "Worker thread count (overrides SPATSIGN_THREADS)");

    const std::vector<std::string> estimators = {"spatial-median", "hl", "tr-spatial-median",
                                                 "tr-hl", "mean"};

    CLI::App* estimate = app.add_subcommand("estimate", "Location estimate with covariance");
    estimate->add_option("-i,--input", cfg.input_path, "Input CSV")->required();
    cfg.method = "hl";
    estimate->add_option("-m,--method", cfg.method, "Estimator")
        ->check(CLI::IsMember(estimators));
    estimate->add_option("--bhat", cfg.bhat, "B-hat mode: rank|exact|subsample=M");
    estimate->add_option("-o,--output", cfg.output_path, "Output path (default stdout)");

    CLI::App* test = app.add_subcommand("test", "Location test against the origin");
    test->add_option("-i,--input", cfg.input_path, "Input CSV")->required();
    std::string test_method = "signed-rank";
    test->add_option("-m,--method", test_method, "Test")
        ->check(CLI::IsMember({"sign", "signed-rank", "hotelling"}));
    test->add_option("--bhat", cfg.bhat, "B-hat mode: rank|exact|subsample=M");
    test->add_option("-o,--output", cfg.output_path, "Output path (default stdout)");

    CLI::App* ellipsoid = app.add_subcommand("ellipsoid", "Confidence ellipsoid for a location");
    ellipsoid->add_option("-i,--input", cfg.input_path, "Input CSV")->required();
    std::string ellipsoid_method = "hl";
    ellipsoid->add_option("-m,--method", ellipsoid_method, "Estimator")
        ->check(CLI::IsMember(estimators));
    ellipsoid->add_option("--level", cfg.level, "Confidence level");
    ellipsoid->add_option("--bhat", cfg.bhat, "B-hat mode: rank|exact|subsample=M");
    ellipsoid->add_option("-o,--output", cfg.output_path, "Output path (default stdout)");

    const auto add_study_options = [&](CLI::App* cmd) {
        cmd->add_option("--family", cfg.family, "Sampling family")
            ->check(CLI::IsMember({"normal", "t"}));
        cmd->add_option("--df", cfg.df, "Degrees of freedom for the t family");
        cmd->add_option("--seed", cfg.seed, "Study seed");
        cmd->add_option("--reps", cfg.replications, "Replications per cell");
        cmd->add_option("--format", cfg.format, "Output format")
            ->check(CLI::IsMember({"csv", "json"}));
        cmd->add_option("-o,--output", cfg.output_path, "Output path (default stdout)");
    };

    CLI::App* simulate = app.add_subcommand("simulate", "Single-cell replication study");
    simulate->add_option("--n", cfg.n, "Sample size");
    simulate->add_option("--p", cfg.p, "Dimension (overrides --gamma)");
    simulate->add_option("--gamma", cfg.gamma, "Aspect ratio p/n");
    add_study_options(simulate);

    CLI::App* figure3 = app.add_subcommand("figure3", "Approximation-error study over a grid");
    figure3->add_option("--cell", cfg.cells, "Grid cell n:gamma (repeatable; default grid)");
    add_study_options(figure3);

    CLI::App* demo =
        app.add_subcommand("demo-equivariance", "Stretched-witness equivariance demonstration");
    demo->add_option("-o,--output", cfg.output_path, "Output path (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 4;
    }

    if (app.got_subcommand(estimate)) {
        cfg.command = Command::estimate;
    } else if (app.got_subcommand(test)) {
        cfg.command = Command::test;
        cfg.method = test_method;
    } else if (app.got_subcommand(ellipsoid)) {
        cfg.command = Command::ellipsoid;
        cfg.method = ellipsoid_method;
    } else if (app.got_subcommand(simulate)) {
        cfg.command = Command::simulate;
    } else if (app.got_subcommand(figure3)) {
        cfg.command = Command::figure3;
    } else if (app.got_subcommand(demo)) {
        cfg.command = Command::demo_equivariance;
    }
    return run(cfg, out, err);
}

}  // namespace spatsign::cli
