// Command-line front end: dimension estimation on CSV data, closed-form
// limit tables, inconsistency-region sweeps, augmentation-curve experiments
// and the Monte Carlo simulation driver.

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "hdpa/asymptotics.hpp"
#include "hdpa/csv.hpp"
#include "hdpa/estimators.hpp"
#include "hdpa/simharness.hpp"
#include "hdpa/svg.hpp"
#include "hdpa/version.hpp"

namespace {

constexpr int kExitParseError = 2;
constexpr int kExitPrecondition = 3;

struct CliError {
    int exit_code;
    std::string message;
};

hdpa::Sigma2Spec parse_sigma2(const std::string& text) {
    if (text == "estimate") return hdpa::Sigma2Spec::estimate();
    if (text.rfind("oracle:", 0) == 0) {
        try {
            return hdpa::Sigma2Spec::oracle(std::stod(text.substr(7)));
        } catch (const std::exception&) {
            throw CliError{kExitParseError, "cannot parse --sigma2 value: " + text};
        }
    }
    throw CliError{kExitParseError, "--sigma2 must be 'estimate' or 'oracle:<value>'"};
}

std::vector<double> parse_double_list(const std::string& text, const char* what) {
    std::vector<double> values;
    std::size_t start = 0;
    while (start <= text.size()) {
        const std::size_t comma = text.find(',', start);
        const std::string field =
            text.substr(start, (comma == std::string::npos ? text.size() : comma) - start);
        try {
            values.push_back(std::stod(field));
        } catch (const std::exception&) {
            throw CliError{kExitParseError, std::string("cannot parse ") + what + ": " + field};
        }
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return values;
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw CliError{1, "cannot open output file: " + path.string()};
    out << content;
}

std::ofstream open_csv(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw CliError{1, "cannot open output file: " + path.string()};
    out << hdpa::sim::kCsvSchemaHeader << '\n';
    return out;
}

std::filesystem::path prepare_out_dir(const std::string& out_dir) {
    std::filesystem::path path(out_dir);
    std::filesystem::create_directories(path);
    return path;
}

// ---------------------------------------------------------------------------
// estimate

struct EstimateOptions {
    std::string input;
    std::string method = "hdpa";
    long long r = 0;
    double gamma_r = 0.0;
    std::string sigma2 = "estimate";
    int K = 0;  // 0 = automatic
    std::uint64_t seed = 1;
    int augmentations = 1;
    std::string out_dir = ".";
    bool emit_svg = false;
};

int run_estimate(const EstimateOptions& opt) {
    hdpa::Matrix data;
    try {
        data = hdpa::csv::read_matrix_file(opt.input);
    } catch (const hdpa::csv::ParseError& err) {
        std::cerr << "error: " << err.what() << '\n';
        return kExitParseError;
    }
    const Eigen::Index n = data.rows();
    const Eigen::Index p = data.cols();

    Eigen::Index r = static_cast<Eigen::Index>(opt.r);
    if (r == 0 && opt.gamma_r > 0.0)
        r = static_cast<Eigen::Index>(std::llround(opt.gamma_r * static_cast<double>(n)));
    if (r < 1) {
        std::cerr << "error: augmentation size must be positive (use --r or --gamma-r)\n";
        return kExitPrecondition;
    }
    if (opt.K > p) {
        std::cerr << "error: K exceeds p\n";
        return kExitPrecondition;
    }
    const hdpa::Sigma2Spec sigma2 = parse_sigma2(opt.sigma2);

    hdpa::EstimateReport report;
    const hdpa::RngSeed seed{opt.seed, 0};
    try {
        if (opt.method == "pa") {
            const int K = opt.K > 0 ? opt.K : hdpa::default_K(p, n);
            report = hdpa::pa_estimate(data, r, sigma2, K, seed, opt.augmentations);
        } else {
            int K = opt.K > 0 ? opt.K : hdpa::default_K(p, n);
            K = std::min<int>(K, static_cast<int>(std::min(p, n - 2)) - 1);
            report = hdpa::hdpa_estimate(data, r, sigma2, K, seed, opt.augmentations);
        }
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << '\n';
        return kExitPrecondition;
    }

    nlohmann::json doc;
    doc["schema"] = "hdpa-json v1";
    doc["version"] = hdpa::kVersion;
    doc["d_hat"] = report.d_hat;
    doc["method"] = hdpa::to_string(report.method);
    doc["K"] = report.K;
    doc["n"] = n;
    doc["p"] = p;
    doc["r"] = r;
    doc["seed"] = opt.seed;
    doc["sigma2_used"] = report.sigma2_used;
    doc["sigma2_source"] = hdpa::to_string(report.sigma2_source);
    doc["diagnostics"] = report.diagnostics;
    if (!report.h_differences.empty()) doc["h_differences"] = report.h_differences;
    doc["identifiability_warning"] = report.identifiability_warning;
    doc["warnings"] = report.warnings;
    doc["covariance_divisor"] = hdpa::kCovarianceDivisor;

    const auto out_dir = prepare_out_dir(opt.out_dir);
    write_text_file(out_dir / "estimate.json", doc.dump(2) + "\n");

    if (opt.emit_svg) {
        hdpa::svg::LinePlot plot(
            report.method == hdpa::Method::kPa ? "Augmentation objective" : "HDPA differences",
            report.method == hdpa::Method::kPa ? "k" : "j",
            report.method == hdpa::Method::kPa ? "phi_n(k)" : "h_{j+1} - h_j");
        std::vector<std::pair<double, double>> points;
        if (report.method == hdpa::Method::kPa) {
            for (std::size_t k = 0; k < report.diagnostics.size(); ++k)
                points.emplace_back(static_cast<double>(k), report.diagnostics[k]);
        } else {
            for (std::size_t j = 0; j < report.h_differences.size(); ++j)
                points.emplace_back(static_cast<double>(j + 1), report.h_differences[j]);
        }
        plot.add_series("diagnostic", points, "#c0392b", true, true);
        write_text_file(out_dir / "estimate.svg", plot.render());
    }

    std::cout << "d_hat=" << report.d_hat << " method=" << hdpa::to_string(report.method)
              << " sigma2=" << report.sigma2_used << '\n';
    return 0;
}

// ---------------------------------------------------------------------------
// limits

struct LimitsOptions {
    std::string lambdas = "1";
    double sigma2 = 1.0;
    double gamma_p = 0.0;
    double gamma_r = 0.0;
    int K = 0;
    std::string out_dir = ".";
};

int run_limits(const LimitsOptions& opt) {
    const std::vector<double> lambdas = parse_double_list(opt.lambdas, "--lambdas");
    try {
        const hdpa::asy::SpikedModel model(lambdas, opt.sigma2);
        const hdpa::asy::AspectRatios ratios(opt.gamma_p, opt.gamma_r);
        const int K = opt.K > 0 ? opt.K : model.d() + 5;
        const auto profile = hdpa::asy::limit_profile(model, ratios, K);

        auto out = open_csv(prepare_out_dir(opt.out_dir) / "limits.csv");
        out << "j,c_norm_limit,tau_augmented_limit,tau_original_limit,h_limit,phi_limit\n";
        out << "0,,,,," << hdpa::csv::format_double(profile.phi_limits[0]) << '\n';
        for (int j = 1; j <= K + 1; ++j) {
            out << j << ',';
            if (j <= K) out << hdpa::csv::format_double(profile.c_norm_limits[j - 1]);
            out << ',' << hdpa::csv::format_double(profile.tau_limits_augmented[j - 1]) << ','
                << hdpa::csv::format_double(profile.tau_limits_original[j - 1]) << ','
                << hdpa::csv::format_double(profile.h_limits[j - 1]) << ',';
            if (j <= K) out << hdpa::csv::format_double(profile.phi_limits[static_cast<std::size_t>(j)]);
            out << '\n';
        }
        std::cout << "wrote limits.csv (K=" << K << ")\n";
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << '\n';
        return kExitPrecondition;
    }
    return 0;
}

// ---------------------------------------------------------------------------
// region

struct RegionOptions {
    std::string sweep = "lambda";
    double gamma_p = 0.75;
    double lambda = 1.0;
    double sigma2 = 1.0;
    double min = 0.0;
    double max = 0.0;
    int steps = 50;
    std::string out_dir = ".";
};

int run_region(const RegionOptions& opt) {
    try {
        auto out = open_csv(prepare_out_dir(opt.out_dir) / "region.csv");
        out << "sweep,value,gamma_r0,feasible_gamma_r_max,boundary_found\n";
        for (int i = 0; i <= opt.steps; ++i) {
            const double value = opt.min + (opt.max - opt.min) * i / opt.steps;
            double lambda = opt.lambda;
            double gamma_p = opt.gamma_p;
            if (opt.sweep == "lambda")
                lambda = value;
            else
                gamma_p = value;
            const double feasible = lambda * lambda / (opt.sigma2 * opt.sigma2) - gamma_p;
            if (!(feasible > 2e-9)) continue;
            const hdpa::asy::SpikedModel model({lambda}, opt.sigma2);
            const auto boundary = hdpa::asy::inconsistency_boundary(model, gamma_p, opt.sigma2);
            out << opt.sweep << ',' << hdpa::csv::format_double(value) << ',';
            if (boundary) out << hdpa::csv::format_double(*boundary);
            out << ',' << hdpa::csv::format_double(feasible) << ',' << (boundary ? 1 : 0)
                << '\n';
        }
        std::cout << "wrote region.csv\n";
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << '\n';
        return kExitPrecondition;
    }
    return 0;
}

// ---------------------------------------------------------------------------
// curves

struct CurvesOptions {
    long long n = 400;
    int replicates = 100;
    double lambda = 1.0;
    double sigma2 = 1.0;
    int K = 6;
    std::uint64_t seed = 1;
    std::string gamma_p;  // empty: the four reference cells
    std::string gamma_r;
    std::string out_dir = ".";
    bool emit_svg = true;
};

int run_curves(const CurvesOptions& opt) {
    std::vector<std::pair<double, double>> cells;
    if (!opt.gamma_p.empty() || !opt.gamma_r.empty()) {
        if (opt.gamma_p.empty() || opt.gamma_r.empty())
            throw CliError{kExitParseError, "--gamma-p and --gamma-r must be given together"};
        for (double gp : parse_double_list(opt.gamma_p, "--gamma-p"))
            for (double gr : parse_double_list(opt.gamma_r, "--gamma-r"))
                cells.emplace_back(gp, gr);
    } else {
        cells = {{0.025, 0.01}, {0.025, 0.5}, {0.25, 0.01}, {0.25, 0.5}};
    }

    try {
        const auto out_dir = prepare_out_dir(opt.out_dir);
        auto out = open_csv(out_dir / "curves.csv");
        out << "n,p,r,k,mean_phi,limit_phi\n";
        for (const auto& [gp, gr] : cells) {
            const auto n = static_cast<Eigen::Index>(opt.n);
            const auto p = static_cast<Eigen::Index>(std::llround(gp * static_cast<double>(n)));
            const auto r = static_cast<Eigen::Index>(std::llround(gr * static_cast<double>(n)));
            const auto table = hdpa::sim::average_phi_curves(
                n, p, r, opt.lambda, opt.sigma2, opt.K, opt.replicates, {opt.seed, 0});
            for (std::size_t k = 0; k < table.mean_phi.size(); ++k)
                out << n << ',' << p << ',' << r << ',' << k << ','
                    << hdpa::csv::format_double(table.mean_phi[k]) << ','
                    << hdpa::csv::format_double(table.limit_phi[k]) << '\n';
            if (opt.emit_svg) {
                hdpa::svg::LinePlot plot("Average augmentation curve, p=" + std::to_string(p) +
                                             ", r=" + std::to_string(r),
                                         "k", "phi(k)");
                std::vector<std::pair<double, double>> empirical;
                std::vector<std::pair<double, double>> limit;
                for (std::size_t k = 0; k < table.mean_phi.size(); ++k) {
                    empirical.emplace_back(static_cast<double>(k), table.mean_phi[k]);
                    limit.emplace_back(static_cast<double>(k), table.limit_phi[k]);
                }
                plot.add_series("mean phi_n", empirical, "#2980b9", false, true);
                plot.add_series("limit phi", limit, "#c0392b", true, false);
                write_text_file(out_dir / ("curves_p" + std::to_string(p) + "_r" +
                                           std::to_string(r) + ".svg"),
                                plot.render());
            }
            std::cout << "cell p=" << p << " r=" << r
                      << ": empirical argmin=" << table.empirical_argmin
                      << " limit argmin=" << table.limit_argmin << '\n';
        }
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << '\n';
        return kExitPrecondition;
    }
    return 0;
}

// ---------------------------------------------------------------------------
// simulate

struct SimulateOptions {
    int model = 1;
    std::vector<std::string> cells;
    std::string n_list;
    std::string gamma_p_list;
    std::string gamma_r_list;
    int m = 100;
    std::string methods = "hdpa";
    std::string sigma2 = "oracle:1";
    std::string lambdas;
    double sigma2_truth = 1.0;
    int K = hdpa::kDefaultK;
    std::uint64_t seed = 1;
    int threads = 0;
    bool full = false;
    bool emit_data = false;
    std::string out_dir = ".";
};

void parse_cell(const std::string& text, std::vector<Eigen::Index>& n_values,
                std::vector<double>& gp_values, std::vector<double>& gr_values) {
    Eigen::Index n = 0;
    double gp = -1.0;
    double gr = -1.0;
    std::size_t start = 0;
    while (start <= text.size()) {
        const std::size_t comma = text.find(',', start);
        const std::string field =
            text.substr(start, (comma == std::string::npos ? text.size() : comma) - start);
        const std::size_t eq = field.find('=');
        if (eq == std::string::npos)
            throw CliError{kExitParseError, "cell fields must look like key=value: " + field};
        const std::string key = field.substr(0, eq);
        const std::string value = field.substr(eq + 1);
        try {
            if (key == "n")
                n = static_cast<Eigen::Index>(std::stoll(value));
            else if (key == "gp")
                gp = std::stod(value);
            else if (key == "gr")
                gr = std::stod(value);
            else
                throw CliError{kExitParseError, "unknown cell key: " + key};
        } catch (const CliError&) {
            throw;
        } catch (const std::exception&) {
            throw CliError{kExitParseError, "cannot parse cell value: " + field};
        }
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    if (n < 2 || gp <= 0.0 || gr <= 0.0)
        throw CliError{kExitParseError, "cell needs n=<int>,gp=<real>,gr=<real>: " + text};
    n_values.push_back(n);
    gp_values.push_back(gp);
    gr_values.push_back(gr);
}

int run_simulate(const SimulateOptions& opt) {
    hdpa::sim::SimulationGrid grid;
    grid.model = opt.model == 2 ? hdpa::sim::Model::kScaledBernoulli : hdpa::sim::Model::kGaussian;
    grid.sigma2_truth = opt.sigma2_truth;
    if (!opt.lambdas.empty()) grid.lambdas = parse_double_list(opt.lambdas, "--lambdas");
    grid.replicates = opt.m;
    grid.K = opt.K;
    grid.base_seed = {opt.seed, 0};
    grid.threads = opt.threads;

    const hdpa::Sigma2Spec sigma2 = parse_sigma2(opt.sigma2);
    grid.sigma2_mode = sigma2.source;
    if (sigma2.source == hdpa::Sigma2Source::kOracle) grid.sigma2_truth = sigma2.value;

    grid.methods.clear();
    {
        std::size_t start = 0;
        while (start <= opt.methods.size()) {
            const std::size_t comma = opt.methods.find(',', start);
            const std::string name = opt.methods.substr(
                start, (comma == std::string::npos ? opt.methods.size() : comma) - start);
            if (name == "pa")
                grid.methods.push_back(hdpa::Method::kPa);
            else if (name == "hdpa")
                grid.methods.push_back(hdpa::Method::kHdpa);
            else
                throw CliError{kExitParseError, "unknown method: " + name};
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
    }

    if (opt.full) {
        grid.n_values = {100, 200, 500, 1000};
        grid.gamma_p_values = {0.05, 0.2, 0.5, 1.0, 1.5};
        grid.gamma_r_values = {0.05, 0.2, 0.5, 1.0, 1.5, 2.5, 5.0};
        grid.replicates = opt.m > 0 ? opt.m : 1000;
    } else if (!opt.cells.empty()) {
        // Each --cell contributes exactly one (n, gp, gr) combination; run
        // them as single-point grids to avoid a cartesian blow-up.
        hdpa::sim::SimulationReport merged;
        const auto out_dir = prepare_out_dir(opt.out_dir);
        int cell_ordinal = 0;
        for (const std::string& cell_text : opt.cells) {
            hdpa::sim::SimulationGrid cell_grid = grid;
            parse_cell(cell_text, cell_grid.n_values, cell_grid.gamma_p_values,
                       cell_grid.gamma_r_values);
            cell_grid.base_seed = {hdpa::hash_combine(opt.seed, static_cast<std::uint64_t>(
                                                                    cell_ordinal)),
                                   0};
            try {
                const auto report = hdpa::sim::run_grid(cell_grid);
                merged.cells.insert(merged.cells.end(), report.cells.begin(),
                                    report.cells.end());
                merged.true_d = report.true_d;
            } catch (const std::exception& err) {
                std::cerr << "error: " << err.what() << '\n';
                return kExitPrecondition;
            }
            if (opt.emit_data && cell_ordinal == 0) {
                const auto n = cell_grid.n_values[0];
                const auto p = static_cast<Eigen::Index>(
                    std::llround(cell_grid.gamma_p_values[0] * static_cast<double>(n)));
                const hdpa::sim::GeneratorSpec gen{cell_grid.model, cell_grid.lambdas,
                                                   cell_grid.sigma2_truth, p, n};
                const hdpa::Matrix data = hdpa::sim::generate(
                    gen, {hdpa::hash_combine(cell_grid.base_seed.seed, 0, 0),
                          hdpa::hash_combine(cell_grid.base_seed.stream, 0)});
                std::ofstream data_out(out_dir / "data.csv", std::ios::binary | std::ios::trunc);
                hdpa::csv::write_matrix(data_out, data);
            }
            ++cell_ordinal;
        }
        merged.base_seed = opt.seed;
        std::ofstream csv_out(out_dir / "simulation.csv", std::ios::binary | std::ios::trunc);
        hdpa::sim::write_report_csv(csv_out, merged);
        write_text_file(out_dir / "simulation.json",
                        hdpa::sim::report_to_json(merged).dump(2) + "\n");
        std::cout << "wrote simulation.csv (" << merged.cells.size() << " cells)\n";
        return 0;
    } else {
        grid.n_values = opt.n_list.empty()
                            ? std::vector<Eigen::Index>{200}
                            : [&] {
                                  std::vector<Eigen::Index> out;
                                  for (double v : parse_double_list(opt.n_list, "--n"))
                                      out.push_back(static_cast<Eigen::Index>(std::llround(v)));
                                  return out;
                              }();
        grid.gamma_p_values = opt.gamma_p_list.empty()
                                  ? std::vector<double>{0.2}
                                  : parse_double_list(opt.gamma_p_list, "--gamma-p");
        grid.gamma_r_values = opt.gamma_r_list.empty()
                                  ? std::vector<double>{0.5}
                                  : parse_double_list(opt.gamma_r_list, "--gamma-r");
    }

    try {
        const auto report = hdpa::sim::run_grid(grid);
        const auto out_dir = prepare_out_dir(opt.out_dir);
        std::ofstream csv_out(out_dir / "simulation.csv", std::ios::binary | std::ios::trunc);
        hdpa::sim::write_report_csv(csv_out, report);
        write_text_file(out_dir / "simulation.json",
                        hdpa::sim::report_to_json(report).dump(2) + "\n");
        if (opt.emit_data) {
            const auto n = grid.n_values[0];
            const auto p = static_cast<Eigen::Index>(
                std::llround(grid.gamma_p_values[0] * static_cast<double>(n)));
            const hdpa::sim::GeneratorSpec gen{grid.model, grid.lambdas, grid.sigma2_truth, p, n};
            const hdpa::Matrix data =
                hdpa::sim::generate(gen, {hdpa::hash_combine(grid.base_seed.seed, 0, 0),
                                          hdpa::hash_combine(grid.base_seed.stream, 0)});
            std::ofstream data_out(out_dir / "data.csv", std::ios::binary | std::ios::trunc);
            hdpa::csv::write_matrix(data_out, data);
        }
        std::cout << "wrote simulation.csv (" << report.cells.size() << " cells)\n";
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << '\n';
        return kExitPrecondition;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Predictor-augmentation dimension estimation toolkit"};
    app.set_version_flag("--version", hdpa::kVersion);
    app.set_config("--config");
    app.require_subcommand(1);

    EstimateOptions est;
    auto* cmd_est = app.add_subcommand("estimate", "Estimate signal dimension from a CSV matrix");
    cmd_est->add_option("--input", est.input, "input CSV (rows = observations)")->required();
    cmd_est->add_option("--method", est.method, "pa or hdpa")
        ->check(CLI::IsMember({"pa", "hdpa"}));
    cmd_est->add_option("--r", est.r, "number of augmented columns");
    cmd_est->add_option("--gamma-r", est.gamma_r, "augmentation rate r/n");
    cmd_est->add_option("--sigma2", est.sigma2, "'estimate' or 'oracle:<value>'");
    cmd_est->add_option("--K", est.K, "search range upper bound (0 = automatic)");
    cmd_est->add_option("--seed", est.seed, "random seed");
    cmd_est->add_option("--augmentations", est.augmentations,
                        "independent augmentation draws to average");
    cmd_est->add_option("--out", est.out_dir, "output directory");
    cmd_est->add_flag("--svg", est.emit_svg, "also write a diagnostic plot");

    LimitsOptions lim;
    auto* cmd_lim = app.add_subcommand("limits", "Tabulate closed-form asymptotic limits");
    cmd_lim->add_option("--lambdas", lim.lambdas, "comma-separated spikes, decreasing")->required();
    cmd_lim->add_option("--sigma2", lim.sigma2, "noise variance");
    cmd_lim->add_option("--gamma-p", lim.gamma_p, "limit of p/n")->required();
    cmd_lim->add_option("--gamma-r", lim.gamma_r, "limit of r/n")->required();
    cmd_lim->add_option("--K", lim.K, "table length (0 = d + 5)");
    cmd_lim->add_option("--out", lim.out_dir, "output directory");

    RegionOptions reg;
    auto* cmd_reg = app.add_subcommand("region", "Sweep the inconsistency boundary gamma_r^0");
    cmd_reg->add_option("--sweep", reg.sweep, "lambda or gamma-p")
        ->check(CLI::IsMember({"lambda", "gamma-p"}));
    cmd_reg->add_option("--gamma-p", reg.gamma_p, "fixed gamma_p (lambda sweep)");
    cmd_reg->add_option("--lambda", reg.lambda, "fixed spike (gamma-p sweep)");
    cmd_reg->add_option("--sigma2", reg.sigma2, "noise variance");
    cmd_reg->add_option("--min", reg.min, "sweep start")->required();
    cmd_reg->add_option("--max", reg.max, "sweep end")->required();
    cmd_reg->add_option("--steps", reg.steps, "sweep steps");
    cmd_reg->add_option("--out", reg.out_dir, "output directory");

    CurvesOptions cur;
    auto* cmd_cur = app.add_subcommand("curves", "Average augmentation curves vs. their limits");
    cmd_cur->add_option("--n", cur.n, "sample size");
    cmd_cur->add_option("--m", cur.replicates, "replicates per cell");
    cmd_cur->add_option("--lambda", cur.lambda, "single spike");
    cmd_cur->add_option("--sigma2", cur.sigma2, "noise variance");
    cmd_cur->add_option("--K", cur.K, "curve length");
    cmd_cur->add_option("--seed", cur.seed, "random seed");
    cmd_cur->add_option("--gamma-p", cur.gamma_p, "comma list (default: reference cells)");
    cmd_cur->add_option("--gamma-r", cur.gamma_r, "comma list (default: reference cells)");
    cmd_cur->add_option("--out", cur.out_dir, "output directory");

    SimulateOptions simo;
    auto* cmd_sim = app.add_subcommand("simulate", "Monte Carlo error-proportion study");
    cmd_sim->add_option("--model", simo.model, "1 = Gaussian, 2 = scaled Bernoulli")
        ->check(CLI::IsMember({1, 2}));
    cmd_sim->add_option("--cell", simo.cells, "single cell n=<n>,gp=<gp>,gr=<gr> (repeatable)");
    cmd_sim->add_option("--n", simo.n_list, "comma list of sample sizes");
    cmd_sim->add_option("--gamma-p", simo.gamma_p_list, "comma list of p/n rates");
    cmd_sim->add_option("--gamma-r", simo.gamma_r_list, "comma list of r/n rates");
    cmd_sim->add_option("--m", simo.m, "replicates per cell");
    cmd_sim->add_option("--method", simo.methods, "comma list from {pa, hdpa}");
    cmd_sim->add_option("--sigma2", simo.sigma2, "'estimate' or 'oracle:<value>'");
    cmd_sim->add_option("--lambdas", simo.lambdas, "spikes (default: reference model)");
    cmd_sim->add_option("--sigma2-truth", simo.sigma2_truth, "data-generating noise variance");
    cmd_sim->add_option("--K", simo.K, "search range upper bound");
    cmd_sim->add_option("--seed", simo.seed, "base seed");
    cmd_sim->add_option("--threads", simo.threads, "worker threads (0 = HDPA_THREADS/auto)");
    cmd_sim->add_flag("--full", simo.full, "run the full factorial study grid");
    cmd_sim->add_flag("--emit-data", simo.emit_data, "also write one generated data set");
    cmd_sim->add_option("--out", simo.out_dir, "output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& err) {
        return app.exit(err) == 0 ? 0 : kExitParseError;
    }

    try {
        if (cmd_est->parsed()) return run_estimate(est);
        if (cmd_lim->parsed()) return run_limits(lim);
        if (cmd_reg->parsed()) return run_region(reg);
        if (cmd_cur->parsed()) return run_curves(cur);
        if (cmd_sim->parsed()) return run_simulate(simo);
    } catch (const CliError& err) {
        std::cerr << "error: " << err.message << '\n';
        return err.exit_code;
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << '\n';
        return 1;
    }
    return 0;
}
