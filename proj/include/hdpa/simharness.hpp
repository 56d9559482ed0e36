#pragma once

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <map>
#include <ostream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "hdpa/asymptotics.hpp"
#include "hdpa/csv.hpp"
#include "hdpa/estimators.hpp"
#include "hdpa/spectral.hpp"
#include "hdpa/version.hpp"

namespace hdpa::sim {

enum class Model { kGaussian, kScaledBernoulli };

inline const char* to_string(Model m) {
    return m == Model::kGaussian ? "gaussian" : "scaled_bernoulli";
}

/// Spike sequence of the simulation study covariance
/// diag(5, 4.8, ..., 3.2, 3, 0, ..., 0) + I: eleven spikes stepping by 0.2.
inline std::vector<double> reference_spikes() {
    std::vector<double> spikes;
    for (int i = 0; i < 11; ++i) spikes.push_back(5.0 - 0.2 * i);
    return spikes;
}

/// One synthetic data set: n observations from a p-variate population with
/// covariance diag(lambda_1, ..., lambda_d, 0, ..., 0) + sigma^2 I.
struct GeneratorSpec {
    Model model = Model::kGaussian;
    std::vector<double> lambdas;
    double sigma2 = 1.0;
    Eigen::Index p = 0;
    Eigen::Index n = 0;
};

inline Matrix generate(const GeneratorSpec& spec, RngSeed seed) {
    if (spec.p < 1 || spec.n < 2) throw std::domain_error("generate: need p >= 1, n >= 2");
    if (!(spec.sigma2 > 0.0)) throw std::domain_error("generate: sigma2 must be positive");
    if (static_cast<Eigen::Index>(spec.lambdas.size()) > spec.p)
        throw std::domain_error("generate: more spikes than variables");
    for (double lambda : spec.lambdas)
        if (!(lambda + spec.sigma2 >= 0.0)) throw std::domain_error("generate: non-PSD covariance");
    Vector sd(spec.p);
    for (Eigen::Index j = 0; j < spec.p; ++j) {
        const double spike =
            j < static_cast<Eigen::Index>(spec.lambdas.size()) ? spec.lambdas[static_cast<std::size_t>(j)] : 0.0;
        sd(j) = std::sqrt(spike + spec.sigma2);
    }
    Matrix data(spec.n, spec.p);
    Rng rng(seed);
    if (spec.model == Model::kGaussian) {
        for (Eigen::Index j = 0; j < spec.p; ++j)
            for (Eigen::Index i = 0; i < spec.n; ++i) data(i, j) = sd(j) * rng.gaussian();
    } else {
        for (Eigen::Index j = 0; j < spec.p; ++j)
            for (Eigen::Index i = 0; i < spec.n; ++i)
                data(i, j) = rng.uniform01() < 0.5 ? -sd(j) : sd(j);
    }
    return data;
}

/// Factorial Monte Carlo experiment description.
struct SimulationGrid {
    Model model = Model::kGaussian;
    std::vector<double> lambdas = reference_spikes();
    double sigma2_truth = 1.0;
    std::vector<Eigen::Index> n_values;
    std::vector<double> gamma_p_values;
    std::vector<double> gamma_r_values;
    int replicates = 100;
    std::vector<Method> methods = {Method::kHdpa};
    Sigma2Source sigma2_mode = Sigma2Source::kOracle;
    RngSeed base_seed{};
    int K = kDefaultK;
    int threads = 0;  // 0 = HDPA_THREADS env, then hardware concurrency
};

struct CellResult {
    Model model = Model::kGaussian;
    Eigen::Index n = 0;
    double gamma_p = 0.0;
    double gamma_r = 0.0;
    Eigen::Index p = 0;
    Eigen::Index r = 0;
    Method method = Method::kPa;
    Sigma2Source sigma2_mode = Sigma2Source::kOracle;
    int replicates = 0;
    int failures = 0;
    bool degraded = false;  // > 1% replicate failures
    double proportion_wrong = 0.0;
    double mean_d_hat = 0.0;
    std::map<int, int> d_hat_counts;
    std::vector<std::string> failure_seeds;
    double wall_seconds = 0.0;  // in-memory diagnostic; not serialized
};

struct SimulationReport {
    std::vector<CellResult> cells;
    std::uint64_t base_seed = 0;
    int true_d = 0;
    std::string divisor = kCovarianceDivisor;
    std::string version = kVersion;
};

namespace detail {

inline int resolve_threads(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("HDPA_THREADS")) {
        const int parsed = std::atoi(env);
        if (parsed > 0) return parsed;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

struct CellSpec {
    Eigen::Index n;
    double gamma_p;
    double gamma_r;
    Method method;
    Eigen::Index p;
    Eigen::Index r;
    int K;
};

/// Runs estimation tasks over a fixed task list with a worker pool. Results
/// land in a preallocated slot per task, so the aggregation is independent of
/// the execution order and thread count.
template <class Task>
void run_parallel(int threads, int task_count, Task&& task) {
    if (threads <= 1) {
        for (int i = 0; i < task_count; ++i) task(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
            for (int i = next.fetch_add(1); i < task_count; i = next.fetch_add(1)) task(i);
        });
    }
    for (auto& worker : pool) worker.join();
}

}  // namespace detail

/// Runs the full factorial grid. Per-replicate seeds are derived from
/// (base seed, cell ordinal, replicate ordinal), so the report is
/// bit-identical for any thread count. Replicate failures are recorded per
/// cell and never abort the grid.
inline SimulationReport run_grid(const SimulationGrid& grid) {
    if (grid.replicates < 1) throw std::domain_error("run_grid: need at least one replicate");
    if (grid.methods.empty()) throw std::domain_error("run_grid: no methods selected");
    const int d_true = static_cast<int>(grid.lambdas.size());

    std::vector<detail::CellSpec> cells;
    for (Eigen::Index n : grid.n_values)
        for (double gp : grid.gamma_p_values)
            for (double gr : grid.gamma_r_values)
                for (Method method : grid.methods) {
                    const auto p = static_cast<Eigen::Index>(std::llround(gp * static_cast<double>(n)));
                    const auto r = static_cast<Eigen::Index>(std::llround(gr * static_cast<double>(n)));
                    if (p < d_true + 2)
                        throw std::domain_error("run_grid: cell has p < d + 2");
                    if (r < 1) throw std::domain_error("run_grid: cell has r < 1");
                    int K = std::min(grid.K, static_cast<int>(std::min(p, n - 2)) - 1);
                    if (method == Method::kHdpa && K < 2)
                        throw std::domain_error("run_grid: cell too small for HDPA search range");
                    cells.push_back({n, gp, gr, method, p, r, std::max(1, K)});
                }

    const int m = grid.replicates;
    const int task_count = static_cast<int>(cells.size()) * m;
    std::vector<int> d_hats(static_cast<std::size_t>(task_count), -1);  // -1 marks failure
    std::vector<double> cell_wall(cells.size(), 0.0);

    const Sigma2Spec sigma2 = grid.sigma2_mode == Sigma2Source::kOracle
                                  ? Sigma2Spec::oracle(grid.sigma2_truth)
                                  : Sigma2Spec::estimate();

    const auto run_task = [&](int task) {
        const int cell_idx = task / m;
        const int rep = task % m;
        const detail::CellSpec& cell = cells[static_cast<std::size_t>(cell_idx)];
        const std::uint64_t derived = hash_combine(
            grid.base_seed.seed, static_cast<std::uint64_t>(cell_idx), static_cast<std::uint64_t>(rep));
        const RngSeed data_seed{derived, hash_combine(grid.base_seed.stream, 0)};
        const RngSeed augment_seed{derived, hash_combine(grid.base_seed.stream, 1)};
        try {
            GeneratorSpec gen{grid.model, grid.lambdas, grid.sigma2_truth, cell.p, cell.n};
            const Matrix data = generate(gen, data_seed);
            const EstimateReport report =
                cell.method == Method::kPa
                    ? pa_estimate(data, cell.r, sigma2, cell.K, augment_seed)
                    : hdpa_estimate(data, cell.r, sigma2, cell.K, augment_seed);
            d_hats[static_cast<std::size_t>(task)] = report.d_hat;
        } catch (const std::exception&) {
            d_hats[static_cast<std::size_t>(task)] = -1;
        }
    };

    const int threads = detail::resolve_threads(grid.threads);
    const auto started = std::chrono::steady_clock::now();
    detail::run_parallel(threads, task_count, run_task);
    const double total_wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();

    SimulationReport report;
    report.base_seed = grid.base_seed.seed;
    report.true_d = d_true;
    for (std::size_t cell_idx = 0; cell_idx < cells.size(); ++cell_idx) {
        const detail::CellSpec& cell = cells[cell_idx];
        CellResult result;
        result.model = grid.model;
        result.n = cell.n;
        result.gamma_p = cell.gamma_p;
        result.gamma_r = cell.gamma_r;
        result.p = cell.p;
        result.r = cell.r;
        result.method = cell.method;
        result.sigma2_mode = grid.sigma2_mode;
        result.replicates = m;
        long long d_sum = 0;
        int wrong = 0;
        int ok = 0;
        for (int rep = 0; rep < m; ++rep) {
            const int d_hat = d_hats[cell_idx * static_cast<std::size_t>(m) +
                                     static_cast<std::size_t>(rep)];
            if (d_hat < 0) {
                ++result.failures;
                const std::uint64_t derived =
                    hash_combine(grid.base_seed.seed, static_cast<std::uint64_t>(cell_idx),
                                 static_cast<std::uint64_t>(rep));
                result.failure_seeds.push_back(std::to_string(derived));
                continue;
            }
            ++ok;
            d_sum += d_hat;
            if (d_hat != d_true) ++wrong;
            ++result.d_hat_counts[d_hat];
        }
        result.degraded = result.failures * 100 > m;
        result.proportion_wrong = ok > 0 ? static_cast<double>(wrong) / ok : 1.0;
        result.mean_d_hat = ok > 0 ? static_cast<double>(d_sum) / ok : 0.0;
        result.wall_seconds = total_wall / static_cast<double>(cells.size());
        report.cells.push_back(std::move(result));
    }
    return report;
}

inline constexpr const char* kCsvSchemaHeader = "# hdpa-csv v1";

/// One row per cell; floating-point fields carry 17 significant digits.
inline void write_report_csv(std::ostream& out, const SimulationReport& report) {
    out << kCsvSchemaHeader << '\n';
    out << "model,n,gamma_p,gamma_r,p,r,method,sigma2_mode,replicates,failures,degraded,"
           "proportion_wrong,mean_d_hat,d_hat_counts\n";
    for (const CellResult& cell : report.cells) {
        out << to_string(cell.model) << ',' << cell.n << ',' << csv::format_double(cell.gamma_p)
            << ',' << csv::format_double(cell.gamma_r) << ',' << cell.p << ',' << cell.r << ','
            << to_string(cell.method) << ',' << to_string(cell.sigma2_mode) << ','
            << cell.replicates << ',' << cell.failures << ',' << (cell.degraded ? 1 : 0) << ','
            << csv::format_double(cell.proportion_wrong) << ','
            << csv::format_double(cell.mean_d_hat) << ',';
        bool first = true;
        for (const auto& [d_hat, count] : cell.d_hat_counts) {
            if (!first) out << ';';
            out << d_hat << ':' << count;
            first = false;
        }
        out << '\n';
    }
}

inline nlohmann::json report_to_json(const SimulationReport& report) {
    nlohmann::json doc;
    doc["schema"] = "hdpa-json v1";
    doc["version"] = report.version;
    doc["base_seed"] = report.base_seed;
    doc["true_d"] = report.true_d;
    doc["covariance_divisor"] = report.divisor;
    doc["cells"] = nlohmann::json::array();
    for (const CellResult& cell : report.cells) {
        nlohmann::json entry;
        entry["model"] = to_string(cell.model);
        entry["n"] = cell.n;
        entry["gamma_p"] = cell.gamma_p;
        entry["gamma_r"] = cell.gamma_r;
        entry["p"] = cell.p;
        entry["r"] = cell.r;
        entry["method"] = to_string(cell.method);
        entry["sigma2_mode"] = to_string(cell.sigma2_mode);
        entry["replicates"] = cell.replicates;
        entry["failures"] = cell.failures;
        entry["degraded"] = cell.degraded;
        entry["proportion_wrong"] = cell.proportion_wrong;
        entry["mean_d_hat"] = cell.mean_d_hat;
        nlohmann::json counts = nlohmann::json::object();
        for (const auto& [d_hat, count] : cell.d_hat_counts)
            counts[std::to_string(d_hat)] = count;
        entry["d_hat_counts"] = counts;
        if (!cell.failure_seeds.empty()) entry["failure_seeds"] = cell.failure_seeds;
        doc["cells"].push_back(std::move(entry));
    }
    return doc;
}

/// One augmentation-curve experiment cell: empirical mean of phi_n per k,
/// paired with the limiting curve.
struct PhiCurveTable {
    Eigen::Index n = 0;
    Eigen::Index p = 0;
    Eigen::Index r = 0;
    double lambda = 0.0;
    double sigma2 = 0.0;
    int replicates = 0;
    std::vector<double> mean_phi;   // k = 0..K
    std::vector<double> limit_phi;  // k = 0..K
    int empirical_argmin = 0;
    int limit_argmin = 0;
};

/// Averages PA curves over independent replicates for a single-spike model
/// with oracle noise variance, and pairs them with the limiting curve at
/// (gamma_p, gamma_r) = (p/n, r/n).
inline PhiCurveTable average_phi_curves(Eigen::Index n, Eigen::Index p, Eigen::Index r,
                                        double lambda, double sigma2, int K, int replicates,
                                        RngSeed seed) {
    if (replicates < 1) throw std::domain_error("average_phi_curves: need replicates >= 1");
    PhiCurveTable table;
    table.n = n;
    table.p = p;
    table.r = r;
    table.lambda = lambda;
    table.sigma2 = sigma2;
    table.replicates = replicates;
    table.mean_phi.assign(static_cast<std::size_t>(K) + 1, 0.0);

    const GeneratorSpec gen{Model::kGaussian, {lambda}, sigma2, p, n};
    for (int rep = 0; rep < replicates; ++rep) {
        const std::uint64_t derived =
            hash_combine(seed.seed, 0, static_cast<std::uint64_t>(rep));
        const Matrix data = generate(gen, RngSeed{derived, hash_combine(seed.stream, 0)});
        const EstimateReport report =
            pa_estimate(data, r, Sigma2Spec::oracle(sigma2), K,
                        RngSeed{derived, hash_combine(seed.stream, 1)});
        for (std::size_t k = 0; k < table.mean_phi.size(); ++k)
            table.mean_phi[k] += report.diagnostics[k];
    }
    for (double& value : table.mean_phi) value /= replicates;

    const asy::SpikedModel model({lambda}, sigma2);
    const asy::AspectRatios ratios(static_cast<double>(p) / static_cast<double>(n),
                                   static_cast<double>(r) / static_cast<double>(n));
    table.limit_phi = asy::phi_limit(model, ratios, K);

    const auto argmin = [](const std::vector<double>& values) {
        int best = 0;
        for (int i = 1; i < static_cast<int>(values.size()); ++i)
            if (values[static_cast<std::size_t>(i)] < values[static_cast<std::size_t>(best)])
                best = i;
        return best;
    };
    table.empirical_argmin = argmin(table.mean_phi);
    table.limit_argmin = argmin(table.limit_phi);
    return table;
}

}  // namespace hdpa::sim
