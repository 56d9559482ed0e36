#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <sstream>

#include "hdpa/simharness.hpp"

using hdpa::Matrix;
using hdpa::RngSeed;
namespace sim = hdpa::sim;

TEST_CASE("reference spike sequence") {
    const auto spikes = sim::reference_spikes();
    REQUIRE(spikes.size() == 11);
    CHECK(spikes.front() == 5.0);
    CHECK(spikes.back() == Catch::Approx(3.0));
    for (std::size_t i = 1; i < spikes.size(); ++i)
        CHECK(spikes[i - 1] - spikes[i] == Catch::Approx(0.2));
}

TEST_CASE("two point generator support") {
    const sim::GeneratorSpec spec{sim::Model::kScaledBernoulli, {3.0}, 1.0, 1, 5000};
    const Matrix data = sim::generate(spec, RngSeed{1, 0});
    for (Eigen::Index i = 0; i < data.rows(); ++i)
        CHECK(std::abs(data(i, 0)) == Catch::Approx(2.0));
    CHECK(std::abs(data.col(0).mean()) < 5.0 * 2.0 / std::sqrt(5000.0));
}

TEST_CASE("gaussian generator covariance sanity") {
    const sim::GeneratorSpec spec{sim::Model::kGaussian, {}, 1.0, 3, 100000};
    const Matrix data = sim::generate(spec, RngSeed{2, 0});
    const Matrix cov = hdpa::sample_covariance(data);
    for (Eigen::Index a = 0; a < 3; ++a)
        for (Eigen::Index b = 0; b < 3; ++b)
            CHECK(cov(a, b) == Catch::Approx(a == b ? 1.0 : 0.0).margin(0.02));
}

TEST_CASE("two point generator population covariance") {
    const sim::GeneratorSpec spec{sim::Model::kScaledBernoulli,
                                  {4.0, 2.0, 1.0}, 1.0, 10, 100000};
    const Matrix data = sim::generate(spec, RngSeed{3, 0});
    const Matrix cov = hdpa::sample_covariance(data);
    for (Eigen::Index a = 0; a < 10; ++a) {
        for (Eigen::Index b = 0; b < 10; ++b) {
            double target = 0.0;
            if (a == b) target = 1.0 + (a == 0 ? 4.0 : a == 1 ? 2.0 : a == 2 ? 1.0 : 0.0);
            CHECK(cov(a, b) == Catch::Approx(target).margin(0.05));
        }
    }
}

TEST_CASE("generator validation and determinism") {
    const sim::GeneratorSpec spec{sim::Model::kGaussian, {2.0}, 1.0, 4, 50};
    const Matrix a = sim::generate(spec, RngSeed{10, 3});
    const Matrix b = sim::generate(spec, RngSeed{10, 3});
    CHECK(a.cwiseEqual(b).all());
    CHECK(!a.cwiseEqual(sim::generate(spec, RngSeed{10, 4})).all());

    sim::GeneratorSpec bad = spec;
    bad.p = 0;
    CHECK_THROWS_AS(sim::generate(bad, RngSeed{}), std::domain_error);
    bad = spec;
    bad.lambdas = {1.0, 1.0, 1.0, 1.0, 1.0};
    CHECK_THROWS_AS(sim::generate(bad, RngSeed{}), std::domain_error);
    bad = spec;
    bad.sigma2 = 0.0;
    CHECK_THROWS_AS(sim::generate(bad, RngSeed{}), std::domain_error);
}

namespace {

sim::SimulationGrid small_grid() {
    sim::SimulationGrid grid;
    grid.lambdas = {4.0};
    grid.n_values = {120};
    grid.gamma_p_values = {0.25};
    grid.gamma_r_values = {0.25};
    grid.replicates = 4;
    grid.methods = {hdpa::Method::kHdpa, hdpa::Method::kPa};
    grid.sigma2_mode = hdpa::Sigma2Source::kOracle;
    grid.base_seed = {2024, 0};
    grid.K = 5;
    grid.threads = 1;
    return grid;
}

std::string report_csv(const sim::SimulationReport& report) {
    std::ostringstream out;
    sim::write_report_csv(out, report);
    return out.str();
}

}  // namespace

TEST_CASE("single replicate cell") {
    auto grid = small_grid();
    grid.replicates = 1;
    grid.methods = {hdpa::Method::kHdpa};
    const auto report = sim::run_grid(grid);
    REQUIRE(report.cells.size() == 1);
    const auto& cell = report.cells[0];
    CHECK(cell.replicates == 1);
    int total = 0;
    for (const auto& [d_hat, count] : cell.d_hat_counts) total += count;
    CHECK(total == 1);
    CHECK(cell.p == 30);
    CHECK(cell.r == 30);
    CHECK(report.true_d == 1);
    CHECK(report.divisor == std::string("1/n"));
}

TEST_CASE("grid aggregation counts") {
    const auto report = sim::run_grid(small_grid());
    REQUIRE(report.cells.size() == 2);
    for (const auto& cell : report.cells) {
        CHECK(cell.proportion_wrong >= 0.0);
        CHECK(cell.proportion_wrong <= 1.0);
        int total = cell.failures;
        for (const auto& [d_hat, count] : cell.d_hat_counts) total += count;
        CHECK(total == cell.replicates);
        CHECK_FALSE(cell.degraded);
    }
}

TEST_CASE("report independent of thread count") {
    auto grid = small_grid();
    grid.threads = 1;
    const std::string serial = report_csv(sim::run_grid(grid));
    grid.threads = 4;
    const std::string parallel = report_csv(sim::run_grid(grid));
    CHECK(serial == parallel);
    grid.threads = 8;
    CHECK(report_csv(sim::run_grid(grid)) == serial);
}

TEST_CASE("csv schema header and json fields") {
    const auto report = sim::run_grid(small_grid());
    const std::string csv = report_csv(report);
    CHECK(csv.rfind(sim::kCsvSchemaHeader, 0) == 0);
    CHECK(csv.find("model,n,gamma_p") != std::string::npos);

    const auto doc = sim::report_to_json(report);
    CHECK(doc["schema"] == "hdpa-json v1");
    CHECK(doc["true_d"] == 1);
    CHECK(doc["covariance_divisor"] == "1/n");
    REQUIRE(doc["cells"].size() == 2);
    CHECK(doc["cells"][0].contains("d_hat_counts"));
}

TEST_CASE("grid validation") {
    auto grid = small_grid();
    grid.replicates = 0;
    CHECK_THROWS_AS(sim::run_grid(grid), std::domain_error);
    grid = small_grid();
    grid.methods = {};
    CHECK_THROWS_AS(sim::run_grid(grid), std::domain_error);
    grid = small_grid();
    grid.gamma_p_values = {0.01};  // p = 1 < d + 2
    CHECK_THROWS_AS(sim::run_grid(grid), std::domain_error);
    grid = small_grid();
    grid.gamma_r_values = {0.001};  // r = 0
    CHECK_THROWS_AS(sim::run_grid(grid), std::domain_error);
}

TEST_CASE("phi curve averaging") {
    const auto table = sim::average_phi_curves(400, 10, 4, 1.0, 1.0, 6, 30, RngSeed{42, 0});
    REQUIRE(table.mean_phi.size() == 7);
    REQUIRE(table.limit_phi.size() == 7);
    CHECK(table.limit_argmin == 1);
    CHECK(table.empirical_argmin == 1);
    for (int k = 0; k <= 5; ++k)
        CHECK(table.mean_phi[(std::size_t)k] ==
              Catch::Approx(table.limit_phi[(std::size_t)k]).margin(0.1));
    CHECK_THROWS_AS(sim::average_phi_curves(400, 10, 4, 1.0, 1.0, 6, 0, RngSeed{}),
                    std::domain_error);
}
