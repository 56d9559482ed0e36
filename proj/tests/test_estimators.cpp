#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "hdpa/asymptotics.hpp"
#include "hdpa/estimators.hpp"
#include "hdpa/simharness.hpp"

using hdpa::AugmentedSpectrum;
using hdpa::Matrix;
using hdpa::RngSeed;
using hdpa::Vector;

namespace {

AugmentedSpectrum make_spec(std::vector<double> eigenvalues, std::vector<double> c_norms,
                            Eigen::Index p, Eigen::Index r, Eigen::Index n) {
    AugmentedSpectrum spec;
    spec.eigenvalues = Eigen::Map<Vector>(eigenvalues.data(), (Eigen::Index)eigenvalues.size());
    spec.c_norms = Eigen::Map<Vector>(c_norms.data(), (Eigen::Index)c_norms.size());
    spec.p = p;
    spec.r = r;
    spec.n = n;
    return spec;
}

}  // namespace

TEST_CASE("pa objective hand values") {
    const auto spec = make_spec({2, 1, 1, 1}, {0, 0, 0}, 10, 5, 100);
    const auto phi = hdpa::pa_objective(spec, 3);
    REQUIRE(phi.size() == 4);
    CHECK(phi[0] == Catch::Approx(2.0 / 3.0));
    CHECK(phi[1] == Catch::Approx(0.25));
    CHECK_THROWS_AS(hdpa::pa_objective(spec, 4), std::domain_error);
    CHECK_THROWS_AS(hdpa::pa_objective(spec, -1), std::domain_error);
}

TEST_CASE("pa objective telescoping identity") {
    hdpa::Rng rng(RngSeed{4, 0});
    std::vector<double> taus, cs;
    double t = 5.0;
    for (int i = 0; i < 7; ++i) {
        taus.push_back(t);
        t *= 0.8;
        if (i < 6) cs.push_back(0.3 * rng.uniform01());
    }
    const auto spec = make_spec(taus, cs, 10, 5, 100);
    const auto phi = hdpa::pa_objective(spec, 6);
    double tau_sum = taus[0];
    for (int k = 1; k <= 6; ++k) {
        const double before = tau_sum;
        tau_sum += taus[(std::size_t)k];
        const double expected = cs[(std::size_t)(k - 1)] +
                                taus[(std::size_t)k] / (1.0 + tau_sum) -
                                taus[(std::size_t)(k - 1)] / (1.0 + before);
        CHECK(phi[(std::size_t)k] - phi[(std::size_t)(k - 1)] ==
              Catch::Approx(expected).margin(1e-14));
    }
}

TEST_CASE("debias bulk edge and sub-edge values") {
    const double s2 = 1.3;
    const double g = 0.6;
    const double edge = s2 * (1.0 + std::sqrt(g)) * (1.0 + std::sqrt(g));
    // the bracket cancels quadratically at the edge, so only ~1e-8 is exact
    CHECK(hdpa::debias(edge, g, s2) == Catch::Approx(s2 * std::sqrt(g)).margin(1e-7));
    CHECK(hdpa::debias(0.0, 1.0, 1.0) == Catch::Approx(-1.0));
    CHECK(hdpa::debias(2.0, (Eigen::Index)50, (Eigen::Index)100, 1.0) ==
          Catch::Approx(hdpa::debias(2.0, 0.5, 1.0)));
    CHECK_THROWS_AS(hdpa::debias(-1.0, 0.5, 1.0), std::domain_error);
    CHECK_THROWS_AS(hdpa::debias(1.0, 0.5, 0.0), std::invalid_argument);
}

TEST_CASE("debias inverts the forward spike map") {
    hdpa::Rng rng(RngSeed{99, 0});
    for (int i = 0; i < 200; ++i) {
        const double s2 = 0.2 + 3.0 * rng.uniform01();
        const double g = 0.05 + 2.5 * rng.uniform01();
        const double lam = s2 * std::sqrt(g) * (1.01 + 5.0 * rng.uniform01());
        const double tau = hdpa::mp::spike_forward(lam, s2, g);
        CHECK(hdpa::debias(tau, g, s2) == Catch::Approx(lam).margin(1e-10));
    }
}

TEST_CASE("h statistics cancellation at the limit ingredients") {
    // Feed exact limit ingredients: tau = forward(lambda) under gamma_p and
    // c_norm at its limit; the statistic must collapse to gamma_r sigma^2.
    const Eigen::Index n = 1000, p = 250, r = 250;
    const double gp = 0.25, gr = 0.25, s2 = 1.0, lam = 4.0;
    const hdpa::asy::SpikedModel model({lam}, s2);
    const hdpa::asy::AspectRatios ratios(gp, gr);
    const double tau = hdpa::mp::spike_forward(lam, s2, gp);
    const double climit = hdpa::asy::cnorm_limit(model, ratios, 1);

    Vector orig(3);
    orig << tau, s2, s2;
    const auto spec = make_spec({0, 0, 0}, {climit, 0.0, 0.0}, p, r, n);
    const auto h = hdpa::hdpa_statistics(orig, spec, s2, 2);
    REQUIRE(h.size() == 3);
    CHECK(h[0] == Catch::Approx(gr * s2).epsilon(1e-12));
    CHECK(h[1] == 0.0);  // c_norm zero forces h zero
}

TEST_CASE("h statistics clamps negative debiased values") {
    Vector orig(3);
    orig << 0.5, 0.1, 0.0;  // all below the bulk edge: f clamped to 0
    const auto spec = make_spec({0, 0, 0}, {0.4, 0.4, 0.4}, 50, 50, 100);
    const auto h = hdpa::hdpa_statistics(orig, spec, 1.0, 2);
    for (double v : h) CHECK(v == 0.0);
    CHECK_THROWS_AS(hdpa::hdpa_statistics(orig, spec, 1.0, 3), std::domain_error);
    CHECK_THROWS_AS(hdpa::hdpa_statistics(orig, spec, 1.0, 0), std::domain_error);
}

TEST_CASE("sigma2 estimate inverts a synthetic quantile grid") {
    const double s2 = 1.7;
    // gamma_p <= 1 branch
    {
        const Eigen::Index p = 40, n = 100;
        const hdpa::mp::MpLaw law((double)p / n);
        Vector values(p);
        for (Eigen::Index j = 1; j <= p; ++j)
            values(j - 1) = s2 * hdpa::mp::quantile(law, 1.0 - (double)j / p);
        const auto est = hdpa::estimate_sigma2(values, p, n);
        CHECK(est.value == Catch::Approx(s2).margin(1e-8));
        CHECK(est.index_used == p / 2);
        CHECK_FALSE(est.fell_back);
    }
    // gamma_p > 1 branch
    {
        const Eigen::Index p = 80, n = 40;
        const double gp = (double)p / n;
        const hdpa::mp::MpLaw law(1.0 / gp);
        Vector values = Vector::Zero(p);
        for (Eigen::Index j = 1; j < n; ++j)
            values(j - 1) = s2 * gp * hdpa::mp::quantile(law, 1.0 - (double)j / (n - 1));
        const auto est = hdpa::estimate_sigma2(values, p, n, p / 2 < n - 1 ? std::optional<Eigen::Index>(p / 2) : std::optional<Eigen::Index>(20));
        CHECK(est.value == Catch::Approx(s2).margin(1e-8));
    }
}

TEST_CASE("sigma2 estimate fallback on degenerate index") {
    const Eigen::Index p = 10, n = 20;
    Vector values = Vector::Zero(p);
    values(0) = 3.0;
    values(1) = 2.0;
    const auto est = hdpa::estimate_sigma2(values, p, n);  // default index 5 is zero
    CHECK(est.fell_back);
    CHECK(est.index_used == 2);
    CHECK(est.value > 0.0);
    CHECK_THROWS_AS(hdpa::estimate_sigma2(Vector::Zero(p), p, n), std::domain_error);
    CHECK_THROWS_AS(hdpa::estimate_sigma2(values, p, n, (Eigen::Index)0), std::domain_error);
    CHECK_THROWS_AS(hdpa::estimate_sigma2(values, p, n, p + 1), std::domain_error);
}

TEST_CASE("sigma2 estimate consistency on generated data") {
    int inside = 0;
    const int reps = 50;
    for (int rep = 0; rep < reps; ++rep) {
        const hdpa::sim::GeneratorSpec gen{hdpa::sim::Model::kGaussian,
                                           hdpa::sim::reference_spikes(), 1.0, 500, 1000};
        const Matrix data = hdpa::sim::generate(gen, RngSeed{(std::uint64_t)rep, 0});
        const Vector values = hdpa::covariance_eigenvalues(data);
        const auto est = hdpa::estimate_sigma2(values, 500, 1000);
        if (est.value >= 0.9 && est.value <= 1.1) ++inside;
    }
    CHECK(inside >= (int)(0.95 * reps));
}

TEST_CASE("default K cap") {
    CHECK(hdpa::default_K(1000, 2000) == 30);
    CHECK(hdpa::default_K(10, 2000) == 9);
    CHECK(hdpa::default_K(1000, 12) == 9);
    CHECK(hdpa::default_K(3, 5) == 2);
}

TEST_CASE("pa estimate recovers a strong classical-regime spike") {
    const hdpa::sim::GeneratorSpec gen{hdpa::sim::Model::kGaussian, {10.0}, 1.0, 5, 2000};
    const Matrix data = hdpa::sim::generate(gen, RngSeed{13, 0});
    const auto report = hdpa::pa_estimate(data, 5, hdpa::Sigma2Spec::oracle(1.0), 3,
                                          RngSeed{13, 1});
    CHECK(report.d_hat == 1);
    CHECK(report.method == hdpa::Method::kPa);
    CHECK(report.K == 3);
    REQUIRE(report.diagnostics.size() == 4);
    int best = 0;
    for (int k = 1; k <= 3; ++k)
        if (report.diagnostics[(std::size_t)k] < report.diagnostics[(std::size_t)best]) best = k;
    CHECK(best == report.d_hat);
    CHECK_THROWS_AS(hdpa::pa_estimate(data, 5, hdpa::Sigma2Spec::oracle(1.0), 0, RngSeed{}),
                    std::domain_error);
    CHECK_THROWS_AS(hdpa::pa_estimate(data, 5, hdpa::Sigma2Spec::oracle(1.0), 6, RngSeed{}),
                    std::domain_error);
}

TEST_CASE("hdpa estimate report consistency") {
    const hdpa::sim::GeneratorSpec gen{hdpa::sim::Model::kGaussian, {4.0}, 1.0, 100, 400};
    const Matrix data = hdpa::sim::generate(gen, RngSeed{6, 0});
    const auto report = hdpa::hdpa_estimate(data, 100, hdpa::Sigma2Spec::oracle(1.0), 5,
                                            RngSeed{6, 1});
    CHECK(report.d_hat == 1);
    CHECK(report.method == hdpa::Method::kHdpa);
    REQUIRE(report.diagnostics.size() == 6);
    REQUIRE(report.h_differences.size() == 5);
    // argmin of the reported differences equals the reported estimate
    double best = report.h_differences[0];
    int best_j = 1;
    for (int j = 2; j <= 5; ++j) {
        if (report.h_differences[(std::size_t)(j - 1)] < best) {
            best = report.h_differences[(std::size_t)(j - 1)];
            best_j = j;
        }
    }
    CHECK(best_j == report.d_hat);
    CHECK(report.h_differences[(std::size_t)(report.d_hat - 1)] == best);
    CHECK_FALSE(report.identifiability_warning);
    CHECK_THROWS_AS(hdpa::hdpa_estimate(data, 100, hdpa::Sigma2Spec::oracle(1.0), 1, RngSeed{}),
                    std::domain_error);
}

TEST_CASE("hdpa estimate with estimated sigma2") {
    const hdpa::sim::GeneratorSpec gen{hdpa::sim::Model::kGaussian, {4.0}, 1.0, 200, 800};
    const Matrix data = hdpa::sim::generate(gen, RngSeed{14, 0});
    const auto report = hdpa::hdpa_estimate(data, 200, hdpa::Sigma2Spec::estimate(), 5,
                                            RngSeed{14, 1});
    CHECK(report.d_hat == 1);
    CHECK(report.sigma2_source == hdpa::Sigma2Source::kEstimated);
    CHECK(report.sigma2_used == Catch::Approx(1.0).margin(0.15));
}

TEST_CASE("identifiability warning on pure noise") {
    const hdpa::sim::GeneratorSpec gen{hdpa::sim::Model::kGaussian, {0.05}, 1.0, 150, 200};
    const Matrix data = hdpa::sim::generate(gen, RngSeed{25, 0});
    const auto report = hdpa::hdpa_estimate(data, 150, hdpa::Sigma2Spec::oracle(1.0), 4,
                                            RngSeed{25, 1});
    CHECK(report.identifiability_warning);
    CHECK(report.d_hat >= 1);  // the search range starts at 1 by construction
    CHECK_FALSE(report.warnings.empty());
}

TEST_CASE("scale equivariance of both estimators") {
    const hdpa::sim::GeneratorSpec gen{hdpa::sim::Model::kGaussian, {4.0, 2.5}, 1.0, 80, 300};
    const Matrix data = hdpa::sim::generate(gen, RngSeed{44, 0});
    const double c2 = 6.25;
    const Matrix scaled = std::sqrt(c2) * data;

    const auto pa1 = hdpa::pa_estimate(data, 80, hdpa::Sigma2Spec::oracle(1.0), 5, RngSeed{44, 1});
    const auto pa2 =
        hdpa::pa_estimate(scaled, 80, hdpa::Sigma2Spec::oracle(c2), 5, RngSeed{44, 1});
    CHECK(pa1.d_hat == pa2.d_hat);

    const auto h1 =
        hdpa::hdpa_estimate(data, 80, hdpa::Sigma2Spec::oracle(1.0), 5, RngSeed{44, 1});
    const auto h2 =
        hdpa::hdpa_estimate(scaled, 80, hdpa::Sigma2Spec::oracle(c2), 5, RngSeed{44, 1});
    CHECK(h1.d_hat == h2.d_hat);
}

TEST_CASE("argmin tie breaks to the smallest index") {
    CHECK(hdpa::detail::argmin_index({1.0, 0.5, 0.5, 0.7}) == 1);
    CHECK(hdpa::detail::argmin_index({0.5, 0.5}) == 0);
    CHECK(hdpa::detail::argmin_index({2.0, 1.0, 0.0}) == 2);
}
