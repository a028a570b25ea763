/*
 * Copyright 2026 The rkhsflm Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#include <catch2/catch_amalgamated.hpp>

#include "rkhsflm/simulate.hpp"
#include "test_helpers.hpp"

using namespace flm;

TEST_CASE("sample_gp is deterministic per seed", "[simulate]") {
    Grid g = Grid::uniform01(30);
    auto k = CovarianceKernel::fractional_brownian(0.8);
    Eigen::MatrixXd a = sample_gp(k, g, 15, 42);
    Eigen::MatrixXd b = sample_gp(k, g, 15, 42);
    Eigen::MatrixXd c = sample_gp(k, g, 15, 43);
    REQUIRE(a == b);
    REQUIRE(a != c);
}

TEST_CASE("sample_gp covariance matches the gram", "[simulate][mc]") {
    Grid g = Grid::uniform01(50);
    auto k = CovarianceKernel::brownian();
    Eigen::MatrixXd x = sample_gp(k, g, 10000, 314159);
    Eigen::MatrixXd centered = x.rowwise() - x.colwise().mean();
    Eigen::MatrixXd cov = (centered.transpose() * centered) / 10000.0;
    Eigen::MatrixXd want = gram(k, g);
    REQUIRE((cov - want).cwiseAbs().maxCoeff() < 0.05);
}

TEST_CASE("brownian increments over disjoint intervals are uncorrelated", "[simulate][mc]") {
    Grid g = Grid::uniform01(101);
    Eigen::MatrixXd x = sample_gp(CovarianceKernel::brownian(), g, 10000, 2718);
    Eigen::VectorXd inc1 = x.col(30) - x.col(10);   // [0.1, 0.3]
    Eigen::VectorXd inc2 = x.col(90) - x.col(60);   // [0.6, 0.9]
    REQUIRE(std::abs(oracle::correlation(inc1, inc2)) < 0.05);
}

TEST_CASE("sample_gp of a zero kernel is identically zero", "[simulate]") {
    Grid g = Grid::uniform01(12);
    auto zero = CovarianceKernel::empirical(g, Eigen::MatrixXd::Zero(12, 12));
    Eigen::MatrixXd x = sample_gp(zero, g, 7, 100);
    REQUIRE(x.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("gaussian marginals pass shape checks", "[simulate][mc]") {
    Grid g = Grid::uniform01(101);
    Eigen::MatrixXd x = sample_gp(CovarianceKernel::fractional_brownian(0.8), g, 10000, 161803);
    for (std::size_t idx : {10u, 30u, 50u, 75u, 100u}) {
        Eigen::VectorXd col = x.col(static_cast<Eigen::Index>(idx));
        REQUIRE(std::abs(oracle::sample_skewness(col)) < 0.15);
        REQUIRE(std::abs(oracle::sample_excess_kurtosis(col)) < 0.15);
    }
}

TEST_CASE("fbm marginal variance is self-similar", "[simulate][mc]") {
    const double h = 0.8;
    Grid g = Grid::uniform01(101);
    Eigen::MatrixXd x = sample_gp(CovarianceKernel::fractional_brownian(h), g, 10000, 271828);
    for (double t : {0.25, 0.5, 1.0}) {
        auto idx = static_cast<Eigen::Index>(*g.snap(t));
        double ratio = oracle::sample_variance(x.col(idx)) / std::pow(t, 2.0 * h);
        REQUIRE(ratio == Catch::Approx(1.0).epsilon(0.10));
    }
}

TEST_CASE("generate is deterministic and scenario grids contain the impact points",
          "[simulate]") {
    ScenarioSpec spec;
    spec.scenario = Scenario::S2b;
    spec.n = 25;
    spec.seed = 7;
    GeneratedData a = generate(spec);
    GeneratedData b = generate(spec);
    REQUIRE(a.data.X == b.data.X);
    REQUIRE(a.data.Y == b.data.Y);
    for (double t : scenario_impact_points(Scenario::S2b)) REQUIRE(a.data.grid.contains(t));
}

TEST_CASE("scenario 2a with sigma=0 reproduces the expansion exactly", "[simulate]") {
    ScenarioSpec spec;
    spec.scenario = Scenario::S2a;
    spec.n = 40;
    spec.sigma = 0.0;
    spec.seed = 11;
    GeneratedData gen = generate(spec);
    REQUIRE(gen.truth.has_value());
    for (Eigen::Index i = 0; i < 40; ++i) {
        GridFunction x(gen.data.grid, gen.data.X.row(i).transpose());
        double want = 2.0 * x.values(20) - 5.0 * x.values(40) + x.values(90);
        REQUIRE(gen.data.Y(i) == Catch::Approx(want).margin(1e-12));
        REQUIRE(loeve_predict(*gen.truth, x) == Catch::Approx(want).margin(1e-12));
    }
}

TEST_CASE("scenario noise has the configured variance", "[simulate][mc]") {
    ScenarioSpec spec;
    spec.scenario = Scenario::S2a;
    spec.n = 10000;
    spec.seed = 17;
    GeneratedData gen = generate(spec);
    Eigen::VectorXd noise(static_cast<Eigen::Index>(spec.n));
    for (Eigen::Index i = 0; i < noise.size(); ++i) {
        GridFunction x(gen.data.grid, gen.data.X.row(i).transpose());
        noise(i) = gen.data.Y(i) - loeve_predict(*gen.truth, x);
    }
    REQUIRE(oracle::sample_variance(noise) == Catch::Approx(0.04).epsilon(0.10));
}

TEST_CASE("degenerate zero trajectories leave pure N(0, sigma^2) responses", "[simulate]") {
    // scenario 3 response assembly with X = 0 reduces to the noise vector
    Eigen::VectorXd noise = gaussian_noise(5000, 0.2, 99);
    REQUIRE(oracle::sample_variance(noise) == Catch::Approx(0.04).epsilon(0.10));
    REQUIRE(std::abs(oracle::sample_mean(noise)) < 0.01);
}

TEST_CASE("scenario 1 exposes predictors on [0, 0.95] only", "[simulate]") {
    ScenarioSpec spec;
    spec.scenario = Scenario::S1;
    spec.n = 12;
    spec.seed = 3;
    GeneratedData gen = generate(spec);
    REQUIRE(gen.data.grid.back() == Catch::Approx(0.95));
    REQUIRE(gen.data.grid.size() == 96);
    REQUIRE_FALSE(gen.truth.has_value());
    REQUIRE_FALSE(gen.alpha_grid.has_value());
    // responses are X(1), which correlates strongly with X(0.95) under fBM
    Eigen::VectorXd last = gen.data.X.col(95);
    REQUIRE(oracle::correlation(last, gen.data.Y) > 0.9);
}

TEST_CASE("scenario 3 truth is the operator image of the log weight", "[simulate]") {
    ScenarioSpec spec;
    spec.scenario = Scenario::S3;
    spec.n = 5;
    spec.seed = 23;
    GeneratedData gen = generate(spec);
    REQUIRE(gen.alpha_grid.has_value());
    REQUIRE(gen.alpha_grid->values(0) == Catch::Approx(0.0).margin(1e-12));  // K(0, .) = 0

    DiscreteOperator op = discretize(CovarianceKernel::fractional_brownian(0.8), gen.data.grid);
    auto truth = true_alpha(spec, op);
    const auto& alpha = std::get<GridFunction>(truth);
    REQUIRE((alpha.values - gen.alpha_grid->values).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("true_alpha returns the stated expansions", "[simulate]") {
    DiscreteOperator op = discretize(CovarianceKernel::fractional_brownian(0.8),
                                     Grid::uniform01(101));
    ScenarioSpec spec;
    spec.scenario = Scenario::S2a;
    auto t2a = std::get<KernelExpansion>(true_alpha(spec, op));
    REQUIRE(t2a.points() == std::vector<double>{0.2, 0.4, 0.9});
    REQUIRE(t2a.coefficients() == std::vector<double>{2.0, -5.0, 1.0});

    spec.scenario = Scenario::S2b;
    auto t2b = std::get<KernelExpansion>(true_alpha(spec, op));
    REQUIRE(t2b.points() == std::vector<double>{0.16, 0.47, 0.67, 0.85, 0.91});
    REQUIRE(t2b.coefficients() == std::vector<double>{2.1, -0.2, -1.9, 5.0, 4.2});

    spec.scenario = Scenario::S1;
    CHECK_THROWS_AS(true_alpha(spec, op), std::invalid_argument);
}

TEST_CASE("scenario 3 cross-covariance approaches the true slope", "[simulate][mc]") {
    ScenarioSpec spec;
    spec.scenario = Scenario::S3;
    spec.n = 10000;
    spec.seed = 31;
    GeneratedData gen = generate(spec);
    GridFunction tilde = cross_covariance(gen.data);
    REQUIRE((tilde.values - gen.alpha_grid->values).cwiseAbs().maxCoeff() < 0.05);
}

TEST_CASE("hurst estimator", "[simulate]") {
    SECTION("inverts the closed-form variance") {
        // column at t=0.5 with sample variance exactly (1/2)^{1.6}
        Grid g({0.25, 0.5, 0.75});
        double target_sd = std::sqrt(std::pow(0.5, 1.6));
        Eigen::MatrixXd x = Eigen::MatrixXd::Zero(2, 3);
        // two points with mean zero and variance s^2: +-s/sqrt(2/(n-1)) for n=2
        x(0, 1) = target_sd / std::sqrt(2.0);
        x(1, 1) = -target_sd / std::sqrt(2.0);
        FunctionalDataset data(g, x, Eigen::VectorXd::Zero(2));
        REQUIRE(estimate_hurst(data) == Catch::Approx(0.8).margin(1e-12));
    }
    SECTION("clamps at 0.99 when the variance is 1/4") {
        Grid g({0.25, 0.5, 0.75});
        Eigen::MatrixXd x = Eigen::MatrixXd::Zero(2, 3);
        x(0, 1) = 0.5 / std::sqrt(2.0);
        x(1, 1) = -0.5 / std::sqrt(2.0);
        FunctionalDataset data(g, x, Eigen::VectorXd::Zero(2));
        REQUIRE(estimate_hurst(data) == Catch::Approx(0.99));
    }
    SECTION("requires a grid point near 0.5") {
        Grid g({0.0, 0.1, 0.9, 1.0});
        Eigen::MatrixXd x = Eigen::MatrixXd::Zero(3, 4);
        FunctionalDataset data(g, x, Eigen::VectorXd::Zero(3));
        CHECK_THROWS_AS(estimate_hurst(data), std::domain_error);
    }
    SECTION("concentrates near the true exponent") {
        int hits = 0;
        for (int rep = 0; rep < 100; ++rep) {
            ScenarioSpec spec;
            spec.scenario = Scenario::S2a;
            spec.n = 2000;
            spec.seed = derive_seed(818, static_cast<std::uint64_t>(rep));
            double h = estimate_hurst(generate(spec).data);
            if (h >= 0.75 && h <= 0.85) ++hits;
        }
        REQUIRE(hits >= 95);
    }
}
