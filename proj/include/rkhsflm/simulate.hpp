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
#ifndef RKHSFLM_SIMULATE_HPP
#define RKHSFLM_SIMULATE_HPP

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "rkhsflm/covariance_operator.hpp"
#include "rkhsflm/dataset.hpp"
#include "rkhsflm/estimators.hpp"
#include "rkhsflm/kernels.hpp"
#include "rkhsflm/rkhs.hpp"
#include "rkhsflm/rng.hpp"

namespace flm {

enum class Scenario { S1, S2a, S2b, S3 };

inline std::string to_string(Scenario s) {
    switch (s) {
        case Scenario::S1: return "1";
        case Scenario::S2a: return "2a";
        case Scenario::S2b: return "2b";
        case Scenario::S3: return "3";
    }
    throw std::logic_error("unknown scenario");
}

inline Scenario scenario_from_string(const std::string& s) {
    if (s == "1") return Scenario::S1;
    if (s == "2a") return Scenario::S2a;
    if (s == "2b") return Scenario::S2b;
    if (s == "3") return Scenario::S3;
    throw std::invalid_argument("unknown scenario '" + s + "' (expected 1, 2a, 2b or 3)");
}

/**
 * Data-generating configuration. All four scenarios draw fractional
 * Brownian trajectories with Hurst exponent H; 2a/2b/3 add N(0, sigma^2)
 * noise to the linear response, scenario 1 predicts X(1) from [0, 0.95]
 * without noise.
 */
struct ScenarioSpec {
    Scenario scenario = Scenario::S2a;
    std::size_t n = 100;
    std::size_t m = 101;
    double sigma = 0.2;
    double hurst = 0.8;
    std::uint64_t seed = 0;

    void validate() const {
        if (m < 2) throw std::invalid_argument("ScenarioSpec: m must be at least 2");
        if (n == 0) throw std::invalid_argument("ScenarioSpec: n must be positive");
        if (sigma < 0.0) throw std::invalid_argument("ScenarioSpec: sigma must be nonnegative");
        if (!(hurst > 0.0 && hurst < 1.0))
            throw std::invalid_argument("ScenarioSpec: Hurst exponent must lie in (0,1)");
    }
};

inline std::vector<double> scenario_impact_points(Scenario s) {
    switch (s) {
        case Scenario::S2a: return {0.2, 0.4, 0.9};
        case Scenario::S2b: return {0.16, 0.47, 0.67, 0.85, 0.91};
        default: return {};
    }
}

inline std::vector<double> scenario_impact_coefficients(Scenario s) {
    switch (s) {
        case Scenario::S2a: return {2.0, -5.0, 1.0};
        case Scenario::S2b: return {2.1, -0.2, -1.9, 5.0, 4.2};
        default: return {};
    }
}

/**
 * n independent centered Gaussian trajectories with covariance
 * Gram(kernel, grid), drawn through a Cholesky factor of the Gram plus a
 * small ridge. The ridge starts at 1e-10 * trace/m and escalates tenfold
 * up to 1e-6 * trace/m; fBM Grams are PSD only up to round-off.
 */
inline Eigen::MatrixXd sample_gp(const CovarianceKernel& kernel, const Grid& grid, std::size_t n,
                                 std::uint64_t seed) {
    const auto m = static_cast<Eigen::Index>(grid.size());
    Eigen::MatrixXd g = gram(kernel, grid);
    Eigen::MatrixXd z = standard_normal_matrix(static_cast<Eigen::Index>(n), m, seed);
    const double scale = g.trace() / static_cast<double>(m);
    if (scale <= 0.0) return Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), m);
    for (double ridge = 1e-10; ridge <= 1.0000001e-6; ridge *= 10.0) {
        Eigen::MatrixXd shifted = g;
        shifted.diagonal().array() += ridge * scale;
        Eigen::LLT<Eigen::MatrixXd> llt(shifted);
        if (llt.info() == Eigen::Success) {
            Eigen::MatrixXd u = llt.matrixU();
            return z * u;
        }
    }
    throw std::runtime_error("sample_gp: Cholesky failed after ridge escalation");
}

inline Eigen::VectorXd gaussian_noise(std::size_t n, double sigma, std::uint64_t seed) {
    return sigma * standard_normal_vector(static_cast<Eigen::Index>(n), seed);
}

/** A generated dataset together with what is known about the true slope. */
struct GeneratedData {
    FunctionalDataset data;
    /** S2a/S2b: the true slope as a finite kernel expansion. */
    std::optional<KernelExpansion> truth;
    /** S3: the true slope α = Kβ sampled on the data grid. */
    std::optional<GridFunction> alpha_grid;
};

/**
 * Draws a dataset according to the scenario. Deterministic per
 * (spec, spec.seed); the grid is uniform on [0,1] and is augmented with any
 * scenario impact point it misses (which can cost uniformity).
 */
inline GeneratedData generate(const ScenarioSpec& spec) {
    spec.validate();
    const CovarianceKernel kernel = CovarianceKernel::fractional_brownian(spec.hurst);
    const std::uint64_t traj_seed = derive_seed(spec.seed, 1);
    const std::uint64_t noise_seed = derive_seed(spec.seed, 2);

    Grid grid = Grid::uniform01(spec.m);
    std::vector<double> needed = scenario_impact_points(spec.scenario);
    if (spec.scenario == Scenario::S1) needed = {0.95, 1.0};
    grid = grid.augmented_with(needed);

    Eigen::MatrixXd x = sample_gp(kernel, grid, spec.n, traj_seed);

    if (spec.scenario == Scenario::S1) {
        const auto full = static_cast<Eigen::Index>(grid.size());
        Eigen::VectorXd y = x.col(full - 1);  // X(1), grid ends at 1
        Grid observed = grid.restrict_to(0.95);
        Eigen::MatrixXd xo = x.leftCols(static_cast<Eigen::Index>(observed.size()));
        return GeneratedData{FunctionalDataset(observed, std::move(xo), std::move(y)),
                             std::nullopt, std::nullopt};
    }

    Eigen::VectorXd noise = gaussian_noise(spec.n, spec.sigma, noise_seed);

    if (spec.scenario == Scenario::S3) {
        const auto m = static_cast<Eigen::Index>(grid.size());
        Eigen::VectorXd beta(m);
        for (Eigen::Index j = 0; j < m; ++j)
            beta(j) = std::log1p(4.0 * grid[static_cast<std::size_t>(j)]);
        Eigen::VectorXd y = (x * beta) / static_cast<double>(grid.size()) + noise;
        DiscreteOperator op = discretize(kernel, grid);
        GridFunction alpha(grid, apply(op, beta));
        return GeneratedData{FunctionalDataset(grid, std::move(x), std::move(y)), std::nullopt,
                             std::move(alpha)};
    }

    // S2a / S2b: responses from the impact-point expansion plus noise.
    KernelExpansion truth(kernel, scenario_impact_points(spec.scenario),
                          scenario_impact_coefficients(spec.scenario));
    Eigen::VectorXd y(static_cast<Eigen::Index>(spec.n));
    std::vector<Eigen::Index> cols(truth.terms());
    for (std::size_t j = 0; j < truth.terms(); ++j) {
        auto idx = grid.snap(truth.points()[j]);
        if (!idx) throw std::runtime_error("generate: impact point missing after augmentation");
        cols[j] = static_cast<Eigen::Index>(*idx);
    }
    for (Eigen::Index i = 0; i < y.size(); ++i) {
        double u = 0.0;
        for (std::size_t j = 0; j < truth.terms(); ++j)
            u += truth.coefficients()[j] * x(i, cols[j]);
        y(i) = u + noise(i);
    }
    return GeneratedData{FunctionalDataset(grid, std::move(x), std::move(y)), std::move(truth),
                         std::nullopt};
}

/**
 * True slope for a scenario: the impact-point expansion for 2a/2b, or
 * α = Kβ on the operator grid for scenario 3. Scenario 1's target X(1) is a
 * projection with no finite expansion on [0, 0.95], so it is unsupported.
 */
inline std::variant<KernelExpansion, GridFunction> true_alpha(const ScenarioSpec& spec,
                                                              const DiscreteOperator& op) {
    switch (spec.scenario) {
        case Scenario::S2a:
        case Scenario::S2b:
            return KernelExpansion(CovarianceKernel::fractional_brownian(spec.hurst),
                                   scenario_impact_points(spec.scenario),
                                   scenario_impact_coefficients(spec.scenario));
        case Scenario::S3: {
            const auto m = static_cast<Eigen::Index>(op.size());
            Eigen::VectorXd beta(m);
            for (Eigen::Index j = 0; j < m; ++j)
                beta(j) = std::log1p(4.0 * op.grid()[static_cast<std::size_t>(j)]);
            return GridFunction(op.grid(), apply(op, beta));
        }
        case Scenario::S1:
            throw std::invalid_argument("true_alpha: scenario 1 has no finite kernel expansion");
    }
    throw std::logic_error("unknown scenario");
}

/**
 * Plug-in Hurst estimate Ĥ = -log(Var̂(X(1/2))) / (2 log 2), from
 * Var X(1/2) = (1/2)^{2H}; clamped to (0.01, 0.99).
 */
inline double estimate_hurst(const FunctionalDataset& data) {
    if (data.n() < 2) throw std::invalid_argument("estimate_hurst: need at least two trajectories");
    auto idx = data.grid.snap(0.5);
    if (!idx) throw std::domain_error("estimate_hurst: no grid point near t = 0.5");
    Eigen::VectorXd col = data.X.col(static_cast<Eigen::Index>(*idx));
    double mean = col.mean();
    double var = (col.array() - mean).square().sum() / static_cast<double>(data.n() - 1);
    double h;
    if (var <= 0.0)
        h = 1.0;
    else
        h = -std::log(var) / (2.0 * std::log(2.0));
    return std::clamp(h, 0.01, 0.99);
}

}  // namespace flm

#endif  // RKHSFLM_SIMULATE_HPP
