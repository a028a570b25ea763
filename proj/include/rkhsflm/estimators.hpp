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
#ifndef RKHSFLM_ESTIMATORS_HPP
#define RKHSFLM_ESTIMATORS_HPP

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "rkhsflm/covariance_operator.hpp"
#include "rkhsflm/dataset.hpp"
#include "rkhsflm/kernels.hpp"
#include "rkhsflm/rkhs.hpp"

namespace flm {

/** Sample cross-covariance α̃(t_j) = (1/n) Σ_i Y_i X_i(t_j). */
inline GridFunction cross_covariance(const FunctionalDataset& data) {
    if (data.n() == 0) throw std::invalid_argument("cross_covariance: empty dataset");
    Eigen::VectorXd v = (data.X.transpose() * data.Y) / static_cast<double>(data.n());
    return GridFunction(data.grid, std::move(v));
}

/** Default regularization rate γ_n = n^{-1/5}. */
inline double default_gamma(std::size_t n) {
    if (n == 0) throw std::invalid_argument("default_gamma: n must be positive");
    return std::pow(static_cast<double>(n), -0.2);
}

/** Least-squares fit on marginals X(t_1),...,X(t_p), an impact-point model. */
struct GridOlsModel {
    bool has_intercept = false;
    double intercept = 0.0;
    std::vector<double> points;       // impact points, on the training grid
    Eigen::VectorXd coefficients;     // one per impact point
};

/** Tikhonov-regularized cross-covariance estimate of the slope. */
struct TikhonovModel {
    GridFunction alpha_hat;
    double gamma;
};

/** Principal-component score regression with the slope mapped back to the grid. */
struct FpcrModel {
    double intercept = 0.0;
    std::size_t q = 0;
    Eigen::VectorXd score_coefficients;
    GridFunction beta_fn;
};

using FittedModel = std::variant<GridOlsModel, TikhonovModel, FpcrModel>;

namespace detail {

struct OlsResult {
    double intercept = 0.0;
    Eigen::VectorXd coefficients;
    Eigen::VectorXd fitted;
};

/**
 * min ||y - b0*1 - D*beta||_2 by complete orthogonal decomposition;
 * returns the minimal-norm solution when the design is rank deficient.
 */
inline OlsResult solve_least_squares(const Eigen::MatrixXd& design, const Eigen::VectorXd& y,
                                     bool intercept) {
    const Eigen::Index n = design.rows();
    const Eigen::Index p = design.cols();
    Eigen::MatrixXd full(n, p + (intercept ? 1 : 0));
    if (intercept) {
        full.col(0).setOnes();
        full.rightCols(p) = design;
    } else {
        full = design;
    }
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(full);
    Eigen::VectorXd sol = cod.solve(y);
    OlsResult out;
    if (intercept) {
        out.intercept = sol(0);
        out.coefficients = sol.tail(p);
    } else {
        out.coefficients = sol;
    }
    out.fitted = full * sol;
    return out;
}

inline void check_grid_match(const Grid& a, const Grid& b, const char* who) {
    if (!same_grid(a, b)) throw std::invalid_argument(std::string(who) + ": grid mismatch");
}

}  // namespace detail

/**
 * OLS on user-chosen impact points; each point must lie on the grid up to
 * half a grid spacing.
 */
inline GridOlsModel fit_impact_ols(const FunctionalDataset& data,
                                   const std::vector<double>& points, bool intercept) {
    if (points.empty()) throw std::invalid_argument("fit_impact_ols: no impact points");
    std::vector<double> snapped(points.size());
    Eigen::MatrixXd design(data.X.rows(), static_cast<Eigen::Index>(points.size()));
    for (std::size_t j = 0; j < points.size(); ++j) {
        auto idx = data.grid.snap(points[j]);
        if (!idx) throw std::domain_error("fit_impact_ols: impact point off the grid");
        snapped[j] = data.grid[*idx];
        design.col(static_cast<Eigen::Index>(j)) = data.X.col(static_cast<Eigen::Index>(*idx));
    }
    auto ols = detail::solve_least_squares(design, data.Y, intercept);
    return GridOlsModel{intercept, ols.intercept, std::move(snapped), std::move(ols.coefficients)};
}

/** Placement of the p equispaced impact points within the observation interval. */
enum class ImpactAnchor {
    Right,  // t_j = a + j (b-a)/p, j=1..p: includes b, excludes a
    Left    // t_j = a + (j-1)(b-a)/p, j=1..p: includes a, excludes b
};

/**
 * OLS on an equispaced impact grid of p points over the observation
 * interval [a,b], each point snapped to the nearest grid point. The default
 * right-anchored grid is t_{j,p} = a + j*(b-a)/p; truncated observation
 * windows (scenario 1's [0, 0.95]) use the left-anchored variant.
 */
inline GridOlsModel fit_grid_ols(const FunctionalDataset& data, std::size_t p, bool intercept,
                                 ImpactAnchor anchor = ImpactAnchor::Right) {
    if (p == 0) throw std::invalid_argument("fit_grid_ols: p must be positive");
    if (p > data.m()) throw std::invalid_argument("fit_grid_ols: p exceeds grid size");
    const double a = data.grid.front();
    const double b = data.grid.back();
    const double offset = anchor == ImpactAnchor::Right ? 1.0 : 0.0;
    std::vector<double> pts(p);
    Eigen::MatrixXd design(data.X.rows(), static_cast<Eigen::Index>(p));
    for (std::size_t j = 0; j < p; ++j) {
        double target =
            a + (static_cast<double>(j) + offset) * (b - a) / static_cast<double>(p);
        std::size_t idx = data.grid.nearest(target);
        pts[j] = data.grid[idx];
        design.col(static_cast<Eigen::Index>(j)) = data.X.col(static_cast<Eigen::Index>(idx));
    }
    auto ols = detail::solve_least_squares(design, data.Y, intercept);
    return GridOlsModel{intercept, ols.intercept, std::move(pts), std::move(ols.coefficients)};
}

/**
 * Tikhonov slope estimate α̂ = (K_op + γI)^{-1} K_op α̃ for a supplied
 * covariance kernel (the oracle form).
 */
inline TikhonovModel fit_tikhonov(const FunctionalDataset& data, double gamma,
                                  const CovarianceKernel& kernel) {
    if (!(gamma > 0.0)) throw std::invalid_argument("fit_tikhonov: gamma must be positive");
    DiscreteOperator op = discretize(kernel, data.grid);
    GridFunction alpha_tilde = cross_covariance(data);
    Eigen::VectorXd alpha_hat = tikhonov_apply(op, gamma, alpha_tilde.values);
    return TikhonovModel{GridFunction(data.grid, std::move(alpha_hat)), gamma};
}

/** Plug-in Tikhonov estimate using the sample covariance kernel. */
inline TikhonovModel fit_tikhonov(const FunctionalDataset& data, double gamma) {
    return fit_tikhonov(data, gamma, empirical_kernel(data));
}

/**
 * Functional principal component regression: OLS of Y on the first q
 * quadrature scores ⟨X_i, e_j⟩ of the sample covariance operator, with the
 * slope mapped back as β̂(t) = Σ_j b_j e_j(t).
 */
inline FpcrModel fit_fpcr(const FunctionalDataset& data, std::size_t q, double rank_tol = 1e-10) {
    if (q == 0) throw std::invalid_argument("fit_fpcr: q must be positive");
    EigenSystem es = eigen_system(discretize(empirical_kernel(data), data.grid), rank_tol);
    if (q > es.rank()) throw std::invalid_argument("fit_fpcr: q exceeds retained rank");
    const double inv_m = 1.0 / static_cast<double>(data.m());
    Eigen::MatrixXd scores =
        (data.X * es.eigenfunctions.leftCols(static_cast<Eigen::Index>(q))) * inv_m;
    auto ols = detail::solve_least_squares(scores, data.Y, /*intercept=*/true);
    Eigen::VectorXd beta =
        es.eigenfunctions.leftCols(static_cast<Eigen::Index>(q)) * ols.coefficients;
    return FpcrModel{ols.intercept, q, std::move(ols.coefficients),
                     GridFunction(data.grid, std::move(beta))};
}

inline double predict(const GridOlsModel& model, const GridFunction& x) {
    double acc = model.intercept;
    for (std::size_t j = 0; j < model.points.size(); ++j) {
        auto idx = x.grid.snap(model.points[j]);
        if (!idx) throw std::invalid_argument("predict: trajectory grid lacks an impact point");
        acc += model.coefficients(static_cast<Eigen::Index>(j)) *
               x.values(static_cast<Eigen::Index>(*idx));
    }
    return acc;
}

inline double predict(const TikhonovModel& model, const GridFunction& x) {
    detail::check_grid_match(model.alpha_hat.grid, x.grid, "predict");
    return model.alpha_hat.values.dot(x.values) / static_cast<double>(x.grid.size());
}

inline double predict(const FpcrModel& model, const GridFunction& x) {
    detail::check_grid_match(model.beta_fn.grid, x.grid, "predict");
    return model.intercept +
           model.beta_fn.values.dot(x.values) / static_cast<double>(x.grid.size());
}

inline double predict(const FittedModel& model, const GridFunction& x) {
    return std::visit([&](const auto& fit) { return predict(fit, x); }, model);
}

/** Predictions for every trajectory of a dataset. */
template <typename Model>
Eigen::VectorXd predict_all(const Model& model, const FunctionalDataset& data) {
    Eigen::VectorXd out(data.X.rows());
    for (Eigen::Index i = 0; i < data.X.rows(); ++i)
        out(i) = predict(model, GridFunction(data.grid, data.X.row(i).transpose()));
    return out;
}

/**
 * Squared RKHS distance ||α̂_p - α||_K^2 between a fitted impact-point model
 * and a reference expansion, evaluated under the given kernel via the Gram
 * matrix on the union of their point sets.
 */
inline double rkhs_error(const GridOlsModel& fit, const KernelExpansion& truth,
                         const CovarianceKernel& kernel) {
    std::vector<double> points = truth.points();
    std::vector<double> coefs(truth.coefficients().size());
    for (std::size_t j = 0; j < coefs.size(); ++j) coefs[j] = -truth.coefficients()[j];
    points.insert(points.end(), fit.points.begin(), fit.points.end());
    for (Eigen::Index j = 0; j < fit.coefficients.size(); ++j)
        coefs.push_back(fit.coefficients(j));
    KernelExpansion diff(kernel, std::move(points), std::move(coefs));
    return rkhs_norm_sq(diff);
}

}  // namespace flm

#endif  // RKHSFLM_ESTIMATORS_HPP
