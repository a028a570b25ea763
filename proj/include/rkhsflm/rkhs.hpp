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
#ifndef RKHSFLM_RKHS_HPP
#define RKHSFLM_RKHS_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "rkhsflm/covariance_operator.hpp"
#include "rkhsflm/grid.hpp"
#include "rkhsflm/kernels.hpp"

namespace flm {

/** A real function known by its values on a grid. */
struct GridFunction {
    Grid grid;
    Eigen::VectorXd values;

    GridFunction(Grid g, Eigen::VectorXd v) : grid(std::move(g)), values(std::move(v)) {
        if (values.size() != static_cast<Eigen::Index>(grid.size()))
            throw std::invalid_argument("GridFunction: value count does not match grid");
    }
};

/**
 * Finite kernel expansion α(·) = Σ_j β_j K(t_j, ·), the computable
 * representation of an RKHS element. Duplicate points are merged by summing
 * their coefficients, which leaves the represented function unchanged.
 */
class KernelExpansion {
  public:
    KernelExpansion(CovarianceKernel kernel, std::vector<double> points,
                    std::vector<double> coefficients)
        : kernel_(std::move(kernel)) {
        if (points.size() != coefficients.size())
            throw std::invalid_argument("KernelExpansion: point/coefficient length mismatch");
        std::vector<std::size_t> order(points.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::sort(order.begin(), order.end(),
                  [&](std::size_t a, std::size_t b) { return points[a] < points[b]; });
        for (std::size_t i : order) {
            double t = points[i];
            if (!(t >= -1e-12 && t <= 1.0 + 1e-12))
                throw std::invalid_argument("KernelExpansion: point outside [0,1]");
            if (!points_.empty() && std::abs(t - points_.back()) <= 1e-12) {
                coefficients_.back() += coefficients[i];
            } else {
                points_.push_back(t);
                coefficients_.push_back(coefficients[i]);
            }
        }
    }

    static KernelExpansion zero(CovarianceKernel kernel) {
        return KernelExpansion(std::move(kernel), {}, {});
    }

    const CovarianceKernel& kernel() const noexcept { return kernel_; }
    const std::vector<double>& points() const noexcept { return points_; }
    const std::vector<double>& coefficients() const noexcept { return coefficients_; }
    std::size_t terms() const noexcept { return points_.size(); }

    /** α(t) = Σ_j β_j K(t_j, t). */
    double operator()(double t) const {
        double acc = 0.0;
        for (std::size_t j = 0; j < points_.size(); ++j)
            acc += coefficients_[j] * kernel_(points_[j], t);
        return acc;
    }

    GridFunction sampled_on(const Grid& grid) const {
        Eigen::VectorXd v(static_cast<Eigen::Index>(grid.size()));
        for (std::size_t i = 0; i < grid.size(); ++i)
            v(static_cast<Eigen::Index>(i)) = (*this)(grid[i]);
        return GridFunction(grid, std::move(v));
    }

  private:
    CovarianceKernel kernel_;
    std::vector<double> points_;
    std::vector<double> coefficients_;
};

namespace detail {

/** Union point set with both coefficient vectors zero-padded onto it. */
struct MergedExpansions {
    std::vector<double> points;
    Eigen::VectorXd a;
    Eigen::VectorXd b;
};

inline MergedExpansions merge_expansion_points(const std::vector<double>& pa,
                                               const std::vector<double>& ca,
                                               const std::vector<double>& pb,
                                               const std::vector<double>& cb) {
    MergedExpansions out;
    out.points.reserve(pa.size() + pb.size());
    std::vector<double> av, bv;
    std::size_t i = 0, j = 0;
    while (i < pa.size() || j < pb.size()) {
        bool take_a = j >= pb.size() || (i < pa.size() && pa[i] < pb[j] - 1e-12);
        bool take_b = i >= pa.size() || (j < pb.size() && pb[j] < pa[i] - 1e-12);
        if (take_a) {
            out.points.push_back(pa[i]);
            av.push_back(ca[i]);
            bv.push_back(0.0);
            ++i;
        } else if (take_b) {
            out.points.push_back(pb[j]);
            av.push_back(0.0);
            bv.push_back(cb[j]);
            ++j;
        } else {  // coincident within tolerance
            out.points.push_back(pa[i]);
            av.push_back(ca[i]);
            bv.push_back(cb[j]);
            ++i;
            ++j;
        }
    }
    out.a = Eigen::Map<Eigen::VectorXd>(av.data(), static_cast<Eigen::Index>(av.size()));
    out.b = Eigen::Map<Eigen::VectorXd>(bv.data(), static_cast<Eigen::Index>(bv.size()));
    return out;
}

}  // namespace detail

/**
 * RKHS inner product via the reproducing property:
 * ⟨Σ a_i K(s_i,·), Σ b_j K(t_j,·)⟩_K = a' Gram(union) b.
 */
inline double rkhs_inner(const KernelExpansion& a, const KernelExpansion& b) {
    if (!same_kernel(a.kernel(), b.kernel()))
        throw std::invalid_argument("rkhs_inner: expansions use different kernels");
    if (a.terms() == 0 || b.terms() == 0) return 0.0;
    auto merged = detail::merge_expansion_points(a.points(), a.coefficients(), b.points(),
                                                 b.coefficients());
    Eigen::MatrixXd g = gram(a.kernel(), Grid(merged.points));
    return merged.a.dot(g * merged.b);
}

/** Squared RKHS norm; round-off negatives are clamped at zero. */
inline double rkhs_norm_sq(const KernelExpansion& a) {
    double v = rkhs_inner(a, a);
    return v > 0.0 ? v : 0.0;
}

/**
 * Truncated spectral norm Σ_{j<=n_terms} ⟨f,e_j⟩²/λ_j in the quadrature
 * inner product. Truncation is caller-controlled: the 1/λ_j weights blow up
 * estimation noise in the tail, so no silent cutoff is applied.
 */
inline double rkhs_norm_sq_spectral(const GridFunction& f, const EigenSystem& es,
                                    std::size_t n_terms) {
    if (!same_grid(f.grid, es.grid))
        throw std::invalid_argument("rkhs_norm_sq_spectral: function grid does not match eigensystem");
    if (n_terms > es.rank())
        throw std::invalid_argument("rkhs_norm_sq_spectral: n_terms exceeds retained rank");
    const double inv_m = 1.0 / static_cast<double>(f.grid.size());
    double acc = 0.0;
    for (std::size_t j = 0; j < n_terms; ++j) {
        double coef = inv_m * es.eigenfunctions.col(static_cast<Eigen::Index>(j)).dot(f.values);
        acc += coef * coef / es.eigenvalues(static_cast<Eigen::Index>(j));
    }
    return acc;
}

/**
 * Action of the inverse Loève map on a finite expansion:
 * Ψ_X^{-1}[Σ β_j K(t_j,·)] = Σ β_j X(t_j), the model's noiseless response
 * for the trajectory x.
 */
inline double loeve_predict(const KernelExpansion& a, const GridFunction& x) {
    double acc = 0.0;
    for (std::size_t j = 0; j < a.terms(); ++j) {
        auto idx = x.grid.snap(a.points()[j]);
        if (!idx)
            throw std::domain_error("loeve_predict: expansion point off the trajectory grid");
        acc += a.coefficients()[j] * x.values(static_cast<Eigen::Index>(*idx));
    }
    return acc;
}

}  // namespace flm

#endif  // RKHSFLM_RKHS_HPP
