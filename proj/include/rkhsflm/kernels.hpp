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
#ifndef RKHSFLM_KERNELS_HPP
#define RKHSFLM_KERNELS_HPP

#include <cmath>
#include <memory>
#include <stdexcept>
#include <string>
#include <variant>

#include <Eigen/Dense>

#include "rkhsflm/dataset.hpp"
#include "rkhsflm/grid.hpp"

namespace flm {

namespace detail {

struct BrownianKernel {};

struct FbmKernel {
    double hurst;
};

/**
 * Kernel known only through its values on a grid. Off-grid queries snap to
 * the nearest grid point when within half the local spacing and fail
 * otherwise; the sample covariance is only ever observed on the grid.
 */
struct EmpiricalKernelData {
    Grid grid;
    Eigen::MatrixXd values;  // symmetric, size matches grid
};

}  // namespace detail

/**
 * Covariance function K(s,t) of a second-order process on [0,1].
 * Closed forms: Brownian min(s,t) and fractional Brownian
 * 0.5*(s^{2H} + t^{2H} - |s-t|^{2H}); or an empirical grid kernel.
 */
class CovarianceKernel {
  public:
    static CovarianceKernel brownian() { return CovarianceKernel(detail::BrownianKernel{}); }

    static CovarianceKernel fractional_brownian(double hurst) {
        if (!(hurst > 0.0 && hurst < 1.0))
            throw std::invalid_argument("fractional_brownian: Hurst exponent must lie in (0,1)");
        return CovarianceKernel(detail::FbmKernel{hurst});
    }

    static CovarianceKernel empirical(Grid grid, Eigen::MatrixXd values) {
        const auto m = static_cast<Eigen::Index>(grid.size());
        if (values.rows() != m || values.cols() != m)
            throw std::invalid_argument("empirical kernel: value matrix does not match grid");
        Eigen::MatrixXd sym = 0.5 * (values + values.transpose());
        auto data = std::make_shared<const detail::EmpiricalKernelData>(
            detail::EmpiricalKernelData{std::move(grid), std::move(sym)});
        return CovarianceKernel(std::move(data));
    }

    double operator()(double s, double t) const {
        return std::visit(
            [&](const auto& k) -> double {
                using T = std::decay_t<decltype(k)>;
                if constexpr (std::is_same_v<T, detail::BrownianKernel>) {
                    return std::min(s, t);
                } else if constexpr (std::is_same_v<T, detail::FbmKernel>) {
                    const double a = 2.0 * k.hurst;
                    return 0.5 * (std::pow(std::abs(s), a) + std::pow(std::abs(t), a) -
                                  std::pow(std::abs(s - t), a));
                } else {
                    auto i = k->grid.snap(s);
                    auto j = k->grid.snap(t);
                    if (!i || !j)
                        throw std::domain_error("empirical kernel: query point off the grid");
                    return k->values(static_cast<Eigen::Index>(*i), static_cast<Eigen::Index>(*j));
                }
            },
            kernel_);
    }

    bool is_empirical() const {
        return std::holds_alternative<std::shared_ptr<const detail::EmpiricalKernelData>>(kernel_);
    }

    const detail::EmpiricalKernelData& empirical_data() const {
        if (!is_empirical()) throw std::logic_error("kernel is not empirical");
        return *std::get<std::shared_ptr<const detail::EmpiricalKernelData>>(kernel_);
    }

    std::string name() const {
        if (std::holds_alternative<detail::BrownianKernel>(kernel_)) return "brownian";
        if (auto* f = std::get_if<detail::FbmKernel>(&kernel_))
            return "fbm(H=" + std::to_string(f->hurst) + ")";
        return "empirical";
    }

    friend bool same_kernel(const CovarianceKernel& a, const CovarianceKernel& b) {
        if (a.kernel_.index() != b.kernel_.index()) return false;
        if (auto* fa = std::get_if<detail::FbmKernel>(&a.kernel_))
            return fa->hurst == std::get<detail::FbmKernel>(b.kernel_).hurst;
        if (a.is_empirical())
            return std::get<std::shared_ptr<const detail::EmpiricalKernelData>>(a.kernel_) ==
                   std::get<std::shared_ptr<const detail::EmpiricalKernelData>>(b.kernel_);
        return true;
    }

  private:
    using Variant = std::variant<detail::BrownianKernel, detail::FbmKernel,
                                 std::shared_ptr<const detail::EmpiricalKernelData>>;

    explicit CovarianceKernel(Variant k) : kernel_(std::move(k)) {}

    Variant kernel_;
};

/** Kernel matrix on a grid; exactly symmetric by construction. */
inline Eigen::MatrixXd gram(const CovarianceKernel& kernel, const Grid& grid) {
    const auto m = static_cast<Eigen::Index>(grid.size());
    if (kernel.is_empirical() && same_grid(kernel.empirical_data().grid, grid))
        return kernel.empirical_data().values;
    Eigen::MatrixXd g(m, m);
    for (Eigen::Index i = 0; i < m; ++i) {
        for (Eigen::Index j = i; j < m; ++j) {
            double v = kernel(grid[static_cast<std::size_t>(i)], grid[static_cast<std::size_t>(j)]);
            g(i, j) = v;
            g(j, i) = v;
        }
    }
    return g;
}

/**
 * Sample covariance kernel on the dataset grid,
 * K̂(s,t) = n^{-1} sum_i Xc_i(s) Xc_i(t), with trajectories centered by the
 * pointwise sample mean first.
 */
inline CovarianceKernel empirical_kernel(const FunctionalDataset& data) {
    if (data.n() == 0) throw std::invalid_argument("empirical_kernel: empty dataset");
    Eigen::MatrixXd centered = data.X.rowwise() - data.X.colwise().mean();
    Eigen::MatrixXd values =
        (centered.transpose() * centered) / static_cast<double>(data.n());
    return CovarianceKernel::empirical(data.grid, std::move(values));
}

}  // namespace flm

#endif  // RKHSFLM_KERNELS_HPP
