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
#ifndef RKHSFLM_COVARIANCE_OPERATOR_HPP
#define RKHSFLM_COVARIANCE_OPERATOR_HPP

#include <cstddef>
#include <stdexcept>

#include <Eigen/Dense>

#include "rkhsflm/grid.hpp"
#include "rkhsflm/kernels.hpp"

namespace flm {

/**
 * Quadrature discretization of the integral operator
 * (Kf)(t) = ∫ K(t,s) f(s) ds on a uniform m-point grid: the matrix is
 * (1/m) * Gram, whose eigenvalues estimate the operator eigenvalues.
 */
class DiscreteOperator {
  public:
    DiscreteOperator(Grid grid, Eigen::MatrixXd matrix)
        : grid_(std::move(grid)), matrix_(std::move(matrix)) {
        if (matrix_.rows() != matrix_.cols() ||
            matrix_.rows() != static_cast<Eigen::Index>(grid_.size()))
            throw std::invalid_argument("DiscreteOperator: matrix does not match grid");
    }

    const Grid& grid() const noexcept { return grid_; }
    const Eigen::MatrixXd& matrix() const noexcept { return matrix_; }
    std::size_t size() const noexcept { return grid_.size(); }

  private:
    Grid grid_;
    Eigen::MatrixXd matrix_;
};

inline DiscreteOperator discretize(const CovarianceKernel& kernel, const Grid& grid) {
    if (!grid.uniform())
        throw std::invalid_argument("discretize: quadrature rule requires a uniform grid");
    Eigen::MatrixXd m = gram(kernel, grid) / static_cast<double>(grid.size());
    return DiscreteOperator(grid, std::move(m));
}

/**
 * Spectral decomposition of a discrete operator. Eigenvalues are sorted in
 * descending order with entries below rank_tol * λ1 dropped; eigenfunctions
 * carry quadrature-unit norm, (1/m) Σ_i e_j(t_i)^2 = 1.
 */
struct EigenSystem {
    Grid grid;
    Eigen::VectorXd eigenvalues;     // descending, strictly positive retained part
    Eigen::MatrixXd eigenfunctions;  // m x rank, column j sampled on the grid

    std::size_t rank() const noexcept { return static_cast<std::size_t>(eigenvalues.size()); }
};

inline EigenSystem eigen_system(const DiscreteOperator& op, double rank_tol = 1e-10) {
    const auto m = static_cast<Eigen::Index>(op.size());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(op.matrix());
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("eigen_system: symmetric eigensolver failed");

    // Ascending from Eigen; walk backwards and keep the part above tolerance.
    const Eigen::VectorXd& vals = solver.eigenvalues();
    double lambda1 = std::max(vals(m - 1), 0.0);
    double cutoff = rank_tol * lambda1;

    Eigen::Index rank = 0;
    for (Eigen::Index k = m - 1; k >= 0; --k) {
        if (vals(k) > cutoff && vals(k) > 0.0)
            ++rank;
        else
            break;
    }

    EigenSystem es{op.grid(), Eigen::VectorXd(rank), Eigen::MatrixXd(m, rank)};
    const double scale = std::sqrt(static_cast<double>(m));
    for (Eigen::Index j = 0; j < rank; ++j) {
        es.eigenvalues(j) = vals(m - 1 - j);
        es.eigenfunctions.col(j) = solver.eigenvectors().col(m - 1 - j) * scale;
    }
    return es;
}

/** (Kf)(t_i) ≈ (1/m) Σ_k K(t_i,t_k) f(t_k), i.e. the operator matrix times f. */
inline Eigen::VectorXd apply(const DiscreteOperator& op, const Eigen::VectorXd& f) {
    if (f.size() != static_cast<Eigen::Index>(op.size()))
        throw std::invalid_argument("apply: vector length does not match operator grid");
    return op.matrix() * f;
}

/**
 * Tikhonov filter (M + γI)^{-1} M g via Cholesky of the shifted matrix.
 * On the eigenbasis this multiplies the j-th coefficient by λ_j/(λ_j+γ).
 */
inline Eigen::VectorXd tikhonov_apply(const DiscreteOperator& op, double gamma,
                                      const Eigen::VectorXd& g) {
    if (!(gamma > 0.0)) throw std::invalid_argument("tikhonov_apply: gamma must be positive");
    if (g.size() != static_cast<Eigen::Index>(op.size()))
        throw std::invalid_argument("tikhonov_apply: vector length does not match operator grid");
    const auto m = static_cast<Eigen::Index>(op.size());
    Eigen::MatrixXd shifted = op.matrix();
    shifted.diagonal().array() += gamma;
    Eigen::LLT<Eigen::MatrixXd> llt(shifted);
    if (llt.info() != Eigen::Success) {
        Eigen::LDLT<Eigen::MatrixXd> ldlt(shifted);
        if (ldlt.info() != Eigen::Success)
            throw std::runtime_error("tikhonov_apply: factorization of M + gamma*I failed");
        return ldlt.solve(op.matrix() * g);
    }
    (void)m;
    return llt.solve(op.matrix() * g);
}

/**
 * Checks the resolvent bound ||(M + γI)^{-1}||_op <= 1/γ, up to a 1e-10
 * relative slack for eigensolver round-off.
 */
inline bool resolvent_norm_bound_check(const DiscreteOperator& op, double gamma) {
    if (!(gamma > 0.0))
        throw std::invalid_argument("resolvent_norm_bound_check: gamma must be positive");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(op.matrix(), Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("resolvent_norm_bound_check: eigensolver failed");
    double lambda_min = solver.eigenvalues()(0);
    if (lambda_min + gamma <= 0.0) return false;
    double norm = 1.0 / (lambda_min + gamma);
    return norm <= (1.0 / gamma) * (1.0 + 1e-10);
}

}  // namespace flm

#endif  // RKHSFLM_COVARIANCE_OPERATOR_HPP
