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
#ifndef RKHSFLM_DATASET_HPP
#define RKHSFLM_DATASET_HPP

#include <cstddef>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "rkhsflm/grid.hpp"

namespace flm {

/**
 * Sample of n scalar responses paired with trajectories observed on a
 * common grid. Row i of X is the i-th trajectory.
 */
struct FunctionalDataset {
    Grid grid;
    Eigen::MatrixXd X;  // n x m
    Eigen::VectorXd Y;  // n

    FunctionalDataset(Grid g, Eigen::MatrixXd x, Eigen::VectorXd y)
        : grid(std::move(g)), X(std::move(x)), Y(std::move(y)) {
        if (X.cols() != static_cast<Eigen::Index>(grid.size()))
            throw std::invalid_argument("FunctionalDataset: trajectory length does not match grid");
        if (Y.size() != X.rows())
            throw std::invalid_argument("FunctionalDataset: response count does not match sample size");
    }

    std::size_t n() const noexcept { return static_cast<std::size_t>(X.rows()); }
    std::size_t m() const noexcept { return grid.size(); }

    /** Row-subset copy, in the given index order. */
    FunctionalDataset subset(const std::vector<std::size_t>& rows) const {
        Eigen::MatrixXd xs(static_cast<Eigen::Index>(rows.size()), X.cols());
        Eigen::VectorXd ys(static_cast<Eigen::Index>(rows.size()));
        for (std::size_t r = 0; r < rows.size(); ++r) {
            if (rows[r] >= n()) throw std::invalid_argument("subset: row index out of range");
            xs.row(static_cast<Eigen::Index>(r)) = X.row(static_cast<Eigen::Index>(rows[r]));
            ys(static_cast<Eigen::Index>(r)) = Y(static_cast<Eigen::Index>(rows[r]));
        }
        return FunctionalDataset(grid, std::move(xs), std::move(ys));
    }
};

}  // namespace flm

#endif  // RKHSFLM_DATASET_HPP
