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
#ifndef RKHSFLM_RNG_HPP
#define RKHSFLM_RNG_HPP

#include <cstdint>
#include <random>

#include <Eigen/Dense>

namespace flm {

/** SplitMix64 finalizer; bijective on 64-bit words. */
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z += 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

/**
 * Derive an independent stream seed from a base seed and a counter.
 * Used for per-replication streams so parallel and serial runs see the
 * same draws.
 */
constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) noexcept {
    return mix64(base ^ mix64(index));
}

inline std::mt19937_64 make_engine(std::uint64_t seed) {
    return std::mt19937_64(mix64(seed));
}

/** n-by-m matrix of iid N(0,1) draws, filled row by row. */
inline Eigen::MatrixXd standard_normal_matrix(Eigen::Index rows, Eigen::Index cols,
                                              std::uint64_t seed) {
    std::mt19937_64 engine = make_engine(seed);
    std::normal_distribution<double> normal;
    Eigen::MatrixXd z(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j) z(i, j) = normal(engine);
    return z;
}

inline Eigen::VectorXd standard_normal_vector(Eigen::Index n, std::uint64_t seed) {
    std::mt19937_64 engine = make_engine(seed);
    std::normal_distribution<double> normal;
    Eigen::VectorXd z(n);
    for (Eigen::Index i = 0; i < n; ++i) z(i) = normal(engine);
    return z;
}

}  // namespace flm

#endif  // RKHSFLM_RNG_HPP
