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
#ifndef RKHSFLM_GRID_HPP
#define RKHSFLM_GRID_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <vector>

namespace flm {

/**
 * Strictly increasing observation points in [0,1].
 *
 * The `uniform` flag is detected at construction (constant spacing to
 * within 1e-12); operator discretization requires it.
 */
class Grid {
  public:
    explicit Grid(std::vector<double> points) : points_(std::move(points)) {
        if (points_.empty()) throw std::invalid_argument("Grid: empty point set");
        for (std::size_t i = 0; i < points_.size(); ++i) {
            if (!(points_[i] >= -kDomainTol && points_[i] <= 1.0 + kDomainTol))
                throw std::invalid_argument("Grid: point outside [0,1]");
            if (i > 0 && !(points_[i] > points_[i - 1]))
                throw std::invalid_argument("Grid: points not strictly increasing");
        }
        uniform_ = detect_uniform();
    }

    /** Uniform grid {k/(m-1) : k=0..m-1} spanning [0,1] endpoints included. */
    static Grid uniform01(std::size_t m) {
        if (m < 2) throw std::invalid_argument("Grid::uniform01: need m >= 2");
        std::vector<double> pts(m);
        for (std::size_t k = 0; k < m; ++k) pts[k] = static_cast<double>(k) / static_cast<double>(m - 1);
        return Grid(std::move(pts));
    }

    std::size_t size() const noexcept { return points_.size(); }
    double operator[](std::size_t i) const { return points_[i]; }
    const std::vector<double>& points() const noexcept { return points_; }
    double front() const { return points_.front(); }
    double back() const { return points_.back(); }
    bool uniform() const noexcept { return uniform_; }

    /** Mean spacing; equals the constant spacing on uniform grids. */
    double spacing() const {
        if (size() < 2) throw std::logic_error("Grid::spacing: single-point grid");
        return (points_.back() - points_.front()) / static_cast<double>(size() - 1);
    }

    /** Index of the grid point closest to t (ties resolve to the left). */
    std::size_t nearest(double t) const {
        auto it = std::lower_bound(points_.begin(), points_.end(), t);
        if (it == points_.begin()) return 0;
        if (it == points_.end()) return points_.size() - 1;
        std::size_t hi = static_cast<std::size_t>(it - points_.begin());
        std::size_t lo = hi - 1;
        return (t - points_[lo] <= points_[hi] - t) ? lo : hi;
    }

    /**
     * Nearest index if t lies within half the local spacing of that point,
     * otherwise nothing.
     */
    std::optional<std::size_t> snap(double t) const {
        std::size_t i = nearest(t);
        double tol = half_local_spacing(i);
        if (std::abs(t - points_[i]) <= tol * (1.0 + 1e-9) + 1e-15) return i;
        return std::nullopt;
    }

    bool contains(double t, double tol = 1e-12) const {
        std::size_t i = nearest(t);
        return std::abs(points_[i] - t) <= tol;
    }

    /** Sub-grid of all points with t <= cutoff (+1e-12 slack). */
    Grid restrict_to(double cutoff) const {
        std::vector<double> pts;
        for (double t : points_)
            if (t <= cutoff + 1e-12) pts.push_back(t);
        return Grid(std::move(pts));
    }

    /** Insert any of the given points that are missing; may lose uniformity. */
    Grid augmented_with(const std::vector<double>& extra) const {
        std::vector<double> pts = points_;
        for (double t : extra) {
            if (!contains(t)) pts.push_back(t);
        }
        std::sort(pts.begin(), pts.end());
        return Grid(std::move(pts));
    }

    friend bool same_grid(const Grid& a, const Grid& b, double tol) {
        if (a.size() != b.size()) return false;
        for (std::size_t i = 0; i < a.size(); ++i)
            if (std::abs(a.points_[i] - b.points_[i]) > tol) return false;
        return true;
    }

  private:
    static constexpr double kDomainTol = 1e-12;

    bool detect_uniform() const {
        if (points_.size() < 2) return true;
        double dt = (points_.back() - points_.front()) / static_cast<double>(points_.size() - 1);
        for (std::size_t i = 0; i + 1 < points_.size(); ++i)
            if (std::abs(points_[i + 1] - points_[i] - dt) > 1e-12) return false;
        return true;
    }

    double half_local_spacing(std::size_t i) const {
        if (points_.size() == 1) return 1e-12;
        double gap;
        if (i == 0)
            gap = points_[1] - points_[0];
        else if (i + 1 == points_.size())
            gap = points_[i] - points_[i - 1];
        else
            gap = std::min(points_[i] - points_[i - 1], points_[i + 1] - points_[i]);
        return 0.5 * gap;
    }

    std::vector<double> points_;
    bool uniform_ = false;
};

inline bool same_grid(const Grid& a, const Grid& b) { return same_grid(a, b, 1e-12); }

}  // namespace flm

#endif  // RKHSFLM_GRID_HPP
