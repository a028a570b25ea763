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
#ifndef RKHSFLM_HARNESS_HPP
#define RKHSFLM_HARNESS_HPP

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <functional>
#include <mutex>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "rkhsflm/dataset.hpp"
#include "rkhsflm/estimators.hpp"
#include "rkhsflm/rng.hpp"
#include "rkhsflm/simulate.hpp"

namespace flm {

/** Worker cap: RKHS_FLM_THREADS if set, else the hardware concurrency. */
inline unsigned worker_threads() {
    if (const char* env = std::getenv("RKHS_FLM_THREADS")) {
        char* end = nullptr;
        long v = std::strtol(env, &end, 10);
        if (end != env && v >= 1) return static_cast<unsigned>(std::min<long>(v, 512));
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1u : hw;
}

/**
 * Runs fn(0..count-1) across up to worker_threads() threads. Results must
 * be written into per-index slots so the reduction is order independent.
 */
inline void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn) {
    unsigned workers = std::min<std::size_t>(worker_threads(), count);
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto body = [&] {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= count) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(body);
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

/**
 * Uniform random train/test partition without replacement; the train part
 * has round(frac * n) rows. Deterministic per seed.
 */
inline std::pair<FunctionalDataset, FunctionalDataset> split(const FunctionalDataset& data,
                                                             double frac, std::uint64_t seed) {
    const std::size_t n = data.n();
    const auto train_size = static_cast<std::size_t>(std::llround(frac * static_cast<double>(n)));
    if (train_size < 1 || train_size > n - 1)
        throw std::invalid_argument("split: degenerate train/test sizes");
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::mt19937_64 engine = make_engine(seed);
    std::shuffle(idx.begin(), idx.end(), engine);
    std::vector<std::size_t> train(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(train_size));
    std::vector<std::size_t> test(idx.begin() + static_cast<std::ptrdiff_t>(train_size), idx.end());
    std::sort(train.begin(), train.end());
    std::sort(test.begin(), test.end());
    return {data.subset(train), data.subset(test)};
}

/** Root mean squared prediction error sqrt((1/k) Σ (y_i - ŷ_i)^2). */
inline double prediction_error(const Eigen::VectorXd& y, const Eigen::VectorXd& yhat) {
    if (y.size() == 0) throw std::invalid_argument("prediction_error: empty test set");
    if (y.size() != yhat.size())
        throw std::invalid_argument("prediction_error: length mismatch");
    return std::sqrt((y - yhat).squaredNorm() / static_cast<double>(y.size()));
}

inline double prediction_error(const FittedModel& model, const FunctionalDataset& test) {
    if (test.n() == 0) throw std::invalid_argument("prediction_error: empty test set");
    return prediction_error(test.Y, predict_all(model, test));
}

/**
 * Adjusted coefficient of determination
 * R²_a = 1 - (1 - R²)(n-1)/(n-p-1), with R² = 1 - SSE/SST.
 */
inline double adjusted_r2(const Eigen::VectorXd& y, const Eigen::VectorXd& yhat, std::size_t p) {
    const auto n = static_cast<std::size_t>(y.size());
    if (y.size() != yhat.size()) throw std::invalid_argument("adjusted_r2: length mismatch");
    if (n < p + 2) throw std::invalid_argument("adjusted_r2: sample too small for p");
    const double mean = y.mean();
    const double sst = (y.array() - mean).square().sum();
    if (sst <= 0.0) throw std::domain_error("adjusted_r2: response has zero variance");
    const double sse = (y - yhat).squaredNorm();
    const double r2 = 1.0 - sse / sst;
    return 1.0 - (1.0 - r2) * static_cast<double>(n - 1) / static_cast<double>(n - p - 1);
}

/** One estimator entry of an experiment plan. */
struct EstimatorSpec {
    enum class Kind { GridOls, Fpcr, Tikhonov, TikhonovOracle };
    Kind kind = Kind::GridOls;
    std::size_t p = 0;        // GridOls
    std::size_t q = 0;        // Fpcr
    double gamma = 0.0;       // Tikhonov; 0 means the n^{-1/5} rule
    bool intercept = true;
    ImpactAnchor anchor = ImpactAnchor::Right;

    std::string label() const {
        switch (kind) {
            case Kind::GridOls: return "p=" + std::to_string(p);
            case Kind::Fpcr: return "L2_" + std::to_string(q);
            case Kind::Tikhonov: return "tikhonov";
            case Kind::TikhonovOracle: return "tikhonov-oracle";
        }
        throw std::logic_error("unknown estimator kind");
    }

    /** Parameter count used in the adjusted-R² correction. */
    std::size_t dof() const {
        switch (kind) {
            case Kind::GridOls: return p;
            case Kind::Fpcr: return q;
            default: return 0;
        }
    }
};

struct ExperimentPlan {
    ScenarioSpec scenario;  // n and seed fields are overridden per cell
    std::vector<EstimatorSpec> estimators;
    std::vector<std::size_t> n_list;
    std::size_t replications = 100;
    double train_fraction = 0.8;
    std::uint64_t base_seed = 0;

    void validate() const {
        if (estimators.empty()) throw std::invalid_argument("ExperimentPlan: no estimators");
        if (n_list.empty()) throw std::invalid_argument("ExperimentPlan: no sample sizes");
        if (replications < 1) throw std::invalid_argument("ExperimentPlan: replications must be >= 1");
        if (!(train_fraction > 0.0 && train_fraction < 1.0))
            throw std::invalid_argument("ExperimentPlan: train fraction must lie in (0,1)");
    }
};

/** Monte-Carlo mean and standard error of that mean. */
struct CellStat {
    double mean = 0.0;
    double se = 0.0;
};

inline CellStat summarize(const std::vector<double>& values) {
    const auto r = static_cast<double>(values.size());
    double mean = std::accumulate(values.begin(), values.end(), 0.0) / r;
    if (values.size() < 2) return {mean, 0.0};
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    return {mean, std::sqrt(ss / (r - 1.0) / r)};
}

struct ReportRow {
    std::string estimator;
    std::size_t n = 0;
    std::optional<CellStat> pred_error;
    std::optional<CellStat> r2a;
    std::optional<CellStat> rkhs_error;
};

/** Per-(estimator, n) Monte-Carlo means plus run metadata. */
struct ReportTable {
    std::string title;
    std::string scenario;
    std::uint64_t seed = 0;
    std::size_t replications = 0;
    std::size_t grid_m = 0;
    std::vector<std::size_t> n_list;
    std::vector<std::string> estimator_labels;
    std::vector<ReportRow> rows;

    const ReportRow& cell(const std::string& estimator, std::size_t n) const {
        for (const auto& row : rows)
            if (row.estimator == estimator && row.n == n) return row;
        throw std::invalid_argument("ReportTable: no cell (" + estimator + ", n=" +
                                    std::to_string(n) + ")");
    }
};

namespace detail {

inline FittedModel fit_estimator(const EstimatorSpec& est, const FunctionalDataset& train,
                                 const ScenarioSpec& spec) {
    switch (est.kind) {
        case EstimatorSpec::Kind::GridOls:
            return fit_grid_ols(train, est.p, est.intercept, est.anchor);
        case EstimatorSpec::Kind::Fpcr:
            return fit_fpcr(train, est.q);
        case EstimatorSpec::Kind::Tikhonov:
            return fit_tikhonov(train, est.gamma > 0.0 ? est.gamma : default_gamma(train.n()));
        case EstimatorSpec::Kind::TikhonovOracle:
            return fit_tikhonov(train, est.gamma > 0.0 ? est.gamma : default_gamma(train.n()),
                                CovarianceKernel::fractional_brownian(spec.hurst));
    }
    throw std::logic_error("unknown estimator kind");
}

struct RepMetrics {
    std::vector<double> pred_error;  // one per estimator
    std::vector<double> r2a;
};

}  // namespace detail

/**
 * Prediction experiment: per replication, regenerate the scenario data,
 * split, fit every estimator on the training part and evaluate the RMSE on
 * the test part plus the training adjusted R². Deterministic per base seed;
 * replications run in parallel with per-index seeds.
 */
inline ReportTable run_experiment(const ExperimentPlan& plan) {
    plan.validate();
    ReportTable table;
    table.title = "scenario-" + to_string(plan.scenario.scenario);
    table.scenario = to_string(plan.scenario.scenario);
    table.seed = plan.base_seed;
    table.replications = plan.replications;
    table.grid_m = plan.scenario.m;
    table.n_list = plan.n_list;
    for (const auto& est : plan.estimators) table.estimator_labels.push_back(est.label());

    for (std::size_t n : plan.n_list) {
        std::vector<detail::RepMetrics> reps(plan.replications);
        const std::uint64_t n_seed = derive_seed(plan.base_seed, n);
        parallel_for(plan.replications, [&](std::size_t r) {
            ScenarioSpec spec = plan.scenario;
            spec.n = n;
            spec.seed = derive_seed(n_seed, r);
            GeneratedData gen = generate(spec);
            auto [train, test] = split(gen.data, plan.train_fraction, derive_seed(spec.seed, 3));
            detail::RepMetrics metrics;
            for (const auto& est : plan.estimators) {
                FittedModel model = detail::fit_estimator(est, train, spec);
                metrics.pred_error.push_back(prediction_error(model, test));
                Eigen::VectorXd fitted = predict_all(model, train);
                metrics.r2a.push_back(adjusted_r2(train.Y, fitted, est.dof()));
            }
            reps[r] = std::move(metrics);
        });
        for (std::size_t e = 0; e < plan.estimators.size(); ++e) {
            std::vector<double> pe, r2;
            pe.reserve(plan.replications);
            r2.reserve(plan.replications);
            for (const auto& rep : reps) {
                pe.push_back(rep.pred_error[e]);
                r2.push_back(rep.r2a[e]);
            }
            ReportRow row;
            row.estimator = plan.estimators[e].label();
            row.n = n;
            row.pred_error = summarize(pe);
            row.r2a = summarize(r2);
            table.rows.push_back(std::move(row));
        }
    }
    return table;
}

/**
 * Re-splitting experiment for a fixed dataset (the real-data protocol):
 * the dataset is partitioned afresh each replication, nothing is
 * regenerated.
 */
inline ReportTable run_resplit_experiment(const FunctionalDataset& data,
                                          const std::vector<EstimatorSpec>& estimators,
                                          std::size_t replications, double train_fraction,
                                          std::uint64_t base_seed) {
    if (estimators.empty()) throw std::invalid_argument("run_resplit_experiment: no estimators");
    if (replications < 1)
        throw std::invalid_argument("run_resplit_experiment: replications must be >= 1");
    ReportTable table;
    table.title = "resplit";
    table.scenario = "data";
    table.seed = base_seed;
    table.replications = replications;
    table.grid_m = data.m();
    table.n_list = {data.n()};
    for (const auto& est : estimators) table.estimator_labels.push_back(est.label());

    ScenarioSpec dummy;  // only the Hurst default is read by oracle Tikhonov
    std::vector<detail::RepMetrics> reps(replications);
    parallel_for(replications, [&](std::size_t r) {
        auto [train, test] = split(data, train_fraction, derive_seed(base_seed, r));
        detail::RepMetrics metrics;
        for (const auto& est : estimators) {
            FittedModel model = detail::fit_estimator(est, train, dummy);
            metrics.pred_error.push_back(prediction_error(model, test));
            Eigen::VectorXd fitted = predict_all(model, train);
            metrics.r2a.push_back(adjusted_r2(train.Y, fitted, est.dof()));
        }
        reps[r] = std::move(metrics);
    });
    for (std::size_t e = 0; e < estimators.size(); ++e) {
        std::vector<double> pe, r2;
        for (const auto& rep : reps) {
            pe.push_back(rep.pred_error[e]);
            r2.push_back(rep.r2a[e]);
        }
        ReportRow row;
        row.estimator = estimators[e].label();
        row.n = data.n();
        row.pred_error = summarize(pe);
        row.r2a = summarize(r2);
        table.rows.push_back(std::move(row));
    }
    return table;
}

enum class KernelMode { Known, Estimated };

/**
 * Slope-estimation experiment: per replication, regenerate the scenario
 * data, fit the impact-grid OLS on the full sample (no split; the target is
 * estimation error) for every p, and measure ||α̂_p - α||_K^2 under the true
 * kernel or under the fBM kernel with the plug-in Hurst estimate.
 */
inline ReportTable run_rkhs_experiment(Scenario scenario, const std::vector<std::size_t>& p_list,
                                       const std::vector<std::size_t>& n_list, KernelMode mode,
                                       std::size_t replications, std::uint64_t base_seed,
                                       std::size_t m = 101, double sigma = 0.2) {
    if (scenario != Scenario::S2a && scenario != Scenario::S2b)
        throw std::invalid_argument("run_rkhs_experiment: only scenarios 2a and 2b have a finite"
                                    " expansion truth");
    if (p_list.empty() || n_list.empty())
        throw std::invalid_argument("run_rkhs_experiment: empty p or n list");
    ReportTable table;
    table.title = "rkhs-" + to_string(scenario) +
                  (mode == KernelMode::Known ? "-known" : "-est");
    table.scenario = to_string(scenario);
    table.seed = base_seed;
    table.replications = replications;
    table.grid_m = m;
    table.n_list = n_list;
    for (std::size_t p : p_list) table.estimator_labels.push_back("p=" + std::to_string(p));

    for (std::size_t n : n_list) {
        std::vector<std::vector<double>> errs(replications);
        const std::uint64_t n_seed = derive_seed(base_seed, n);
        parallel_for(replications, [&](std::size_t r) {
            ScenarioSpec spec;
            spec.scenario = scenario;
            spec.n = n;
            spec.m = m;
            spec.sigma = sigma;
            spec.seed = derive_seed(n_seed, r);
            GeneratedData gen = generate(spec);
            CovarianceKernel eval_kernel =
                mode == KernelMode::Known
                    ? CovarianceKernel::fractional_brownian(spec.hurst)
                    : CovarianceKernel::fractional_brownian(estimate_hurst(gen.data));
            std::vector<double> row;
            row.reserve(p_list.size());
            for (std::size_t p : p_list) {
                GridOlsModel fit = fit_grid_ols(gen.data, p, /*intercept=*/false);
                row.push_back(rkhs_error(fit, *gen.truth, eval_kernel));
            }
            errs[r] = std::move(row);
        });
        for (std::size_t e = 0; e < p_list.size(); ++e) {
            std::vector<double> vals;
            vals.reserve(replications);
            for (const auto& row : errs) vals.push_back(row[e]);
            ReportRow row;
            row.estimator = "p=" + std::to_string(p_list[e]);
            row.n = n;
            row.rkhs_error = summarize(vals);
            table.rows.push_back(std::move(row));
        }
    }
    return table;
}

}  // namespace flm

#endif  // RKHSFLM_HARNESS_HPP
