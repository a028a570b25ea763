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
#include <algorithm>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rkhsflm/estimators.hpp"
#include "rkhsflm/harness.hpp"
#include "rkhsflm/io.hpp"
#include "rkhsflm/simulate.hpp"

namespace {

using namespace flm;

struct SimulateOptions {
    std::string scenario = "2a";
    std::size_t n = 100;
    std::size_t m = 101;
    std::uint64_t seed = 0;
    std::string out;
};

struct FitOptions {
    std::string in;
    std::string estimator;
    std::size_t p = 0;
    std::size_t q = 0;
    std::vector<double> points;
    double gamma = 0.0;
    std::string gamma_rule;
    std::string kernel = "empirical";
    bool intercept = true;
    std::string out;
};

struct ReproduceOptions {
    std::string table;
    std::size_t reps = 100;
    std::uint64_t seed = 20260811;
    std::size_t m = 101;
    double train_frac = 0.8;
    std::string format = "csv";
    std::string out;
};

CovarianceKernel parse_kernel(const std::string& text, const FunctionalDataset& data) {
    if (text == "brownian") return CovarianceKernel::brownian();
    if (text == "empirical") return empirical_kernel(data);
    if (text.rfind("fbm:", 0) == 0) {
        double h = 0.0;
        const char* first = text.data() + 4;
        const char* last = text.data() + text.size();
        auto res = std::from_chars(first, last, h);
        if (res.ec != std::errc{} || res.ptr != last)
            throw std::invalid_argument("bad Hurst exponent in --kernel '" + text + "'");
        return CovarianceKernel::fractional_brownian(h);
    }
    throw std::invalid_argument("unknown kernel '" + text +
                                "' (expected brownian, fbm:H or empirical)");
}

double parse_gamma_rule(const std::string& rule, std::size_t n) {
    if (rule.rfind("n^", 0) != 0)
        throw std::invalid_argument("bad --gamma-rule '" + rule + "' (expected n^<exponent>)");
    double expo = 0.0;
    const char* first = rule.data() + 2;
    const char* last = rule.data() + rule.size();
    auto res = std::from_chars(first, last, expo);
    if (res.ec != std::errc{} || res.ptr != last)
        throw std::invalid_argument("bad exponent in --gamma-rule '" + rule + "'");
    return std::pow(static_cast<double>(n), expo);
}

int run_simulate(const SimulateOptions& opt) {
    ScenarioSpec spec;
    spec.scenario = scenario_from_string(opt.scenario);
    spec.n = opt.n;
    spec.m = opt.m;
    spec.seed = opt.seed;
    GeneratedData gen = generate(spec);
    write_dataset_csv(opt.out, gen.data);
    std::cout << "wrote " << gen.data.n() << " trajectories on " << gen.data.m()
              << " grid points to " << opt.out << '\n';
    return 0;
}

void write_grid_function(std::ostream& os, const char* name, const GridFunction& f) {
    os << name << ":\n";
    for (std::size_t i = 0; i < f.grid.size(); ++i)
        os << "  " << flm::detail::format_time(f.grid[i]) << ' '
           << flm::detail::format_double(f.values(static_cast<Eigen::Index>(i))) << '\n';
}

int run_fit(const FitOptions& opt) {
    IngestResult in = ingest_csv_file(opt.in);
    const FunctionalDataset& data = in.data;
    const std::size_t n = data.n();

    FittedModel model;
    std::size_t dof = 0;
    if (opt.estimator == "grid-ols") {
        if (opt.p == 0) throw std::invalid_argument("grid-ols needs --p");
        model = fit_grid_ols(data, opt.p, opt.intercept);
        dof = opt.p;
    } else if (opt.estimator == "impact-ols") {
        if (opt.points.empty()) throw std::invalid_argument("impact-ols needs --points");
        model = fit_impact_ols(data, opt.points, opt.intercept);
        dof = opt.points.size();
    } else if (opt.estimator == "fpcr") {
        if (opt.q == 0) throw std::invalid_argument("fpcr needs --q");
        model = fit_fpcr(data, opt.q);
        dof = opt.q;
    } else if (opt.estimator == "tikhonov") {
        double gamma = opt.gamma;
        if (gamma <= 0.0)
            gamma = opt.gamma_rule.empty() ? default_gamma(n) : parse_gamma_rule(opt.gamma_rule, n);
        model = fit_tikhonov(data, gamma, parse_kernel(opt.kernel, data));
        dof = 0;
    } else {
        throw std::invalid_argument("unknown estimator '" + opt.estimator +
                                    "' (expected grid-ols, impact-ols, fpcr or tikhonov)");
    }

    Eigen::VectorXd fitted = predict_all(model, data);
    Eigen::VectorXd resid = data.Y - fitted;
    double r2a = adjusted_r2(data.Y, fitted, dof);
    std::size_t params = dof + (opt.estimator == "fpcr" || opt.intercept ? 1 : 0);
    double denom =
        n > params ? static_cast<double>(n - params) : static_cast<double>(n);
    double rse = std::sqrt(resid.squaredNorm() / denom);

    std::ofstream os(opt.out, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open '" + opt.out + "' for writing");
    os << "# rkhsflm fit summary\n";
    os << "input: " << opt.in << '\n';
    os << "n: " << n << '\n';
    os << "m: " << data.m() << '\n';
    if (in.rescaled)
        os << "grid_rescaled_from: [" << flm::detail::format_time(in.original_min) << ", "
           << flm::detail::format_time(in.original_max) << "]\n";
    os << "estimator: " << opt.estimator << '\n';
    std::visit(
        [&](const auto& fit) {
            using T = std::decay_t<decltype(fit)>;
            if constexpr (std::is_same_v<T, GridOlsModel>) {
                if (fit.has_intercept)
                    os << "intercept: " << flm::detail::format_double(fit.intercept) << '\n';
                os << "points:";
                for (double t : fit.points) os << ' ' << flm::detail::format_time(t);
                os << '\n' << "coefficients:";
                for (Eigen::Index j = 0; j < fit.coefficients.size(); ++j)
                    os << ' ' << flm::detail::format_double(fit.coefficients(j));
                os << '\n';
            } else if constexpr (std::is_same_v<T, FpcrModel>) {
                os << "q: " << fit.q << '\n';
                os << "intercept: " << flm::detail::format_double(fit.intercept) << '\n';
                os << "score_coefficients:";
                for (Eigen::Index j = 0; j < fit.score_coefficients.size(); ++j)
                    os << ' ' << flm::detail::format_double(fit.score_coefficients(j));
                os << '\n';
                write_grid_function(os, "beta", fit.beta_fn);
            } else {
                os << "gamma: " << flm::detail::format_double(fit.gamma) << '\n';
                write_grid_function(os, "alpha_hat", fit.alpha_hat);
            }
        },
        model);
    os << "r2a: " << flm::detail::format_double(r2a) << '\n';
    os << "residual_sd: " << flm::detail::format_double(rse) << '\n';
    if (!os) throw std::runtime_error("write to '" + opt.out + "' failed");
    std::cout << "fit written to " << opt.out << '\n';
    return 0;
}

int run_reproduce(const ReproduceOptions& opt) {
    const std::vector<std::size_t> pred_n{100, 300, 500, 700};
    const std::vector<std::size_t> rkhs_n{200, 400, 600, 800};
    const std::vector<std::size_t> rkhs_p{3, 5, 7, 9, 11, 13, 15, 17};

    ReportTable table;
    if (opt.table == "1" || opt.table == "2a" || opt.table == "2b" || opt.table == "3") {
        ExperimentPlan plan;
        plan.scenario.scenario = scenario_from_string(opt.table);
        plan.scenario.m = opt.m;
        // scenario 1 observes a truncated window; its impact grid is left-anchored
        ImpactAnchor anchor =
            plan.scenario.scenario == Scenario::S1 ? ImpactAnchor::Left : ImpactAnchor::Right;
        for (std::size_t p : {6, 10, 14, 18})
            plan.estimators.push_back({EstimatorSpec::Kind::GridOls, p, 0, 0.0, true, anchor});
        for (std::size_t q : {4, 6})
            plan.estimators.push_back({EstimatorSpec::Kind::Fpcr, 0, q, 0.0, true});
        plan.n_list = pred_n;
        plan.replications = opt.reps;
        plan.train_fraction = opt.train_frac;
        plan.base_seed = opt.seed;
        table = run_experiment(plan);
        table.title = "table-" + opt.table;
    } else if (opt.table.rfind("rkhs-", 0) == 0) {
        std::string rest = opt.table.substr(5);
        Scenario sc;
        KernelMode mode;
        if (rest == "2a-known") { sc = Scenario::S2a; mode = KernelMode::Known; }
        else if (rest == "2b-known") { sc = Scenario::S2b; mode = KernelMode::Known; }
        else if (rest == "2a-est") { sc = Scenario::S2a; mode = KernelMode::Estimated; }
        else if (rest == "2b-est") { sc = Scenario::S2b; mode = KernelMode::Estimated; }
        else throw std::invalid_argument("unknown table id '" + opt.table + "'");
        table = run_rkhs_experiment(sc, rkhs_p, rkhs_n, mode, opt.reps, opt.seed, opt.m);
        table.title = "table-" + opt.table;
    } else {
        throw std::invalid_argument(
            "unknown table id '" + opt.table +
            "' (expected 1, 2a, 2b, 3, rkhs-2a-known, rkhs-2b-known, rkhs-2a-est, rkhs-2b-est)");
    }
    write_table_file(opt.out, table, opt.format);
    std::cout << "table " << opt.table << " written to " << opt.out << '\n';
    return 0;
}

/**
 * Expands a plain key=value config file ('#' comments allowed) into
 * --key=value arguments, skipping keys already present on the command line
 * so that explicit flags win. Unknown keys surface as parse errors.
 */
std::vector<std::string> apply_config_file(std::vector<std::string> args) {
    std::string path;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config") {
            if (i + 1 >= args.size()) throw std::invalid_argument("--config needs a file path");
            path = args[i + 1];
            args.erase(args.begin() + static_cast<std::ptrdiff_t>(i),
                       args.begin() + static_cast<std::ptrdiff_t>(i) + 2);
            break;
        }
        if (args[i].rfind("--config=", 0) == 0) {
            path = args[i].substr(9);
            args.erase(args.begin() + static_cast<std::ptrdiff_t>(i));
            break;
        }
    }
    if (path.empty()) return args;

    std::ifstream is(path);
    if (!is) throw std::invalid_argument("cannot open config file '" + path + "'");
    auto trim = [](std::string s) {
        s.erase(0, s.find_first_not_of(" \t\r"));
        auto end = s.find_last_not_of(" \t\r");
        s.erase(end == std::string::npos ? 0 : end + 1);
        return s;
    };
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        std::string text = trim(line.substr(0, line.find('#')));
        if (text.empty()) continue;
        auto eq = text.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument(path + ":" + std::to_string(lineno) +
                                        ": expected key=value");
        std::string key = trim(text.substr(0, eq));
        std::string value = trim(text.substr(eq + 1));
        if (key.empty())
            throw std::invalid_argument(path + ":" + std::to_string(lineno) + ": empty key");
        bool on_cli = false;
        for (const auto& a : args)
            if (a == "--" + key || a.rfind("--" + key + "=", 0) == 0) on_cli = true;
        if (!on_cli) args.push_back("--" + key + "=" + value);
    }
    return args;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"RKHS scalar-on-function linear regression toolkit"};
    app.require_subcommand(1);
    std::string config_doc;
    auto add_config = [&](CLI::App* sub) {
        // handled by apply_config_file before parsing; registered for --help only
        sub->add_option("--config", config_doc, "key=value config file; flags override it");
    };

    SimulateOptions sim;
    auto* sim_cmd = app.add_subcommand("simulate", "generate a scenario dataset as CSV");
    add_config(sim_cmd);
    sim_cmd->add_option("--scenario", sim.scenario, "scenario id: 1, 2a, 2b or 3")->required();
    sim_cmd->add_option("--n", sim.n, "sample size")->check(CLI::PositiveNumber);
    sim_cmd->add_option("--m", sim.m, "grid size")->check(CLI::Range(2u, 100000u));
    sim_cmd->add_option("--seed", sim.seed, "RNG seed");
    sim_cmd->add_option("--out", sim.out, "output CSV path")->required();

    FitOptions fit;
    auto* fit_cmd = app.add_subcommand("fit", "fit one estimator to a dataset CSV");
    add_config(fit_cmd);
    fit_cmd->add_option("--in", fit.in, "input dataset CSV")->required();
    fit_cmd->add_option("--estimator", fit.estimator,
                        "grid-ols | impact-ols | fpcr | tikhonov")->required();
    fit_cmd->add_option("--p", fit.p, "impact grid size for grid-ols");
    fit_cmd->add_option("--q", fit.q, "number of principal components for fpcr");
    fit_cmd->add_option("--points", fit.points, "impact points for impact-ols")->delimiter(',');
    fit_cmd->add_option("--gamma", fit.gamma, "Tikhonov regularization constant");
    fit_cmd->add_option("--gamma-rule", fit.gamma_rule, "rate rule, e.g. n^-0.2");
    fit_cmd->add_option("--kernel", fit.kernel, "brownian | fbm:H | empirical");
    fit_cmd->add_flag("--intercept,!--no-intercept", fit.intercept, "fit an intercept (default on)");
    fit_cmd->add_option("--out", fit.out, "output summary path")->required();

    ReproduceOptions rep;
    auto* rep_cmd = app.add_subcommand("reproduce", "rebuild one of the study tables");
    add_config(rep_cmd);
    rep_cmd->add_option("--table", rep.table,
                        "1 | 2a | 2b | 3 | rkhs-2a-known | rkhs-2b-known | rkhs-2a-est |"
                        " rkhs-2b-est")->required();
    rep_cmd->add_option("--reps", rep.reps, "Monte-Carlo replications")->check(CLI::PositiveNumber);
    rep_cmd->add_option("--seed", rep.seed, "base RNG seed");
    rep_cmd->add_option("--m", rep.m, "grid size")->check(CLI::Range(2u, 100000u));
    rep_cmd->add_option("--train-frac", rep.train_frac, "training fraction")
        ->check(CLI::Range(0.01, 0.99));
    rep_cmd->add_option("--format", rep.format, "csv | md")->check(CLI::IsMember({"csv", "md"}));
    rep_cmd->add_option("--out", rep.out, "output table path")->required();

    try {
        std::vector<std::string> args(argv + 1, argv + argc);
        args = apply_config_file(std::move(args));
        std::reverse(args.begin(), args.end());  // CLI11 vector parse wants reversed args
        app.parse(std::move(args));
        if (sim_cmd->parsed()) return run_simulate(sim);
        if (fit_cmd->parsed()) return run_fit(fit);
        return run_reproduce(rep);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << '\n';
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "numeric error: " << e.what() << '\n';
        return 2;
    }
}
