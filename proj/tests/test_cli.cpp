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
#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "rkhsflm/io.hpp"
#include "rkhsflm/simulate.hpp"
#include "test_helpers.hpp"

using namespace flm;

namespace {

const std::string kDir = "cli_tmp";

struct CliRun {
    int exit_code;
    std::string out;
    std::string err;
};

CliRun run_cli(const std::string& args) {
    std::string out_path = kDir + "/stdout.txt";
    std::string err_path = kDir + "/stderr.txt";
    std::string cmd = std::string(RKHSFLM_CLI_PATH) + " " + args + " > " + out_path + " 2> " +
                      err_path;
    int rc = std::system(cmd.c_str());
    auto slurp = [](const std::string& p) {
        std::ifstream is(p, std::ios::binary);
        std::ostringstream buf;
        buf << is.rdbuf();
        return buf.str();
    };
    return CliRun{WEXITSTATUS(rc), slurp(out_path), slurp(err_path)};
}

std::string slurp_file(const std::string& p) {
    std::ifstream is(p, std::ios::binary);
    std::ostringstream buf;
    buf << is.rdbuf();
    return buf.str();
}

struct TempTree {
    TempTree() { REQUIRE(std::system(("mkdir -p " + kDir).c_str()) == 0); }
};

}  // namespace

TEST_CASE("cli simulate writes the documented schema", "[cli]") {
    TempTree tree;
    CliRun r = run_cli("simulate --scenario 2a --n 5 --m 101 --seed 7 --out " + kDir + "/d.csv");
    REQUIRE(r.exit_code == 0);
    std::string body = slurp_file(kDir + "/d.csv");
    std::istringstream is(body);
    std::string header;
    std::getline(is, header);
    REQUIRE(header.rfind("t_0,t_0.01,", 0) == 0);
    REQUIRE(header.substr(header.size() - 2) == ",y");
    int rows = 0;
    for (std::string line; std::getline(is, line);)
        if (!line.empty()) ++rows;
    REQUIRE(rows == 5);
}

TEST_CASE("cli fit recovers a noiseless impact model through the file format", "[cli]") {
    TempTree tree;
    ScenarioSpec spec;
    spec.scenario = Scenario::S2a;
    spec.n = 50;
    spec.sigma = 0.0;
    spec.seed = 99;
    write_dataset_csv(kDir + "/noiseless.csv", generate(spec).data);

    CliRun r = run_cli("fit --in " + kDir + "/noiseless.csv --estimator impact-ols"
                       " --points 0.2,0.4,0.9 --no-intercept --out " + kDir + "/fit.txt");
    REQUIRE(r.exit_code == 0);
    std::string summary = slurp_file(kDir + "/fit.txt");
    REQUIRE(summary.find("points: 0.2 0.4 0.9") != std::string::npos);
    auto pos = summary.find("coefficients:");
    REQUIRE(pos != std::string::npos);
    std::istringstream coefs(summary.substr(pos + 13));
    double c1, c2, c3;
    coefs >> c1 >> c2 >> c3;
    REQUIRE(c1 == Catch::Approx(2.0).margin(1e-8));
    REQUIRE(c2 == Catch::Approx(-5.0).margin(1e-8));
    REQUIRE(c3 == Catch::Approx(1.0).margin(1e-8));
}

TEST_CASE("cli fit reports training diagnostics", "[cli]") {
    TempTree tree;
    CliRun sim =
        run_cli("simulate --scenario 2a --n 300 --seed 4 --out " + kDir + "/train.csv");
    REQUIRE(sim.exit_code == 0);
    CliRun r = run_cli("fit --in " + kDir + "/train.csv --estimator grid-ols --p 10 --out " +
                       kDir + "/gfit.txt");
    REQUIRE(r.exit_code == 0);
    std::string summary = slurp_file(kDir + "/gfit.txt");
    auto pos = summary.find("r2a: ");
    REQUIRE(pos != std::string::npos);
    double r2a = std::stod(summary.substr(pos + 5));
    REQUIRE(r2a >= 0.95);
    REQUIRE(summary.find("residual_sd: ") != std::string::npos);
}

TEST_CASE("cli error contracts", "[cli]") {
    TempTree tree;

    SECTION("fpcr with q beyond the retained rank exits 1 with a message") {
        ScenarioSpec spec;
        spec.scenario = Scenario::S3;
        spec.n = 5;
        spec.seed = 3;
        write_dataset_csv(kDir + "/tiny.csv", generate(spec).data);
        CliRun r = run_cli("fit --in " + kDir + "/tiny.csv --estimator fpcr --q 10 --out " +
                           kDir + "/f.txt");
        REQUIRE(r.exit_code == 1);
        REQUIRE(r.err.find("exceeds retained rank") != std::string::npos);
    }
    SECTION("schema violations exit 1 and carry the line number") {
        std::ofstream(kDir + "/bad.csv") << "t_0,t_1,y\n1,2,3\n1,oops,3\n";
        CliRun r = run_cli("fit --in " + kDir + "/bad.csv --estimator grid-ols --p 1 --out " +
                           kDir + "/f.txt");
        REQUIRE(r.exit_code == 1);
        REQUIRE(r.err.find("bad.csv:3") != std::string::npos);
    }
    SECTION("unknown table id exits 1") {
        CliRun r = run_cli("reproduce --table 9z --out " + kDir + "/t.csv");
        REQUIRE(r.exit_code == 1);
        REQUIRE(r.err.find("unknown table id") != std::string::npos);
    }
    SECTION("missing required flag exits 1") {
        CliRun r = run_cli("simulate --scenario 2a");
        REQUIRE(r.exit_code == 1);
    }
    SECTION("unknown scenario exits 1") {
        CliRun r = run_cli("simulate --scenario 7 --out " + kDir + "/x.csv");
        REQUIRE(r.exit_code == 1);
    }
}

TEST_CASE("cli config file provides defaults, flags override", "[cli]") {
    TempTree tree;
    std::ofstream(kDir + "/sim.cfg") << "# scenario settings\nscenario=2a\nn=4\nseed=12\n";

    CliRun from_cfg = run_cli("simulate --config " + kDir + "/sim.cfg --out " + kDir + "/a.csv");
    REQUIRE(from_cfg.exit_code == 0);
    IngestResult a = ingest_csv_file(kDir + "/a.csv");
    REQUIRE(a.data.n() == 4);

    CliRun overridden = run_cli("simulate --config " + kDir + "/sim.cfg --n 9 --out " + kDir +
                                "/b.csv");
    REQUIRE(overridden.exit_code == 0);
    IngestResult b = ingest_csv_file(kDir + "/b.csv");
    REQUIRE(b.data.n() == 9);

    std::ofstream(kDir + "/bad.cfg") << "scenario=2a\nwibble=3\n";
    CliRun rejected = run_cli("simulate --config " + kDir + "/bad.cfg --out " + kDir + "/c.csv");
    REQUIRE(rejected.exit_code == 1);
}

TEST_CASE("cli scenario-3 responses have a sane spread", "[cli][mc]") {
    TempTree tree;
    CliRun r = run_cli("simulate --scenario 3 --n 100 --seed 21 --out " + kDir + "/s3.csv");
    REQUIRE(r.exit_code == 0);
    IngestResult in = ingest_csv_file(kDir + "/s3.csv");
    double sd = std::sqrt(oracle::sample_variance(in.data.Y));
    REQUIRE(sd >= 0.1);
    REQUIRE(sd <= 3.0);
}
