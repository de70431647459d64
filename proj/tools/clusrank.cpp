// Command-line front end: `clusrank test` runs one clustered test on a CSV
// file, `clusrank sim` runs size/power simulations.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "clusrank/csv.hpp"
#include "clusrank/report.hpp"
#include "clusrank/simulator.hpp"

namespace {

using namespace clusrank;

std::pair<double, double> parse_rho(const std::string& text) {
    std::istringstream in(text);
    std::string a, b;
    std::getline(in, a, ',');
    const bool two = static_cast<bool>(std::getline(in, b, ','));
    try {
        const double r0 = std::stod(a);
        return {r0, two ? std::stod(b) : r0};
    } catch (const std::exception&) {
        throw Error("cannot parse --rho '" + text + "'");
    }
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error("cannot write '" + path + "'");
    }
    out << content;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Clustered Wilcoxon rank-sum and signed-rank tests"};
    app.require_subcommand(1);

    TestRequest req;
    std::string group, stratum, method = "rgl", alternative = "two-sided";
    bool json = false;
    auto* test = app.add_subcommand("test", "Run a clustered rank test on a CSV file");
    test->add_option("--input", req.input, "CSV file with a header row")->required();
    test->add_option("--value", req.value_column, "Value column (paired differences when --paired)")->required();
    test->add_option("--cluster", req.cluster_column, "Cluster id column")->required();
    test->add_option("--group", group, "Group column (rank-sum tests)");
    test->add_option("--stratum", stratum, "Stratum column (rgl rank-sum only)");
    test->add_flag("--paired", req.paired, "Signed-rank test on paired differences");
    test->add_option("--method", method, "rgl or ds")->capture_default_str();
    test->add_option("--alternative", alternative, "two-sided, less or greater")->capture_default_str();
    test->add_option("--mu", req.mu, "Location shift under the null")->capture_default_str();
    test->add_flag("--exact", req.exact, "Permutation test (rgl only)");
    test->add_option("--B", req.draws, "Random permutations; 0 enumerates all")->capture_default_str();
    test->add_option("--seed", req.seed, "Seed for random permutations")->capture_default_str();
    test->add_flag("--json", json, "Emit a JSON record instead of text");

    Scenario scen;
    std::string table, rho = "0.1", structure = "ex", out_path, dump_path;
    bool subunit = false;
    unsigned threads = 0;
    auto* sim = app.add_subcommand("sim", "Empirical size/power simulation");
    sim->add_option("--table", table, "Run a full table grid: rsex, rsar, srex or srar");
    sim->add_flag("--paired", scen.paired, "Signed-rank scenario");
    sim->add_option("--nclus", scen.nclus, "Clusters per group (total when paired)")->capture_default_str();
    sim->add_option("--maxclsize", scen.maxclsize, "Cluster size before thinning")->capture_default_str();
    sim->add_option("--delta", scen.delta, "Location shift")->capture_default_str();
    sim->add_option("--rho", rho, "Correlation, or 'rho0,rho1' per group")->capture_default_str();
    sim->add_option("--structure", structure, "ex or ar1")->capture_default_str();
    sim->add_option("--misrate", scen.misrate, "Fraction of rows dropped at random")->capture_default_str();
    sim->add_flag("--subunit", subunit, "Assign groups at the subunit level");
    sim->add_option("--level", scen.level, "Significance level")->capture_default_str();
    sim->add_option("--nrep", scen.nrep, "Replicates per scenario")->capture_default_str();
    sim->add_option("--seed", scen.seed, "Master seed")->capture_default_str();
    sim->add_option("--out", out_path, "Write result rows as CSV");
    sim->add_option("--dump", dump_path, "Write the first replicate's data as CSV (scenario mode)");
    sim->add_option("--threads", threads, "Worker threads (default: CLUSRANK_THREADS or all cores)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (*test) {
            if (!group.empty()) {
                req.group_column = group;
            }
            if (!stratum.empty()) {
                req.stratum_column = stratum;
            }
            req.method = parse_method(method);
            req.alternative = parse_alternative(alternative);
            const auto result = run_test(req);
            if (json) {
                std::cout << to_json(req, result).dump(2) << "\n";
            } else {
                std::cout << format_text(req, result);
            }
            for (const auto& w : result.warnings) {
                std::cerr << "warning: " << w << "\n";
            }
            return 0;
        }

        if (!table.empty()) {
            const auto report = run_table(parse_table(table), scen.nrep, scen.seed, threads);
            std::cout << format_table(report);
            if (!out_path.empty()) {
                std::ostringstream csv;
                write_table_csv(csv, report);
                write_file(out_path, csv.str());
            }
            return 0;
        }

        std::tie(scen.rho0, scen.rho1) = parse_rho(rho);
        scen.structure = parse_structure(structure);
        scen.clusgrp = !subunit;
        scen.validate();
        if (!dump_path.empty()) {
            std::ostringstream csv;
            write_sample_csv(csv, generate_replicate(scen, 0));
            write_file(dump_path, csv.str());
        }
        const auto report = simpower(scen, threads);
        std::cout << format_power(report);
        if (!out_path.empty()) {
            std::ostringstream csv;
            write_power_csv(csv, {report});
            write_file(out_path, csv.str());
        }
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "clusrank: error: " << e.what() << "\n";
        return 1;
    }
}
