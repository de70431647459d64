#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>

#include <json.hpp>

#include "clusrank/sample.hpp"
#include "clusrank/simulator.hpp"
#include "clusrank/types.hpp"

namespace clusrank {

enum class Method { rgl, ds };

Method parse_method(std::string_view text);
std::string_view to_string(Method m);

/// Parameters of a single test run, mirroring the command-line flags.
struct TestRequest {
    std::string input;
    std::string value_column = "x";
    std::string cluster_column = "cid";
    std::optional<std::string> group_column;
    std::optional<std::string> stratum_column;
    Method method = Method::rgl;
    bool paired = false;
    Alternative alternative = Alternative::two_sided;
    double mu = 0.0;
    bool exact = false;
    std::size_t draws = 2000;
    std::uint64_t seed = 0;

    /// Rejects flag combinations no test supports.
    void validate() const;
};

/// Picks and runs the test matching the request and the data layout.
TestResult dispatch(const TestRequest& request, const ClusteredSample& sample);

/// Reads the CSV named by the request, ingests it and dispatches.
TestResult run_test(const TestRequest& request);

/// Printed report; numbers rounded to 6 significant digits.
std::string format_text(const TestRequest& request, const TestResult& result);

/// Same fields as format_text at full precision.
nlohmann::json to_json(const TestRequest& request, const TestResult& result);

/// One row per report, RGL and DS side by side.
void write_power_csv(std::ostream& out, const std::vector<PowerReport>& reports,
                     const std::string& table = "");
void write_table_csv(std::ostream& out, const TableReport& report);

/// Human-readable rejection percentages laid out like the published tables,
/// with the published value in parentheses.
std::string format_table(const TableReport& report);
std::string format_power(const PowerReport& report);

} // namespace clusrank
