#pragma once
// CSV and JSON persistence for tables, parameters, results and simulation reports.

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "snl/bayes.hpp"
#include "snl/fit.hpp"
#include "snl/result.hpp"
#include "snl/sim.hpp"
#include "snl/types.hpp"

namespace snl {

using Json = nlohmann::ordered_json;

/// Thrown for malformed CSV; carries 1-based line and column.
class ParseError : public InputError {
  public:
    ParseError(const std::string& source, int line, int column, const std::string& what);
    int line() const noexcept { return line_; }
    int column() const noexcept { return column_; }

  private:
    int line_;
    int column_;
};

/// Header `arm,cat0,...,catJ`, then rows `P,...` and `V,...` in either order.
FailureTable parse_table_csv(const std::string& text, const std::string& source = "<input>");

/// Reads the CSV and, when present, the `<stem>.labels.json` sidecar ({"labels": [...]}).
FailureTable read_table_csv(const std::filesystem::path& path);

std::string table_to_csv(const FailureTable& table);

Json to_json(const FailureTable& table);
Json to_json(const SnlParams& params);
SnlParams params_from_json(const Json& j);
Json to_json(const TestResult& result);
Json to_json(const FitResult& fit);
Json to_json(const PriorSpec& priors);
Json to_json(const ScenarioConfig& cfg);
ScenarioConfig scenario_from_json(const Json& j);

/// Single object or array of scenario objects.
std::vector<ScenarioConfig> read_scenarios(const std::filesystem::path& path);

std::string posterior_to_csv(const PosteriorCurve& curve);
std::string grid_to_csv(const GridReport& report);
std::string column_csv(const std::string& header, const std::vector<double>& values);

/// Shortest round-tripping decimal representation.
std::string format_double(double value);

void write_text(const std::filesystem::path& path, const std::string& content);

}  // namespace snl
