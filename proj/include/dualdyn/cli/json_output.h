#ifndef DUALDYN_CLI_JSON_OUTPUT_H_
#define DUALDYN_CLI_JSON_OUTPUT_H_

#include <string>

#include <json.hpp>

#include "dualdyn/analysis.h"
#include "dualdyn/games.h"

namespace dualdyn::cli {

using Json = nlohmann::ordered_json;

// 17 significant digits ("%.17g").
std::string FormatDouble(double value);

// Pretty-printed JSON with every floating-point number written by
// FormatDouble. Non-finite numbers become null.
std::string DumpJson(const Json& value, int indent = 2);

// {checked_times, violations: [{t, measured, bound}], max_ratio, mode, pass}
Json ToJson(const BoundReport& report);
Json ToJson(const MonotonicityReport& report);
// One array per player block.
Json ToJson(const StrategyProfile& profile);

void WriteTextFile(const std::string& path, const std::string& contents);

}  // namespace dualdyn::cli

#endif  // DUALDYN_CLI_JSON_OUTPUT_H_
