#include "dualdyn/cli/json_output.h"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "dualdyn/error.h"

namespace dualdyn::cli {

namespace {

void Dump(const Json& value, int indent, int depth, std::ostringstream& out) {
  const std::string pad(static_cast<std::size_t>(indent * (depth + 1)), ' ');
  const std::string close_pad(static_cast<std::size_t>(indent * depth), ' ');
  switch (value.type()) {
    case Json::value_t::object: {
      if (value.empty()) {
        out << "{}";
        return;
      }
      out << "{\n";
      bool first = true;
      for (auto it = value.begin(); it != value.end(); ++it) {
        if (!first) out << ",\n";
        first = false;
        out << pad << Json(it.key()).dump() << ": ";
        Dump(it.value(), indent, depth + 1, out);
      }
      out << "\n" << close_pad << "}";
      return;
    }
    case Json::value_t::array: {
      if (value.empty()) {
        out << "[]";
        return;
      }
      bool scalars = true;
      for (const auto& item : value) scalars = scalars && item.is_primitive();
      if (scalars) {
        out << "[";
        for (std::size_t i = 0; i < value.size(); ++i) {
          if (i) out << ", ";
          Dump(value[i], indent, depth + 1, out);
        }
        out << "]";
        return;
      }
      out << "[\n";
      for (std::size_t i = 0; i < value.size(); ++i) {
        if (i) out << ",\n";
        out << pad;
        Dump(value[i], indent, depth + 1, out);
      }
      out << "\n" << close_pad << "]";
      return;
    }
    case Json::value_t::number_float: {
      const double v = value.get<double>();
      out << (std::isfinite(v) ? FormatDouble(v) : "null");
      return;
    }
    default:
      out << value.dump();
  }
}

}  // namespace

std::string FormatDouble(double value) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

std::string DumpJson(const Json& value, int indent) {
  std::ostringstream out;
  Dump(value, indent, 0, out);
  out << "\n";
  return out.str();
}

Json ToJson(const BoundReport& report) {
  Json violations = Json::array();
  for (const auto& v : report.violations) {
    violations.push_back({{"t", v.t}, {"measured", v.measured}, {"bound", v.bound}});
  }
  return {{"checked_times", report.checked_times},
          {"violations", violations},
          {"max_ratio", report.max_ratio},
          {"mode", std::string(ValidityName(report.mode))},
          {"pass", report.pass()}};
}

Json ToJson(const MonotonicityReport& report) {
  return {{"eta_est", report.eta_est},
          {"mu_est", report.mu_est},
          {"relative_eta_est", report.relative_eta_est},
          {"relative_mu_est", report.relative_mu_est},
          {"samples_used", report.samples_used},
          {"sup_ratio", report.sup_ratio},
          {"inf_ratio", report.inf_ratio},
          {"sup_relative_ratio", report.sup_relative_ratio}};
}

Json ToJson(const StrategyProfile& profile) {
  Json players = Json::array();
  for (std::size_t p = 0; p < profile.partition().num_blocks(); ++p) {
    const Eigen::VectorXd block = profile.block(p);
    players.push_back(std::vector<double>(block.data(), block.data() + block.size()));
  }
  return players;
}

void WriteTextFile(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) Fail(ErrorCode::kConfig, "cannot write '" + path + "'");
  out << contents;
  if (!out) Fail(ErrorCode::kConfig, "write to '" + path + "' failed");
}

}  // namespace dualdyn::cli
