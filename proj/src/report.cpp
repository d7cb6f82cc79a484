#include "csi/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "csi/model.hpp"

namespace csi {

double round12(double x) {
  if (!std::isfinite(x)) return x;
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return std::strtod(buf, nullptr);
}

Json num(double x) {
  if (std::isnan(x)) return nullptr;
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return round12(x);
}

bool ExperimentReport::all_pass() const {
  for (const auto& v : verdicts)
    if (!v.pass) return false;
  return true;
}

Json ExperimentReport::to_json() const {
  Json j;
  j["schema_version"] = kReportSchemaVersion;
  j["tool_version"] = kToolVersion;
  j["kind"] = kind;
  j["model_hash"] = hash_hex(model_hash);
  j["seed"] = seed;
  j["params"] = params;
  j["stats"] = stats;
  auto arr = Json::array();
  for (const auto& v : verdicts) {
    Json vj;
    vj["criterion"] = v.criterion;
    vj["pass"] = v.pass;
    vj["value"] = num(v.value);
    vj["threshold"] = num(v.threshold);
    if (!v.detail.empty()) vj["detail"] = v.detail;
    arr.push_back(std::move(vj));
  }
  j["verdicts"] = std::move(arr);
  return j;
}

std::string ExperimentReport::to_json_text() const { return to_json().dump(2) + "\n"; }

void ExperimentReport::print_verdicts() const {
  for (const auto& v : verdicts) {
    std::printf("[%s] %s: value=%.6g threshold=%.6g%s%s\n", v.pass ? "PASS" : "FAIL",
                v.criterion.c_str(), v.value, v.threshold, v.detail.empty() ? "" : " ",
                v.detail.c_str());
  }
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::BadSpec, "cannot write file: " + path);
  out << text;
}

void write_csv_file(const std::string& path, const std::vector<std::string>& header,
                    const std::vector<std::vector<double>>& rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::BadSpec, "cannot write file: " + path);
  for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
  out << "\n";
  char buf[40];
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%.12g", row[i]);
      out << (i ? "," : "") << buf;
    }
    out << "\n";
  }
}

std::string hash_hex(std::uint64_t h) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace csi
