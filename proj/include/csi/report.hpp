#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace csi {

constexpr const char* kToolVersion = "csi 1.0.0";
constexpr int kReportSchemaVersion = 1;

using Json = nlohmann::ordered_json;

// All numeric report output carries 12 significant digits.
double round12(double x);
Json num(double x);

struct Verdict {
  std::string criterion;
  bool pass = false;
  double value = 0;
  double threshold = 0;
  std::string detail;
};

struct ExperimentReport {
  std::string kind;
  std::uint64_t model_hash = 0;
  std::uint64_t seed = 0;
  Json params = Json::object();
  Json stats = Json::object();
  std::vector<Verdict> verdicts;

  bool all_pass() const;
  Json to_json() const;
  std::string to_json_text() const;  // byte-reproducible given identical inputs
  void print_verdicts() const;       // one line per verdict
};

void write_text_file(const std::string& path, const std::string& text);

// CSV with a mandatory header row
void write_csv_file(const std::string& path, const std::vector<std::string>& header,
                    const std::vector<std::vector<double>>& rows);

std::string hash_hex(std::uint64_t h);

}  // namespace csi
