#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace fim {

struct ResultRecord {
  std::string scheme;
  std::string sweep_name;
  double sweep_value = 0.0;
  std::size_t trial = 0;
  std::uint64_t seed = 0;
  std::string metric_name;
  double metric_value = 0.0;
  double coherence = 0.0;
  int iters = 0;
  double wall_ms = 0.0;

  friend bool operator==(const ResultRecord&, const ResultRecord&) = default;
};

inline constexpr const char* kCsvHeader =
    "scheme,sweep_name,sweep_value,trial,seed,metric_name,metric_value,coherence,iters,wall_ms";

void write_csv(std::ostream& out, const std::vector<ResultRecord>& records);
/// Writes the records to `path`; throws std::runtime_error naming the path on I/O failure.
void emit_csv(const std::vector<ResultRecord>& records, const std::filesystem::path& path);

std::vector<ResultRecord> read_csv(std::istream& in);
std::vector<ResultRecord> read_csv(const std::filesystem::path& path);

}  // namespace fim
