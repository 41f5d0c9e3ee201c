#include "fim/csv.hpp"

#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace fim {

namespace {

std::string number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void check_field(const std::string& s) {
  if (s.find_first_of(",\n\r\"") != std::string::npos)
    throw std::invalid_argument("CSV text field contains a separator: " + s);
}

}  // namespace

void write_csv(std::ostream& out, const std::vector<ResultRecord>& records) {
  out << kCsvHeader << '\n';
  for (const auto& r : records) {
    check_field(r.scheme);
    check_field(r.sweep_name);
    check_field(r.metric_name);
    out << r.scheme << ',' << r.sweep_name << ',' << number(r.sweep_value) << ',' << r.trial << ',' << r.seed << ','
        << r.metric_name << ',' << number(r.metric_value) << ',' << number(r.coherence) << ',' << r.iters << ','
        << number(r.wall_ms) << '\n';
  }
}

void emit_csv(const std::vector<ResultRecord>& records, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  write_csv(out, records);
  out.flush();
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

std::vector<ResultRecord> read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) throw std::runtime_error("CSV header does not match the schema");
  std::vector<ResultRecord> out;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string item;
    while (std::getline(ss, item, ',')) f.push_back(item);
    if (f.size() != 10) throw std::runtime_error("CSV line " + std::to_string(lineno) + ": expected 10 fields");
    try {
      ResultRecord r;
      r.scheme = f[0];
      r.sweep_name = f[1];
      r.sweep_value = std::stod(f[2]);
      r.trial = std::stoull(f[3]);
      r.seed = std::stoull(f[4]);
      r.metric_name = f[5];
      r.metric_value = std::stod(f[6]);
      r.coherence = std::stod(f[7]);
      r.iters = std::stoi(f[8]);
      r.wall_ms = std::stod(f[9]);
      out.push_back(std::move(r));
    } catch (const std::logic_error&) {
      throw std::runtime_error("CSV line " + std::to_string(lineno) + ": malformed number");
    }
  }
  return out;
}

std::vector<ResultRecord> read_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return read_csv(in);
}

}  // namespace fim
