#include "flexkin/dataset_io.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <sstream>

#include "flexkin/errors.hpp"

namespace flexkin {

namespace fs = std::filesystem;

std::string format_double(double value) {
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  if (ec != std::errc{}) throw ArgumentError("format_double: conversion failed");
  return std::string(buf.data(), ptr);
}

double parse_double(std::string_view text) {
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
  while (!text.empty() && (text.back() == ' ' || text.back() == '\r' || text.back() == '\t'))
    text.remove_suffix(1);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size())
    throw ArgumentError("not a number: '" + std::string(text) + "'");
  return value;
}

std::size_t CsvTable::column(std::string_view name) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return i;
  throw ArgumentError("CSV has no column '" + std::string(name) + "'");
}

namespace {

std::vector<std::string_view> split_line(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

std::ofstream open_for_write(const fs::path& path) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
    if (ec) throw IoError("cannot create directory", path.parent_path().string());
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open for writing", path.string());
  return out;
}

void finish(std::ofstream& out, const fs::path& path) {
  out.flush();
  if (!out) throw IoError("write failed", path.string());
}

}  // namespace

CsvTable read_csv(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open for reading", path.string());
  CsvTable table;
  std::string line;
  if (!std::getline(in, line)) throw IoError("empty CSV file", path.string());
  if (!line.empty() && line.back() == '\r') line.pop_back();
  for (auto f : split_line(line)) table.header.emplace_back(f);

  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    const auto fields = split_line(line);
    if (fields.size() != table.header.size())
      throw IoError("row " + std::to_string(lineno) + " has " +
                        std::to_string(fields.size()) + " fields, expected " +
                        std::to_string(table.header.size()),
                    path.string());
    std::vector<double> row;
    row.reserve(fields.size());
    try {
      for (auto f : fields) row.push_back(parse_double(f));
    } catch (const ArgumentError& e) {
      throw IoError(std::string("row ") + std::to_string(lineno) + ": " + e.what(),
                    path.string());
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

void write_csv(const fs::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
  auto out = open_for_write(path);
  for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
  out << '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << format_double(row[i]);
    out << '\n';
  }
  finish(out, path);
}

void write_imu_csv(const std::vector<ImuTrace>& traces, const fs::path& path) {
  const std::size_t n = traces.empty() ? 0 : traces.front().size();
  for (const auto& t : traces)
    if (t.size() != n) throw ArgumentError("export: IMU traces have unequal lengths");
  auto out = open_for_write(path);
  out << "t,imu_id,gx,gy,gz,ax,ay,az\n";
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < traces.size(); ++i) {
      const auto& s = traces[i][k];
      out << format_double(s.t) << ',' << i;
      for (int a = 0; a < 3; ++a) out << ',' << format_double(s.gyro[a]);
      for (int a = 0; a < 3; ++a) out << ',' << format_double(s.accel[a]);
      out << '\n';
    }
  }
  finish(out, path);
}

std::vector<ImuTrace> read_imu_csv(const fs::path& path) {
  const CsvTable table = read_csv(path);
  const std::vector<std::string> expected{"t", "imu_id", "gx", "gy", "gz", "ax", "ay", "az"};
  if (table.header != expected) throw IoError("unexpected IMU CSV header", path.string());
  std::vector<ImuTrace> traces;
  for (const auto& row : table.rows) {
    const double id = row[1];
    if (id < 0.0 || id != std::floor(id) || id > 1e6)
      throw IoError("invalid imu_id", path.string());
    const auto idx = static_cast<std::size_t>(id);
    if (idx >= traces.size()) traces.resize(idx + 1);
    ImuSample s;
    s.t = row[0];
    s.gyro = {row[2], row[3], row[4]};
    s.accel = {row[5], row[6], row[7]};
    traces[idx].push_back(s);
  }
  for (const auto& t : traces)
    if (t.size() != traces.front().size())
      throw IoError("IMU traces have unequal lengths", path.string());
  return traces;
}

void write_ground_truth_csv(const GroundTruth& truth, const fs::path& path) {
  const std::size_t n = truth.t.size();
  if (truth.pose.size() != n || truth.joints.size() != n)
    throw ArgumentError("export: ground-truth traces have unequal lengths");
  const std::size_t joints = n ? truth.joints.front().angles.size() : 0;
  std::vector<std::string> header{"t", "y_gt", "z_gt", "theta_gt"};
  for (std::size_t j = 0; j < joints; ++j) header.push_back("theta_" + std::to_string(j + 1) + "_gt");
  std::vector<std::vector<double>> rows;
  rows.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    if (truth.joints[k].angles.size() != joints)
      throw ArgumentError("export: joint count changes within the trace");
    std::vector<double> row{truth.t[k], truth.pose[k].y, truth.pose[k].z, truth.pose[k].theta};
    row.insert(row.end(), truth.joints[k].angles.begin(), truth.joints[k].angles.end());
    rows.push_back(std::move(row));
  }
  write_csv(path, header, rows);
}

GroundTruth read_ground_truth_csv(const fs::path& path) {
  const CsvTable table = read_csv(path);
  if (table.header.size() < 4 || table.header[0] != "t" || table.header[1] != "y_gt" ||
      table.header[2] != "z_gt" || table.header[3] != "theta_gt")
    throw IoError("unexpected ground-truth CSV header", path.string());
  GroundTruth truth;
  for (const auto& row : table.rows) {
    truth.t.push_back(row[0]);
    truth.pose.push_back({row[1], row[2], row[3]});
    JointState js;
    js.angles.assign(row.begin() + 4, row.end());
    truth.joints.push_back(std::move(js));
  }
  return truth;
}

void export_dataset(const std::vector<ImuTrace>& traces, const GroundTruth& truth,
                    const fs::path& dir) {
  for (const auto& t : traces)
    if (t.size() != truth.t.size())
      throw ArgumentError("export: IMU and ground-truth traces are not aligned");
  write_imu_csv(traces, dir / "imu.csv");
  write_ground_truth_csv(truth, dir / "ground_truth.csv");
}

}  // namespace flexkin
