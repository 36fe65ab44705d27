#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "flexkin/imu_synth.hpp"

namespace flexkin {

/// Shortest decimal that parses back to the same double.
std::string format_double(double value);
double parse_double(std::string_view text);

/// Writes `imu.csv` (t,imu_id,gx,gy,gz,ax,ay,az; rows sample-major) and
/// `ground_truth.csv` (t,y_gt,z_gt,theta_gt,theta_1_gt..theta_n_gt) into dir.
void export_dataset(const std::vector<ImuTrace>& traces, const GroundTruth& truth,
                    const std::filesystem::path& dir);

std::vector<ImuTrace> read_imu_csv(const std::filesystem::path& path);
void write_imu_csv(const std::vector<ImuTrace>& traces, const std::filesystem::path& path);

/// Joint rates/accels are not stored; imported JointStates carry angles only.
GroundTruth read_ground_truth_csv(const std::filesystem::path& path);
void write_ground_truth_csv(const GroundTruth& truth, const std::filesystem::path& path);

/// Minimal CSV reader: header names plus numeric rows.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  std::size_t column(std::string_view name) const;
};

CsvTable read_csv(const std::filesystem::path& path);

/// Writes header + rows with format_double; throws IoError on failure.
void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

}  // namespace flexkin
