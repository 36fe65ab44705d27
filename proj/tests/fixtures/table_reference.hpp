#pragma once

#include <array>
#include <string>

#include "flexkin/metrics.hpp"

// Reference hardware results (84,000 samples, 70/30 split) and their
// expected five-decimal cells, for formatter checks.
namespace table_reference {

struct Cell {
  double value;
  const char* text;
};

// [method][metric][axis]; metric order RMSE, MAE, Max Error; axes y, z, theta.
inline constexpr const char* kMethods[3] = {"Raw", "LR", "RBFNN"};
inline constexpr Cell kCells[3][3][3] = {
    {{{0.04406, "0.04406"}, {0.03863, "0.03863"}, {0.02162, "0.02162"}},
     {{0.04339, "0.04339"}, {0.03817, "0.03817"}, {0.02158, "0.02158"}},
     {{0.05556, "0.05556"}, {0.04517, "0.04517"}, {0.02393, "0.02393"}}},
    {{{0.00379, "0.00379"}, {0.00629, "0.00629"}, {0.00299, "0.00299"}},
     {{0.00283, "0.00283"}, {0.00502, "0.00502"}, {0.00223, "0.00223"}},
     {{0.01903, "0.01903"}, {0.02259, "0.02259"}, {0.01747, "0.01747"}}},
    {{{0.00021, "0.00021"}, {0.00041, "0.00041"}, {0.00024, "0.00024"}},
     {{0.00016, "0.00016"}, {0.00033, "0.00033"}, {0.00018, "0.00018"}},
     {{0.00102, "0.00102"}, {0.00156, "0.00156"}, {0.00124, "0.00124"}}},
};

inline flexkin::MetricsReport report() {
  flexkin::MetricsReport r;
  for (int m = 0; m < 3; ++m) {
    auto stats = [&](int axis) {
      return flexkin::ErrorStats{kCells[m][0][axis].value, kCells[m][1][axis].value,
                                 kCells[m][2][axis].value};
    };
    r.methods.push_back({kMethods[m], {stats(0), stats(1), stats(2)}});
  }
  return r;
}

// Expected Markdown body, built from the text cells.
inline std::string markdown() {
  std::string out = "| Metric | Method | y [m] | z [m] | θ [rad] |\n|---|---|---:|---:|---:|\n";
  const char* labels[3] = {"RMSE", "MAE", "Max Error"};
  for (int metric = 0; metric < 3; ++metric)
    for (int m = 0; m < 3; ++m)
      out += std::string("| ") + (m == 1 ? labels[metric] : "") + " | " + kMethods[m] + " | " +
             kCells[m][metric][0].text + " | " + kCells[m][metric][1].text + " | " +
             kCells[m][metric][2].text + " |\n";
  return out;
}

}  // namespace table_reference
