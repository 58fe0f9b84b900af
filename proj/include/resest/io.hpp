#pragma once

#include <string>
#include <vector>

#include "resest/ltv.hpp"

namespace resest {

/// System file (JSON):
///   {"n": 2, "ny": 1, "T": 100, "lti": true, "normalize": true,
///    "A": [a11, a12, a21, a22], "C": [c11, c12]}
/// Matrices are row-major. With "lti": false, "A" holds T-1 matrices and
/// "C" holds T matrices, each a flat row-major array.
struct SystemDescription {
  LtvSystem sys;
  bool normalize = true;
};

SystemDescription parse_system(const std::string& text, const std::string& origin = "<string>");
SystemDescription load_system(const std::string& path);
std::string system_to_json(const LtvSystem& sys, bool normalize);

/// The two-state, single-output benchmark
///   A = [0.7 0.45; -0.5 1],  C = [1 2]
/// used throughout the experiments.
LtvSystem benchmark_system(int horizon = 100);

/// Trajectory data: CSV with header t, x_0.., y_0.., s_0.. (x and s optional).
struct Dataset {
  Matrix X;  // n x T, empty if absent
  Matrix Y;  // ny x T
  Matrix S;  // ny x T, empty if absent
};

Dataset load_dataset(const std::string& path);
void save_dataset(const std::string& path, const Dataset& data);
std::string dataset_to_csv(const Dataset& data);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& contents);

/// Round-trip representation (%.17g).
std::string format_double(double x);

/// Joins cells with commas.
std::string csv_row(const std::vector<std::string>& cells);

}  // namespace resest
