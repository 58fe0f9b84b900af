#include "resest/io.hpp"

#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "resest/error.hpp"

namespace resest {

namespace {

using nlohmann::json;

Matrix matrix_from_json(const json& j, int rows, int cols, const std::string& what,
                        const std::string& origin) {
  if (!j.is_array()) throw IoError(origin + ": '" + what + "' must be an array");
  std::vector<double> flat;
  // Accept flat row-major arrays and nested row arrays.
  for (const auto& e : j) {
    if (e.is_array()) {
      for (const auto& x : e) flat.push_back(x.get<double>());
    } else {
      flat.push_back(e.get<double>());
    }
  }
  if (static_cast<int>(flat.size()) != rows * cols) {
    throw IoError(origin + ": '" + what + "' has " + std::to_string(flat.size()) +
                  " entries, expected " + std::to_string(rows * cols));
  }
  Matrix M(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int k = 0; k < cols; ++k) M(i, k) = flat[static_cast<std::size_t>(i) * cols + k];
  }
  return M;
}

json matrix_to_json(const Matrix& M) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    for (Eigen::Index k = 0; k < M.cols(); ++k) arr.push_back(M(i, k));
  }
  return arr;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, sep)) {
    while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
    while (!cell.empty() && cell.front() == ' ') cell.erase(cell.begin());
    out.push_back(cell);
  }
  return out;
}

}  // namespace

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << contents;
  if (!out) throw IoError("failed writing '" + path + "'");
}

SystemDescription parse_system(const std::string& text, const std::string& origin) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw IoError(origin + ": " + e.what());
  }
  try {
    const int n = j.at("n").get<int>();
    const int ny = j.at("ny").get<int>();
    const int T = j.at("T").get<int>();
    if (n < 1 || ny < 1 || T < 1) throw IoError(origin + ": n, ny and T must be positive");
    const bool lti = j.value("lti", true);
    const bool normalize = j.value("normalize", true);
    if (lti) {
      const Matrix A = matrix_from_json(j.at("A"), n, n, "A", origin);
      const Matrix C = matrix_from_json(j.at("C"), ny, n, "C", origin);
      return {LtvSystem::lti(A, C, T), normalize};
    }
    const json& ja = j.at("A");
    const json& jc = j.at("C");
    if (!ja.is_array() || static_cast<int>(ja.size()) != T - 1) {
      throw IoError(origin + ": 'A' must list T-1 matrices for an LTV system");
    }
    if (!jc.is_array() || static_cast<int>(jc.size()) != T) {
      throw IoError(origin + ": 'C' must list T matrices for an LTV system");
    }
    std::vector<Matrix> A, C;
    for (int t = 0; t + 1 < T; ++t) {
      A.push_back(matrix_from_json(ja[t], n, n, "A[" + std::to_string(t) + "]", origin));
    }
    for (int t = 0; t < T; ++t) {
      C.push_back(matrix_from_json(jc[t], ny, n, "C[" + std::to_string(t) + "]", origin));
    }
    return {LtvSystem(std::move(A), std::move(C)), normalize};
  } catch (const json::exception& e) {
    throw IoError(origin + ": " + e.what());
  } catch (const InvalidArgument& e) {
    throw IoError(origin + ": " + e.what());
  }
}

SystemDescription load_system(const std::string& path) { return parse_system(read_file(path), path); }

std::string system_to_json(const LtvSystem& sys, bool normalize) {
  json j;
  j["n"] = sys.n();
  j["ny"] = sys.ny();
  j["T"] = sys.horizon();
  j["lti"] = sys.is_lti();
  j["normalize"] = normalize;
  if (sys.is_lti()) {
    j["A"] = sys.horizon() > 1 ? matrix_to_json(sys.A(0)) : json::array();
    j["C"] = matrix_to_json(sys.C(0));
  } else {
    j["A"] = json::array();
    for (const auto& A : sys.A_seq()) j["A"].push_back(matrix_to_json(A));
    j["C"] = json::array();
    for (const auto& C : sys.C_seq()) j["C"].push_back(matrix_to_json(C));
  }
  return j.dump(2) + "\n";
}

LtvSystem benchmark_system(int horizon) {
  Matrix A(2, 2), C(1, 2);
  A << 0.7, 0.45, -0.5, 1.0;
  C << 1.0, 2.0;
  return LtvSystem::lti(A, C, horizon);
}

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string csv_row(const std::vector<std::string>& cells) {
  std::string out;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out += ',';
    out += cells[i];
  }
  return out;
}

Dataset load_dataset(const std::string& path) {
  std::istringstream in(read_file(path));
  std::string line;
  if (!std::getline(in, line)) throw IoError(path + ": empty data file");
  const auto header = split(line, ',');
  std::vector<int> xs, ys, ss;
  for (int c = 0; c < static_cast<int>(header.size()); ++c) {
    const std::string& h = header[c];
    if (h.rfind("x_", 0) == 0) xs.push_back(c);
    if (h.rfind("y_", 0) == 0) ys.push_back(c);
    if (h.rfind("s_", 0) == 0) ss.push_back(c);
  }
  if (ys.empty()) throw IoError(path + ": no y_* columns in the header");
  std::vector<std::vector<double>> rows;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    const auto cells = split(line, ',');
    if (cells.size() != header.size()) {
      throw IoError(path + ":" + std::to_string(lineno) + ": expected " +
                    std::to_string(header.size()) + " columns");
    }
    std::vector<double> row;
    for (const auto& c : cells) {
      try {
        row.push_back(std::stod(c));
      } catch (const std::exception&) {
        throw IoError(path + ":" + std::to_string(lineno) + ": bad number '" + c + "'");
      }
    }
    rows.push_back(std::move(row));
  }
  const int T = static_cast<int>(rows.size());
  if (T == 0) throw IoError(path + ": no data rows");
  auto gather = [&](const std::vector<int>& cols) {
    Matrix M(static_cast<Eigen::Index>(cols.size()), T);
    for (int t = 0; t < T; ++t) {
      for (std::size_t i = 0; i < cols.size(); ++i) M(static_cast<Eigen::Index>(i), t) = rows[t][cols[i]];
    }
    return M;
  };
  return {gather(xs), gather(ys), gather(ss)};
}

std::string dataset_to_csv(const Dataset& data) {
  const Eigen::Index T = data.Y.cols();
  if ((data.X.size() && data.X.cols() != T) || (data.S.size() && data.S.cols() != T)) {
    throw InvalidArgument("dataset: X, Y, S must have the same number of columns");
  }
  std::vector<std::string> header{"t"};
  for (Eigen::Index i = 0; i < data.X.rows() && data.X.size(); ++i) header.push_back("x_" + std::to_string(i));
  for (Eigen::Index i = 0; i < data.Y.rows(); ++i) header.push_back("y_" + std::to_string(i));
  for (Eigen::Index i = 0; i < data.S.rows() && data.S.size(); ++i) header.push_back("s_" + std::to_string(i));
  std::string out = csv_row(header) + "\n";
  for (Eigen::Index t = 0; t < T; ++t) {
    std::vector<std::string> cells{std::to_string(t)};
    if (data.X.size()) {
      for (Eigen::Index i = 0; i < data.X.rows(); ++i) cells.push_back(format_double(data.X(i, t)));
    }
    for (Eigen::Index i = 0; i < data.Y.rows(); ++i) cells.push_back(format_double(data.Y(i, t)));
    if (data.S.size()) {
      for (Eigen::Index i = 0; i < data.S.rows(); ++i) cells.push_back(format_double(data.S(i, t)));
    }
    out += csv_row(cells) + "\n";
  }
  return out;
}

void save_dataset(const std::string& path, const Dataset& data) { write_file(path, dataset_to_csv(data)); }

}  // namespace resest
