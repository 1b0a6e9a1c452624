#pragma once

// File formats: raw little-endian float64 field files with a JSON sidecar
// (same basename, .json extension), CSV signals (one row per time sample,
// columns = receivers), solver result/history emission.

#include <bit>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <json.hpp>

#include "uvot/problem.hpp"

namespace uvot {

static_assert(std::endian::native == std::endian::little,
              "field files are little-endian; big-endian hosts are unsupported");

inline std::filesystem::path sidecar_path(const std::filesystem::path& raw) {
  std::filesystem::path p = raw;
  p.replace_extension(".json");
  return p;
}

inline void write_field(const std::filesystem::path& path, const FieldV& f) {
  nlohmann::json meta = {{"nx", f.grid.nx}, {"ny", f.grid.ny}, {"n", f.n},
                         {"hx", f.grid.hx}, {"hy", f.grid.hy}, {"layout", "site_major"}};
  std::ofstream js(sidecar_path(path));
  if (!js) throw std::runtime_error("write_field: cannot open " + sidecar_path(path).string());
  js << meta.dump(2) << "\n";

  std::ofstream raw(path, std::ios::binary);
  if (!raw) throw std::runtime_error("write_field: cannot open " + path.string());
  raw.write(reinterpret_cast<const char*>(f.data.data()),
            std::streamsize(f.data.size() * sizeof(double)));
  if (!raw) throw std::runtime_error("write_field: short write to " + path.string());
}

inline FieldV read_field(const std::filesystem::path& path) {
  std::ifstream js(sidecar_path(path));
  if (!js) throw std::runtime_error("read_field: missing sidecar " + sidecar_path(path).string());
  nlohmann::json meta = nlohmann::json::parse(js);
  if (meta.value("layout", "") != std::string("site_major"))
    throw std::runtime_error("read_field: unsupported layout in " + sidecar_path(path).string());
  const Grid2 grid(meta.at("nx").get<int>(), meta.at("ny").get<int>(), meta.at("hx").get<double>(),
                   meta.at("hy").get<double>());
  FieldV f(grid, meta.at("n").get<int>());

  std::ifstream raw(path, std::ios::binary);
  if (!raw) throw std::runtime_error("read_field: cannot open " + path.string());
  raw.read(reinterpret_cast<char*>(f.data.data()), std::streamsize(f.data.size() * sizeof(double)));
  if (std::size_t(raw.gcount()) != f.data.size() * sizeof(double))
    throw std::runtime_error("read_field: size mismatch in " + path.string());
  check_finite(f.data, "read_field");
  return f;
}

inline std::string format_double(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

// CSV with a header row; rows are time samples, columns are receivers.
inline void write_signal_csv(const std::filesystem::path& path,
                             const std::vector<std::vector<double>>& rows) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_signal_csv: cannot open " + path.string());
  const std::size_t cols = rows.empty() ? 0 : rows.front().size();
  for (std::size_t c = 0; c < cols; ++c) out << (c ? "," : "") << "r" << c;
  out << "\n";
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << format_double(row[c]);
    out << "\n";
  }
}

inline std::vector<std::vector<double>> read_signal_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_signal_csv: cannot open " + path.string());
  std::vector<std::vector<double>> rows;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (first) {
      first = false;  // header row
      continue;
    }
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    if (!rows.empty() && row.size() != rows.front().size())
      throw std::runtime_error("read_signal_csv: ragged rows in " + path.string());
    rows.push_back(std::move(row));
  }
  return rows;
}

// Builds a signal from two CSV matrices (vx, vz); axis 1 = receiver index,
// axis 2 = time sample. Mesh sizes default to unit spacing.
inline SignedSignal2 signal_from_csv(const std::vector<std::vector<double>>& vx,
                                     const std::vector<std::vector<double>>& vz) {
  if (vx.size() != vz.size() || (vx.size() && vx.front().size() != vz.front().size()))
    throw std::invalid_argument("signal_from_csv: vx and vz shapes differ");
  const int nt = int(vx.size());
  const int nr = nt ? int(vx.front().size()) : 0;
  if (nt < 1 || nr < 1) throw std::invalid_argument("signal_from_csv: empty signal");
  SignedSignal2 s(Grid2(nr, nt, 1.0, 1.0));
  for (int j = 0; j < nt; ++j)
    for (int i = 0; i < nr; ++i) {
      s.vx[s.grid.site(i, j)] = vx[j][i];
      s.vz[s.grid.site(i, j)] = vz[j][i];
    }
  return s;
}

// Two-component signals travel as n = 2 field files (vx, vz per site).
inline FieldV signal_to_field(const SignedSignal2& s) {
  FieldV f(s.grid, 2);
  for (int site = 0; site < s.grid.sites(); ++site) {
    f.site(site)[0] = s.vx[site];
    f.site(site)[1] = s.vz[site];
  }
  return f;
}

inline SignedSignal2 field_to_signal(const FieldV& f) {
  if (f.n != 2) throw std::invalid_argument("field_to_signal: expected n = 2");
  SignedSignal2 s(f.grid);
  for (int site = 0; site < f.grid.sites(); ++site) {
    s.vx[site] = f.site(site)[0];
    s.vz[site] = f.site(site)[1];
  }
  return s;
}

inline void write_result_json(const std::filesystem::path& path, const SolverResult& res) {
  nlohmann::json j = {{"cost", res.cost},           {"iterations", res.iterations},
                      {"converged", res.converged}, {"gap", res.gap},
                      {"residual", res.residual}};
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_result_json: cannot open " + path.string());
  out << j.dump(2) << "\n";
}

inline void write_history_csv(const std::filesystem::path& path, const SolverResult& res) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_history_csv: cannot open " + path.string());
  out << "iteration,gap,residual\n";
  for (std::size_t k = 0; k < res.gap_history.size(); ++k)
    out << res.gap_history[k].first << "," << format_double(res.gap_history[k].second) << ","
        << format_double(res.residual_history[k].second) << "\n";
}

}  // namespace uvot
