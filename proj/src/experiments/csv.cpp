#include "detlab/experiments/csv.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "detlab/core/errors.hpp"

namespace detlab::experiments {

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

int CsvTable::column(const std::string& name) const {
  for (size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return static_cast<int>(i);
  throw ArgumentError("csv: missing column '" + name + "'");
}

double CsvTable::number(size_t row, int col) const {
  const std::string& s = rows.at(row).at(static_cast<size_t>(col));
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0')
    throw ArgumentError("csv: row " + std::to_string(row + 1) + ", column '" + header[col] + "' is not a number");
  return v;
}

void write_csv(const std::string& path, const CsvTable& table) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ArgumentError("cannot write '" + path + "'");
  auto line = [&](const std::vector<std::string>& cells) {
    for (size_t i = 0; i < cells.size(); ++i) out << (i ? "," : "") << cells[i];
    out << '\n';
  };
  line(table.header);
  for (const auto& r : table.rows) line(r);
  if (!out) throw ArgumentError("write failed for '" + path + "'");
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
  CsvTable t{header, {}};
  t.rows.reserve(rows.size());
  for (const auto& r : rows) {
    std::vector<std::string> cells;
    for (double v : r) cells.push_back(format_number(v));
    t.rows.push_back(std::move(cells));
  }
  write_csv(path, t);
}

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ArgumentError("cannot open '" + path + "'");
  CsvTable t;
  std::string line;
  auto split = [](const std::string& s) {
    std::vector<std::string> cells;
    std::stringstream ss(s);
    std::string c;
    while (std::getline(ss, c, ',')) cells.push_back(c);
    if (!s.empty() && s.back() == ',') cells.emplace_back();
    return cells;
  };
  if (!std::getline(in, line)) throw ArgumentError("csv '" + path + "' is empty");
  t.header = split(line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto cells = split(line);
    if (cells.size() != t.header.size())
      throw ArgumentError("csv '" + path + "': row " + std::to_string(t.rows.size() + 1) + " has " +
                          std::to_string(cells.size()) + " cells, header has " + std::to_string(t.header.size()));
    t.rows.push_back(std::move(cells));
  }
  return t;
}

void write_histogram_csv(const std::string& path, const DetectionHistogram& h) {
  const auto& a = h.axes();
  std::vector<std::vector<double>> rows;
  for (int u = 0; u < a.n_u(); ++u) {
    const Eigen::Vector3d c = a.directions.center(u);
    for (int r = 0; r < a.n_rho(); ++r)
      for (int t = 0; t < a.n_tau(); ++t)
        rows.push_back({double(u), c.x(), c.y(), c.z(), a.rho_edges[r], a.rho_edges[r + 1], a.tau_edges[t],
                        a.tau_edges[t + 1], h.weight(u, r, t)});
  }
  write_csv(path, {"u_bin", "ux", "uy", "uz", "rho_lo", "rho_hi", "tau_lo", "tau_hi", "weight"}, rows);
}

DetectionHistogram read_histogram_csv(const std::string& path) {
  const CsvTable t = read_csv(path);
  const int cu = t.column("u_bin"), cz = t.column("uz"), crl = t.column("rho_lo"), crh = t.column("rho_hi"),
            ctl = t.column("tau_lo"), cth = t.column("tau_hi"), cw = t.column("weight");
  if (t.rows.empty()) throw ArgumentError("histogram csv '" + path + "' has no rows");

  std::vector<double> rho{t.number(0, crl)}, tau{t.number(0, ctl)};
  int n_u = 0;
  for (size_t i = 0; i < t.rows.size(); ++i) {
    n_u = std::max(n_u, static_cast<int>(t.number(i, cu)) + 1);
    if (t.number(i, cu) != 0) continue;
    if (t.number(i, ctl) == tau.front() && t.number(i, crl) != rho.back()) rho.push_back(t.number(i, crl));
    if (t.number(i, crl) == rho.front() && t.number(i, ctl) != tau.back()) tau.push_back(t.number(i, ctl));
  }
  rho.push_back(t.number(t.rows.size() - 1, crh));
  tau.push_back(t.number(t.rows.size() - 1, cth));
  const size_t n_rho = rho.size() - 1, n_tau = tau.size() - 1;
  if (t.rows.size() != static_cast<size_t>(n_u) * n_rho * n_tau)
    throw ArgumentError("histogram csv '" + path + "': rows do not form a full (u, rho, tau) grid");

  HistogramAxes axes;
  // Signs when the centres lie on the x axis, otherwise bands share a z.
  const bool on_axis = n_u == 2 && t.number(0, t.column("ux")) == -1.0;
  if (on_axis) {
    axes.directions = DirectionBinning::signs();
  } else {
    int sectors = 0;
    const double z0 = t.number(0, cz);
    for (int u = 0; u < n_u; ++u)
      if (t.number(static_cast<size_t>(u) * n_rho * n_tau, cz) == z0) ++sectors;
    if (sectors < 1 || n_u % sectors != 0)
      throw ArgumentError("histogram csv '" + path + "': cannot infer the direction binning");
    axes.directions = DirectionBinning::equal_area(n_u / sectors, sectors);
  }
  axes.rho_edges = rho;
  axes.tau_edges = tau;
  DetectionHistogram h(axes);
  for (size_t i = 0; i < t.rows.size(); ++i) {
    const size_t u = i / (n_rho * n_tau), r = (i / n_tau) % n_rho, k = i % n_tau;
    h.set_bin(static_cast<int>(u), static_cast<int>(r), static_cast<int>(k), t.number(i, cw));
  }
  return h;
}

void write_ladder_csv(const std::string& path, const std::vector<RungReport>& reports) {
  CsvTable t{{"R", "lambda", "lambda_R", "tv", "overshoot", "runtime_s", "residence", "captured", "error"}, {}};
  for (const auto& r : reports) {
    std::string err = r.error;
    for (char& c : err)
      if (c == ',' || c == '\n') c = ';';
    t.rows.push_back({format_number(r.rung.R), format_number(r.rung.lambda),
                      format_number(r.rung.R * r.rung.lambda), format_number(r.tv), format_number(r.overshoot),
                      format_number(r.runtime_seconds), format_number(r.residence_time),
                      format_number(r.captured), err});
  }
  write_csv(path, t);
}

void write_ledger_csv(const std::string& path, const std::vector<LedgerRow>& ledger) {
  std::vector<std::vector<double>> rows;
  for (const auto& r : ledger)
    rows.push_back({double(r.n), r.t, r.p_detect, r.survival, r.oracle, r.width, r.bound_ratio});
  write_csv(path, {"n", "t", "p_detect", "survival", "oracle", "width", "bound_ratio"}, rows);
}

void write_trajectory_csv(const std::string& path, const std::vector<ArrivalRecord>& records, int dim) {
  std::vector<std::string> header{"id", "t_wod", "t_wid", "t_d"};
  const char* names[] = {"x", "y", "z"};
  for (const char* which : {"wod", "wid", "d"})
    for (int a = 0; a < dim; ++a) header.push_back(std::string(names[a]) + "_" + which);
  header.push_back("reentered");
  header.push_back("stalled");
  std::vector<std::vector<double>> rows;
  for (size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    std::vector<double> row{double(i), r.t_wod, r.t_wid, r.t_d};
    for (const auto* x : {&r.x_wod, &r.x_wid, &r.x_d})
      for (int a = 0; a < dim; ++a) row.push_back((*x)[a]);
    row.push_back(r.reentered ? 1 : 0);
    row.push_back(r.stalled ? 1 : 0);
    rows.push_back(std::move(row));
  }
  write_csv(path, header, rows);
}

} // namespace detlab::experiments
