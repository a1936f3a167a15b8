#pragma once

#include <string>
#include <vector>

#include "detlab/absorber.hpp"
#include "detlab/bohmian.hpp"
#include "detlab/histogram.hpp"
#include "detlab/zeno.hpp"

namespace detlab::experiments {

/// Round-trip formatting (%.17g), so reruns compare byte for byte.
std::string format_number(double v);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  int column(const std::string& name) const;  ///< throws ArgumentError if absent
  double number(size_t row, int col) const;
};

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);
void write_csv(const std::string& path, const CsvTable& table);
CsvTable read_csv(const std::string& path);

/// u_bin,ux,uy,uz,rho_lo,rho_hi,tau_lo,tau_hi,weight
void write_histogram_csv(const std::string& path, const DetectionHistogram& h);
/// Rebuilds the binning from the rows; R and the reference speed are not stored.
DetectionHistogram read_histogram_csv(const std::string& path);

/// R,lambda,lambda_R,tv,overshoot,runtime_s,residence,captured,error
void write_ladder_csv(const std::string& path, const std::vector<RungReport>& reports);
/// n,t,p_detect,survival,oracle,width,bound_ratio
void write_ledger_csv(const std::string& path, const std::vector<LedgerRow>& ledger);
/// id,t_wod,t_wid,t_d,x_wod..,x_wid..,x_d..,reentered,stalled
void write_trajectory_csv(const std::string& path, const std::vector<ArrivalRecord>& records, int dim);

} // namespace detlab::experiments
