#pragma once

#include <cmath>
#include <cstdint>

namespace rampart {

/// DDR5-5600 device timings. The first block drives the reliability analysis;
/// the second is used only by the bank timing model.
struct TimingParams {
  double trc_ns = 46.4;
  double tref_s = 0.032;
  double trefi_sb_ns = 487.5;
  double trfc_sb_ns = 130.0;
  double tdrfm_brc_ns = 240.0;
  double tdrfm_brc_vl_ns = 130.0;

  double tras_ns = 32.0;
  double trp_ns = 14.4;
  double trcd_ns = 16.0;
  double cl_ns = 16.0;
  double cwl_ns = 14.3;
  double tburst_ns = 2.857;  // BL16 at 5600 MT/s
  double twr_ns = 30.0;
  double trtp_ns = 7.5;
  double tccd_l_ns = 5.0;      // column to column, same bank group
  double tccd_l_wr_ns = 20.0;  // write to write, same bank group
  double twtr_l_ns = 10.0;     // write data end to read, same bank group
  double twtr_s_ns = 2.5;      // write data end to read, any bank group
  double trtw_ns = 0.714;      // read burst end to write burst, two clocks

  /// Activates per refresh period on one bank: floor(tREF / tRC).
  std::uint64_t activates_per_refresh() const {
    return static_cast<std::uint64_t>(std::floor(tref_s / (trc_ns * 1e-9)));
  }

  /// RAAIMT windows per refresh period: floor(APR / N).
  std::uint64_t windows_per_refresh(unsigned raaimt) const {
    return activates_per_refresh() / raaimt;
  }
};

}  // namespace rampart
