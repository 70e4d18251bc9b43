#pragma once

// Absorbing chain over the hammer count of one tracked victim within a single
// refresh interval. States 0..HC-1 count hammers since the last restore; the
// absorbing state is "flipped". The chain is advanced one RAAIMT window at a
// time without materializing a transition matrix.

#include <cstdint>
#include <vector>

namespace rampart::analysis {

/// One way a window can play out for the tracked victim: `pre` hammers land
/// first, then the victim is optionally restored, then `post` more hammers.
/// Absorption is checked after each hammer batch.
struct KernelOutcome {
  long double prob = 0.0L;
  unsigned pre = 0;
  bool reset = false;
  unsigned post = 0;
};

struct ChainKernel {
  std::vector<KernelOutcome> outcomes;

  /// Throws ConfigError unless probabilities are non-negative and sum to 1
  /// within 1e-12.
  void validate() const;
};

class IntervalChain {
 public:
  /// Runs `windows` kernel steps from state 0 and records the cumulative
  /// absorption probability after each.
  IntervalChain(unsigned hc, ChainKernel kernel, std::uint64_t windows);

  unsigned hc() const { return hc_; }
  std::uint64_t windows() const { return windows_; }
  const ChainKernel& kernel() const { return kernel_; }

  /// Absorbed by the end of the interval.
  long double interval_absorption() const { return cumulative_.back(); }

  /// Absorbed within the first `w` windows (w clamped to the interval).
  long double absorbed_within(std::uint64_t w) const;

 private:
  unsigned hc_;
  ChainKernel kernel_;
  std::uint64_t windows_;
  std::vector<long double> cumulative_;  // size windows + 1
};

}  // namespace rampart::analysis
