#include "rampart/markov_chain.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rampart/error.hpp"

namespace rampart::analysis {

void ChainKernel::validate() const {
  if (outcomes.empty()) throw ConfigError("chain kernel has no outcomes");
  long double sum = 0.0L;
  for (const auto& o : outcomes) {
    if (o.prob < 0.0L) throw ConfigError("chain kernel has a negative probability");
    sum += o.prob;
  }
  if (std::fabs(sum - 1.0L) > 1e-12L)
    throw ConfigError("chain kernel probabilities sum to " + std::to_string(static_cast<double>(sum)));
}

IntervalChain::IntervalChain(unsigned hc, ChainKernel kernel, std::uint64_t windows)
    : hc_(hc), kernel_(std::move(kernel)), windows_(windows) {
  if (hc == 0) throw ConfigError("HC must be >= 1");
  kernel_.validate();
  cumulative_.reserve(windows + 1);
  cumulative_.push_back(0.0L);

  std::vector<long double> cur(hc, 0.0L), next(hc, 0.0L);
  cur[0] = 1.0L;
  unsigned top = 0;       // highest occupied state of cur
  unsigned next_top = 0;  // highest possibly nonzero state of next
  long double absorbed = 0.0L;
  for (std::uint64_t w = 0; w < windows; ++w) {
    std::fill(next.begin(), next.begin() + next_top + 1, 0.0L);
    unsigned new_top = 0;
    for (unsigned s = 0; s <= top; ++s) {
      const long double m = cur[s];
      if (m == 0.0L) continue;
      for (const auto& o : kernel_.outcomes) {
        const long double mass = m * o.prob;
        if (mass == 0.0L) continue;
        std::uint64_t t = static_cast<std::uint64_t>(s) + o.pre;
        if (t >= hc) {
          absorbed += mass;
          continue;
        }
        if (o.reset) t = 0;
        t += o.post;
        if (t >= hc) {
          absorbed += mass;
          continue;
        }
        next[t] += mass;
        new_top = std::max<unsigned>(new_top, static_cast<unsigned>(t));
      }
    }
    std::swap(cur, next);
    next_top = top;
    top = new_top;
    cumulative_.push_back(absorbed);
  }
}

long double IntervalChain::absorbed_within(std::uint64_t w) const {
  return cumulative_[std::min<std::uint64_t>(w, windows_)];
}

}  // namespace rampart::analysis
