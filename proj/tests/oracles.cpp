#include "oracles.hpp"

#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <utility>

namespace oracle {

std::uint32_t rotl(std::uint32_t x, unsigned s, unsigned width) {
  const std::uint32_t mask = (width >= 32) ? 0xFFFFFFFFu : ((1u << width) - 1u);
  s %= width;
  if (s == 0) return x & mask;
  return ((x << s) | (x >> (width - s))) & mask;
}

std::string uniqueness_json(const std::vector<unsigned>& shifts, unsigned width, unsigned radius,
                            const std::vector<std::uint32_t>& spare_counts,
                            const std::vector<Repair>& repairs) {
  const std::uint32_t rows = 1u << width;
  const std::int64_t empty = -1;
  std::multimap<std::pair<std::uint32_t, std::uint32_t>, unsigned> pairs;
  std::uint64_t checked = 0;

  for (unsigned d = 0; d < shifts.size(); ++d) {
    const std::uint32_t spares = d < spare_counts.size() ? spare_counts[d] : 0;
    // Position -> controller address, regular region then spare region.
    std::vector<std::int64_t> regular(rows, empty), spare(spares, empty);
    std::map<std::uint32_t, std::uint32_t> moved;
    for (const auto& r : repairs)
      if (r.device == d) moved[r.internal_row] = r.spare;
    for (std::uint32_t a = 0; a < rows; ++a) {
      const std::uint32_t row = rotl(a, shifts[d], width);
      auto it = moved.find(row);
      if (it == moved.end()) regular[row] = a;
      else spare[it->second] = a;
    }
    for (const auto* region : {&regular, &spare}) {
      for (std::size_t p = 0; p < region->size(); ++p) {
        for (unsigned k = 1; k <= radius && p + k < region->size(); ++k) {
          const std::int64_t x = (*region)[p], y = (*region)[p + k];
          if (x == empty || y == empty) continue;
          ++checked;
          const auto a = static_cast<std::uint32_t>(std::min(x, y));
          const auto b = static_cast<std::uint32_t>(std::max(x, y));
          pairs.emplace(std::make_pair(a, b), d);
        }
      }
    }
  }

  std::string list;
  std::size_t count = 0;
  for (auto it = pairs.begin(); it != pairs.end();) {
    const auto range = pairs.equal_range(it->first);
    std::set<unsigned> devices;
    for (auto j = range.first; j != range.second; ++j) devices.insert(j->second);
    if (devices.size() >= 2) {
      ++count;
      list += list.empty() ? "[" : ",[";
      list += std::to_string(it->first.first) + "," + std::to_string(it->first.second) + ",[";
      bool first = true;
      for (unsigned dev : devices) {
        list += (first ? "" : ",") + std::to_string(dev);
        first = false;
      }
      list += "]]";
    }
    it = range.second;
  }

  return "{\"status\":\"verified\",\"width\":" + std::to_string(width) +
         ",\"radius\":" + std::to_string(radius) + ",\"checked_pairs\":" + std::to_string(checked) +
         ",\"violation_count\":" + std::to_string(count) + ",\"violations\":[" + list + "]}";
}

double run_absorption(unsigned hc, double reset_prob, unsigned windows) {
  double absorbed = 0.0;
  for (std::uint64_t pattern = 0; pattern < (std::uint64_t{1} << windows); ++pattern) {
    double p = 1.0;
    unsigned state = 0;
    bool hit = false;
    for (unsigned w = 0; w < windows; ++w) {
      const bool reset = (pattern >> w) & 1u;
      p *= reset ? reset_prob : 1.0 - reset_prob;
      if (!hit && ++state >= hc) hit = true;
      if (reset) state = 0;
    }
    if (hit) absorbed += p;
  }
  return absorbed;
}

double log10_at_least_once(double log10_q, double trials) {
  const double q = std::pow(10.0, log10_q);
  if (q * trials < 1e-12) return log10_q + std::log10(trials);
  return std::log10(-std::expm1(trials * std::log1p(-q)));
}

}  // namespace oracle
