#include "rampart/log_prob.hpp"

#include <algorithm>
#include <vector>

namespace rampart {

namespace {
const long double kNegInf = -std::numeric_limits<long double>::infinity();
const long double kLinearRegime = std::log(1e-12L);

long double log_add(long double a, long double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const long double hi = std::max(a, b);
  return hi + std::log1p(std::exp(std::min(a, b) - hi));
}
}  // namespace

LogProb LogProb::from_prob(long double p) {
  if (!(p > 0.0L)) return zero();
  if (p >= 1.0L) return one();
  return LogProb(std::log(p));
}

LogProb LogProb::scaled(long double factor) const {
  if (factor <= 0.0L || is_zero()) return zero();
  return from_ln(ln_ + std::log(factor));
}

LogProb at_least_once(LogProb q, long double trials) {
  if (q.is_zero() || trials <= 0.0L) return LogProb::zero();
  if (q.ln() >= 0.0L) return LogProb::one();
  const long double ln_product = q.ln() + std::log(trials);
  if (ln_product < kLinearRegime) return LogProb::from_ln(ln_product);
  const long double x = trials * std::log1p(-q.prob());
  return LogProb::from_ln(std::log(-std::expm1(x)));
}

LogProb union_independent(LogProb a, LogProb b) {
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  const long double s = log_add(a.ln(), b.ln());
  const long double overlap = std::exp(a.ln() + b.ln() - s);  // ab / (a + b)
  if (overlap >= 1.0L) return LogProb::one();
  return LogProb::from_ln(s + std::log1p(-overlap));
}

long double complement(LogProb p) { return p.is_zero() ? 1.0L : -std::expm1(p.ln()); }

LogProb at_least_two_of(LogProb q, unsigned k) {
  if (k < 2 || q.is_zero()) return LogProb::zero();
  if (q.ln() >= 0.0L) return LogProb::one();
  const long double lq = q.ln();
  const long double l1q = std::log1p(-q.prob());
  long double total = kNegInf;
  for (unsigned j = 2; j <= k; ++j) {
    const long double lchoose =
        std::lgamma(static_cast<long double>(k) + 1) - std::lgamma(static_cast<long double>(j) + 1) -
        std::lgamma(static_cast<long double>(k - j) + 1);
    total = log_add(total, lchoose + j * lq + (k - j) * l1q);
  }
  return LogProb::from_ln(total);
}

}  // namespace rampart
