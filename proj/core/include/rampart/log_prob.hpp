#pragma once

// Probabilities carried as natural logarithms so values far below the
// smallest double (e.g. 1e-157 squared) stay representable.

#include <cmath>
#include <limits>

namespace rampart {

class LogProb {
 public:
  constexpr LogProb() = default;

  static LogProb zero() { return LogProb(-std::numeric_limits<long double>::infinity()); }
  static LogProb one() { return LogProb(0.0L); }
  static LogProb from_ln(long double ln) { return LogProb(ln > 0.0L ? 0.0L : ln); }
  /// p clamped to [0, 1].
  static LogProb from_prob(long double p);

  long double ln() const { return ln_; }
  long double log10() const { return ln_ / 2.302585092994045684017991454684364208L; }
  /// Linear value; underflows to 0 below ~1e-4950.
  long double prob() const { return std::exp(ln_); }
  bool is_zero() const { return std::isinf(ln_) && ln_ < 0; }

  LogProb operator*(LogProb o) const { return from_ln(ln_ + o.ln_); }
  LogProb pow(long double e) const { return is_zero() ? zero() : from_ln(ln_ * e); }
  /// Multiply by a non-negative scalar, capped at 1.
  LogProb scaled(long double factor) const;

  friend bool operator<(LogProb a, LogProb b) { return a.ln_ < b.ln_; }
  friend bool operator<=(LogProb a, LogProb b) { return a.ln_ <= b.ln_; }
  friend bool operator==(LogProb a, LogProb b) { return a.ln_ == b.ln_; }

 private:
  explicit LogProb(long double ln) : ln_(ln) {}
  long double ln_ = -std::numeric_limits<long double>::infinity();
};

/// P(at least one success in `trials` independent trials of probability q):
/// 1 - (1 - q)^trials. Exact via log1p/expm1, and ln(q * trials) once the
/// product drops below the point where the two agree to ~1e-12.
LogProb at_least_once(LogProb q, long double trials);

/// 1 - (1 - a)(1 - b).
LogProb union_independent(LogProb a, LogProb b);

/// 1 - p, returned as a linear value in long double.
long double complement(LogProb p);

/// P(X >= 2) for X ~ Binomial(k, q), summed term by term in log space.
LogProb at_least_two_of(LogProb q, unsigned k);

}  // namespace rampart
