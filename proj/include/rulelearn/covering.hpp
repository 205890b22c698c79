#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace rulelearn {

enum class CoveringKind { standard, survival };

/// Covered positives / negatives (p, n) against dataset totals (P, N).
/// Survival coverings carry only p (covered count) and P (|D|).
struct Covering {
  std::size_t p = 0;
  std::size_t n = 0;
  std::size_t P = 0;
  std::size_t N = 0;
  CoveringKind kind = CoveringKind::standard;

  std::size_t covered() const { return p + n; }

  void validate() const {
    if (P < 1) throw std::invalid_argument("covering requires P >= 1");
    if (p > P || n > N) {
      throw std::invalid_argument("inconsistent covering (p=" + std::to_string(p) + ", n=" + std::to_string(n) +
                                  ", P=" + std::to_string(P) + ", N=" + std::to_string(N) + ")");
    }
  }

  bool operator==(const Covering&) const = default;
};

}  // namespace rulelearn
