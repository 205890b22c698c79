#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>

#include "rulelearn/measures.hpp"

namespace rulelearn {

/// Knobs of the covering loop. The defaults are the single source of truth for every front end.
struct InductionParams {
  std::size_t minsupp_new = 5;
  double max_uncovered_fraction = 0.0;
  MeasureId induction_measure = MeasureId::c2;
  MeasureId pruning_measure = MeasureId::c2;
  MeasureId voting_measure = MeasureId::correlation;
  bool pruning_enabled = true;
  std::size_t max_growing_conditions = 0;  // 0 = unlimited
  double significance_level = 0.05;
  bool significance_filter = false;
  std::uint64_t seed = 0;

  void validate() const {
    if (minsupp_new < 1) throw std::invalid_argument("minsupp_new must be >= 1");
    if (!(max_uncovered_fraction >= 0.0 && max_uncovered_fraction <= 1.0)) {
      throw std::invalid_argument("max_uncovered_fraction must lie in [0,1]");
    }
    if (!(significance_level > 0.0 && significance_level <= 1.0)) {
      throw std::invalid_argument("significance_level must lie in (0,1]");
    }
  }

  bool operator==(const InductionParams&) const = default;
};

}  // namespace rulelearn
