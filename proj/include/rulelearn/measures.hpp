#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "rulelearn/covering.hpp"

namespace rulelearn {

enum class MeasureId { precision, coverage, c2, correlation, rss, lift };

inline constexpr std::array<MeasureId, 6> all_measures = {MeasureId::precision, MeasureId::coverage, MeasureId::c2,
                                                          MeasureId::correlation, MeasureId::rss, MeasureId::lift};

inline std::string_view to_string(MeasureId id) {
  switch (id) {
    case MeasureId::precision: return "Precision";
    case MeasureId::coverage: return "Coverage";
    case MeasureId::c2: return "C2";
    case MeasureId::correlation: return "Correlation";
    case MeasureId::rss: return "RSS";
    case MeasureId::lift: return "Lift";
  }
  return "unknown";
}

inline std::optional<MeasureId> parse_measure(std::string_view text) {
  for (auto id : all_measures) {
    auto name = to_string(id);
    if (name.size() == text.size() &&
        std::equal(name.begin(), name.end(), text.begin(), [](char a, char b) {
          return std::tolower(static_cast<unsigned char>(a)) == std::tolower(static_cast<unsigned char>(b));
        })) {
      return id;
    }
  }
  return std::nullopt;
}

class UnsupportedMeasure : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class UndefinedCoverage : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Quality of a rule with covering `c`. Denominators that can vanish for a valid covering are
/// guarded to 0 so the measure stays total over non-empty rules.
inline double measure_value(MeasureId id, const Covering& c) {
  if (c.kind == CoveringKind::survival) {
    throw UnsupportedMeasure(std::string(to_string(id)) + " is not defined for survival coverings");
  }
  if (c.p + c.n == 0) throw UndefinedCoverage("measure of a rule covering no examples");
  const double p = static_cast<double>(c.p), n = static_cast<double>(c.n);
  const double P = static_cast<double>(c.P), N = static_cast<double>(c.N);
  const double precision = p / (p + n);
  switch (id) {
    case MeasureId::precision:
      return precision;
    case MeasureId::coverage:
      return (p + n) / (P + N);
    case MeasureId::c2:
      if (c.N == 0) return 0.0;
      return (((P + N) / N) * precision - P / N) * ((1.0 + p / P) / 2.0);
    case MeasureId::correlation: {
      const double denominator = P * N * (p + n) * (P - p + N - n);
      if (denominator == 0.0) return 0.0;
      return (p * N - n * P) / std::sqrt(denominator);
    }
    case MeasureId::rss:
      return p / P - (c.N == 0 ? 0.0 : n / N);
    case MeasureId::lift:
      return precision * ((P + N) / P);
  }
  throw UnsupportedMeasure("unknown measure");
}

}  // namespace rulelearn
