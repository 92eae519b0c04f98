#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "engage/corpus.hpp"

namespace engage::eval {

struct ConfusionMatrix {
  long tp = 0, fp = 0, tn = 0, fn = 0;
  long total() const { return tp + fp + tn + fn; }
};

// A metric is absent exactly when its denominator is zero.
struct MetricsReport {
  std::optional<double> sensitivity;
  std::optional<double> specificity;
  std::optional<double> precision;
  std::optional<double> f1;
};

struct AgreementReport {
  size_t items = 0;
  size_t agreements = 0;
  double percent = 0.0;  // 100*agreements/items, 0 on empty
  std::vector<corpus::SentenceRef> disagreements;
};

struct ScoredLabel {
  corpus::SentenceRef ref;
  int label = 0;
};

// Item the backend could not score (parse or transport failure); excluded
// from the matrix and tallied separately.
struct ScoreResult {
  ConfusionMatrix matrix;
  size_t unscored = 0;
};

// Aligned by position; refs must agree pairwise when present on both sides.
// `prediction_ok[i]` false marks a backend failure item. Throws
// AlignmentError on length or ref mismatch.
ScoreResult confusion(const std::vector<ScoredLabel>& predictions,
                      const std::vector<bool>& prediction_ok,
                      const std::vector<ScoredLabel>& gold);

ScoreResult confusion(const std::vector<ScoredLabel>& predictions,
                      const std::vector<ScoredLabel>& gold);

MetricsReport metrics(const ConfusionMatrix& cm);

AgreementReport agreement(const std::vector<ScoredLabel>& coder_a,
                          const std::vector<ScoredLabel>& coder_b);

// Agreed items keep the shared label; disagreements take the resolution.
// Throws AlignmentError when resolutions do not cover exactly the
// disagreement refs.
std::vector<ScoredLabel> adjudicate(
    const std::vector<ScoredLabel>& coder_a,
    const std::vector<ScoredLabel>& coder_b,
    const std::map<corpus::SentenceRef, int>& resolutions);

// CSV `ref,label` (ref as lesson:line:sentence).
std::string labels_to_csv(const std::vector<ScoredLabel>& labels);
std::vector<ScoredLabel> labels_from_csv(std::string_view data);

// JSON report: matrix, the four metrics (null when undefined), unscored.
std::string metrics_to_json(const ConfusionMatrix& cm,
                            const MetricsReport& report, size_t unscored,
                            const std::string& notes = "");

}  // namespace engage::eval
