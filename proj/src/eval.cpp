#include "engage/eval.hpp"

#include <nlohmann/json.hpp>

#include "engage/csv.hpp"
#include "engage/errors.hpp"

namespace engage::eval {

ScoreResult confusion(const std::vector<ScoredLabel>& predictions,
                      const std::vector<bool>& prediction_ok,
                      const std::vector<ScoredLabel>& gold) {
  if (predictions.size() != gold.size()) {
    throw AlignmentError("confusion: " + std::to_string(predictions.size()) +
                         " predictions vs " + std::to_string(gold.size()) +
                         " gold labels");
  }
  if (!prediction_ok.empty() && prediction_ok.size() != predictions.size()) {
    throw AlignmentError("confusion: prediction_ok length mismatch");
  }
  ScoreResult out;
  for (size_t i = 0; i < predictions.size(); ++i) {
    if (predictions[i].ref != gold[i].ref) {
      throw AlignmentError("confusion: ref mismatch at item " +
                           std::to_string(i) + " (" +
                           predictions[i].ref.to_string() + " vs " +
                           gold[i].ref.to_string() + ")");
    }
    if (!prediction_ok.empty() && !prediction_ok[i]) {
      ++out.unscored;
      continue;
    }
    int pred = predictions[i].label;
    int truth = gold[i].label;
    if (truth == 1) {
      pred == 1 ? ++out.matrix.tp : ++out.matrix.fn;
    } else {
      pred == 1 ? ++out.matrix.fp : ++out.matrix.tn;
    }
  }
  return out;
}

ScoreResult confusion(const std::vector<ScoredLabel>& predictions,
                      const std::vector<ScoredLabel>& gold) {
  return confusion(predictions, {}, gold);
}

MetricsReport metrics(const ConfusionMatrix& cm) {
  MetricsReport r;
  auto ratio = [](long num, long den) -> std::optional<double> {
    if (den == 0) return std::nullopt;
    return static_cast<double>(num) / static_cast<double>(den);
  };
  r.sensitivity = ratio(cm.tp, cm.tp + cm.fn);
  r.specificity = ratio(cm.tn, cm.tn + cm.fp);
  r.precision = ratio(cm.tp, cm.tp + cm.fp);
  // harmonic mean of precision and recall; equivalently 2tp/(2tp+fp+fn)
  r.f1 = ratio(2 * cm.tp, 2 * cm.tp + cm.fp + cm.fn);
  return r;
}

AgreementReport agreement(const std::vector<ScoredLabel>& coder_a,
                          const std::vector<ScoredLabel>& coder_b) {
  if (coder_a.size() != coder_b.size()) {
    throw AlignmentError("agreement: " + std::to_string(coder_a.size()) +
                         " vs " + std::to_string(coder_b.size()) + " items");
  }
  AgreementReport r;
  r.items = coder_a.size();
  for (size_t i = 0; i < coder_a.size(); ++i) {
    if (coder_a[i].ref != coder_b[i].ref) {
      throw AlignmentError("agreement: ref mismatch at item " +
                           std::to_string(i));
    }
    if (coder_a[i].label == coder_b[i].label) {
      ++r.agreements;
    } else {
      r.disagreements.push_back(coder_a[i].ref);
    }
  }
  if (r.items > 0) {
    r.percent = 100.0 * static_cast<double>(r.agreements) /
                static_cast<double>(r.items);
  }
  return r;
}

std::vector<ScoredLabel> adjudicate(
    const std::vector<ScoredLabel>& coder_a,
    const std::vector<ScoredLabel>& coder_b,
    const std::map<corpus::SentenceRef, int>& resolutions) {
  AgreementReport agr = agreement(coder_a, coder_b);
  std::map<corpus::SentenceRef, bool> pending;
  for (const auto& ref : agr.disagreements) pending[ref] = true;
  std::string missing, extra;
  for (const auto& [ref, label] : resolutions) {
    auto it = pending.find(ref);
    if (it == pending.end()) {
      extra += (extra.empty() ? "" : ", ") + ref.to_string();
    } else {
      it->second = false;
    }
  }
  for (const auto& [ref, still_pending] : pending) {
    if (still_pending) missing += (missing.empty() ? "" : ", ") + ref.to_string();
  }
  if (!missing.empty() || !extra.empty()) {
    std::string msg = "adjudicate: resolution coverage error";
    if (!missing.empty()) msg += "; unresolved: " + missing;
    if (!extra.empty()) msg += "; extraneous: " + extra;
    throw AlignmentError(msg);
  }
  std::vector<ScoredLabel> out = coder_a;
  for (size_t i = 0; i < out.size(); ++i) {
    if (coder_a[i].label != coder_b[i].label) {
      out[i].label = resolutions.at(out[i].ref);
    }
  }
  return out;
}

std::string labels_to_csv(const std::vector<ScoredLabel>& labels) {
  std::string out = "ref,label\n";
  for (const auto& l : labels) {
    out += csv::write_row({l.ref.to_string(), std::to_string(l.label)});
  }
  return out;
}

std::vector<ScoredLabel> labels_from_csv(std::string_view data) {
  auto rows = csv::parse(data);
  if (rows.empty() || rows[0] != std::vector<std::string>{"ref", "label"}) {
    throw ValidationError("label csv: expected header 'ref,label'");
  }
  std::vector<ScoredLabel> out;
  for (size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.size() == 1 && row[0].empty()) continue;
    if (row.size() != 2) {
      throw ValidationError("label csv row " + std::to_string(r + 1) +
                            ": expected 2 fields");
    }
    out.push_back(
        ScoredLabel{corpus::SentenceRef::parse(row[0]), std::stoi(row[1])});
  }
  return out;
}

std::string metrics_to_json(const ConfusionMatrix& cm,
                            const MetricsReport& report, size_t unscored,
                            const std::string& notes) {
  nlohmann::ordered_json j;
  j["confusion"] = {{"tp", cm.tp}, {"fp", cm.fp}, {"tn", cm.tn}, {"fn", cm.fn}};
  auto put = [&](const char* name, const std::optional<double>& v) {
    if (v) {
      j["metrics"][name] = *v;
    } else {
      j["metrics"][name] = nullptr;
    }
  };
  put("sensitivity", report.sensitivity);
  put("specificity", report.specificity);
  put("precision", report.precision);
  put("f1", report.f1);
  j["unscored"] = unscored;
  if (!notes.empty()) j["notes"] = notes;
  return j.dump(2) + "\n";
}

}  // namespace engage::eval
