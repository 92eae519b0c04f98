#include "engage/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "engage/csv.hpp"
#include "engage/errors.hpp"
#include "engage/rng.hpp"

namespace engage::dataset {

namespace {

std::string example_key(const LabeledExample& e) {
  return (e.ref ? e.ref->to_string() : std::string("-")) + "\x1f" + e.text;
}

}  // namespace

void DatasetConfig::validate() const {
  if (!(positive_fraction > 0.0 && positive_fraction <= 1.0)) {
    throw ValidationError("dataset config: positive_fraction outside (0,1]");
  }
  auto frac_ok = [](double f) { return f > 0.0 && f < 1.0; };
  if (!frac_ok(train_fraction) || !frac_ok(val_fraction) ||
      !frac_ok(test_fraction)) {
    throw ValidationError("dataset config: split fractions outside (0,1)");
  }
  double sum = train_fraction + val_fraction + test_fraction;
  if (std::abs(sum - 1.0) > 1e-12) {
    throw ValidationError("dataset config: split fractions sum to " +
                          std::to_string(sum) + ", expected 1");
  }
}

size_t required_negatives(size_t positives, double positive_fraction) {
  return static_cast<size_t>(std::llround(
      static_cast<double>(positives) * (1.0 - positive_fraction) /
      positive_fraction));
}

ExampleDataset build_examples(const std::vector<LabeledExample>& positives,
                              const std::vector<LabeledExample>& negative_pool,
                              const DatasetConfig& config) {
  config.validate();
  for (const auto& p : positives) {
    if (p.label != 1) throw DatasetError("build_examples: non-positive label in positives");
    if (p.text.empty()) throw DatasetError("build_examples: empty positive text");
  }
  std::set<std::string> positive_keys;
  for (const auto& p : positives) positive_keys.insert(example_key(p));
  for (const auto& n : negative_pool) {
    if (n.label != 0) throw DatasetError("build_examples: non-negative label in pool");
    if (positive_keys.count(example_key(n))) {
      throw DatasetError("build_examples: contamination — pool contains positive '" +
                         n.text + "'");
    }
  }
  size_t needed = required_negatives(positives.size(), config.positive_fraction);
  if (negative_pool.size() < needed) {
    throw DatasetError("build_examples: pool too small, required " +
                       std::to_string(needed) + " negatives, available " +
                       std::to_string(negative_pool.size()));
  }

  rng::SplitMix64 gen(config.seed);
  auto picked = rng::sample_indices(negative_pool.size(), needed, gen);
  std::sort(picked.begin(), picked.end());  // stable w.r.t. pool order

  ExampleDataset ds;
  ds.config = config;
  ds.examples = positives;
  for (size_t idx : picked) ds.examples.push_back(negative_pool[idx]);
  // canonical order: seeded shuffle of the assembled set
  rng::shuffle(ds.examples, gen);
  return ds;
}

std::vector<size_t> SplitAssignment::indices_of(Subset s) const {
  std::vector<size_t> out;
  for (size_t i = 0; i < assignment.size(); ++i) {
    if (assignment[i] == s) out.push_back(i);
  }
  return out;
}

SplitAssignment split(const ExampleDataset& dataset) {
  const DatasetConfig& cfg = dataset.config;
  cfg.validate();

  // strata: by label when stratified, one stratum otherwise
  std::map<int, std::vector<size_t>> strata;
  for (size_t i = 0; i < dataset.examples.size(); ++i) {
    int key = cfg.stratified ? dataset.examples[i].label : 0;
    strata[key].push_back(i);
  }

  SplitAssignment out;
  out.assignment.assign(dataset.examples.size(), Subset::train);
  rng::SplitMix64 gen(cfg.seed ^ 0xA5A5A5A5A5A5A5A5ULL);
  for (auto& [label, indices] : strata) {
    if (cfg.stratified && indices.size() < 3) {
      throw DatasetError("split: stratum for label " + std::to_string(label) +
                         " has " + std::to_string(indices.size()) +
                         " members, need at least 3");
    }
    rng::shuffle(indices, gen);
    size_t n = indices.size();
    size_t n_val = static_cast<size_t>(std::floor(cfg.val_fraction * n));
    size_t n_test = static_cast<size_t>(std::floor(cfg.test_fraction * n));
    for (size_t i = 0; i < n; ++i) {
      Subset s = i < n_val              ? Subset::val
                 : i < n_val + n_test   ? Subset::test
                                        : Subset::train;
      out.assignment[indices[i]] = s;
    }
  }
  return out;
}

std::string to_csv(const std::vector<LabeledExample>& examples) {
  std::string out = "text,label\n";
  for (const auto& e : examples) {
    out += csv::write_row({e.text, std::to_string(e.label)});
  }
  return out;
}

std::vector<LabeledExample> from_csv(std::string_view data) {
  auto rows = csv::parse(data);
  if (rows.empty() || rows[0] != std::vector<std::string>{"text", "label"}) {
    throw ValidationError("dataset csv: expected header 'text,label'");
  }
  std::vector<LabeledExample> out;
  for (size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.size() == 1 && row[0].empty()) continue;
    if (row.size() != 2) {
      throw ValidationError("dataset csv row " + std::to_string(r + 1) +
                            ": expected 2 fields");
    }
    if (row[1] != "0" && row[1] != "1") {
      throw ValidationError("dataset csv row " + std::to_string(r + 1) +
                            ": label must be 0 or 1");
    }
    out.push_back(LabeledExample{row[0], row[1] == "1" ? 1 : 0, std::nullopt});
  }
  return out;
}

std::string to_jsonl(const std::vector<LabeledExample>& examples) {
  std::string out;
  for (const auto& e : examples) {
    nlohmann::ordered_json obj;
    obj["prompt"] = e.text + kPromptSeparator;
    obj["completion"] = e.label == 1 ? " 1" : " 0";
    out += obj.dump();
    out.push_back('\n');
  }
  return out;
}

std::vector<LabeledExample> subset_examples(const ExampleDataset& dataset,
                                            const SplitAssignment& split,
                                            Subset subset) {
  std::vector<LabeledExample> out;
  for (size_t i : split.indices_of(subset)) out.push_back(dataset.examples[i]);
  return out;
}

void write_file(const std::string& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write: " + path);
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw IoError("write failed: " + path);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace engage::dataset
