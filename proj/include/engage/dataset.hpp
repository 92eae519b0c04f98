#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "engage/corpus.hpp"

namespace engage::dataset {

struct LabeledExample {
  std::string text;
  int label = 0;  // binary
  std::optional<corpus::SentenceRef> ref;
};

struct DatasetConfig {
  double positive_fraction = 0.05;  // 5/95 positive/negative mix
  double train_fraction = 0.8;
  double val_fraction = 0.1;
  double test_fraction = 0.1;
  uint64_t seed = 0;
  bool stratified = true;

  void validate() const;  // throws ValidationError
};

struct ExampleDataset {
  std::vector<LabeledExample> examples;  // canonical seeded-shuffle order
  DatasetConfig config;
  std::string provenance;
};

enum class Subset { train, val, test };

struct SplitAssignment {
  // Parallel to ExampleDataset::examples.
  std::vector<Subset> assignment;

  std::vector<size_t> indices_of(Subset s) const;
};

// Number of negatives implied by P positives at positive fraction f.
size_t required_negatives(size_t positives, double positive_fraction);

// All positives plus round(P*(1-f)/f) negatives sampled uniformly without
// replacement. Throws DatasetError when the pool is too small or overlaps
// the positives by (text, ref).
ExampleDataset build_examples(const std::vector<LabeledExample>& positives,
                              const std::vector<LabeledExample>& negative_pool,
                              const DatasetConfig& config);

// Per class (when stratified): n_val = floor(val_fraction*n),
// n_test = floor(test_fraction*n), train = remainder; assignment by seeded
// shuffle. Throws DatasetError when a stratum has fewer than 3 members.
SplitAssignment split(const ExampleDataset& dataset);

// CSV `text,label`, RFC-4180 quoting, canonical order.
std::string to_csv(const std::vector<LabeledExample>& examples);
std::vector<LabeledExample> from_csv(std::string_view data);

// JSONL fine-tuning format, one object per line:
//   {"prompt":"<text>\n\n###\n\n","completion":" 1"}
std::string to_jsonl(const std::vector<LabeledExample>& examples);

inline constexpr const char* kPromptSeparator = "\n\n###\n\n";

std::vector<LabeledExample> subset_examples(const ExampleDataset& dataset,
                                            const SplitAssignment& split,
                                            Subset subset);

void write_file(const std::string& path, std::string_view content);
std::string read_file(const std::string& path);

}  // namespace engage::dataset
