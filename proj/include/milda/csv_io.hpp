#pragma once

// CSV schema for sample sets: one row per sample, feature columns first,
// then an optional integer `label` column (-1/+1) and, for stream dumps, an
// optional integer `epoch` column. Lines starting with '#' are comments.
// A header row is optional; without one every column is a feature.

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "milda/model.hpp"

namespace milda {

struct CsvDataset {
  SampleSet samples;
  std::optional<std::vector<Label>> labels;
  std::optional<std::vector<int>> epochs;

  LabeledSampleSet labeled() const;
};

CsvDataset read_dataset_csv(std::istream& in);
CsvDataset read_dataset_csv_file(const std::string& path);

struct CsvWriteOptions {
  std::vector<std::string> comments;
  const std::vector<Label>* labels = nullptr;
  const std::vector<int>* epochs = nullptr;
};

void write_dataset_csv(std::ostream& out, const SampleSet& samples,
                       const CsvWriteOptions& opts = {});

/// Shortest representation that parses back to the same double.
std::string format_double(double v);

}  // namespace milda
