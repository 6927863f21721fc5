#pragma once

// Sparse classification text format, one sample per line:
//
//   <label> <index>:<value> <index>:<value> ...
//
// Labels are -1 or +1 (written as "1"/"-1"), indices are 1-based and strictly
// increasing. Lines starting with '#' are comments, except "# dim <n>", which
// declares the feature dimension. Values are written in shortest round-trip
// form, so write-then-read reproduces a dataset exactly.

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>

#include "sqnkit/dataset.hpp"

namespace sqnkit::io {

LabeledDataset parse_sparse_dataset(std::istream& in);
LabeledDataset load_sparse_dataset(const std::filesystem::path& path);

void write_sparse_dataset(std::ostream& out, const LabeledDataset& data);
void save_sparse_dataset(const std::filesystem::path& path, const LabeledDataset& data);

/// Dense vector as one value per line.
void save_vector(const std::filesystem::path& path, std::span<const double> v);
Vector load_vector(const std::filesystem::path& path);

/// Flat "key = value" metadata file; keys are written sorted.
void save_metadata(const std::filesystem::path& path,
                   const std::map<std::string, std::string>& entries);
std::map<std::string, std::string> load_metadata(const std::filesystem::path& path);

/// Shortest decimal form that parses back to the same double.
std::string format_double(double v);

} // namespace sqnkit::io
