#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <map>
#include <ostream>
#include <string>
#include <vector>

namespace rsclf {

// Binary labels: 0 = non-depressive, 1 = depressive.
using Label = int;

struct LabeledDocument {
  std::string text;
  Label label = 0;

  bool operator==(const LabeledDocument&) const = default;
};

const std::string& label_name(Label label);

struct Corpus {
  std::vector<LabeledDocument> docs;

  std::size_t size() const { return docs.size(); }
  bool empty() const { return docs.empty(); }
  std::vector<std::string> texts() const;
  std::vector<Label> labels() const;

  bool operator==(const Corpus&) const = default;
};

struct SplitSpec {
  double train_ratio = 0.8;
  std::uint64_t seed = 42;
  bool stratified = true;
};

struct DataSplit {
  Corpus train;
  Corpus test;
};

// Parses an RFC-4180 CSV with header `text,label`. Labels may be 0/1 or the
// strings "depressive"/"non-depressive". Text is trimmed. Errors name the
// 1-based file row (the header is row 1).
Corpus read_csv(std::istream& in);
Corpus load_csv(const std::filesystem::path& path);

void write_csv(std::ostream& out, const Corpus& corpus);
void save_csv(const std::filesystem::path& path, const Corpus& corpus);

std::map<Label, std::size_t> class_counts(const Corpus& corpus);

// Number of training documents for a corpus of size n.
std::size_t train_size(std::size_t n, double train_ratio);

// Deterministic for a given seed. Both halves keep the input's document order.
DataSplit split(const Corpus& corpus, const SplitSpec& spec);

// Drops documents whose text already appeared earlier; first occurrence wins.
Corpus deduplicate(const Corpus& corpus);

}  // namespace rsclf
