#include "rsclf/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <unordered_set>

#include "rsclf/error.hpp"
#include "rsclf/random.hpp"

namespace rsclf {

namespace {

std::string trim(const std::string& s) {
  const auto is_space = [](unsigned char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; };
  std::size_t b = 0, e = s.size();
  while (b < e && is_space(s[b])) ++b;
  while (e > b && is_space(s[e - 1])) --e;
  return s.substr(b, e - b);
}

// Reads one RFC-4180 record. Returns false at end of input.
bool read_record(std::istream& in, std::vector<std::string>& fields, std::size_t row) {
  fields.clear();
  if (in.peek() == std::char_traits<char>::eof()) return false;
  std::string field;
  bool quoted = false;
  bool was_quoted = false;
  for (;;) {
    const int c = in.get();
    if (c == std::char_traits<char>::eof()) {
      if (quoted) throw DataError("row " + std::to_string(row) + ": unterminated quoted field");
      fields.push_back(std::move(field));
      return true;
    }
    if (quoted) {
      if (c == '"') {
        if (in.peek() == '"') {
          in.get();
          field.push_back('"');
        } else {
          quoted = false;
        }
      } else {
        field.push_back(static_cast<char>(c));
      }
      continue;
    }
    switch (c) {
      case '"':
        if (!field.empty() || was_quoted)
          throw DataError("row " + std::to_string(row) + ": stray quote inside unquoted field");
        quoted = was_quoted = true;
        break;
      case ',':
        fields.push_back(std::move(field));
        field.clear();
        was_quoted = false;
        break;
      case '\r':
        if (in.peek() == '\n') in.get();
        [[fallthrough]];
      case '\n':
        fields.push_back(std::move(field));
        return true;
      default:
        if (was_quoted)
          throw DataError("row " + std::to_string(row) + ": text after closing quote");
        field.push_back(static_cast<char>(c));
    }
  }
}

Label parse_label(const std::string& raw, std::size_t row) {
  const std::string s = trim(raw);
  if (s == "1" || s == "depressive") return 1;
  if (s == "0" || s == "non-depressive") return 0;
  throw DataError("row " + std::to_string(row) + ": unparseable label '" + s + "'");
}

bool needs_quotes(const std::string& s) {
  return s.find_first_of(",\"\r\n") != std::string::npos;
}

}  // namespace

const std::string& label_name(Label label) {
  static const std::string names[2] = {"non-depressive", "depressive"};
  if (label != 0 && label != 1) throw UsageError("label out of range: " + std::to_string(label));
  return names[label];
}

std::vector<std::string> Corpus::texts() const {
  std::vector<std::string> out;
  out.reserve(docs.size());
  for (const auto& d : docs) out.push_back(d.text);
  return out;
}

std::vector<Label> Corpus::labels() const {
  std::vector<Label> out;
  out.reserve(docs.size());
  for (const auto& d : docs) out.push_back(d.label);
  return out;
}

Corpus read_csv(std::istream& in) {
  std::vector<std::string> fields;
  if (!read_record(in, fields, 1)) throw DataError("empty corpus: missing header row");
  if (!fields.empty() && fields[0].rfind("\xEF\xBB\xBF", 0) == 0) fields[0].erase(0, 3);
  if (fields.size() != 2 || trim(fields[0]) != "text" || trim(fields[1]) != "label")
    throw DataError("row 1: header must be exactly 'text,label'");

  Corpus corpus;
  std::size_t row = 1;
  while (read_record(in, fields, ++row)) {
    if (fields.size() == 1 && trim(fields[0]).empty()) continue;  // blank line
    if (fields.size() != 2)
      throw DataError("row " + std::to_string(row) + ": expected 2 columns, found " +
                      std::to_string(fields.size()));
    LabeledDocument doc{trim(fields[0]), parse_label(fields[1], row)};
    if (doc.text.empty()) throw DataError("row " + std::to_string(row) + ": empty text field");
    corpus.docs.push_back(std::move(doc));
  }
  if (corpus.empty()) throw DataError("empty corpus");
  return corpus;
}

Corpus load_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open corpus file: " + path.string());
  return read_csv(in);
}

void write_csv(std::ostream& out, const Corpus& corpus) {
  out << "text,label\n";
  for (const auto& d : corpus.docs) {
    if (needs_quotes(d.text)) {
      out << '"';
      for (char c : d.text) {
        if (c == '"') out << '"';
        out << c;
      }
      out << '"';
    } else {
      out << d.text;
    }
    out << ',' << d.label << '\n';
  }
}

void save_csv(const std::filesystem::path& path, const Corpus& corpus) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  write_csv(out, corpus);
}

std::map<Label, std::size_t> class_counts(const Corpus& corpus) {
  std::map<Label, std::size_t> counts;
  for (const auto& d : corpus.docs) ++counts[d.label];
  return counts;
}

std::size_t train_size(std::size_t n, double train_ratio) {
  // The epsilon absorbs representation error such as 100 * 0.29 = 28.999...
  return static_cast<std::size_t>(std::floor(static_cast<double>(n) * train_ratio + 1e-9));
}

DataSplit split(const Corpus& corpus, const SplitSpec& spec) {
  if (!(spec.train_ratio > 0.0 && spec.train_ratio < 1.0))
    throw UsageError("train_ratio must lie in (0, 1)");
  const std::size_t n = corpus.size();
  const std::size_t n_train = train_size(n, spec.train_ratio);
  if (n < 2 || n_train == 0 || n_train >= n)
    throw DataError("corpus of " + std::to_string(n) +
                    " documents is too small for a nonempty train and test set");

  Rng rng(spec.seed);
  std::vector<bool> in_train(n, false);

  if (!spec.stratified) {
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    shuffle(idx, rng);
    for (std::size_t i = 0; i < n_train; ++i) in_train[idx[i]] = true;
  } else {
    std::map<Label, std::vector<std::size_t>> members;
    for (std::size_t i = 0; i < n; ++i) members[corpus.docs[i].label].push_back(i);

    // Largest-remainder apportionment of n_train across classes keeps every
    // class within one document of its proportional share.
    struct Share {
      Label label;
      std::size_t quota;
      double remainder;
    };
    std::vector<Share> shares;
    std::size_t assigned = 0;
    for (const auto& [label, idx] : members) {
      const double exact = static_cast<double>(idx.size()) * spec.train_ratio;
      auto quota = static_cast<std::size_t>(std::floor(exact + 1e-9));
      quota = std::min(quota, idx.size());
      shares.push_back({label, quota, exact - static_cast<double>(quota)});
      assigned += quota;
    }
    std::vector<std::size_t> order(shares.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return shares[a].remainder > shares[b].remainder;
    });
    for (std::size_t k = 0; assigned < n_train; k = (k + 1) % order.size()) {
      auto& s = shares[order[k]];
      if (s.quota < members[s.label].size()) {
        ++s.quota;
        ++assigned;
      }
    }
    for (const auto& s : shares) {
      auto idx = members[s.label];
      shuffle(idx, rng);
      for (std::size_t i = 0; i < s.quota; ++i) in_train[idx[i]] = true;
    }
  }

  DataSplit out;
  for (std::size_t i = 0; i < n; ++i) (in_train[i] ? out.train : out.test).docs.push_back(corpus.docs[i]);
  return out;
}

Corpus deduplicate(const Corpus& corpus) {
  Corpus out;
  std::unordered_set<std::string> seen;
  for (const auto& d : corpus.docs)
    if (seen.insert(d.text).second) out.docs.push_back(d);
  return out;
}

}  // namespace rsclf
