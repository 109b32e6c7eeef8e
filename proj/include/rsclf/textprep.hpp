#pragma once

#include <filesystem>
#include <istream>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace rsclf {

inline constexpr std::string_view kAsciiLetters =
    "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ";

// Romanized text is Latin-script, so "non-Sinhala" characters are everything
// outside the allowed ASCII class: digits, punctuation, emoji, and
// native-script codepoints. Bytes >= 0x80 are never allowed.
struct CleanConfig {
  bool lowercase = true;
  bool strip_urls = true;
  bool strip_mentions_hashtags = true;
  std::string allowed_chars{kAsciiLetters};

  void validate() const;
};

using TokenSeq = std::vector<std::string>;

struct StopwordList {
  std::set<std::string> words;

  bool contains(const std::string& w) const { return words.count(w) != 0; }
  // Throws unless every entry is a fixed point of clean() under `config`.
  void validate(const CleanConfig& config) const;
};

struct SuffixRule {
  std::string suffix;
  int min_stem_len = 2;

  bool operator==(const SuffixRule&) const = default;
};

struct SuffixRuleTable {
  std::vector<SuffixRule> rules;

  void validate() const;
};

// Non-authoritative defaults. The word lists live in data/ as editable files;
// these mirror them so the library works without any files on disk.
StopwordList default_stopwords();
SuffixRuleTable default_suffix_rules();

// One token per line, '#' starts a comment, entries lowercased.
StopwordList read_stopwords(std::istream& in);
StopwordList load_stopwords(const std::filesystem::path& path);

// Lines of the form `suffix,min_stem_len`; '#' comments allowed.
SuffixRuleTable read_suffix_rules(std::istream& in);
SuffixRuleTable load_suffix_rules(const std::filesystem::path& path);

// Removes URLs, @mentions and #hashtags (when enabled), replaces every
// disallowed character with a space, and collapses whitespace. Idempotent.
std::string clean(std::string_view text, const CleanConfig& config);

TokenSeq tokenize(std::string_view cleaned);

TokenSeq remove_stopwords(const TokenSeq& tokens, const StopwordList& list);

// Strips the longest suffix whose removal leaves at least min_stem_len
// characters. Applied once, never iterated.
std::string stem(const std::string& token, const SuffixRuleTable& table);
TokenSeq stem_all(const TokenSeq& tokens, const SuffixRuleTable& table);

struct PreprocessConfig {
  CleanConfig clean;
  bool remove_stopwords = true;
  bool stem = true;
};

// clean -> tokenize -> stopword removal -> stemming.
class TextPreprocessor {
 public:
  TextPreprocessor() : TextPreprocessor(PreprocessConfig{}, default_stopwords(), default_suffix_rules()) {}
  TextPreprocessor(PreprocessConfig config, StopwordList stopwords, SuffixRuleTable suffixes);

  TokenSeq operator()(std::string_view text) const;
  std::vector<TokenSeq> operator()(const std::vector<std::string>& texts) const;

  const PreprocessConfig& config() const { return config_; }
  const StopwordList& stopwords() const { return stopwords_; }
  const SuffixRuleTable& suffixes() const { return suffixes_; }

 private:
  PreprocessConfig config_;
  StopwordList stopwords_;
  SuffixRuleTable suffixes_;
};

}  // namespace rsclf
