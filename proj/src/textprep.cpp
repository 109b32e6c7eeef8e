#include "rsclf/textprep.hpp"

#include <algorithm>
#include <array>
#include <fstream>

#include "rsclf/error.hpp"

namespace rsclf {

namespace {

bool is_ws(unsigned char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }

char ascii_lower(char c) { return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c; }

bool starts_with_ci(std::string_view s, std::size_t pos, std::string_view prefix) {
  if (s.size() - pos < prefix.size()) return false;
  for (std::size_t i = 0; i < prefix.size(); ++i)
    if (ascii_lower(s[pos + i]) != prefix[i]) return false;
  return true;
}

std::array<bool, 128> allowed_table(const CleanConfig& config) {
  std::array<bool, 128> t{};
  for (unsigned char c : config.allowed_chars)
    if (c < 128) t[c] = true;
  t[' '] = true;
  return t;
}

// One cleaning pass. clean() repeats it until nothing changes, because
// character filtering can expose a new '#word' or 'www.' prefix when the
// allowed class is customized.
std::string clean_pass(std::string_view in, const CleanConfig& config, const std::array<bool, 128>& allowed) {
  std::string text(in);
  if (config.lowercase) std::transform(text.begin(), text.end(), text.begin(), ascii_lower);

  std::string stripped;
  stripped.reserve(text.size());
  for (std::size_t i = 0; i < text.size();) {
    const char c = text[i];
    const bool url = config.strip_urls && (starts_with_ci(text, i, "http://") || starts_with_ci(text, i, "https://") ||
                                           starts_with_ci(text, i, "www."));
    const bool tag = config.strip_mentions_hashtags && (c == '@' || c == '#');
    if (url || tag) {
      while (i < text.size() && !is_ws(static_cast<unsigned char>(text[i]))) ++i;
      stripped.push_back(' ');
      continue;
    }
    stripped.push_back(c);
    ++i;
  }

  std::string out;
  out.reserve(stripped.size());
  bool pending_space = false;
  for (unsigned char c : stripped) {
    const bool keep = c < 128 && c != ' ' && allowed[c];
    if (!keep) {
      pending_space = true;
      continue;
    }
    if (pending_space && !out.empty()) out.push_back(' ');
    pending_space = false;
    out.push_back(static_cast<char>(c));
  }
  return out;
}

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && is_ws(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && is_ws(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::string strip_comment(const std::string& line) {
  const auto hash = line.find('#');
  return trim(hash == std::string::npos ? line : line.substr(0, hash));
}

}  // namespace

void CleanConfig::validate() const {
  const bool any_visible = std::any_of(allowed_chars.begin(), allowed_chars.end(), [](char c) {
    const auto u = static_cast<unsigned char>(c);
    return u < 128 && !is_ws(u);
  });
  if (!any_visible) throw UsageError("allowed_chars must contain at least one non-space ASCII character");
}

void StopwordList::validate(const CleanConfig& config) const {
  for (const auto& w : words) {
    if (w.empty() || clean(w, config) != w)
      throw DataError("stopword '" + w + "' is not a clean token under the active cleaning rules");
  }
}

void SuffixRuleTable::validate() const {
  for (const auto& r : rules) {
    if (r.suffix.empty()) throw DataError("suffix rule with empty suffix");
    if (r.min_stem_len < 2)
      throw DataError("suffix rule '" + r.suffix + "': min_stem_len must be >= 2");
  }
}

StopwordList default_stopwords() {
  // Function words of Romanized Sinhala. Negators (ne, nae, be, epa) are kept
  // out deliberately since they carry sentiment.
  return StopwordList{{"api", "ara", "da", "ekka", "eth", "ha", "hari", "me", "mage", "mama", "mata", "nam",
                       "nisa", "oya", "oyata", "saha", "tamai", "thama", "wage"}};
}

SuffixRuleTable default_suffix_rules() {
  return SuffixRuleTable{{{"wath", 3},
                          {"yata", 3},
                          {"wala", 3},
                          {"kota", 3},
                          {"gena", 3},
                          {"ekata", 3},
                          {"ekak", 3},
                          {"ta", 3},
                          {"ge", 3},
                          {"wa", 3},
                          {"ne", 4}}};
}

StopwordList read_stopwords(std::istream& in) {
  StopwordList list;
  std::string line;
  while (std::getline(in, line)) {
    std::string w = strip_comment(line);
    if (w.empty()) continue;
    std::transform(w.begin(), w.end(), w.begin(), ascii_lower);
    list.words.insert(std::move(w));
  }
  return list;
}

StopwordList load_stopwords(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open stopword file: " + path.string());
  return read_stopwords(in);
}

SuffixRuleTable read_suffix_rules(std::istream& in) {
  SuffixRuleTable table;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string body = strip_comment(line);
    if (body.empty()) continue;
    const auto comma = body.find(',');
    if (comma == std::string::npos)
      throw DataError("suffix file line " + std::to_string(lineno) + ": expected 'suffix,min_stem_len'");
    SuffixRule rule;
    rule.suffix = trim(body.substr(0, comma));
    const std::string len = trim(body.substr(comma + 1));
    try {
      std::size_t used = 0;
      rule.min_stem_len = std::stoi(len, &used);
      if (used != len.size()) throw std::invalid_argument(len);
    } catch (const std::exception&) {
      throw DataError("suffix file line " + std::to_string(lineno) + ": bad min_stem_len '" + len + "'");
    }
    table.rules.push_back(std::move(rule));
  }
  table.validate();
  return table;
}

SuffixRuleTable load_suffix_rules(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open suffix file: " + path.string());
  return read_suffix_rules(in);
}

std::string clean(std::string_view text, const CleanConfig& config) {
  const auto allowed = allowed_table(config);
  std::string cur = clean_pass(text, config, allowed);
  for (;;) {
    std::string next = clean_pass(cur, config, allowed);
    if (next == cur) return cur;
    cur = std::move(next);
  }
}

TokenSeq tokenize(std::string_view cleaned) {
  TokenSeq tokens;
  std::size_t i = 0;
  while (i < cleaned.size()) {
    while (i < cleaned.size() && is_ws(static_cast<unsigned char>(cleaned[i]))) ++i;
    const std::size_t start = i;
    while (i < cleaned.size() && !is_ws(static_cast<unsigned char>(cleaned[i]))) ++i;
    if (i > start) tokens.emplace_back(cleaned.substr(start, i - start));
  }
  return tokens;
}

TokenSeq remove_stopwords(const TokenSeq& tokens, const StopwordList& list) {
  TokenSeq out;
  out.reserve(tokens.size());
  for (const auto& t : tokens)
    if (!list.contains(t)) out.push_back(t);
  return out;
}

std::string stem(const std::string& token, const SuffixRuleTable& table) {
  const SuffixRule* best = nullptr;
  for (const auto& r : table.rules) {
    if (r.suffix.size() >= token.size()) continue;
    if (token.size() - r.suffix.size() < static_cast<std::size_t>(r.min_stem_len)) continue;
    if (token.compare(token.size() - r.suffix.size(), r.suffix.size(), r.suffix) != 0) continue;
    if (!best || r.suffix.size() > best->suffix.size()) best = &r;
  }
  return best ? token.substr(0, token.size() - best->suffix.size()) : token;
}

TokenSeq stem_all(const TokenSeq& tokens, const SuffixRuleTable& table) {
  TokenSeq out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) out.push_back(stem(t, table));
  return out;
}

TextPreprocessor::TextPreprocessor(PreprocessConfig config, StopwordList stopwords, SuffixRuleTable suffixes)
    : config_(std::move(config)), stopwords_(std::move(stopwords)), suffixes_(std::move(suffixes)) {
  config_.clean.validate();
  suffixes_.validate();
  stopwords_.validate(config_.clean);
}

TokenSeq TextPreprocessor::operator()(std::string_view text) const {
  TokenSeq tokens = tokenize(clean(text, config_.clean));
  if (config_.remove_stopwords) tokens = remove_stopwords(tokens, stopwords_);
  if (config_.stem) tokens = stem_all(tokens, suffixes_);
  return tokens;
}

std::vector<TokenSeq> TextPreprocessor::operator()(const std::vector<std::string>& texts) const {
  std::vector<TokenSeq> out;
  out.reserve(texts.size());
  for (const auto& t : texts) out.push_back((*this)(t));
  return out;
}

}  // namespace rsclf
