#include "rsclf/config.hpp"

#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "json.hpp"
#include "rsclf/error.hpp"

namespace rsclf {

namespace {

using nlohmann::json;

// Walks one JSON object, remembering which keys were read so that leftovers
// can be reported as unknown.
class StrictObject {
 public:
  StrictObject(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw UsageError(where() + ": expected an object");
  }

  StrictObject child(const std::string& key) {
    seen_.insert(key);
    static const json empty = json::object();
    const auto it = j_.find(key);
    return StrictObject(it == j_.end() ? empty : *it, path_.empty() ? key : path_ + "." + key);
  }

  void get(const std::string& key, bool& out) {
    if (const json* v = find(key)) {
      if (!v->is_boolean()) fail(key, "expected a boolean");
      out = v->get<bool>();
    }
  }

  void get(const std::string& key, double& out) {
    if (const json* v = find(key)) {
      if (!v->is_number()) fail(key, "expected a number");
      out = v->get<double>();
    }
  }

  void get(const std::string& key, int& out) {
    if (const json* v = find(key)) {
      if (!v->is_number_integer()) fail(key, "expected an integer");
      const auto x = v->get<long long>();
      if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max()) fail(key, "out of range");
      out = static_cast<int>(x);
    }
  }

  void get(const std::string& key, std::uint64_t& out) {
    if (const json* v = find(key)) {
      if (!v->is_number_unsigned()) fail(key, "expected a non-negative integer");
      out = v->get<std::uint64_t>();
    }
  }

  void get(const std::string& key, unsigned& out) {
    std::uint64_t x = out;
    get(key, x);
    if (x > std::numeric_limits<unsigned>::max()) fail(key, "out of range");
    out = static_cast<unsigned>(x);
  }

  void get(const std::string& key, std::string& out) {
    if (const json* v = find(key)) {
      if (!v->is_string()) fail(key, "expected a string");
      out = v->get<std::string>();
    }
  }

  void get(const std::string& key, std::optional<std::string>& out) {
    if (const json* v = find(key)) {
      if (v->is_null()) {
        out.reset();
        return;
      }
      if (!v->is_string()) fail(key, "expected a string or null");
      out = v->get<std::string>();
    }
  }

  template <typename E>
  void get_enum(const std::string& key, E& out, std::initializer_list<std::pair<const char*, E>> names) {
    std::string s;
    bool present = find(key) != nullptr;
    if (!present) return;
    get(key, s);
    for (const auto& [name, value] : names)
      if (s == name) {
        out = value;
        return;
      }
    fail(key, "unrecognized value '" + s + "'");
  }

  void finish() const {
    for (const auto& [key, _] : j_.items())
      if (!seen_.count(key)) throw UsageError("unknown config key '" + qualified(key) + "'");
  }

 private:
  const json* find(const std::string& key) {
    seen_.insert(key);
    const auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }
  std::string qualified(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
  std::string where() const { return path_.empty() ? "config" : "config." + path_; }
  [[noreturn]] void fail(const std::string& key, const std::string& msg) const {
    throw UsageError("config key '" + qualified(key) + "': " + msg);
  }

  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

const char* input_name(FeatureInput in) {
  switch (in) {
    case FeatureInput::tfidf:
      return "tfidf";
    case FeatureInput::counts:
      return "counts";
    default:
      return "auto";
  }
}

void validate(const RunConfig& c) {
  if (!(c.train_ratio > 0.0 && c.train_ratio < 1.0)) throw UsageError("split.train_ratio must lie in (0, 1)");
  if (c.features.k < 1) throw UsageError("features.k must be >= 1");
  if (!(c.threshold >= 0.0 && c.threshold <= 1.0)) throw UsageError("threshold must lie in [0, 1]");
  c.features.ngram.validate();
  c.preprocess.clean.validate();
  c.nn.validate();
}

}  // namespace

RunConfig RunConfig::parse(std::string_view json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw UsageError(std::string("config is not valid JSON: ") + e.what());
  }
  RunConfig c;
  StrictObject root(j, "");
  root.get("seed", c.seed);
  root.get("threshold", c.threshold);
  {
    auto s = root.child("split");
    s.get("train_ratio", c.train_ratio);
    s.get("stratified", c.stratified);
    s.get("deduplicate", c.deduplicate);
    s.finish();
  }
  {
    auto p = root.child("preprocess");
    p.get("lowercase", c.preprocess.clean.lowercase);
    p.get("strip_urls", c.preprocess.clean.strip_urls);
    p.get("strip_mentions_hashtags", c.preprocess.clean.strip_mentions_hashtags);
    p.get("allowed_chars", c.preprocess.clean.allowed_chars);
    p.get("remove_stopwords", c.preprocess.remove_stopwords);
    p.get("stem", c.preprocess.stem);
    p.get("stopwords_file", c.stopwords_file);
    p.get("suffix_file", c.suffix_file);
    p.finish();
  }
  {
    auto f = root.child("features");
    f.get("min_n", c.features.ngram.min_n);
    f.get("max_n", c.features.ngram.max_n);
    f.get("min_df", c.features.ngram.min_df);
    f.get("k", c.features.k);
    f.get("l2_normalize", c.features.l2_normalize);
    f.get_enum("input", c.features.input,
               {{"auto", FeatureInput::automatic}, {"tfidf", FeatureInput::tfidf}, {"counts", FeatureInput::counts}});
    f.finish();
  }
  {
    auto models = root.child("models");
    auto mnb = models.child("mnb");
    mnb.get("alpha", c.mnb.alpha);
    mnb.finish();
    auto gnb = models.child("gnb");
    gnb.get("var_smoothing", c.gnb.var_smoothing);
    gnb.finish();
    auto lr = models.child("logreg");
    lr.get("lr", c.logreg.lr);
    lr.get("l2", c.logreg.l2);
    lr.get("epochs", c.logreg.epochs);
    lr.get("batch_size", c.logreg.batch_size);
    lr.finish();
    auto svm = models.child("svm");
    svm.get("lambda", c.svm.lambda);
    svm.get("epochs", c.svm.epochs);
    svm.finish();
    auto tree = models.child("tree");
    tree.get("max_depth", c.tree.max_depth);
    tree.get("min_leaf", c.tree.min_leaf);
    tree.finish();
    auto rf = models.child("forest");
    rf.get("n_trees", c.forest.n_trees);
    rf.get_enum("features_per_split", c.forest.features_per_split,
                {{"sqrt", FeatureSubset::sqrt}, {"all", FeatureSubset::all}});
    rf.get("bootstrap", c.forest.bootstrap);
    rf.get("max_depth", c.forest.max_depth);
    rf.get("min_leaf", c.forest.min_leaf);
    rf.get("threads", c.forest.threads);
    rf.finish();
    auto nn = models.child("nn");
    nn.get("hidden", c.nn.hidden);
    nn.get("lr", c.nn.adam.lr);
    nn.get("beta1", c.nn.adam.beta1);
    nn.get("beta2", c.nn.adam.beta2);
    nn.get("epsilon", c.nn.adam.epsilon);
    nn.get("epochs", c.nn.epochs);
    nn.get("batch_size", c.nn.batch_size);
    nn.get("dropout", c.nn.dropout);
    nn.finish();
    models.finish();
  }
  root.finish();
  validate(c);
  return c;
}

RunConfig RunConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config file: " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

std::string RunConfig::dump() const {
  json j;
  j["seed"] = seed;
  j["threshold"] = threshold;
  j["split"] = {{"train_ratio", train_ratio}, {"stratified", stratified}, {"deduplicate", deduplicate}};
  j["preprocess"] = {{"lowercase", preprocess.clean.lowercase},
                     {"strip_urls", preprocess.clean.strip_urls},
                     {"strip_mentions_hashtags", preprocess.clean.strip_mentions_hashtags},
                     {"allowed_chars", preprocess.clean.allowed_chars},
                     {"remove_stopwords", preprocess.remove_stopwords},
                     {"stem", preprocess.stem},
                     {"stopwords_file", stopwords_file ? json(*stopwords_file) : json(nullptr)},
                     {"suffix_file", suffix_file ? json(*suffix_file) : json(nullptr)}};
  j["features"] = {{"min_n", features.ngram.min_n}, {"max_n", features.ngram.max_n},
                   {"min_df", features.ngram.min_df}, {"k", features.k},
                   {"l2_normalize", features.l2_normalize}, {"input", input_name(features.input)}};
  j["models"] = {
      {"mnb", {{"alpha", mnb.alpha}}},
      {"gnb", {{"var_smoothing", gnb.var_smoothing}}},
      {"logreg", {{"lr", logreg.lr}, {"l2", logreg.l2}, {"epochs", logreg.epochs}, {"batch_size", logreg.batch_size}}},
      {"svm", {{"lambda", svm.lambda}, {"epochs", svm.epochs}}},
      {"tree", {{"max_depth", tree.max_depth}, {"min_leaf", tree.min_leaf}}},
      {"forest",
       {{"n_trees", forest.n_trees},
        {"features_per_split", forest.features_per_split == FeatureSubset::sqrt ? "sqrt" : "all"},
        {"bootstrap", forest.bootstrap},
        {"max_depth", forest.max_depth},
        {"min_leaf", forest.min_leaf},
        {"threads", forest.threads}}},
      {"nn",
       {{"hidden", nn.hidden},
        {"lr", nn.adam.lr},
        {"beta1", nn.adam.beta1},
        {"beta2", nn.adam.beta2},
        {"epsilon", nn.adam.epsilon},
        {"epochs", nn.epochs},
        {"batch_size", nn.batch_size},
        {"dropout", nn.dropout}}}};
  return j.dump(2);
}

}  // namespace rsclf
