#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "rsclf/error.hpp"
#include "rsclf/pipeline.hpp"

namespace rsclf {

namespace {

using nlohmann::json;

// ------------------------------------------------------------------ writing

json finite_array(const std::vector<double>& v, const char* what) {
  for (double d : v)
    if (!std::isfinite(d)) throw NumericError(std::string("cannot serialize non-finite value in ") + what);
  return json(v);
}

json tree_to_json(const DecisionTree& t) {
  json nodes = json::array();
  for (const auto& n : t.nodes) nodes.push_back({n.feature, n.threshold, n.left, n.right, n.count0, n.count1});
  return {{"n_features", t.n_features}, {"nodes", std::move(nodes)}};
}

json model_to_json(const ModelArtifact& m) {
  json j;
  j["kind"] = std::string(model_id(m.kind));
  std::visit(
      [&](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, MultinomialNb>) {
          j["alpha"] = p.alpha;
          j["log_prior"] = {p.log_prior[0], p.log_prior[1]};
          j["log_likelihood"] = {finite_array(p.log_likelihood[0], "mnb"), finite_array(p.log_likelihood[1], "mnb")};
        } else if constexpr (std::is_same_v<T, GaussianNb>) {
          j["prior"] = {p.prior[0], p.prior[1]};
          j["mean"] = {finite_array(p.mean[0], "gnb"), finite_array(p.mean[1], "gnb")};
          j["var"] = {finite_array(p.var[0], "gnb"), finite_array(p.var[1], "gnb")};
          j["var_floor"] = p.var_floor;
        } else if constexpr (std::is_same_v<T, LinearModel>) {
          j["weights"] = finite_array(p.weights, "linear model");
          j["bias"] = p.bias;
        } else if constexpr (std::is_same_v<T, DecisionTree>) {
          j["tree"] = tree_to_json(p);
        } else if constexpr (std::is_same_v<T, RandomForest>) {
          j["features_per_split"] = p.features_per_split == FeatureSubset::sqrt ? "sqrt" : "all";
          j["bootstrap"] = p.bootstrap;
          j["seed"] = p.seed;
          json trees = json::array();
          for (const auto& t : p.trees) trees.push_back(tree_to_json(t));
          j["trees"] = std::move(trees);
        } else if constexpr (std::is_same_v<T, MlpModel>) {
          const auto& q = p.params;
          j["input_dim"] = q.input_dim;
          j["hidden"] = q.hidden;
          j["w1"] = finite_array(q.w1, "nn.w1");
          j["b1"] = finite_array(q.b1, "nn.b1");
          j["w2"] = finite_array(q.w2, "nn.w2");
          j["b2"] = q.b2;
          json hist = json::array();
          for (const auto& e : m.history) hist.push_back({e.loss, e.accuracy});
          j["history"] = std::move(hist);
        }
      },
      m.model);
  return j;
}

const char* input_name(FeatureInput in) { return in == FeatureInput::counts ? "counts" : "tfidf"; }

// ------------------------------------------------------------------ reading

// Every accessor names the JSON path of the offending field on failure.
struct Node {
  const json& j;
  std::string path;

  [[noreturn]] void fail(const std::string& msg) const { throw DataError("artifact field '" + path + "': " + msg); }

  Node at(const std::string& key) const {
    if (!j.is_object()) fail("expected an object");
    const auto it = j.find(key);
    const std::string sub = path.empty() ? key : path + "." + key;
    if (it == j.end()) throw DataError("artifact field '" + sub + "': missing");
    return {*it, sub};
  }
  Node at(std::size_t i) const {
    if (!j.is_array()) fail("expected an array");
    if (i >= j.size()) fail("expected at least " + std::to_string(i + 1) + " elements");
    return {j[i], path + "[" + std::to_string(i) + "]"};
  }
  std::size_t size() const {
    if (!j.is_array()) fail("expected an array");
    return j.size();
  }
  double num() const {
    if (!j.is_number()) fail("expected a number");
    return j.get<double>();
  }
  long long integer() const {
    if (!j.is_number_integer()) fail("expected an integer");
    return j.get<long long>();
  }
  std::uint64_t uint() const {
    if (!j.is_number_unsigned()) fail("expected a non-negative integer");
    return j.get<std::uint64_t>();
  }
  bool boolean() const {
    if (!j.is_boolean()) fail("expected a boolean");
    return j.get<bool>();
  }
  std::string str() const {
    if (!j.is_string()) fail("expected a string");
    return j.get<std::string>();
  }
  std::vector<double> nums() const {
    std::vector<double> v(size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = at(i).num();
    return v;
  }
  std::vector<std::size_t> uints() const {
    std::vector<std::size_t> v(size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = static_cast<std::size_t>(at(i).uint());
    return v;
  }
};

DecisionTree tree_from_json(const Node& n) {
  DecisionTree t;
  t.n_features = static_cast<std::size_t>(n.at("n_features").uint());
  const Node nodes = n.at("nodes");
  if (nodes.size() == 0) nodes.fail("tree has no nodes");
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const Node e = nodes.at(i);
    if (e.size() != 6) e.fail("expected [feature, threshold, left, right, count0, count1]");
    TreeNode tn;
    tn.feature = static_cast<int>(e.at(0).integer());
    tn.threshold = e.at(1).num();
    tn.left = static_cast<int>(e.at(2).integer());
    tn.right = static_cast<int>(e.at(3).integer());
    tn.count0 = e.at(4).uint();
    tn.count1 = e.at(5).uint();
    if (!tn.is_leaf()) {
      const auto n_nodes = static_cast<long long>(nodes.size());
      if (static_cast<std::size_t>(tn.feature) >= t.n_features) e.fail("feature index out of range");
      if (tn.left <= static_cast<int>(i) || tn.right <= static_cast<int>(i) || tn.left >= n_nodes ||
          tn.right >= n_nodes)
        e.fail("child index out of range");
    }
    t.nodes.push_back(tn);
  }
  return t;
}

ModelArtifact model_from_json(const Node& n) {
  ModelArtifact m;
  const Node kind_node = n.at("kind");
  try {
    m.kind = parse_model_kind(kind_node.str());
  } catch (const UsageError& e) {
    kind_node.fail(e.what());
  }
  switch (m.kind) {
    case ModelKind::mnb: {
      MultinomialNb p;
      p.alpha = n.at("alpha").num();
      for (std::size_t c = 0; c < 2; ++c) {
        p.log_prior[c] = n.at("log_prior").at(c).num();
        p.log_likelihood[c] = n.at("log_likelihood").at(c).nums();
      }
      if (p.log_likelihood[0].size() != p.log_likelihood[1].size()) n.at("log_likelihood").fail("ragged classes");
      m.model = std::move(p);
      break;
    }
    case ModelKind::gnb: {
      GaussianNb p;
      for (std::size_t c = 0; c < 2; ++c) {
        p.prior[c] = n.at("prior").at(c).num();
        p.mean[c] = n.at("mean").at(c).nums();
        p.var[c] = n.at("var").at(c).nums();
        if (p.mean[c].size() != p.var[c].size() || p.mean[c].size() != p.mean[0].size())
          n.at("var").fail("shape mismatch");
      }
      p.var_floor = n.at("var_floor").num();
      m.model = std::move(p);
      break;
    }
    case ModelKind::logreg:
    case ModelKind::svm: {
      LinearModel p;
      p.kind = m.kind == ModelKind::svm ? LinearKind::svm : LinearKind::logistic;
      p.weights = n.at("weights").nums();
      p.bias = n.at("bias").num();
      m.model = std::move(p);
      break;
    }
    case ModelKind::tree:
      m.model = tree_from_json(n.at("tree"));
      break;
    case ModelKind::forest: {
      RandomForest p;
      const Node fps = n.at("features_per_split");
      const std::string s = fps.str();
      if (s != "sqrt" && s != "all") fps.fail("expected 'sqrt' or 'all'");
      p.features_per_split = s == "sqrt" ? FeatureSubset::sqrt : FeatureSubset::all;
      p.bootstrap = n.at("bootstrap").boolean();
      p.seed = n.at("seed").uint();
      const Node trees = n.at("trees");
      if (trees.size() == 0) trees.fail("forest has no trees");
      for (std::size_t i = 0; i < trees.size(); ++i) {
        p.trees.push_back(tree_from_json(trees.at(i)));
        if (p.trees.back().n_features != p.trees.front().n_features) trees.at(i).fail("feature width differs");
      }
      m.model = std::move(p);
      break;
    }
    case ModelKind::nn: {
      MlpModel p;
      auto& q = p.params;
      q.input_dim = static_cast<std::size_t>(n.at("input_dim").uint());
      q.hidden = static_cast<std::size_t>(n.at("hidden").uint());
      q.w1 = n.at("w1").nums();
      q.b1 = n.at("b1").nums();
      q.w2 = n.at("w2").nums();
      q.b2 = n.at("b2").num();
      if (q.w1.size() != q.input_dim * q.hidden) n.at("w1").fail("expected input_dim * hidden entries");
      if (q.b1.size() != q.hidden) n.at("b1").fail("expected hidden entries");
      if (q.w2.size() != q.hidden) n.at("w2").fail("expected hidden entries");
      const Node hist = n.at("history");
      for (std::size_t i = 0; i < hist.size(); ++i)
        m.history.push_back({hist.at(i).at(0).num(), hist.at(i).at(1).num()});
      m.model = std::move(p);
      break;
    }
  }
  return m;
}

}  // namespace

std::string serialize(const PipelineArtifact& a) {
  a.check_consistency();
  const auto& pc = a.chain.preprocessor.config();
  json j;
  j["format_version"] = a.format_version;
  j["threshold"] = a.threshold;
  j["label_names"] = a.label_names;
  j["preprocess"] = {{"lowercase", pc.clean.lowercase},
                     {"strip_urls", pc.clean.strip_urls},
                     {"strip_mentions_hashtags", pc.clean.strip_mentions_hashtags},
                     {"allowed_chars", pc.clean.allowed_chars},
                     {"remove_stopwords", pc.remove_stopwords},
                     {"stem", pc.stem}};
  j["stopwords"] = a.chain.preprocessor.stopwords().words;
  json rules = json::array();
  for (const auto& r : a.chain.preprocessor.suffixes().rules) rules.push_back({r.suffix, r.min_stem_len});
  j["suffix_rules"] = std::move(rules);
  const auto& spec = a.chain.vocab.spec();
  j["ngram"] = {{"min_n", spec.min_n}, {"max_n", spec.max_n}, {"min_df", spec.min_df}};
  j["vocabulary"] = {{"terms", a.chain.vocab.terms()}, {"df", a.chain.vocab.df()}};
  j["tfidf"] = {{"idf", finite_array(a.chain.tfidf.idf, "idf")}, {"l2_normalize", a.chain.tfidf.l2_normalize}};
  j["selector"] = {{"k", a.chain.selector.k},
                   {"scores", finite_array(a.chain.selector.scores, "chi2 scores")},
                   {"selected", a.chain.selector.selected}};
  j["feature_input"] = input_name(a.input);
  j["model"] = model_to_json(a.model);
  return j.dump();
}

PipelineArtifact deserialize(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw DataError(std::string("artifact is truncated or not valid JSON: ") + e.what());
  }
  const Node root{j, ""};
  const long long version = root.at("format_version").integer();
  if (version > kArtifactFormatVersion)
    throw DataError("artifact format_version " + std::to_string(version) + " is newer than this build supports (" +
                    std::to_string(kArtifactFormatVersion) + ")");
  if (version != kArtifactFormatVersion)
    throw DataError("unsupported artifact format_version " + std::to_string(version));

  PipelineArtifact a;
  a.format_version = static_cast<int>(version);
  a.threshold = root.at("threshold").num();
  a.label_names = {root.at("label_names").at(0).str(), root.at("label_names").at(1).str()};

  const Node pp = root.at("preprocess");
  PreprocessConfig pc;
  pc.clean.lowercase = pp.at("lowercase").boolean();
  pc.clean.strip_urls = pp.at("strip_urls").boolean();
  pc.clean.strip_mentions_hashtags = pp.at("strip_mentions_hashtags").boolean();
  pc.clean.allowed_chars = pp.at("allowed_chars").str();
  pc.remove_stopwords = pp.at("remove_stopwords").boolean();
  pc.stem = pp.at("stem").boolean();
  StopwordList stop;
  const Node sw = root.at("stopwords");
  for (std::size_t i = 0; i < sw.size(); ++i) stop.words.insert(sw.at(i).str());
  SuffixRuleTable suffixes;
  const Node sr = root.at("suffix_rules");
  for (std::size_t i = 0; i < sr.size(); ++i)
    suffixes.rules.push_back({sr.at(i).at(0).str(), static_cast<int>(sr.at(i).at(1).integer())});
  try {
    a.chain.preprocessor = TextPreprocessor(pc, std::move(stop), std::move(suffixes));
  } catch (const Error& e) {
    throw DataError(std::string("artifact field 'preprocess': ") + e.what());
  }

  const Node ng = root.at("ngram");
  NgramSpec spec{static_cast<int>(ng.at("min_n").integer()), static_cast<int>(ng.at("max_n").integer()),
                 static_cast<int>(ng.at("min_df").integer())};
  const Node vocab = root.at("vocabulary");
  const Node terms = vocab.at("terms");
  std::vector<std::string> term_list(terms.size());
  for (std::size_t i = 0; i < term_list.size(); ++i) term_list[i] = terms.at(i).str();
  try {
    spec.validate();
    a.chain.vocab = Vocabulary(spec, std::move(term_list), vocab.at("df").uints());
  } catch (const UsageError& e) {
    throw DataError(std::string("artifact field 'ngram': ") + e.what());
  }

  const Node tf = root.at("tfidf");
  a.chain.tfidf.idf = tf.at("idf").nums();
  a.chain.tfidf.l2_normalize = tf.at("l2_normalize").boolean();

  const Node sel = root.at("selector");
  a.chain.selector.k = static_cast<std::size_t>(sel.at("k").uint());
  a.chain.selector.scores = sel.at("scores").nums();
  a.chain.selector.selected = sel.at("selected").uints();
  for (std::size_t i = 1; i < a.chain.selector.selected.size(); ++i)
    if (a.chain.selector.selected[i] <= a.chain.selector.selected[i - 1]) sel.at("selected").fail("must be ascending");

  const Node in = root.at("feature_input");
  const std::string input = in.str();
  if (input != "tfidf" && input != "counts") in.fail("expected 'tfidf' or 'counts'");
  a.input = input == "counts" ? FeatureInput::counts : FeatureInput::tfidf;

  a.model = model_from_json(root.at("model"));
  a.check_consistency();
  return a;
}

void save(const PipelineArtifact& artifact, const std::filesystem::path& path) {
  const std::string text = serialize(artifact);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write artifact: " + path.string());
  out << text;
  if (!out) throw DataError("failed writing artifact: " + path.string());
}

PipelineArtifact load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open artifact: " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return deserialize(ss.str());
}

}  // namespace rsclf
