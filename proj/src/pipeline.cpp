#include "rsclf/pipeline.hpp"

#include <utility>

#include "rsclf/error.hpp"

namespace rsclf {

namespace {

// Runs one pipeline stage and prefixes any library error with its name.
template <typename F>
auto stage(const char* name, F&& f) -> decltype(f()) {
  const auto tag = [&](const Error& e) { return std::string(name) + ": " + e.what(); };
  try {
    return f();
  } catch (const UsageError& e) {
    throw UsageError(tag(e));
  } catch (const NumericError& e) {
    throw NumericError(tag(e));
  } catch (const DataError& e) {
    throw DataError(tag(e));
  }
}

}  // namespace

TextPreprocessor make_preprocessor(const RunConfig& config) {
  StopwordList stop = config.stopwords_file ? load_stopwords(*config.stopwords_file) : default_stopwords();
  SuffixRuleTable suffixes = config.suffix_file ? load_suffix_rules(*config.suffix_file) : default_suffix_rules();
  return TextPreprocessor(config.preprocess, std::move(stop), std::move(suffixes));
}

FeatureInput resolve_input(FeatureInput requested, ModelKind kind) {
  if (requested != FeatureInput::automatic) return requested;
  return kind == ModelKind::mnb ? FeatureInput::counts : FeatureInput::tfidf;
}

SparseMatrix FeatureChain::transform_tokens(const std::vector<TokenSeq>& docs, FeatureInput input) const {
  const SparseMatrix counts = count_transform(docs, vocab);
  if (input == FeatureInput::counts) return project(counts, selector);
  return project(tfidf_transform(counts, tfidf), selector);
}

SparseMatrix FeatureChain::transform(const std::vector<std::string>& texts, FeatureInput input) const {
  return transform_tokens(preprocessor(texts), input);
}

FeatureChain fit_features(const Corpus& train, const RunConfig& config) {
  if (train.empty()) throw DataError("fit: empty training corpus");
  FeatureChain chain{stage("preprocess", [&] { return make_preprocessor(config); }), {}, {}, {}};
  const auto docs = stage("preprocess", [&] { return chain.preprocessor(train.texts()); });
  chain.vocab = stage("vectorize", [&] { return build_vocab(docs, config.features.ngram); });
  const SparseMatrix counts = count_transform(docs, chain.vocab);
  chain.tfidf = fit_idf(counts, config.features.l2_normalize);
  const SparseMatrix weighted = tfidf_transform(counts, chain.tfidf);
  const auto labels = train.labels();
  chain.selector = stage("select", [&] {
    return select_k_best(chi2_scores(weighted, labels), config.features.k);
  });
  return chain;
}

ModelArtifact fit_model(const SparseMatrix& x, std::span<const Label> y, ModelKind kind, const RunConfig& config) {
  return stage("fit", [&]() -> ModelArtifact {
    ModelArtifact a;
    a.kind = kind;
    switch (kind) {
      case ModelKind::mnb:
        a.model = fit_multinomial_nb(x, y, config.mnb);
        break;
      case ModelKind::gnb:
        a.model = fit_gaussian_nb(x, y, config.gnb);
        break;
      case ModelKind::logreg: {
        auto c = config.logreg;
        c.seed = config.seed;
        a.model = fit_logistic(x, y, c);
        break;
      }
      case ModelKind::svm: {
        auto c = config.svm;
        c.seed = config.seed;
        a.model = fit_linear_svm(x, y, c);
        break;
      }
      case ModelKind::tree:
        a.model = fit_tree(x, y, config.tree);
        break;
      case ModelKind::forest: {
        auto c = config.forest;
        c.seed = config.seed;
        a.model = fit_forest(x, y, c);
        break;
      }
      case ModelKind::nn: {
        auto c = config.nn;
        c.seed = config.seed;
        auto result = train_mlp(x, y, c);
        a.model = MlpModel{std::move(result.params)};
        a.history = std::move(result.history);
        break;
      }
    }
    return a;
  });
}

void PipelineArtifact::check_consistency() const {
  if (format_version != kArtifactFormatVersion)
    throw DataError("unsupported artifact format_version " + std::to_string(format_version));
  if (chain.tfidf.idf.size() != chain.vocab.size())
    throw DataError("artifact: idf width " + std::to_string(chain.tfidf.idf.size()) + " != vocabulary size " +
                    std::to_string(chain.vocab.size()));
  if (chain.selector.n_input() != chain.vocab.size())
    throw DataError("artifact: selector input width does not match vocabulary size");
  for (auto c : chain.selector.selected)
    if (c >= chain.vocab.size()) throw DataError("artifact: selected column out of range");
  if (model.n_features() != chain.output_dim())
    throw DataError("artifact: model expects " + std::to_string(model.n_features()) + " features, selector yields " +
                    std::to_string(chain.output_dim()));
  if (input == FeatureInput::automatic) throw DataError("artifact: feature input must be resolved");
}

PipelineArtifact fit_pipeline(const Corpus& train, const RunConfig& config, ModelKind kind) {
  const auto counts = class_counts(train);
  if (counts.size() < 2) throw DataError("fit: training corpus must contain both classes");
  PipelineArtifact a;
  a.chain = fit_features(train, config);
  a.input = resolve_input(config.features.input, kind);
  a.threshold = config.threshold;
  const auto x = a.chain.transform(train.texts(), a.input);
  const auto y = train.labels();
  a.model = fit_model(x, y, kind, config);
  a.check_consistency();
  return a;
}

Prediction predict_one(const PipelineArtifact& artifact, std::string_view text) {
  return predict_many(artifact, {std::string(text)}).front();
}

std::vector<Prediction> predict_many(const PipelineArtifact& artifact, const std::vector<std::string>& texts) {
  const SparseMatrix x = artifact.chain.transform(texts, artifact.input);
  const auto scores = artifact.model.scores(x);
  const auto labels = artifact.model.predict(x, artifact.threshold);
  std::vector<Prediction> out(texts.size());
  for (std::size_t i = 0; i < texts.size(); ++i) {
    out[i].label = labels[i];
    out[i].score = scores[i];
    out[i].label_name = artifact.label_names[static_cast<std::size_t>(labels[i])];
    out[i].oov = x.row(i).nnz() == 0;
  }
  return out;
}

}  // namespace rsclf
