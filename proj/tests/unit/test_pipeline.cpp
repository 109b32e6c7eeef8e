#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "json.hpp"
#include "rsclf/error.hpp"
#include "rsclf/pipeline.hpp"
#include "support/synthetic.hpp"

using namespace rsclf;

namespace {

Corpus sample_tweets() {
  Corpus c;
  c.docs = {
      {"mata thiyena lokuma prashnaya hemade genama hithana eka.", 1},
      {"mata oyata therum karanna be mage ethule wena dewal katawath therum karanna dena be mata eka pehedili "
       "karannawath be",
       1},
      {"oya hondin inna mama ne eth kamak ne", 1},
      {"mama ada ude jim ekata gihiin yoga kala.", 0},
  };
  return c;
}

RunConfig small_config() {
  RunConfig c;
  c.forest.n_trees = 7;
  c.nn.hidden = 16;
  c.nn.epochs = 3;
  c.nn.batch_size = 8;
  c.logreg.epochs = 10;
  c.svm.epochs = 10;
  return c;
}

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("rsclf_unit_" + name);
}

}  // namespace

TEST_CASE("four sample tweets through multinomial NB memorizes its first text") {
  const Corpus c = sample_tweets();
  CHECK(class_counts(c) == std::map<Label, std::size_t>{{0, 1}, {1, 3}});
  const PipelineArtifact a = fit_pipeline(c, RunConfig{}, ModelKind::mnb);
  const Prediction p = predict_one(a, c.docs[0].text);
  CHECK(p.label == 1);
  CHECK(p.label_name == "depressive");
  CHECK_FALSE(p.oov);
  CHECK(predict_one(a, c.docs[0].text) == p);
}

TEST_CASE("empty vocabulary is reported with its stage") {
  Corpus c;
  c.docs = {{"123 !!!", 0}, {"456 ???", 1}};
  CHECK_THROWS_WITH_AS(fit_pipeline(c, RunConfig{}, ModelKind::mnb), doctest::Contains("vectorize:"), DataError);
  Corpus one;
  one.docs = {{"abc", 1}, {"def", 1}};
  CHECK_THROWS_AS(fit_pipeline(one, RunConfig{}, ModelKind::mnb), DataError);
}

TEST_CASE("unseen text is flagged out of vocabulary") {
  const PipelineArtifact a = fit_pipeline(sample_tweets(), RunConfig{}, ModelKind::mnb);
  const Prediction p = predict_one(a, "zzzq qqqz");
  CHECK(p.oov);
  CHECK(predict_one(a, "").oov);
}

TEST_CASE("memorizing tree returns training labels") {
  const Corpus c = testing::synthetic_corpus({60, 30, 0.2, 4, 8, 11});
  const PipelineArtifact a = fit_pipeline(c, RunConfig{}, ModelKind::tree);
  for (const auto& d : deduplicate(c).docs) CHECK(predict_one(a, d.text).label == d.label);
}

TEST_CASE("same inputs give byte-identical artifacts") {
  const Corpus c = testing::synthetic_corpus({80, 30, 0.2, 4, 8, 2});
  for (ModelKind k : all_model_kinds()) {
    CAPTURE(model_id(k));
    CHECK(serialize(fit_pipeline(c, small_config(), k)) == serialize(fit_pipeline(c, small_config(), k)));
  }
}

TEST_CASE("round trip preserves predictions for every model") {
  const Corpus c = testing::synthetic_corpus({100, 30, 0.2, 4, 10, 6});
  const auto texts = testing::random_texts(100, 13, {100, 30, 0.2, 4, 10, 6});
  for (ModelKind k : all_model_kinds()) {
    CAPTURE(model_id(k));
    const PipelineArtifact a = fit_pipeline(c, small_config(), k);
    const auto path = temp_file(std::string(model_id(k)) + ".json");
    save(a, path);
    const PipelineArtifact b = load(path);
    std::filesystem::remove(path);
    CHECK(predict_many(b, texts) == predict_many(a, texts));
    CHECK(serialize(b) == serialize(a));
  }
}

TEST_CASE("loader errors") {
  const PipelineArtifact a = fit_pipeline(sample_tweets(), RunConfig{}, ModelKind::mnb);
  const std::string text = serialize(a);

  CHECK_THROWS_WITH_AS(deserialize(text.substr(0, text.size() / 2)), doctest::Contains("truncated"), DataError);

  auto j = nlohmann::json::parse(text);
  j["format_version"] = kArtifactFormatVersion + 1;
  CHECK_THROWS_WITH_AS(deserialize(j.dump()), doctest::Contains("newer"), DataError);

  j = nlohmann::json::parse(text);
  j["tfidf"]["idf"] = "oops";
  CHECK_THROWS_WITH_AS(deserialize(j.dump()), doctest::Contains("tfidf.idf"), DataError);

  j = nlohmann::json::parse(text);
  j["model"].erase("kind");
  CHECK_THROWS_WITH_AS(deserialize(j.dump()), doctest::Contains("model.kind"), DataError);

  j = nlohmann::json::parse(text);
  j["selector"]["selected"].push_back(999999);
  CHECK_THROWS_AS(deserialize(j.dump()), DataError);

  CHECK_THROWS_AS(load(temp_file("missing.json")), DataError);
}

TEST_CASE("stage isolation: preprocessing toggles only change the vocabulary") {
  const Corpus c = testing::synthetic_corpus({80, 30, 0.2, 4, 8, 2});
  for (bool sw : {false, true})
    for (bool st : {false, true}) {
      RunConfig cfg = small_config();
      cfg.preprocess.remove_stopwords = sw;
      cfg.preprocess.stem = st;
      const PipelineArtifact a = fit_pipeline(sample_tweets(), cfg, ModelKind::svm);
      CHECK_NOTHROW(predict_one(a, "mama oyata kiyanawa"));
      CHECK_NOTHROW(fit_pipeline(c, cfg, ModelKind::gnb));
    }
}

TEST_CASE("feature input resolution") {
  CHECK(resolve_input(FeatureInput::automatic, ModelKind::mnb) == FeatureInput::counts);
  CHECK(resolve_input(FeatureInput::automatic, ModelKind::nn) == FeatureInput::tfidf);
  CHECK(resolve_input(FeatureInput::counts, ModelKind::nn) == FeatureInput::counts);
}
