#include "doctest.h"
#include "rsclf/error.hpp"
#include "rsclf/eval.hpp"
#include "rsclf/random.hpp"
#include "support/synthetic.hpp"

using namespace rsclf;
using doctest::Approx;

TEST_CASE("confusion examples") {
  const ConfusionMatrix a = confusion(std::vector<Label>{1, 0, 1}, std::vector<Label>{1, 0, 1});
  CHECK(a.tn() == 1);
  CHECK(a.tp() == 2);
  CHECK(a.fp() + a.fn() == 0);

  const ConfusionMatrix b = confusion(std::vector<Label>{1, 1, 1}, std::vector<Label>{0, 0, 0});
  CHECK(b.fn() == 3);
  CHECK(b.tp() + b.tn() + b.fp() == 0);

  const ConfusionMatrix c = confusion(std::vector<Label>{1, 1, 1, 1, 0, 0, 0, 0, 0, 0},
                                      std::vector<Label>{1, 1, 1, 0, 1, 0, 0, 0, 0, 0});
  CHECK(c.tp() == 3);
  CHECK(c.fn() == 1);
  CHECK(c.fp() == 1);
  CHECK(c.tn() == 5);

  CHECK_THROWS(confusion(std::vector<Label>{1}, std::vector<Label>{1, 0}));
  CHECK_THROWS_AS(confusion(std::vector<Label>{2}, std::vector<Label>{1}), DataError);
}

TEST_CASE("metrics examples") {
  ConfusionMatrix cm;
  cm.cell = {{{5, 1}, {1, 3}}};
  const EvalReport r = metrics(cm);
  CHECK(r.per_label[1].precision == 0.75);
  CHECK(r.per_label[1].recall == 0.75);
  CHECK(r.per_label[1].f1 == Approx(0.75).epsilon(1e-15));
  CHECK(r.accuracy == 0.8);
  CHECK(r.per_label[0].support + r.per_label[1].support == 10);

  ConfusionMatrix perfect;
  perfect.cell = {{{4, 0}, {0, 6}}};
  const EvalReport p = metrics(perfect);
  CHECK(p.accuracy == 1.0);
  for (const auto& m : p.per_label) CHECK((m.precision == 1.0 && m.recall == 1.0 && m.f1 == 1.0));

  ConfusionMatrix none_pred;
  none_pred.cell = {{{3, 0}, {2, 0}}};
  const EvalReport z = metrics(none_pred);
  CHECK(z.per_label[1].precision == 0.0);
  CHECK(z.per_label[1].f1 == 0.0);
  CHECK(z.per_label[1].zero_division);
}

TEST_CASE("metric formatting mirrors the reference row") {
  CHECK(format_metric(0.94542254) == "0.94542254");
  CHECK(format_metric(0.91482112) == "0.91482112");
  CHECK(format_metric(0.92987013) == "0.92987013");
  CHECK(format_metric(0.75) == "0.75");
  CHECK(format_metric(1.0) == "1");
}

TEST_CASE("property: accuracy and micro averages on random confusion matrices") {
  Rng rng(77);
  for (int trial = 0; trial < 1000; ++trial) {
    ConfusionMatrix cm;
    for (auto& row : cm.cell)
      for (auto& v : row) v = uniform_index(rng, 50);
    if (cm.total() == 0) cm.cell[0][0] = 1;
    const EvalReport r = metrics(cm);
    CHECK(r.accuracy == static_cast<double>(cm.trace()) / static_cast<double>(cm.total()));
    CHECK(micro_precision(cm) == r.accuracy);
    CHECK(micro_recall(cm) == r.accuracy);
    CHECK(r.per_label[0].support + r.per_label[1].support == cm.total());
    for (const auto& m : r.per_label) {
      if (m.precision + m.recall > 0)
        CHECK(m.f1 == Approx(2 * m.precision * m.recall / (m.precision + m.recall)).epsilon(1e-12));
      else
        CHECK(m.f1 == 0.0);
    }
  }
}

TEST_CASE("property: reports depend only on the multiset of pairs") {
  Rng rng(4);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 1 + uniform_index(rng, 40);
    std::vector<Label> t(n), p(n);
    for (std::size_t i = 0; i < n; ++i) {
      t[i] = static_cast<Label>(uniform_index(rng, 2));
      p[i] = static_cast<Label>(uniform_index(rng, 2));
    }
    const EvalReport r = metrics(confusion(t, p));
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    shuffle(idx, rng);
    std::vector<Label> ts(n), ps(n);
    for (std::size_t i = 0; i < n; ++i) {
      ts[i] = t[idx[i]];
      ps[i] = p[idx[i]];
    }
    CHECK(metrics(confusion(ts, ps)) == r);
  }
}

TEST_CASE("evaluate: memorizing tree, threshold semantics, empty test set") {
  RunConfig cfg;
  const Corpus train = testing::synthetic_corpus({60, 30, 0.2, 4, 8, 3});
  const PipelineArtifact tree = fit_pipeline(train, cfg, ModelKind::tree);
  CHECK(evaluate(tree, deduplicate(train)).accuracy == 1.0);
  CHECK_THROWS_AS(evaluate(tree, Corpus{}), DataError);

  const PipelineArtifact nb = fit_pipeline(train, cfg, ModelKind::mnb);
  const EvalReport all_pos = evaluate(nb, train, 0.0);
  CHECK(all_pos.confusion.tn() + all_pos.confusion.fn() == 0);
}

TEST_CASE("benchmark: single model, sorting, table shape") {
  RunConfig cfg;
  const Corpus c = testing::synthetic_corpus({120, 30, 0.2, 5, 9, 5});
  const BenchmarkResult one = benchmark(c, cfg, {ModelKind::mnb});
  REQUIRE(one.reports.size() == 1);
  CHECK(one.failures.empty());
  const std::string table = format_table(one.reports);
  CHECK(table.find("Multinomial Naive Bayes") != std::string::npos);
  CHECK(table.find("Precision") < table.find("Recall"));
  CHECK(table.find("Recall") < table.find("F1-Score"));
  CHECK(table.find("F1-Score") < table.find("Support"));

  const BenchmarkResult several = benchmark(c, cfg, {ModelKind::tree, ModelKind::mnb, ModelKind::gnb});
  for (std::size_t i = 1; i < several.reports.size(); ++i)
    CHECK(several.reports[i - 1].accuracy >= several.reports[i].accuracy);
  CHECK_THROWS_AS(benchmark(c, cfg, {}), UsageError);
}

TEST_CASE("benchmark isolates a failing model") {
  RunConfig cfg;
  cfg.logreg.lr = 1e300;  // overflows immediately
  const Corpus c = testing::synthetic_corpus({80, 20, 0.2, 5, 9, 5});
  const BenchmarkResult r = benchmark(c, cfg, {ModelKind::logreg, ModelKind::mnb});
  CHECK(r.reports.size() == 1);
  REQUIRE(r.failures.size() == 1);
  CHECK(r.failures[0].model == "Logistic Regression");
  CHECK(benchmark_json(r).find("failures") != std::string::npos);
}
