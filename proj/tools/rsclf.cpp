// rsclf: train, evaluate and run depression-screening text classifiers on
// Romanized Sinhala tweets.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "rsclf/config.hpp"
#include "rsclf/corpus.hpp"
#include "rsclf/error.hpp"
#include "rsclf/eval.hpp"
#include "rsclf/neural.hpp"
#include "rsclf/pipeline.hpp"

namespace {

using namespace rsclf;

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitNumeric = 3;

struct Options {
  std::string input;
  std::string config;
  std::string model = "nn";
  std::string out;
  std::string artifact;
  std::string format = "table";
  std::string text;
  std::string models;
  std::optional<std::uint64_t> seed;
  std::optional<double> ratio;
  std::optional<double> threshold;
  bool from_stdin = false;
  bool no_stratify = false;
  // gradcheck
  std::size_t dim = 100;
  std::size_t hidden = kDefaultHidden;
  std::size_t samples = 200;
  int epochs = 0;
  double delta = 1e-5;
  double tolerance = 1e-4;
};

RunConfig load_config(const Options& o) {
  RunConfig c = o.config.empty() ? RunConfig{} : RunConfig::load(o.config);
  if (o.seed) c.seed = *o.seed;
  if (o.ratio) c.train_ratio = *o.ratio;
  if (o.threshold) c.threshold = *o.threshold;
  if (o.no_stratify) c.stratified = false;
  if (!(c.train_ratio > 0.0 && c.train_ratio < 1.0)) throw UsageError("--ratio must lie in (0, 1)");
  return c;
}

Corpus load_input(const Options& o, const RunConfig& c) {
  Corpus corpus = load_csv(o.input);
  return c.deduplicate ? deduplicate(corpus) : corpus;
}

int cmd_split(const Options& o) {
  const RunConfig c = load_config(o);
  const DataSplit parts = split(load_input(o, c), c.split_spec());
  const std::filesystem::path dir(o.out);
  std::filesystem::create_directories(dir);
  save_csv(dir / "train.csv", parts.train);
  save_csv(dir / "test.csv", parts.test);
  std::cout << "train: " << parts.train.size() << " rows -> " << (dir / "train.csv").string() << "\n"
            << "test:  " << parts.test.size() << " rows -> " << (dir / "test.csv").string() << "\n";
  return 0;
}

int cmd_train(const Options& o) {
  const RunConfig c = load_config(o);
  const PipelineArtifact a = fit_pipeline(load_input(o, c), c, parse_model_kind(o.model));
  save(a, o.out);
  std::cout << "trained " << model_display_name(a.model.kind) << " on " << a.chain.output_dim()
            << " features; artifact written to " << o.out << "\n";
  return 0;
}

int cmd_evaluate(const Options& o) {
  const PipelineArtifact a = load(o.artifact);
  const EvalReport r = evaluate(a, load_csv(o.input), o.threshold.value_or(a.threshold));
  if (o.format == "json")
    std::cout << report_json(r) << "\n";
  else
    std::cout << format_table({r});
  return 0;
}

int cmd_predict(const Options& o) {
  const PipelineArtifact a = load(o.artifact);
  std::vector<std::string> texts;
  if (o.from_stdin) {
    for (std::string line; std::getline(std::cin, line);)
      if (!line.empty()) texts.push_back(line);
  } else {
    texts.push_back(o.text);
  }
  const auto preds = predict_many(a, texts);
  for (std::size_t i = 0; i < preds.size(); ++i) {
    const auto& p = preds[i];
    if (o.format == "json") {
      std::cout << nlohmann::json{{"text", texts[i]},
                                  {"label", p.label},
                                  {"label_name", p.label_name},
                                  {"score", p.score},
                                  {"oov", p.oov}}
                       .dump()
                << "\n";
    } else {
      std::cout << p.label << '\t' << p.label_name << '\t' << p.score << (p.oov ? "\toov" : "") << '\t' << texts[i]
                << "\n";
    }
  }
  return 0;
}

int cmd_benchmark(const Options& o) {
  const RunConfig c = load_config(o);
  std::vector<ModelKind> kinds;
  if (o.models.empty()) {
    kinds = all_model_kinds();
  } else {
    std::stringstream ss(o.models);
    for (std::string id; std::getline(ss, id, ',');) kinds.push_back(parse_model_kind(id));
  }
  const BenchmarkResult result = benchmark(load_csv(o.input), c, kinds);
  const std::string json = benchmark_json(result);
  if (o.format == "json")
    std::cout << json << "\n";
  else
    std::cout << format_table(result.reports, result.failures);
  if (!o.out.empty()) {
    std::ofstream out(o.out, std::ios::binary);
    if (!out) throw DataError("cannot write " + o.out);
    out << json << "\n";
  }
  return result.reports.empty() ? kExitNumeric : 0;
}

// Random batch with a planted linear rule, for exercising the gradients.
void synthetic_batch(std::size_t n, std::size_t dim, std::uint64_t seed, SparseMatrix& x, std::vector<Label>& y) {
  Rng rng(seed);
  std::vector<double> w(dim);
  for (double& e : w) e = 2.0 * uniform01(rng) - 1.0;
  x = SparseMatrix(dim);
  y.clear();
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<std::pair<std::uint32_t, double>> row;
    double s = 0.0;
    for (std::size_t j = 0; j < dim; ++j) {
      const double v = 2.0 * uniform01(rng) - 1.0;
      row.emplace_back(static_cast<std::uint32_t>(j), v);
      s += v * w[j];
    }
    x.push_row(std::move(row));
    y.push_back(s >= 0.0 ? 1 : 0);
  }
}

int cmd_gradcheck(const Options& o) {
  std::size_t dim = o.dim, hidden = o.hidden;
  if (!o.artifact.empty()) {
    const PipelineArtifact a = load(o.artifact);
    dim = a.chain.output_dim();
    if (const auto* m = std::get_if<MlpModel>(&a.model.model)) hidden = m->params.hidden;
  }
  const std::uint64_t seed = o.seed.value_or(42);
  SparseMatrix x;
  std::vector<Label> y;
  synthetic_batch(o.samples, dim, seed, x, y);
  MlpParams params = init_params(dim, seed, hidden);
  if (o.epochs > 0) {
    MlpTrainConfig cfg;
    cfg.hidden = hidden;
    cfg.epochs = o.epochs;
    cfg.seed = seed;
    cfg.batch_size = static_cast<int>(std::min<std::size_t>(32, o.samples));
    params = train_mlp_from(std::move(params), x, y, cfg).params;
  }
  GradCheckOptions opts;
  opts.delta = o.delta;
  opts.seed = seed;
  const GradCheckReport r = gradient_check(params, x, y, opts);
  const bool pass = r.max_rel_error < o.tolerance;
  std::cout << "gradcheck " << (pass ? "PASS" : "FAIL") << ": input_dim=" << dim << " hidden=" << hidden
            << " max_rel_error=" << r.max_rel_error << " checked=" << r.checked
            << " skipped_kinks=" << r.skipped_kinks << "\n";
  return pass ? 0 : kExitNumeric;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Depression-screening text classification for Romanized Sinhala tweets"};
  app.require_subcommand(1);
  Options o;

  const auto add_format = [&](CLI::App* sub) {
    sub->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"table", "json"}));
  };
  const auto add_split_opts = [&](CLI::App* sub) {
    sub->add_option("--config", o.config, "JSON run configuration")->check(CLI::ExistingFile);
    sub->add_option("--seed", o.seed, "Random seed (overrides config)");
    sub->add_option("--ratio", o.ratio, "Training fraction (overrides config)");
  };

  auto* split_cmd = app.add_subcommand("split", "Split a labeled CSV into train.csv and test.csv");
  split_cmd->add_option("--input", o.input, "Labeled CSV (text,label)")->required()->check(CLI::ExistingFile);
  split_cmd->add_option("--out", o.out, "Output directory")->required();
  split_cmd->add_flag("--no-stratify", o.no_stratify, "Plain random split");
  add_split_opts(split_cmd);

  auto* train_cmd = app.add_subcommand("train", "Fit the full pipeline and write an artifact");
  train_cmd->add_option("--input", o.input, "Training CSV")->required()->check(CLI::ExistingFile);
  train_cmd->add_option("--model", o.model, "Classifier")
      ->check(CLI::IsMember({"mnb", "gnb", "logreg", "svm", "tree", "forest", "nn"}));
  train_cmd->add_option("--out", o.out, "Artifact path")->required();
  add_split_opts(train_cmd);

  auto* eval_cmd = app.add_subcommand("evaluate", "Score an artifact on a labeled CSV");
  eval_cmd->add_option("--artifact", o.artifact, "Artifact file")->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--input", o.input, "Test CSV")->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--threshold", o.threshold, "Decision threshold for probabilistic models");
  add_format(eval_cmd);

  auto* predict_cmd = app.add_subcommand("predict", "Classify text with an artifact");
  predict_cmd->add_option("--artifact", o.artifact, "Artifact file")->required()->check(CLI::ExistingFile);
  auto* text_opt = predict_cmd->add_option("--text", o.text, "Text to classify");
  auto* stdin_opt = predict_cmd->add_flag("--stdin", o.from_stdin, "Read one text per line from stdin");
  text_opt->excludes(stdin_opt);
  add_format(predict_cmd);

  auto* bench_cmd = app.add_subcommand("benchmark", "Compare classifiers on one shared split");
  bench_cmd->add_option("--input", o.input, "Labeled CSV")->required()->check(CLI::ExistingFile);
  bench_cmd->add_option("--models", o.models, "Comma-separated subset (default: all)");
  bench_cmd->add_option("--out", o.out, "Also write the JSON reports here");
  add_split_opts(bench_cmd);
  add_format(bench_cmd);

  auto* grad_cmd = app.add_subcommand("gradcheck", "Verify MLP gradients by central differences");
  grad_cmd->add_option("--artifact", o.artifact, "Size the network like this artifact")->check(CLI::ExistingFile);
  grad_cmd->add_option("--dim", o.dim, "Input width when no artifact is given");
  grad_cmd->add_option("--hidden", o.hidden, "Hidden units");
  grad_cmd->add_option("--samples", o.samples, "Batch size");
  grad_cmd->add_option("--epochs", o.epochs, "Train this many epochs before checking");
  grad_cmd->add_option("--delta", o.delta, "Finite-difference step");
  grad_cmd->add_option("--tolerance", o.tolerance, "Maximum relative error");
  grad_cmd->add_option("--seed", o.seed, "Random seed");

  auto* config_cmd = app.add_subcommand("config", "Print the default configuration");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*split_cmd) return cmd_split(o);
    if (*train_cmd) return cmd_train(o);
    if (*eval_cmd) return cmd_evaluate(o);
    if (*predict_cmd) {
      if (!o.from_stdin && text_opt->count() == 0) throw UsageError("predict needs --text or --stdin");
      return cmd_predict(o);
    }
    if (*bench_cmd) return cmd_benchmark(o);
    if (*grad_cmd) return cmd_gradcheck(o);
    if (*config_cmd) {
      std::cout << RunConfig{}.dump() << "\n";
      return 0;
    }
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const NumericError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}
