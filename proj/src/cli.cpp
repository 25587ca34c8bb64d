#include "satira/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "satira/checksum.hpp"
#include "satira/corpus.hpp"
#include "satira/error.hpp"
#include "satira/eval.hpp"
#include "satira/pipeline.hpp"
#include "satira/preprocess.hpp"
#include "satira/stats.hpp"
#include "satira/stylometrics.hpp"

namespace satira::cli {

namespace {

namespace fs = std::filesystem;

struct Options {
  std::string corpus;
  bool segmented = false;
  std::string model = "nb";
  std::string weighting = "count";
  std::string analyzer = "word";
  std::vector<int> ngram{1, 1};
  std::size_t max_features = 1500;
  double max_df = 0.7;
  std::uint64_t seed = 42;
  unsigned threads = 1;
  std::string out = ".";

  double test_fraction = 0.2;
  bool unstratified = false;

  // clean / boilerplate
  std::vector<std::string> stop_phrases;
  bool keep_diacritics = false;
  bool keep_latin = false;
  bool keep_special = false;
  double fraction = 0.1;

  // measure / ttest / plot-data
  std::string cliches;
  std::string emotions;
  std::string tagged;
  std::string measures;
  std::string column;
  std::string nan_policy = "omit";
  bool welch = false;
  std::size_t bins = 20;

  // models
  double alpha = 1.0;
  int rounds = 100;
  int max_depth = 3;
  double eta = 0.1;
  double lambda = 1.0;
  std::string embeddings;
  int embedding_dim = 300;
  int filters = 126;
  int kernel = 5;
  int max_len = 400;
  int epochs = 10;
  int batch_size = 10;
  double learning_rate = 1e-3;

  std::string model_dir;
  std::size_t k = 30;
};

// Canonical key=value dump of every option that can change an output. File
// locations are left out; the files themselves are fingerprinted separately.
std::string canonical(const Options& o, const std::string& command) {
  std::ostringstream s;
  s << "command=" << command << "\nsegmented=" << o.segmented
    << "\nmodel=" << o.model << "\nweighting=" << o.weighting << "\nanalyzer=" << o.analyzer
    << "\nngram=" << o.ngram[0] << ',' << o.ngram[1] << "\nmax_features=" << o.max_features
    << fmt::format("\nmax_df={:.17g}", o.max_df) << "\nseed=" << o.seed
    << fmt::format("\ntest_fraction={:.17g}", o.test_fraction) << "\nunstratified=" << o.unstratified
    << "\nkeep=" << o.keep_diacritics << o.keep_latin << o.keep_special
    << fmt::format("\nfraction={:.17g}", o.fraction) << "\ncolumn=" << o.column << "\nnan_policy=" << o.nan_policy
    << "\nwelch=" << o.welch << "\nbins=" << o.bins << fmt::format("\nalpha={:.17g}", o.alpha)
    << "\nrounds=" << o.rounds << "\nmax_depth=" << o.max_depth
    << fmt::format("\neta={:.17g}\nlambda={:.17g}", o.eta, o.lambda)
    << "\nembedding_dim=" << o.embedding_dim
    << "\nfilters=" << o.filters << "\nkernel=" << o.kernel << "\nmax_len=" << o.max_len
    << "\nepochs=" << o.epochs << "\nbatch_size=" << o.batch_size
    << fmt::format("\nlearning_rate={:.17g}", o.learning_rate) << "\nk=" << o.k << '\n';
  return s.str();
}

class Run {
 public:
  Run(const Options& o, std::string command) : o_(o), command_(std::move(command)) {
    config_hash_ = sha256_hex(canonical(o, command_)).substr(0, 16);
  }

  void add_checksum(const std::string& name, const std::string& sha) {
    checksums_.emplace_back(name, sha);
  }

  std::string header() const {
    std::string h = fmt::format("satira {} command={} config={} segmented={}", kVersion, command_,
                                config_hash_, o_.segmented ? 1 : 0);
    for (const auto& [name, sha] : checksums_) h += fmt::format(" {}_sha256={}", name, sha);
    return h;
  }

  fs::path out_dir() const { return fs::path(o_.out); }

  // Writes `# <header>` followed by the body.
  void write(const std::string& name, const std::function<void(std::ostream&)>& body) const {
    fs::create_directories(out_dir());
    const auto path = out_dir() / name;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write " + path.string());
    out << "# " << header() << '\n';
    body(out);
    if (!out) throw DataError("error writing " + path.string());
  }

 private:
  const Options& o_;
  std::string command_;
  std::string config_hash_;
  std::vector<std::pair<std::string, std::string>> checksums_;
};

NormalizationConfig normalization(const Options& o) {
  NormalizationConfig cfg;
  cfg.strip_diacritics = !o.keep_diacritics;
  cfg.strip_latin = !o.keep_latin;
  cfg.strip_special = !o.keep_special;
  return cfg;
}

LabeledCorpus require_corpus(const Options& o, Run& run) {
  if (o.corpus.empty()) throw CLI::RequiredError("--corpus");
  auto corpus = load_corpus(o.corpus, format_from_extension(o.corpus));
  run.add_checksum("corpus", sha256_file(o.corpus));
  return corpus;
}

TrainedClassifier require_model(const Options& o, Run& run) {
  const fs::path dir = o.model_dir.empty() ? fs::path(o.out) : fs::path(o.model_dir);
  auto clf = TrainedClassifier::load(dir);
  run.add_checksum("model", sha256_file(dir / "model.txt"));
  return clf;
}

SplitConfig split_config(const Options& o) {
  return SplitConfig{o.test_fraction, o.seed, !o.unstratified};
}

PipelineConfig pipeline_config(const Options& o) {
  PipelineConfig cfg;
  cfg.model = parse_model_kind(o.model);
  if (o.weighting != "count" && o.weighting != "tfidf")
    throw CLI::ValidationError("--weighting", "expected count or tfidf");
  if (o.analyzer != "word" && o.analyzer != "char")
    throw CLI::ValidationError("--analyzer", "expected word or char");
  cfg.vectorizer.weighting = o.weighting == "count" ? Weighting::Count : Weighting::TfIdf;
  cfg.vectorizer.analyzer = o.analyzer == "word" ? Analyzer::Word : Analyzer::Char;
  cfg.vectorizer.ngram_lo = o.ngram[0];
  cfg.vectorizer.ngram_hi = o.ngram[1];
  cfg.vectorizer.max_features = o.max_features;
  cfg.vectorizer.max_df = o.max_df;
  cfg.vectorizer.validate();
  cfg.nb_alpha = o.alpha;
  cfg.boosting = BoostingConfig{o.rounds, o.max_depth, o.eta, o.lambda, o.threads};
  cfg.convnet = ConvNetConfig{o.filters, o.kernel, o.max_len};
  cfg.training.epochs = o.epochs;
  cfg.training.batch_size = o.batch_size;
  cfg.training.adam.learning_rate = o.learning_rate;
  cfg.training.seed = o.seed;
  if (!o.embeddings.empty()) cfg.embeddings = fs::absolute(o.embeddings);
  cfg.embedding_dim = o.embedding_dim;
  cfg.seed = o.seed;
  cfg.split = split_config(o);
  cfg.segmented = o.segmented;
  return cfg;
}

// --- subcommands -----------------------------------------------------------

int cmd_clean(const Options& o) {
  Run run(o, "clean");
  const auto corpus = require_corpus(o, run);
  const auto norm = normalization(o);
  std::vector<std::string> phrases;
  for (const auto& path : o.stop_phrases) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open stop-phrase file " + path);
    for (auto& p : read_phrase_lines(in, path, norm))
      if (std::find(phrases.begin(), phrases.end(), p) == phrases.end()) phrases.push_back(std::move(p));
    run.add_checksum(fs::path(path).stem().string(), sha256_file(path));
  }
  const StopPhraseList list(std::move(phrases));
  const PhraseMatcher matcher(list.phrases());

  std::vector<Document> cleaned;
  cleaned.reserve(corpus.size());
  std::size_t removed = 0;
  for (const auto& doc : corpus) {
    auto normalized = normalize_document(doc, norm);
    auto stripped = apply_stop_phrases(normalized, matcher);
    removed += normalized.tokens.size() - stripped.tokens.size();
    cleaned.push_back(std::move(stripped));
  }
  run.write("cleaned.jsonl", [&](std::ostream& out) { write_jsonl(out, LabeledCorpus(cleaned)); });
  std::cout << fmt::format("cleaned {} documents; {} stop-phrase tokens removed; wrote {}\n",
                           cleaned.size(), removed, (run.out_dir() / "cleaned.jsonl").string());
  return 0;
}

int cmd_boilerplate(const Options& o) {
  Run run(o, "boilerplate");
  const auto corpus = require_corpus(o, run);
  const auto norm = normalization(o);
  std::map<std::string, std::vector<Document>> groups;
  for (const auto& doc : corpus)
    groups[doc.label ? std::string(to_string(*doc.label)) : "unlabeled"].push_back(
        normalize_document(doc, norm));
  for (const auto& [group, docs] : groups) {
    for (int n = 1; n <= 3; ++n) {
      const auto freq = ngram_frequency(docs, n);
      const auto all = top_fraction(freq, 1.0);
      const auto top = top_fraction(freq, o.fraction);
      run.write(fmt::format("ngrams_{}_{}.tsv", group, n), [&](std::ostream& out) {
        out << "ngram\tcount\n";
        write_ngram_tsv(out, all);
      });
      run.write(fmt::format("candidates_{}_{}.tsv", group, n), [&](std::ostream& out) {
        out << "ngram\tcount\n";
        write_ngram_tsv(out, top);
      });
      std::cout << fmt::format("{} {}-grams: {} distinct, {} candidates\n", group, n,
                               freq.counts.size(), top.size());
    }
  }
  return 0;
}

int cmd_measure(const Options& o) {
  Run run(o, "measure");
  if (o.cliches.empty()) throw CLI::RequiredError("--cliches");
  if (o.emotions.empty()) throw CLI::RequiredError("--emotions");
  const auto corpus = require_corpus(o, run);
  const auto norm = normalization(o);
  const auto cliches = load_lexicon(o.cliches, norm);
  const auto emotions = load_lexicon(o.emotions, norm);
  run.add_checksum("cliches", cliches.checksum());
  run.add_checksum("emotions", emotions.checksum());
  std::vector<TaggedDocument> tagged;
  if (!o.tagged.empty()) {
    tagged = load_tagged(o.tagged);
    run.add_checksum("tagged", sha256_file(o.tagged));
  }
  const auto profile = corpus_profile(corpus, cliches, emotions, o.tagged.empty() ? nullptr : &tagged);
  run.write("measures.csv", [&](std::ostream& out) { write_profile_csv(out, profile); });
  std::cout << fmt::format("measured {} fake and {} real documents; wrote {}\n",
                           profile.fake.size(), profile.real.size(),
                           (run.out_dir() / "measures.csv").string());
  return 0;
}

MeasureColumns read_column(const Options& o, const std::string& column) {
  if (o.measures.empty()) throw CLI::RequiredError("--measures");
  std::ifstream in(o.measures);
  if (!in) throw DataError("cannot open measures file " + o.measures);
  return read_profile_column(in, column, o.measures);
}

std::vector<std::string> measure_columns(const Options& o) {
  if (!o.column.empty()) return {o.column};
  return {"J", "S", "fpp_ratio"};
}

std::size_t finite_count(const std::vector<double>& xs) {
  return static_cast<std::size_t>(std::count_if(xs.begin(), xs.end(), [](double x) { return std::isfinite(x); }));
}

int cmd_ttest(const Options& o) {
  Run run(o, "ttest");
  if (o.nan_policy != "omit" && o.nan_policy != "propagate")
    throw CLI::ValidationError("--nan-policy", "expected omit or propagate");
  const auto policy = o.nan_policy == "omit" ? NanPolicy::Omit : NanPolicy::Propagate;
  const auto variant = o.welch ? TTestVariant::Welch : TTestVariant::Pooled;
  std::ostringstream report;
  for (const auto& column : measure_columns(o)) {
    const auto cols = read_column(o, column);
    const auto& fake = cols.values[index_of(Label::Fake)];
    const auto& real = cols.values[index_of(Label::Real)];
    if (o.column.empty() && (finite_count(fake) < 2 || finite_count(real) < 2)) {
      report << fmt::format("measure {} skipped: fewer than 2 defined values per class\n", column);
      continue;
    }
    const auto r = ttest_two_tailed(fake, real, variant, policy);
    report << fmt::format(
        "measure {} statistic {:.17g} p_value {:.17g} df {:.17g} n_fake {} n_real {} variant {} "
        "nan_policy {}\n",
        column, r.statistic, r.p_value, r.df, r.n_a, r.n_b, o.welch ? "welch" : "pooled",
        o.nan_policy);
  }
  std::cout << report.str();
  run.add_checksum("measures", sha256_file(o.measures));
  run.write("ttest.txt", [&](std::ostream& out) { out << report.str(); });
  return 0;
}

int cmd_plot_data(const Options& o) {
  Run run(o, "plot-data");
  if (o.measures.empty()) throw CLI::RequiredError("--measures");
  run.add_checksum("measures", sha256_file(o.measures));
  for (const auto& column : measure_columns(o)) {
    const auto cols = read_column(o, column);
    for (Label label : kLabels) {
      const auto& values = cols.values[index_of(label)];
      if (finite_count(values) == 0) {
        spdlog::warn("no defined {} values for class {}; skipping", column, to_string(label));
        continue;
      }
      const auto density = density_histogram(values, o.bins);
      const auto name = fmt::format("density_{}_{}.csv", column, to_string(label));
      run.write(name, [&](std::ostream& out) { write_density_csv(out, density); });
      std::cout << "wrote " << (run.out_dir() / name).string() << '\n';
    }
  }
  return 0;
}

int cmd_train(const Options& o) {
  Run run(o, "train");
  const auto cfg = pipeline_config(o);
  const auto corpus = require_corpus(o, run);
  if (!o.embeddings.empty() && cfg.model == ModelKind::ConvNet)
    run.add_checksum("embeddings", sha256_file(o.embeddings));
  const auto parts = split(corpus, cfg.split);
  const auto clf = train_classifier(parts.train.documents(), cfg);
  clf.save(run.out_dir(), run.header());
  if (!clf.training_loss().empty()) {
    run.write("training_loss.tsv", [&](std::ostream& out) {
      out << (cfg.model == ModelKind::ConvNet ? "epoch" : "round") << "\tloss\n";
      const std::size_t first = cfg.model == ModelKind::ConvNet ? 1 : 0;
      for (std::size_t i = 0; i < clf.training_loss().size(); ++i)
        out << fmt::format("{}\t{:.17g}\n", i + first, clf.training_loss()[i]);
    });
  }
  const auto fitted = clf.predict(parts.train.documents());
  const auto train_report = evaluate(fitted.labels, labels_of(parts.train));
  std::cout << fmt::format("trained {} on {} documents ({} held out); training accuracy {:.6f}\n",
                           to_string(cfg.model), parts.train.size(), parts.test.size(),
                           train_report.accuracy);
  if (cfg.model == ModelKind::ConvNet)
    std::cout << fmt::format("embedding coverage {:.6f}\n", clf.embedding_coverage());
  std::cout << "model written to " << run.out_dir().string() << '\n';
  return 0;
}

int cmd_evaluate(const Options& o) {
  Run run(o, "evaluate");
  const auto clf = require_model(o, run);
  const auto corpus = require_corpus(o, run);
  const auto parts = split(corpus, clf.config().split);
  const auto pred = clf.predict(parts.test.documents());
  const auto report = evaluate(pred.labels, labels_of(parts.test));
  run.write("eval_report.txt", [&](std::ostream& out) {
    out << "model " << to_string(clf.kind()) << '\n';
    write_report_text(out, report);
  });
  // JSON has no comment syntax; the header goes into a sibling field instead.
  fs::create_directories(run.out_dir());
  std::ofstream json(run.out_dir() / "eval_report.json", std::ios::binary);
  if (!json) throw DataError("cannot write eval_report.json");
  {
    std::ostringstream body;
    write_report_json(body, report);
    auto text = body.str();
    text.insert(1, fmt::format("\n  \"meta\": \"{}\",\n  \"model\": \"{}\",", run.header(), to_string(clf.kind())));
    json << text;
  }
  std::cout << fmt::format(
      "model {} test documents {} accuracy {:.6f} macro_precision {:.6f} macro_recall {:.6f} "
      "macro_f1 {:.6f}\n",
      to_string(clf.kind()), report.n, report.accuracy, report.macro_precision, report.macro_recall,
      report.macro_f1);
  return 0;
}

int cmd_features(const Options& o) {
  Run run(o, "features");
  const auto clf = require_model(o, run);
  if (!clf.naive_bayes()) throw DataError("feature rankings need a naive Bayes model");
  const auto [fake, real] = top_informative_features(*clf.naive_bayes(), *clf.vocabulary(), o.k);
  for (const auto* ranking : {&fake, &real}) {
    const auto name = fmt::format("features_{}.tsv", to_string(ranking->label));
    run.write(name, [&](std::ostream& out) {
      out << "rank\tfeature\tscore\tlog_prob\n";
      write_ranking_tsv(out, *ranking);
    });
    std::cout << "wrote " << (run.out_dir() / name).string() << '\n';
  }
  return 0;
}

int cmd_predict(const Options& o) {
  Run run(o, "predict");
  const auto clf = require_model(o, run);
  const auto corpus = require_corpus(o, run);
  const auto pred = clf.predict(corpus.documents());
  run.write("predictions.tsv", [&](std::ostream& out) {
    out << "id\tlabel\tfake_probability\n";
    for (std::size_t i = 0; i < corpus.size(); ++i)
      out << fmt::format("{}\t{}\t{:.17g}\n", corpus[i].id, to_string(pred.labels[i]),
                         pred.fake_probability[i]);
  });
  std::cout << fmt::format("labelled {} documents; wrote {}\n", corpus.size(),
                           (run.out_dir() / "predictions.tsv").string());
  return 0;
}

void setup_logging() {
  auto logger = spdlog::get("satira");
  if (!logger) {
    logger = spdlog::stderr_color_mt("satira");
    spdlog::set_default_logger(logger);
  }
  spdlog::set_level(spdlog::level::warn);
  if (const char* level = std::getenv("SATIRA_LOG"))
    spdlog::set_level(spdlog::level::from_str(level));
}

}  // namespace

int run(int argc, const char* const* argv) {
  setup_logging();
  Options o;
  CLI::App app{"Satirical fake news detection toolkit", "satira"};
  app.set_version_flag("--version", kVersion);
  app.set_config("--config", "", "INI/TOML config file; command-line flags take precedence");
  app.require_subcommand(1);

  app.add_option("--corpus", o.corpus, "Corpus file (.jsonl or .csv)");
  app.add_flag("--segmented", o.segmented, "Corpus was pre-segmented (recorded in metadata)");
  app.add_option("--model", o.model, "Classifier")->check(CLI::IsMember({"nb", "gbt", "cnn"}));
  app.add_option("--weighting", o.weighting, "Feature weighting")->check(CLI::IsMember({"count", "tfidf"}));
  app.add_option("--analyzer", o.analyzer, "Feature analyzer")->check(CLI::IsMember({"word", "char"}));
  app.add_option("--ngram", o.ngram, "N-gram range LO,HI")->delimiter(',')->expected(2);
  app.add_option("--max-features", o.max_features, "Vocabulary cap")->check(CLI::PositiveNumber);
  app.add_option("--max-df", o.max_df, "Maximum document-frequency proportion")->check(CLI::Range(0.0, 1.0));
  app.add_option("--seed", o.seed, "Top-level random seed");
  app.add_option("--threads", o.threads, "Worker threads (never changes results)")->check(CLI::PositiveNumber);
  app.add_option("--out", o.out, "Output directory");
  app.add_option("--test-fraction", o.test_fraction, "Held-out fraction")->check(CLI::Range(0.0, 1.0));
  app.add_flag("--unstratified", o.unstratified, "Split without stratifying by class");
  app.add_option("--model-dir", o.model_dir, "Directory of a trained model (default: --out)");
  app.add_flag("--keep-diacritics", o.keep_diacritics)->group("Normalization");
  app.add_flag("--keep-latin", o.keep_latin)->group("Normalization");
  app.add_flag("--keep-special", o.keep_special)->group("Normalization");
  app.add_option("--stop-phrases", o.stop_phrases, "Stop-phrase list file(s)");
  app.add_option("--fraction", o.fraction, "Top fraction of n-gram dictionaries")->check(CLI::Range(0.0, 1.0));
  app.add_option("--cliches", o.cliches, "Journalistic cliche lexicon");
  app.add_option("--emotions", o.emotions, "Emotion lexicon");
  app.add_option("--tagged", o.tagged, "POS-tagged corpus (surface<TAB>pos)");
  app.add_option("--measures", o.measures, "Measures CSV written by 'measure'");
  app.add_option("--column", o.column, "Single measure column (J, S or fpp_ratio)");
  app.add_option("--nan-policy", o.nan_policy, "t-test NaN handling")->check(CLI::IsMember({"omit", "propagate"}));
  app.add_flag("--welch", o.welch, "Unequal-variance t-test");
  app.add_option("--bins", o.bins, "Histogram bins")->check(CLI::PositiveNumber);
  app.add_option("--alpha", o.alpha, "Naive Bayes smoothing");
  app.add_option("--rounds", o.rounds, "Boosting rounds");
  app.add_option("--max-depth", o.max_depth, "Tree depth");
  app.add_option("--eta", o.eta, "Boosting learning rate");
  app.add_option("--lambda", o.lambda, "Leaf L2 penalty");
  app.add_option("--embeddings", o.embeddings, "Word-vector text file");
  app.add_option("--embedding-dim", o.embedding_dim, "Expected embedding dimension");
  app.add_option("--filters", o.filters, "Convolution filters");
  app.add_option("--kernel", o.kernel, "Convolution kernel width");
  app.add_option("--max-len", o.max_len, "Token sequence length");
  app.add_option("--epochs", o.epochs, "Training epochs");
  app.add_option("--batch-size", o.batch_size, "Mini-batch size");
  app.add_option("--learning-rate", o.learning_rate, "Adam learning rate");
  app.add_option("--k", o.k, "Features per class")->check(CLI::PositiveNumber);

  const std::map<std::string, std::pair<std::string, int (*)(const Options&)>> commands{
      {"clean", {"Normalize text and remove stop phrases", cmd_clean}},
      {"boilerplate", {"N-gram dictionaries and top-fraction boilerplate candidates", cmd_boilerplate}},
      {"measure", {"Per-document register, sentiment and first-person-plural measures", cmd_measure}},
      {"ttest", {"Two-tailed t-tests on measure columns", cmd_ttest}},
      {"train", {"Fit a classifier on the training split", cmd_train}},
      {"evaluate", {"Score a trained model on the held-out split", cmd_evaluate}},
      {"features", {"Most informative naive Bayes features per class", cmd_features}},
      {"predict", {"Label a corpus with a trained model", cmd_predict}},
      {"plot-data", {"Density histograms of measure columns", cmd_plot_data}},
  };
  std::map<std::string, CLI::App*> subs;
  for (const auto& [name, entry] : commands) {
    auto* sub = app.add_subcommand(name, entry.first);
    sub->fallthrough();
    subs[name] = sub;
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    for (const auto& [name, sub] : subs)
      if (sub->parsed()) return commands.at(name).second(o);
  } catch (const CLI::Error& e) {
    std::cerr << "satira: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "satira: error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}

}  // namespace satira::cli
