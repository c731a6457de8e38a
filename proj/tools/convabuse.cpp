// convabuse: command-line driver for corpora, features, training, evaluation,
// feature elimination and scoring.

#include <openssl/evp.h>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "convabuse/bundle.hpp"
#include "convabuse/content.hpp"
#include "convabuse/corpus.hpp"
#include "convabuse/error.hpp"
#include "convabuse/eval.hpp"
#include "convabuse/featurize.hpp"
#include "convabuse/fusion.hpp"
#include "convabuse/rng.hpp"
#include "convabuse/select.hpp"
#include "convabuse/synth.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using namespace convabuse;
using nlohmann::json;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;

/// A missing or unreadable input file.
struct InputError : Error {
  using Error::Error;
};

struct RunConfig {
  std::string corpus;
  std::string lexicon;
  std::string features;  // precomputed graph features (featurize output)
  std::string model;
  std::string out = ".";
  std::string kind = "late";
  std::string graphs = "BAF";
  std::size_t before = kDefaultContextBefore;
  std::size_t after = kDefaultContextAfter;
  int window = kDefaultWindowLength;
  double C = 1.0;
  double damping = 0.85;
  std::uint64_t seed = 42;
  std::size_t repetitions = eval::kRepetitions;
  std::size_t inner_folds = 5;
  bool in_sample = false;
  double threshold = 0.97;
  std::size_t threads = 0;
  std::vector<std::string> messages;
  // synth
  std::size_t synth_threads = 400;
  std::size_t pile_on = 5;
  double badword_rate = 0.5;
  double caps_rate = 0.3;
};

std::string git_blob_sha1(const std::string& content) {
  std::string data = "blob " + std::to_string(content.size());
  data.push_back('\0');
  data += content;
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha1(), nullptr) != 1) throw Error("SHA-1 failed");
  std::string hex;
  char buf[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(buf, sizeof buf, "%02x", md[i]);
    hex += buf;
  }
  return hex;
}

std::string read_file(const std::string& path) {
  if (!fs::is_regular_file(path)) throw InputError("cannot read " + path + ": no such file");
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read " + path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  out << content;
  if (!out) throw Error("cannot write " + path.string());
}

std::string require(const std::string& value, const char* flag) {
  if (value.empty()) throw ConfigError(std::string("missing --") + flag);
  return value;
}

Corpus load_corpus(const std::string& path) {
  std::istringstream in(read_file(require(path, "corpus")));
  try {
    return parse_corpus(in);
  } catch (const ParseError& e) {
    throw ParseError(e.line(), path + ": " + e.what());
  }
}

content::BadWordLexicon load_lexicon(const RunConfig& rc) {
  const auto path = require(rc.lexicon, "lexicon");
  read_file(path);  // existence check with a path-naming message
  return content::BadWordLexicon::load(path);
}

ContextParams context_params(const RunConfig& rc) {
  ContextParams p;
  p.before = rc.before;
  p.after = rc.after;
  p.window_len = rc.window;
  p.graphs.before = rc.graphs.find('B') != std::string::npos;
  p.graphs.after = rc.graphs.find('A') != std::string::npos;
  p.graphs.full = rc.graphs.find('F') != std::string::npos;
  p.graphs.damping = rc.damping;
  return p;
}

void validate(const RunConfig& rc) {
  if (!(rc.C > 0.0)) throw ConfigError("--C must be positive");
  if (!(rc.damping > 0.0 && rc.damping < 1.0)) throw ConfigError("--damping must lie in (0, 1)");
  if (rc.window < 2) throw ConfigError("--window must be at least 2");
  if (rc.graphs.empty() || rc.graphs.find_first_not_of("BAF") != std::string::npos) {
    throw ConfigError("--graphs takes a non-empty combination of B, A, F");
  }
  if (rc.repetitions < 1) throw ConfigError("--repetitions must be at least 1");
  if (rc.inner_folds < 2) throw ConfigError("--inner-folds must be at least 2");
  if (!(rc.threshold > 0.0 && rc.threshold <= 1.0)) throw ConfigError("--threshold must lie in (0, 1]");
}

fusion::PipelineConfig pipeline_config(const RunConfig& rc) {
  fusion::PipelineConfig cfg;
  cfg.C = rc.C;
  cfg.inner_folds = rc.inner_folds;
  cfg.cross_fit = !rc.in_sample;
  cfg.seed = Rng::derive(rc.seed, 3);
  cfg.context = context_params(rc);
  return cfg;
}

std::size_t thread_count(const RunConfig& rc) { return rc.threads > 0 ? rc.threads : default_thread_count(); }

/// Reproduction record: every parameter plus git blob hashes of the inputs.
json config_echo(const std::string& command, const RunConfig& rc) {
  json inputs = json::object();
  for (const auto& [name, path] : {std::pair{"corpus", rc.corpus}, std::pair{"lexicon", rc.lexicon},
                                   std::pair{"features", rc.features}, std::pair{"model", rc.model}}) {
    if (!path.empty() && fs::is_regular_file(path)) {
      inputs[name] = {{"path", path}, {"sha1", git_blob_sha1(read_file(path))}};
    }
  }
  return {{"command", command},
          {"kind", rc.kind},
          {"seed", rc.seed},
          {"C", rc.C},
          {"damping", rc.damping},
          {"before", rc.before},
          {"after", rc.after},
          {"window", rc.window},
          {"graphs", rc.graphs},
          {"repetitions", rc.repetitions},
          {"inner_folds", rc.inner_folds},
          {"in_sample", rc.in_sample},
          {"threshold", rc.threshold},
          {"inputs", inputs}};
}

eval::Experiment experiment(const RunConfig& rc, const Corpus& corpus) {
  const auto params = context_params(rc);
  if (rc.features.empty()) return eval::prepare_experiment(corpus, rc.seed, params, thread_count(rc));
  std::istringstream in(read_file(rc.features));
  eval::Experiment e;
  e.graph_features = read_feature_csv(in);
  if (e.graph_features.names != graph_feature_manifest(params.graphs)) {
    throw VersionError(rc.features + ": columns do not match the graph feature manifest");
  }
  e.dataset = build_balanced_dataset(corpus, eval::dataset_seed(rc.seed));
  e.examples = fusion::make_examples(corpus, e.dataset.items, e.graph_features, &e.skipped);
  return e;
}

std::vector<Label> labels_of(const std::vector<fusion::Example>& examples) {
  std::vector<Label> out;
  for (const auto& e : examples) out.push_back(e.label);
  return out;
}

// --- subcommands -----------------------------------------------------------

int cmd_ingest(const RunConfig& rc) {
  const Corpus corpus = load_corpus(rc.corpus);
  const auto s = corpus.stats();
  std::ostringstream out;
  write_corpus(out, corpus);
  write_file(fs::path(rc.out) / "corpus.jsonl", out.str());
  const json stats{{"messages", s.messages},   {"threads", s.threads},    {"abuse", s.abuse},
                   {"non_abuse", s.non_abuse}, {"unlabeled", s.unlabeled}};
  write_file(fs::path(rc.out) / "stats.json", stats.dump(2) + "\n");
  std::cout << stats.dump() << "\n";
  return 0;
}

int cmd_synth(const RunConfig& rc) {
  SynthParams p;
  p.n_threads = rc.synth_threads;
  p.pile_on_size = rc.pile_on;
  p.badword_injection_rate = rc.badword_rate;
  p.caps_rate = rc.caps_rate;
  p.seed = rc.seed;
  const Corpus corpus = generate_synthetic(p);
  std::ostringstream out;
  write_corpus(out, corpus);
  write_file(fs::path(rc.out) / "corpus.jsonl", out.str());
  std::string lex;
  for (const auto& w : synthetic_lexicon()) lex += w + "\n";
  write_file(fs::path(rc.out) / "lexicon.txt", lex);
  const auto s = corpus.stats();
  std::cout << "wrote " << s.messages << " messages in " << s.threads << " threads (" << s.abuse << " abuse) to "
            << rc.out << "\n";
  return 0;
}

int cmd_featurize(const RunConfig& rc) {
  const Corpus corpus = load_corpus(rc.corpus);
  const auto dataset = build_balanced_dataset(corpus, eval::dataset_seed(rc.seed));
  const auto table = featurize_graphs(corpus, dataset.items, context_params(rc), thread_count(rc));
  std::ostringstream out;
  write_feature_csv(out, table);
  write_file(fs::path(rc.out) / "graph_features.csv", out.str());
  write_file(fs::path(rc.out) / "config.json", config_echo("featurize", rc).dump(2) + "\n");
  return 0;
}

int cmd_train(const RunConfig& rc) {
  const auto kind = fusion::parse_pipeline_kind(rc.kind);
  const Corpus corpus = load_corpus(rc.corpus);
  const auto lexicon = kind == fusion::PipelineKind::kGraph && rc.lexicon.empty() ? content::BadWordLexicon{}
                                                                                   : load_lexicon(rc);
  const auto e = experiment(rc, corpus);
  const auto pipeline = fusion::train_pipeline(kind, e.examples, lexicon, pipeline_config(rc));
  write_file(fs::path(rc.out) / "model.json", dump_bundle(pipeline) + "\n");
  write_file(fs::path(rc.out) / "config.json", config_echo("train", rc).dump(2) + "\n");
  return 0;
}

int cmd_eval(const RunConfig& rc) {
  const auto kind = fusion::parse_pipeline_kind(rc.kind);
  const Corpus corpus = load_corpus(rc.corpus);
  const auto lexicon = kind == fusion::PipelineKind::kGraph && rc.lexicon.empty() ? content::BadWordLexicon{}
                                                                                   : load_lexicon(rc);
  const auto t0 = std::chrono::steady_clock::now();
  const auto e = experiment(rc, corpus);
  const auto t1 = std::chrono::steady_clock::now();
  const auto plan = eval::make_splits(labels_of(e.examples), eval::split_seed(rc.seed), rc.repetitions);
  const auto report = eval::evaluate(kind, e.examples, lexicon, plan, pipeline_config(rc), thread_count(rc));

  const auto echo = config_echo("eval", rc);
  json doc{{"config", echo}, {"report", eval::report_to_json(report)}};
  doc["report"]["dataset_size"] = e.examples.size();
  doc["report"]["skipped"] = e.skipped;
  write_file(fs::path(rc.out) / "report.json", doc.dump(2) + "\n");
  auto runtime = eval::runtime_to_json(report);
  runtime["featurize_seconds"] = std::chrono::duration<double>(t1 - t0).count();
  runtime["threads"] = thread_count(rc);
  write_file(fs::path(rc.out) / "runtime.json", runtime.dump(2) + "\n");
  write_file(fs::path(rc.out) / "config.json", echo.dump(2) + "\n");

  char line[160];
  std::snprintf(line, sizeof line, "%s: P %.4f R %.4f F %.4f (std %.4f) over %zu repetitions\n", rc.kind.c_str(),
                report.precision.mean, report.recall.mean, report.f_measure.mean, report.f_measure.std,
                report.repetitions.size());
  std::cout << line;
  return 0;
}

json top_features_json(const std::string& kind, double threshold, double full_f, const select::TopFeatures& tf) {
  return {{"kind", kind},
          {"threshold", threshold},
          {"full_f_measure", full_f},
          {"f_measure", tf.f_measure},
          {"qualified", tf.qualified},
          {"features", tf.names}};
}

struct RfeResult {
  double full_f = 0.0;
  select::TopFeatures top;
};

RfeResult run_rfe(fusion::PipelineKind kind, const RunConfig& rc, const eval::Experiment& e,
                  const content::BadWordLexicon& lexicon, const std::string& suffix) {
  const auto plan = eval::make_splits(labels_of(e.examples), eval::split_seed(rc.seed), rc.repetitions);
  const auto data = select::selection_data(kind, e.examples, lexicon, plan, pipeline_config(rc));
  const auto trace = select::rfe(data, rc.C);
  std::ostringstream csv;
  select::write_trace_csv(csv, trace);
  write_file(fs::path(rc.out) / ("trace" + suffix + ".csv"), csv.str());
  return {trace.full_f, select::top_features(trace, trace.full_f, rc.threshold)};
}

int cmd_rfe(const RunConfig& rc) {
  const auto kind = fusion::parse_pipeline_kind(rc.kind);
  const Corpus corpus = load_corpus(rc.corpus);
  const auto lexicon = kind == fusion::PipelineKind::kGraph && rc.lexicon.empty() ? content::BadWordLexicon{}
                                                                                   : load_lexicon(rc);
  const auto e = experiment(rc, corpus);
  json doc;
  if (kind == fusion::PipelineKind::kLate) {
    // two inputs: the union of the bases' sets
    const auto c = run_rfe(fusion::PipelineKind::kContent, rc, e, lexicon, "_content");
    const auto g = run_rfe(fusion::PipelineKind::kGraph, rc, e, lexicon, "_graph");
    doc = {{"kind", rc.kind},
           {"threshold", rc.threshold},
           {"content", top_features_json("content", rc.threshold, c.full_f, c.top)},
           {"graph", top_features_json("graph", rc.threshold, g.full_f, g.top)},
           {"features", select::late_top_features(c.top.names, g.top.names)}};
  } else {
    const auto r = run_rfe(kind, rc, e, lexicon, "");
    doc = top_features_json(rc.kind, rc.threshold, r.full_f, r.top);
  }
  write_file(fs::path(rc.out) / "top_features.json", doc.dump(2) + "\n");
  write_file(fs::path(rc.out) / "config.json", config_echo("rfe", rc).dump(2) + "\n");
  std::cout << doc["features"].size() << " top features\n";
  return 0;
}

int cmd_score(const RunConfig& rc) {
  const auto path = require(rc.model, "model");
  read_file(path);
  const auto pipeline = load_bundle(path);
  const Corpus corpus = load_corpus(rc.corpus);
  std::vector<std::string> ids = rc.messages;
  if (ids.empty()) {
    for (const auto& t : corpus.threads()) {
      for (const auto& m : t.messages) {
        if (m.label != Label::kUnlabeled) ids.push_back(m.message_id);
      }
    }
  }
  for (const auto& id : ids) {
    const auto s = fusion::score_message(pipeline, corpus, id);
    json line{{"message_id", id}, {"probability", s.probability}, {"label", to_string(s.label)}};
    if (s.content_probability) line["content_probability"] = *s.content_probability;
    if (s.graph_probability) line["graph_probability"] = *s.graph_probability;
    std::cout << line.dump() << "\n";
  }
  return 0;
}

int cmd_manifest(const RunConfig& rc) {
  fusion::TrainedPipeline p;
  p.kind = fusion::parse_pipeline_kind(rc.kind);
  p.content_manifest = content::content_manifest();
  p.graph_manifest = graph_feature_manifest(context_params(rc).graphs);
  for (const auto& name : p.design_names()) std::cout << name << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Abuse detection from conversational graphs and message content"};
  app.set_config("--config", "", "TOML file with option values; command-line flags take precedence");
  app.require_subcommand(1, 1);
  app.fallthrough();

  RunConfig rc;
  app.add_option("--corpus", rc.corpus, "Corpus JSONL");
  app.add_option("--lexicon", rc.lexicon, "Bad-word lexicon, one entry per line");
  app.add_option("--features", rc.features, "Graph features CSV written by featurize (skips featurization)");
  app.add_option("--model", rc.model, "Trained pipeline bundle");
  app.add_option("--out", rc.out, "Output directory")->capture_default_str();
  app.add_option("--kind", rc.kind, "content | graph | early | late | hybrid")
      ->check(CLI::IsMember({"content", "graph", "early", "late", "hybrid"}))
      ->capture_default_str();
  app.add_option("--graphs", rc.graphs, "Graphs to featurize: any of B, A, F")->capture_default_str();
  app.add_option("--before", rc.before, "Context messages before the target")->capture_default_str();
  app.add_option("--after", rc.after, "Context messages after the target")->capture_default_str();
  app.add_option("--window", rc.window, "Sliding window length")->capture_default_str();
  app.add_option("--C", rc.C, "SVM regularization")->capture_default_str();
  app.add_option("--damping", rc.damping, "PageRank damping")->capture_default_str();
  app.add_option("--seed", rc.seed, "Master seed")->capture_default_str();
  app.add_option("--repetitions", rc.repetitions, "Train/test splits")->capture_default_str();
  app.add_option("--inner-folds", rc.inner_folds, "Folds for out-of-fold scores")->capture_default_str();
  app.add_flag("--in-sample", rc.in_sample, "Fit calibrators and fusion inputs in-sample (ablation)");
  app.add_option("--threshold", rc.threshold, "Top Features retention threshold")->capture_default_str();
  app.add_option("--threads", rc.threads, "Worker threads (default: CONVABUSE_THREADS or all cores)");
  app.add_option("--message", rc.messages, "Message id to score (repeatable; default: all labeled)");
  app.add_option("--synth-threads", rc.synth_threads, "Synthetic corpus: number of threads")->capture_default_str();
  app.add_option("--pile-on", rc.pile_on, "Synthetic corpus: pile-on size")->capture_default_str();
  app.add_option("--badword-rate", rc.badword_rate, "Synthetic corpus: bad-word injection rate")
      ->capture_default_str();
  app.add_option("--caps-rate", rc.caps_rate, "Synthetic corpus: shouting/elongation rate")->capture_default_str();

  struct Command {
    const char* name;
    const char* help;
    int (*run)(const RunConfig&);
  };
  const Command commands[] = {
      {"ingest", "Validate and normalize a corpus", cmd_ingest},
      {"synth", "Generate a synthetic corpus and its lexicon", cmd_synth},
      {"featurize", "Graph features of the balanced dataset", cmd_featurize},
      {"train", "Train a pipeline on the balanced dataset", cmd_train},
      {"eval", "Repeated 70/30 evaluation", cmd_eval},
      {"rfe", "Recursive feature elimination and Top Features", cmd_rfe},
      {"score", "Score messages with a trained pipeline", cmd_score},
      {"manifest", "Print the ordered feature names of a pipeline kind", cmd_manifest},
  };
  for (const auto& c : commands) app.add_subcommand(c.name, c.help);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::cerr << app.help();
    return kExitUsage;
  }

  const std::string chosen = app.get_subcommands().front()->get_name();
  try {
    validate(rc);
    for (const auto& c : commands) {
      if (chosen == c.name) return c.run(rc);
    }
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}
