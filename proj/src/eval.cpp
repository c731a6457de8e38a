#include "convabuse/eval.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "convabuse/error.hpp"
#include "convabuse/rng.hpp"

namespace convabuse::eval {

namespace {

std::size_t round_half_up(double x) { return static_cast<std::size_t>(std::floor(x + 0.5 + 1e-9)); }

}  // namespace

SplitPlan make_splits(std::span<const Label> labels, std::uint64_t seed, std::size_t repetitions,
                      double test_fraction) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) throw ConfigError("test fraction must lie in (0, 1)");
  std::vector<std::size_t> abuse;
  std::vector<std::size_t> non_abuse;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == Label::kAbuse) {
      abuse.push_back(i);
    } else if (labels[i] == Label::kNonAbuse) {
      non_abuse.push_back(i);
    } else {
      throw DataError("dataset item " + std::to_string(i) + " is unlabeled");
    }
  }
  if (abuse.size() < 10 || non_abuse.size() < 10) {
    throw DataError("need at least 10 items per class, have " + std::to_string(abuse.size()) + " abuse and " +
                    std::to_string(non_abuse.size()) + " non_abuse");
  }
  const std::size_t n_test = round_half_up(test_fraction * static_cast<double>(labels.size()));
  const std::size_t a_test = round_half_up(test_fraction * static_cast<double>(abuse.size()));
  const std::size_t n_test_non = std::min(n_test - std::min(n_test, a_test), non_abuse.size() - 1);

  SplitPlan plan;
  plan.seed = seed;
  for (std::size_t r = 0; r < repetitions; ++r) {
    Rng rng(Rng::derive(seed, r));
    auto a = abuse;
    auto n = non_abuse;
    rng.shuffle(a);
    rng.shuffle(n);
    Repetition rep;
    rep.test.assign(a.begin(), a.begin() + static_cast<std::ptrdiff_t>(a_test));
    rep.test.insert(rep.test.end(), n.begin(), n.begin() + static_cast<std::ptrdiff_t>(n_test_non));
    rep.train.assign(a.begin() + static_cast<std::ptrdiff_t>(a_test), a.end());
    rep.train.insert(rep.train.end(), n.begin() + static_cast<std::ptrdiff_t>(n_test_non), n.end());
    std::sort(rep.test.begin(), rep.test.end());
    std::sort(rep.train.begin(), rep.train.end());
    plan.repetitions.push_back(std::move(rep));
  }
  return plan;
}

Metrics classification_metrics(std::span<const Label> truth, std::span<const Label> predicted) {
  if (truth.size() != predicted.size()) throw DataError("truth and predictions differ in length");
  Metrics m;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const bool t = truth[i] == Label::kAbuse;
    const bool p = predicted[i] == Label::kAbuse;
    if (t && p) {
      ++m.tp;
    } else if (!t && p) {
      ++m.fp;
    } else if (t) {
      ++m.fn;
    } else {
      ++m.tn;
    }
  }
  m.precision = m.tp + m.fp > 0 ? static_cast<double>(m.tp) / static_cast<double>(m.tp + m.fp) : 0.0;
  m.recall = m.tp + m.fn > 0 ? static_cast<double>(m.tp) / static_cast<double>(m.tp + m.fn) : 0.0;
  m.f_measure = m.precision + m.recall > 0 ? 2.0 * m.precision * m.recall / (m.precision + m.recall) : 0.0;
  return m;
}

double score_correlation(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw DataError("score vectors differ in length");
  if (a.size() < 2) throw DataError("correlation needs at least two scores");
  const double n = static_cast<double>(a.size());
  double ma = 0.0;
  double mb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= n;
  mb /= n;
  double sab = 0.0;
  double saa = 0.0;
  double sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  if (saa <= 0.0 || sbb <= 0.0) throw DataError("correlation undefined for a constant score vector");
  return sab / std::sqrt(saa * sbb);
}

Summary summarize(std::span<const double> values) {
  Summary s;
  if (values.empty()) return s;
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(values.size());
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.std = std::sqrt(ss / static_cast<double>(values.size() - 1));
  }
  return s;
}

fusion::TrainedPipeline train_repetition(fusion::PipelineKind kind, std::span<const fusion::Example> dataset,
                                         const content::BadWordLexicon& lexicon, const SplitPlan& plan,
                                         std::size_t r, const fusion::PipelineConfig& config) {
  std::vector<fusion::Example> train;
  train.reserve(plan.repetitions[r].train.size());
  for (std::size_t i : plan.repetitions[r].train) train.push_back(dataset[i]);
  auto cfg = config;
  cfg.seed = Rng::derive(plan.seed, r);
  return fusion::train_pipeline(kind, train, lexicon, cfg);
}

namespace {

RepetitionResult run_repetition(fusion::PipelineKind kind, std::span<const fusion::Example> dataset,
                                const content::BadWordLexicon& lexicon, const SplitPlan& plan, std::size_t index,
                                const fusion::PipelineConfig& config, std::size_t* feature_count) {
  using clock = std::chrono::steady_clock;
  const Repetition& rep = plan.repetitions[index];
  RepetitionResult r;
  const auto t0 = clock::now();
  const auto pipeline = train_repetition(kind, dataset, lexicon, plan, index, config);
  const auto t1 = clock::now();
  *feature_count = pipeline.main.features.size();

  std::vector<Label> truth;
  std::vector<Label> predicted;
  r.test = rep.test;
  for (std::size_t i : rep.test) {
    const auto s = fusion::score(pipeline, dataset[i].text, dataset[i].graph);
    truth.push_back(dataset[i].label);
    predicted.push_back(s.label);
    r.probabilities.push_back(s.probability);
    if (s.content_probability) r.content_probabilities.push_back(*s.content_probability);
    if (s.graph_probability) r.graph_probabilities.push_back(*s.graph_probability);
  }
  const auto t2 = clock::now();
  r.metrics = classification_metrics(truth, predicted);
  r.train_seconds = std::chrono::duration<double>(t1 - t0).count();
  r.score_seconds = std::chrono::duration<double>(t2 - t1).count();
  return r;
}

}  // namespace

EvalReport evaluate(fusion::PipelineKind kind, std::span<const fusion::Example> dataset,
                    const content::BadWordLexicon& lexicon, const SplitPlan& plan,
                    const fusion::PipelineConfig& config, std::size_t threads) {
  const std::size_t reps = plan.repetitions.size();
  EvalReport report;
  report.kind = kind;
  report.repetitions.resize(reps);
  std::vector<std::size_t> widths(reps, 0);

  std::atomic<std::size_t> next{0};
  std::mutex failure_mutex;
  std::exception_ptr failure;
  std::size_t failed_rep = 0;
  auto work = [&] {
    for (std::size_t r = next++; r < reps; r = next++) {
      try {
        report.repetitions[r] = run_repetition(kind, dataset, lexicon, plan, r, config, &widths[r]);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure || r < failed_rep) {
          failure = std::current_exception();
          failed_rep = r;
        }
      }
    }
  };
  const std::size_t n_workers = std::max<std::size_t>(1, std::min(threads, reps));
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < n_workers; ++t) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  if (failure) {
    try {
      std::rethrow_exception(failure);
    } catch (const std::exception& e) {
      throw Error("repetition " + std::to_string(failed_rep) + " failed: " + e.what());
    }
  }

  report.feature_count = widths.empty() ? 0 : widths.front();
  std::vector<double> p;
  std::vector<double> rc;
  std::vector<double> f;
  std::vector<double> content_all;
  std::vector<double> graph_all;
  for (const auto& r : report.repetitions) {
    p.push_back(r.metrics.precision);
    rc.push_back(r.metrics.recall);
    f.push_back(r.metrics.f_measure);
    content_all.insert(content_all.end(), r.content_probabilities.begin(), r.content_probabilities.end());
    graph_all.insert(graph_all.end(), r.graph_probabilities.begin(), r.graph_probabilities.end());
  }
  report.precision = summarize(p);
  report.recall = summarize(rc);
  report.f_measure = summarize(f);
  if (!content_all.empty() && content_all.size() == graph_all.size()) {
    try {
      report.score_correlation = score_correlation(content_all, graph_all);
    } catch (const DataError&) {
      // constant scores: leave undefined
    }
  }
  return report;
}

std::uint64_t dataset_seed(std::uint64_t master) { return Rng::derive(master, 1); }
std::uint64_t split_seed(std::uint64_t master) { return Rng::derive(master, 2); }

Experiment prepare_experiment(const Corpus& corpus, std::uint64_t master_seed, const ContextParams& context,
                              std::size_t threads) {
  Experiment e;
  e.dataset = build_balanced_dataset(corpus, dataset_seed(master_seed));
  e.graph_features = featurize_graphs(corpus, e.dataset.items, context, threads);
  e.examples = fusion::make_examples(corpus, e.dataset.items, e.graph_features, &e.skipped);
  return e;
}

nlohmann::json report_to_json(const EvalReport& report) {
  nlohmann::json reps = nlohmann::json::array();
  for (std::size_t r = 0; r < report.repetitions.size(); ++r) {
    const auto& m = report.repetitions[r].metrics;
    reps.push_back({{"repetition", r},
                    {"precision", m.precision},
                    {"recall", m.recall},
                    {"f_measure", m.f_measure},
                    {"tp", m.tp},
                    {"fp", m.fp},
                    {"fn", m.fn},
                    {"tn", m.tn},
                    {"test_size", report.repetitions[r].test.size()}});
  }
  auto summary = [](const Summary& s) { return nlohmann::json{{"mean", s.mean}, {"std", s.std}}; };
  nlohmann::json doc{
      {"kind", fusion::to_string(report.kind)},
      {"feature_count", report.feature_count},
      {"repetitions", reps},
      {"precision", summary(report.precision)},
      {"recall", summary(report.recall)},
      {"f_measure", summary(report.f_measure)},
  };
  doc["score_correlation"] = report.score_correlation ? nlohmann::json(*report.score_correlation) : nlohmann::json();
  return doc;
}

nlohmann::json runtime_to_json(const EvalReport& report) {
  double train = 0.0;
  double score = 0.0;
  std::size_t scored = 0;
  nlohmann::json reps = nlohmann::json::array();
  for (const auto& r : report.repetitions) {
    train += r.train_seconds;
    score += r.score_seconds;
    scored += r.test.size();
    reps.push_back({{"train_seconds", r.train_seconds}, {"score_seconds", r.score_seconds}});
  }
  return {{"kind", fusion::to_string(report.kind)},
          {"repetitions", reps},
          {"total_train_seconds", train},
          {"total_score_seconds", score},
          {"seconds_per_scored_message", scored > 0 ? score / static_cast<double>(scored) : 0.0}};
}

}  // namespace convabuse::eval
