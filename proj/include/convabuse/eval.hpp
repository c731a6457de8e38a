#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "convabuse/fusion.hpp"
#include "json.hpp"

namespace convabuse::eval {

inline constexpr std::size_t kRepetitions = 10;
inline constexpr double kTestFraction = 0.3;

struct Repetition {
  std::vector<std::size_t> train;  // ascending dataset indices
  std::vector<std::size_t> test;
};

/// Independent stratified train/test splits ("Monte-Carlo" cross-validation).
struct SplitPlan {
  std::uint64_t seed = 0;
  std::vector<Repetition> repetitions;
};

/// Test part per repetition: round(test_fraction * N) items, of which
/// round(test_fraction * n_abuse) abuse (halves round up), the rest
/// non_abuse. Throws DataError with fewer than 10 items in a class.
SplitPlan make_splits(std::span<const Label> labels, std::uint64_t seed, std::size_t repetitions = kRepetitions,
                      double test_fraction = kTestFraction);

/// Abuse-class metrics from a confusion matrix.
struct Metrics {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  std::size_t tn = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f_measure = 0.0;
};

Metrics classification_metrics(std::span<const Label> truth, std::span<const Label> predicted);

/// Pearson correlation. Throws DataError on length mismatch or zero variance.
double score_correlation(std::span<const double> a, std::span<const double> b);

struct RepetitionResult {
  Metrics metrics;
  std::vector<std::size_t> test;  // dataset indices, scored in this order
  std::vector<double> probabilities;
  /// Base-classifier probabilities when the pipeline exposes them.
  std::vector<double> content_probabilities;
  std::vector<double> graph_probabilities;
  double train_seconds = 0.0;
  double score_seconds = 0.0;
};

struct Summary {
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation over repetitions
};

struct EvalReport {
  fusion::PipelineKind kind = fusion::PipelineKind::kContent;
  std::size_t feature_count = 0;
  std::vector<RepetitionResult> repetitions;
  Summary precision;
  Summary recall;
  Summary f_measure;
  /// Correlation of the two base probabilities over all test predictions.
  std::optional<double> score_correlation;
};

/// Trains on each train part and scores the matching test part. The inner
/// fold seed of repetition r is derived from (plan.seed, r). Repetitions run
/// on up to `threads` workers; results do not depend on the count.
EvalReport evaluate(fusion::PipelineKind kind, std::span<const fusion::Example> dataset,
                    const content::BadWordLexicon& lexicon, const SplitPlan& plan,
                    const fusion::PipelineConfig& config, std::size_t threads = 1);

/// The pipeline that evaluate() trains for repetition r: the train part of
/// the dataset only, with the derived inner seed.
fusion::TrainedPipeline train_repetition(fusion::PipelineKind kind, std::span<const fusion::Example> dataset,
                                         const content::BadWordLexicon& lexicon, const SplitPlan& plan,
                                         std::size_t r, const fusion::PipelineConfig& config);

Summary summarize(std::span<const double> values);

/// Labeled messages with their graph features, ready for the protocol.
struct Experiment {
  LabeledDataset dataset;
  FeatureTable graph_features;
  std::vector<fusion::Example> examples;
  std::size_t skipped = 0;
};

/// Seeds of the protocol stages, derived from one master seed.
std::uint64_t dataset_seed(std::uint64_t master);
std::uint64_t split_seed(std::uint64_t master);

/// Balanced sampling and graph featurization of a corpus.
Experiment prepare_experiment(const Corpus& corpus, std::uint64_t master_seed, const ContextParams& context,
                              std::size_t threads);

/// Deterministic JSON form (no wall-clock values).
nlohmann::json report_to_json(const EvalReport& report);
/// Wall-clock accounting, kept apart so that reports compare byte for byte.
nlohmann::json runtime_to_json(const EvalReport& report);

}  // namespace convabuse::eval
