#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "convabuse/content.hpp"
#include "convabuse/corpus.hpp"
#include "convabuse/featurize.hpp"
#include "convabuse/learn.hpp"
#include "convabuse/matrix.hpp"

namespace convabuse::fusion {

enum class PipelineKind { kContent, kGraph, kEarly, kLate, kHybrid };

std::string_view to_string(PipelineKind kind);
/// Throws ConfigError.
PipelineKind parse_pipeline_kind(std::string_view name);

inline constexpr std::array<PipelineKind, 5> kAllKinds{PipelineKind::kContent, PipelineKind::kGraph,
                                                       PipelineKind::kEarly, PipelineKind::kLate,
                                                       PipelineKind::kHybrid};

/// One labeled message with its precomputed graph features.
struct Example {
  std::string id;
  std::string text;
  Label label = Label::kUnlabeled;
  std::vector<double> graph;
};

/// Joins dataset items with their rows in a graph feature table. Items
/// without a row are skipped and counted in `skipped`.
std::vector<Example> make_examples(const Corpus& corpus, std::span<const LabeledItem> items,
                                   const FeatureTable& graph_table, std::size_t* skipped = nullptr);

/// Memo of scaler + SVM fits keyed by a 128-bit hash of (matrix, labels, C).
/// Pipelines trained on the same rows share stages (the graph stage of late
/// fusion is the main stage of the graph pipeline), so one cache passed to
/// both skips the repeated fits. Results do not depend on it.
class FitCache {
 public:
  struct Entry {
    learn::Scaler scaler;
    learn::SvmModel svm;
  };
  using Key = std::pair<std::uint64_t, std::uint64_t>;

  std::optional<Entry> find(const Key& key) const;
  void insert(const Key& key, Entry entry);
  std::size_t size() const;

 private:
  mutable std::mutex mutex_;
  std::map<Key, Entry> entries_;
};

struct PipelineConfig {
  double C = 1.0;
  std::size_t inner_folds = 5;
  /// Out-of-fold decision values for calibration and fusion inputs. When
  /// false everything is computed in-sample (ablation only).
  bool cross_fit = true;
  std::uint64_t seed = 0;
  ContextParams context;
  /// Restricts the inputs to these names. Empty keeps everything. For late
  /// fusion it restricts the two base stages.
  std::vector<std::string> feature_subset;
  /// Optional; not stored in trained pipelines.
  std::shared_ptr<FitCache> fit_cache;
};

/// Column subset -> scaler -> linear SVM -> sigmoid calibrator.
struct Stage {
  std::vector<std::string> features;  // stage inputs, in order
  std::vector<std::size_t> columns;   // their positions in the design row
  learn::Scaler scaler;
  learn::SvmModel svm;
  learn::Calibrator calibrator;

  double decision(std::span<const double> design_row) const;
  double probability(std::span<const double> design_row) const { return calibrator.probability(decision(design_row)); }
};

inline constexpr std::string_view kContentScoreName = "content_score";
inline constexpr std::string_view kGraphScoreName = "graph_score";

struct TrainedPipeline {
  PipelineKind kind = PipelineKind::kContent;
  PipelineConfig config;
  content::BadWordLexicon lexicon;
  content::ContentModels content;  // fitted when the kind reads text
  std::vector<std::string> content_manifest;
  std::vector<std::string> graph_manifest;
  /// Base stages of late and hybrid fusion.
  std::optional<Stage> content_stage;
  std::optional<Stage> graph_stage;
  Stage main;

  bool uses_text() const { return kind != PipelineKind::kGraph; }
  bool uses_graph() const { return kind != PipelineKind::kContent; }
  /// Names of the main stage design row.
  std::vector<std::string> design_names() const;
};

/// Design row of the main stage for one message.
std::vector<double> design_row(const TrainedPipeline& p, std::string_view text, std::span<const double> graph);

struct TrainingResult {
  TrainedPipeline pipeline;
  /// Main-stage design rows of the training examples (fusion inputs are the
  /// out-of-fold scores).
  Matrix design;
};

/// Throws FitError from sub-models and ConfigError on a bad subset.
TrainingResult train_pipeline_detailed(PipelineKind kind, std::span<const Example> train,
                                       const content::BadWordLexicon& lexicon, const PipelineConfig& config);

inline TrainedPipeline train_pipeline(PipelineKind kind, std::span<const Example> train,
                                      const content::BadWordLexicon& lexicon, const PipelineConfig& config) {
  return train_pipeline_detailed(kind, train, lexicon, config).pipeline;
}

struct Score {
  double probability = 0.5;
  Label label = Label::kNonAbuse;
  std::optional<double> content_probability;
  std::optional<double> graph_probability;
};

inline constexpr double kThreshold = 0.5;

/// Scores a message from its text and graph features. Throws VersionError
/// when the graph feature width differs from the pipeline manifest.
Score score(const TrainedPipeline& p, std::string_view text, std::span<const double> graph);

/// Extracts the context with the pipeline's frozen parameters, then scores.
Score score_message(const TrainedPipeline& p, const Corpus& corpus, std::string_view message_id);

/// Stratified assignment of each index to one of k folds.
std::vector<std::size_t> stratified_folds(std::span<const Label> labels, std::size_t k, std::uint64_t seed);

}  // namespace convabuse::fusion
