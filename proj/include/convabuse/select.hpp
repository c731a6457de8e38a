#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "convabuse/eval.hpp"
#include "convabuse/fusion.hpp"
#include "convabuse/learn.hpp"
#include "convabuse/matrix.hpp"

namespace convabuse::select {

struct SplitData {
  Matrix train;
  std::vector<int> y_train;  // +1 abuse, -1 non_abuse
  Matrix test;
  std::vector<int> y_test;
};

/// Design matrices for elimination: `full` (whole dataset) feeds the ranking
/// model, `splits` feed the F-measure.
struct SelectionData {
  std::vector<std::string> names;
  Matrix full;
  std::vector<int> y_full;
  std::vector<SplitData> splits;
};

/// Plain matrix input: rows of `x` are dataset items.
SelectionData selection_data(std::vector<std::string> names, const Matrix& x, std::span<const Label> labels,
                             const eval::SplitPlan& plan);

/// Pipeline design matrices; content statistics are fit on each train part.
/// Late fusion is not supported (it has two inputs).
SelectionData selection_data(fusion::PipelineKind kind, std::span<const fusion::Example> dataset,
                             const content::BadWordLexicon& lexicon, const eval::SplitPlan& plan,
                             const fusion::PipelineConfig& config);

/// Feature indices by decreasing |w|; ties keep manifest order.
std::vector<std::size_t> rank_features(const learn::SvmModel& model);
std::vector<std::string> rank_features(const learn::SvmModel& model, const std::vector<std::string>& manifest);

/// Mean Abuse-class F over the splits, predicting abuse when the linear
/// decision on standardized columns is >= 0.
double cv_f_measure(const SelectionData& data, std::span<const std::size_t> columns, double C);

struct TraceRecord {
  std::size_t step = 0;
  std::string removed;
  std::size_t remaining = 0;
  double f_measure = 0.0;
};

struct EliminationTrace {
  std::vector<std::string> initial;
  double full_f = 0.0;
  std::vector<TraceRecord> records;

  /// Features still present after `step` removals, in manifest order.
  std::vector<std::string> remaining_after(std::size_t step) const;
};

/// One feature removed per step until one remains. Throws ConfigError with
/// fewer than two features.
EliminationTrace rfe(const SelectionData& data, double C);

struct TopFeatures {
  std::vector<std::string> names;
  double f_measure = 0.0;
  /// False when no set reached the threshold and the full set was returned.
  bool qualified = true;
};

TopFeatures top_features(const EliminationTrace& trace, double full_f, double threshold = 0.97);

/// Late fusion top features: union of its bases' sets.
std::vector<std::string> late_top_features(const std::vector<std::string>& content_tf,
                                           const std::vector<std::string>& graph_tf);

/// "step,removed_feature,remaining_count,f_measure"
void write_trace_csv(std::ostream& out, const EliminationTrace& trace);

}  // namespace convabuse::select
