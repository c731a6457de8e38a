#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "convabuse/corpus.hpp"
#include "convabuse/graph_features.hpp"
#include "convabuse/matrix.hpp"

namespace convabuse {

/// Everything that shapes a message's graph features. Frozen into trained
/// pipelines so that scoring sees the same context as training.
struct ContextParams {
  std::size_t before = kDefaultContextBefore;
  std::size_t after = kDefaultContextAfter;
  int window_len = kDefaultWindowLength;
  GraphFeatureConfig graphs;
};

/// Named feature rows, one per message.
struct FeatureTable {
  std::vector<std::string> ids;
  std::vector<Label> labels;
  std::vector<std::string> names;
  Matrix values;
};

/// CONVABUSE_THREADS when set to a positive integer, otherwise the number of
/// hardware threads (at least 1).
std::size_t default_thread_count();

/// Graph features of the given messages, computed on `threads` workers. Row
/// order follows `items` whatever the scheduling.
FeatureTable featurize_graphs(const Corpus& corpus, std::span<const LabeledItem> items,
                              const ContextParams& params, std::size_t threads);

/// Graph features of a single message.
std::vector<double> message_graph_features(const Corpus& corpus, std::string_view message_id,
                                           const ContextParams& params);

/// Header "message_id,label,<names...>", values with 17 significant digits.
void write_feature_csv(std::ostream& out, const FeatureTable& table);
/// Throws ParseError with the offending line.
FeatureTable read_feature_csv(std::istream& in);

}  // namespace convabuse
