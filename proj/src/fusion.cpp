#include "convabuse/fusion.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <unordered_map>

#include "convabuse/error.hpp"
#include "convabuse/rng.hpp"

namespace convabuse::fusion {

std::string_view to_string(PipelineKind kind) {
  switch (kind) {
    case PipelineKind::kContent:
      return "content";
    case PipelineKind::kGraph:
      return "graph";
    case PipelineKind::kEarly:
      return "early";
    case PipelineKind::kLate:
      return "late";
    case PipelineKind::kHybrid:
      return "hybrid";
  }
  return "?";
}

PipelineKind parse_pipeline_kind(std::string_view name) {
  for (PipelineKind k : kAllKinds) {
    if (to_string(k) == name) return k;
  }
  throw ConfigError("unknown pipeline kind '" + std::string(name) + "' (content, graph, early, late, hybrid)");
}

std::vector<Example> make_examples(const Corpus& corpus, std::span<const LabeledItem> items,
                                   const FeatureTable& graph_table, std::size_t* skipped) {
  std::unordered_map<std::string_view, std::size_t> row_of;
  for (std::size_t i = 0; i < graph_table.ids.size(); ++i) row_of.emplace(graph_table.ids[i], i);
  std::vector<Example> out;
  std::size_t missing = 0;
  for (const auto& item : items) {
    const auto it = row_of.find(item.message_id);
    const auto loc = corpus.find(item.message_id);
    if (it == row_of.end() || !loc) {
      ++missing;
      continue;
    }
    const auto row = graph_table.values.row(it->second);
    out.push_back({item.message_id, corpus.at(*loc).text, item.label, {row.begin(), row.end()}});
  }
  if (skipped) *skipped = missing;
  return out;
}

std::vector<std::size_t> stratified_folds(std::span<const Label> labels, std::size_t k, std::uint64_t seed) {
  if (k < 2) throw ConfigError("need at least 2 folds");
  std::vector<std::size_t> fold(labels.size(), 0);
  Rng rng(seed);
  std::size_t counter = 0;
  for (Label cls : {Label::kAbuse, Label::kNonAbuse}) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (labels[i] == cls) idx.push_back(i);
    }
    if (idx.size() < k) {
      throw FitError("class " + std::string(convabuse::to_string(cls)) + " has " + std::to_string(idx.size()) +
                     " examples, fewer than " + std::to_string(k) + " folds");
    }
    rng.shuffle(idx);
    for (std::size_t i : idx) fold[i] = counter++ % k;
  }
  return fold;
}

double Stage::decision(std::span<const double> design_row) const {
  std::vector<double> x(columns.size());
  for (std::size_t j = 0; j < columns.size(); ++j) {
    if (columns[j] >= design_row.size()) throw VersionError("design row narrower than the stage inputs");
    x[j] = design_row[columns[j]];
  }
  return svm.decision(scaler.apply(x));
}

std::vector<std::string> TrainedPipeline::design_names() const {
  std::vector<std::string> names;
  if (kind == PipelineKind::kLate) return {std::string(kContentScoreName), std::string(kGraphScoreName)};
  if (uses_text()) names = content_manifest;
  if (uses_graph()) names.insert(names.end(), graph_manifest.begin(), graph_manifest.end());
  if (kind == PipelineKind::kHybrid) {
    names.emplace_back(kContentScoreName);
    names.emplace_back(kGraphScoreName);
  }
  return names;
}

std::optional<FitCache::Entry> FitCache::find(const Key& key) const {
  std::lock_guard lock(mutex_);
  const auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

void FitCache::insert(const Key& key, Entry entry) {
  std::lock_guard lock(mutex_);
  entries_.emplace(key, std::move(entry));
}

std::size_t FitCache::size() const {
  std::lock_guard lock(mutex_);
  return entries_.size();
}

namespace {

/// Design of every training row, with fitted statistics restricted to the
/// given rows.
using DesignFn = std::function<Matrix(std::span<const std::size_t> fit_rows)>;

Matrix hcat(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows()) throw std::logic_error("hcat row mismatch");
  Matrix out(a.rows(), a.cols() + b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    auto r = out.row(i);
    std::copy(a.row(i).begin(), a.row(i).end(), r.begin());
    std::copy(b.row(i).begin(), b.row(i).end(), r.begin() + static_cast<std::ptrdiff_t>(a.cols()));
  }
  return out;
}

std::vector<std::size_t> resolve_columns(const std::vector<std::string>& names,
                                         const std::vector<std::string>& subset, bool ignore_unknown) {
  std::vector<std::size_t> cols;
  if (subset.empty()) {
    cols.resize(names.size());
    std::iota(cols.begin(), cols.end(), 0);
    return cols;
  }
  for (const auto& s : subset) {
    const auto it = std::find(names.begin(), names.end(), s);
    if (it == names.end()) {
      if (ignore_unknown) continue;
      throw ConfigError("unknown feature '" + s + "'");
    }
    cols.push_back(static_cast<std::size_t>(it - names.begin()));
  }
  std::sort(cols.begin(), cols.end());
  cols.erase(std::unique(cols.begin(), cols.end()), cols.end());
  if (cols.empty()) throw ConfigError("feature subset leaves a stage without inputs");
  return cols;
}

struct StageFit {
  Stage stage;
  std::vector<double> scores;  // calibrated, out-of-fold unless cross-fitting is off
  Matrix design;
};

struct FitContext {
  const PipelineConfig& config;
  std::vector<int> y;
  std::vector<std::size_t> folds;  // empty when cross-fitting is off
};

struct SvmStep {
  learn::Scaler scaler;
  learn::SvmModel svm;
};

FitCache::Key fit_key(const Matrix& x, std::span<const int> y, double C) {
  // two FNV-1a streams with different offsets
  std::uint64_t a = 14695981039346656037ULL;
  std::uint64_t b = 0x84222325cbf29ce4ULL;
  auto mix = [&](const void* p, std::size_t len) {
    const auto* bytes = static_cast<const unsigned char*>(p);
    for (std::size_t i = 0; i < len; ++i) {
      a = (a ^ bytes[i]) * 1099511628211ULL;
      b = (b ^ bytes[i]) * 0x100000001b3ULL;
      b ^= b >> 29;
    }
  };
  const std::size_t shape[2] = {x.rows(), x.cols()};
  mix(shape, sizeof shape);
  for (std::size_t i = 0; i < x.rows(); ++i) mix(x.row(i).data(), x.cols() * sizeof(double));
  mix(y.data(), y.size() * sizeof(int));
  mix(&C, sizeof C);
  return {a, b};
}

SvmStep fit_svm(const Matrix& x, std::span<const int> y, double C, FitCache* cache) {
  std::optional<FitCache::Key> key;
  if (cache) {
    key = fit_key(x, y, C);
    if (auto hit = cache->find(*key)) return {std::move(hit->scaler), std::move(hit->svm)};
  }
  SvmStep s;
  s.scaler = learn::scaler_fit(x);
  learn::SvmOptions opt;
  opt.C = C;
  s.svm = learn::svm_train(s.scaler.apply(x), y, opt).model;
  if (cache) cache->insert(*key, {s.scaler, s.svm});
  return s;
}

StageFit fit_stage(const std::vector<std::string>& names, const DesignFn& design, const FitContext& ctx,
                   const std::vector<std::string>& subset, bool ignore_unknown) {
  const std::size_t n = ctx.y.size();
  StageFit out;
  Stage& st = out.stage;
  st.columns = resolve_columns(names, subset, ignore_unknown);
  for (std::size_t c : st.columns) st.features.push_back(names[c]);

  std::vector<std::size_t> all(n);
  std::iota(all.begin(), all.end(), 0);
  out.design = design(all);
  const Matrix x = out.design.select_cols(st.columns);
  SvmStep full = fit_svm(x, ctx.y, ctx.config.C, ctx.config.fit_cache.get());
  st.scaler = std::move(full.scaler);
  st.svm = std::move(full.svm);

  std::vector<double> dec(n);
  if (ctx.folds.empty()) {
    for (std::size_t i = 0; i < n; ++i) dec[i] = st.svm.decision(st.scaler.apply(x.row(i)));
  } else {
    const std::size_t k = ctx.config.inner_folds;
    for (std::size_t f = 0; f < k; ++f) {
      std::vector<std::size_t> tr;
      std::vector<std::size_t> ho;
      for (std::size_t i = 0; i < n; ++i) (ctx.folds[i] == f ? ho : tr).push_back(i);
      const Matrix d = design(tr).select_cols(st.columns);
      std::vector<int> ytr;
      for (std::size_t i : tr) ytr.push_back(ctx.y[i]);
      const SvmStep inner = fit_svm(d.select_rows(tr), ytr, ctx.config.C, ctx.config.fit_cache.get());
      for (std::size_t i : ho) dec[i] = inner.svm.decision(inner.scaler.apply(d.row(i)));
    }
  }
  st.calibrator = learn::calibrate_fit(dec, ctx.y);
  out.scores.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.scores[i] = st.calibrator.probability(dec[i]);
  return out;
}

Matrix content_rows(const content::ContentModels& models, const content::BadWordLexicon& lexicon,
                    std::span<const Example> ex) {
  Matrix m(ex.size(), content::kContentFeatureCount);
  for (std::size_t i = 0; i < ex.size(); ++i) {
    const auto row = content::content_feature_vector(ex[i].text, models, lexicon);
    std::copy(row.begin(), row.end(), m.row(i).begin());
  }
  return m;
}

content::ContentModels fit_content(std::span<const Example> ex, std::span<const std::size_t> rows) {
  std::vector<std::string> texts;
  std::vector<Label> labels;
  for (std::size_t i : rows) {
    texts.push_back(ex[i].text);
    labels.push_back(ex[i].label);
  }
  return content::fit_content_models(texts, labels);
}

Matrix two_columns(std::span<const double> a, std::span<const double> b) {
  Matrix m(a.size(), 2);
  for (std::size_t i = 0; i < a.size(); ++i) {
    m(i, 0) = a[i];
    m(i, 1) = b[i];
  }
  return m;
}

}  // namespace

TrainingResult train_pipeline_detailed(PipelineKind kind, std::span<const Example> train,
                                       const content::BadWordLexicon& lexicon, const PipelineConfig& config) {
  if (!(config.C > 0.0)) throw ConfigError("C must be positive");
  const std::size_t n = train.size();
  TrainingResult result;
  TrainedPipeline& p = result.pipeline;
  p.kind = kind;
  p.config = config;
  p.config.fit_cache.reset();
  p.lexicon = lexicon;
  p.content_manifest = content::content_manifest();
  p.graph_manifest = graph_feature_manifest(config.context.graphs);

  FitContext ctx{config, {}, {}};
  std::vector<Label> labels;
  for (const auto& e : train) {
    if (e.label != Label::kAbuse && e.label != Label::kNonAbuse) throw FitError("training example " + e.id + " is unlabeled");
    labels.push_back(e.label);
    ctx.y.push_back(e.label == Label::kAbuse ? 1 : -1);
    if (p.uses_graph() && e.graph.size() != p.graph_manifest.size()) {
      throw VersionError("example " + e.id + " has " + std::to_string(e.graph.size()) + " graph features, manifest has " +
                         std::to_string(p.graph_manifest.size()));
    }
  }
  if (config.cross_fit) ctx.folds = stratified_folds(labels, config.inner_folds, config.seed);

  const DesignFn content_design = [&](std::span<const std::size_t> fit_rows) {
    return content_rows(fit_content(train, fit_rows), lexicon, train);
  };
  Matrix graph_matrix(p.uses_graph() ? n : 0, p.graph_manifest.size());
  if (p.uses_graph()) {
    for (std::size_t i = 0; i < n; ++i) std::copy(train[i].graph.begin(), train[i].graph.end(), graph_matrix.row(i).begin());
  }
  const DesignFn graph_design = [&](std::span<const std::size_t>) { return graph_matrix; };

  if (p.uses_text()) {
    std::vector<std::size_t> all(n);
    std::iota(all.begin(), all.end(), 0);
    p.content = fit_content(train, all);
  }

  const auto& subset = config.feature_subset;
  auto names = p.design_names();
  switch (kind) {
    case PipelineKind::kContent: {
      auto fit = fit_stage(names, content_design, ctx, subset, false);
      p.main = std::move(fit.stage);
      result.design = std::move(fit.design);
      break;
    }
    case PipelineKind::kGraph: {
      auto fit = fit_stage(names, graph_design, ctx, subset, false);
      p.main = std::move(fit.stage);
      result.design = std::move(fit.design);
      break;
    }
    case PipelineKind::kEarly: {
      const DesignFn early = [&](std::span<const std::size_t> rows) { return hcat(content_design(rows), graph_matrix); };
      auto fit = fit_stage(names, early, ctx, subset, false);
      p.main = std::move(fit.stage);
      result.design = std::move(fit.design);
      break;
    }
    case PipelineKind::kLate:
    case PipelineKind::kHybrid: {
      const bool late = kind == PipelineKind::kLate;
      const std::vector<std::string> none;
      auto cs = fit_stage(p.content_manifest, content_design, ctx, late ? subset : none, true);
      auto gs = fit_stage(p.graph_manifest, graph_design, ctx, late ? subset : none, true);
      const Matrix meta = two_columns(cs.scores, gs.scores);
      p.content_stage = std::move(cs.stage);
      p.graph_stage = std::move(gs.stage);
      StageFit fit;
      if (late) {
        fit = fit_stage(names, [&](std::span<const std::size_t>) { return meta; }, ctx, none, false);
      } else {
        const DesignFn hybrid = [&](std::span<const std::size_t> rows) {
          return hcat(hcat(content_design(rows), graph_matrix), meta);
        };
        fit = fit_stage(names, hybrid, ctx, subset, false);
      }
      p.main = std::move(fit.stage);
      result.design = std::move(fit.design);
      break;
    }
  }
  return result;
}

std::vector<double> design_row(const TrainedPipeline& p, std::string_view text, std::span<const double> graph) {
  if (p.uses_graph() && graph.size() != p.graph_manifest.size()) {
    throw VersionError("graph feature width " + std::to_string(graph.size()) + " does not match the pipeline manifest (" +
                       std::to_string(p.graph_manifest.size()) + ")");
  }
  std::vector<double> c;
  if (p.uses_text()) c = content::content_feature_vector(text, p.content, p.lexicon);
  std::vector<double> row;
  switch (p.kind) {
    case PipelineKind::kContent:
      return c;
    case PipelineKind::kGraph:
      return {graph.begin(), graph.end()};
    case PipelineKind::kEarly:
    case PipelineKind::kHybrid:
      row = c;
      row.insert(row.end(), graph.begin(), graph.end());
      if (p.kind == PipelineKind::kHybrid) {
        row.push_back(p.content_stage->probability(c));
        row.push_back(p.graph_stage->probability(graph));
      }
      return row;
    case PipelineKind::kLate:
      return {p.content_stage->probability(c), p.graph_stage->probability(graph)};
  }
  return row;
}

Score score(const TrainedPipeline& p, std::string_view text, std::span<const double> graph) {
  const auto row = design_row(p, text, graph);
  Score s;
  s.probability = p.main.probability(row);
  s.label = s.probability >= kThreshold ? Label::kAbuse : Label::kNonAbuse;
  switch (p.kind) {
    case PipelineKind::kContent:
      s.content_probability = s.probability;
      break;
    case PipelineKind::kGraph:
      s.graph_probability = s.probability;
      break;
    case PipelineKind::kEarly:
      break;
    case PipelineKind::kLate:
      s.content_probability = row[0];
      s.graph_probability = row[1];
      break;
    case PipelineKind::kHybrid:
      s.content_probability = row[row.size() - 2];
      s.graph_probability = row[row.size() - 1];
      break;
  }
  return s;
}

Score score_message(const TrainedPipeline& p, const Corpus& corpus, std::string_view message_id) {
  const Message& m = corpus.get(message_id);
  std::vector<double> g;
  if (p.uses_graph()) g = message_graph_features(corpus, message_id, p.config.context);
  return score(p, m.text, g);
}

}  // namespace convabuse::fusion
