#include "convabuse/select.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>

#include "convabuse/error.hpp"
#include "convabuse/rng.hpp"

namespace convabuse::select {

namespace {

std::vector<int> signs(std::span<const Label> labels) {
  std::vector<int> y;
  y.reserve(labels.size());
  for (Label l : labels) y.push_back(l == Label::kAbuse ? 1 : -1);
  return y;
}

learn::SvmModel fit_linear(const Matrix& x, std::span<const int> y, double C, learn::Scaler* scaler_out) {
  learn::Scaler scaler = learn::scaler_fit(x);
  learn::SvmOptions opt;
  opt.C = C;
  auto model = learn::svm_train(scaler.apply(x), y, opt).model;
  if (scaler_out) *scaler_out = std::move(scaler);
  return model;
}

}  // namespace

SelectionData selection_data(std::vector<std::string> names, const Matrix& x, std::span<const Label> labels,
                             const eval::SplitPlan& plan) {
  if (x.rows() != labels.size()) throw DataError("matrix rows and labels differ in length");
  if (x.cols() != names.size()) throw DataError("matrix columns and names differ in length");
  SelectionData d;
  d.names = std::move(names);
  d.full = x;
  d.y_full = signs(labels);
  for (const auto& rep : plan.repetitions) {
    SplitData s;
    s.train = x.select_rows(rep.train);
    s.test = x.select_rows(rep.test);
    for (std::size_t i : rep.train) s.y_train.push_back(d.y_full[i]);
    for (std::size_t i : rep.test) s.y_test.push_back(d.y_full[i]);
    d.splits.push_back(std::move(s));
  }
  return d;
}

SelectionData selection_data(fusion::PipelineKind kind, std::span<const fusion::Example> dataset,
                             const content::BadWordLexicon& lexicon, const eval::SplitPlan& plan,
                             const fusion::PipelineConfig& config) {
  if (kind == fusion::PipelineKind::kLate) {
    throw ConfigError("late fusion has two inputs; use the union of its bases' top features");
  }
  std::vector<Label> labels;
  for (const auto& e : dataset) labels.push_back(e.label);

  SelectionData d;
  auto all = fusion::train_pipeline_detailed(kind, dataset, lexicon, config);
  d.names = all.pipeline.design_names();
  d.full = std::move(all.design);
  d.y_full = signs(labels);
  for (std::size_t r = 0; r < plan.repetitions.size(); ++r) {
    const auto& rep = plan.repetitions[r];
    std::vector<fusion::Example> train;
    for (std::size_t i : rep.train) train.push_back(dataset[i]);
    auto cfg = config;
    cfg.seed = Rng::derive(plan.seed, r);
    auto fit = fusion::train_pipeline_detailed(kind, train, lexicon, cfg);
    SplitData s;
    s.train = std::move(fit.design);
    for (std::size_t i : rep.train) s.y_train.push_back(d.y_full[i]);
    for (std::size_t i : rep.test) {
      s.test.append_row(fusion::design_row(fit.pipeline, dataset[i].text, dataset[i].graph));
      s.y_test.push_back(d.y_full[i]);
    }
    d.splits.push_back(std::move(s));
  }
  return d;
}

std::vector<std::size_t> rank_features(const learn::SvmModel& model) {
  std::vector<std::size_t> order(model.w.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return std::abs(model.w[a]) > std::abs(model.w[b]); });
  return order;
}

std::vector<std::string> rank_features(const learn::SvmModel& model, const std::vector<std::string>& manifest) {
  if (manifest.size() != model.w.size()) throw VersionError("manifest does not match the model width");
  std::vector<std::string> out;
  for (std::size_t i : rank_features(model)) out.push_back(manifest[i]);
  return out;
}

double cv_f_measure(const SelectionData& data, std::span<const std::size_t> columns, double C) {
  if (data.splits.empty()) throw ConfigError("no evaluation splits");
  double sum = 0.0;
  for (const auto& s : data.splits) {
    learn::Scaler scaler;
    const auto model = fit_linear(s.train.select_cols(columns), s.y_train, C, &scaler);
    const Matrix test = s.test.select_cols(columns);
    std::vector<Label> truth;
    std::vector<Label> predicted;
    for (std::size_t i = 0; i < test.rows(); ++i) {
      truth.push_back(s.y_test[i] > 0 ? Label::kAbuse : Label::kNonAbuse);
      predicted.push_back(model.decision(scaler.apply(test.row(i))) >= 0.0 ? Label::kAbuse : Label::kNonAbuse);
    }
    sum += eval::classification_metrics(truth, predicted).f_measure;
  }
  return sum / static_cast<double>(data.splits.size());
}

std::vector<std::string> EliminationTrace::remaining_after(std::size_t step) const {
  std::vector<std::string> out;
  for (const auto& name : initial) {
    bool removed = false;
    for (std::size_t s = 0; s < step && s < records.size(); ++s) {
      if (records[s].removed == name) {
        removed = true;
        break;
      }
    }
    if (!removed) out.push_back(name);
  }
  return out;
}

EliminationTrace rfe(const SelectionData& data, double C) {
  const std::size_t n = data.names.size();
  if (n < 2) throw ConfigError("nothing to eliminate with fewer than two features");
  EliminationTrace trace;
  trace.initial = data.names;
  std::vector<std::size_t> current(n);
  std::iota(current.begin(), current.end(), 0);
  trace.full_f = cv_f_measure(data, current, C);
  for (std::size_t step = 1; current.size() > 1; ++step) {
    const auto model = fit_linear(data.full.select_cols(current), data.y_full, C, nullptr);
    const auto order = rank_features(model);
    const std::size_t weakest = order.back();
    TraceRecord rec;
    rec.step = step;
    rec.removed = data.names[current[weakest]];
    current.erase(current.begin() + static_cast<std::ptrdiff_t>(weakest));
    rec.remaining = current.size();
    rec.f_measure = cv_f_measure(data, current, C);
    trace.records.push_back(std::move(rec));
  }
  return trace;
}

TopFeatures top_features(const EliminationTrace& trace, double full_f, double threshold) {
  TopFeatures tf;
  const double target = threshold * full_f;
  // Walk from the smallest set upwards; the first qualifying one wins.
  for (std::size_t s = trace.records.size(); s > 0; --s) {
    if (trace.records[s - 1].f_measure >= target) {
      tf.names = trace.remaining_after(s);
      tf.f_measure = trace.records[s - 1].f_measure;
      return tf;
    }
  }
  tf.names = trace.initial;
  tf.f_measure = full_f;
  tf.qualified = full_f >= target;
  return tf;
}

std::vector<std::string> late_top_features(const std::vector<std::string>& content_tf,
                                           const std::vector<std::string>& graph_tf) {
  std::vector<std::string> out = content_tf;
  for (const auto& g : graph_tf) {
    if (std::find(out.begin(), out.end(), g) == out.end()) out.push_back(g);
  }
  return out;
}

void write_trace_csv(std::ostream& out, const EliminationTrace& trace) {
  out << "step,removed_feature,remaining_count,f_measure\n";
  char buf[32];
  for (const auto& r : trace.records) {
    std::snprintf(buf, sizeof buf, "%.17g", r.f_measure);
    out << r.step << ',' << r.removed << ',' << r.remaining << ',' << buf << '\n';
  }
}

}  // namespace convabuse::select
