#include "convabuse/bundle.hpp"

#include <cstdint>
#include <cstdio>
#include <fstream>

#include "convabuse/error.hpp"

namespace convabuse {

using nlohmann::json;

std::string manifest_hash(const std::vector<std::string>& names) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto feed = [&h](unsigned char c) {
    h ^= c;
    h *= 0x100000001b3ULL;
  };
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (i > 0) feed('\n');
    for (unsigned char c : names[i]) feed(c);
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace {

json stage_to_json(const fusion::Stage& s) {
  return {
      {"features", s.features},
      {"columns", s.columns},
      {"scaler", {{"mean", s.scaler.mean}, {"stddev", s.scaler.stddev}}},
      {"svm", {{"w", s.svm.w}, {"b", s.svm.b}, {"C", s.svm.C}}},
      {"calibrator", {{"A", s.calibrator.A}, {"B", s.calibrator.B}}},
  };
}

fusion::Stage stage_from_json(const json& j) {
  fusion::Stage s;
  j.at("features").get_to(s.features);
  j.at("columns").get_to(s.columns);
  j.at("scaler").at("mean").get_to(s.scaler.mean);
  j.at("scaler").at("stddev").get_to(s.scaler.stddev);
  j.at("svm").at("w").get_to(s.svm.w);
  j.at("svm").at("b").get_to(s.svm.b);
  j.at("svm").at("C").get_to(s.svm.C);
  j.at("calibrator").at("A").get_to(s.calibrator.A);
  j.at("calibrator").at("B").get_to(s.calibrator.B);
  if (s.features.size() != s.columns.size() || s.scaler.mean.size() != s.columns.size() ||
      s.scaler.stddev.size() != s.columns.size() || s.svm.w.size() != s.columns.size()) {
    throw ParseError(0, "inconsistent stage widths in bundle");
  }
  return s;
}

json tables_to_json(const std::vector<std::string>& vocab, const std::vector<std::uint32_t>& dfa,
                    const std::vector<std::uint32_t>& dfn, std::uint32_t na, std::uint32_t nn) {
  return {{"vocabulary", vocab}, {"df_abuse", dfa}, {"df_non_abuse", dfn}, {"n_abuse", na}, {"n_non_abuse", nn}};
}

template <typename Model>
Model tables_from_json(const json& j) {
  Model m;
  j.at("vocabulary").get_to(m.vocabulary);
  j.at("df_abuse").get_to(m.df_abuse);
  j.at("df_non_abuse").get_to(m.df_non_abuse);
  j.at("n_abuse").get_to(m.n_abuse);
  j.at("n_non_abuse").get_to(m.n_non_abuse);
  if (m.df_abuse.size() != m.vocabulary.size() || m.df_non_abuse.size() != m.vocabulary.size()) {
    throw ParseError(0, "inconsistent document-frequency tables in bundle");
  }
  return m;
}

void check_manifest(const json& doc, const char* key, const std::vector<std::string>& current) {
  const auto stored = doc.at("manifests").at(key).at("names").get<std::vector<std::string>>();
  const auto hash = doc.at("manifests").at(key).at("hash").get<std::string>();
  if (manifest_hash(stored) != hash) throw VersionError(std::string(key) + " manifest hash does not match its names");
  if (stored != current) {
    throw VersionError(std::string(key) + " manifest " + hash + " differs from this build's " + manifest_hash(current));
  }
}

}  // namespace

json pipeline_to_json(const fusion::TrainedPipeline& p) {
  const auto& ctx = p.config.context;
  json doc;
  doc["schema"] = kBundleSchema;
  doc["kind"] = fusion::to_string(p.kind);
  doc["context"] = {
      {"before", ctx.before},
      {"after", ctx.after},
      {"window_len", ctx.window_len},
      {"damping", ctx.graphs.damping},
      {"graphs", {{"before", ctx.graphs.before}, {"after", ctx.graphs.after}, {"full", ctx.graphs.full}}},
  };
  doc["training"] = {
      {"C", p.config.C},
      {"inner_folds", p.config.inner_folds},
      {"cross_fit", p.config.cross_fit},
      {"seed", p.config.seed},
      {"feature_subset", p.config.feature_subset},
  };
  doc["manifests"] = {
      {"content", {{"hash", manifest_hash(p.content_manifest)}, {"names", p.content_manifest}}},
      {"graph", {{"hash", manifest_hash(p.graph_manifest)}, {"names", p.graph_manifest}}},
  };
  doc["lexicon"] = p.lexicon.entries();
  if (p.uses_text()) {
    const auto& t = p.content.tfidf;
    const auto& nb = p.content.nb;
    doc["tfidf"] = tables_to_json(t.vocabulary, t.df_abuse, t.df_non_abuse, t.n_abuse, t.n_non_abuse);
    doc["naive_bayes"] = tables_to_json(nb.vocabulary, nb.df_abuse, nb.df_non_abuse, nb.n_abuse, nb.n_non_abuse);
  }
  if (p.content_stage) doc["content_stage"] = stage_to_json(*p.content_stage);
  if (p.graph_stage) doc["graph_stage"] = stage_to_json(*p.graph_stage);
  doc["main"] = stage_to_json(p.main);
  return doc;
}

fusion::TrainedPipeline pipeline_from_json(const json& doc) {
  if (!doc.is_object() || !doc.contains("schema")) throw ParseError(0, "not a pipeline bundle");
  const auto schema = doc.at("schema").get<std::string>();
  if (schema != kBundleSchema) {
    throw VersionError("bundle schema '" + schema + "' is not supported (expected " + std::string(kBundleSchema) + ")");
  }
  try {
    fusion::TrainedPipeline p;
    p.kind = fusion::parse_pipeline_kind(doc.at("kind").get<std::string>());
    auto& ctx = p.config.context;
    const auto& c = doc.at("context");
    c.at("before").get_to(ctx.before);
    c.at("after").get_to(ctx.after);
    c.at("window_len").get_to(ctx.window_len);
    c.at("damping").get_to(ctx.graphs.damping);
    c.at("graphs").at("before").get_to(ctx.graphs.before);
    c.at("graphs").at("after").get_to(ctx.graphs.after);
    c.at("graphs").at("full").get_to(ctx.graphs.full);
    const auto& t = doc.at("training");
    t.at("C").get_to(p.config.C);
    t.at("inner_folds").get_to(p.config.inner_folds);
    t.at("cross_fit").get_to(p.config.cross_fit);
    t.at("seed").get_to(p.config.seed);
    t.at("feature_subset").get_to(p.config.feature_subset);

    p.content_manifest = content::content_manifest();
    p.graph_manifest = graph_feature_manifest(ctx.graphs);
    check_manifest(doc, "content", p.content_manifest);
    check_manifest(doc, "graph", p.graph_manifest);

    p.lexicon = content::BadWordLexicon(doc.at("lexicon").get<std::vector<std::string>>());
    if (p.uses_text()) {
      p.content.tfidf = tables_from_json<content::TfIdfModel>(doc.at("tfidf"));
      p.content.nb = tables_from_json<learn::NBModel>(doc.at("naive_bayes"));
    }
    if (doc.contains("content_stage")) p.content_stage = stage_from_json(doc.at("content_stage"));
    if (doc.contains("graph_stage")) p.graph_stage = stage_from_json(doc.at("graph_stage"));
    p.main = stage_from_json(doc.at("main"));
    const bool fused = p.kind == fusion::PipelineKind::kLate || p.kind == fusion::PipelineKind::kHybrid;
    if (fused != (p.content_stage && p.graph_stage)) throw ParseError(0, "base stages do not match the pipeline kind");
    return p;
  } catch (const json::exception& e) {
    throw ParseError(0, std::string("malformed bundle: ") + e.what());
  }
}

std::string dump_bundle(const fusion::TrainedPipeline& p) { return pipeline_to_json(p).dump(1); }

void save_bundle(const std::filesystem::path& path, const fusion::TrainedPipeline& p) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << dump_bundle(p) << '\n';
}

fusion::TrainedPipeline load_bundle(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read bundle " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw ParseError(0, std::string("bundle is not valid JSON: ") + e.what());
  }
  return pipeline_from_json(doc);
}

}  // namespace convabuse
