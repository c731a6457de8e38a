#include "convabuse/content.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <unordered_map>
#include <unordered_set>

#include "convabuse/error.hpp"
#include "convabuse/unicode.hpp"

namespace convabuse::content {

using unicode::CharClass;

std::vector<std::string> normalize_tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::u32string current;
  auto flush = [&] {
    if (!current.empty()) tokens.push_back(unicode::encode_utf8(current));
    current.clear();
  };
  for (char32_t cp : unicode::decode_utf8(text)) {
    const CharClass cls = unicode::classify(cp);
    if (cls == CharClass::kSpace) {
      flush();
    } else if (cls != CharClass::kPunct) {
      current.push_back(unicode::to_lower(cp));
    }
  }
  flush();
  return tokens;
}

std::string collapse(std::string_view text) {
  const std::u32string in = unicode::decode_utf8(text);
  std::u32string out;
  out.reserve(in.size());
  std::size_t run = 0;
  for (std::size_t i = 0; i < in.size(); ++i) {
    run = (i > 0 && in[i] == in[i - 1]) ? run + 1 : 1;
    if (run <= 2) out.push_back(in[i]);
  }
  return unicode::encode_utf8(out);
}

double lzw_ratio(std::string_view text) {
  const std::u32string cps = unicode::decode_utf8(text);
  if (cps.empty()) return 1.0;
  std::u32string alphabet = cps;
  std::sort(alphabet.begin(), alphabet.end());
  alphabet.erase(std::unique(alphabet.begin(), alphabet.end()), alphabet.end());

  // Dictionary as a trie: (prefix code, next code point) -> code.
  std::unordered_map<std::uint64_t, std::uint32_t> trie;
  auto key = [](std::uint32_t prefix, char32_t c) { return (std::uint64_t{prefix} << 32) | c; };
  auto single = [&](char32_t c) {
    return static_cast<std::uint32_t>(std::lower_bound(alphabet.begin(), alphabet.end(), c) - alphabet.begin());
  };
  auto next_code = static_cast<std::uint32_t>(alphabet.size());
  std::size_t emitted = 0;
  std::uint32_t w = single(cps[0]);
  for (std::size_t i = 1; i < cps.size(); ++i) {
    const auto k = key(w, cps[i]);
    const auto it = trie.find(k);
    if (it != trie.end()) {
      w = it->second;
    } else {
      ++emitted;
      trie.emplace(k, next_code++);
      w = single(cps[i]);
    }
  }
  ++emitted;
  return static_cast<double>(cps.size()) / static_cast<double>(emitted);
}

std::array<double, 18> char_class_profile(std::string_view text) {
  const std::u32string cps = unicode::decode_utf8(text);
  std::array<double, 18> out{};
  const double n = static_cast<double>(cps.size());
  if (cps.empty()) return out;

  // letters, digits, punctuation, whitespace, symbols, other
  std::array<std::size_t, 6> counts{};
  std::size_t capitals = 0;
  std::size_t word_chars = 0;
  std::size_t words = 0;
  std::size_t longest = 0;
  std::size_t current = 0;
  for (char32_t cp : cps) {
    const CharClass cls = unicode::classify(cp);
    switch (cls) {
      case CharClass::kUpper:
        ++capitals;
        ++counts[0];
        break;
      case CharClass::kLetter:
        ++counts[0];
        break;
      case CharClass::kDigit:
        ++counts[1];
        break;
      case CharClass::kPunct:
        ++counts[2];
        break;
      case CharClass::kSpace:
        ++counts[3];
        break;
      case CharClass::kSymbol:
        ++counts[4];
        break;
      case CharClass::kOther:
        ++counts[5];
        break;
    }
    if (cls == CharClass::kSpace) {
      if (current > 0) ++words;
      current = 0;
    } else {
      ++current;
      ++word_chars;
      longest = std::max(longest, current);
    }
  }
  if (current > 0) ++words;

  std::u32string distinct = cps;
  std::sort(distinct.begin(), distinct.end());
  const auto unique = static_cast<std::size_t>(std::unique(distinct.begin(), distinct.end()) - distinct.begin());

  out[0] = n;
  out[1] = words > 0 ? static_cast<double>(word_chars) / static_cast<double>(words) : 0.0;
  out[2] = static_cast<double>(longest);
  out[3] = static_cast<double>(unique);
  for (std::size_t c = 0; c < 6; ++c) {
    out[4 + 2 * c] = static_cast<double>(counts[c]);
    out[5 + 2 * c] = static_cast<double>(counts[c]) / n;
  }
  out[16] = static_cast<double>(capitals);
  out[17] = static_cast<double>(capitals) / n;
  return out;
}

WordStats word_stats(std::string_view text) {
  auto tokens = normalize_tokenize(text);
  WordStats s;
  s.words = tokens.size();
  std::sort(tokens.begin(), tokens.end());
  s.unique_words = static_cast<std::size_t>(std::unique(tokens.begin(), tokens.end()) - tokens.begin());
  return s;
}

// ---------------------------------------------------------------------------

namespace {

std::string lower(std::string_view s) {
  std::u32string cps = unicode::decode_utf8(s);
  for (auto& c : cps) c = unicode::to_lower(c);
  return unicode::encode_utf8(cps);
}

std::string_view trim(std::string_view s) {
  const auto* ws = " \t\r\n\v\f";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

}  // namespace

BadWordLexicon::BadWordLexicon(std::vector<std::string> entries) {
  for (auto& e : entries) {
    auto t = lower(trim(e));
    if (!t.empty()) entries_.push_back(std::move(t));
  }
  std::sort(entries_.begin(), entries_.end());
  entries_.erase(std::unique(entries_.begin(), entries_.end()), entries_.end());
}

BadWordLexicon BadWordLexicon::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read lexicon file " + path.string());
  std::vector<std::string> entries;
  std::string line;
  while (std::getline(in, line)) {
    std::string_view v = line;
    if (const auto hash = v.find('#'); hash != std::string_view::npos) v = v.substr(0, hash);
    v = trim(v);
    if (!v.empty()) entries.emplace_back(v);
  }
  return BadWordLexicon(std::move(entries));
}

bool BadWordLexicon::contains(std::string_view token) const {
  return std::binary_search(entries_.begin(), entries_.end(), token, std::less<>{});
}

std::size_t badword_count(std::string_view text, const BadWordLexicon& lexicon) {
  std::size_t n = 0;
  for (const auto& tok : normalize_tokenize(text)) n += lexicon.contains(tok) ? 1 : 0;
  return n;
}

// ---------------------------------------------------------------------------

TfIdfModel tfidf_fit(const std::vector<std::vector<std::string>>& docs, const std::vector<Label>& labels) {
  // The document-frequency tables are exactly those of Bernoulli NB.
  learn::NBModel counts;
  try {
    counts = learn::nb_train(docs, labels);
  } catch (const FitError& e) {
    throw FitError(std::string("tf-idf: ") + e.what());
  }
  TfIdfModel m;
  m.vocabulary = std::move(counts.vocabulary);
  m.df_abuse = std::move(counts.df_abuse);
  m.df_non_abuse = std::move(counts.df_non_abuse);
  m.n_abuse = counts.n_abuse;
  m.n_non_abuse = counts.n_non_abuse;
  return m;
}

double tfidf_score(const TfIdfModel& model, std::span<const std::string> tokens, Label cls) {
  if (!model.fitted()) throw ConfigError("tf-idf model is not fitted");
  if (cls != Label::kAbuse && cls != Label::kNonAbuse) throw ConfigError("tf-idf class must be abuse or non_abuse");
  const bool abuse = cls == Label::kAbuse;
  const double docs = abuse ? model.n_abuse : model.n_non_abuse;
  const auto& df = abuse ? model.df_abuse : model.df_non_abuse;

  std::vector<std::string_view> sorted(tokens.begin(), tokens.end());
  std::sort(sorted.begin(), sorted.end());
  double score = 0.0;
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    const auto it = std::lower_bound(model.vocabulary.begin(), model.vocabulary.end(), sorted[i], std::less<>{});
    double d = 0.0;
    if (it != model.vocabulary.end() && *it == sorted[i]) d = df[static_cast<std::size_t>(it - model.vocabulary.begin())];
    score += static_cast<double>(j - i) * (std::log((1.0 + docs) / (1.0 + d)) + 1.0);
    i = j;
  }
  return score;
}

ContentModels fit_content_models(std::span<const std::string> texts, const std::vector<Label>& labels) {
  std::vector<std::vector<std::string>> docs;
  docs.reserve(texts.size());
  for (const auto& t : texts) docs.push_back(normalize_tokenize(t));
  ContentModels m;
  m.tfidf = tfidf_fit(docs, labels);
  m.nb = learn::nb_train(docs, labels);
  return m;
}

const std::vector<std::string>& content_manifest() {
  static const std::vector<std::string> names{
      "length",
      "avg_word_length",
      "max_word_length",
      "unique_chars",
      "letters_count",
      "letters_ratio",
      "digits_count",
      "digits_ratio",
      "punctuation_count",
      "punctuation_ratio",
      "whitespace_count",
      "whitespace_ratio",
      "symbols_count",
      "symbols_ratio",
      "other_count",
      "other_ratio",
      "capitals_count",
      "capital_ratio",
      "lzw_ratio",
      "collapse_delta",
      "word_count",
      "unique_word_count",
      "badwords_raw",
      "badwords_collapsed",
      "tfidf_abuse_raw",
      "tfidf_nonabuse_raw",
      "tfidf_abuse_collapsed",
      "tfidf_nonabuse_collapsed",
      "naive_bayes",
  };
  return names;
}

std::vector<double> content_feature_vector(std::string_view text, const ContentModels& models,
                                           const BadWordLexicon& lexicon) {
  if (!models.tfidf.fitted() || !models.nb.fitted()) throw ConfigError("content models are not fitted");
  std::vector<double> f;
  f.reserve(kContentFeatureCount);
  const auto profile = char_class_profile(text);
  f.insert(f.end(), profile.begin(), profile.end());

  const std::string collapsed = collapse(text);
  const auto raw_tokens = normalize_tokenize(text);
  const auto col_tokens = normalize_tokenize(collapsed);
  f.push_back(lzw_ratio(text));
  f.push_back(profile[0] - static_cast<double>(unicode::decode_utf8(collapsed).size()));
  const WordStats ws = word_stats(text);
  f.push_back(static_cast<double>(ws.words));
  f.push_back(static_cast<double>(ws.unique_words));
  f.push_back(static_cast<double>(badword_count(text, lexicon)));
  f.push_back(static_cast<double>(badword_count(collapsed, lexicon)));
  f.push_back(tfidf_score(models.tfidf, raw_tokens, Label::kAbuse));
  f.push_back(tfidf_score(models.tfidf, raw_tokens, Label::kNonAbuse));
  f.push_back(tfidf_score(models.tfidf, col_tokens, Label::kAbuse));
  f.push_back(tfidf_score(models.tfidf, col_tokens, Label::kNonAbuse));
  f.push_back(learn::nb_posterior(models.nb, raw_tokens));
  return f;
}

}  // namespace convabuse::content
