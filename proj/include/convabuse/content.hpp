#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "convabuse/corpus.hpp"
#include "convabuse/learn.hpp"

namespace convabuse::content {

/// Lower-cases, drops Unicode punctuation and splits on Unicode whitespace.
std::vector<std::string> normalize_tokenize(std::string_view text);

/// Reduces every run of three or more identical code points to two.
std::string collapse(std::string_view text);

/// Length in code points over the number of LZW codes needed to encode the
/// text. The initial dictionary holds the distinct code points of the text.
/// Empty text gives 1.
double lzw_ratio(std::string_view text);

/// Character statistics, in feature order:
///   length, avg word length, max word length, unique chars,
///   (count, ratio) for letters, digits, punctuation, whitespace, symbols,
///   other, then (count, ratio) of capital letters.
/// Words here are the whitespace-separated chunks of the raw text.
std::array<double, 18> char_class_profile(std::string_view text);

struct WordStats {
  std::size_t words = 0;
  std::size_t unique_words = 0;
};

WordStats word_stats(std::string_view text);

class BadWordLexicon {
 public:
  BadWordLexicon() = default;
  /// Entries are lower-cased and deduplicated.
  explicit BadWordLexicon(std::vector<std::string> entries);

  /// One entry per line, '#' starts a comment. Throws ConfigError when the
  /// file cannot be read.
  static BadWordLexicon load(const std::filesystem::path& path);

  bool contains(std::string_view token) const;
  const std::vector<std::string>& entries() const noexcept { return entries_; }

 private:
  std::vector<std::string> entries_;  // sorted
};

/// Number of tokens of normalize_tokenize(text) found in the lexicon.
std::size_t badword_count(std::string_view text, const BadWordLexicon& lexicon);

/// Per-class document frequencies over token sets.
struct TfIdfModel {
  std::vector<std::string> vocabulary;  // sorted
  std::vector<std::uint32_t> df_abuse;
  std::vector<std::uint32_t> df_non_abuse;
  std::uint32_t n_abuse = 0;
  std::uint32_t n_non_abuse = 0;

  bool fitted() const noexcept { return n_abuse > 0 && n_non_abuse > 0; }
};

/// Documents are token lists. Throws FitError when a class is empty.
TfIdfModel tfidf_fit(const std::vector<std::vector<std::string>>& docs, const std::vector<Label>& labels);

/// Sum over distinct tokens of tf * (ln((1 + N_c) / (1 + df_c)) + 1).
double tfidf_score(const TfIdfModel& model, std::span<const std::string> tokens, Label cls);

/// The statistics fitted on training messages.
struct ContentModels {
  TfIdfModel tfidf;
  learn::NBModel nb;
};

/// Fits tf-idf and Naive Bayes on the raw-text tokens of the given messages.
ContentModels fit_content_models(std::span<const std::string> texts, const std::vector<Label>& labels);

inline constexpr std::size_t kContentFeatureCount = 29;

const std::vector<std::string>& content_manifest();

/// The 29 content features of one message. Throws ConfigError when the
/// models are not fitted.
std::vector<double> content_feature_vector(std::string_view text, const ContentModels& models,
                                           const BadWordLexicon& lexicon);

}  // namespace convabuse::content
