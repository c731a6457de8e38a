#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "convabuse/corpus.hpp"

namespace convabuse {

/// Knobs of the synthetic chat generator. Content signals (bad words,
/// shouting, elongation) and the structural signal (pile-on) are planted
/// independently on abusive messages.
struct SynthParams {
  std::size_t n_threads = 400;
  std::size_t authors_per_thread = 12;
  std::size_t messages_per_thread = 60;
  /// Fraction of all messages labeled abuse; the count is rounded.
  double abuse_rate = 655.0 / 24000.0;
  /// Distinct authors answering the abuser right after the abusive message,
  /// interleaved with replies from the abuser.
  std::size_t pile_on_size = 5;
  double badword_injection_rate = 0.5;
  /// Probability of shouting (all caps); elongation uses the same rate,
  /// drawn independently.
  double caps_rate = 0.3;
  std::uint64_t seed = 42;
};

/// Throws ConfigError on invalid parameters or when the requested number of
/// abusive messages cannot be placed without overlapping pile-ons.
Corpus generate_synthetic(const SynthParams& params);

/// Insults planted by the generator; data/badwords_en.txt holds the same list.
const std::vector<std::string>& synthetic_lexicon();

}  // namespace convabuse
