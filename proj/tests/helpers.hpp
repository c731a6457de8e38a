#pragma once

#include <string>
#include <vector>

#include "convabuse/corpus.hpp"

namespace testing {

/// One thread "t" whose i-th message is written by authors[i].
inline convabuse::Corpus thread_of(const std::vector<std::string>& authors, const std::string& thread = "t") {
  std::vector<convabuse::Message> msgs;
  for (std::size_t i = 0; i < authors.size(); ++i) {
    convabuse::Message m;
    m.message_id = thread + "_" + std::to_string(1000 + i);
    m.thread_id = thread;
    m.author_id = authors[i];
    m.timestamp = static_cast<std::int64_t>(i) * 1000;
    m.text = "message " + std::to_string(i);
    msgs.push_back(m);
  }
  return convabuse::Corpus::from_messages(std::move(msgs));
}

}  // namespace testing

#include "convabuse/content.hpp"
#include "convabuse/eval.hpp"
#include "convabuse/synth.hpp"

namespace testing {

/// A 40-thread synthetic experiment (about 130 balanced messages), built once.
inline const convabuse::eval::Experiment& small_experiment() {
  static const convabuse::eval::Experiment e = [] {
    convabuse::SynthParams p;
    p.n_threads = 40;
    return convabuse::eval::prepare_experiment(convabuse::generate_synthetic(p), 42, {}, 2);
  }();
  return e;
}

inline const convabuse::content::BadWordLexicon& synthetic_lexicon() {
  static const convabuse::content::BadWordLexicon lex(convabuse::synthetic_lexicon());
  return lex;
}

inline std::vector<convabuse::Label> labels_of(const std::vector<convabuse::fusion::Example>& xs) {
  std::vector<convabuse::Label> out;
  for (const auto& x : xs) out.push_back(x.label);
  return out;
}

}  // namespace testing

#include "convabuse/rng.hpp"
#include "convabuse/select.hpp"

namespace testing {

/// `planted` informative columns ("signal_k") at random positions among
/// `noise` columns ("noise_k"), all standard normal. The label is the sign
/// of the sum of the informative columns plus N(0, label_noise^2), so every
/// informative column carries its own share of the signal.
inline convabuse::select::SelectionData planted_selection(std::uint64_t seed, std::size_t planted, std::size_t noise,
                                                           std::size_t n = 400, double label_noise = 0.3,
                                                           std::size_t repetitions = 10) {
  using namespace convabuse;
  Rng rng(seed);
  std::vector<std::string> names;
  for (std::size_t k = 0; k < planted; ++k) names.push_back("signal_" + std::to_string(k));
  for (std::size_t k = 0; k < noise; ++k) names.push_back("noise_" + std::to_string(k));
  rng.shuffle(names);
  std::vector<Label> labels;
  Matrix x(n, names.size());
  for (std::size_t i = 0; i < n; ++i) {
    double sum = 0.0;
    for (std::size_t j = 0; j < names.size(); ++j) {
      x(i, j) = rng.normal();
      if (names[j].rfind("signal_", 0) == 0) sum += x(i, j);
    }
    labels.push_back(sum + label_noise * rng.normal() > 0.0 ? Label::kAbuse : Label::kNonAbuse);
  }
  const auto plan = eval::make_splits(labels, Rng::derive(seed, 1), repetitions);
  return select::selection_data(names, x, labels, plan);
}

}  // namespace testing
