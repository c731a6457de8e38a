#include "convabuse/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "convabuse/error.hpp"
#include "convabuse/rng.hpp"

namespace convabuse {
namespace {

const std::vector<std::string> kNeutral = {
    "the",     "a",       "we",      "you",     "they",    "it",      "is",      "are",
    "was",     "go",      "going",   "come",    "base",    "fleet",   "ship",    "ships",
    "planet",  "attack",  "defense", "metal",   "crystal", "fuel",    "trade",   "alliance",
    "guild",   "war",     "peace",   "help",    "need",    "have",    "got",     "get",
    "send",    "move",    "wait",    "now",     "later",   "today",   "tonight", "tomorrow",
    "morning", "night",   "time",    "ok",      "okay",    "yes",     "no",      "maybe",
    "thanks",  "thank",   "please",  "sure",    "good",    "nice",    "great",   "fine",
    "cool",    "well",    "hello",   "hi",      "hey",     "bye",     "see",     "look",
    "map",     "sector",  "system",  "galaxy",  "colony",  "build",   "research", "tech",
    "upgrade", "level",   "points",  "score",   "rank",    "top",     "new",     "old",
    "player",  "players", "team",    "friend",  "friends", "chat",    "message", "server",
    "update",  "bug",     "fixed",   "lag",     "online",  "offline", "back",    "soon",
    "here",    "there",   "where",   "when",    "what",    "who",     "how",     "why",
    "and",     "or",      "but",     "so",      "if",      "then",    "with",    "for",
    "from",    "to",      "in",      "on",      "at",      "by",      "of",      "my",
    "your",    "our",     "their",   "this",    "that",    "these",   "some",    "all",
    "any",     "more",    "less",    "much",    "many",    "one",     "two",     "three",
    "first",   "last",    "next",    "game",    "round",   "mission", "quest",   "reward",
};

const std::vector<std::string> kLexicon = {
    "idiot", "moron", "stupid", "dumb",   "loser", "noob",  "trash",  "scum",
    "jerk",  "fool",  "clown",  "pathetic", "shut", "hate", "ugly",  "worthless",
};

std::string pick(Rng& rng, const std::vector<std::string>& words) {
  return words[rng.index(words.size())];
}

std::string to_upper_ascii(std::string s) {
  for (auto& c : s) {
    if (c >= 'a' && c <= 'z') c = static_cast<char>(c - 32);
  }
  return s;
}

// Repeats the last letter of the word 3 to 6 extra times.
std::string elongate(Rng& rng, std::string word) {
  const char c = word.back();
  word.append(3 + rng.index(4), c);
  return word;
}

std::vector<std::string> neutral_words(Rng& rng) {
  const std::size_t len = 3 + rng.index(10);
  std::vector<std::string> words;
  for (std::size_t i = 0; i < len; ++i) words.push_back(pick(rng, kNeutral));
  return words;
}

std::string join(const std::vector<std::string>& words) {
  std::string out;
  for (const auto& w : words) {
    if (!out.empty()) out += ' ';
    out += w;
  }
  return out;
}

std::string benign_text(Rng& rng) {
  auto words = neutral_words(rng);
  // Light noise so that shouting and elongation are not perfect abuse cues.
  if (rng.bernoulli(0.03)) {
    auto& w = words[rng.index(words.size())];
    w = elongate(rng, w);
  }
  if (rng.bernoulli(0.02)) {
    auto& w = words[rng.index(words.size())];
    w = to_upper_ascii(w);
  }
  std::string text = join(words);
  if (rng.bernoulli(0.2)) text += rng.bernoulli(0.5) ? "?" : "!";
  return text;
}

std::string abusive_text(Rng& rng, const SynthParams& p) {
  auto words = neutral_words(rng);
  if (rng.bernoulli(p.badword_injection_rate)) {
    const std::size_t count = 1 + rng.index(2);
    for (std::size_t i = 0; i < count; ++i) words[rng.index(words.size())] = pick(rng, kLexicon);
  }
  if (rng.bernoulli(p.caps_rate)) {
    auto& w = words[rng.index(words.size())];
    w = elongate(rng, w);
  }
  std::string text = join(words);
  if (rng.bernoulli(p.caps_rate)) text = to_upper_ascii(text) + "!!";
  return text;
}

std::string numbered(char prefix, std::size_t n) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%c%05zu", prefix, n);
  return buf;
}

}  // namespace

const std::vector<std::string>& synthetic_lexicon() { return kLexicon; }

Corpus generate_synthetic(const SynthParams& p) {
  if (p.n_threads == 0 || p.messages_per_thread == 0) {
    throw ConfigError("n_threads and messages_per_thread must be positive");
  }
  if (p.authors_per_thread < 2) throw ConfigError("authors_per_thread must be at least 2");
  for (double r : {p.abuse_rate, p.badword_injection_rate, p.caps_rate}) {
    if (!(r >= 0.0 && r <= 1.0)) throw ConfigError("rates must lie in [0, 1]");
  }
  if (p.pile_on_size + 1 > p.authors_per_thread) {
    throw ConfigError("pile_on_size must be smaller than authors_per_thread");
  }

  Rng rng(p.seed);
  const std::size_t mpt = p.messages_per_thread;
  const std::size_t total = p.n_threads * mpt;
  const auto n_abuse = static_cast<std::size_t>(std::llround(p.abuse_rate * static_cast<double>(total)));

  // Authors come from a shared pool so that people meet across threads.
  const std::size_t pool = std::max(p.authors_per_thread, p.n_threads * p.authors_per_thread / 4);
  std::vector<std::vector<std::size_t>> cast(p.n_threads);
  std::vector<std::vector<std::size_t>> seq(p.n_threads, std::vector<std::size_t>(mpt));
  for (std::size_t t = 0; t < p.n_threads; ++t) {
    std::vector<std::size_t> ids(pool);
    for (std::size_t i = 0; i < pool; ++i) ids[i] = i;
    for (std::size_t i = 0; i < p.authors_per_thread; ++i) {
      std::swap(ids[i], ids[i + rng.index(pool - i)]);
    }
    cast[t].assign(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(p.authors_per_thread));
    // Skewed activity: author k is picked with weight 1 / (k + 1).
    std::vector<double> cum(p.authors_per_thread);
    double acc = 0.0;
    for (std::size_t k = 0; k < cum.size(); ++k) cum[k] = acc += 1.0 / static_cast<double>(k + 1);
    std::size_t prev = p.authors_per_thread;
    for (std::size_t i = 0; i < mpt; ++i) {
      std::size_t k;
      do {
        const double u = rng.uniform() * acc;
        k = static_cast<std::size_t>(std::upper_bound(cum.begin(), cum.end(), u) - cum.begin());
        k = std::min(k, cum.size() - 1);
      } while (k == prev && rng.bernoulli(0.7));
      seq[t][i] = k;
      prev = k;
    }
  }

  // Place abusive messages so that pile-ons never overlap.
  const std::size_t burst = p.pile_on_size == 0 ? 0 : 2 * p.pile_on_size - 1;
  const std::size_t gap = burst + 2;
  std::vector<std::pair<std::size_t, std::size_t>> candidates;
  for (std::size_t t = 0; t < p.n_threads; ++t) {
    for (std::size_t i = 1; i + burst < mpt; ++i) candidates.emplace_back(t, i);
  }
  rng.shuffle(candidates);
  std::vector<std::vector<std::size_t>> placed(p.n_threads);
  std::size_t n_placed = 0;
  for (const auto& [t, i] : candidates) {
    if (n_placed == n_abuse) break;
    bool clash = false;
    for (std::size_t j : placed[t]) {
      if ((i > j ? i - j : j - i) < gap) {
        clash = true;
        break;
      }
    }
    if (clash) continue;
    placed[t].push_back(i);
    ++n_placed;
  }
  if (n_placed < n_abuse) {
    throw ConfigError("cannot place " + std::to_string(n_abuse) +
                      " abusive messages; lower abuse_rate or pile_on_size");
  }

  enum class Role { kBenign, kAbuse, kPileOn, kAbuserReply };
  std::vector<Message> messages;
  messages.reserve(total);
  for (std::size_t t = 0; t < p.n_threads; ++t) {
    std::vector<Role> role(mpt, Role::kBenign);
    std::vector<std::size_t> addressee(mpt, 0);
    std::sort(placed[t].begin(), placed[t].end());
    for (std::size_t i : placed[t]) {
      role[i] = Role::kAbuse;
      const std::size_t abuser = seq[t][i];
      std::vector<std::size_t> others;
      for (std::size_t k = 0; k < p.authors_per_thread; ++k) {
        if (k != abuser) others.push_back(k);
      }
      rng.shuffle(others);
      for (std::size_t r = 0; r < burst; ++r) {
        const std::size_t pos = i + 1 + r;
        if (r % 2 == 0) {
          seq[t][pos] = others[r / 2];
          role[pos] = Role::kPileOn;
        } else {
          seq[t][pos] = abuser;
          role[pos] = Role::kAbuserReply;
        }
        addressee[pos] = abuser;
      }
    }

    std::int64_t ts = 1'600'000'000'000LL + static_cast<std::int64_t>(t) * 86'400'000LL;
    for (std::size_t i = 0; i < mpt; ++i) {
      ts += 1000 + static_cast<std::int64_t>(rng.index(60'000));
      Message m;
      m.message_id = numbered('t', t) + "_" + numbered('m', i);
      m.thread_id = numbered('t', t);
      m.author_id = numbered('u', cast[t][seq[t][i]]);
      m.timestamp = ts;
      m.label = Label::kNonAbuse;
      switch (role[i]) {
        case Role::kAbuse:
          m.text = abusive_text(rng, p);
          m.label = Label::kAbuse;
          break;
        case Role::kPileOn:
          m.text = "@" + numbered('u', cast[t][addressee[i]]) + " " + benign_text(rng);
          break;
        case Role::kAbuserReply:
        case Role::kBenign:
          m.text = benign_text(rng);
          break;
      }
      messages.push_back(std::move(m));
    }
  }
  return Corpus::from_messages(std::move(messages));
}

}  // namespace convabuse
