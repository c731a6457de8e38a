#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace convabuse {

enum class Label { kAbuse, kNonAbuse, kUnlabeled };

std::string_view to_string(Label label);
/// Throws DataError on unknown names.
Label parse_label(std::string_view name);

struct Message {
  std::string message_id;
  std::string thread_id;
  std::string author_id;
  std::int64_t timestamp = 0;  // epoch milliseconds
  std::string text;
  Label label = Label::kUnlabeled;

  bool operator==(const Message&) const = default;
};

struct Thread {
  std::string thread_id;
  std::vector<Message> messages;  // sorted by (timestamp, message_id)
};

struct IngestStats {
  std::size_t messages = 0;
  std::size_t threads = 0;
  std::size_t abuse = 0;
  std::size_t non_abuse = 0;
  std::size_t unlabeled = 0;
};

/// Immutable collection of threads. Threads are ordered by thread_id and
/// messages within a thread by (timestamp, message_id); that order is the
/// "corpus order" used everywhere else.
class Corpus {
 public:
  struct Location {
    std::size_t thread;
    std::size_t index;
  };

  Corpus() = default;

  /// Groups and sorts the messages. Throws DataError on a duplicate id.
  static Corpus from_messages(std::vector<Message> messages);

  const std::vector<Thread>& threads() const noexcept { return threads_; }
  std::size_t size() const noexcept { return index_.size(); }

  std::optional<Location> find(std::string_view message_id) const;
  /// Throws NotFoundError.
  Location locate(std::string_view message_id) const;
  const Message& at(Location loc) const { return threads_[loc.thread].messages[loc.index]; }
  const Message& get(std::string_view message_id) const { return at(locate(message_id)); }

  IngestStats stats() const;

 private:
  std::vector<Thread> threads_;
  std::unordered_map<std::string, Location> index_;
};

/// Reads one JSON object per line. Blank lines are skipped. Throws ParseError
/// carrying the 1-based line number, or DataError for duplicate ids.
Corpus parse_corpus(std::istream& in);
/// Writes the corpus in corpus order, one JSON object per line.
void write_corpus(std::ostream& out, const Corpus& corpus);

/// Window of one thread around a targeted message. Views into a Corpus, which
/// must outlive it.
struct ContextSlice {
  std::span<const Message> messages;
  std::size_t target_index = 0;
  std::size_t before_count = 0;
  std::size_t after_count = 0;

  const Message& target() const { return messages[target_index]; }
};

inline constexpr std::size_t kDefaultContextBefore = 674;
inline constexpr std::size_t kDefaultContextAfter = 675;

ContextSlice thread_context(const Corpus& corpus, std::string_view target_id,
                            std::size_t before_count = kDefaultContextBefore,
                            std::size_t after_count = kDefaultContextAfter);

struct LabeledItem {
  std::string message_id;
  Label label;

  bool operator==(const LabeledItem&) const = default;
};

struct LabeledDataset {
  std::vector<LabeledItem> items;

  std::size_t count(Label label) const;
};

/// All abuse messages plus an equally sized seeded sample of non_abuse ones,
/// both in corpus order (abuse first).
LabeledDataset build_balanced_dataset(const Corpus& corpus, std::uint64_t seed);

}  // namespace convabuse
