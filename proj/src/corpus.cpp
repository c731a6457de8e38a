#include "convabuse/corpus.hpp"

#include <algorithm>
#include <istream>
#include <ostream>

#include "convabuse/error.hpp"
#include "convabuse/rng.hpp"
#include "json.hpp"

namespace convabuse {

using nlohmann::json;

std::string_view to_string(Label label) {
  switch (label) {
    case Label::kAbuse:
      return "abuse";
    case Label::kNonAbuse:
      return "non_abuse";
    case Label::kUnlabeled:
      return "unlabeled";
  }
  return "unlabeled";
}

Label parse_label(std::string_view name) {
  if (name == "abuse") return Label::kAbuse;
  if (name == "non_abuse") return Label::kNonAbuse;
  if (name == "unlabeled") return Label::kUnlabeled;
  throw DataError("unknown label '" + std::string(name) + "'");
}

Corpus Corpus::from_messages(std::vector<Message> messages) {
  Corpus corpus;
  std::sort(messages.begin(), messages.end(), [](const Message& a, const Message& b) {
    if (a.thread_id != b.thread_id) return a.thread_id < b.thread_id;
    if (a.timestamp != b.timestamp) return a.timestamp < b.timestamp;
    return a.message_id < b.message_id;
  });
  for (auto& m : messages) {
    if (corpus.threads_.empty() || corpus.threads_.back().thread_id != m.thread_id) {
      corpus.threads_.push_back(Thread{m.thread_id, {}});
    }
    corpus.threads_.back().messages.push_back(std::move(m));
  }
  for (std::size_t t = 0; t < corpus.threads_.size(); ++t) {
    const auto& msgs = corpus.threads_[t].messages;
    for (std::size_t i = 0; i < msgs.size(); ++i) {
      auto [it, inserted] = corpus.index_.emplace(msgs[i].message_id, Location{t, i});
      if (!inserted) throw DataError("duplicate message_id '" + msgs[i].message_id + "'");
    }
  }
  return corpus;
}

std::optional<Corpus::Location> Corpus::find(std::string_view message_id) const {
  auto it = index_.find(std::string(message_id));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

Corpus::Location Corpus::locate(std::string_view message_id) const {
  auto loc = find(message_id);
  if (!loc) throw NotFoundError("unknown message_id '" + std::string(message_id) + "'");
  return *loc;
}

IngestStats Corpus::stats() const {
  IngestStats s;
  s.threads = threads_.size();
  for (const auto& t : threads_) {
    for (const auto& m : t.messages) {
      ++s.messages;
      switch (m.label) {
        case Label::kAbuse:
          ++s.abuse;
          break;
        case Label::kNonAbuse:
          ++s.non_abuse;
          break;
        case Label::kUnlabeled:
          ++s.unlabeled;
          break;
      }
    }
  }
  return s;
}

namespace {

std::string required_string(const json& obj, const char* key, std::size_t line) {
  auto it = obj.find(key);
  if (it == obj.end()) throw ParseError(line, std::string("missing field '") + key + "'");
  if (!it->is_string()) throw ParseError(line, std::string("field '") + key + "' must be a string");
  return it->get<std::string>();
}

}  // namespace

Corpus parse_corpus(std::istream& in) {
  std::vector<Message> messages;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ParseError(line_no, std::string("invalid JSON: ") + e.what());
    }
    if (!obj.is_object()) throw ParseError(line_no, "expected a JSON object");
    Message m;
    m.message_id = required_string(obj, "message_id", line_no);
    m.thread_id = required_string(obj, "thread_id", line_no);
    m.author_id = required_string(obj, "author_id", line_no);
    m.text = required_string(obj, "text", line_no);
    auto ts = obj.find("timestamp");
    if (ts == obj.end()) throw ParseError(line_no, "missing field 'timestamp'");
    if (!ts->is_number_integer()) throw ParseError(line_no, "field 'timestamp' must be an integer");
    m.timestamp = ts->get<std::int64_t>();
    if (auto lb = obj.find("label"); lb != obj.end() && !lb->is_null()) {
      if (!lb->is_string()) throw ParseError(line_no, "field 'label' must be a string");
      try {
        m.label = parse_label(lb->get<std::string>());
      } catch (const DataError& e) {
        throw ParseError(line_no, e.what());
      }
    }
    messages.push_back(std::move(m));
  }
  return Corpus::from_messages(std::move(messages));
}

void write_corpus(std::ostream& out, const Corpus& corpus) {
  for (const auto& t : corpus.threads()) {
    for (const auto& m : t.messages) {
      json obj = {{"message_id", m.message_id}, {"thread_id", m.thread_id},
                  {"author_id", m.author_id},   {"timestamp", m.timestamp},
                  {"text", m.text},             {"label", std::string(to_string(m.label))}};
      out << obj.dump() << '\n';
    }
  }
}

ContextSlice thread_context(const Corpus& corpus, std::string_view target_id,
                            std::size_t before_count, std::size_t after_count) {
  const auto loc = corpus.locate(target_id);
  const auto& msgs = corpus.threads()[loc.thread].messages;
  const std::size_t first = loc.index >= before_count ? loc.index - before_count : 0;
  const std::size_t last = std::min(msgs.size() - 1, loc.index + after_count);
  ContextSlice slice;
  slice.messages = std::span<const Message>(msgs).subspan(first, last - first + 1);
  slice.target_index = loc.index - first;
  slice.before_count = before_count;
  slice.after_count = after_count;
  return slice;
}

std::size_t LabeledDataset::count(Label label) const {
  return static_cast<std::size_t>(std::count_if(
      items.begin(), items.end(), [label](const LabeledItem& it) { return it.label == label; }));
}

LabeledDataset build_balanced_dataset(const Corpus& corpus, std::uint64_t seed) {
  std::vector<const Message*> abuse;
  std::vector<const Message*> benign;
  for (const auto& t : corpus.threads()) {
    for (const auto& m : t.messages) {
      if (m.label == Label::kAbuse) abuse.push_back(&m);
      if (m.label == Label::kNonAbuse) benign.push_back(&m);
    }
  }
  if (abuse.empty()) throw DataError("corpus contains no abuse-labeled message");
  if (benign.size() < abuse.size()) {
    throw DataError("not enough non_abuse messages: need " + std::to_string(abuse.size()) +
                    ", have " + std::to_string(benign.size()));
  }
  // Partial Fisher-Yates over candidate positions, then restore corpus order.
  std::vector<std::size_t> pos(benign.size());
  for (std::size_t i = 0; i < pos.size(); ++i) pos[i] = i;
  Rng rng(seed);
  for (std::size_t i = 0; i < abuse.size(); ++i) {
    std::swap(pos[i], pos[i + rng.index(pos.size() - i)]);
  }
  pos.resize(abuse.size());
  std::sort(pos.begin(), pos.end());

  LabeledDataset ds;
  ds.items.reserve(2 * abuse.size());
  for (const auto* m : abuse) ds.items.push_back({m->message_id, Label::kAbuse});
  for (std::size_t p : pos) ds.items.push_back({benign[p]->message_id, Label::kNonAbuse});
  return ds;
}

}  // namespace convabuse
