#include <algorithm>
#include <set>
#include <sstream>

#include "convabuse/convgraph.hpp"
#include "convabuse/corpus.hpp"
#include "convabuse/error.hpp"
#include "convabuse/rng.hpp"
#include "convabuse/synth.hpp"
#include "doctest.h"
#include "helpers.hpp"

using namespace convabuse;

namespace {

Corpus parse(const std::string& text) {
  std::istringstream in(text);
  return parse_corpus(in);
}

std::string line(const std::string& id, const std::string& thread, const std::string& author, long ts,
                 const std::string& label = "") {
  std::string s = R"({"message_id":")" + id + R"(","thread_id":")" + thread + R"(","author_id":")" + author +
                  R"(","timestamp":)" + std::to_string(ts) + R"(,"text":"hi )" + id + "\"";
  if (!label.empty()) s += R"(,"label":")" + label + "\"";
  return s + "}\n";
}

Corpus labeled_corpus(std::size_t abuse, std::size_t benign) {
  std::vector<Message> msgs;
  for (std::size_t i = 0; i < abuse + benign; ++i) {
    Message m;
    m.message_id = "m" + std::to_string(i);
    m.thread_id = "t" + std::to_string(i % 7);
    m.author_id = "a" + std::to_string(i % 5);
    m.timestamp = static_cast<std::int64_t>(i);
    m.label = i < abuse ? Label::kAbuse : Label::kNonAbuse;
    msgs.push_back(m);
  }
  return Corpus::from_messages(std::move(msgs));
}

}  // namespace

TEST_SUITE("corpus") {
  TEST_CASE("parse sorts each thread by timestamp") {
    const auto c = parse(line("m3", "t", "a", 30) + line("m1", "t", "b", 10) + line("m2", "t", "c", 20));
    REQUIRE(c.threads().size() == 1);
    const auto& msgs = c.threads()[0].messages;
    REQUIRE(msgs.size() == 3);
    CHECK(msgs[0].message_id == "m1");
    CHECK(msgs[1].message_id == "m2");
    CHECK(msgs[2].message_id == "m3");
    CHECK(msgs[0].label == Label::kUnlabeled);
  }

  TEST_CASE("equal timestamps order by message id") {
    const auto c = parse(line("b", "t", "x", 5) + line("a", "t", "y", 5));
    CHECK(c.threads()[0].messages[0].message_id == "a");
  }

  TEST_CASE("missing text is a parse error at its line") {
    const std::string bad = R"({"message_id":"m2","thread_id":"t","author_id":"a","timestamp":1})" "\n";
    try {
      parse(line("m1", "t", "a", 0) + bad);
      FAIL("expected a parse error");
    } catch (const ParseError& e) {
      CHECK(e.line() == 2);
      CHECK(std::string(e.what()).find("text") != std::string::npos);
    }
  }

  TEST_CASE("malformed JSON and bad field types") {
    CHECK_THROWS_AS(parse("{not json\n"), ParseError);
    CHECK_THROWS_AS(parse(R"({"message_id":1,"thread_id":"t","author_id":"a","timestamp":1,"text":""})" "\n"),
                    ParseError);
    CHECK_THROWS_AS(parse(R"({"message_id":"m","thread_id":"t","author_id":"a","timestamp":1.5,"text":""})" "\n"),
                    ParseError);
    CHECK_THROWS_AS(parse(line("m", "t", "a", 1, "spam")), ParseError);
  }

  TEST_CASE("duplicate ids are rejected by name") {
    try {
      parse(line("m1", "t", "a", 0) + line("m1", "u", "b", 1));
      FAIL("expected a duplicate-id error");
    } catch (const DataError& e) {
      CHECK(std::string(e.what()).find("m1") != std::string::npos);
    }
  }

  TEST_CASE("blank lines are skipped and stats are counted") {
    const auto c = parse(line("m1", "t", "a", 0, "abuse") + "\n" + line("m2", "u", "b", 1, "non_abuse") +
                         line("m3", "u", "c", 2));
    const auto s = c.stats();
    CHECK(s.messages == 3);
    CHECK(s.threads == 2);
    CHECK(s.abuse == 1);
    CHECK(s.non_abuse == 1);
    CHECK(s.unlabeled == 1);
  }

  TEST_CASE("serialize then parse is the identity") {
    SynthParams p;
    p.n_threads = 6;
    p.messages_per_thread = 25;
    p.abuse_rate = 0.05;
    const auto c = generate_synthetic(p);
    std::ostringstream out;
    write_corpus(out, c);
    const auto back = parse(out.str());
    REQUIRE(back.threads().size() == c.threads().size());
    for (std::size_t t = 0; t < c.threads().size(); ++t) {
      CHECK(back.threads()[t].messages == c.threads()[t].messages);
    }
    std::ostringstream again;
    write_corpus(again, back);
    CHECK(again.str() == out.str());
  }

  TEST_CASE("unicode text survives the round trip") {
    std::vector<Message> msgs(1);
    msgs[0] = {"m", "t", "a", 0, "caf\xC3\xA9 \xF0\x9F\x98\x80 \"quoted\"\n", Label::kAbuse};
    const auto c = Corpus::from_messages(msgs);
    std::ostringstream out;
    write_corpus(out, c);
    CHECK(parse(out.str()).get("m") == msgs[0]);
  }

  TEST_CASE("context of a short thread is the whole thread") {
    const auto c = testing::thread_of({"a", "b", "c", "d", "e"});
    const auto ctx = thread_context(c, "t_1002");
    CHECK(ctx.messages.size() == 5);
    CHECK(ctx.target_index == 2);
    CHECK(ctx.target().message_id == "t_1002");
  }

  TEST_CASE("context of a long thread spans 1350 messages") {
    std::vector<std::string> authors(2000);
    for (std::size_t i = 0; i < authors.size(); ++i) authors[i] = "u" + std::to_string(i % 13);
    const auto c = testing::thread_of(authors);
    const auto ctx = thread_context(c, "t_" + std::to_string(1000 + 1000));
    CHECK(ctx.messages.size() == 1350);
    CHECK(ctx.target_index == 674);
    CHECK(ctx.messages.front().message_id == "t_" + std::to_string(1000 + 1000 - 674));
  }

  TEST_CASE("first message of a thread has no predecessors") {
    const auto c = testing::thread_of({"a", "b", "c"});
    const auto ctx = thread_context(c, "t_1000");
    CHECK(ctx.target_index == 0);
    CHECK(ctx.messages.size() == 3);
  }

  TEST_CASE("unknown target is not found") {
    const auto c = testing::thread_of({"a"});
    CHECK_THROWS_AS(thread_context(c, "nope"), NotFoundError);
  }

  TEST_CASE("context stays inside the thread and is contiguous") {
    SynthParams p;
    p.n_threads = 12;
    p.messages_per_thread = 40;
    const auto c = generate_synthetic(p);
    Rng rng(3);
    for (int trial = 0; trial < 200; ++trial) {
      const auto& t = c.threads()[rng.index(c.threads().size())];
      const auto i = rng.index(t.messages.size());
      const auto before = rng.index(20);
      const auto after = rng.index(20);
      const auto ctx = thread_context(c, t.messages[i].message_id, before, after);
      CHECK(ctx.messages.size() <= before + 1 + after);
      CHECK(ctx.target().message_id == t.messages[i].message_id);
      const auto start = static_cast<std::size_t>(ctx.messages.data() - t.messages.data());
      CHECK(start + ctx.target_index == i);
      CHECK(ctx.target_index == std::min<std::size_t>(before, i));
      CHECK(ctx.messages.size() - 1 - ctx.target_index == std::min<std::size_t>(after, t.messages.size() - 1 - i));
      for (const auto& m : ctx.messages) CHECK(m.thread_id == t.thread_id);
    }
  }

  TEST_CASE("balanced dataset takes every abuse message and an equal sample") {
    const auto c = labeled_corpus(655, 10000);
    const auto d = build_balanced_dataset(c, 7);
    CHECK(d.items.size() == 1310);
    CHECK(d.count(Label::kAbuse) == 655);
    CHECK(d.count(Label::kNonAbuse) == 655);
    std::set<std::string> abuse;
    for (const auto& it : d.items) {
      if (it.label == Label::kAbuse) abuse.insert(it.message_id);
    }
    CHECK(abuse.size() == 655);
    CHECK(build_balanced_dataset(c, 7).items == d.items);
    CHECK(build_balanced_dataset(c, 8).items != d.items);
  }

  TEST_CASE("balanced dataset errors") {
    CHECK_THROWS_AS(build_balanced_dataset(labeled_corpus(0, 10), 1), DataError);
    CHECK_THROWS_AS(build_balanced_dataset(labeled_corpus(5, 4), 1), DataError);
  }
}

TEST_SUITE("synth") {
  TEST_CASE("generation is a pure function of the parameters") {
    SynthParams p;
    p.n_threads = 20;
    std::ostringstream a;
    std::ostringstream b;
    write_corpus(a, generate_synthetic(p));
    write_corpus(b, generate_synthetic(p));
    CHECK(a.str() == b.str());
    p.seed = 43;
    std::ostringstream c;
    write_corpus(c, generate_synthetic(p));
    CHECK(c.str() != a.str());
  }

  TEST_CASE("zero abuse rate labels everything non_abuse") {
    SynthParams p;
    p.n_threads = 10;
    p.abuse_rate = 0.0;
    const auto s = generate_synthetic(p).stats();
    CHECK(s.abuse == 0);
    CHECK(s.non_abuse == s.messages);
  }

  TEST_CASE("default corpus has 655 abusive messages in 400 threads") {
    const auto s = generate_synthetic({}).stats();
    CHECK(s.threads == 400);
    CHECK(s.abuse == 655);
  }

  TEST_CASE("invalid parameters") {
    SynthParams p;
    p.caps_rate = 1.5;
    CHECK_THROWS_AS(generate_synthetic(p), ConfigError);
    p = {};
    p.n_threads = 0;
    CHECK_THROWS_AS(generate_synthetic(p), ConfigError);
    p = {};
    p.pile_on_size = p.authors_per_thread;
    CHECK_THROWS_AS(generate_synthetic(p), ConfigError);
  }

  TEST_CASE("pile-on: the After graph has at least 5 authors pointing at the abuser") {
    SynthParams p;
    p.n_threads = 60;
    const auto c = generate_synthetic(p);
    std::size_t checked = 0;
    for (const auto& t : c.threads()) {
      for (const auto& m : t.messages) {
        if (m.label != Label::kAbuse) continue;
        const auto ctx = thread_context(c, m.message_id);
        const auto g = extract_graph(ctx, {kDefaultWindowLength, GraphMode::kAfter});
        std::size_t towards = 0;
        for (const auto& a : g.authors) {
          if (a != m.author_id && g.weight(a, m.author_id) > 0.0) ++towards;
        }
        CHECK(towards >= p.pile_on_size);
        ++checked;
      }
    }
    CHECK(checked > 50);
  }
}
