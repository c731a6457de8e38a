#include "convabuse/featurize.hpp"

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <istream>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include "convabuse/error.hpp"

namespace convabuse {

std::size_t default_thread_count() {
  if (const char* env = std::getenv("CONVABUSE_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::vector<double> message_graph_features(const Corpus& corpus, std::string_view message_id,
                                           const ContextParams& params) {
  const ContextSlice ctx = thread_context(corpus, message_id, params.before, params.after);
  return context_graph_features(ctx, params.window_len, params.graphs).values;
}

FeatureTable featurize_graphs(const Corpus& corpus, std::span<const LabeledItem> items,
                              const ContextParams& params, std::size_t threads) {
  FeatureTable table;
  table.names = graph_feature_manifest(params.graphs);
  table.values = Matrix(items.size(), table.names.size());
  for (const auto& item : items) {
    corpus.locate(item.message_id);  // fail early on unknown ids
    table.ids.push_back(item.message_id);
    table.labels.push_back(item.label);
  }

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    for (std::size_t i = next++; i < items.size(); i = next++) {
      try {
        const auto row = message_graph_features(corpus, items[i].message_id, params);
        std::copy(row.begin(), row.end(), table.values.row(i).begin());
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const std::size_t n_workers = std::max<std::size_t>(1, std::min(threads, items.size()));
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < n_workers; ++t) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
  return table;
}

void write_feature_csv(std::ostream& out, const FeatureTable& table) {
  out << "message_id,label";
  for (const auto& n : table.names) out << ',' << n;
  out << '\n';
  char buf[32];
  for (std::size_t i = 0; i < table.ids.size(); ++i) {
    out << table.ids[i] << ',' << to_string(table.labels[i]);
    for (double v : table.values.row(i)) {
      std::snprintf(buf, sizeof buf, "%.17g", v);
      out << ',' << buf;
    }
    out << '\n';
  }
}

namespace {

std::vector<std::string> split_commas(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

}  // namespace

FeatureTable read_feature_csv(std::istream& in) {
  FeatureTable table;
  std::string line;
  if (!std::getline(in, line)) throw ParseError(1, "missing header");
  auto header = split_commas(line);
  if (header.size() < 2 || header[0] != "message_id" || header[1] != "label") {
    throw ParseError(1, "header must start with message_id,label");
  }
  table.names.assign(header.begin() + 2, header.end());
  std::size_t lineno = 1;
  std::vector<double> row(table.names.size());
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto cells = split_commas(line);
    if (cells.size() != header.size()) throw ParseError(lineno, "expected " + std::to_string(header.size()) + " cells");
    try {
      table.labels.push_back(parse_label(cells[1]));
    } catch (const DataError& e) {
      throw ParseError(lineno, e.what());
    }
    table.ids.push_back(cells[0]);
    for (std::size_t j = 0; j < row.size(); ++j) {
      const std::string& c = cells[j + 2];
      char* end = nullptr;
      row[j] = std::strtod(c.c_str(), &end);
      if (c.empty() || *end != '\0') throw ParseError(lineno, "bad number '" + c + "'");
    }
    table.values.append_row(row);
  }
  if (table.values.rows() == 0) table.values = Matrix(0, table.names.size());
  return table;
}

}  // namespace convabuse
