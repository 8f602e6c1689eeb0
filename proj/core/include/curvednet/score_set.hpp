#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace curvednet {

struct ScoreEntry {
  std::string id;
  bool is_anomalous = false;
  double score = 0.0;  // higher means more anomalous
};

struct ScoreSet {
  std::vector<ScoreEntry> entries;

  void add(std::string id, bool is_anomalous, double score) {
    entries.push_back({std::move(id), is_anomalous, score});
  }
  std::size_t size() const noexcept { return entries.size(); }
  std::size_t anomalous_count() const noexcept {
    std::size_t n = 0;
    for (const auto& e : entries) n += e.is_anomalous ? 1 : 0;
    return n;
  }
  std::size_t normal_count() const noexcept { return size() - anomalous_count(); }
};

}  // namespace curvednet
