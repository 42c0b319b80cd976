#pragma once

#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "retroplan/types.hpp"

namespace retroplan {

// Append-only JSONL trace. Each line carries the event kind, step index,
// episode seed and suite config hash. Lines are also kept in memory so tests
// and the in-process aggregator can inspect an episode without re-reading.
class TraceSink {
 public:
  TraceSink() = default;

  TraceSink(std::filesystem::path path, std::uint64_t seed, std::string config_hash)
      : seed_(seed), config_hash_(std::move(config_hash)), path_(std::move(path)) {
    if (!path_.empty()) {
      std::filesystem::create_directories(path_.parent_path());
      file_.open(path_, std::ios::binary | std::ios::trunc);
      if (!file_) throw std::runtime_error("trace: cannot open " + path_.string());
    }
  }

  static TraceSink in_memory(std::uint64_t seed, std::string config_hash) {
    TraceSink t;
    t.seed_ = seed;
    t.config_hash_ = std::move(config_hash);
    return t;
  }

  void event(const std::string& kind, int step, json fields) {
    fields["event"] = kind;
    fields["step"] = step;
    fields["seed"] = seed_;
    fields["cfg"] = config_hash_;
    lines_.push_back(fields.dump());
    if (file_.is_open()) file_ << lines_.back() << "\n";
  }

  void flush() {
    if (file_.is_open()) file_.flush();
  }

  const std::vector<std::string>& lines() const { return lines_; }
  const std::filesystem::path& path() const { return path_; }

  std::string joined() const {
    std::string out;
    for (const auto& l : lines_) {
      out += l;
      out += "\n";
    }
    return out;
  }

 private:
  std::uint64_t seed_ = 0;
  std::string config_hash_;
  std::filesystem::path path_;
  std::ofstream file_;
  std::vector<std::string> lines_;
};

inline std::vector<json> read_trace(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("trace: cannot read " + path.string());
  std::vector<json> events;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    events.push_back(json::parse(line));
  }
  return events;
}

}  // namespace retroplan
