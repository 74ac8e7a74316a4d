#pragma once

#include "partysim/corpus.hpp"
#include "partysim/log.hpp"

#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

namespace testing_support {

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() / ("partysim_test_" + std::to_string(rd()) + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Collects warnings while alive.
class WarningCapture {
 public:
  WarningCapture() : scoped_([this](std::string_view msg) { messages.emplace_back(msg); }) {}
  std::vector<std::string> messages;

 private:
  partysim::log::ScopedHandler scoped_;
};

inline partysim::SentenceRecord record(std::string id, std::string party, std::optional<std::string> domain = {},
                                       bool claim = false, std::string text = "some text") {
  partysim::SentenceRecord r;
  r.id = std::move(id);
  r.text = std::move(text);
  r.party = std::move(party);
  r.domain = std::move(domain);
  r.is_claim = claim;
  return r;
}

}  // namespace testing_support
