#pragma once

#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "kgc/graph.hpp"

namespace kgc::fixtures {

class TempDir {
 public:
  TempDir() {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("kgc-test-" + std::to_string(rd()) + std::to_string(rd()));
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

  void write(const std::string& name, const std::string& content) const {
    std::ofstream(path_ / name) << content;
  }

 private:
  std::filesystem::path path_;
};

// a -r-> b -r-> c -r-> d, entities 0..3
inline KnowledgeGraph chain() { return KnowledgeGraph(4, 1, {{0, 0, 1}, {1, 0, 2}, {2, 0, 3}}); }

// hub 0 with spokes 0 -r-> 1..n
inline KnowledgeGraph star(std::size_t spokes) {
  std::vector<Triple> t;
  for (EntityId i = 1; i <= spokes; ++i) t.push_back({0, 0, i});
  return KnowledgeGraph(spokes + 1, 1, std::move(t));
}

// a->b, b->c, c->a
inline KnowledgeGraph triangle() { return KnowledgeGraph(3, 1, {{0, 0, 1}, {1, 0, 2}, {2, 0, 0}}); }

// path 0-1-2-...-n with alternating edge directions
inline KnowledgeGraph path(std::size_t edges) {
  std::vector<Triple> t;
  for (EntityId i = 0; i < edges; ++i) {
    if (i % 2 == 0) t.push_back({i, 0, i + 1});
    else t.push_back({i + 1, 0, i});
  }
  return KnowledgeGraph(edges + 1, 1, std::move(t));
}

}  // namespace kgc::fixtures
