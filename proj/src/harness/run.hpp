#pragma once

// One CLI invocation: its run id, output directory, written files and the
// manifest recorded at the end.

#include <chrono>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

namespace smallcap::harness {

class RunContext {
 public:
  /// Picks a fresh run id (or checks `requested` is unused) and creates the
  /// results/, tables/ and manifests/ directories under `out`.
  RunContext(std::filesystem::path out, std::string command, std::vector<std::string> argv,
             const std::string& requested);

  const std::string& id() const { return id_; }
  const std::filesystem::path& out() const { return out_; }
  std::filesystem::path results_path() const;
  std::filesystem::path manifest_path() const;
  std::filesystem::path table_path(const std::string& stem) const;

  /// Writes (or rewrites) a file and records its digest.
  void write_output(const std::filesystem::path& path, const std::string& content);
  void write_json(const std::filesystem::path& path, const nlohmann::json& record);

  /// Result records carry the run id and the manifest they belong to.
  nlohmann::json result_header() const;

  nlohmann::json config = nlohmann::json::object();
  nlohmann::json seeds = nlohmann::json::array();
  nlohmann::json budgets = nlohmann::json::object();

  /// Writes manifests/<id>.json once; later calls do nothing.
  void finish(const std::string& state, const std::string& error = {});

 private:
  std::filesystem::path out_;
  std::string command_;
  std::vector<std::string> argv_;
  std::string id_;
  std::string started_utc_;
  std::chrono::steady_clock::time_point start_;
  std::vector<std::pair<std::string, std::string>> outputs_;
  bool finished_ = false;
};

}  // namespace smallcap::harness
