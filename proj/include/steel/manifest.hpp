#pragma once

// Run manifests: JSON records of what a command read, wrote and counted.

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace steel {

std::string sha256_hex(const std::string& bytes);
std::string sha256_file(const std::filesystem::path& path);

/// Current UTC time as ISO-8601 with seconds.
std::string utc_timestamp();

std::string tool_version();

struct FileDigest {
  std::string path;
  std::string sha256;
};

struct RunManifest {
  std::string command;
  std::string version = tool_version();
  std::string config_hash;
  std::vector<FileDigest> inputs;
  std::vector<FileDigest> outputs;
  std::string started;
  std::string finished;
  std::map<std::string, double> counters;

  void add_input(const std::filesystem::path& p);
  void add_output(const std::filesystem::path& p);

  std::string to_json() const;
};

/// Creates missing parent directories, then writes the manifest JSON.
void write_manifest(const std::filesystem::path& path, const RunManifest& manifest);

/// Writes text to a file, creating parent directories.
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace steel
