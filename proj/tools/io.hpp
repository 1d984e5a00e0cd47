#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace sbp::cli {

/// Output directory or file could not be written.
class IoError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Shortest decimal text that reads back to the same double; "nan" and
/// "inf"/"-inf" for non-finite values.
std::string format_double(double v);

std::uint64_t fnv1a(std::string_view data);
std::string hex64(std::uint64_t v);

/// Writes via a temporary file in the same directory and a rename, so a
/// reader never sees a partial file. Creates the directory if needed.
void write_atomic(const std::filesystem::path& path, std::string_view content);

struct OutputFile {
  std::string name;
  std::string content;
};

/// Writes the files plus `<command>.manifest.json` describing the run.
/// The manifest is a function of the configuration alone, so reruns are
/// byte-identical.
void write_outputs(const std::filesystem::path& dir, const std::string& command,
                   const nlohmann::json& config, std::uint64_t seed,
                   const std::vector<OutputFile>& files);

}  // namespace sbp::cli
