#include "io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <system_error>

#include "sbp/version.hpp"

namespace sbp::cli {

namespace fs = std::filesystem;

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::uint64_t fnv1a(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i, v >>= 4) s[i] = digits[v & 0xf];
  return s;
}

void write_atomic(const fs::path& path, std::string_view content) {
  std::error_code ec;
  const fs::path dir = path.parent_path().empty() ? fs::path(".") : path.parent_path();
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
  const fs::path tmp = dir / ("." + path.filename().string() + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw IoError("write failed for " + tmp.string());
  }
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw IoError("cannot move output into place at " + path.string());
  }
}

void write_outputs(const fs::path& dir, const std::string& command, const nlohmann::json& config,
                   std::uint64_t seed, const std::vector<OutputFile>& files) {
  nlohmann::json outputs = nlohmann::json::array();
  for (const auto& f : files) {
    write_atomic(dir / f.name, f.content);
    outputs.push_back({{"file", f.name}, {"fnv1a", hex64(fnv1a(f.content))}});
  }
  const std::string cfg = config.dump(2);
  nlohmann::json manifest;
  manifest["command"] = command;
  manifest["config"] = config;
  manifest["config_hash"] = hex64(fnv1a(cfg));
  manifest["seed"] = seed;
  manifest["version"] = version();
  manifest["outputs"] = outputs;
  write_atomic(dir / (command + ".manifest.json"), manifest.dump(2) + "\n");
}

}  // namespace sbp::cli
