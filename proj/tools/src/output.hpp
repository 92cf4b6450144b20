#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "json.hpp"

namespace rwrp::cli {

using nlohmann::json;

std::uint64_t fnv1a64(const std::string& bytes);
std::string hex64(std::uint64_t v);

/// 17 significant digits; inf, -inf and nan spelled out.
std::string num(double x);

/// JSON number, or the string "inf"/"-inf"/"nan" for non-finite values.
json jnum(double x);

/// Where and how artifacts are written. Every CSV starts with '#' meta lines
/// (tool version, config hash, seeds) followed by a header row.
class Artifacts {
 public:
  Artifacts(std::filesystem::path dir, std::string task, std::string config_hash, std::vector<std::uint64_t> seeds);

  const std::filesystem::path& dir() const noexcept { return dir_; }
  const std::vector<std::uint64_t>& seeds() const noexcept { return seeds_; }

  class Csv {
   public:
    Csv(const std::filesystem::path& file, const Artifacts& meta, const std::vector<std::string>& header);
    Csv& operator<<(double x);
    Csv& operator<<(const std::string& s);
    Csv& operator<<(const char* s) { return *this << std::string(s); }
    Csv& integer(long long v);
    void end_row();

   private:
    std::ofstream out_;
    std::size_t columns_;
    std::size_t filled_ = 0;
  };

  Csv csv(const std::string& name, const std::vector<std::string>& header) const;
  /// Writes `body` with the meta block merged in under "meta".
  void write_json(const std::string& name, json body) const;
  json meta() const;

 private:
  std::filesystem::path dir_;
  std::string task_;
  std::string hash_;
  std::vector<std::uint64_t> seeds_;
};

}  // namespace rwrp::cli
