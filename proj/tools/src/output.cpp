#include "output.hpp"

#include <cmath>
#include <cstdio>

#include <rwrp/errors.hpp>

namespace rwrp::cli {

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string num(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

json jnum(double x) { return std::isfinite(x) ? json(x) : json(num(x)); }

Artifacts::Artifacts(std::filesystem::path dir, std::string task, std::string config_hash,
                     std::vector<std::uint64_t> seeds)
    : dir_(std::move(dir)), task_(std::move(task)), hash_(std::move(config_hash)), seeds_(std::move(seeds)) {
  std::error_code ec;
  std::filesystem::create_directories(dir_, ec);
  if (ec) throw ValidationError("cannot create output directory " + dir_.string() + ": " + ec.message(), "out");
}

json Artifacts::meta() const {
  return {{"tool", "rwrp"}, {"version", RWRP_VERSION}, {"task", task_}, {"config_hash", "fnv1a64:" + hash_}, {"seeds", seeds_}};
}

Artifacts::Csv::Csv(const std::filesystem::path& file, const Artifacts& meta, const std::vector<std::string>& header)
    : out_(file), columns_(header.size()) {
  if (!out_) throw ValidationError("cannot write " + file.string(), "out");
  out_ << "# rwrp " << RWRP_VERSION << "\n# task " << meta.task_ << "\n# config_hash fnv1a64:" << meta.hash_ << "\n# seeds";
  for (std::uint64_t s : meta.seeds_) out_ << ' ' << s;
  out_ << '\n';
  for (std::size_t i = 0; i < header.size(); ++i) out_ << (i ? "," : "") << header[i];
  out_ << '\n';
}

Artifacts::Csv& Artifacts::Csv::operator<<(double x) { return *this << num(x); }

Artifacts::Csv& Artifacts::Csv::operator<<(const std::string& s) {
  out_ << (filled_++ ? "," : "");
  if (s.find_first_of(",\"\n") == std::string::npos) {
    out_ << s;
  } else {
    out_ << '"';
    for (char c : s) out_ << (c == '"' ? "\"\"" : std::string(1, c));
    out_ << '"';
  }
  return *this;
}

Artifacts::Csv& Artifacts::Csv::integer(long long v) { return *this << std::to_string(v); }

void Artifacts::Csv::end_row() {
  if (filled_ != columns_) throw std::logic_error("csv row has " + std::to_string(filled_) + " of " + std::to_string(columns_) + " columns");
  out_ << '\n';
  filled_ = 0;
}

Artifacts::Csv Artifacts::csv(const std::string& name, const std::vector<std::string>& header) const {
  return Csv(dir_ / name, *this, header);
}

void Artifacts::write_json(const std::string& name, json body) const {
  body["meta"] = meta();
  std::ofstream out(dir_ / name);
  if (!out) throw ValidationError("cannot write " + (dir_ / name).string(), "out");
  out << body.dump(2) << '\n';
}

}  // namespace rwrp::cli
