#include <openssl/evp.h>

#include <array>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <random>
#include <sstream>

#include "run.hpp"
#include "smallcap/error.hpp"
#include "smallcap/harness.hpp"
#include "smallcap/parallel.hpp"
#include "smallcap/simd/kernels.hpp"

namespace smallcap::harness {

namespace fs = std::filesystem;

std::string sha256_hex(std::string_view bytes) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md.data(), &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 digest failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned i = 0; i < len; ++i) {
    out += kHex[md[i] >> 4];
    out += kHex[md[i] & 15];
  }
  return out;
}

std::string sha256_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return sha256_hex(ss.str());
}

namespace {

std::string utc_stamp(const char* fmt) {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[64];
  std::strftime(buf, sizeof buf, fmt, &tm);
  return buf;
}

bool valid_run_id(const std::string& id) {
  if (id.empty() || id.size() > 100) return false;
  for (char c : id) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                    c == '-' || c == '_' || c == '.';
    if (!ok) return false;
  }
  return id != "." && id != "..";
}

}  // namespace

RunContext::RunContext(fs::path out, std::string command, std::vector<std::string> argv,
                       const std::string& requested)
    : out_(std::move(out)),
      command_(std::move(command)),
      argv_(std::move(argv)),
      started_utc_(utc_stamp("%Y-%m-%dT%H:%M:%SZ")),
      start_(std::chrono::steady_clock::now()) {
  std::error_code ec;
  for (const char* sub : {"results", "tables", "manifests"}) {
    fs::create_directories(out_ / sub, ec);
    if (ec) throw ValidationError("cannot create " + (out_ / sub).string() + ": " + ec.message());
  }
  if (!requested.empty()) {
    if (!valid_run_id(requested)) {
      throw ValidationError("run id may only contain letters, digits, '-', '_' and '.'");
    }
    id_ = requested;
    if (fs::exists(manifest_path()) || fs::exists(results_path())) {
      throw ValidationError("run id '" + id_ + "' is already used in " + out_.string());
    }
    return;
  }
  std::random_device rd;
  const std::string stamp = utc_stamp("%Y%m%dT%H%M%SZ");
  do {
    char suffix[16];
    std::snprintf(suffix, sizeof suffix, "%06x", rd() & 0xffffffu);
    id_ = stamp + "-" + suffix;
  } while (fs::exists(manifest_path()) || fs::exists(results_path()));
}

fs::path RunContext::results_path() const { return out_ / "results" / (id_ + ".json"); }
fs::path RunContext::manifest_path() const { return out_ / "manifests" / (id_ + ".json"); }
fs::path RunContext::table_path(const std::string& stem) const {
  return out_ / "tables" / (stem + "-" + id_ + ".csv");
}

void RunContext::write_output(const fs::path& path, const std::string& content) {
  {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw ValidationError("cannot write " + path.string());
    f << content;
    if (!f) throw ValidationError("write failed: " + path.string());
  }
  const std::string rel = fs::relative(path, out_).generic_string();
  const std::string digest = sha256_hex(content);
  for (auto& [p, d] : outputs_) {
    if (p == rel) {
      d = digest;
      return;
    }
  }
  outputs_.emplace_back(rel, digest);
}

void RunContext::write_json(const fs::path& path, const nlohmann::json& record) {
  write_output(path, record.dump(2) + "\n");
}

nlohmann::json RunContext::result_header() const {
  return {{"run_id", id_},
          {"manifest", fs::relative(manifest_path(), out_).generic_string()},
          {"command", command_}};
}

void RunContext::finish(const std::string& state, const std::string& error) {
  if (finished_) return;
  finished_ = true;
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  nlohmann::json m;
  m["run_id"] = id_;
  m["command"] = command_;
  m["command_line"] = argv_;
  m["state"] = state;
  if (!error.empty()) m["error"] = error;
  m["config"] = config;
  m["seeds"] = seeds;
  m["budgets"] = budgets;
  m["software"] = {{"name", "smallcap"},
                   {"version", SMALLCAP_VERSION},
                   {"isa", std::string(simd::isa_name(simd::kernels().isa))}};
  m["workers"] = worker_count();
  m["started_utc"] = started_utc_;
  m["wall_time_s"] = wall;
  nlohmann::json outs = nlohmann::json::array();
  for (const auto& [p, d] : outputs_) outs.push_back({{"path", p}, {"sha256", d}});
  m["outputs"] = outs;
  std::ofstream f(manifest_path(), std::ios::binary | std::ios::trunc);
  f << m.dump(2) << "\n";
}

}  // namespace smallcap::harness
