#include "hfuv/path_io.hpp"

#include <array>
#include <bit>
#include <charconv>
#include <cstdint>
#include <cstring>
#include <istream>
#include "json.hpp"
#include <ostream>

#include "hfuv/error.hpp"

namespace hfuv {
namespace {

using json = nlohmann::ordered_json;

constexpr std::array<char, 8> kMagic{'H', 'F', 'U', 'V', 'P', 'A', 'T', 'H'};
constexpr std::uint32_t kVersion = 1;

void put_u64(std::ostream& out, std::uint64_t v) {
  std::array<char, 8> b{};
  for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(b.data(), 8);
}

void put_f64(std::ostream& out, double v) { put_u64(out, std::bit_cast<std::uint64_t>(v)); }

std::uint64_t get_u64(std::istream& in) {
  std::array<unsigned char, 8> b{};
  if (!in.read(reinterpret_cast<char*>(b.data()), 8)) throw Error("binary path: truncated input");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return v;
}

double get_f64(std::istream& in) { return std::bit_cast<double>(get_u64(in)); }

void put_array(std::ostream& out, const std::vector<double>& v) {
  put_u64(out, v.size());
  for (double x : v) put_f64(out, x);
}

std::vector<double> get_array(std::istream& in) {
  const auto len = get_u64(in);
  if (len > (1ULL << 34)) throw Error("binary path: implausible array length");
  std::vector<double> v(len);
  for (auto& x : v) x = get_f64(in);
  return v;
}

}  // namespace

std::string path_to_json(const SamplePath& path) {
  json j;
  j["format"] = "hfuv.sample_path";
  j["version"] = kVersion;
  j["T"] = path.T;
  j["n"] = path.n;
  j["drift"] = path.drift;
  j["seed"] = path.seed;
  j["clamp_count"] = path.clamp_count;
  j["x_grid"] = path.x_grid;
  j["sigma_grid"] = path.sigma_grid;
  j["w_increments"] = path.w_increments;
  json jumps = json::array();
  for (const auto& r : path.jumps) {
    jumps.push_back({{"time", r.time},
                     {"size", r.size},
                     {"sigma_pre", r.sigma_pre},
                     {"sigma_post", r.sigma_post},
                     {"interval", r.interval},
                     {"w_offset", r.w_offset}});
  }
  j["jumps"] = std::move(jumps);
  return j.dump();
}

SamplePath path_from_json(const std::string& text) {
  try {
    const json j = json::parse(text);
    if (j.at("format") != "hfuv.sample_path") throw Error("path json: unexpected format tag");
    SamplePath p;
    p.T = j.at("T").get<double>();
    p.n = j.at("n").get<std::size_t>();
    p.drift = j.at("drift").get<double>();
    p.seed = j.at("seed").get<std::uint64_t>();
    p.clamp_count = j.at("clamp_count").get<std::size_t>();
    p.x_grid = j.at("x_grid").get<std::vector<double>>();
    p.sigma_grid = j.at("sigma_grid").get<std::vector<double>>();
    p.w_increments = j.at("w_increments").get<std::vector<double>>();
    for (const auto& r : j.at("jumps")) {
      p.jumps.push_back({r.at("time").get<double>(), r.at("size").get<double>(),
                         r.at("sigma_pre").get<double>(), r.at("sigma_post").get<double>(),
                         r.at("interval").get<std::size_t>(), r.at("w_offset").get<double>()});
    }
    if (p.x_grid.size() != p.w_increments.size() + 1 || p.sigma_grid.size() != p.x_grid.size())
      throw Error("path json: inconsistent array lengths");
    return p;
  } catch (const json::exception& e) {
    throw Error(std::string("path json: ") + e.what());
  }
}

void write_path_binary(const SamplePath& path, std::ostream& out) {
  out.write(kMagic.data(), kMagic.size());
  put_u64(out, kVersion);
  put_f64(out, path.T);
  put_u64(out, path.n);
  put_f64(out, path.drift);
  put_u64(out, path.seed);
  put_u64(out, path.clamp_count);
  put_array(out, path.x_grid);
  put_array(out, path.sigma_grid);
  put_array(out, path.w_increments);
  std::vector<double> time, size, pre, post, woff;
  for (const auto& r : path.jumps) {
    time.push_back(r.time);
    size.push_back(r.size);
    pre.push_back(r.sigma_pre);
    post.push_back(r.sigma_post);
    woff.push_back(r.w_offset);
  }
  put_array(out, time);
  put_array(out, size);
  put_array(out, pre);
  put_array(out, post);
  put_array(out, woff);
  put_u64(out, path.jumps.size());
  for (const auto& r : path.jumps) put_u64(out, r.interval);
}

SamplePath read_path_binary(std::istream& in) {
  std::array<char, 8> magic{};
  if (!in.read(magic.data(), magic.size()) || magic != kMagic) throw Error("binary path: bad magic");
  if (get_u64(in) != kVersion) throw Error("binary path: unsupported version");
  SamplePath p;
  p.T = get_f64(in);
  p.n = get_u64(in);
  p.drift = get_f64(in);
  p.seed = get_u64(in);
  p.clamp_count = get_u64(in);
  p.x_grid = get_array(in);
  p.sigma_grid = get_array(in);
  p.w_increments = get_array(in);
  const auto time = get_array(in), size = get_array(in), pre = get_array(in), post = get_array(in),
             woff = get_array(in);
  const auto count = get_u64(in);
  if (time.size() != count || size.size() != count || pre.size() != count || post.size() != count ||
      woff.size() != count)
    throw Error("binary path: inconsistent jump columns");
  for (std::size_t k = 0; k < count; ++k)
    p.jumps.push_back({time[k], size[k], pre[k], post[k], static_cast<std::size_t>(get_u64(in)), woff[k]});
  return p;
}

std::vector<double> read_increments_csv(std::istream& in) {
  std::vector<double> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    auto last = line.find_last_not_of(" \t\r,");
    const char* b = line.data() + first;
    const char* e = line.data() + last + 1;
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(b, e, v);
    if (ec != std::errc() || ptr != e) {
      if (out.empty() && line_no == 1) continue;  // header
      throw ConfigError("increments csv: line " + std::to_string(line_no) + " is not a number");
    }
    out.push_back(v);
  }
  return out;
}

}  // namespace hfuv
