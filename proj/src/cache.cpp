#include "fmmv/cache.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace fmmv {

namespace fs = std::filesystem;

namespace {

// Family names may contain '*'; keep file names portable.
std::string sanitize(const std::string& name) {
  std::string out;
  for (char c : name) out += (c == '*') ? '_' : c;
  return out;
}

}  // namespace

ResidueCache::ResidueCache(fs::path dir) : dir_(std::move(dir)) {
  fs::create_directories(dir_);
  for (const auto& entry : fs::directory_iterator(dir_)) {
    if (!entry.is_regular_file() || entry.path().extension() != ".csv") continue;
    std::ifstream in(entry.path());
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty() || line[0] == '#') continue;
      // family,index,prime,residue (family has no commas; index may)
      auto f0 = line.find(',');
      auto c1 = line.rfind(',');
      auto c0 = line.rfind(',', c1 == std::string::npos ? c1 : c1 - 1);
      if (f0 == std::string::npos || c0 == std::string::npos || f0 >= c0 || c0 >= c1)
        throw std::runtime_error("malformed cache line in " + entry.path().string() +
                                 ": " + line);
      std::string key =
          line.substr(0, f0) + ":" + line.substr(f0 + 1, c0 - f0 - 1);
      u64 p = std::stoull(line.substr(c0 + 1, c1 - c0 - 1));
      u64 v = std::stoull(line.substr(c1 + 1));
      auto [it, inserted] = entries_[key].emplace(p, v);
      if (!inserted && it->second != v)
        throw std::runtime_error("conflicting cache entries for " + key + " at p=" +
                                 std::to_string(p));
    }
  }
}

std::filesystem::path ResidueCache::file_for(const ValueRef& ref) const {
  return dir_ / (sanitize(family_name(ref.family)) + ".csv");
}

std::optional<u64> ResidueCache::get(const ValueRef& ref, u64 p) {
  std::lock_guard<std::mutex> lock(mu_);
  auto it = entries_.find(ref.key());
  if (it != entries_.end()) {
    auto jt = it->second.find(p);
    if (jt != it->second.end()) {
      ++hits_;
      return jt->second;
    }
  }
  ++misses_;
  return std::nullopt;
}

void ResidueCache::put(const ValueRef& ref, u64 p, u64 value) {
  std::lock_guard<std::mutex> lock(mu_);
  std::string key = ref.key();
  auto [it, inserted] = entries_[key].emplace(p, value);
  if (!inserted) {
    if (it->second != value)
      throw std::runtime_error("cache write-once violation for " + key + " at p=" +
                               std::to_string(p));
    return;  // identical re-insert is a no-op
  }
  std::ofstream out(file_for(ref), std::ios::app);
  if (!out) throw std::runtime_error("cannot open cache file for " + key);
  auto colon = key.find(':');
  out << key.substr(0, colon) << ',' << key.substr(colon + 1) << ',' << p << ','
      << value << '\n';
}

ResidueCache::Stats ResidueCache::stats() const {
  std::lock_guard<std::mutex> lock(mu_);
  Stats s;
  s.hits = hits_;
  s.misses = misses_;
  for (const auto& [key, m] : entries_) s.entries += m.size();
  for (const auto& entry : fs::directory_iterator(dir_))
    if (entry.is_regular_file() && entry.path().extension() == ".csv") ++s.files;
  return s;
}

void ResidueCache::clear() {
  std::lock_guard<std::mutex> lock(mu_);
  for (const auto& entry : fs::directory_iterator(dir_))
    if (entry.is_regular_file() && entry.path().extension() == ".csv")
      fs::remove(entry.path());
  entries_.clear();
  hits_ = misses_ = 0;
}

}  // namespace fmmv
