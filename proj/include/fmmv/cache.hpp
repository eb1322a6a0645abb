#ifndef FMMV_CACHE_HPP
#define FMMV_CACHE_HPP

#include <cstddef>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <string>

#include "fmmv/evaluator.hpp"

namespace fmmv {

/// Append-only on-disk store of computed residues, one CSV file per family
/// ("key,prime,value" lines).  Entries are write-once: re-inserting the same
/// (key, prime) with a different value throws, which turns any evaluator
/// nondeterminism into a loud failure instead of a silent cache poisoning.
class ResidueCache {
 public:
  /// Opens (creating if needed) the cache rooted at `dir` and loads all
  /// existing entries into memory.
  explicit ResidueCache(std::filesystem::path dir);

  std::optional<u64> get(const ValueRef& ref, u64 p);
  void put(const ValueRef& ref, u64 p, u64 value);

  struct Stats {
    std::size_t entries = 0;
    std::size_t files = 0;
    std::size_t hits = 0;
    std::size_t misses = 0;
  };
  Stats stats() const;

  /// Deletes every cache file and forgets all entries.
  void clear();

  const std::filesystem::path& directory() const { return dir_; }

 private:
  std::filesystem::path file_for(const ValueRef& ref) const;

  std::filesystem::path dir_;
  // key -> (prime -> residue)
  std::map<std::string, std::map<u64, u64>> entries_;
  std::size_t hits_ = 0, misses_ = 0;
  mutable std::mutex mu_;
};

}  // namespace fmmv

#endif
