#ifndef FMMV_CLI_HPP
#define FMMV_CLI_HPP

#include <iosfwd>
#include <string>
#include <vector>

#include "fmmv/relations.hpp"

namespace fmmv {

/// Runtime configuration; defaults embedded here, overridable by a
/// `key = value` config file and then by flags.
struct Config {
  u64 prime_lo = 5;
  u64 prime_hi = 100;
  Rat holdout_fraction{1, 3};
  int height_bound = 64;
  std::string cache_dir;  // empty disables the residue cache
  int threads = 1;        // 0 = hardware concurrency
  std::string output = "text";  // text | json | csv
  bool timestamp = false;

  void validate() const;  // throws std::invalid_argument on bad values
  std::string show() const;
};

/// Parses a `key = value` file ('#' comments, blank lines ignored) on top
/// of the given defaults.
Config load_config(const std::string& path, Config base = {});

/// The named identity suite used by `verify-paper`: depth-1 closed forms up
/// to s = 9, depth-2 closed forms at odd weights up to 9, the weight-2
/// table, repeated-argument forms for s <= 3, linear shuffle relations from
/// weight-3 words, zero sums, restricted index sums, and the generated
/// stuffle/reversal relations up to `max_weight`.
std::vector<Relation> paper_suite(int max_weight = 4);

/// Entry point: returns 0 (success / all pass), 1 (verification failures),
/// 2 (usage error), 3 (internal invariant breach).
int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace fmmv

#endif
