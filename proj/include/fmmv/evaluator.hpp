#ifndef FMMV_EVALUATOR_HPP
#define FMMV_EVALUATOR_HPP

#include <optional>
#include <string>
#include <vector>

#include "fmmv/indices.hpp"
#include "fmmv/prime_arith.hpp"

namespace fmmv {

class ResidueCache;

/// Reference to one value: a family plus its index, optionally twisted by
/// the quadratic character chi = (-1)^{(p-1)/2}.
///
/// Construction goes through the canonicalizing factories below, so that a
/// parity pattern matching one of the named specializations (zeta^(2), t,
/// T, S) always lands on the same key no matter how it was produced.
struct ValueRef {
  Family family;
  std::vector<int> mags;    // |s_j| >= 1
  std::vector<int> signs;   // EulerSum: bar signs; MMV/AMMV: parity eps (+1 = even)
  std::vector<int> sigmas;  // alternation signs (parity families); all +1 for MMV
  bool chi = false;

  int depth() const { return static_cast<int>(mags.size()); }
  int weight() const;

  /// "fam:index" with an optional "chi*" prefix; bit-exact grammar.
  std::string key() const;
  std::string index_string() const;

  friend bool operator<(const ValueRef& a, const ValueRef& b);
  friend bool operator==(const ValueRef& a, const ValueRef& b);

  static ValueRef euler(EulerIndex idx, bool star = false);
  static ValueRef mmv(SignedComposition s, bool star = false);
  static ValueRef ammv(AmmvIndex idx, bool star = false);
  /// t/T/S/z2 from magnitudes and optional alternation bars.
  static ValueRef specialized(FamilyTag f, std::vector<int> mags,
                              std::vector<int> sigmas = {}, bool star = false);
  static ValueRef parse(const std::string& fam, const std::string& index);
  static ValueRef parse_key(const std::string& key);

  ValueRef with_chi(bool c) const { ValueRef r = *this; r.chi = c; return r; }
  /// Parity families as the generic alternating index (eps from family).
  AmmvIndex as_ammv() const;
  SignedComposition as_mmv() const;
  EulerIndex as_euler() const;
};

/// Partial Euler sum zeta_p(idx) mod p (weak inequalities if star).
u64 euler_sum_mod(const EulerIndex& idx, u64 p, bool star = false);

/// Partial MMV M_p(s) mod p with 0/1 parity indicators.
u64 mmv_mod(const SignedComposition& s, u64 p, bool star = false);

/// Alternating MMV: parity-filtered terms weighted sigma_j^{ceil(n/2)}.
u64 ammv_mod(const AmmvIndex& idx, u64 p, bool star = false);

/// Any ValueRef at one prime (DP sweep, O(p * depth)).
u64 eval_ref(const ValueRef& ref, u64 p);

/// Independent nested-loop oracle; refuses p > 200 or depth > 4.
u64 naive_eval(const ValueRef& ref, u64 p);

/// Per-prime evaluation over a window.  Primes <= weight+2 are recorded as
/// skips.  The cache, when given, is consulted and filled.
AdeleSample window_eval(const ValueRef& ref, const PrimeWindow& window,
                        ResidueCache* cache = nullptr, int threads = 1);

}  // namespace fmmv

#endif
