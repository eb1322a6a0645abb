#ifndef FMMV_INDICES_HPP
#define FMMV_INDICES_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace fmmv {

/// A signed number a (magnitude with sign) from the double cover of N.
/// Positive selects an even inner summation index, negative an odd one.
struct SignedNumber {
  int value = 0;  // nonzero; sign carries the parity selector
  int magnitude() const { return value < 0 ? -value : value; }
  int sign() const { return value < 0 ? -1 : 1; }
};

/// The O-plus semigroup operation: magnitudes add, result keeps the sign
/// iff both arguments share it.
SignedNumber oplus(SignedNumber a, SignedNumber b);

/// Index of a multiple mixed value: nonzero parts, sign = parity selector.
struct SignedComposition {
  std::vector<int> parts;
  int weight() const;
  int depth() const { return static_cast<int>(parts.size()); }
};

/// Index of an Euler sum over the signed-number alphabet; sign -1 is the
/// "bar" (alternating factor (-1)^n).
struct EulerIndex {
  std::vector<int> mags;   // >= 1
  std::vector<int> signs;  // +-1
  int weight() const;
  int depth() const { return static_cast<int>(mags.size()); }
};

/// Index of an alternating MMV: exponents s, parity selectors eps
/// (+1 = even), alternation signs sigma.
struct AmmvIndex {
  std::vector<int> s;
  std::vector<int> eps;
  std::vector<int> sigma;
  int weight() const;
  int depth() const { return static_cast<int>(s.size()); }
};

enum class FamilyTag { EulerSum, MMV, AMMV, t, T, S, Zeta2 };

struct Family {
  FamilyTag tag = FamilyTag::MMV;
  bool star = false;
  friend auto operator<=>(const Family&, const Family&) = default;
};

std::string family_name(Family f);
std::optional<Family> parse_family(const std::string& name);

/// Maps a positive composition into the MMV sign convention of the
/// t / T / S / zeta^(2) families.
SignedComposition specialize(FamilyTag f, const std::vector<int>& s);

/// Parity selector pattern of a specialized family at depth d (+1 = even).
std::vector<int> family_eps(FamilyTag f, int d);

/// Returns (reverse(-s), (-1)^{|s|}): the index/sign pair whose evaluation
/// equals the evaluation of s itself under the n -> p-n reversal.
std::pair<SignedComposition, int> reversal_pair(const SignedComposition& s);

/// Enumeration constraint for the restricted index sets: slot i needs
/// |s_i| >= min_i.
struct SlotBound {
  int slot = 0;  // 1-based
  int min = 2;
};

/// All positive compositions of w into d parts, lexicographic.
std::vector<std::vector<int>> positive_compositions(int w, int d,
                                                    const std::vector<SlotBound>& bounds = {});

/// All signed MMV indices of weight w and depth d (every sign pattern on
/// every positive composition), lexicographic with + before -.
std::vector<SignedComposition> signed_compositions(int w, int d,
                                                   const std::vector<SlotBound>& bounds = {});

/// All Euler indices of weight w and depth d.
std::vector<EulerIndex> euler_indices(int w, int d);

std::uint64_t binomial(int n, int k);

// --- bit-exact index grammar -------------------------------------------
// MMV:               comma-separated nonzero parts, e.g. "-2,1"
// t/T/S/z2 families: magnitudes with trailing "~" for sigma = -1, "1,1~"
// Euler sums:        magnitudes with trailing "~" for the bar, "1~,2"
// generic AMMV:      signed parts (sign = parity as in MMV) with trailing
//                    "~" for sigma = -1, e.g. "-1~,1"
std::string format_mmv(const SignedComposition& s);
std::string format_euler(const EulerIndex& e);
SignedComposition parse_mmv(const std::string& text);
EulerIndex parse_euler(const std::string& text);

}  // namespace fmmv

#endif
