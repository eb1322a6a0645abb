#ifndef FMMV_WORDS_HPP
#define FMMV_WORDS_HPP

#include <map>
#include <string>
#include <vector>

#include "fmmv/evaluator.hpp"

namespace fmmv {

/// The five integrand letters:
///   a = dt/t          B (beta)  = t dt/(1-t^2)
///   b = dt/(1-t^2)    G (gamma) = -t dt/(1+t^2)
///   c = -dt/(1+t^2)
/// CLI/file syntax is the raw letter string, e.g. "bBG".
enum class Letter : char { A = 'a', B = 'b', C = 'c', Beta = 'B', Gamma = 'G' };

bool is_letter_char(char c);
Letter letter_from_char(char c);

/// A non-empty iterated-integral word, leftmost letter outermost.  Words
/// ending in 'a' integrate a constant against dt/t and are rejected by the
/// value-side operations (they stay representable for shuffle algebra).
struct Word {
  std::string letters;  // chars from "abcBG"

  explicit Word(std::string s);
  int weight() const { return static_cast<int>(letters.size()); }
  bool ends_in_a() const { return !letters.empty() && letters.back() == 'a'; }
  friend auto operator<=>(const Word&, const Word&) = default;
};

/// Formal Z-linear combination of words; no zero coefficients stored.
struct WordSum {
  std::map<Word, long long> terms;

  void add(const Word& w, long long c);
};

/// Standard shuffle product: all order-preserving interleavings with
/// multiplicity.
WordSum shuffle(const Word& u, const Word& v);

/// p * [t^p] of the iterated integral of `w`, as a residue mod p.
///
/// Computed by sweeping the truncated power series mod p letter by letter
/// from the innermost (rightmost) end.  Every letter form is parity-pure,
/// so the series stays supported on one parity class; the degree-p
/// coefficient is either exactly zero (wrong parity) or a single 1/p slot
/// whose numerator is the returned residue.  Throws std::domain_error for
/// words ending in 'a' and for words whose coefficient is genuinely
/// non-integral after multiplying by p (an 'a' hitting a live 1/p slot).
u64 series_coeff(const Word& w, u64 p);

/// Symbolic translation of a word into a value: for a word
/// a^{s1-1} L1 a^{s2-1} L2 ... Lr (length >= 2),
///   p * [t^p] integral(word) = scalar * chi(p)^{chi_factor} * M_p(ref)
/// for every valid prime p, where ref is the depth-(r-1) alternating MMV
/// read off the tail L2..Lr (the head index is pinned to m1 = p).  Words
/// whose head parity excludes m1 = p have `zero` set (coefficient is
/// identically zero); length-1 words give the empty index (constant 1).
struct SignedValueRef {
  ValueRef ref;
  int scalar = 1;      // +-1
  int chi_factor = 0;  // 0 or 1
  bool zero = false;

  /// scalar * chi(p)^{chi_factor} * eval(ref) at one prime, or 0.
  u64 eval(u64 p) const;
};

/// Throws std::domain_error for trailing-'a' words and for non-integral
/// heads (s1 >= 2 with the head parity odd).
SignedValueRef word_to_value(const Word& w);

/// One emitted linear shuffle relation sum_{w in x sha v} value(w) = 0,
/// with duplicate values collected and any common chi factor divided out.
struct ShuffleRelation {
  Letter x;
  Word v;
  std::vector<std::pair<SignedValueRef, long long>> terms;  // zero-head terms dropped
  bool skipped = false;  // a non-integral term made the relation unemittable
  std::string skip_reason;

  bool trivial() const { return !skipped && terms.empty(); }
};

/// All relations from x in {b, c, B, G} shuffled against every
/// value-translatable word v of weight wt-1.  Words of weight wt produce
/// values of weight wt-1 (the head index is consumed by the t^p slot).
/// Pairs with non-integral terms are returned with `skipped` set instead
/// of being silently dropped.  Requires wt >= 2.
std::vector<ShuffleRelation> linear_shuffle_relations(int wt);

/// All words of weight n not ending in 'a'.
std::vector<Word> translatable_words(int n);

}  // namespace fmmv

#endif
