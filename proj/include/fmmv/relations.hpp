#ifndef FMMV_RELATIONS_HPP
#define FMMV_RELATIONS_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fmmv/evaluator.hpp"
#include "fmmv/words.hpp"

namespace fmmv {

class ResidueCache;

/// Rational linear combination of values and constant monomials; a relation
/// asserts that it evaluates to 0 mod p throughout a window.
struct LinearCombination {
  std::map<ValueRef, Rat> value_terms;
  std::map<ConstantMonomial, Rat> constant_terms;

  void add_value(const ValueRef& ref, const Rat& c);
  void add_constant(const ConstantMonomial& m, const Rat& c);
  bool empty() const { return value_terms.empty() && constant_terms.empty(); }
  int weight() const;  // max term weight (q2 counts 1 per power, beta_w counts w)

  /// Value of the combination at one prime.  Throws std::domain_error when
  /// a term is undefined at p (prime too small, denominator divisible by p).
  u64 eval(u64 p, ResidueCache* cache = nullptr) const;

  std::string str() const;
};

struct Relation {
  LinearCombination lhs;
  std::string provenance;  // stuffle | reversal | linear-shuffle | sum-formula |
                           // closed-form | discovered
  PrimeWindow verified_window;  // empty until verify() succeeds
  std::string note;
};

/// Quasi-shuffle (stuffle) expansion of a product of two values.
/// EulerSum merges parts through oplus; parity-indexed values (MMV and the
/// alternating generalization) merge only equal parities, adding exponents
/// and multiplying alternation signs.  Star values merge with sign -1.
/// Throws std::invalid_argument when x, y are not in the same
/// quasi-shuffle-closed family (T and S are not closed; pass
/// expand_in_ambient to expand their product inside the ambient
/// alternating-MMV algebra anyway).
LinearCombination stuffle_expand(const ValueRef& x, const ValueRef& y,
                                 bool expand_in_ambient = false);

/// Every relation of total weight w from the named sources: depth-1 and
/// depth-2 closed forms, stuffle products of depth-1 values, reversal
/// identities, linear shuffle relations, zero sums for T/S (w odd, d even),
/// restricted sums with their beta_w closed forms, and the weight-2 table.
std::vector<Relation> relation_suite(int w);

/// Depth-1 closed forms at exponent s: the shared constant
/// c_s = zeta2(s) = S(s) = -t(s) = -T(s) = zeta(s bar)/2 (with c_1 = -q2),
/// zeta(s) = 0, and at s = 1 the four alternating variants.
std::vector<Relation> depth1_closed_forms(int s);

/// Depth-2 closed forms at odd weight w >= 3: all (a, b) with a+b = w for
/// the four parity families (plain and star) and the Euler sign variants.
std::vector<Relation> depth2_closed_forms(int w);

/// Repeated-argument closed forms t(s,..,s) = +-zeta2(s,..,s) at depth 2
/// (value c_s^2/2) and depth 3 (value c_s^3/6 + beta_{3s}/8).
std::vector<Relation> repeated_argument_forms(int s, int depth);

/// The 20 tabulated weight-2 closed forms across t/T/S/zeta2.
std::vector<Relation> weight2_table();

struct SumFormulaSpec {
  enum class Kind { Full, OneSlot, Diagonal, TwoSlot };
  Kind kind = Kind::Full;
  int w = 0, d = 0, i = 0, j = 0;
  Family family{FamilyTag::MMV, false};  // MMV / MMV-star for index sums; T / S
                                         // for the zero-sum proposition
};

/// Emits the sum-formula relation.  Two-slot specs have no printed closed
/// form: the rational multiple of beta_w is extracted per prime over
/// `extraction_window` (primes with beta_w == 0 are skipped) and asserted
/// identical across primes; throws std::runtime_error on disagreement.
Relation sum_formula(const SumFormulaSpec& spec,
                     const PrimeWindow& extraction_window = {});

struct VerifyReport {
  std::size_t primes_checked = 0;
  std::vector<std::pair<u64, u64>> failures;  // (prime, residue of lhs)
  std::vector<std::pair<u64, std::string>> skipped;
  bool pass() const { return failures.empty() && primes_checked > 0; }
};

/// Evaluates the relation at every usable prime of the window and records
/// failures; on success stamps relation.verified_window.
VerifyReport verify(Relation& r, const PrimeWindow& window,
                    ResidueCache* cache = nullptr);

/// CRT-based rational relation discovery.  Residue columns over the
/// discovery primes (2/3 of the window, the rest held out, at least 8
/// holdouts) are CRT-lifted mod P and the relation lattice
///   { a : sum_j a_j V_j == 0 (mod P) }
/// is LLL-reduced exactly; short primitive vectors within the height bound
/// that verify on every holdout prime are kept and row-reduced over Q
/// (pivoting on the lexicographically latest candidate).  Requires
/// P > 2 * height_bound^2 * (#columns).
std::vector<Relation> discover(const std::vector<ValueRef>& candidates,
                               const std::vector<ConstantMonomial>& constants,
                               const PrimeWindow& window, int height_bound,
                               ResidueCache* cache = nullptr);

enum class Space { FES, FMtV, FMTV, FMSV, FMMV, FMMVEvenTail, FMMVOddTail, FMZV2 };

std::string space_name(Space s);
std::optional<Space> parse_space(const std::string& name);

/// Generating values of a space at one weight, sorted (indices order).
std::vector<ValueRef> space_candidates(Space s, int w);

struct DimensionReport {
  Space space = Space::FES;
  int weight = 0;
  std::vector<ValueRef> candidates;
  std::vector<Relation> relations;   // independent, one per dependent candidate
  std::vector<ValueRef> basis;       // surviving (lexicographically earliest)
  int rank_lower = 0;                // basis elements with a nonzero residue
  int dim_estimate = 0;              // candidates - independent relations
  int fibonacci_expected = 0;        // F_w with F_1 = F_2 = 1
};

/// Greedy incremental basis: candidates are visited in order; each is
/// either expressed over the current basis by discover() or joins it.
DimensionReport dimension_report(Space s, int w, const PrimeWindow& window,
                                 int height_bound = 64,
                                 ResidueCache* cache = nullptr);

/// The unique small-height combination of the constants equal to ref over
/// the window, or nullopt when ref is outside their span.
std::optional<LinearCombination> express_in_constants(
    const ValueRef& ref, const std::vector<ConstantMonomial>& constants,
    const PrimeWindow& window, int height_bound = 64,
    ResidueCache* cache = nullptr);

/// One JSON object per line, schema 1:
/// {"schema":1,"terms":[{"family":"T","index":"1,1","coeff":"3"}],
///  "constants":[...],"provenance":"...","verified_primes":[...]}
std::string relation_to_json(const Relation& r);
Relation relation_from_json(const std::string& line);

int fibonacci(int w);

}  // namespace fmmv

#endif
