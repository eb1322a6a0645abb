// Acceptance gate: one pass/fail line per criterion, all checks exact mod p.
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unistd.h>
#include <vector>

#include "fmmv/cache.hpp"
#include "fmmv/cli.hpp"
#include "fmmv/relations.hpp"

using namespace fmmv;

namespace {

struct Failure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void require(bool cond, const std::string& msg) {
  if (!cond) throw Failure(msg);
}

std::filesystem::path g_cache_dir;
ResidueCache* g_cache = nullptr;

void verify_all(std::vector<Relation> rels, const PrimeWindow& window,
                const std::string& what) {
  for (Relation& r : rels) {
    VerifyReport rep = verify(r, window, g_cache);
    require(rep.failures.empty(),
            what + ": FAIL " + r.note + " at p=" +
                (rep.failures.empty()
                     ? std::string("?")
                     : std::to_string(rep.failures.front().first)));
    require(rep.primes_checked > 0, what + ": no usable prime for " + r.note);
  }
}

// ---- criterion 1: depth-1 closed forms -------------------------------------

void criterion1() {
  PrimeWindow window = sieve_window(5, 1000);
  for (int s = 1; s <= 9; ++s)
    verify_all(depth1_closed_forms(s), window, "depth-1 s=" + std::to_string(s));
  require(depth1_closed_forms(1).size() >= 8, "fewer than 8 weight-1 identities");
}

// ---- criterion 2: depth-2 closed forms -------------------------------------

void criterion2() {
  PrimeWindow window = sieve_window(5, 500);
  for (int w : {3, 5, 7, 9})
    verify_all(depth2_closed_forms(w), window, "depth-2 w=" + std::to_string(w));
}

// ---- criterion 3: T(2~) = -G ------------------------------------------------

void criterion3() {
  Relation r;
  r.lhs.add_value(ValueRef::specialized(FamilyTag::T, {2}, {-1}), Rat(1));
  r.lhs.add_constant(ConstantMonomial::parse("G"), Rat(1));
  r.note = "T(2~) = -G";
  verify_all({r}, sieve_window(5, 1000), "T(2~)");
}

// ---- criterion 4: weight-2 table ---------------------------------------------

void criterion4() {
  auto table = weight2_table();
  require(table.size() >= 16, "weight-2 table too small");
  verify_all(table, sieve_window(5, 1000), "weight-2 table");
}

// ---- criterion 5: linear shuffle relations ------------------------------------

using TermMap = std::map<std::string, Rat>;

TermMap normalize(TermMap m) {
  if (m.empty()) return m;
  Rat lead = m.begin()->second;
  for (auto& [k, c] : m) c = c / lead;
  return m;
}

TermMap chi_flip(const TermMap& m) {
  TermMap out;
  for (const auto& [k, c] : m) {
    if (k.rfind("chi*", 0) == 0)
      out[k.substr(4)] = c;
    else
      out["chi*" + k] = c;
  }
  return out;
}

Relation shuffle_to_relation(const ShuffleRelation& sr) {
  Relation rel;
  for (const auto& [sv, coeff] : sr.terms)
    rel.lhs.add_value(sv.ref.with_chi(sv.chi_factor == 1), Rat(coeff));
  rel.provenance = "linear-shuffle";
  rel.note = std::string(1, static_cast<char>(sr.x)) + " sha " + sr.v.letters;
  return rel;
}

void criterion5() {
  // (a) every weight-2 relation from weight-3 words verifies on [5,500]
  PrimeWindow w2 = sieve_window(5, 500);
  std::vector<TermMap> generated;
  for (const ShuffleRelation& sr : linear_shuffle_relations(3)) {
    if (sr.skipped || sr.trivial()) continue;
    Relation rel = shuffle_to_relation(sr);
    verify_all({rel}, w2, "linSha(3) " + rel.note);
    TermMap m;
    for (const auto& [ref, c] : rel.lhs.value_terms) m[ref.key()] = c;
    generated.push_back(normalize(m));
  }
  // (b) the nine printed relations appear up to rational scaling (and a
  // global chi unit)
  std::vector<TermMap> targets = {
      {{"z2:1,1~", Rat(1)}, {"S:1,1~", Rat(1)}, {"t:1~,1~", Rat(1)}},
      {{"T:1,1", Rat(3)}},
      {{"T:1,1~", Rat(2)}, {"T:1~,1~", Rat(-1)}},
      {{"chi*S:1~,1~", Rat(1)}, {"z2:1~,1", Rat(-2)}},
      {{"t:1,1~", Rat(2)}, {"S:1~,1~", Rat(1)}},
      {{"z2:1~,1~", Rat(1)}, {"chi*S:1~,1", Rat(-1)}, {"chi*t:1~,1", Rat(-1)}},
  };
  for (std::size_t i = 0; i < targets.size(); ++i) {
    TermMap want = normalize(targets[i]);
    TermMap want_flipped = normalize(chi_flip(targets[i]));
    bool found = false;
    for (const TermMap& got : generated)
      if (got == want || got == want_flipped) { found = true; break; }
    require(found, "printed shuffle relation #" + std::to_string(i) +
                       " not generated");
  }
  // (c) every weight-3 relation from weight-4 words verifies on [7,300]
  PrimeWindow w3 = sieve_window(7, 300);
  for (const ShuffleRelation& sr : linear_shuffle_relations(4)) {
    if (sr.skipped || sr.trivial()) continue;
    Relation rel = shuffle_to_relation(sr);
    verify_all({rel}, w3, "linSha(4) " + rel.note);
  }
}

// ---- criterion 6: repeated-argument values via express_in_constants ----------

void criterion6() {
  for (int s : {1, 2, 3}) {
    for (int d : {2, 3}) {
      PrimeWindow window = sieve_window(static_cast<u64>(3 * s + 3), 500);
      for (const Relation& form : repeated_argument_forms(s, d)) {
        require(form.lhs.value_terms.size() == 1, "malformed closed form");
        const ValueRef& ref = form.lhs.value_terms.begin()->first;
        // expected right-hand side: value = -constant part of the relation
        LinearCombination expected;
        std::vector<ConstantMonomial> constants;
        for (const auto& [m, c] : form.lhs.constant_terms) {
          expected.add_constant(m, -c);
          constants.push_back(m);
        }
        auto lc = express_in_constants(ref, constants, window, 512, g_cache);
        require(lc.has_value(), "no expression for " + ref.key());
        for (const Prime& pr : window.primes) {
          u64 p = pr.value;
          u64 a, b, v;
          try {
            a = lc->eval(p, g_cache);
            b = expected.eval(p, g_cache);
            v = eval_ref(ref, p);
          } catch (const std::domain_error&) {
            continue;
          }
          require(a == b && a == v,
                  ref.key() + " expression mismatch at p=" + std::to_string(p));
        }
      }
    }
  }
}

// ---- criterion 7: sum formulas -------------------------------------------------

void criterion7() {
  // zero sums for T and S
  for (auto [w, d] : {std::pair{3, 2}, {5, 2}, {5, 4}, {7, 2}}) {
    PrimeWindow window = sieve_window(static_cast<u64>(w + 3), 300);
    for (FamilyTag f : {FamilyTag::T, FamilyTag::S}) {
      SumFormulaSpec spec;
      spec.w = w;
      spec.d = d;
      spec.family = Family{f, false};
      verify_all({sum_formula(spec)}, window,
                 "zero sum w=" + std::to_string(w) + " d=" + std::to_string(d));
    }
  }
  // full and one-slot signed sums
  for (int w : {3, 5, 7}) {
    PrimeWindow window = sieve_window(static_cast<u64>(w + 3), 300);
    for (int d = 1; d <= std::min(w, 3); ++d) {
      for (bool star : {false, true}) {
        SumFormulaSpec full;
        full.w = w;
        full.d = d;
        full.family = Family{FamilyTag::MMV, star};
        verify_all({sum_formula(full)}, window, "full sum");
        for (int i = 1; i <= d; ++i) {
          SumFormulaSpec one;
          one.kind = SumFormulaSpec::Kind::OneSlot;
          one.w = w;
          one.d = d;
          one.i = i;
          one.family = Family{FamilyTag::MMV, star};
          verify_all({sum_formula(one)}, window, "one-slot sum");
        }
      }
    }
  }
  // two-slot sums: the extracted multiple of beta_w must agree on >= 10 primes
  auto two_slot = [&](int w, int d, int i, int j) {
    PrimeWindow window = sieve_window(static_cast<u64>(w + 3), 300);
    std::size_t usable = 0;
    for (const Prime& pr : window.primes)
      if (pr.value > static_cast<u64>(w) + 2 && beta_mod(w, pr.value) != 0) ++usable;
    require(usable >= 10, "too few extraction primes");
    for (bool star : {false, true}) {
      SumFormulaSpec spec;
      spec.kind = SumFormulaSpec::Kind::TwoSlot;
      spec.w = w;
      spec.d = d;
      spec.i = i;
      spec.j = j;
      spec.family = Family{FamilyTag::MMV, star};
      Relation r = sum_formula(spec, window);  // throws on any disagreement
      verify_all({r}, window, "two-slot sum");
    }
  };
  two_slot(5, 2, 2, 1);
  for (auto [i, j] : {std::pair{2, 1}, {3, 1}, {3, 2}}) two_slot(7, 3, i, j);
}

// ---- criterion 8: dimension table ----------------------------------------------

void criterion8() {
  PrimeWindow window = sieve_window(7, 400);
  require(window.size() >= 30, "window too small");
  require(g_cache != nullptr, "cache is mandatory for dimension runs");
  std::vector<int> fes_expected = {1, 1, 2, 3, 5, 8};
  std::vector<int> fmtv_expected = {1, 0, 1, 2, 3, 3};
  for (int w = 1; w <= 6; ++w) {
    DimensionReport fes = dimension_report(Space::FES, w, window, 64, g_cache);
    require(fes.dim_estimate == fes_expected[w - 1],
            "FES w=" + std::to_string(w) + ": dim " +
                std::to_string(fes.dim_estimate) + " != " +
                std::to_string(fes_expected[w - 1]));
    DimensionReport fmtv = dimension_report(Space::FMTV, w, window, 64, g_cache);
    require(fmtv.dim_estimate == fmtv_expected[w - 1],
            "FMTV w=" + std::to_string(w) + ": dim " +
                std::to_string(fmtv.dim_estimate) + " != " +
                std::to_string(fmtv_expected[w - 1]));
    if (w <= 4) {
      DimensionReport fmmv = dimension_report(Space::FMMV, w, window, 64, g_cache);
      require(fmmv.dim_estimate == fes.dim_estimate,
              "FMMV w=" + std::to_string(w) + " dim != FES dim");
    }
  }
}

// ---- criterion 9: weight-2 alternating values over the constant basis ----------

void criterion9() {
  PrimeWindow window = sieve_window(7, 400);
  std::vector<ConstantMonomial> constants = {
      ConstantMonomial::parse("q2^2"), ConstantMonomial::parse("G"),
      ConstantMonomial::parse("chi*q2^2"), ConstantMonomial::parse("chi*G")};
  auto C = [](const char* s, const Rat& c) {
    return std::pair<ConstantMonomial, Rat>(ConstantMonomial::parse(s), c);
  };
  std::vector<std::pair<std::string, std::vector<std::pair<ConstantMonomial, Rat>>>>
      table = {
          {"z2:2", {}},
          {"z2:2~", {C("chi*G", Rat(1))}},
          {"t:2", {}},
          {"t:2~", {C("G", Rat(-1))}},
          {"z2:1,1", {C("q2^2", Rat(1, 2))}},
          {"z2:1,1~", {C("q2^2", Rat(3, 8)), C("chi*G", Rat(-1, 2))}},
          {"z2:1~,1", {C("q2^2", Rat(1, 8)), C("chi*G", Rat(-1, 2))}},
          {"z2:1~,1~", {C("q2^2", Rat(1, 8))}},
          {"t:1,1", {C("q2^2", Rat(1, 2))}},
          {"t:1,1~", {C("chi*q2^2", Rat(-1, 8)), C("G", Rat(1, 2))}},
          {"t:1~,1", {C("chi*q2^2", Rat(-3, 8)), C("G", Rat(1, 2))}},
          {"t:1~,1~", {C("q2^2", Rat(1, 8))}},
          {"T:1,1", {}},
          {"T:1,1~", {C("G", Rat(1, 2))}},
          {"T:1~,1", {C("chi*G", Rat(-1, 2))}},
          {"T:1~,1~", {C("G", Rat(1))}},
          {"S:1,1", {C("q2^2", Rat(-1))}},
          {"S:1,1~", {C("q2^2", Rat(-1, 2)), C("chi*G", Rat(1, 2))}},
          {"S:1~,1", {C("chi*q2^2", Rat(1, 2)), C("G", Rat(-1, 2))}},
          {"S:1~,1~", {C("chi*q2^2", Rat(1, 4)), C("G", Rat(-1))}},
      };
  require(table.size() == 20, "expected 20 weight-2 candidates");
  for (const auto& [key, expected] : table) {
    ValueRef ref = ValueRef::parse_key(key);
    auto lc = express_in_constants(ref, constants, window, 64, g_cache);
    require(lc.has_value(), key + ": no expression found");
    std::map<ConstantMonomial, Rat> want(expected.begin(), expected.end());
    require(lc->constant_terms == want, key + ": wrong coefficients, got " +
                                            lc->str());
  }
}

// ---- criterion 10: DP vs naive; series oracle vs symbolic translation ----------

void criterion10() {
  PrimeWindow window = sieve_window(5, 100);
  auto check_ref = [&](const ValueRef& ref) {
    for (const Prime& pr : window.primes) {
      u64 p = pr.value;
      if (p <= static_cast<u64>(ref.weight()) + 2) continue;
      u64 fast = eval_ref(ref, p);
      u64 slow = naive_eval(ref, p);
      require(fast == slow, ref.key() + " DP/naive mismatch at p=" +
                                std::to_string(p));
    }
  };
  for (int w = 1; w <= 5; ++w) {
    for (int d = 1; d <= std::min(w, 3); ++d) {
      for (bool star : {false, true}) {
        for (const SignedComposition& s : signed_compositions(w, d))
          check_ref(ValueRef::mmv(s, star));
        for (const EulerIndex& e : euler_indices(w, d))
          check_ref(ValueRef::euler(e, star));
        for (const auto& comp : positive_compositions(w, d)) {
          for (FamilyTag f : {FamilyTag::t, FamilyTag::T, FamilyTag::S,
                              FamilyTag::Zeta2}) {
            check_ref(ValueRef::specialized(f, comp, {}, star));
            if (d <= 2) {
              std::vector<int> bars(d, -1);
              check_ref(ValueRef::specialized(f, comp, bars, star));
            }
          }
        }
      }
    }
  }
  // word translations against the series oracle
  PrimeWindow wwin = sieve_window(7, 200);
  for (int wt = 2; wt <= 4; ++wt) {
    for (const Word& w : translatable_words(wt)) {
      SignedValueRef sv;
      try {
        sv = word_to_value(w);
      } catch (const std::domain_error&) {
        continue;
      }
      for (const Prime& pr : wwin.primes) {
        u64 p = pr.value;
        require(sv.eval(p) == series_coeff(w, p),
                w.letters + " translation mismatch at p=" + std::to_string(p));
      }
    }
  }
}

// ---- criterion 11: plant-and-recover -------------------------------------------

void criterion11() {
  PrimeWindow window = sieve_window(7, 400);
  std::vector<ConstantMonomial> constants = {
      ConstantMonomial::parse("q2^2"), ConstantMonomial::parse("G"),
      ConstantMonomial::parse("chi*q2^2"), ConstantMonomial::parse("chi*G")};
  // 20 planted dependencies: each weight-2 alternating value against the
  // constant basis; every recovery must be a single relation with height
  // <= 10 whose constant part reproduces the planted closed form, and no
  // spurious relation may appear.
  std::vector<std::string> keys = {
      "z2:2",    "z2:2~",   "t:2",     "t:2~",    "z2:1,1",  "z2:1,1~",
      "z2:1~,1", "z2:1~,1~", "t:1,1",  "t:1,1~",  "t:1~,1",  "t:1~,1~",
      "T:1,1",   "T:1,1~",  "T:1~,1",  "T:1~,1~", "S:1,1",   "S:1,1~",
      "S:1~,1",  "S:1~,1~"};
  require(keys.size() == 20, "expected 20 plants");
  int recovered = 0;
  for (const std::string& key : keys) {
    ValueRef ref = ValueRef::parse_key(key);
    auto rels = discover({ref}, constants, window, 10, g_cache);
    require(rels.size() == 1,
            key + ": expected exactly 1 relation, got " +
                std::to_string(rels.size()));
    // no false relation: re-verify on a disjoint window
    Relation check = rels[0];
    VerifyReport rep = verify(check, sieve_window(401, 600), g_cache);
    require(rep.pass(), key + ": recovered relation fails out of window");
    require(check.lhs.value_terms.count(ref) == 1, key + ": plant missing");
    ++recovered;
  }
  require(recovered == 20, "not all plants recovered");
  // independent columns must produce no relation at all
  require(discover({}, {ConstantMonomial::parse("q2"),
                        ConstantMonomial::parse("G"),
                        ConstantMonomial::parse("chi*q2")},
                   window, 10, g_cache)
              .empty(),
          "false relation among independent constants");
}

}  // namespace

int main() {
  g_cache_dir = std::filesystem::temp_directory_path() /
                ("fmmv-acceptance-cache-" + std::to_string(::getpid()));
  std::filesystem::remove_all(g_cache_dir);
  ResidueCache cache(g_cache_dir);
  g_cache = &cache;

  struct Criterion {
    int id;
    const char* name;
    std::function<void()> fn;
  };
  std::vector<Criterion> criteria = {
      {1, "depth-1 closed forms, s <= 9, p in [5,1000]", criterion1},
      {2, "depth-2 closed forms incl. star and Euler variants, p in [5,500]",
       criterion2},
      {3, "T(2~) = -G, p in [5,1000]", criterion3},
      {4, "weight-2 closed-form table, p in [5,1000]", criterion4},
      {5, "linear shuffle relation generator", criterion5},
      {6, "repeated-argument closed forms via express_in_constants", criterion6},
      {7, "sum formulas: zero, full, one-slot, two-slot extraction", criterion7},
      {8, "dimension table: FES, FMTV, FMMV", criterion8},
      {9, "weight-2 alternating values over the constant basis", criterion9},
      {10, "DP vs naive oracle; word translation vs series oracle", criterion10},
      {11, "plant-and-recover relation discovery", criterion11},
  };

  int failures = 0;
  for (const Criterion& c : criteria) {
    try {
      c.fn();
      std::cout << "CRITERION " << c.id << ": PASS - " << c.name << std::endl;
    } catch (const std::exception& e) {
      ++failures;
      std::cout << "CRITERION " << c.id << ": FAIL - " << c.name << " ("
                << e.what() << ")" << std::endl;
    }
  }
  g_cache = nullptr;
  std::filesystem::remove_all(g_cache_dir);
  return failures == 0 ? 0 : 1;
}
