#include "fmmv/evaluator.hpp"

#include <algorithm>
#include <cctype>
#include <future>
#include <sstream>
#include <stdexcept>
#include <tuple>

#include "fmmv/cache.hpp"

namespace fmmv {

int ValueRef::weight() const {
  int w = 0;
  for (int m : mags) w += m;
  return w;
}

namespace {

// Does eps match the parity pattern of a named specialization?
std::optional<FamilyTag> match_specialization(const std::vector<int>& eps) {
  int d = static_cast<int>(eps.size());
  if (d == 0) return std::nullopt;
  for (FamilyTag f : {FamilyTag::Zeta2, FamilyTag::t, FamilyTag::T, FamilyTag::S})
    if (eps == family_eps(f, d)) return f;
  return std::nullopt;
}

bool all_plus(const std::vector<int>& v) {
  return std::all_of(v.begin(), v.end(), [](int x) { return x == 1; });
}

}  // namespace

ValueRef ValueRef::euler(EulerIndex idx, bool star) {
  ValueRef r;
  r.family = Family{FamilyTag::EulerSum, star};
  r.mags = std::move(idx.mags);
  r.signs = std::move(idx.signs);
  return r;
}

ValueRef ValueRef::ammv(AmmvIndex idx, bool star) {
  if (idx.s.size() != idx.eps.size() || idx.s.size() != idx.sigma.size())
    throw std::invalid_argument("AmmvIndex: component lengths differ");
  ValueRef r;
  r.mags = std::move(idx.s);
  r.signs = std::move(idx.eps);
  r.sigmas = std::move(idx.sigma);
  if (auto f = match_specialization(r.signs)) {
    r.family = Family{*f, star};
  } else if (all_plus(r.sigmas)) {
    r.family = Family{FamilyTag::MMV, star};
  } else {
    r.family = Family{FamilyTag::AMMV, star};
  }
  return r;
}

ValueRef ValueRef::mmv(SignedComposition s, bool star) {
  AmmvIndex idx;
  for (int part : s.parts) {
    if (part == 0) throw std::invalid_argument("MMV part must be nonzero");
    idx.s.push_back(part < 0 ? -part : part);
    idx.eps.push_back(part < 0 ? -1 : 1);
    idx.sigma.push_back(1);
  }
  return ammv(std::move(idx), star);
}

ValueRef ValueRef::specialized(FamilyTag f, std::vector<int> mags,
                               std::vector<int> sigmas, bool star) {
  int d = static_cast<int>(mags.size());
  AmmvIndex idx;
  idx.s = std::move(mags);
  idx.eps = family_eps(f, d);
  idx.sigma = sigmas.empty() ? std::vector<int>(d, 1) : std::move(sigmas);
  return ammv(std::move(idx), star);
}

AmmvIndex ValueRef::as_ammv() const {
  if (family.tag == FamilyTag::EulerSum)
    throw std::logic_error("Euler sum has no parity index");
  AmmvIndex idx;
  idx.s = mags;
  idx.eps = signs;
  idx.sigma = sigmas;
  return idx;
}

SignedComposition ValueRef::as_mmv() const {
  AmmvIndex idx = as_ammv();
  if (!all_plus(idx.sigma)) throw std::logic_error("not a plain MMV (alternating)");
  SignedComposition s;
  for (int j = 0; j < idx.depth(); ++j)
    s.parts.push_back(idx.eps[j] * idx.s[j]);
  return s;
}

EulerIndex ValueRef::as_euler() const {
  if (family.tag != FamilyTag::EulerSum) throw std::logic_error("not an Euler sum");
  return EulerIndex{mags, signs};
}

std::string ValueRef::index_string() const {
  std::ostringstream os;
  for (int j = 0; j < depth(); ++j) {
    if (j) os << ",";
    switch (family.tag) {
      case FamilyTag::EulerSum:
        os << mags[j];
        if (signs[j] < 0) os << "~";
        break;
      case FamilyTag::MMV:
        os << (signs[j] < 0 ? -mags[j] : mags[j]);
        break;
      case FamilyTag::AMMV:
        os << (signs[j] < 0 ? -mags[j] : mags[j]);
        if (sigmas[j] < 0) os << "~";
        break;
      default:  // t / T / S / z2: parity implied, bars mark sigma
        os << mags[j];
        if (sigmas[j] < 0) os << "~";
        break;
    }
  }
  return os.str();
}

std::string ValueRef::key() const {
  std::string k = family_name(family) + ":" + index_string();
  return chi ? "chi*" + k : k;
}

bool operator<(const ValueRef& a, const ValueRef& b) {
  // + signs (stored +1) sort before - signs, hence the reversed compares
  if (a.mags != b.mags) return a.mags < b.mags;
  if (a.signs != b.signs) return a.signs > b.signs;
  if (a.sigmas != b.sigmas) return a.sigmas > b.sigmas;
  if (!(a.family == b.family)) return a.family < b.family;
  return a.chi < b.chi;
}

bool operator==(const ValueRef& a, const ValueRef& b) {
  return a.family == b.family && a.mags == b.mags && a.signs == b.signs &&
         a.sigmas == b.sigmas && a.chi == b.chi;
}

ValueRef ValueRef::parse(const std::string& fam, const std::string& index) {
  auto f = parse_family(fam);
  if (!f) throw std::invalid_argument("unknown family: " + fam);
  if (index.empty()) throw std::invalid_argument("empty index");
  std::string idx = index;
  bool star = f->star;
  if (!idx.empty() && idx.back() == '*') {  // star may ride on the index too
    star = true;
    idx.pop_back();
  }
  switch (f->tag) {
    case FamilyTag::EulerSum:
      return euler(parse_euler(idx), star);
    case FamilyTag::MMV:
      return mmv(parse_mmv(idx), star);
    case FamilyTag::AMMV: {
      // signed parts with optional trailing ~ for sigma = -1
      AmmvIndex a;
      std::string cur;
      auto flush = [&](const std::string& tok) {
        std::string t = tok;
        int sg = 1;
        if (!t.empty() && t.back() == '~') { sg = -1; t.pop_back(); }
        int v = std::stoi(t);
        if (v == 0) throw std::invalid_argument("index part must be nonzero");
        a.s.push_back(v < 0 ? -v : v);
        a.eps.push_back(v < 0 ? -1 : 1);
        a.sigma.push_back(sg);
      };
      for (char ch : idx) {
        if (ch == ',') { flush(cur); cur.clear(); }
        else if (!std::isspace(static_cast<unsigned char>(ch))) cur += ch;
      }
      flush(cur);
      return ammv(std::move(a), star);
    }
    default: {
      EulerIndex e = parse_euler(idx);  // same surface syntax: mags + ~
      return specialized(f->tag, e.mags, e.signs, star);
    }
  }
}

ValueRef ValueRef::parse_key(const std::string& key) {
  std::string k = key;
  bool chi = false;
  if (k.rfind("chi*", 0) == 0) { chi = true; k = k.substr(4); }
  auto colon = k.find(':');
  if (colon == std::string::npos) throw std::invalid_argument("bad value key: " + key);
  return parse(k.substr(0, colon), k.substr(colon + 1)).with_chi(chi);
}

// --- evaluation ----------------------------------------------------------

namespace {

struct Slot {
  int exp = 1;
  bool parity = false;  // parity-filtered (MMV-style) vs Euler sign slot
  int par = 0;          // n % 2 required when parity
  int sigma = 1;        // alternation sign on ceil(n/2) when parity
  int esign = 1;        // Euler sign (-1)^n factor base
};

std::vector<Slot> make_slots(const ValueRef& ref) {
  std::vector<Slot> slots(ref.depth());
  for (int j = 0; j < ref.depth(); ++j) {
    Slot& s = slots[j];
    s.exp = ref.mags[j];
    if (ref.family.tag == FamilyTag::EulerSum) {
      s.parity = false;
      s.esign = ref.signs[j];
    } else {
      s.parity = true;
      s.par = ref.signs[j] > 0 ? 0 : 1;  // +1 selects even n
      s.sigma = ref.sigmas[j];
    }
  }
  return slots;
}

u64 slot_weight(const Slot& s, u64 n, u64 inv_n, u64 p) {
  if (s.parity && (n & 1) != static_cast<u64>(s.par)) return 0;
  u64 w = mod_pow(inv_n, s.exp, p);
  bool negate = false;
  if (s.parity) {
    if (s.sigma < 0 && (((n + 1) / 2) & 1)) negate = true;
  } else {
    if (s.esign < 0 && (n & 1)) negate = true;
  }
  return negate ? mod_neg(w, p) : w;
}

u64 eval_slots(const std::vector<Slot>& slots, u64 p, bool star, bool chi) {
  int d = static_cast<int>(slots.size());
  u64 result;
  if (d == 0) {
    result = 1 % p;
  } else {
    auto inv = batch_inverses(p);
    // acc[k] sums the innermost k slots over chains below the current n
    std::vector<u64> acc(d + 1, 0);
    acc[0] = 1;
    for (u64 n = 1; n < p; ++n) {
      if (!star) {
        for (int k = d; k >= 1; --k) {
          u64 w = slot_weight(slots[d - k], n, inv[n - 1], p);
          if (w) acc[k] = mod_add(acc[k], mod_mul(w, acc[k - 1], p), p);
        }
      } else {
        for (int k = 1; k <= d; ++k) {
          u64 w = slot_weight(slots[d - k], n, inv[n - 1], p);
          if (w) acc[k] = mod_add(acc[k], mod_mul(w, acc[k - 1], p), p);
        }
      }
    }
    result = acc[d];
  }
  if (chi && chi_mod(p) != 1) result = mod_neg(result, p);
  return result;
}

void require_prime_floor(int weight, u64 p) {
  if (p <= static_cast<u64>(weight) + 2)
    throw std::domain_error("prime " + std::to_string(p) + " too small; need p > " +
                            std::to_string(weight + 2));
}

}  // namespace

u64 euler_sum_mod(const EulerIndex& idx, u64 p, bool star) {
  ValueRef r = ValueRef::euler(idx, star);
  require_prime_floor(r.weight(), p);
  return eval_slots(make_slots(r), p, star, false);
}

u64 mmv_mod(const SignedComposition& s, u64 p, bool star) {
  ValueRef r = ValueRef::mmv(s, star);
  require_prime_floor(r.weight(), p);
  return eval_slots(make_slots(r), p, star, false);
}

u64 ammv_mod(const AmmvIndex& idx, u64 p, bool star) {
  ValueRef r = ValueRef::ammv(idx, star);
  require_prime_floor(r.weight(), p);
  if (p % 2 == 0) throw std::domain_error("need odd prime");
  return eval_slots(make_slots(r), p, star, false);
}

u64 eval_ref(const ValueRef& ref, u64 p) {
  require_prime_floor(ref.weight(), p);
  return eval_slots(make_slots(ref), p, ref.family.star, ref.chi);
}

u64 naive_eval(const ValueRef& ref, u64 p) {
  if (p > 200 || ref.depth() > 4)
    throw std::invalid_argument("naive_eval: cost guard (p <= 200, depth <= 4)");
  require_prime_floor(ref.weight(), p);
  auto slots = make_slots(ref);
  auto inv = batch_inverses(p);
  int d = ref.depth();
  bool star = ref.family.star;
  u64 total = 0;
  // nested chains p > n_1 >(=) ... >(=) n_d > 0
  std::vector<u64> n(d + 1, 0);
  auto rec = [&](auto&& self, int j, u64 bound, u64 partial) -> void {
    if (j == d) {
      total = mod_add(total, partial, p);
      return;
    }
    u64 hi = star && j > 0 ? bound : bound - 1;
    for (u64 v = 1; v <= hi && hi < p; ++v) {
      u64 w = slot_weight(slots[j], v, inv[v - 1], p);
      if (!w) continue;
      self(self, j + 1, v, mod_mul(partial, w, p));
    }
  };
  if (d == 0) {
    total = 1 % p;
  } else {
    rec(rec, 0, p, 1);
  }
  if (ref.chi && chi_mod(p) != 1) total = mod_neg(total, p);
  return total;
}

AdeleSample window_eval(const ValueRef& ref, const PrimeWindow& window,
                        ResidueCache* cache, int threads) {
  AdeleSample out;
  if (window.empty()) {
    out.skips.emplace_back(0, "empty prime window");
    return out;
  }
  int weight = ref.weight();
  std::vector<u64> todo;
  for (const Prime& pr : window.primes) {
    if (pr.value <= static_cast<u64>(weight) + 2) {
      out.skips.emplace_back(pr.value, "prime too small for weight " + std::to_string(weight));
      continue;
    }
    if (cache) {
      if (auto hit = cache->get(ref, pr.value)) {
        out.entries[pr.value] = *hit;
        continue;
      }
    }
    todo.push_back(pr.value);
  }
  if (threads > 1 && todo.size() > 1) {
    std::vector<std::future<u64>> futs;
    futs.reserve(todo.size());
    for (u64 p : todo)
      futs.push_back(std::async(std::launch::async, [&ref, p] { return eval_ref(ref, p); }));
    for (std::size_t i = 0; i < todo.size(); ++i) out.entries[todo[i]] = futs[i].get();
  } else {
    for (u64 p : todo) out.entries[p] = eval_ref(ref, p);
  }
  if (cache)
    for (u64 p : todo) cache->put(ref, p, out.entries[p]);
  return out;
}

}  // namespace fmmv
