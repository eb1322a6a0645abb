#include "fmmv/cli.hpp"

#include <chrono>
#include <ctime>
#include <fstream>
#include <memory>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "fmmv/cache.hpp"

namespace fmmv {

namespace {

std::pair<u64, u64> parse_prime_range(const std::string& text) {
  auto pos = text.find("..");
  if (pos == std::string::npos)
    throw std::invalid_argument("prime range must be lo..hi, got: " + text);
  u64 lo = std::stoull(text.substr(0, pos));
  u64 hi = std::stoull(text.substr(pos + 2));
  if (lo < 2 || hi < lo)
    throw std::invalid_argument("bad prime range: " + text);
  return {lo, hi};
}

std::string trim(const std::string& s) {
  auto a = s.find_first_not_of(" \t\r\n");
  auto b = s.find_last_not_of(" \t\r\n");
  return a == std::string::npos ? "" : s.substr(a, b - a + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(item);
  return out;
}

void emit_header(std::ostream& os, const Config& cfg) {
  if (!cfg.timestamp) return;
  auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char buf[64];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  os << "# generated " << buf << "\n";
}

}  // namespace

void Config::validate() const {
  if (prime_lo < 2 || prime_hi < prime_lo)
    throw std::invalid_argument("config: need 2 <= prime_lo <= prime_hi");
  if (!(Rat(0) < holdout_fraction) || !(holdout_fraction < Rat(1)))
    throw std::invalid_argument("config: holdout_fraction must be in (0,1)");
  if (height_bound < 1) throw std::invalid_argument("config: height_bound >= 1");
  if (threads < 0) throw std::invalid_argument("config: threads >= 0");
  if (output != "text" && output != "json" && output != "csv")
    throw std::invalid_argument("config: output must be text|json|csv");
}

std::string Config::show() const {
  std::ostringstream os;
  os << "prime_lo = " << prime_lo << "\n"
     << "prime_hi = " << prime_hi << "\n"
     << "holdout_fraction = " << holdout_fraction.str() << "\n"
     << "height_bound = " << height_bound << "\n"
     << "cache_dir = " << cache_dir << "\n"
     << "threads = " << threads << "\n"
     << "output = " << output << "\n"
     << "timestamp = " << (timestamp ? "true" : "false") << "\n";
  return os.str();
}

Config load_config(const std::string& path, Config base) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file: " + path);
  std::string line;
  while (std::getline(in, line)) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line is not key = value: " + line);
    std::string key = trim(line.substr(0, eq));
    std::string val = trim(line.substr(eq + 1));
    if (key == "prime_lo") base.prime_lo = std::stoull(val);
    else if (key == "prime_hi") base.prime_hi = std::stoull(val);
    else if (key == "holdout_fraction") base.holdout_fraction = Rat::parse(val);
    else if (key == "height_bound") base.height_bound = std::stoi(val);
    else if (key == "cache_dir") base.cache_dir = val;
    else if (key == "threads") base.threads = std::stoi(val);
    else if (key == "output") base.output = val;
    else if (key == "timestamp") base.timestamp = (val == "true" || val == "1");
    else throw std::invalid_argument("unknown config key: " + key);
  }
  base.validate();
  return base;
}

std::vector<Relation> paper_suite(int max_weight) {
  std::vector<Relation> suite;
  auto append = [&](std::vector<Relation> v) {
    for (Relation& r : v) suite.push_back(std::move(r));
  };
  for (int s = 1; s <= 9; ++s) append(depth1_closed_forms(s));
  for (int w = 3; w <= 9; w += 2) append(depth2_closed_forms(w));
  append(weight2_table());
  for (int s = 1; s <= 3; ++s) {
    append(repeated_argument_forms(s, 2));
    append(repeated_argument_forms(s, 3));
  }
  for (int w = 1; w <= max_weight; ++w) append(relation_suite(w));
  return suite;
}

namespace {

struct App {
  Config cfg;
  std::unique_ptr<ResidueCache> cache;
  std::ostream& out;
  std::ostream& err;

  ResidueCache* cache_ptr() {
    if (!cache && !cfg.cache_dir.empty())
      cache = std::make_unique<ResidueCache>(cfg.cache_dir);
    return cache.get();
  }
  PrimeWindow window() const { return sieve_window(cfg.prime_lo, cfg.prime_hi); }
  int effective_threads() const {
    return cfg.threads ? cfg.threads
                       : static_cast<int>(std::thread::hardware_concurrency());
  }
};

int cmd_eval(App& app, const std::string& family, const std::string& index) {
  ValueRef ref = ValueRef::parse(family, index);
  AdeleSample sample =
      window_eval(ref, app.window(), app.cache_ptr(), app.effective_threads());
  emit_header(app.out, app.cfg);
  if (app.cfg.output == "json") {
    nlohmann::json j;
    j["schema"] = 1;
    j["key"] = ref.key();
    j["entries"] = nlohmann::json::object();
    for (const auto& [p, v] : sample.entries)
      j["entries"][std::to_string(p)] = v;
    j["skips"] = nlohmann::json::array();
    for (const auto& [p, why] : sample.skips)
      j["skips"].push_back({{"prime", p}, {"reason", why}});
    app.out << j.dump() << "\n";
  } else if (app.cfg.output == "csv") {
    app.out << "prime,residue\n";
    for (const auto& [p, v] : sample.entries) app.out << p << "," << v << "\n";
  } else {
    app.out << "{";
    bool first = true;
    for (const auto& [p, v] : sample.entries) {
      if (!first) app.out << ", ";
      first = false;
      app.out << p << ":" << v;
    }
    app.out << "}\n";
    for (const auto& [p, why] : sample.skips)
      app.out << "skip " << p << ": " << why << "\n";
  }
  return 0;
}

int cmd_verify_paper(App& app, int max_weight) {
  PrimeWindow window = app.window();
  emit_header(app.out, app.cfg);
  std::size_t failures = 0;
  for (Relation& r : paper_suite(max_weight)) {
    VerifyReport rep = verify(r, window, app.cache_ptr());
    if (rep.pass()) {
      app.out << "PASS [" << r.provenance << "] " << r.note << " (" <<
          rep.primes_checked << " primes)\n";
    } else {
      ++failures;
      app.out << "FAIL [" << r.provenance << "] " << r.note;
      if (!rep.failures.empty())
        app.out << " first at p=" << rep.failures.front().first << " lhs="
                << rep.failures.front().second;
      if (rep.primes_checked == 0) app.out << " (no usable prime in window)";
      app.out << "\n";
    }
  }
  app.out << (failures ? "FAILED: " : "OK: ") << failures << " failures\n";
  return failures ? 1 : 0;
}

int cmd_relations(App& app, int weight, const std::string& out_path) {
  PrimeWindow window = app.window();
  std::ofstream file;
  std::ostream* sink = &app.out;
  if (!out_path.empty()) {
    file.open(out_path);
    if (!file) throw std::runtime_error("cannot open output file: " + out_path);
    sink = &file;
  }
  emit_header(*sink, app.cfg);
  std::size_t failures = 0, emitted = 0;
  for (Relation& r : relation_suite(weight)) {
    VerifyReport rep = verify(r, window, app.cache_ptr());
    if (!rep.pass()) {
      ++failures;
      app.err << "FAIL [" << r.provenance << "] " << r.note << "\n";
      continue;
    }
    *sink << relation_to_json(r) << "\n";
    ++emitted;
  }
  if (!out_path.empty())
    app.out << "emitted " << emitted << " relations to " << out_path << "\n";
  if (failures) app.err << failures << " relations failed verification\n";
  return failures ? 1 : 0;
}

int cmd_dims(App& app, const std::string& space_str, int weight) {
  auto space = parse_space(space_str);
  if (!space) throw std::invalid_argument("unknown space: " + space_str);
  DimensionReport rep = dimension_report(*space, weight, app.window(),
                                         app.cfg.height_bound, app.cache_ptr());
  emit_header(app.out, app.cfg);
  if (app.cfg.output == "json") {
    nlohmann::json j;
    j["schema"] = 1;
    j["space"] = space_name(rep.space);
    j["weight"] = rep.weight;
    j["candidates"] = rep.candidates.size();
    j["relations"] = rep.relations.size();
    j["basis"] = nlohmann::json::array();
    for (const ValueRef& b : rep.basis) j["basis"].push_back(b.key());
    j["rank_lower"] = rep.rank_lower;
    j["dim_estimate"] = rep.dim_estimate;
    j["fibonacci_expected"] = rep.fibonacci_expected;
    app.out << j.dump() << "\n";
  } else {
    app.out << "space " << space_name(rep.space) << " weight " << rep.weight
            << "\n"
            << "candidates " << rep.candidates.size() << "\n"
            << "relations " << rep.relations.size() << "\n"
            << "dim_estimate " << rep.dim_estimate << "\n"
            << "rank_lower " << rep.rank_lower << "\n"
            << "fibonacci_expected " << rep.fibonacci_expected << "\n"
            << "basis:";
    for (const ValueRef& b : rep.basis) app.out << " " << b.key();
    app.out << "\n";
  }
  return 0;
}

int cmd_express(App& app, const std::string& family, const std::string& index,
                const std::string& constants_csv) {
  ValueRef ref = ValueRef::parse(family, index);
  std::vector<ConstantMonomial> constants;
  for (const std::string& tok : split(constants_csv, ','))
    if (!trim(tok).empty()) constants.push_back(ConstantMonomial::parse(trim(tok)));
  auto lc = express_in_constants(ref, constants, app.window(),
                                 app.cfg.height_bound, app.cache_ptr());
  emit_header(app.out, app.cfg);
  if (!lc) {
    app.out << ref.key() << ": no expression over {" << constants_csv << "}\n";
    return 1;
  }
  app.out << ref.key() << " = " << lc->str() << "\n";
  return 0;
}

int cmd_words(App& app, const std::vector<std::string>& shuffle_args,
              const std::string& coeff_word, u64 coeff_prime,
              const std::string& translate_word) {
  emit_header(app.out, app.cfg);
  if (!shuffle_args.empty()) {
    WordSum sum = shuffle(Word(shuffle_args[0]), Word(shuffle_args[1]));
    bool first = true;
    for (const auto& [w, c] : sum.terms) {
      if (!first) app.out << " + ";
      first = false;
      if (c != 1) app.out << c << "*";
      app.out << w.letters;
    }
    app.out << "\n";
    return 0;
  }
  if (!coeff_word.empty()) {
    app.out << series_coeff(Word(coeff_word), coeff_prime) << "\n";
    return 0;
  }
  if (!translate_word.empty()) {
    SignedValueRef sv = word_to_value(Word(translate_word));
    if (sv.zero) {
      app.out << "0\n";
      return 0;
    }
    app.out << (sv.scalar < 0 ? "-" : "") << (sv.chi_factor ? "chi*" : "")
            << sv.ref.key() << "\n";
    return 0;
  }
  throw std::invalid_argument("words: pass --shuffle, --coeff, or --translate");
}

int cmd_cache(App& app, const std::string& action) {
  if (app.cfg.cache_dir.empty())
    throw std::invalid_argument("cache: no cache_dir configured");
  ResidueCache* c = app.cache_ptr();
  if (action == "stats") {
    auto s = c->stats();
    app.out << "entries " << s.entries << "\n"
            << "files " << s.files << "\n";
    return 0;
  }
  if (action == "clear") {
    c->clear();
    app.out << "cache cleared\n";
    return 0;
  }
  throw std::invalid_argument("cache: action must be stats or clear");
}

}  // namespace

int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App cli{"finite multiple mixed values over prime windows"};
  cli.require_subcommand(0, 1);

  Config defaults;
  std::string config_path, primes, cache_dir_flag, output_flag;
  int threads_flag = -1, height_flag = -1;
  bool show_config = false, timestamp_flag = false;
  cli.add_option("--config", config_path, "key = value config file");
  cli.add_flag("--show-config", show_config, "print the effective config");
  cli.add_option("--primes", primes, "prime window lo..hi");
  cli.add_option("--cache-dir", cache_dir_flag, "residue cache directory");
  cli.add_option("--threads", threads_flag, "worker threads (0 = auto)");
  cli.add_option("--height", height_flag, "coefficient height bound");
  cli.add_option("--output", output_flag, "text | json | csv");
  cli.add_flag("--timestamp", timestamp_flag, "emit a timestamp header");

  auto* c_eval = cli.add_subcommand("eval", "evaluate a value over the window");
  std::string family, index;
  c_eval->add_option("--family", family, "family tag, e.g. T or t*")->required();
  c_eval->add_option("--index", index, "index string, e.g. 2,1 or 1,1~")->required();

  auto* c_verify = cli.add_subcommand("verify-paper", "run the identity suite");
  int max_weight = 4;
  c_verify->add_option("--max-weight", max_weight, "suite weight limit");

  auto* c_rel = cli.add_subcommand("relations", "emit the relation file");
  int rel_weight = 0;
  std::string rel_out;
  c_rel->add_option("--weight", rel_weight, "total weight")->required();
  c_rel->add_option("--out", rel_out, "output path (default stdout)");

  auto* c_dims = cli.add_subcommand("dims", "dimension report for a space");
  std::string space_str;
  int dims_weight = 0;
  c_dims->add_option("--space", space_str, "FES | FMtV | FMTV | FMSV | FMMV | ...")
      ->required();
  c_dims->add_option("--weight", dims_weight, "total weight")->required();

  auto* c_expr = cli.add_subcommand("express", "closed form over constants");
  std::string e_family, e_index, e_constants;
  c_expr->add_option("--family", e_family)->required();
  c_expr->add_option("--index", e_index)->required();
  c_expr->add_option("--constants", e_constants, "comma-separated monomials")
      ->required();

  auto* c_words = cli.add_subcommand("words", "word-calculus access");
  std::vector<std::string> shuffle_args;
  std::string coeff_word, translate_word;
  u64 coeff_prime = 0;
  c_words->add_option("--shuffle", shuffle_args, "two words to shuffle")
      ->expected(2);
  c_words->add_option("--coeff", coeff_word, "word for p*[t^p] extraction");
  c_words->add_option("--prime", coeff_prime, "prime for --coeff");
  c_words->add_option("--translate", translate_word, "word to translate");

  auto* c_cache = cli.add_subcommand("cache", "residue cache maintenance");
  std::string cache_action;
  c_cache->add_option("action", cache_action, "stats | clear")->required();

  // allow the global flags to appear after the subcommand name
  for (auto* sc : {c_eval, c_verify, c_rel, c_dims, c_expr, c_words, c_cache})
    sc->fallthrough();

  try {
    cli.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {  // --help
      out << cli.help();
      return 0;
    }
    err << "usage error: " << e.what() << "\n";
    return 2;
  }

  try {
    Config cfg = config_path.empty() ? defaults : load_config(config_path, defaults);
    if (!primes.empty())
      std::tie(cfg.prime_lo, cfg.prime_hi) = parse_prime_range(primes);
    if (!cache_dir_flag.empty()) cfg.cache_dir = cache_dir_flag;
    if (threads_flag >= 0) cfg.threads = threads_flag;
    if (height_flag >= 0) cfg.height_bound = height_flag;
    if (!output_flag.empty()) cfg.output = output_flag;
    if (timestamp_flag) cfg.timestamp = true;
    cfg.validate();

    if (show_config) {
      out << cfg.show();
      if (cli.get_subcommands().empty()) return 0;
    }

    App app{cfg, nullptr, out, err};
    if (c_eval->parsed()) return cmd_eval(app, family, index);
    if (c_verify->parsed()) return cmd_verify_paper(app, max_weight);
    if (c_rel->parsed()) return cmd_relations(app, rel_weight, rel_out);
    if (c_dims->parsed()) return cmd_dims(app, space_str, dims_weight);
    if (c_expr->parsed()) return cmd_express(app, e_family, e_index, e_constants);
    if (c_words->parsed())
      return cmd_words(app, shuffle_args, coeff_word, coeff_prime, translate_word);
    if (c_cache->parsed()) return cmd_cache(app, cache_action);
    if (!show_config) {
      err << "usage error: no subcommand\n" << cli.help();
      return 2;
    }
    return 0;
  } catch (const std::invalid_argument& e) {
    err << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return 3;
  }
}

}  // namespace fmmv
