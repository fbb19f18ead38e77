#include "cforge/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>

namespace cforge {

namespace {

using Tables = std::vector<std::pair<std::string, CsvTable>>;

struct Params {
  const Json& j;

  const Json& at(const char* key) const {
    if (!j.contains(key)) fail(ErrorKind::ParseError, std::string("missing field \"") + key + "\"");
    return j.at(key);
  }
  bool has(const char* key) const { return j.contains(key); }

  std::int64_t count(const char* key, std::int64_t def) const {
    if (!has(key)) return def;
    const Json& v = j.at(key);
    if (!v.is_number_integer() || v.get<std::int64_t>() < 1)
      fail(ErrorKind::ParseError, std::string("\"") + key + "\" must be a positive integer");
    return v.get<std::int64_t>();
  }
  double real(const char* key, double def) const {
    if (!has(key)) return def;
    const Json& v = j.at(key);
    if (v.is_string()) return to_double(parse_rational(v.get<std::string>()));
    if (!v.is_number()) fail(ErrorKind::ParseError, std::string("\"") + key + "\" must be a number");
    return v.get<double>();
  }
  double positive(const char* key, double def) const {
    const double x = real(key, def);
    if (!(x > 0.0) || !std::isfinite(x)) fail(ErrorKind::ParseError, std::string("\"") + key + "\" must be positive");
    return x;
  }
  std::string text(const char* key) const {
    const Json& v = at(key);
    if (!v.is_string()) fail(ErrorKind::ParseError, std::string("\"") + key + "\" must be a string");
    return v.get<std::string>();
  }
  std::uint64_t seed() const {
    const Json& v = at("seed");
    if (!v.is_number_unsigned()) fail(ErrorKind::ParseError, "\"seed\" must be a non-negative 64-bit integer");
    return v.get<std::uint64_t>();
  }
};

std::string str(double x) { return format_double(x); }
std::string str(std::int64_t x) { return std::to_string(x); }

Json cmd_classify(const Params& p, Tables& tables) {
  const auto ms = matrices_from_json(p.at("matrices"));
  CsvTable csv{{"index", "class", "trace", "spectral_radius", "log_spectral_radius", "norm"}, {}};
  Json rows = Json::array();
  for (std::size_t i = 0; i < ms.size(); ++i) {
    const Mat2& m = ms[i];
    const char* cls = classify(m) == MatClass::Elliptic     ? "Elliptic"
                      : classify(m) == MatClass::Parabolic ? "Parabolic"
                                                           : "Hyperbolic";
    rows.push_back({{"index", i},
                    {"matrix", to_json(m)},
                    {"class", cls},
                    {"trace", m.trace()},
                    {"spectral_radius", spectral_radius(m)},
                    {"log_spectral_radius", log_spectral_radius(m)},
                    {"norm", m.norm()}});
    csv.add({std::to_string(i), cls, str(m.trace()), str(spectral_radius(m)), str(log_spectral_radius(m)),
             str(m.norm())});
  }
  tables.push_back({"classify", csv});
  return {{"rows", rows}};
}

Json cmd_exponent(const Params& p, Tables& tables) {
  const StepCocycle a = cocycle_from_json(p.at("cocycle"));
  const Iet t = dynamics_from_json(p.at("dynamics"));
  const std::int64_t kmax = p.count("k_max", 8);
  const auto cap = static_cast<std::size_t>(p.count("piece_cap", static_cast<std::int64_t>(kDefaultPieceCap)));
  const std::vector<double> prof = lambda_profile(a, t, kmax, cap);
  Json out{{"lambda_k", prof}, {"sup_norm", a.sup_norm()}};
  const auto inf = std::min_element(prof.begin(), prof.end());
  out["le_inf_estimate"] = {{"value", *inf}, {"order", std::distance(prof.begin(), inf) + 1}};
  std::optional<double> le;
  try {
    const ExponentReport r = le_periodic(a, t, std::nullopt, cap);
    le = r.value;
    out["le_periodic"] = to_json(r);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::NonPeriodic && !is_budget_error(e.kind())) throw;
    out["le_periodic"] = nullptr;
    out["le_periodic_error"] = {{"kind", error_name(e.kind())}, {"message", e.detail()}};
  }
  CsvTable csv{{"k", "lambda_k"}, {}};
  CsvTable lng{{"series", "x", "y"}, {}};
  for (std::size_t k = 0; k < prof.size(); ++k) {
    csv.add({std::to_string(k + 1), str(prof[k])});
    lng.add({"lambda_k", std::to_string(k + 1), str(prof[k])});
  }
  if (le)
    for (std::size_t k = 0; k < prof.size(); ++k) lng.add({"le_periodic", std::to_string(k + 1), str(*le)});
  tables.push_back({"exponent", csv});
  tables.push_back({"exponent_long", lng});
  if (p.has("probe")) {
    const Params q{p.at("probe")};
    std::vector<Rational> deltas;
    for (const auto& d : q.at("deltas")) deltas.push_back(rational_from_json(d));
    const auto rows = semicontinuity_probe(a, t, q.count("k", 1), deltas,
                                           static_cast<std::size_t>(q.count("samples", 16)), p.seed());
    CsvTable pc{{"delta", "max_lambda", "samples"}, {}};
    Json pj = Json::array();
    for (const auto& r : rows) {
      pc.add({format_rational(r.delta), str(r.max_lambda), std::to_string(r.samples)});
      pj.push_back({{"delta", format_rational(r.delta)}, {"max_lambda", r.max_lambda}, {"samples", r.samples}});
    }
    out["probe"] = pj;
    tables.push_back({"probe", pc});
  }
  return out;
}

Json cmd_certify(const Params& p, Tables& tables, unsigned threads) {
  const auto sigma = matrices_from_json(p.at("sigma"));
  const std::int64_t depth = p.count("depth", 10);
  const double lambda = p.positive("lambda", 1.0);
  const int resolution = static_cast<int>(p.count("resolution", 256));
  const auto budget = static_cast<std::uint64_t>(p.count("word_budget", static_cast<std::int64_t>(kDefaultWordBudget)));
  const std::int64_t max_len = p.count("elliptic_max_len", 8);

  const UhVerdict scan = word_scan(sigma, depth, lambda, budget, threads);
  const auto cert = interval_certificate(sigma, resolution);
  const auto ell = elliptic_in_semigroup(sigma, max_len, budget);
  const StepCocycle a = p.has("cocycle") ? cocycle_from_json(p.at("cocycle")) : StepCocycle::uniform(sigma);
  const AddendumCase add = addendum_classify(a, resolution);

  std::string status = "Undecided";
  if (cert) status = uh_status_name(UhStatus::CertifiedUH);
  else if (scan.status == UhStatus::CounterexampleWord || ell) status = uh_status_name(UhStatus::CounterexampleWord);

  Json out{{"status", status}, {"word_scan", to_json(scan)}, {"addendum", to_json(add)}};
  out["certificate"] = nullptr;
  if (cert) {
    Json fam = Json::array();
    for (const auto& arc : cert->family) fam.push_back(to_json(arc));
    out["certificate"] = {{"family", fam}, {"lambda", cert->lambda}};
  }
  out["elliptic_word"] = ell ? Json(*ell) : Json(nullptr);
  CsvTable csv{{"item", "value"}, {}};
  csv.add({"status", status});
  csv.add({"word_scan", uh_status_name(scan.status)});
  csv.add({"witness", format_word(scan.witness)});
  csv.add({"certificate_arcs", std::to_string(cert ? cert->family.size() : 0)});
  csv.add({"certificate_lambda", cert ? str(cert->lambda) : ""});
  csv.add({"elliptic_word", ell ? format_word(*ell) : ""});
  csv.add({"addendum", addendum_tag_name(add.tag)});
  tables.push_back({"certify", csv});
  return out;
}

Json cmd_lower(const Params& p, Tables& tables) {
  const std::string mode = p.text("mode");
  const StepCocycle a = cocycle_from_json(p.at("cocycle"));
  const Iet t = dynamics_from_json(p.at("dynamics"));
  const Rational epsilon = rational_from_json(p.at("epsilon"));
  const double delta = p.positive("delta", 0.05);
  SurgeryReport rep;
  if (mode == "discrete") {
    DiscreteOptions o;
    o.max_word_len = p.count("max_word_len", o.max_word_len);
    o.n_max = p.count("n_max", o.n_max);
    o.word_budget = static_cast<std::uint64_t>(p.count("word_budget", static_cast<std::int64_t>(o.word_budget)));
    rep = lower_exponent_discrete(a, t, epsilon, delta, o);
  } else if (mode == "rich") {
    RichOptions o;
    o.evidence_n_max = p.count("evidence_n_max", o.evidence_n_max);
    o.v_grid = static_cast<int>(p.count("v_grid", o.v_grid));
    o.bins = static_cast<int>(p.count("bins", o.bins));
    o.angle_tol = p.positive("angle_tol", o.angle_tol);
    o.ell_max = p.count("ell_max", o.ell_max);
    o.piece_budget = static_cast<std::size_t>(p.count("piece_budget", static_cast<std::int64_t>(o.piece_budget)));
    rep = lower_exponent_rich(a, family_from_json(p.at("evidence")), t, epsilon, delta, o);
  } else {
    fail(ErrorKind::ParseError, "mode must be \"discrete\" or \"rich\"");
  }
  Json out = to_json(rep);
  out["mode"] = mode;

  CsvTable log{{"step", "key", "value"}, {}};
  for (const auto& e : rep.trace_log)
    for (const auto& [k, v] : e.params) log.add({e.step, k, v});
  tables.push_back({"trace", log});

  const std::int64_t kmax = p.count("trace_k", 4);
  const auto before = lambda_profile(a, t, kmax);
  const auto after = lambda_profile(a, rep.t_tilde, kmax);
  CsvTable lng{{"series", "x", "y"}, {}};
  for (std::int64_t k = 1; k <= kmax; ++k) lng.add({"lambda_k_before", str(k), str(before[k - 1])});
  for (std::int64_t k = 1; k <= kmax; ++k) lng.add({"lambda_k_after", str(k), str(after[k - 1])});
  lng.add({"le", "0", str(rep.le_before)});
  lng.add({"le", "1", str(rep.le_after)});
  lng.add({"bound", "1", str(rep.bound)});
  tables.push_back({"exponent_trace", lng});
  out["lambda_k_before"] = before;
  out["lambda_k_after"] = after;
  return out;
}

Json scan_liouville(const Params& p, Tables& tables) {
  const Mat2 r = matrix_from_json(p.at("R"));
  const Mat2 h = matrix_from_json(p.at("H"));
  const double eps = p.positive("epsilon", 0.05);
  const std::int64_t n_max = p.count("n_max", 1000);
  const std::int64_t scale = p.count("psi_scale", 1);
  const bool shortcut = p.has("shortcut") ? p.at("shortcut").get<bool>() : true;
  const auto psi = [scale](std::int64_t n) { return scale * n; };
  LiouvilleHit best{0, 0.0};
  const auto hit = liouville_search(r, h, psi, eps, n_max, shortcut, &best);
  CsvTable lng{{"series", "x", "y"}, {}};
  for (std::int64_t n = 1; n <= n_max; ++n)
    lng.add({"liouville", str(n),
             str(liouville_log_radius(r, h, n, psi(n)) / static_cast<double>(psi(n)))});
  tables.push_back({"liouville", lng});
  Json out{{"mode", "liouville"}, {"epsilon", eps}, {"best", {{"n", best.n}, {"value", best.value}}}};
  out["hit"] = hit ? Json{{"n", hit->n}, {"value", hit->value}} : Json(nullptr);
  return out;
}

std::vector<std::vector<Mat2>> random_words(const Params& q, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> angle(0.0, kPi), stretch(1.0, q.positive("max_norm", 4.0));
  std::vector<std::vector<Mat2>> words(static_cast<std::size_t>(q.count("count", 100)));
  const std::int64_t max_len = q.count("max_len", 8);
  for (auto& w : words) {
    const auto len = static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(max_len)) + 1;
    for (std::int64_t i = 0; i < len; ++i) {
      const double a = angle(rng), s = stretch(rng), b = angle(rng);
      w.push_back(Mat2::rotation(a) * Mat2::diag(s) * Mat2::rotation(b));
    }
  }
  return words;
}

Json scan_avila(const Params& p, Tables& tables) {
  std::vector<std::vector<Mat2>> words;
  if (p.has("random")) {
    words = random_words(Params{p.at("random")}, p.seed());
  } else {
    for (const auto& w : p.at("words")) words.push_back(matrices_from_json(w));
  }
  const double c = p.positive("budget_constant", 10.0);
  const double min_rho = p.positive("min_rho", 1.05);
  CsvTable csv{{"index", "length", "log_rho", "budget", "theta", "status"}, {}};
  std::int64_t hits = 0, attempts = 0;
  for (std::size_t i = 0; i < words.size(); ++i) {
    Mat2 prod;
    for (const auto& m : words[i]) prod = m * prod;
    const double lr = log_spectral_radius(prod);
    const double n = static_cast<double>(words[i].size());
    const double budget = c / n * lr;
    std::string theta, status = "skipped";
    if (lr > std::log(min_rho)) {
      ++attempts;
      const auto th = avila_theta_search(words[i], budget);
      status = th ? "found" : "not_found";
      if (th) {
        ++hits;
        theta = str(*th);
      }
    }
    csv.add({std::to_string(i), std::to_string(words[i].size()), str(lr), str(budget), theta, status});
  }
  tables.push_back({"avila", csv});
  return {{"mode", "avila"}, {"words", words.size()}, {"attempts", attempts}, {"hits", hits}};
}

Json scan_frequency(const Params& p, Tables& tables) {
  const Mat2 a1 = matrix_from_json(p.at("A1"));
  const Mat2 a2 = matrix_from_json(p.at("A2"));
  const auto words = frequency_word_scan(a1, a2, p.positive("p", 0.5), p.positive("lambda", 1.0), p.count("n_max", 10),
                                         static_cast<std::uint64_t>(p.count("budget", 1LL << 22)));
  CsvTable csv{{"word", "length", "letters_2", "note"}, {}};
  for (const auto& w : words) {
    std::string s;
    for (int x : w) s += static_cast<char>('0' + x);
    csv.add({s, std::to_string(w.size()), std::to_string(std::count(w.begin(), w.end(), 2)), ""});
  }
  if (words.empty()) csv.add({"", "", "", "no word satisfies the constraints"});
  tables.push_back({"frequency", csv});
  return {{"mode", "frequency"}, {"words", words.size()}};
}

Json scan_richness(const Params& p, Tables& tables) {
  const MatrixFamily f = family_from_json(p.at("family"));
  const std::int64_t n = p.count("N", 1);
  const int v_grid = static_cast<int>(p.count("v_grid", 16));
  const int bins = static_cast<int>(p.count("bins", 64));
  const RichnessKappa k = richness_kappa(f, n, v_grid, bins,
                                         static_cast<std::size_t>(p.count("atom_cap", kDefaultAtomCap)));
  CsvTable lng{{"series", "x", "y"}, {}};
  for (int j = 0; j < v_grid; ++j)
    lng.add({"kappa_fwd", str(kPi * (j + 1.0 / 3.0) / v_grid), str(k.per_direction_fwd[j])});
  for (int j = 0; j < v_grid; ++j)
    lng.add({"kappa_inv", str(kPi * (j + 1.0 / 3.0) / v_grid), str(k.per_direction_inv[j])});
  tables.push_back({"richness", lng});
  const CriterionReport cr = richness_criterion(f);
  return {{"mode", "richness"},
          {"N", n},
          {"kappa_fwd", k.kappa_fwd},
          {"kappa_inv", k.kappa_inv},
          {"criterion",
           {{"elliptic_word", cr.elliptic_word ? Json(*cr.elliptic_word) : Json(nullptr)},
            {"nonconstant", cr.nonconstant},
            {"trace_locally_constant", cr.trace_locally_constant},
            {"doubled_trace_nonconstant", cr.doubled_trace_nonconstant},
            {"max_difference_quotient", cr.max_difference_quotient}}}};
}

Json cmd_scan(const Params& p, Tables& tables) {
  const std::string mode = p.text("mode");
  if (mode == "liouville") return scan_liouville(p, tables);
  if (mode == "avila") return scan_avila(p, tables);
  if (mode == "frequency") return scan_frequency(p, tables);
  if (mode == "richness") return scan_richness(p, tables);
  fail(ErrorKind::ParseError, "unknown scan mode \"" + mode + "\"");
}

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"classify", "exponent", "certify", "lower", "scan"};
  return names;
}

std::string fnv1a64_hex(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

int exit_code_for(ErrorKind kind) {
  if (is_budget_error(kind)) return 3;
  if (is_domain_error(kind)) return 2;
  return 1;
}

CommandOutput run_command(const std::string& command, const std::string& config_text, unsigned threads) {
  CommandOutput out;
  out.report = {{"version", kVersion}, {"command", command}, {"config_hash", fnv1a64_hex(config_text)}};
  try {
    Json config;
    try {
      config = Json::parse(config_text);
    } catch (const Json::exception& e) {
      fail(ErrorKind::ParseError, e.what());
    }
    if (!config.is_object()) fail(ErrorKind::ParseError, "config must be a JSON object");
    if (config.contains("command") && config.at("command") != command)
      fail(ErrorKind::ParseError, "config is for command " + config.at("command").dump());
    const Params p{config};
    Json result;
    if (command == "classify") result = cmd_classify(p, out.tables);
    else if (command == "exponent") result = cmd_exponent(p, out.tables);
    else if (command == "certify") result = cmd_certify(p, out.tables, threads);
    else if (command == "lower") result = cmd_lower(p, out.tables);
    else if (command == "scan") result = cmd_scan(p, out.tables);
    else fail(ErrorKind::ParseError, "unknown command \"" + command + "\"");
    out.report["status"] = "ok";
    out.report["result"] = std::move(result);
  } catch (const Error& e) {
    out.tables.clear();
    out.exit_code = exit_code_for(e.kind());
    out.report["status"] = "error";
    out.report["error"] = {{"kind", error_name(e.kind())}, {"message", e.detail()}, {"exit_code", out.exit_code}};
  } catch (const Json::exception& e) {
    out.tables.clear();
    out.exit_code = 1;
    out.report["status"] = "error";
    out.report["error"] = {{"kind", error_name(ErrorKind::ParseError)}, {"message", e.what()}, {"exit_code", 1}};
  }
  return out;
}

void write_outputs(const CommandOutput& out, const std::string& out_dir) {
  namespace fs = std::filesystem;
  const fs::path dir(out_dir);
  fs::create_directories(dir / "tables");
  std::ofstream(dir / "report.json", std::ios::binary) << out.report.dump(2) << "\n";
  for (const auto& [name, table] : out.tables)
    std::ofstream(dir / "tables" / (name + ".csv"), std::ios::binary) << table.str();
}

}  // namespace cforge
