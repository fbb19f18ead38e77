#include "cforge/serialize.hpp"

#include <cmath>
#include <cstdio>

#include "cforge/errors.hpp"

namespace cforge {

namespace {

double number(const Json& j, const char* what) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) return to_double(parse_rational(j.get<std::string>()));
  fail(ErrorKind::ParseError, std::string("expected a number for ") + what);
}

const Json& field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) fail(ErrorKind::ParseError, std::string("missing field \"") + key + "\"");
  return j.at(key);
}

int positive_int(const Json& j, const char* what) {
  if (!j.is_number_integer() || j.get<long long>() < 1 || j.get<long long>() > (1LL << 30))
    fail(ErrorKind::ParseError, std::string("expected a positive integer for ") + what);
  return j.get<int>();
}

}  // namespace

Rational rational_from_json(const Json& j) {
  if (j.is_number_integer()) return Rational(j.get<long>());
  if (j.is_string()) return parse_rational(j.get<std::string>());
  fail(ErrorKind::ParseError, "expected a rational as \"p/q\" or an integer");
}

Mat2 matrix_from_json(const Json& j) {
  if (j.is_array()) {
    if (j.size() != 4) fail(ErrorKind::ParseError, "matrix arrays need four entries");
    return Mat2(number(j[0], "matrix"), number(j[1], "matrix"), number(j[2], "matrix"), number(j[3], "matrix"));
  }
  if (j.is_object() && j.size() == 1) {
    const auto& [key, v] = *j.items().begin();
    if (key == "rotation") return Mat2::rotation(kPi * to_double(rational_from_json(v)));
    if (key == "diag") return Mat2::diag(number(v, "diag"));
    if (key == "upper") {
      if (!v.is_array() || v.size() != 2) fail(ErrorKind::ParseError, "upper needs [a, b]");
      return Mat2::upper(number(v[0], "upper"), number(v[1], "upper"));
    }
    if (key == "schrodinger")
      return Mat2(number(field(v, "lambda"), "lambda") * number(field(v, "v"), "v"), -1.0, 1.0, 0.0);
  }
  fail(ErrorKind::ParseError, "unrecognized matrix spec " + j.dump());
}

std::vector<Mat2> matrices_from_json(const Json& j) {
  if (!j.is_array() || j.empty()) fail(ErrorKind::ParseError, "expected a non-empty matrix list");
  std::vector<Mat2> out;
  for (const auto& m : j) out.push_back(matrix_from_json(m));
  return out;
}

MatrixFamily family_from_json(const Json& j) {
  const std::string kind = field(j, "kind").get<std::string>();
  if (kind == "matrices") {
    MatrixFamily f;
    f.matrices = matrices_from_json(field(j, "matrices"));
    const long n = static_cast<long>(f.matrices.size());
    f.step = Rational(1) / Rational(n);
    for (long i = 0; i < n; ++i) f.grid.push_back(Rational(i) / Rational(n));
    return f;
  }
  const int points = positive_int(field(j, "points"), "points");
  if (kind == "rotation") return MatrixFamily::sample([](double t) { return Mat2::rotation(kPi * t); }, points);
  if (kind == "diag") {
    const double x = number(field(j, "lambda"), "lambda");
    return MatrixFamily::sample([x](double) { return Mat2::diag(x); }, points);
  }
  if (kind == "schrodinger") {
    const double l = number(field(j, "lambda"), "lambda");
    const double v0 = number(field(j, "v0"), "v0"), v1 = number(field(j, "v1"), "v1");
    return MatrixFamily::sample([=](double t) { return Mat2(l * (v0 + t * (v1 - v0)), -1.0, 1.0, 0.0); }, points);
  }
  fail(ErrorKind::ParseError, "unknown family kind \"" + kind + "\"");
}

StepCocycle cocycle_from_json(const Json& j) {
  if (j.is_object() && j.contains("cells")) return StepCocycle::uniform(matrices_from_json(j.at("cells")));
  if (j.is_object() && j.contains("breakpoints")) {
    const Json& bs = j.at("breakpoints");
    const auto ms = matrices_from_json(field(j, "matrices"));
    if (!bs.is_array() || bs.size() != ms.size()) fail(ErrorKind::ParseError, "one matrix per breakpoint");
    std::vector<CocyclePiece> pieces;
    for (std::size_t i = 0; i < ms.size(); ++i)
      pieces.push_back({rational_from_json(bs[i]), i + 1 < ms.size() ? rational_from_json(bs[i + 1]) : Rational(1), ms[i]});
    return StepCocycle(std::move(pieces));
  }
  const Json& list = field(j, "pieces");
  if (!list.is_array() || list.empty()) fail(ErrorKind::ParseError, "cocycle needs a non-empty piece list");
  std::vector<CocyclePiece> pieces;
  Rational x(0);
  for (const auto& p : list) {
    const Rational len = rational_from_json(field(p, "length"));
    if (len <= 0) fail(ErrorKind::ParseError, "piece lengths must be positive");
    if (p.contains("family")) {
      const MatrixFamily f = family_from_json(p.at("family"));
      const Rational w = len / Rational(static_cast<long>(f.matrices.size()));
      for (const auto& m : f.matrices) {
        pieces.push_back({x, x + w, m});
        x += w;
      }
      continue;
    }
    const Mat2 m = matrix_from_json(field(p, "matrix"));
    const int repeat = p.contains("repeat") ? positive_int(p.at("repeat"), "repeat") : 1;
    for (int r = 0; r < repeat; ++r) {
      pieces.push_back({x, x + len, m});
      x += len;
    }
  }
  if (x != 1) fail(ErrorKind::ParseError, "piece lengths sum to " + format_rational(x) + ", not 1");
  return StepCocycle(std::move(pieces));
}

Iet iet_from_json(const Json& j) {
  const Json& bs = field(j, "breakpoints");
  const Json& os = field(j, "offsets");
  if (!bs.is_array() || !os.is_array()) fail(ErrorKind::ParseError, "breakpoints and offsets must be lists");
  std::vector<Rational> b, o;
  for (const auto& x : bs) b.push_back(rational_from_json(x));
  for (const auto& x : os) o.push_back(rational_from_json(x));
  return Iet::from_breakpoints(b, o);
}

Iet dynamics_from_json(const Json& j) {
  if (j.is_object() && j.contains("rotation")) return Iet::rotation(rational_from_json(j.at("rotation")));
  if (j.is_object() && j.contains("permutation")) {
    const Json& p = j.at("permutation");
    if (!p.is_array() || p.empty()) fail(ErrorKind::ParseError, "permutation needs a non-empty list");
    std::vector<std::size_t> sigma;
    for (const auto& v : p) {
      if (!v.is_number_unsigned()) fail(ErrorKind::ParseError, "permutation entries are 0-based indices");
      sigma.push_back(v.get<std::size_t>());
    }
    return iet_from_permutation(sigma.size(), sigma).map;
  }
  if (j.is_object() && j.contains("iet")) return iet_from_json(j.at("iet"));
  fail(ErrorKind::ParseError, "unrecognized dynamics spec " + j.dump());
}

Json to_json(const Mat2& m) { return Json::array({m.a(), m.b(), m.c(), m.d()}); }

Json to_json(const Iet& t) {
  Json b = Json::array(), o = Json::array();
  for (const auto& x : t.breakpoints()) b.push_back(format_rational(x));
  for (const auto& x : t.offsets()) o.push_back(format_rational(x));
  return {{"breakpoints", b}, {"offsets", o}};
}

Json to_json(const StepCocycle& a) {
  Json b = Json::array(), m = Json::array();
  for (const auto& p : a.pieces()) {
    b.push_back(format_rational(p.lo));
    m.push_back({format_double(p.matrix.a()), format_double(p.matrix.b()), format_double(p.matrix.c()),
                 format_double(p.matrix.d())});
  }
  return {{"breakpoints", b}, {"matrices", m}};
}

Json to_json(const ProjInterval& p) { return {{"start", p.start}, {"length", p.length}}; }

Json to_json(const ExponentReport& r) {
  Json towers = Json::array();
  for (const auto& tw : r.towers)
    towers.push_back({{"base_measure", format_rational(tw.base_measure)},
                      {"height", tw.height},
                      {"trace", tw.trace},
                      {"contribution", tw.contribution}});
  return {{"value", r.value}, {"kind", exponent_kind_name(r.kind)}, {"order", r.order}, {"towers", towers}};
}

Json to_json(const UhVerdict& v) {
  Json family = Json::array();
  for (const auto& p : v.family) family.push_back(to_json(p));
  return {{"status", uh_status_name(v.status)},
          {"lambda", v.lambda},
          {"witness", v.witness},
          {"witness_norm", v.witness_norm},
          {"depth_reached", v.depth_reached},
          {"family", family}};
}

Json to_json(const AddendumCase& c) {
  Json out{{"tag", addendum_tag_name(c.tag)},
           {"lambda0", c.lambda0},
           {"strict_atoms", c.strict_atoms},
           {"atoms", c.atoms},
           {"direction", nullptr},
           {"interval", nullptr}};
  if (c.direction) out["direction"] = c.direction->angle();
  if (c.interval) out["interval"] = to_json(*c.interval);
  return out;
}

Json to_json(const SurgeryReport& r) {
  Json log = Json::array();
  for (const auto& e : r.trace_log) {
    Json params = Json::array();
    for (const auto& [k, v] : e.params) params.push_back({k, v});
    log.push_back({{"step", e.step}, {"params", params}});
  }
  return {{"t_tilde", to_json(r.t_tilde)},
          {"weak_dist", format_rational(r.weak_dist)},
          {"le_before", r.le_before},
          {"le_after", r.le_after},
          {"bound", r.bound},
          {"slack", r.slack},
          {"targets_met", r.targets_met},
          {"trace_log", log}};
}

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string format_word(const Word& w) {
  std::string s;
  for (std::size_t i = 0; i < w.size(); ++i) s += (i ? " " : "") + std::to_string(w[i]);
  return s;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string CsvTable::str() const {
  std::string out;
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out += (i ? "," : "") + csv_field(cells[i]);
    out += "\r\n";
  };
  line(header);
  for (const auto& r : rows) line(r);
  return out;
}

}  // namespace cforge
