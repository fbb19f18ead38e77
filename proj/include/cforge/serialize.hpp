#pragma once

#include <string>
#include <vector>

#include "json.hpp"

#include "cforge/cocycle.hpp"
#include "cforge/dynamics.hpp"
#include "cforge/hyperbolicity.hpp"
#include "cforge/measures.hpp"
#include "cforge/perturbation.hpp"
#include "cforge/sl2.hpp"

namespace cforge {

using Json = nlohmann::json;

/// "p/q" string or integer.
Rational rational_from_json(const Json& j);

/// [a, b, c, d] | {"rotation": "p/q"} (angle p/q pi) | {"diag": x} | {"upper": [a, b]}
/// | {"schrodinger": {"lambda": l, "v": v}}.
Mat2 matrix_from_json(const Json& j);
std::vector<Mat2> matrices_from_json(const Json& j);

/// {"kind": "rotation", "points": n} (t -> R_{pi t}) | {"kind": "schrodinger", "lambda": l,
/// "v0": a, "v1": b, "points": n} | {"kind": "diag", "lambda": x, "points": n}
/// | {"kind": "matrices", "matrices": [...]}.
MatrixFamily family_from_json(const Json& j);

/// {"pieces": [{"length": q, "matrix": m, "repeat": r} | {"length": q, "family": f}]}
/// | {"cells": [m, ...]} (equal cells) | {"breakpoints": [...], "matrices": [...]}.
StepCocycle cocycle_from_json(const Json& j);

/// {"breakpoints": ["p/q", ...], "offsets": ["p/q", ...]}.
Iet iet_from_json(const Json& j);

/// {"rotation": "p/q"} | {"permutation": [0-based images]} | {"iet": {"breakpoints", "offsets"}}.
Iet dynamics_from_json(const Json& j);

Json to_json(const Mat2& m);
Json to_json(const Iet& t);
Json to_json(const StepCocycle& a);
Json to_json(const ProjInterval& p);
Json to_json(const ExponentReport& r);
Json to_json(const UhVerdict& v);
Json to_json(const AddendumCase& c);
Json to_json(const SurgeryReport& r);

std::string format_double(double x);
std::string format_word(const Word& w);

/// RFC 4180 table with CRLF line endings.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void add(std::vector<std::string> row) { rows.push_back(std::move(row)); }
  std::string str() const;
};

std::string csv_field(const std::string& s);

}  // namespace cforge
