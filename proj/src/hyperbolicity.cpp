#include "cforge/hyperbolicity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>

#include "cforge/errors.hpp"

namespace cforge {

namespace {

constexpr double kStrictMargin = 1e-10;

bool shorter_or_lex_less(const Word& x, const Word& y) {
  return x.size() < y.size() || (x.size() == y.size() && x < y);
}

double word_count(std::size_t letters, std::int64_t depth) {
  return std::pow(static_cast<double>(letters), static_cast<double>(depth));
}

struct Violation {
  bool found = false;
  Word word;
  double norm = 0.0;
};

void scan_from(const std::vector<Mat2>& sigma, std::int64_t depth, double log_lambda, Word& word, const Mat2& prefix,
               Violation& best) {
  for (std::size_t i = 0; i < sigma.size(); ++i) {
    if (best.found && word.size() + 1 > best.word.size()) return;
    const Mat2 p = sigma[i] * prefix;
    word.push_back(i);
    const double n = p.norm();
    if (std::log(n) <= static_cast<double>(word.size()) * log_lambda &&
        (!best.found || shorter_or_lex_less(word, best.word))) {
      best = {true, word, n};
    }
    if (static_cast<std::int64_t>(word.size()) < depth) scan_from(sigma, depth, log_lambda, word, p, best);
    word.pop_back();
  }
}

bool strict_image(const Mat2& m, const ProjInterval& source, const ProjInterval& target, double& lo, double& hi) {
  return image_offsets(m, source, target, lo, hi, 0.0) && lo > kStrictMargin && hi < target.length - kStrictMargin;
}

// Index of the component containing the image of the source start, or -1.
int target_of(const Mat2& m, const ProjInterval& source, const std::vector<ProjInterval>& family) {
  const double x = act(m, ProjDir(source.start)).angle();
  for (std::size_t i = 0; i < family.size(); ++i)
    if (family[i].contains(x, 0.0)) return static_cast<int>(i);
  return -1;
}

// Minimal Birkhoff factor over atoms and components; 0 when not strictly invariant.
double family_tau(const std::vector<Mat2>& sigma, const std::vector<ProjInterval>& family) {
  double tau = std::numeric_limits<double>::infinity();
  for (const auto& m : sigma) {
    for (const auto& c : family) {
      const int t = target_of(m, c, family);
      double lo = 0.0, hi = 0.0;
      if (t < 0 || !strict_image(m, c, family[static_cast<std::size_t>(t)], lo, hi)) return 0.0;
      tau = std::min(tau, birkhoff_tau(family[static_cast<std::size_t>(t)], lo, hi));
    }
  }
  return tau;
}

// All words of length <= max_len, in shortest-then-lexicographic order, until f returns true.
template <class F>
bool enumerate_words(const std::vector<Mat2>& sigma, std::int64_t max_len, F&& f) {
  Word word;
  std::vector<Mat2> prefix{Mat2()};
  for (std::int64_t len = 1; len <= max_len; ++len) {
    word.assign(static_cast<std::size_t>(len), 0);
    prefix.resize(static_cast<std::size_t>(len) + 1);
    for (std::size_t i = 0; i < word.size(); ++i) prefix[i + 1] = sigma[word[i]] * prefix[i];
    while (true) {
      if (f(word, prefix.back())) return true;
      std::size_t pos = word.size();
      while (pos > 0 && word[pos - 1] + 1 == sigma.size()) --pos;
      if (pos == 0) break;
      ++word[pos - 1];
      for (std::size_t i = pos; i < word.size(); ++i) word[i] = 0;
      for (std::size_t i = pos - 1; i < word.size(); ++i) prefix[i + 1] = sigma[word[i]] * prefix[i];
    }
  }
  return false;
}

std::int64_t affordable_length(std::size_t letters, std::int64_t max_len, double budget) {
  std::int64_t len = 0;
  double total = 0.0;
  while (len < max_len) {
    total += word_count(letters, len + 1);
    if (total > budget) break;
    ++len;
  }
  return len;
}

}  // namespace

Mat2 word_product(const std::vector<Mat2>& sigma, const Word& word) {
  Mat2 p;
  for (auto i : word) {
    if (i >= sigma.size()) fail(ErrorKind::DomainError, "word letter out of range");
    p = sigma[i] * p;
  }
  return p;
}

const char* uh_status_name(UhStatus s) {
  switch (s) {
    case UhStatus::CertifiedUH: return "CertifiedUH";
    case UhStatus::CounterexampleWord: return "CounterexampleWord";
    case UhStatus::Undecided: return "Undecided";
  }
  return "?";
}

UhVerdict word_scan(const std::vector<Mat2>& sigma, std::int64_t depth, double lambda, std::uint64_t budget,
                    unsigned threads) {
  if (sigma.empty()) fail(ErrorKind::DomainError, "word_scan needs a non-empty set");
  if (!(lambda > 1.0) || depth < 1) fail(ErrorKind::DomainError, "word_scan needs lambda > 1 and depth >= 1");
  if (word_count(sigma.size(), depth) > static_cast<double>(budget))
    fail(ErrorKind::BudgetExceeded, "|Sigma|^depth exceeds the word budget " + std::to_string(budget));
  const double log_lambda = std::log(lambda);
  const unsigned workers = std::max(1U, std::min<unsigned>(threads, static_cast<unsigned>(sigma.size())));
  std::vector<Violation> found(workers);
  auto work = [&](unsigned w) {
    for (std::size_t i = w; i < sigma.size(); i += workers) {
      Violation local;
      Word word{i};
      const Mat2& p = sigma[i];
      if (std::log(p.norm()) <= log_lambda) local = {true, word, p.norm()};
      if (depth > 1) scan_from(sigma, depth, log_lambda, word, p, local);
      if (local.found && (!found[w].found || shorter_or_lex_less(local.word, found[w].word))) found[w] = local;
    }
  };
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work, w);
    for (auto& t : pool) t.join();
  }
  UhVerdict v;
  v.lambda = lambda;
  v.depth_reached = depth;
  for (const auto& f : found) {
    if (f.found && (v.status != UhStatus::CounterexampleWord || shorter_or_lex_less(f.word, v.witness))) {
      v.status = UhStatus::CounterexampleWord;
      v.witness = f.word;
      v.witness_norm = f.norm;
    }
  }
  if (v.status == UhStatus::CounterexampleWord) v.depth_reached = static_cast<std::int64_t>(v.witness.size());
  return v;
}

bool verify_certificate(const std::vector<Mat2>& sigma, const std::vector<ProjInterval>& family) {
  if (family.empty()) return false;
  double total = 0.0;
  for (const auto& c : family) total += c.length;
  if (total >= kPi) return false;
  return family_tau(sigma, family) > 1.0;
}

std::optional<IntervalCertificate> interval_certificate(const std::vector<Mat2>& sigma, int resolution) {
  if (sigma.empty()) fail(ErrorKind::DomainError, "interval_certificate needs a non-empty set");
  if (resolution < 4) fail(ErrorKind::DomainError, "resolution must be at least 4");
  const auto res = static_cast<std::size_t>(resolution);
  const double cell = kPi / static_cast<double>(resolution);

  const std::int64_t short_len = affordable_length(sigma.size(), 3, 4096.0);
  const std::int64_t attractor_len = affordable_length(sigma.size(), 6, 4096.0);
  std::vector<double> attractors;
  bool obstructed = false;
  enumerate_words(sigma, std::max(short_len, attractor_len), [&](const Word& w, const Mat2& p) {
    if (classify(p) != MatClass::Hyperbolic) {
      if (static_cast<std::int64_t>(w.size()) <= short_len) {
        obstructed = true;
        return true;
      }
      return false;
    }
    attractors.push_back(eigendirections(p).unstable.angle());
    return false;
  });
  if (obstructed) return std::nullopt;

  auto finish = [&](std::vector<ProjInterval> family) -> std::optional<IntervalCertificate> {
    const double tau = family_tau(sigma, family);
    if (!(tau > 1.0)) return std::nullopt;
    IntervalCertificate cert{std::move(family), std::sqrt(tau)};
    check(verify_certificate(sigma, cert.family), "certificate failed re-verification");
    return cert;
  };

  std::vector<char> hit(res, 0);
  for (double a : attractors) hit[std::min(res - 1, static_cast<std::size_t>(a / cell))] = 1;
  for (std::size_t w = 1; w < res / 2; ++w) {
    std::vector<char> cover(res, 0);
    for (std::size_t j = 0; j < res; ++j) {
      if (!hit[j]) continue;
      for (std::size_t d = 0; d <= 2 * w; ++d) cover[(j + res - w + d) % res] = 1;
    }
    const auto gap = std::find(cover.begin(), cover.end(), 0);
    if (gap == cover.end()) break;
    // Runs of covered cells, read circularly from the first uncovered cell.
    const std::size_t origin = static_cast<std::size_t>(gap - cover.begin());
    std::vector<std::pair<std::size_t, std::size_t>> runs;  // (start, length)
    for (std::size_t k = 1; k <= res; ++k) {
      const std::size_t j = (origin + k) % res;
      if (!cover[j]) continue;
      if (!runs.empty() && (runs.back().first + runs.back().second) % res == j) ++runs.back().second;
      else runs.push_back({j, 1});
    }
    while (runs.size() > 4) {
      std::size_t best = 0, best_gap = res;
      for (std::size_t r = 0; r + 1 < runs.size(); ++r) {
        const std::size_t g = (runs[r + 1].first + res - (runs[r].first + runs[r].second) % res) % res;
        if (g < best_gap) {
          best_gap = g;
          best = r;
        }
      }
      runs[best].second += best_gap + runs[best + 1].second;
      runs.erase(runs.begin() + static_cast<std::ptrdiff_t>(best) + 1);
    }
    std::vector<ProjInterval> family;
    for (const auto& [s, l] : runs)
      family.push_back({static_cast<double>(s) * cell, static_cast<double>(l) * cell});
    if (auto cert = finish(family)) return cert;
  }

  for (std::size_t l = 1; l < res; ++l) {
    for (std::size_t s = 0; s < res; ++s) {
      if (auto cert = finish({{static_cast<double>(s) * cell, static_cast<double>(l) * cell}})) return cert;
    }
  }
  return std::nullopt;
}

FixedDirections fixed_directions(const Mat2& m) {
  FixedDirections out;
  const double a = m.a(), b = m.b(), c = m.c(), d = m.d();
  const double r = std::hypot(b + c, a - d);
  if (r < 1e-12) {
    out.all = std::abs(c - b) < 1e-12;
    return out;
  }
  double x = (c - b) / r;
  if (std::abs(x) > 1.0 + 1e-9) return out;
  x = std::clamp(x, -1.0, 1.0);
  const double psi = std::atan2(b + c, a - d);
  const double s = std::asin(x);
  for (double phi : {0.5 * (psi + s), 0.5 * (psi + kPi - s)}) {
    const double angle = ProjDir(phi).angle();
    bool dup = false;
    for (double o : out.angles) dup = dup || angle_distance(o, angle) < 1e-12;
    if (!dup) out.angles.push_back(angle);
  }
  return out;
}

const char* addendum_tag_name(AddendumTag t) {
  switch (t) {
    case AddendumTag::i1: return "i1";
    case AddendumTag::i21: return "i21";
    case AddendumTag::i22: return "i22";
    case AddendumTag::i23: return "i23";
    case AddendumTag::none: return "none";
  }
  return "?";
}

AddendumCase addendum_classify(const StepCocycle& a, int resolution) {
  if (resolution < 4) fail(ErrorKind::DomainError, "resolution must be at least 4");
  std::vector<Mat2> atoms;
  std::vector<double> weights;
  for (const auto& p : a.pieces()) {
    auto it = std::find(atoms.begin(), atoms.end(), p.matrix);
    if (it == atoms.end()) {
      atoms.push_back(p.matrix);
      weights.push_back(to_double(p.hi - p.lo));
    } else {
      weights[static_cast<std::size_t>(it - atoms.begin())] += to_double(p.hi - p.lo);
    }
  }
  AddendumCase out;
  out.atoms = atoms.size();

  std::vector<FixedDirections> fixed;
  for (const auto& m : atoms) fixed.push_back(fixed_directions(m));
  std::vector<double> candidates{0.0};
  for (const auto& f : fixed) {
    if (!f.all) {
      candidates = f.angles;
      break;
    }
  }
  for (double v0 : candidates) {
    bool common = true;
    for (std::size_t i = 0; i < atoms.size() && common; ++i)
      common = fixed[i].all || angle_distance(act(atoms[i], ProjDir(v0)).angle(), v0) <= 1e-9;
    if (!common) continue;
    out.tag = AddendumTag::i1;
    out.direction = ProjDir(v0);
    double sum = 0.0;
    for (std::size_t i = 0; i < atoms.size(); ++i) {
      const Mat2& m = atoms[i];
      sum += weights[i] * std::log(std::hypot(m.a() * std::cos(v0) + m.b() * std::sin(v0),
                                              m.c() * std::cos(v0) + m.d() * std::sin(v0)));
    }
    out.lambda0 = std::abs(sum);
    return out;
  }

  const double cell = kPi / static_cast<double>(resolution);
  std::size_t best_strict = 0;
  bool found = false;
  for (int l = 1; l < resolution; ++l) {
    for (int s = 0; s < resolution; ++s) {
      const ProjInterval iv{s * cell, l * cell};
      std::size_t strict = 0;
      bool invariant = true;
      for (const auto& m : atoms) {
        double lo = 0.0, hi = 0.0;
        if (!image_offsets(m, iv, iv, lo, hi, 1e-12)) {
          invariant = false;
          break;
        }
        if (lo > kStrictMargin && hi < iv.length - kStrictMargin) ++strict;
      }
      if (invariant && (!found || strict > best_strict)) {
        found = true;
        best_strict = strict;
        out.interval = iv;
      }
    }
  }
  if (!found) return out;
  out.strict_atoms = best_strict;
  if (best_strict == 0) {
    out.tag = AddendumTag::i21;
  } else if (best_strict == atoms.size()) {
    out.tag = AddendumTag::i23;
  } else {
    out.tag = AddendumTag::i22;
    for (std::size_t i = 0; i < atoms.size(); ++i) {
      double lo = 0.0, hi = 0.0;
      if (strict_image(atoms[i], *out.interval, *out.interval, lo, hi))
        out.lambda0 += weights[i] * 0.5 * std::log(birkhoff_tau(*out.interval, lo, hi));
    }
  }
  return out;
}

std::optional<Word> elliptic_in_semigroup(const std::vector<Mat2>& sigma, std::int64_t max_len,
                                          std::uint64_t budget) {
  if (sigma.empty()) fail(ErrorKind::DomainError, "elliptic_in_semigroup needs a non-empty set");
  std::optional<Word> hit;
  const std::int64_t len = affordable_length(sigma.size(), max_len, static_cast<double>(budget));
  enumerate_words(sigma, len, [&](const Word& w, const Mat2& p) {
    if (classify(p) != MatClass::Elliptic) return false;
    hit = w;
    return true;
  });
  if (hit) return hit;

  std::vector<Word> pool;
  std::vector<Mat2> pool_products;
  enumerate_words(sigma, std::min<std::int64_t>(len, sigma.size() <= 8 ? 2 : 1), [&](const Word& w, const Mat2& p) {
    pool.push_back(w);
    pool_products.push_back(p);
    return false;
  });
  for (std::size_t ia = 0; ia < pool.size(); ++ia) {
    if (classify(pool_products[ia]) == MatClass::Elliptic) continue;
    for (std::size_t ib = 0; ib < pool.size(); ++ib) {
      Mat2 p = pool_products[ib];
      for (std::int64_t n = 1; n <= max_len; ++n) {
        try {
          p = pool_products[ia] * p;
        } catch (const Error&) {
          break;
        }
        if (classify(p) == MatClass::Elliptic) {
          Word w = pool[ib];
          for (std::int64_t k = 0; k < n; ++k) w.insert(w.end(), pool[ia].begin(), pool[ia].end());
          return w;
        }
      }
    }
  }
  return std::nullopt;
}

}  // namespace cforge
