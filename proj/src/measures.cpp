#include "cforge/measures.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cforge/errors.hpp"

namespace cforge {

namespace {

bool lex_less(const Mat2& x, const Mat2& y) { return x.entries() < y.entries(); }

std::vector<Atom> coalesce(std::vector<Atom> atoms) {
  std::sort(atoms.begin(), atoms.end(), [](const Atom& x, const Atom& y) { return lex_less(x.matrix, y.matrix); });
  std::vector<Atom> out;
  for (auto& a : atoms) {
    bool merged = false;
    // Candidates share the first entry up to the tolerance, so they sit in a trailing window.
    for (auto it = out.rbegin(); it != out.rend() && a.matrix.a() - it->matrix.a() <= kCoalesceTol; ++it) {
      if (a.matrix.distance(it->matrix) <= kCoalesceTol) {
        it->weight += a.weight;
        merged = true;
        break;
      }
    }
    if (!merged) out.push_back(std::move(a));
  }
  return out;
}

struct FlowEdge {
  std::size_t to;
  Rational cap;
  double cost;
};

}  // namespace

AtomicMeasureG::AtomicMeasureG(std::vector<Atom> atoms) {
  for (const auto& a : atoms)
    if (a.weight <= 0) fail(ErrorKind::DomainError, "atom weights must be positive");
  atoms_ = coalesce(std::move(atoms));
  for (const auto& a : atoms_) total_ += a.weight;
}

AtomicMeasureG AtomicMeasureG::dirac(const Mat2& m, const Rational& weight) { return AtomicMeasureG({{m, weight}}); }

double AtomicMeasureG::sup_norm() const {
  double s = 1.0;
  for (const auto& a : atoms_) s = std::max(s, a.matrix.norm());
  return s;
}

AtomicMeasureG AtomicMeasureG::scaled(const Rational& factor) const {
  if (factor <= 0) fail(ErrorKind::DomainError, "scale factor must be positive");
  std::vector<Atom> out = atoms_;
  for (auto& a : out) a.weight *= factor;
  return AtomicMeasureG(std::move(out));
}

AtomicMeasureG pushforward(const StepCocycle& a) {
  std::vector<Atom> atoms;
  for (const auto& p : a.pieces()) atoms.push_back({p.matrix, p.hi - p.lo});
  return AtomicMeasureG(std::move(atoms));
}

AtomicMeasureG convolve_power(const AtomicMeasureG& nu, std::int64_t n, std::size_t atom_cap,
                              const std::optional<Rational>& target_mass) {
  if (n < 1) fail(ErrorKind::DomainError, "convolution power needs N >= 1");
  if (n >= 2 && nu.total_mass() != 1) fail(ErrorKind::DomainError, "convolution powers need a probability measure");
  AtomicMeasureG p = nu;
  for (std::int64_t step = 2; step <= n; ++step) {
    if (static_cast<double>(p.size()) * static_cast<double>(nu.size()) > static_cast<double>(atom_cap))
      fail(ErrorKind::AtomOverflow, "convolution would exceed " + std::to_string(atom_cap) + " atoms");
    std::vector<Atom> next;
    next.reserve(p.size() * nu.size());
    for (const auto& m : nu.atoms())
      for (const auto& q : p.atoms()) next.push_back({m.matrix * q.matrix, m.weight * q.weight});
    p = AtomicMeasureG(std::move(next));
  }
  if (target_mass) p = p.scaled(*target_mass / p.total_mass());
  return p;
}

AtomicMeasureG inverse_measure(const AtomicMeasureG& nu) {
  std::vector<Atom> out;
  for (const auto& a : nu.atoms()) out.push_back({a.matrix.inverse(), a.weight});
  return AtomicMeasureG(std::move(out));
}

double DirectionHistogram::total() const {
  double s = 0.0;
  for (double m : mass) s += m;
  return s;
}

DirectionHistogram direction_pushforward(const AtomicMeasureG& nu, ProjDir v, int bins) {
  if (bins < 1) fail(ErrorKind::DomainError, "bins must be positive");
  DirectionHistogram h{std::vector<double>(static_cast<std::size_t>(bins), 0.0)};
  for (const auto& a : nu.atoms()) {
    const double angle = act(a.matrix, v).angle();
    const auto bin = std::min(static_cast<std::size_t>(angle / h.bin_width()), h.mass.size() - 1);
    h.mass[bin] += to_double(a.weight);
  }
  return h;
}

MatrixFamily MatrixFamily::sample(const std::function<Mat2(double)>& f, int points) {
  if (points < 1) fail(ErrorKind::DomainError, "family needs at least one point");
  MatrixFamily fam;
  fam.step = Rational(1, points);
  for (int i = 0; i < points; ++i) {
    fam.grid.push_back(Rational(i) / Rational(points));
    fam.matrices.push_back(f(static_cast<double>(i) / points));
  }
  return fam;
}

AtomicMeasureG MatrixFamily::empirical() const {
  if (matrices.empty()) fail(ErrorKind::DomainError, "empty family");
  const Rational w(1, static_cast<long>(matrices.size()));
  std::vector<Atom> atoms;
  for (const auto& m : matrices) atoms.push_back({m, w});
  return AtomicMeasureG(std::move(atoms));
}

RichnessKappa richness_kappa(const MatrixFamily& family, std::int64_t n, int v_grid, int bins, std::size_t atom_cap) {
  if (v_grid < 1) fail(ErrorKind::DomainError, "v_grid must be positive");
  const AtomicMeasureG fwd = convolve_power(family.empirical(), n, atom_cap);
  const AtomicMeasureG inv = inverse_measure(fwd);
  RichnessKappa k{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(), {}, {}};
  for (int j = 0; j < v_grid; ++j) {
    const ProjDir v(kPi * (j + 1.0 / 3.0) / v_grid);
    for (int side = 0; side < 2; ++side) {
      const DirectionHistogram h = direction_pushforward(side == 0 ? fwd : inv, v, bins);
      const double density = *std::min_element(h.mass.begin(), h.mass.end()) / h.bin_width();
      (side == 0 ? k.per_direction_fwd : k.per_direction_inv).push_back(density);
      double& kappa = side == 0 ? k.kappa_fwd : k.kappa_inv;
      kappa = std::min(kappa, density);
    }
  }
  return k;
}

CriterionReport richness_criterion(const MatrixFamily& family, std::int64_t max_len, double threshold) {
  if (family.matrices.empty()) fail(ErrorKind::DomainError, "empty family");
  CriterionReport r;
  r.elliptic_word = elliptic_in_semigroup(family.matrices, max_len);
  const double h = to_double(family.step);
  bool trace_constant = true, doubled_constant = true;
  const Mat2& first = family.matrices.front();
  for (std::size_t i = 0; i + 1 < family.matrices.size(); ++i) {
    const Mat2 &x = family.matrices[i], &y = family.matrices[i + 1];
    r.max_difference_quotient = std::max(r.max_difference_quotient, x.distance(y) / h);
    if (std::abs(y.trace() - x.trace()) / h > threshold) trace_constant = false;
    if (std::abs((first * y).trace() - (first * x).trace()) / h > threshold) doubled_constant = false;
  }
  r.nonconstant = r.max_difference_quotient > threshold;
  r.trace_locally_constant = trace_constant;
  r.doubled_trace_nonconstant = !doubled_constant;
  return r;
}

double measure_distance(const AtomicMeasureG& nu1, const AtomicMeasureG& nu2) {
  if (nu1.total_mass() != nu2.total_mass()) fail(ErrorKind::MassMismatch, "measures carry different total mass");
  const std::size_t n1 = nu1.size(), n2 = nu2.size();
  const std::size_t source = n1 + n2, sink = source + 1, nodes = sink + 1;
  std::vector<FlowEdge> edges;
  std::vector<std::vector<std::size_t>> adj(nodes);
  auto add_edge = [&](std::size_t u, std::size_t v, const Rational& cap, double cost) {
    adj[u].push_back(edges.size());
    edges.push_back({v, cap, cost});
    adj[v].push_back(edges.size());
    edges.push_back({u, Rational(0), -cost});
  };
  for (std::size_t i = 0; i < n1; ++i) add_edge(source, i, nu1.atoms()[i].weight, 0.0);
  for (std::size_t j = 0; j < n2; ++j) add_edge(n1 + j, sink, nu2.atoms()[j].weight, 0.0);
  for (std::size_t i = 0; i < n1; ++i) {
    for (std::size_t j = 0; j < n2; ++j) {
      const Mat2 &x = nu1.atoms()[i].matrix, &y = nu2.atoms()[j].matrix;
      const double cost = x.distance(y) <= kCoalesceTol
                              ? 0.0
                              : norm2(x.a() - y.a(), x.b() - y.b(), x.c() - y.c(), x.d() - y.d());
      add_edge(i, n1 + j, nu1.atoms()[i].weight, cost);
    }
  }
  double total = 0.0;
  const double inf = std::numeric_limits<double>::infinity();
  while (true) {
    std::vector<double> dist(nodes, inf);
    std::vector<std::size_t> via(nodes, edges.size());
    dist[source] = 0.0;
    for (std::size_t round = 0; round + 1 < nodes; ++round) {
      bool changed = false;
      for (std::size_t u = 0; u < nodes; ++u) {
        if (dist[u] == inf) continue;
        for (std::size_t e : adj[u]) {
          if (edges[e].cap <= 0) continue;
          const double nd = dist[u] + edges[e].cost;
          if (nd < dist[edges[e].to] - 1e-15) {
            dist[edges[e].to] = nd;
            via[edges[e].to] = e;
            changed = true;
          }
        }
      }
      if (!changed) break;
    }
    if (dist[sink] == inf) break;
    Rational push = -1;
    for (std::size_t v = sink; v != source; v = edges[via[v] ^ 1].to)
      if (push < 0 || edges[via[v]].cap < push) push = edges[via[v]].cap;
    for (std::size_t v = sink; v != source; v = edges[via[v] ^ 1].to) {
      edges[via[v]].cap -= push;
      edges[via[v] ^ 1].cap += push;
    }
    total += to_double(push) * dist[sink];
  }
  return std::max(0.0, total);
}

}  // namespace cforge
