#include "csg/geometry.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace csg {

namespace {

double dot_offset(const Halfspace& h, const std::vector<double>& x) {
  double v = h.offset;
  for (std::size_t i = 0; i < h.normal.size(); ++i) v += h.normal[i] * x[i];
  return v;
}

// Visits all k-subsets of {0..n-1}.
template <typename F>
void for_each_subset(int n, int k, F&& fn) {
  if (k > n) return;
  std::vector<int> idx(k);
  for (int i = 0; i < k; ++i) idx[i] = i;
  while (true) {
    fn(idx);
    int i = k - 1;
    while (i >= 0 && idx[i] == n - k + i) --i;
    if (i < 0) break;
    ++idx[i];
    for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

bool lex_less(const std::vector<double>& a, const std::vector<double>& b) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] < b[i] - 1e-15) return true;
    if (a[i] > b[i] + 1e-15) return false;
  }
  return false;
}

}  // namespace

std::vector<Halfspace> region_halfspaces(const GameInstance& inst,
                                         const Context& z,
                                         const std::vector<int>& sigma) {
  const int A = inst.num_leader_actions;
  const int A_f = inst.num_follower_actions;
  std::vector<Halfspace> out;
  for (int i = 0; i < inst.num_types; ++i) {
    const int a = sigma[i];
    const UtilityModel& uf = inst.follower_utilities[i];
    for (int ap = 0; ap < A_f; ++ap) {
      if (ap == a) continue;
      Halfspace h;
      h.normal.resize(A);
      for (int a_l = 0; a_l < A; ++a_l)
        h.normal[a_l] = eval_utility(uf, inst, z, a_l, a) -
                        eval_utility(uf, inst, z, a_l, ap);
      h.strict = ap > a;  // ties go to the higher action index
      out.push_back(std::move(h));
    }
  }
  for (int a_l = 0; a_l < A; ++a_l) {
    Halfspace h;
    h.normal.assign(A, 0.0);
    h.normal[a_l] = 1.0;
    out.push_back(std::move(h));
  }
  Halfspace sum_lo, sum_hi;
  sum_lo.normal.assign(A, 1.0);
  sum_lo.offset = -1.0;
  sum_hi.normal.assign(A, -1.0);
  sum_hi.offset = 1.0;
  out.push_back(std::move(sum_lo));
  out.push_back(std::move(sum_hi));
  return out;
}

std::vector<MixedStrategy> closure_vertices(
    const std::vector<Halfspace>& halfspaces, int A) {
  const int m = static_cast<int>(halfspaces.size());
  std::vector<std::vector<double>> found;
  auto try_point = [&](const Eigen::VectorXd& x) {
    std::vector<double> v(x.data(), x.data() + A);
    for (const auto& h : halfspaces)
      if (dot_offset(h, v) < -kGeoTol) return;
    for (const auto& u : found) {
      double dist = 0.0;
      for (int i = 0; i < A; ++i) dist = std::max(dist, std::abs(u[i] - v[i]));
      if (dist <= kDedupeTol) return;
    }
    found.push_back(std::move(v));
  };

  Eigen::MatrixXd M(A, A);
  Eigen::VectorXd rhs(A);
  for_each_subset(m, A - 1, [&](const std::vector<int>& idx) {
    for (int r = 0; r < A - 1; ++r) {
      const Halfspace& h = halfspaces[idx[r]];
      for (int c = 0; c < A; ++c) M(r, c) = h.normal[c];
      rhs(r) = -h.offset;
    }
    for (int c = 0; c < A; ++c) M(A - 1, c) = 1.0;
    rhs(A - 1) = 1.0;
    Eigen::FullPivLU<Eigen::MatrixXd> lu(M);
    lu.setThreshold(1e-10);
    if (!lu.isInvertible()) return;
    try_point(lu.solve(rhs));
  });
  if (A == 1) {
    Eigen::VectorXd one(1);
    one(0) = 1.0;
    try_point(one);
  }
  std::sort(found.begin(), found.end(), lex_less);
  std::vector<MixedStrategy> out;
  out.reserve(found.size());
  for (auto& v : found) out.push_back(MixedStrategy{std::move(v)});
  return out;
}

bool in_region(const GameInstance& inst, const Context& z,
               const MixedStrategy& x, const std::vector<int>& sigma) {
  for (int i = 0; i < inst.num_types; ++i)
    if (follower_best_response(inst, i, z, x) != sigma[i]) return false;
  return true;
}

std::optional<MixedStrategy> region_feasibility(
    const GameInstance& inst, const Context& z, const std::vector<int>& sigma,
    const std::vector<Halfspace>& halfspaces,
    const std::vector<MixedStrategy>& vertices) {
  if (vertices.empty()) return std::nullopt;
  const int A = inst.num_leader_actions;

  auto finish = [&](std::vector<double> probs) -> std::optional<MixedStrategy> {
    double sum = 0.0;
    for (double& p : probs) {
      p = std::max(p, 0.0);
      sum += p;
    }
    if (sum <= 0.0) return std::nullopt;
    for (double& p : probs) p /= sum;
    MixedStrategy w{std::move(probs)};
    if (!in_region(inst, z, w, sigma)) return std::nullopt;
    return w;
  };

  std::vector<const Halfspace*> strict;
  for (const auto& h : halfspaces)
    if (h.strict) strict.push_back(&h);
  if (strict.empty()) {
    std::vector<double> bary(A, 0.0);
    for (const auto& v : vertices)
      for (int i = 0; i < A; ++i) bary[i] += v[i];
    for (double& b : bary) b /= static_cast<double>(vertices.size());
    return finish(std::move(bary));
  }

  // Lifted problem: maximize t subject to strict slacks >= t over the closure.
  double cap = 1.0;
  for (const auto* h : strict) {
    double mag = std::abs(h->offset);
    for (double c : h->normal) mag += std::abs(c);
    cap = std::max(cap, mag + 1.0);
  }
  const int n = A + 1;
  std::vector<Halfspace> lifted;
  for (const auto& h : halfspaces) {
    Halfspace lh;
    lh.normal = h.normal;
    lh.normal.push_back(h.strict ? -1.0 : 0.0);
    lh.offset = h.offset;
    lifted.push_back(std::move(lh));
  }
  Halfspace tcap;
  tcap.normal.assign(n, 0.0);
  tcap.normal[A] = -1.0;
  tcap.offset = cap;
  lifted.push_back(std::move(tcap));
  Halfspace tfloor;  // t >= -1 keeps the lifted polytope bounded below
  tfloor.normal.assign(n, 0.0);
  tfloor.normal[A] = 1.0;
  tfloor.offset = 1.0;
  lifted.push_back(std::move(tfloor));

  const int m = static_cast<int>(lifted.size());
  double best_t = -1.0;
  std::vector<double> best_x;
  Eigen::MatrixXd M(n, n);
  Eigen::VectorXd rhs(n);
  for_each_subset(m, n - 1, [&](const std::vector<int>& idx) {
    for (int r = 0; r < n - 1; ++r) {
      const Halfspace& h = lifted[idx[r]];
      for (int c = 0; c < n; ++c) M(r, c) = h.normal[c];
      rhs(r) = -h.offset;
    }
    for (int c = 0; c < A; ++c) M(n - 1, c) = 1.0;
    M(n - 1, A) = 0.0;
    rhs(n - 1) = 1.0;
    Eigen::FullPivLU<Eigen::MatrixXd> lu(M);
    lu.setThreshold(1e-10);
    if (!lu.isInvertible()) return;
    Eigen::VectorXd p = lu.solve(rhs);
    std::vector<double> v(p.data(), p.data() + n);
    for (const auto& h : lifted)
      if (dot_offset(h, v) < -kGeoTol) return;
    if (v[A] > best_t) {
      best_t = v[A];
      best_x.assign(v.begin(), v.begin() + A);
    }
  });
  if (best_t <= kTieTol) return std::nullopt;
  return finish(std::move(best_x));
}

std::vector<Region> enumerate_regions(const GameInstance& inst,
                                      const Context& z) {
  const int A = inst.num_leader_actions;
  const int A_f = inst.num_follower_actions;
  const int K = inst.num_types;
  if (A > kMaxLeaderActions)
    throw std::runtime_error("geometry cap exceeded: leader actions > 8");
  double count = std::pow(static_cast<double>(A_f), K);
  if (count > kMaxRegions)
    throw std::runtime_error("geometry cap exceeded: A_f^K > 4096");

  std::vector<Region> regions;
  std::vector<int> sigma(K, 0);
  while (true) {
    Region r;
    r.sigma = sigma;
    r.halfspaces = region_halfspaces(inst, z, sigma);
    r.closure_vertices = closure_vertices(r.halfspaces, A);
    if (!r.closure_vertices.empty()) {
      r.witness = region_feasibility(inst, z, sigma, r.halfspaces,
                                     r.closure_vertices);
      if (r.witness) regions.push_back(std::move(r));
    }
    int i = K - 1;
    while (i >= 0 && sigma[i] == A_f - 1) sigma[i--] = 0;
    if (i < 0) break;
    ++sigma[i];
  }
  return regions;
}

ExtremePointSet approx_extreme_points(const GameInstance& inst,
                                      const Context& z, double delta) {
  if (!(delta > 0.0))
    throw std::invalid_argument("approx_extreme_points: delta must be > 0");
  ExtremePointSet out;
  out.z = z;
  out.delta = delta;
  for (const auto& region : enumerate_regions(inst, z)) {
    const MixedStrategy& w = *region.witness;
    for (const auto& v : region.closure_vertices) {
      if (in_region(inst, z, v, region.sigma)) {
        out.points.push_back({v, region.sigma, v});
        continue;
      }
      double l1 = 0.0;
      for (int i = 0; i < v.size(); ++i) l1 += std::abs(w[i] - v[i]);
      if (l1 <= 0.0) continue;
      const double lam = std::min(1.0, delta / l1);
      std::vector<double> p(v.size());
      for (int i = 0; i < v.size(); ++i)
        p[i] = (1.0 - lam) * v[i] + lam * w[i];
      MixedStrategy vp{std::move(p)};
      if (in_region(inst, z, vp, region.sigma))
        out.points.push_back({std::move(vp), region.sigma, v});
    }
  }
  return out;
}

std::vector<IndicatorEntry> indicator_set(const GameInstance& inst,
                                          double delta) {
  if (!follower_utilities_context_free(inst))
    throw std::runtime_error(
        "indicator_set requires context-free follower utilities");
  const Context probe = inst.context_space.probe();
  const ExtremePointSet E = approx_extreme_points(inst, probe, delta);
  std::vector<IndicatorEntry> out;
  for (const auto& pt : E.points) {
    for (int a_f = 0; a_f < inst.num_follower_actions; ++a_f) {
      std::vector<int> bits(inst.num_types);
      for (int i = 0; i < inst.num_types; ++i)
        bits[i] = pt.sigma[i] == a_f ? 1 : 0;
      bool seen = false;
      for (const auto& e : out)
        if (e.bits == bits) {
          seen = true;
          break;
        }
      if (!seen) out.push_back({std::move(bits), pt.x, a_f});
    }
  }
  return out;
}

std::string region_report(const GameInstance& inst, const Context& z,
                          double delta) {
  std::ostringstream os;
  char buf[64];
  auto fmt = [&](const MixedStrategy& x) {
    std::string s = "[";
    for (int i = 0; i < x.size(); ++i) {
      std::snprintf(buf, sizeof(buf), "%.6f", x[i]);
      if (i) s += ", ";
      s += buf;
    }
    return s + "]";
  };
  os << "context " << (z.label.empty() ? context_key(z) : z.label) << "\n";
  const auto regions = enumerate_regions(inst, z);
  os << "nonempty regions: " << regions.size() << "\n";
  for (const auto& r : regions) {
    os << "sigma (";
    for (std::size_t i = 0; i < r.sigma.size(); ++i)
      os << (i ? "," : "") << r.sigma[i];
    os << ")\n  closure vertices:\n";
    for (const auto& v : r.closure_vertices) os << "    " << fmt(v) << "\n";
    os << "  witness: " << fmt(*r.witness) << "\n";
  }
  const auto E = approx_extreme_points(inst, z, delta);
  os << "extreme points (delta " << delta << "): " << E.points.size() << "\n";
  for (const auto& p : E.points) {
    os << "  " << fmt(p.x) << " sigma (";
    for (std::size_t i = 0; i < p.sigma.size(); ++i)
      os << (i ? "," : "") << p.sigma[i];
    os << ")\n";
  }
  return os.str();
}

}  // namespace csg
