#pragma once

// Time meshes on [0, T]: uniform, one-sided graded (refined toward t = 0),
// and two-sided graded meshes that additionally refine toward an interior
// point r where the data has a second singularity.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace gcq {

// t has size N+1 with t[0] = 0; tau[n] = t[n] - t[n-1] for n = 1..N and
// tau[0] = 0 is a sentinel so indices line up with the time-step number.
struct TimeMesh {
  std::vector<double> t;
  std::vector<double> tau;

  int steps() const { return static_cast<int>(t.size()) - 1; }
  double horizon() const { return t.back(); }
};

namespace mesh_detail {

inline TimeMesh finalize(std::vector<double> t) {
  TimeMesh m;
  m.tau.assign(t.size(), 0.0);
  for (std::size_t n = 1; n < t.size(); ++n) {
    m.tau[n] = t[n] - t[n - 1];
    if (!(m.tau[n] > 0.0))
      throw std::runtime_error("TimeMesh: nodes must be strictly increasing");
  }
  m.t = std::move(t);
  return m;
}

}  // namespace mesh_detail

inline TimeMesh make_uniform_mesh(int N, double T) {
  if (N < 1) throw std::invalid_argument("make_uniform_mesh: N >= 1 required");
  if (!(T > 0.0)) throw std::invalid_argument("make_uniform_mesh: T > 0 required");
  std::vector<double> t(N + 1);
  for (int n = 0; n <= N; ++n) t[n] = T * (static_cast<double>(n) / N);
  t[N] = T;
  return mesh_detail::finalize(std::move(t));
}

// t_n = T (n/N)^gamma; gamma = 1 reproduces the uniform mesh.  Evaluating
// the closed form per node (instead of accumulating steps) keeps the nodes
// monotone and exact at both ends for any N and gamma.
inline TimeMesh make_graded_mesh(int N, double T, double gamma) {
  if (N < 1) throw std::invalid_argument("make_graded_mesh: N >= 1 required");
  if (!(T > 0.0)) throw std::invalid_argument("make_graded_mesh: T > 0 required");
  if (!(gamma >= 1.0)) throw std::invalid_argument("make_graded_mesh: gamma >= 1 required");
  std::vector<double> t(N + 1);
  for (int n = 0; n <= N; ++n) t[n] = T * std::pow(static_cast<double>(n) / N, gamma);
  t[N] = T;
  return mesh_detail::finalize(std::move(t));
}

// Mesh refined toward t = 0 (strength gamma1) and toward the interior point
// t = r from both sides (strength gamma2).  The interior point is a node:
// the first N1 = floor(N r / T) steps cover [0, r] with step lengths
// proportional to n^{gamma1 - 1} (N1 - n + 1)^{gamma2 - 1}, the remaining
// steps cover [r, T] graded toward r.
inline TimeMesh make_two_sided_mesh(int N, double T, double r, double gamma1, double gamma2) {
  if (N < 4) throw std::invalid_argument("make_two_sided_mesh: N >= 4 required");
  if (!(T > 0.0)) throw std::invalid_argument("make_two_sided_mesh: T > 0 required");
  if (!(r > 0.0 && r < T))
    throw std::invalid_argument("make_two_sided_mesh: interior point must satisfy 0 < r < T");
  if (!(gamma1 >= 1.0 && gamma2 >= 1.0))
    throw std::invalid_argument("make_two_sided_mesh: gamma >= 1 required");

  const int N1 = static_cast<int>(std::floor(N * r / T));
  if (N1 < 1 || N1 > N - 1)
    throw std::invalid_argument(
        "make_two_sided_mesh: N too small to place a node at the interior point");

  std::vector<double> t(N + 1, 0.0);
  std::vector<double> len(N1 + 1, 0.0);
  double total = 0.0;
  for (int n = 1; n <= N1; ++n) {
    len[n] = std::pow(static_cast<double>(n), gamma1 - 1.0) *
             std::pow(static_cast<double>(N1 - n + 1), gamma2 - 1.0);
    total += len[n];
  }
  double acc = 0.0;
  for (int n = 1; n <= N1; ++n) {
    acc += len[n];
    t[n] = r * (acc / total);
  }
  t[N1] = r;
  for (int k = N1 + 1; k <= N; ++k) {
    double s = static_cast<double>(k - N1) / (N - N1);
    t[k] = r + (T - r) * std::pow(s, gamma2);
  }
  t[N] = T;
  return mesh_detail::finalize(std::move(t));
}

// Largest over smallest step among tau[j..n]; the window form drives the
// choice of contour shape for local convolution weights.
inline double mesh_ratio(const TimeMesh& m, int j, int n) {
  if (j < 1 || n > m.steps() || j > n) throw std::invalid_argument("mesh_ratio: bad window");
  double lo = m.tau[j], hi = m.tau[j];
  for (int l = j + 1; l <= n; ++l) {
    lo = std::min(lo, m.tau[l]);
    hi = std::max(hi, m.tau[l]);
  }
  return hi / lo;
}

inline double mesh_ratio(const TimeMesh& m) { return mesh_ratio(m, 1, m.steps()); }

// Step-size summary over the window of step indices [j, n].
struct MeshStats {
  double tau_max = 0.0;
  double tau_min = 0.0;
  int argmax_tau = 0;  // step index attaining tau_max (first such)
  int argmin_tau = 0;  // step index attaining tau_min (first such)
  double q = 1.0;      // (max 1/tau) / (min 1/tau) = tau_max / tau_min
};

inline MeshStats mesh_stats(const TimeMesh& m, int j, int n) {
  if (j < 1 || n > m.steps() || j > n) throw std::invalid_argument("mesh_stats: empty window");
  MeshStats s;
  s.tau_max = s.tau_min = m.tau[j];
  s.argmax_tau = s.argmin_tau = j;
  for (int l = j + 1; l <= n; ++l) {
    if (m.tau[l] > s.tau_max) { s.tau_max = m.tau[l]; s.argmax_tau = l; }
    if (m.tau[l] < s.tau_min) { s.tau_min = m.tau[l]; s.argmin_tau = l; }
  }
  s.q = s.tau_max / s.tau_min;
  return s;
}

inline MeshStats mesh_stats(const TimeMesh& m) { return mesh_stats(m, 1, m.steps()); }

inline void write_mesh_csv(std::ostream& os, const TimeMesh& m) {
  os << "index,t,tau\n";
  char buf[96];
  for (int n = 1; n <= m.steps(); ++n) {
    std::snprintf(buf, sizeof(buf), "%d,%.12e,%.12e", n, m.t[n], m.tau[n]);
    os << buf << "\n";
  }
}

}  // namespace gcq
