#include "floqeels/floquet.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <vector>

namespace floqeels {

namespace {

// Lattice node (a, l) <-> flat index. The harmonic recursion couples
// (a, l) to (a', l +- 1) wherever rabi(a, a') != 0, so the lattice splits
// into independent components (parity sectors for bipartite couplings,
// isolated chains for decoupled levels). Diagonalizing per component keeps
// the sectors exact even at quasienergy degeneracies.
struct Lattice {
  int n_levels;
  int l_max;
  int size() const { return n_levels * (2 * l_max + 1); }
  int node(int a, int l) const { return (l + l_max) * n_levels + a; }
  int level_of(int idx) const { return idx % n_levels; }
  int harmonic_of(int idx) const { return idx / n_levels - l_max; }
};

std::vector<int> lattice_components(const Lattice& lat, const Eigen::MatrixXd& rabi) {
  const int d = lat.size();
  std::vector<int> comp(d, -1);
  int next = 0;
  std::vector<int> stack;
  for (int start = 0; start < d; ++start) {
    if (comp[start] >= 0) continue;
    comp[start] = next;
    stack.assign(1, start);
    while (!stack.empty()) {
      const int idx = stack.back();
      stack.pop_back();
      const int a = lat.level_of(idx);
      const int l = lat.harmonic_of(idx);
      for (int ap = 0; ap < lat.n_levels; ++ap) {
        if (rabi(a, ap) == 0.0) continue;
        for (int dl : {-1, 1}) {
          const int lp = l + dl;
          if (lp < -lat.l_max || lp > lat.l_max) continue;
          const int nb = lat.node(ap, lp);
          if (comp[nb] < 0) {
            comp[nb] = next;
            stack.push_back(nb);
          }
        }
      }
    }
    ++next;
  }
  return comp;
}

struct EigenPairs {
  Eigen::VectorXd values;   // ascending
  Eigen::MatrixXd vectors;  // columns, exact zeros outside each component
};

// Component-wise symmetric diagonalization of the full secular matrix.
EigenPairs diagonalize_by_component(const Eigen::MatrixXd& matrix, const Lattice& lat,
                                    const std::vector<int>& comp) {
  const int d = lat.size();
  const int n_comp = 1 + *std::max_element(comp.begin(), comp.end());
  std::vector<std::vector<int>> members(n_comp);
  for (int idx = 0; idx < d; ++idx) members[comp[idx]].push_back(idx);

  EigenPairs out;
  out.values.resize(d);
  out.vectors = Eigen::MatrixXd::Zero(d, d);
  std::vector<std::pair<double, int>> order;
  order.reserve(d);
  Eigen::MatrixXd scratch(d, d);

  int col = 0;
  for (int c = 0; c < n_comp; ++c) {
    const auto& idxs = members[c];
    const int m = static_cast<int>(idxs.size());
    Eigen::MatrixXd sub(m, m);
    for (int i = 0; i < m; ++i)
      for (int k = 0; k < m; ++k) sub(i, k) = matrix(idxs[i], idxs[k]);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sub);
    if (es.info() != Eigen::Success)
      throw Error(Error::Kind::numerical, "floquet: eigensolver failed to converge");
    for (int k = 0; k < m; ++k) {
      scratch.col(col).setZero();
      for (int i = 0; i < m; ++i) scratch(idxs[i], col) = es.eigenvectors()(i, k);
      order.emplace_back(es.eigenvalues()[k], col);
      ++col;
    }
  }
  std::stable_sort(order.begin(), order.end(),
                   [](const auto& x, const auto& y) { return x.first < y.first; });
  for (int k = 0; k < d; ++k) {
    out.values[k] = order[k].first;
    out.vectors.col(k) = scratch.col(order[k].second);
  }
  return out;
}

// Fold shift m such that mu - m omega_l lies in (-omega_l/2, omega_l/2].
int fold_shift(double mu, double omega_l) {
  return static_cast<int>(std::ceil(mu / omega_l - 0.5));
}

// Overlap sum_{a,l} u(a, l) v(a, l + shift) on the truncated lattice.
double shifted_overlap(const Eigen::VectorXd& u, const Eigen::VectorXd& v, const Lattice& lat,
                       int shift) {
  double s = 0.0;
  for (int l = -lat.l_max; l <= lat.l_max; ++l) {
    const int lv = l + shift;
    if (lv < -lat.l_max || lv > lat.l_max) continue;
    for (int a = 0; a < lat.n_levels; ++a) s += u[lat.node(a, l)] * v[lat.node(a, lv)];
  }
  return s;
}

struct BandRep {
  int eig_index = -1;   // representative eigenpair folded into the window
  double folded = 0.0;  // its quasienergy, in (-omega_l/2, omega_l/2]
};

// One representative per band: normally the N eigenvalues already inside the
// fundamental window; near-boundary cases fall back to greedy selection of
// non-replica eigenvectors closest to the window center.
std::vector<BandRep> select_representatives(const EigenPairs& eig, const Lattice& lat,
                                            double omega_l) {
  const int d = lat.size();
  const int n = lat.n_levels;
  std::vector<BandRep> reps;
  for (int k = 0; k < d; ++k) {
    if (fold_shift(eig.values[k], omega_l) == 0) reps.push_back({k, eig.values[k]});
  }
  if (static_cast<int>(reps.size()) != n) {
    std::vector<int> by_center(d);
    std::iota(by_center.begin(), by_center.end(), 0);
    std::vector<double> folded(d);
    std::vector<int> shift(d);
    for (int k = 0; k < d; ++k) {
      shift[k] = fold_shift(eig.values[k], omega_l);
      folded[k] = eig.values[k] - shift[k] * omega_l;
    }
    std::stable_sort(by_center.begin(), by_center.end(), [&](int x, int y) {
      return std::abs(folded[x]) < std::abs(folded[y]);
    });
    reps.clear();
    for (int k : by_center) {
      bool replica = false;
      for (const BandRep& r : reps) {
        const int ds = shift[k] - fold_shift(eig.values[r.eig_index], omega_l);
        const double o = shifted_overlap(eig.vectors.col(k), eig.vectors.col(r.eig_index), lat,
                                         ds);
        if (std::abs(o) > 0.5) {
          replica = true;
          break;
        }
      }
      if (!replica) reps.push_back({k, folded[k]});
      if (static_cast<int>(reps.size()) == n) break;
    }
    if (static_cast<int>(reps.size()) != n)
      throw Error(Error::Kind::numerical, "floquet: could not isolate one representative per band");
  }
  std::stable_sort(reps.begin(), reps.end(),
                   [](const BandRep& x, const BandRep& y) { return x.folded < y.folded; });
  return reps;
}

// Adiabatic labels: permutation maximizing the total weight of band i on bare
// level sigma(i) (weights sum_l f^2). Representatives are pre-sorted by
// folded quasienergy, so exact ties keep that order.
std::vector<int> assign_labels(const EigenPairs& eig, const std::vector<BandRep>& reps,
                               const Lattice& lat) {
  const int n = lat.n_levels;
  Eigen::MatrixXd weight(n, n);
  for (int i = 0; i < n; ++i) {
    const auto v = eig.vectors.col(reps[i].eig_index);
    for (int a = 0; a < n; ++a) {
      double w = 0.0;
      for (int l = -lat.l_max; l <= lat.l_max; ++l) {
        const double x = v[lat.node(a, l)];
        w += x * x;
      }
      weight(i, a) = w;
    }
  }
  std::vector<int> perm(n), best(n);
  std::iota(perm.begin(), perm.end(), 0);
  best = perm;
  double best_score = -1.0;
  do {
    double score = 0.0;
    for (int i = 0; i < n; ++i) score += weight(i, perm[i]);
    if (score > best_score + 1e-12) {
      best_score = score;
      best = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;  // best[i] = level assigned to representative i
}

struct SolveAtResult {
  Eigen::VectorXd omega_tilde;
  Eigen::VectorXd omega_folded;
  HarmonicTensor<double> coeffs;
};

SolveAtResult solve_at(const AtomModel& model, const DriveParams& drive, int l_max) {
  const Lattice lat{model.n_levels, l_max};
  const Eigen::MatrixXd matrix = build_quasienergy_matrix(model, drive, l_max);
  const std::vector<int> comp = lattice_components(lat, model.rabi);
  const EigenPairs eig = diagonalize_by_component(matrix, lat, comp);
  const double omega_l = drive.omega_l;
  const int n = model.n_levels;

  const std::vector<BandRep> reps = select_representatives(eig, lat, omega_l);
  const std::vector<int> label = assign_labels(eig, reps, lat);

  SolveAtResult out;
  out.omega_tilde.resize(n);
  out.omega_folded.resize(n);
  out.coeffs = HarmonicTensor<double>(n, n, l_max);
  std::vector<int> claimed;

  for (int i = 0; i < n; ++i) {
    const int j = label[i];  // band label = assigned bare level
    const BandRep& rep = reps[i];
    const auto rep_vec = eig.vectors.col(rep.eig_index);
    out.omega_folded[j] = rep.folded;

    // Dominant support node of the representative and the target sector: the
    // stored replica must live in the lattice component of the bare node
    // (j, l = 0) so that selection rules stay exact under the shift.
    int dom = 0;
    for (int idx = 1; idx < lat.size(); ++idx)
      if (std::abs(rep_vec[idx]) > std::abs(rep_vec[dom])) dom = idx;
    const int dom_a = lat.level_of(dom);
    const int dom_l = lat.harmonic_of(dom);
    const int bare_comp = comp[lat.node(j, 0)];

    const double bare = model.energies[j];
    const int m_near = static_cast<int>(std::lround((bare - rep.folded) / omega_l));
    int m_shift = m_near;
    double best_dist = -1.0;
    for (int dm = -2; dm <= 2; ++dm) {
      const int m = m_near + dm;
      const int moved_l = dom_l - m;
      if (moved_l < -lat.l_max || moved_l > lat.l_max) continue;
      if (comp[lat.node(dom_a, moved_l)] != bare_comp) continue;
      const double dist = std::abs(rep.folded + m * omega_l - bare);
      if (best_dist < 0.0 || dist < best_dist - 1e-15 ||
          (std::abs(dist - best_dist) <= 1e-15 && m > m_shift)) {
        best_dist = dist;
        m_shift = m;
      }
    }

    // Retrieve the eigenpair of the shifted replica: eigenvalue near
    // folded + m omega_l, eigenvector maximizing the aligned overlap.
    const double target = rep.folded + m_shift * omega_l;
    int best_k = -1;
    double best_overlap = 0.0;
    for (int k = 0; k < lat.size(); ++k) {
      if (std::abs(eig.values[k] - target) > 0.45 * omega_l) continue;
      const double o =
          std::abs(shifted_overlap(eig.vectors.col(k), rep_vec, lat, m_shift));
      if (o > best_overlap) {
        best_overlap = o;
        best_k = k;
      }
    }
    if (best_k < 0 || best_overlap < 0.5) {
      std::ostringstream msg;
      msg << "floquet: degenerate band grouping failure for band " << j << " (best overlap "
          << best_overlap << " at shift " << m_shift << ")";
      throw Error(Error::Kind::numerical, msg.str());
    }
    if (std::find(claimed.begin(), claimed.end(), best_k) != claimed.end())
      throw Error(Error::Kind::numerical,
                  "floquet: degenerate band grouping failure (two bands claim one eigenvector)");
    claimed.push_back(best_k);

    Eigen::VectorXd stored = eig.vectors.col(best_k);
    // Sign gauge: largest-magnitude coefficient positive.
    int peak = 0;
    for (int idx = 1; idx < lat.size(); ++idx)
      if (std::abs(stored[idx]) > std::abs(stored[peak])) peak = idx;
    if (stored[peak] < 0.0) stored = -stored;

    out.omega_tilde[j] = eig.values[best_k];
    for (int a = 0; a < n; ++a)
      for (int l = -l_max; l <= l_max; ++l) out.coeffs(j, a, l) = stored[lat.node(a, l)];
  }
  return out;
}

}  // namespace

Eigen::MatrixXd build_quasienergy_matrix(const AtomModel& model, const DriveParams& drive,
                                         int l_max) {
  model.validate();
  drive.validate();
  if (l_max < 1) throw Error(Error::Kind::input, "l_max: must be >= 1");
  const Lattice lat{model.n_levels, l_max};
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(lat.size(), lat.size());
  for (int l = -l_max; l <= l_max; ++l) {
    for (int a = 0; a < model.n_levels; ++a) {
      m(lat.node(a, l), lat.node(a, l)) = model.energies[a] - l * drive.omega_l;
      for (int ap = 0; ap < model.n_levels; ++ap) {
        const double half = model.rabi(a, ap) / 2.0;
        if (half == 0.0) continue;
        if (l + 1 <= l_max) m(lat.node(a, l), lat.node(ap, l + 1)) = half;
        if (l - 1 >= -l_max) m(lat.node(a, l), lat.node(ap, l - 1)) = half;
      }
    }
  }
  return m;
}

FloquetSolution solve_floquet(const AtomModel& model, const DriveParams& drive,
                              const NumericsConfig& numerics) {
  model.validate();
  drive.validate();
  numerics.validate();

  const int cap = numerics.l_max;
  std::vector<int> rungs;
  int l = std::min(8, std::max(2, cap / 2));
  while (l < cap) {
    rungs.push_back(l);
    l *= 2;
  }
  rungs.push_back(cap);

  FloquetSolution sol;
  SolveAtResult prev = solve_at(model, drive, rungs[0]);
  double delta = std::numeric_limits<double>::infinity();
  int used = rungs[0];
  for (std::size_t r = 1; r < rungs.size(); ++r) {
    SolveAtResult cur = solve_at(model, drive, rungs[r]);
    delta = (cur.omega_tilde - prev.omega_tilde).cwiseAbs().maxCoeff();
    prev = std::move(cur);
    used = rungs[r];
    if (delta < numerics.eig_tol) break;
  }

  sol.n_levels = model.n_levels;
  sol.l_max = used;
  sol.omega_l = drive.omega_l;
  sol.omega_tilde = prev.omega_tilde;
  sol.omega_folded = prev.omega_folded;
  sol.coeffs = std::move(prev.coeffs);
  sol.residual = delta;
  sol.converged = delta < numerics.eig_tol;
  if (!sol.converged) {
    std::ostringstream msg;
    msg << "floquet: quasienergies not converged at l_max = " << used
        << " (last residual " << delta << ", eig_tol " << numerics.eig_tol << ")";
    throw Error(Error::Kind::numerical, msg.str());
  }
  return sol;
}

namespace {

void require_two_level(const FloquetSolution& fs, const AtomModel& model) {
  if (fs.n_levels != 2 || model.n_levels != 2)
    throw Error(Error::Kind::input, "stark_shift: defined for two-level models only");
}

}  // namespace

double stark_shift(const FloquetSolution& fs, const AtomModel& model) {
  require_two_level(fs, model);
  const double omega0 = model.omega0();
  const double diff = fs.omega_tilde[1] - fs.omega_tilde[0];
  double best = std::abs(diff) - omega0;
  for (int m = -3; m <= 3; ++m) {
    const double cand = std::abs(diff + m * fs.omega_l) - omega0;
    if (std::abs(cand) < std::abs(best)) best = cand;
  }
  return best;
}

double stark_shift(const FloquetSolution& fs, const AtomModel& model, double previous) {
  require_two_level(fs, model);
  // Follow the signed transition frequency: the replica closest to
  // omega0 + previous continues the branch through half-photon wraps.
  const double omega0 = model.omega0();
  const double diff = fs.omega_tilde[1] - fs.omega_tilde[0];
  const double target = omega0 + previous;
  double best = diff;
  for (int m = -3; m <= 3; ++m) {
    const double cand = diff + m * fs.omega_l;
    if (std::abs(cand - target) < std::abs(best - target)) best = cand;
  }
  return best - omega0;
}

}  // namespace floqeels
