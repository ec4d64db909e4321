#include "evora/pmf.hpp"

#include <algorithm>
#include <cmath>

namespace evora {

Vec cumulative_sum(const Vec& p) {
  require(p.size() >= 1, "cumulative_sum: empty vector");
  Vec out(p.size());
  double acc = 0.0;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    acc += p[i];
    out[i] = acc;
  }
  return out;
}

Vec uniform_edges(Eigen::Index bins) {
  Vec edges(bins + 1);
  for (Eigen::Index i = 0; i <= bins; ++i) {
    edges[i] = static_cast<double>(i) / static_cast<double>(bins);
  }
  return edges;
}

Vec bin_centers(const Vec& edges) {
  Vec centers(edges.size() - 1);
  for (Eigen::Index i = 0; i + 1 < edges.size(); ++i) {
    centers[i] = 0.5 * (edges[i] + edges[i + 1]);
  }
  return centers;
}

Pmf uniform_pmf(Eigen::Index bins) {
  Pmf pmf;
  pmf.probs = Vec::Constant(bins, 1.0 / static_cast<double>(bins));
  pmf.bin_edges = uniform_edges(bins);
  return pmf;
}

Pmf point_mass_pmf(Eigen::Index bins, Eigen::Index bin) {
  require(bin >= 0 && bin < bins, "point_mass_pmf: bin out of range");
  Pmf pmf;
  pmf.probs = Vec::Zero(bins);
  pmf.probs[bin] = 1.0;
  pmf.bin_edges = uniform_edges(bins);
  return pmf;
}

Pmf make_pmf(Vec probs) {
  Pmf pmf;
  pmf.bin_edges = uniform_edges(probs.size());
  pmf.probs = std::move(probs);
  return pmf;
}

Pmf make_pmf(Vec probs, Vec edges) {
  Pmf pmf;
  pmf.probs = std::move(probs);
  pmf.bin_edges = std::move(edges);
  return pmf;
}

void validate_pmf(const Pmf& pmf, bool traction_units) {
  require(pmf.bins() >= 2, "pmf: need at least two bins");
  require(pmf.bin_edges.size() == pmf.bins() + 1, "pmf: edge/bin mismatch");
  double total = 0.0;
  for (Eigen::Index i = 0; i < pmf.bins(); ++i) {
    require(pmf.probs[i] >= 0.0, "pmf: negative probability");
    total += pmf.probs[i];
  }
  require(std::abs(total - 1.0) <= 1e-9, "pmf: probabilities must sum to 1");
  for (Eigen::Index i = 0; i < pmf.bins(); ++i) {
    require(pmf.bin_edges[i + 1] > pmf.bin_edges[i],
            "pmf: edges must be strictly increasing");
  }
  if (traction_units) {
    require(std::abs(pmf.bin_edges[0]) <= 1e-12 &&
                std::abs(pmf.bin_edges[pmf.bins()] - 1.0) <= 1e-12,
            "pmf: traction edges must span [0, 1]");
  }
}

bool equally_spaced(const Vec& edges, double tol) {
  const double step = (edges[edges.size() - 1] - edges[0]) /
                      static_cast<double>(edges.size() - 1);
  for (Eigen::Index i = 0; i + 1 < edges.size(); ++i) {
    if (std::abs((edges[i + 1] - edges[i]) - step) > tol) return false;
  }
  return true;
}

Eigen::Index unit_bin_index(double x, Eigen::Index bins) {
  const auto idx =
      static_cast<Eigen::Index>(std::floor(x * static_cast<double>(bins)));
  return std::clamp<Eigen::Index>(idx, 0, bins - 1);
}

std::pair<Pmf, int> empirical_pmf(const std::vector<double>& samples,
                                  Eigen::Index bins) {
  require(bins >= 2, "empirical_pmf: need at least two bins");
  if (samples.empty()) return {uniform_pmf(bins), 0};
  Vec counts = Vec::Zero(bins);
  for (double s : samples) {
    require(s >= 0.0 && s <= 1.0, "empirical_pmf: sample outside [0, 1]");
    counts[unit_bin_index(s, bins)] += 1.0;
  }
  counts /= static_cast<double>(samples.size());
  return {make_pmf(std::move(counts)), static_cast<int>(samples.size())};
}

double kl_divergence(const Vec& p, const Vec& q) {
  require(p.size() == q.size(), "kl_divergence: size mismatch");
  constexpr double kFloor = 1e-12;
  double kl = 0.0;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    const double pi = std::max(p[i], kFloor);
    const double qi = std::max(q[i], kFloor);
    kl += pi * std::log(pi / qi);
  }
  return kl;
}

double total_variation(const Vec& p, const Vec& q) {
  require(p.size() == q.size(), "total_variation: size mismatch");
  return 0.5 * (p - q).cwiseAbs().sum();
}

}  // namespace evora
