#pragma once

#include <utility>
#include <vector>

#include "evora/types.hpp"

namespace evora {

// Categorical distribution over B bins. For traction PMFs the bin edges span
// [0, 1] and are equally spaced.
struct Pmf {
  Vec probs;      // B non-negative entries summing to 1
  Vec bin_edges;  // B+1 strictly increasing edges

  Eigen::Index bins() const { return probs.size(); }
};

// out[b] = sum_{i<=b} p[i]
Vec cumulative_sum(const Vec& p);

Vec uniform_edges(Eigen::Index bins);          // B+1 edges over [0, 1]
Vec bin_centers(const Vec& edges);             // midpoints
Pmf uniform_pmf(Eigen::Index bins);            // 1/B everywhere, unit edges
Pmf point_mass_pmf(Eigen::Index bins, Eigen::Index bin);

Pmf make_pmf(Vec probs);                       // unit-range equal bins
Pmf make_pmf(Vec probs, Vec edges);

// Throws on violated invariants (sum to 1 within 1e-9, B >= 2, strictly
// increasing edges; traction units additionally pin edges to [0, 1]).
void validate_pmf(const Pmf& pmf, bool traction_units = true);

bool equally_spaced(const Vec& edges, double tol = 1e-9);

// Bin index of a sample in [0, 1] under B equal bins; 1.0 lands in the top bin.
Eigen::Index unit_bin_index(double x, Eigen::Index bins);

// Histogram over B equal bins normalized to sum 1, plus the raw sample count.
// An empty sample list yields the uniform PMF with count 0.
std::pair<Pmf, int> empirical_pmf(const std::vector<double>& samples,
                                  Eigen::Index bins);

// KL(p || q) with a 1e-12 floor applied to zero bins of both arguments.
double kl_divergence(const Vec& p, const Vec& q);

double total_variation(const Vec& p, const Vec& q);

}  // namespace evora
