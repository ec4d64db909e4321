#include "evora/losses.hpp"

#include <cmath>

#include "evora/rng.hpp"
#include "evora/special_functions.hpp"

namespace evora {

double uce_loss(const DirichletBelief& d, const Vec& y) {
  require(d.bins() == y.size(), "uce_loss: bin mismatch");
  const double psi0 = digamma(d.beta0);
  double acc = 0.0;
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    acc -= y[i] * (digamma(d.beta[i]) - psi0);
  }
  return acc;
}

double emd2_loss(const Vec& p, const Vec& y) {
  require(p.size() == y.size(), "emd2_loss: bin mismatch");
  double acc = 0.0, cp = 0.0, cy = 0.0;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    cp += p[i];
    cy += y[i];
    const double diff = cp - cy;
    acc += diff * diff;
  }
  return acc;
}

double emd2_loss(const Pmf& p, const Pmf& y) {
  require(p.bin_edges.size() == y.bin_edges.size(),
          "emd2_loss: edge mismatch");
  require(equally_spaced(p.bin_edges), "emd2_loss: bins must be equally spaced");
  return emd2_loss(p.probs, y.probs);
}

double uemd2_loss(const DirichletBelief& d, const Vec& y) {
  require(d.bins() == y.size(), "uemd2_loss: bin mismatch");
  const Vec s = cumulative_sum(d.beta);
  const Vec c = cumulative_sum(y);
  const double beta0 = d.beta0;
  double first = 0.0, eta = 0.0;
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    first += (s[i] / beta0) * (s[i] + 1.0) / (beta0 + 1.0);
    eta += -2.0 * (s[i] / beta0) * c[i] + c[i] * c[i];
  }
  return first + eta;
}

double combined_loss(const DirichletBelief& d, const Vec& y,
                     const LossWeights& w) {
  w.validate();
  double acc = 0.0;
  if (w.w1 != 0.0) acc += w.w1 * uce_loss(d, y);
  if (w.w2 != 0.0) acc += w.w2 * uemd2_loss(d, y);
  if (w.w3 != 0.0) acc -= w.w3 * dirichlet_entropy(d);
  return acc;
}

Vec grad_combined_loss(const DirichletBelief& d, const Vec& y,
                       const LossWeights& w) {
  w.validate();
  require(d.bins() == y.size(), "grad_combined_loss: bin mismatch");
  const Eigen::Index bins = d.bins();
  const double beta0 = d.beta0;
  Vec grad = Vec::Zero(bins);

  if (w.w1 != 0.0) {
    const double y_total = y.sum();
    const double tg0 = trigamma(beta0);
    for (Eigen::Index j = 0; j < bins; ++j) {
      grad[j] += w.w1 * (-y[j] * trigamma(d.beta[j]) + y_total * tg0);
    }
  }

  if (w.w2 != 0.0) {
    const Vec s = cumulative_sum(d.beta);
    const Vec c = cumulative_sum(y);
    double quad = 0.0, cross = 0.0;
    for (Eigen::Index b = 0; b < bins; ++b) {
      quad += s[b] * s[b] + s[b];
      cross += s[b] * c[b];
    }
    const double denom = beta0 * (beta0 + 1.0);
    // reverse cumulative sums: d quad / d beta_j and d cross / d beta_j
    double rev_quad = 0.0, rev_cross = 0.0;
    Vec g2(bins);
    for (Eigen::Index j = bins - 1; j >= 0; --j) {
      rev_quad += 2.0 * s[j] + 1.0;
      rev_cross += c[j];
      g2[j] = rev_quad / denom - quad * (2.0 * beta0 + 1.0) / (denom * denom) -
              2.0 * rev_cross / beta0 + 2.0 * cross / (beta0 * beta0);
    }
    grad += w.w2 * g2;
  }

  if (w.w3 != 0.0) {
    const double tg0 = trigamma(beta0);
    const double common = (beta0 - static_cast<double>(bins)) * tg0;
    for (Eigen::Index j = 0; j < bins; ++j) {
      grad[j] -= w.w3 * (common - (d.beta[j] - 1.0) * trigamma(d.beta[j]));
    }
  }
  return grad;
}

namespace {

// Chunked sampler shared by the oracles. Draws Gamma(beta_b, 1) variates into
// a column-major block so the log needed by the UCE estimate runs through
// Eigen's vectorized path.
template <bool kWithUce>
McLossEstimate mc_oracle_impl(const DirichletBelief& d, const Vec& y,
                              std::int64_t n_samples, std::uint64_t seed) {
  require(n_samples >= 1, "mc oracle: need at least one sample");
  require(d.bins() == y.size(), "mc oracle: bin mismatch");
  const Eigen::Index bins = d.bins();
  const Vec cs_y = cumulative_sum(y);
  Rng rng(seed);

  constexpr std::int64_t kChunk = 512;
  Mat block(bins, kChunk);
  Mat log_block;
  Vec totals(kChunk);
  double sum_uemd2 = 0.0;
  double sum_uce = 0.0;

  std::int64_t done = 0;
  while (done < n_samples) {
    const auto count =
        static_cast<Eigen::Index>(std::min<std::int64_t>(kChunk, n_samples - done));
    for (Eigen::Index j = 0; j < count; ++j) {
      double total = 0.0;
      for (Eigen::Index b = 0; b < bins; ++b) {
        const double g = rng.gamma(d.beta[b]);
        block(b, j) = g;
        total += g;
      }
      totals[j] = total;
    }
    if constexpr (kWithUce) {
      log_block = block.leftCols(count).array().log().matrix();
    }
    for (Eigen::Index j = 0; j < count; ++j) {
      const double inv_total = 1.0 / totals[j];
      double acc = 0.0, cp = 0.0;
      for (Eigen::Index b = 0; b < bins; ++b) {
        cp += block(b, j);
        const double diff = cp * inv_total - cs_y[b];
        acc += diff * diff;
      }
      sum_uemd2 += acc;
      if constexpr (kWithUce) {
        sum_uce += -y.dot(log_block.col(j)) + std::log(totals[j]);
      }
    }
    done += count;
  }

  McLossEstimate est;
  est.uemd2 = sum_uemd2 / static_cast<double>(n_samples);
  est.uce = kWithUce ? sum_uce / static_cast<double>(n_samples) : 0.0;
  return est;
}

}  // namespace

double mc_uemd2_oracle(const DirichletBelief& d, const Vec& y,
                       std::int64_t n_samples, std::uint64_t seed) {
  return mc_oracle_impl<false>(d, y, n_samples, seed).uemd2;
}

McLossEstimate mc_dirichlet_loss_oracle(const DirichletBelief& d, const Vec& y,
                                        std::int64_t n_samples,
                                        std::uint64_t seed) {
  return mc_oracle_impl<true>(d, y, n_samples, seed);
}

}  // namespace evora
