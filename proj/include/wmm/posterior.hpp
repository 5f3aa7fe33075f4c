/*
*   Copyright (c) 2026 wmm contributors
*
*   Licensed under the Apache License, Version 2.0 (the "License");
*   you may not use this file except in compliance with the License.
*   You may obtain a copy of the License at
*
*       http://www.apache.org/licenses/LICENSE-2.0
*
*   Unless required by applicable law or agreed to in writing, software
*   distributed under the License is distributed on an "AS IS" BASIS,
*   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
*   See the License for the specific language governing permissions and
*   limitations under the License.
*/
#ifndef WMM_POSTERIOR_HPP
#define WMM_POSTERIOR_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "wmm/errors.hpp"
#include "wmm/parallel.hpp"
#include "wmm/rng.hpp"
#include "wmm/sampling.hpp"
#include "wmm/special.hpp"

namespace wmm {

// Prior over the integer root size. The support grid defaults to the
// uniform limits, or to mean +/- 10 sigma for the Gaussian.
struct PriorSpec {
  enum class Kind { Uniform, Gaussian };
  Kind kind = Kind::Uniform;
  double u = 0.0;
  double v = 0.0;
  double mu = 0.0;
  double sigma = 0.0;
  std::int64_t z_min = 0;
  std::int64_t z_max = 0;

  static PriorSpec uniform(double u, double v) {
    if (!(u < v)) throw InvalidParameter("uniform prior needs u < v");
    PriorSpec prior;
    prior.kind = Kind::Uniform;
    prior.u = u;
    prior.v = v;
    prior.z_min = static_cast<std::int64_t>(std::ceil(u));
    prior.z_max = static_cast<std::int64_t>(std::floor(v));
    return prior;
  }

  static PriorSpec gaussian(double mu, double sigma) {
    if (!(sigma > 0.0)) throw InvalidParameter("gaussian prior needs sigma > 0");
    PriorSpec prior;
    prior.kind = Kind::Gaussian;
    prior.mu = mu;
    prior.sigma = sigma;
    prior.z_min = std::max<std::int64_t>(
        0, static_cast<std::int64_t>(std::ceil(mu - 10.0 * sigma)));
    prior.z_max = static_cast<std::int64_t>(std::floor(mu + 10.0 * sigma));
    return prior;
  }

  // Log prior mass at z up to an additive constant.
  double log_density(std::int64_t z) const {
    if (kind == Kind::Uniform) return 0.0;
    const double d = (static_cast<double>(z) - mu) / sigma;
    return -0.5 * d * d;
  }
};

// Normalized discrete posterior on a strictly increasing z grid.
struct PosteriorGrid {
  std::vector<std::int64_t> z_values;
  std::vector<double> log_pmf;
};

namespace detail {

// Drops grid points more than 40 log-units below the mode and normalizes.
inline PosteriorGrid finalize_grid(std::vector<std::int64_t> z,
                                   std::vector<double> lp) {
  if (z.empty()) {
    throw EmptySupport("posterior support is empty");
  }
  const double peak = *std::max_element(lp.begin(), lp.end());
  if (!std::isfinite(peak)) {
    throw EmptySupport("posterior density is degenerate on the grid");
  }
  PosteriorGrid grid;
  for (std::size_t i = 0; i < z.size(); ++i) {
    if (lp[i] >= peak - 40.0) {
      grid.z_values.push_back(z[i]);
      grid.log_pmf.push_back(lp[i]);
    }
  }
  const double norm = log_sum_exp(grid.log_pmf);
  for (double& v : grid.log_pmf) v -= norm;
  return grid;
}

inline std::vector<std::int64_t> support_grid(const PriorSpec& prior,
                                              std::int64_t lowest) {
  const std::int64_t lo = std::max(prior.z_min, lowest);
  if (prior.z_max < lo) {
    throw EmptySupport("prior support ends below the observed counts");
  }
  std::vector<std::int64_t> z;
  z.reserve(static_cast<std::size_t>(prior.z_max - lo + 1));
  for (std::int64_t value = lo; value <= prior.z_max; ++value) {
    z.push_back(value);
  }
  return z;
}

}  // namespace detail

// Exact posterior for the two-branch chain: a of z counted directly at
// the first split, b of the remaining z - a counted below the second.
// Both branch probabilities carry Beta priors that integrate out in
// closed form; everything is evaluated in log space so only z-dependent
// factors matter.
inline PosteriorGrid posterior_simple(std::int64_t a, std::int64_t b,
                                      double alpha_p, double beta_p,
                                      double alpha_q, double beta_q,
                                      const PriorSpec& prior) {
  if (a < 0 || b < 0) throw InvalidParameter("counts must be nonnegative");
  if (!(alpha_p > 0.0) || !(beta_p > 0.0) || !(alpha_q > 0.0) ||
      !(beta_q > 0.0)) {
    throw InvalidParameter("beta hyperparameters must be positive");
  }
  const std::vector<std::int64_t> z = detail::support_grid(prior, a + b);
  std::vector<double> lp(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) {
    const auto zi = static_cast<double>(z[i]);
    const double za = zi - static_cast<double>(a);
    const double m = za - static_cast<double>(b);
    // The (1-q)-power term and the unseen-count factorial are combined
    // into one difference so a flat q cancels exactly.
    const double tail_q = log_gamma(beta_q + m) - log_gamma(m + 1.0);
    lp[i] = log_gamma(alpha_p + za) - log_gamma(alpha_p + beta_p + zi) +
            tail_q - log_gamma(alpha_q + beta_q + za) + log_gamma(zi + 1.0) +
            prior.log_density(z[i]);
  }
  return detail::finalize_grid(z, lp);
}

// Beta hyperparameters for the hidden-node tree: p (first split), q
// (observation below the p branch), r (split among reached cases), s
// (probability a case is missed before the r split).
struct HiddenHyper {
  double alpha_p = 1.0, beta_p = 1.0;
  double alpha_q = 1.0, beta_q = 1.0;
  double alpha_r = 1.0, beta_r = 1.0;
  double alpha_s = 1.0, beta_s = 1.0;
};

// Posterior for the tree with a latent missed-case branch. Given z, the
// observed cells (b, c, c_tilde) and the unobserved remainder e follow a
// multinomial with cell probabilities pq, (1-p)(1-s)r, (1-p)(1-s)(1-r)
// and p(1-q) + s(1-p). The r factor integrates in closed form; the
// (p, q, s) integral is estimated by Monte Carlo with prior draws shared
// across the whole grid and weighted by the non-prior factors.
inline PosteriorGrid posterior_hidden(std::int64_t b, std::int64_t c,
                                      std::int64_t c_tilde,
                                      const HiddenHyper& hyper,
                                      const PriorSpec& prior,
                                      std::size_t mc_samples,
                                      std::uint64_t seed = 0x77aa11dd,
                                      unsigned threads = 1) {
  if (b < 0 || c < 0 || c_tilde < 0) {
    throw InvalidParameter("counts must be nonnegative");
  }
  if (mc_samples < 10000) {
    throw InvalidParameter("hidden-node posterior needs at least 1e4 draws");
  }
  const double db = static_cast<double>(b);
  const double dcc = static_cast<double>(c + c_tilde);
  const std::vector<std::int64_t> z =
      detail::support_grid(prior, b + c + c_tilde);

  Rng rng = substream(seed, 0, 0);
  std::vector<double> base_w(mc_samples);
  std::vector<double> log_rest(mc_samples);
  for (std::size_t i = 0; i < mc_samples; ++i) {
    const double p = sample_beta(rng, hyper.alpha_p, hyper.beta_p);
    const double q = sample_beta(rng, hyper.alpha_q, hyper.beta_q);
    const double s = sample_beta(rng, hyper.alpha_s, hyper.beta_s);
    base_w[i] = db * std::log(p) + dcc * std::log1p(-p) + db * std::log(q) +
                dcc * std::log1p(-s);
    log_rest[i] = std::log(p * (1.0 - q) + s * (1.0 - p));
  }

  // z-free closed form for the r branch; kept for clarity even though
  // normalization would cancel it.
  const double log_sr =
      log_beta(hyper.alpha_r + static_cast<double>(c),
               hyper.beta_r + static_cast<double>(c_tilde)) -
      log_beta(hyper.alpha_r, hyper.beta_r);

  std::vector<double> lp(z.size());
  detail::parallel_rows(z.size(), threads, [&](std::size_t lo, std::size_t hi) {
    std::vector<double> terms(mc_samples);
    for (std::size_t i = lo; i < hi; ++i) {
      const auto zi = static_cast<double>(z[i]);
      const double e = zi - db - dcc;
      for (std::size_t k = 0; k < mc_samples; ++k) {
        terms[k] = base_w[k] + e * log_rest[k];
      }
      const double log_integral =
          log_sum_exp(terms) - std::log(static_cast<double>(mc_samples));
      lp[i] = log_sr + log_gamma(zi + 1.0) - log_gamma(e + 1.0) +
              log_integral + prior.log_density(z[i]);
    }
  });
  return detail::finalize_grid(z, lp);
}

struct PosteriorMoments {
  double mean = 0.0;
  double sd = 0.0;
};

inline PosteriorMoments posterior_moments(const PosteriorGrid& grid) {
  PosteriorMoments moments;
  double m2 = 0.0;
  for (std::size_t i = 0; i < grid.z_values.size(); ++i) {
    const double w = std::exp(grid.log_pmf[i]);
    const auto zi = static_cast<double>(grid.z_values[i]);
    moments.mean += w * zi;
    m2 += w * zi * zi;
  }
  const double var = std::max(0.0, m2 - moments.mean * moments.mean);
  moments.sd = std::sqrt(var);
  return moments;
}

// Left-continuous inverse of the cumulative pmf.
inline std::int64_t posterior_quantile(const PosteriorGrid& grid, double p) {
  if (!(p >= 0.0) || !(p <= 1.0)) {
    throw InvalidParameter("quantile level must lie in [0,1]");
  }
  double cumulative = 0.0;
  for (std::size_t i = 0; i < grid.z_values.size(); ++i) {
    cumulative += std::exp(grid.log_pmf[i]);
    if (cumulative >= p) return grid.z_values[i];
  }
  return grid.z_values.back();
}

inline std::int64_t posterior_sample(const PosteriorGrid& grid, Rng& rng) {
  const double u = rng.uniform();
  double cumulative = 0.0;
  for (std::size_t i = 0; i < grid.z_values.size(); ++i) {
    cumulative += std::exp(grid.log_pmf[i]);
    if (u < cumulative) return grid.z_values[i];
  }
  return grid.z_values.back();
}

// Posterior mean of log z: the reference point estimate on the log scale.
inline double posterior_mean_log(const PosteriorGrid& grid) {
  double mean = 0.0;
  for (std::size_t i = 0; i < grid.z_values.size(); ++i) {
    mean += std::exp(grid.log_pmf[i]) *
            std::log(static_cast<double>(grid.z_values[i]));
  }
  return mean;
}

// Log of the posterior mean of z: the alternative point functional.
inline double posterior_log_mean(const PosteriorGrid& grid) {
  return std::log(posterior_moments(grid).mean);
}

// Total-variation distance between two grids (union support).
inline double total_variation(const PosteriorGrid& a, const PosteriorGrid& b) {
  double tv = 0.0;
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < a.z_values.size() || j < b.z_values.size()) {
    const std::int64_t za =
        i < a.z_values.size() ? a.z_values[i]
                              : std::numeric_limits<std::int64_t>::max();
    const std::int64_t zb =
        j < b.z_values.size() ? b.z_values[j]
                              : std::numeric_limits<std::int64_t>::max();
    if (za < zb) {
      tv += std::exp(a.log_pmf[i++]);
    } else if (zb < za) {
      tv += std::exp(b.log_pmf[j++]);
    } else {
      tv += std::abs(std::exp(a.log_pmf[i++]) - std::exp(b.log_pmf[j++]));
    }
  }
  return 0.5 * tv;
}

}  // namespace wmm

#endif  // WMM_POSTERIOR_HPP
