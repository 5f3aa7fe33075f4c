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
#ifndef WMM_LINALG_HPP
#define WMM_LINALG_HPP

#include <cmath>
#include <cstddef>
#include <vector>

#include "wmm/errors.hpp"

namespace wmm {

// Eigendecomposition of a symmetric matrix. vectors is row-major with
// eigenvector k stored in column k, so A = V diag(values) V^T.
struct SymEig {
  std::vector<double> values;
  std::vector<double> vectors;
};

// Cyclic Jacobi rotations. The matrices here are path-covariance sized
// (a few dozen rows at most), where Jacobi is accurate and simple.
inline SymEig jacobi_eigendecomposition(std::vector<double> a, std::size_t n) {
  if (a.size() != n * n) {
    throw InvalidParameter("jacobi_eigendecomposition: size mismatch");
  }
  std::vector<double> v(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) v[i * n + i] = 1.0;

  double frob = 0.0;
  for (double x : a) frob += x * x;
  frob = std::sqrt(frob);
  const double stop = 1e-14 * (frob > 0.0 ? frob : 1.0);

  for (int sweep = 0; sweep < 64; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        off += a[p * n + q] * a[p * n + q];
      }
    }
    if (std::sqrt(2.0 * off) <= stop) break;

    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a[p * n + q];
        if (apq == 0.0) continue;
        const double theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
        const double t =
            (theta >= 0.0 ? 1.0 : -1.0) /
            (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;

        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a[k * n + p];
          const double akq = a[k * n + q];
          a[k * n + p] = c * akp - s * akq;
          a[k * n + q] = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a[p * n + k];
          const double aqk = a[q * n + k];
          a[p * n + k] = c * apk - s * aqk;
          a[q * n + k] = s * apk + c * aqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v[k * n + p];
          const double vkq = v[k * n + q];
          v[k * n + p] = c * vkp - s * vkq;
          v[k * n + q] = s * vkp + c * vkq;
        }
      }
    }
  }

  SymEig out;
  out.values.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.values[i] = a[i * n + i];
  out.vectors = std::move(v);
  return out;
}

// Moore-Penrose pseudo-inverse of a symmetric positive semidefinite matrix.
// Eigenvalues below rel_tol times the largest are treated as exact zeros.
inline std::vector<double> pseudo_inverse(const std::vector<double>& a,
                                          std::size_t n,
                                          double rel_tol = 1e-12) {
  const SymEig eig = jacobi_eigendecomposition(a, n);
  double lambda_max = 0.0;
  for (double lam : eig.values) {
    if (lam > lambda_max) lambda_max = lam;
  }
  const double cut = rel_tol * lambda_max;

  std::vector<double> inv(n * n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    const double lam = eig.values[k];
    if (!(lam > cut)) continue;
    const double w = 1.0 / lam;
    for (std::size_t i = 0; i < n; ++i) {
      const double vik = eig.vectors[i * n + k];
      for (std::size_t j = 0; j < n; ++j) {
        inv[i * n + j] += w * vik * eig.vectors[j * n + k];
      }
    }
  }
  return inv;
}

// Sample covariance (denominator rows - 1) of the columns of a row-major
// rows x cols matrix. Summation is sequential so results do not depend on
// the parallelism degree of the caller.
inline std::vector<double> column_covariance(const std::vector<double>& data,
                                             std::size_t rows,
                                             std::size_t cols) {
  if (rows < 2 || data.size() != rows * cols) {
    throw InvalidParameter("column_covariance: need at least 2 rows");
  }
  std::vector<double> mean(cols, 0.0);
  for (std::size_t m = 0; m < rows; ++m) {
    for (std::size_t i = 0; i < cols; ++i) {
      mean[i] += data[m * cols + i];
    }
  }
  for (double& mu : mean) mu /= static_cast<double>(rows);

  std::vector<double> cov(cols * cols, 0.0);
  for (std::size_t m = 0; m < rows; ++m) {
    for (std::size_t i = 0; i < cols; ++i) {
      const double di = data[m * cols + i] - mean[i];
      for (std::size_t j = i; j < cols; ++j) {
        cov[i * cols + j] += di * (data[m * cols + j] - mean[j]);
      }
    }
  }
  const double denom = static_cast<double>(rows - 1);
  for (std::size_t i = 0; i < cols; ++i) {
    for (std::size_t j = i; j < cols; ++j) {
      cov[i * cols + j] /= denom;
      cov[j * cols + i] = cov[i * cols + j];
    }
  }
  return cov;
}

}  // namespace wmm

#endif  // WMM_LINALG_HPP
