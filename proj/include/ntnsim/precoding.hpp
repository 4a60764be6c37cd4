// SPDX-License-Identifier: Apache-2.0
//
// ntnsim: system-level simulator for integrated terrestrial and non-terrestrial networks
// Copyright (C) 2026 The ntnsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include <Eigen/Dense>

#include <complex>
#ifndef lapack_complex_float
#define lapack_complex_float std::complex<float>
#endif
#ifndef lapack_complex_double
#define lapack_complex_double std::complex<double>
#endif
#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace ntnsim {

using cdouble = std::complex<double>;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;

/// Linear precoding (DL) or combining (UL) weights, one unit-norm column per
/// served user. Served channels are the columns h_k of a ports x users matrix,
/// with the received sample h_k^H w_k in DL and w_k^H h_k in UL.
struct BeamWeights {
    CMat w;
    bool regularized = false;  // diagonal loading had to be applied
    int n_nulls = 0;
};

namespace detail {

inline bool gram_is_singular(const CMat& gram)
{
    if (gram.rows() == 0)
        return false;
    Eigen::SelfAdjointEigenSolver<CMat> es(gram, Eigen::EigenvaluesOnly);
    const auto& ev = es.eigenvalues();
    const double hi = ev.maxCoeff();
    return !(hi > 0.0) || ev.minCoeff() <= 1e-12 * hi;
}

} // namespace detail

/// Zero forcing: pseudo-inverse directions W = H (H^H H)^-1 with normalised
/// columns, so H^H W is diagonal. Rank-deficient Grams get loading 1e-6 trace.
inline BeamWeights zf_precoder(const CMat& h_served)
{
    BeamWeights out;
    const Eigen::Index k = h_served.cols();
    if (k == 0) {
        out.w = CMat(h_served.rows(), 0);
        return out;
    }
    CMat gram = h_served.adjoint() * h_served;
    if (detail::gram_is_singular(gram)) {
        const double load = 1e-6 * gram.trace().real();
        gram += CMat::Identity(k, k) * (load > 0.0 ? load : 1e-300);
        out.regularized = true;
    }
    out.w = h_served * gram.ldlt().solve(CMat::Identity(k, k));
    for (Eigen::Index j = 0; j < k; ++j) {
        const double n = out.w.col(j).norm();
        if (n > 0.0)
            out.w.col(j) /= n;
    }
    return out;
}

/// Orthonormal basis (ports x r, r <= n) of the n dominant eigendirections of
/// sum_i a_i a_i^H, where a_i are the columns of `channels`. Eigenvalue ties are
/// ordered by the magnitude of the projection onto the all-ones direction.
inline CMat dominant_eigenvectors(const CMat& channels, int n)
{
    const Eigen::Index ports = channels.rows();
    const Eigen::Index m = channels.cols();
    if (n <= 0 || m == 0)
        return CMat(ports, 0);

    // eigenpairs of A^H A map to those of A A^H through A u / sqrt(lambda)
    const bool gram = m < ports;
    CMat mat = gram ? CMat(channels.adjoint() * channels) : CMat(channels * channels.adjoint());
    const Eigen::Index size = mat.rows();
    const Eigen::Index want = std::min<Eigen::Index>(n, size);
    Eigen::VectorXd values(size);
    CMat z(size, want);
    std::vector<lapack_int> support(static_cast<std::size_t>(2 * want));
    lapack_int found = 0;
    const lapack_int info = LAPACKE_zheevr(
        LAPACK_COL_MAJOR, 'V', 'I', 'L', static_cast<lapack_int>(size), mat.data(), static_cast<lapack_int>(size),
        0.0, 0.0, static_cast<lapack_int>(size - want + 1), static_cast<lapack_int>(size), 0.0, &found,
        values.data(), z.data(), static_cast<lapack_int>(size), support.data());
    if (info != 0)
        throw std::runtime_error("dominant_eigenvectors: eigensolver failed");
    values.conservativeResize(found);
    CMat vectors = gram ? CMat(channels * z.leftCols(found)) : CMat(z.leftCols(found));
    const double top = values.size() > 0 ? values.maxCoeff() : 0.0;
    if (!(top > 0.0))
        return CMat(ports, 0);

    for (Eigen::Index j = 0; j < vectors.cols(); ++j) {
        const double nrm = vectors.col(j).norm();
        if (nrm > 0.0)
            vectors.col(j) /= nrm;
    }
    const CVec ref = CVec::Ones(ports) / std::sqrt(static_cast<double>(ports));
    std::vector<Eigen::Index> order(static_cast<std::size_t>(values.size()));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
        const double va = values(a);
        const double vb = values(b);
        if (std::abs(va - vb) > 1e-12 * top)
            return va > vb;
        return std::abs(ref.dot(vectors.col(a))) > std::abs(ref.dot(vectors.col(b)));
    });

    std::vector<Eigen::Index> keep;
    for (Eigen::Index idx : order) {
        if (static_cast<int>(keep.size()) == n)
            break;
        if (values(idx) <= 1e-12 * top)
            break;
        keep.push_back(idx);
    }
    CMat e(ports, static_cast<Eigen::Index>(keep.size()));
    for (std::size_t j = 0; j < keep.size(); ++j)
        e.col(static_cast<Eigen::Index>(j)) = vectors.col(keep[j]);
    if (e.cols() == 0)
        return e;
    // re-orthonormalise so that projections leave residuals at rounding level
    Eigen::HouseholderQR<CMat> qr(e);
    return qr.householderQ() * CMat::Identity(ports, e.cols());
}

/// Removes span(e) from every column of h.
inline CMat project_out(const CMat& h, const CMat& e)
{
    if (e.cols() == 0)
        return h;
    return h - e * (e.adjoint() * h);
}

/// Eigendirection-aware precoding: zero forcing restricted to the orthogonal
/// complement of the n_nulls dominant eigendirections of the victims' channel
/// covariance. With n_nulls = 0 this is exactly zf_precoder.
inline BeamWeights eda_precoder(const CMat& h_served, const CMat& h_victims, int n_nulls)
{
    if (n_nulls == 0)
        return zf_precoder(h_served);
    if (n_nulls < 0 || n_nulls + h_served.cols() >= h_served.rows())
        throw std::invalid_argument("eda_precoder: n_nulls must leave degrees of freedom for served users");
    const CMat e = dominant_eigenvectors(h_victims, n_nulls);
    BeamWeights out = zf_precoder(project_out(h_served, e));
    out.n_nulls = static_cast<int>(e.cols());
    return out;
}

/// Uplink dual of eda_precoder: nulls on the dominant eigendirections of the
/// received interference covariance. h_interferers columns carry sqrt(power).
inline BeamWeights eda_combiner(const CMat& h_served, const CMat& h_interferers, int n_nulls)
{
    return eda_precoder(h_served, h_interferers, n_nulls);
}

} // namespace ntnsim
