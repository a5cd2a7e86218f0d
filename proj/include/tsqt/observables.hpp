// Copyright 2026 The tsqt Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "tsqt/qlinalg.hpp"

namespace tsqt {

namespace tol {
/// Shared-eigenray tolerance; looser than kAlgebra to absorb rounding from
/// composed constructions.
inline constexpr double kSharedRay = 1e-9;
/// Two eigenvalues closer than this are considered degenerate.
inline constexpr double kDegenerate = 1e-9;
}  // namespace tol

/// A non-degenerate observable given by an explicit orthonormal eigenbasis.
/// Outcomes are identified by eigenket index; eigenvalues are labels.
class Observable {
  public:
    const std::string &label() const noexcept { return label_; }
    std::size_t dim() const noexcept { return eigenkets_.size(); }
    const std::vector<double> &eigenvalues() const noexcept { return eigenvalues_; }
    const std::vector<Ket> &eigenkets() const noexcept { return eigenkets_; }
    const Ket &eigenket(std::size_t k) const { return eigenkets_.at(k); }

    friend bool operator==(const Observable &, const Observable &) = default;

  private:
    Observable(std::string label, std::vector<double> eigenvalues, std::vector<Ket> eigenkets)
        : label_(std::move(label)), eigenvalues_(std::move(eigenvalues)), eigenkets_(std::move(eigenkets)) {}

    friend Observable make_observable(std::string, std::vector<double>, std::vector<Ket>);

    std::string label_;
    std::vector<double> eigenvalues_;
    std::vector<Ket> eigenkets_;
};

/// Validates and builds an Observable.
///
/// Throws NotOrthonormal when any pairwise overlap exceeds 1e-10, and
/// DegenerateSpectrum when two eigenvalues are within 1e-9 of each other.
inline Observable make_observable(std::string label, std::vector<double> eigenvalues, std::vector<Ket> eigenkets) {
    const std::size_t dim = eigenkets.size();
    if (dim == 0) throw Error(ErrorKind::InvalidArgument, label + ": observable needs at least one eigenket");
    if (eigenvalues.size() != dim) {
        throw Error(ErrorKind::DimensionMismatch, label + ": " + std::to_string(eigenvalues.size()) +
                                                      " eigenvalues for " + std::to_string(dim) + " eigenkets");
    }
    for (const auto &k : eigenkets) {
        if (k.dim() != dim) {
            throw Error(ErrorKind::DimensionMismatch,
                        label + ": eigenket of dimension " + std::to_string(k.dim()) + " in a " +
                            std::to_string(dim) + "-outcome observable");
        }
    }
    for (std::size_t i = 0; i < dim; ++i) {
        if (!std::isfinite(eigenvalues[i])) throw Error(ErrorKind::InvalidArgument, label + ": non-finite eigenvalue");
        for (std::size_t j = i; j < dim; ++j) {
            const Amplitude overlap = inner(eigenkets[i], eigenkets[j]);
            const double expected = (i == j) ? 1.0 : 0.0;
            if (std::abs(overlap - expected) > tol::kAlgebra) {
                throw Error(ErrorKind::NotOrthonormal, label + ": eigenkets " + std::to_string(i + 1) + " and " +
                                                           std::to_string(j + 1) + " are not orthonormal");
            }
        }
        for (std::size_t j = i + 1; j < dim; ++j) {
            if (std::abs(eigenvalues[i] - eigenvalues[j]) < tol::kDegenerate) {
                throw Error(ErrorKind::DegenerateSpectrum, label + ": eigenvalues " + std::to_string(i + 1) + " and " +
                                                               std::to_string(j + 1) + " coincide");
            }
        }
    }
    return Observable(std::move(label), std::move(eigenvalues), std::move(eigenkets));
}

/// Observable whose eigenkets are the computational basis, eigenvalues 1..d.
inline Observable computational_observable(std::string label, std::size_t dim) {
    std::vector<double> values;
    std::vector<Ket> kets;
    for (std::size_t k = 0; k < dim; ++k) {
        values.push_back(static_cast<double>(k + 1));
        kets.push_back(Ket::basis(dim, k));
    }
    return make_observable(std::move(label), std::move(values), std::move(kets));
}

/// Spectral matrix sum_k lambda_k |c_k><c_k|.
inline Operator spectral_matrix(const Observable &c) {
    const std::size_t d = c.dim();
    auto m = Operator::zero(d);
    for (std::size_t k = 0; k < d; ++k) {
        const Ket &v = c.eigenket(k);
        for (std::size_t r = 0; r < d; ++r)
            for (std::size_t s = 0; s < d; ++s) m(r, s) += c.eigenvalues()[k] * v[r] * std::conj(v[s]);
    }
    return m;
}

/// True iff max |(CD - DC)_{rs}| <= tolerance.
inline bool commutes(const Observable &c, const Observable &d, double tolerance = tol::kAlgebra) {
    detail::require_same_dim(c.dim(), d.dim(), "commutes");
    const Operator cm = spectral_matrix(c);
    const Operator dm = spectral_matrix(d);
    return max_abs_diff(multiply(cm, dm), multiply(dm, cm)) <= tolerance;
}

/// Index pairs (i, j) with |<c_i|d_j>| >= 1 - tolerance.
struct EigenrayMatch {
    std::vector<std::pair<std::size_t, std::size_t>> pairs;

    bool empty() const noexcept { return pairs.empty(); }
    friend bool operator==(const EigenrayMatch &, const EigenrayMatch &) = default;
};

inline EigenrayMatch shared_eigenrays(const Observable &c, const Observable &d, double tolerance = tol::kSharedRay) {
    detail::require_same_dim(c.dim(), d.dim(), "shared_eigenrays");
    EigenrayMatch match;
    std::vector<bool> used(d.dim(), false);
    for (std::size_t i = 0; i < c.dim(); ++i) {
        for (std::size_t j = 0; j < d.dim(); ++j) {
            if (used[j]) continue;
            if (std::abs(inner(c.eigenket(i), d.eigenket(j))) >= 1.0 - tolerance) {
                match.pairs.emplace_back(i, j);
                used[j] = true;
                break;
            }
        }
    }
    return match;
}

/// V_c = sum_k |path_k><c_k|: row k is the conjugate of eigenket k, so V_c
/// sends c_k onto the k-th computational basis ket.
inline Operator alignment_unitary(const Observable &c) {
    const std::size_t d = c.dim();
    auto v = Operator::zero(d);
    for (std::size_t k = 0; k < d; ++k)
        for (std::size_t s = 0; s < d; ++s) v(k, s) = std::conj(c.eigenket(k)[s]);
    return v;
}

}  // namespace tsqt
