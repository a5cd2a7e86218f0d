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


/**
 * @file qlinalg.hpp
 * @brief Dense complex linear algebra on small Hilbert spaces.
 *
 * Kets are unit-norm amplitude vectors, operators are square dense matrices
 * stored row-major. Dimensions in this library are tiny (2 to ~16), so
 * everything is a plain loop over a std::vector; there is no expression
 * machinery and no sparse storage.
 *
 * Global phase is never removed. Ray equality is the caller's business and is
 * normally tested through |inner(u, v)| == 1.
 */

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include "tsqt/error.hpp"

namespace tsqt {

using Amplitude = std::complex<double>;

namespace tol {
/// Unit-norm tolerance for kets built by normalize().
inline constexpr double kNormalize = 1e-12;
/// Norm below which a vector cannot be normalized.
inline constexpr double kZeroVector = 1e-12;
/// Default algebraic tolerance (orthonormality, unitarity).
inline constexpr double kAlgebra = 1e-10;
}  // namespace tol

namespace detail {

inline bool is_finite(const Amplitude &z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

inline void require_finite(std::span<const Amplitude> values, const char *what) {
    for (const auto &z : values) {
        if (!is_finite(z)) throw Error(ErrorKind::InvalidArgument, std::string(what) + " has a non-finite entry");
    }
}

inline void require_same_dim(std::size_t a, std::size_t b, const char *op) {
    if (a != b) {
        throw Error(ErrorKind::DimensionMismatch,
                    std::string(op) + ": dimension " + std::to_string(a) + " vs " + std::to_string(b));
    }
}

inline double squared_norm(std::span<const Amplitude> v) {
    double s = 0.0;
    for (const auto &z : v) s += std::norm(z);
    return s;
}

}  // namespace detail

/// A pure state: a unit-norm vector of amplitudes. Only normalize(),
/// Ket::basis() and Ket::from_unit() can produce one.
class Ket {
  public:
    /// k-th computational ("path") basis ket of dimension `dim`.
    static Ket basis(std::size_t dim, std::size_t k) {
        if (dim == 0) throw Error(ErrorKind::InvalidArgument, "ket dimension must be positive");
        if (k >= dim) throw Error(ErrorKind::IndexOutOfRange, "basis index " + std::to_string(k));
        std::vector<Amplitude> amps(dim);
        amps[k] = 1.0;
        return Ket(std::move(amps));
    }

    /// Wraps amplitudes that are already unit norm (within `tolerance`)
    /// without rescaling them.
    static Ket from_unit(std::vector<Amplitude> amps, double tolerance = tol::kAlgebra) {
        if (amps.empty()) throw Error(ErrorKind::InvalidArgument, "ket dimension must be positive");
        detail::require_finite(amps, "ket");
        const double n2 = detail::squared_norm(amps);
        if (std::abs(n2 - 1.0) > tolerance) {
            throw Error(ErrorKind::InvalidArgument, "ket is not unit norm (|v|^2 = " + std::to_string(n2) + ")");
        }
        return Ket(std::move(amps));
    }

    std::size_t dim() const noexcept { return amps_.size(); }
    const Amplitude &operator[](std::size_t k) const { return amps_[k]; }
    std::span<const Amplitude> amplitudes() const noexcept { return amps_; }

    friend bool operator==(const Ket &, const Ket &) = default;

  private:
    explicit Ket(std::vector<Amplitude> amps) : amps_(std::move(amps)) {}
    friend Ket normalize(std::span<const Amplitude> raw);

    std::vector<Amplitude> amps_;
};

/// Returns raw / |raw|. Throws ZeroVector when |raw| < 1e-12.
inline Ket normalize(std::span<const Amplitude> raw) {
    if (raw.empty()) throw Error(ErrorKind::InvalidArgument, "ket dimension must be positive");
    detail::require_finite(raw, "vector");
    const double n = std::sqrt(detail::squared_norm(raw));
    if (n < tol::kZeroVector) throw Error(ErrorKind::ZeroVector, "cannot normalize a vector of norm " + std::to_string(n));
    std::vector<Amplitude> amps(raw.begin(), raw.end());
    for (auto &z : amps) z /= n;
    return Ket(std::move(amps));
}

inline Ket normalize(std::initializer_list<Amplitude> raw) {
    return normalize(std::span<const Amplitude>(raw.begin(), raw.size()));
}

/// Square dense complex matrix, row-major.
class Operator {
  public:
    static Operator identity(std::size_t dim) {
        Operator op(dim);
        for (std::size_t k = 0; k < dim; ++k) op(k, k) = 1.0;
        return op;
    }

    static Operator zero(std::size_t dim) { return Operator(dim); }

    static Operator from_rows(const std::vector<std::vector<Amplitude>> &rows) {
        const std::size_t dim = rows.size();
        Operator op(dim);
        for (std::size_t r = 0; r < dim; ++r) {
            if (rows[r].size() != dim) throw Error(ErrorKind::DimensionMismatch, "operator must be square");
            for (std::size_t c = 0; c < dim; ++c) op(r, c) = rows[r][c];
        }
        detail::require_finite(op.entries_, "operator");
        return op;
    }

    static Operator diagonal(std::span<const Amplitude> diag) {
        Operator op(diag.size());
        for (std::size_t k = 0; k < diag.size(); ++k) op(k, k) = diag[k];
        detail::require_finite(op.entries_, "operator");
        return op;
    }

    std::size_t dim() const noexcept { return dim_; }
    Amplitude &operator()(std::size_t r, std::size_t c) { return entries_[r * dim_ + c]; }
    const Amplitude &operator()(std::size_t r, std::size_t c) const { return entries_[r * dim_ + c]; }
    std::span<const Amplitude> entries() const noexcept { return entries_; }

    friend bool operator==(const Operator &, const Operator &) = default;

  private:
    explicit Operator(std::size_t dim) : dim_(dim), entries_(dim * dim) {
        if (dim == 0) throw Error(ErrorKind::InvalidArgument, "operator dimension must be positive");
    }

    std::size_t dim_;
    std::vector<Amplitude> entries_;
};

/// <u|v>, antilinear in the first argument.
inline Amplitude inner(const Ket &u, const Ket &v) {
    detail::require_same_dim(u.dim(), v.dim(), "inner");
    Amplitude s = 0.0;
    for (std::size_t k = 0; k < u.dim(); ++k) s += std::conj(u[k]) * v[k];
    return s;
}

/// Matrix-vector product on raw amplitudes; the result is not renormalized.
inline std::vector<Amplitude> apply_raw(const Operator &op, std::span<const Amplitude> v) {
    detail::require_same_dim(op.dim(), v.size(), "apply");
    std::vector<Amplitude> out(v.size());
    for (std::size_t r = 0; r < op.dim(); ++r) {
        Amplitude s = 0.0;
        for (std::size_t c = 0; c < op.dim(); ++c) s += op(r, c) * v[c];
        out[r] = s;
    }
    return out;
}

/// U|v>. For a unitary U the norm is preserved to rounding, so the result is
/// wrapped without rescaling; a non-unitary U is rejected by from_unit.
inline Ket apply(const Operator &op, const Ket &v) {
    return Ket::from_unit(apply_raw(op, v.amplitudes()), 1e-8);
}

inline Operator adjoint(const Operator &op) {
    auto out = Operator::identity(op.dim());
    for (std::size_t r = 0; r < op.dim(); ++r)
        for (std::size_t c = 0; c < op.dim(); ++c) out(r, c) = std::conj(op(c, r));
    return out;
}

inline Operator multiply(const Operator &lhs, const Operator &rhs) {
    detail::require_same_dim(lhs.dim(), rhs.dim(), "multiply");
    const std::size_t d = lhs.dim();
    auto out = Operator::zero(d);
    for (std::size_t r = 0; r < d; ++r)
        for (std::size_t k = 0; k < d; ++k) {
            const Amplitude l = lhs(r, k);
            for (std::size_t c = 0; c < d; ++c) out(r, c) += l * rhs(k, c);
        }
    return out;
}

/// max_{r,c} |lhs(r,c) - rhs(r,c)|
inline double max_abs_diff(const Operator &lhs, const Operator &rhs) {
    detail::require_same_dim(lhs.dim(), rhs.dim(), "max_abs_diff");
    double m = 0.0;
    for (std::size_t k = 0; k < lhs.entries().size(); ++k) m = std::max(m, std::abs(lhs.entries()[k] - rhs.entries()[k]));
    return m;
}

/// True iff every entry of U^dagger U is within `tolerance` of the identity.
inline bool is_unitary(const Operator &op, double tolerance = tol::kAlgebra) {
    if (!(tolerance > 0.0)) throw Error(ErrorKind::InvalidArgument, "is_unitary tolerance must be positive");
    return max_abs_diff(multiply(adjoint(op), op), Operator::identity(op.dim())) <= tolerance;
}

/// |<u|v>|^2
inline double fidelity(const Ket &u, const Ket &v) { return std::norm(inner(u, v)); }

/// Same ray: |<u|v>| == 1 within `tolerance`.
inline bool same_ray(const Ket &u, const Ket &v, double tolerance = 1e-9) {
    return std::abs(std::abs(inner(u, v)) - 1.0) <= tolerance;
}

}  // namespace tsqt
