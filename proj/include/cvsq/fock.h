// Copyright 2026 The cvsq Authors
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

#ifndef CVSQ_FOCK_H
#define CVSQ_FOCK_H

#include <Eigen/Dense>
#include <complex>
#include <cstddef>
#include <functional>
#include <utility>
#include <vector>

#include "cvsq/error.h"

namespace cvsq {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using RealVec = Eigen::VectorXd;

/// cutoff^modes, with an overflow and sanity guard.
size_t space_dimension(int cutoff, int modes);

/// Number of leading levels per mode treated as free of truncation artifacts.
inline int low_block_levels(int cutoff) {
    return (2 * cutoff) / 3;
}

/// Pure state over a truncated number basis. Mode-major ordering:
/// index = n_1 * cutoff^(modes-1) + ... + n_modes.
class FockVector {
   public:
    FockVector(int cutoff, int modes, Vec amplitudes);

    static FockVector vacuum(int cutoff, int modes = 1);
    static FockVector basis(int cutoff, const std::vector<int> &occupations);

    int cutoff() const {
        return cutoff_;
    }
    int modes() const {
        return modes_;
    }
    size_t dimension() const {
        return static_cast<size_t>(amplitudes_.size());
    }
    const Vec &amplitudes() const {
        return amplitudes_;
    }
    cplx operator[](size_t k) const {
        return amplitudes_[static_cast<Eigen::Index>(k)];
    }

    double norm_squared() const;
    bool is_normalized(double tol = 1e-12) const;
    /// Throws DegenerateProjection when the norm vanishes.
    FockVector normalized() const;

   private:
    int cutoff_;
    int modes_;
    Vec amplitudes_;
};

/// Hermitian positive operator; trace may be below one after a projection.
class DensityOperator {
   public:
    DensityOperator(int cutoff, int modes, Mat matrix, double hermitian_tol = 1e-10);

    static DensityOperator from_ket(const FockVector &psi);

    int cutoff() const {
        return cutoff_;
    }
    int modes() const {
        return modes_;
    }
    size_t dimension() const {
        return static_cast<size_t>(matrix_.rows());
    }
    const Mat &matrix() const {
        return matrix_;
    }
    double trace() const;
    DensityOperator normalized() const;

   private:
    int cutoff_;
    int modes_;
    Mat matrix_;
};

class DenseOperator {
   public:
    DenseOperator(int cutoff, int modes, Mat matrix, bool unitary = false);

    static DenseOperator identity(int cutoff, int modes = 1);

    int cutoff() const {
        return cutoff_;
    }
    int modes() const {
        return modes_;
    }
    size_t dimension() const {
        return static_cast<size_t>(matrix_.rows());
    }
    const Mat &matrix() const {
        return matrix_;
    }
    bool is_unitary() const {
        return unitary_;
    }
    bool is_hermitian(double tol = 1e-10) const;

    DenseOperator adjoint() const;
    DenseOperator operator*(const DenseOperator &other) const;
    DenseOperator operator+(const DenseOperator &other) const;
    DenseOperator operator-(const DenseOperator &other) const;
    DenseOperator scaled(cplx factor) const;
    FockVector apply(const FockVector &psi) const;

   private:
    int cutoff_;
    int modes_;
    Mat matrix_;
    bool unitary_;
};

struct WignerGridSpec {
    double x_min = -6;
    double x_max = 6;
    double p_min = -6;
    double p_max = 6;
    int resolution = 121;
};

struct PhaseSpaceGrid {
    double x_min = 0;
    double x_max = 0;
    double p_min = 0;
    double p_max = 0;
    int resolution = 0;
    /// values[i * resolution + j] holds W(x_i, p_j).
    std::vector<double> values;

    double x(int i) const;
    double p(int j) const;
    double at(int i, int j) const {
        return values[static_cast<size_t>(i) * resolution + j];
    }
};

std::pair<DenseOperator, DenseOperator> build_ladder(int cutoff);
std::pair<DenseOperator, DenseOperator> quadratures(int cutoff);
DenseOperator number_operator(int cutoff);

/// exp(A). Anti-Hermitian and Hermitian inputs go through an eigendecomposition, so the result
/// of an anti-Hermitian input is unitary to rounding; everything else uses Pade scaling and
/// squaring.
DenseOperator matrix_exponential(const DenseOperator &a);
Mat matrix_exponential(const Mat &a, bool *unitary = nullptr);

cplx expectation(const FockVector &psi, const DenseOperator &m);
cplx expectation(const DensityOperator &rho, const DenseOperator &m);
double variance(const FockVector &psi, const DenseOperator &m);
double variance(const DensityOperator &rho, const DenseOperator &m);

double fidelity(const FockVector &a, const FockVector &b);
/// <psi|rho|psi> for a normalized rho.
double fidelity(const DensityOperator &rho, const FockVector &psi);
/// Uhlmann fidelity (Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2 of normalized density operators.
double fidelity(const DensityOperator &rho, const DensityOperator &sigma);

PhaseSpaceGrid wigner(const FockVector &psi, const WignerGridSpec &spec);
PhaseSpaceGrid wigner(const DensityOperator &rho, const WignerGridSpec &spec);

/// Exact matrix elements <m|D(alpha)|n> for m < rows, n < cols, i.e. the compression of the
/// untruncated displacement rather than the exponential of truncated ladders.
Mat displacement_elements(cplx alpha, int rows, int cols);

/// Eigendecomposition of a Hermitian matrix, reused for a family of matrix functions.
class HermitianSpectrum {
   public:
    explicit HermitianSpectrum(const Mat &hermitian);

    const RealVec &values() const {
        return values_;
    }
    const Mat &vectors() const {
        return vectors_;
    }
    Mat function(const std::function<cplx(double)> &f) const;
    /// exp(i t H).
    Mat exp_i(double t) const;
    Vec apply_exp_i(double t, const Vec &v) const;

   private:
    RealVec values_;
    Mat vectors_;
};

DenseOperator kron(const DenseOperator &a, const DenseOperator &b);
Mat kron(const Mat &a, const Mat &b);
/// Lifts a single-mode operator onto `mode` of a `modes`-mode register.
DenseOperator embed(const DenseOperator &single, int mode, int modes);

/// Applies a single-mode matrix to one mode of a mode-major vector in place.
void apply_to_mode(const Mat &op, int mode, int cutoff, int modes, Vec &v);
/// M rho M^dagger with M acting on one mode.
void conjugate_mode(const Mat &op, int mode, int cutoff, int modes, Mat &rho);

/// Keeps the leading `levels` per mode.
Vec truncate_levels(const Vec &v, int cutoff, int modes, int levels);
Mat truncate_levels(const Mat &m, int cutoff, int modes, int levels);
/// Zero-pads every mode from `cutoff` to `levels` >= cutoff.
Vec pad_levels(const Vec &v, int cutoff, int modes, int levels);

/// max |a_ij - b_ij| over indices whose per-mode occupations are all below `levels`.
double low_block_max_error(const Mat &a, const Mat &b, int cutoff, int modes, int levels);

/// Reduced state of one mode of a two-mode ket or density matrix.
Mat reduced_density(const Vec &psi, int cutoff, int keep_mode);
Mat reduced_density(const Mat &rho, int cutoff, int keep_mode);

}  // namespace cvsq

#endif
