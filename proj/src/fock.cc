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

#include "cvsq/fock.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <unsupported/Eigen/MatrixFunctions>

namespace cvsq {

namespace {

bool all_finite(const Mat &m) {
    for (Eigen::Index k = 0; k < m.size(); k++) {
        if (!std::isfinite(m.data()[k].real()) || !std::isfinite(m.data()[k].imag())) {
            return false;
        }
    }
    return true;
}

void require_square(const Mat &m, size_t dim, const char *what) {
    if (m.rows() != m.cols() || static_cast<size_t>(m.rows()) != dim) {
        std::stringstream ss;
        ss << what << ": expected a " << dim << "x" << dim << " matrix, got " << m.rows() << "x" << m.cols();
        fail(ErrorKind::DimensionMismatch, ss.str());
    }
}

void require_same_space(int c1, int m1, int c2, int m2, const char *what) {
    if (c1 != c2 || m1 != m2) {
        std::stringstream ss;
        ss << what << ": space (cutoff " << c1 << ", modes " << m1 << ") does not match (cutoff " << c2 << ", modes "
           << m2 << ")";
        fail(ErrorKind::DimensionMismatch, ss.str());
    }
}

/// In-place op application on a strided block layout [left][c][right].
void apply_blocks(const Mat &op, cplx *data, size_t left, int c, size_t right) {
    Mat tmp;
    for (size_t l = 0; l < left; l++) {
        Eigen::Map<Mat> block(data + l * c * right, static_cast<Eigen::Index>(right), c);
        tmp.noalias() = block * op.transpose();
        block = tmp;
    }
}

size_t int_pow(int base, int exp) {
    size_t r = 1;
    for (int k = 0; k < exp; k++) {
        r *= static_cast<size_t>(base);
    }
    return r;
}

}  // namespace

size_t space_dimension(int cutoff, int modes) {
    if (cutoff < 1 || modes < 1) {
        fail(ErrorKind::InvalidDimension, "cutoff and mode count must be positive");
    }
    double d = std::pow(static_cast<double>(cutoff), modes);
    if (d > 1e9) {
        fail(ErrorKind::MemoryGuard, "state dimension cutoff^modes exceeds 1e9");
    }
    return int_pow(cutoff, modes);
}

double PhaseSpaceGrid::x(int i) const {
    return resolution == 1 ? x_min : x_min + (x_max - x_min) * i / (resolution - 1);
}

double PhaseSpaceGrid::p(int j) const {
    return resolution == 1 ? p_min : p_min + (p_max - p_min) * j / (resolution - 1);
}

FockVector::FockVector(int cutoff, int modes, Vec amplitudes)
    : cutoff_(cutoff), modes_(modes), amplitudes_(std::move(amplitudes)) {
    size_t dim = space_dimension(cutoff, modes);
    if (static_cast<size_t>(amplitudes_.size()) != dim) {
        std::stringstream ss;
        ss << "amplitude count " << amplitudes_.size() << " differs from cutoff^modes = " << dim;
        fail(ErrorKind::DimensionMismatch, ss.str());
    }
}

FockVector FockVector::vacuum(int cutoff, int modes) {
    Vec v = Vec::Zero(static_cast<Eigen::Index>(space_dimension(cutoff, modes)));
    v[0] = 1;
    return FockVector(cutoff, modes, std::move(v));
}

FockVector FockVector::basis(int cutoff, const std::vector<int> &occupations) {
    int modes = static_cast<int>(occupations.size());
    Vec v = Vec::Zero(static_cast<Eigen::Index>(space_dimension(cutoff, modes)));
    size_t idx = 0;
    for (int n : occupations) {
        if (n < 0 || n >= cutoff) {
            fail(ErrorKind::InvalidArgument, "occupation outside the truncated basis");
        }
        idx = idx * cutoff + n;
    }
    v[static_cast<Eigen::Index>(idx)] = 1;
    return FockVector(cutoff, modes, std::move(v));
}

double FockVector::norm_squared() const {
    return amplitudes_.squaredNorm();
}

bool FockVector::is_normalized(double tol) const {
    return std::abs(norm_squared() - 1) <= tol;
}

FockVector FockVector::normalized() const {
    double n2 = norm_squared();
    if (!(n2 > 1e-300)) {
        fail(ErrorKind::DegenerateProjection, "cannot normalize a zero-norm state");
    }
    return FockVector(cutoff_, modes_, amplitudes_ / std::sqrt(n2));
}

DensityOperator::DensityOperator(int cutoff, int modes, Mat matrix, double hermitian_tol)
    : cutoff_(cutoff), modes_(modes), matrix_(std::move(matrix)) {
    require_square(matrix_, space_dimension(cutoff, modes), "density operator");
    double err = (matrix_ - matrix_.adjoint()).cwiseAbs().maxCoeff();
    if (err > hermitian_tol) {
        std::stringstream ss;
        ss << "density operator is not Hermitian (max deviation " << err << ")";
        fail(ErrorKind::InvalidArgument, ss.str());
    }
    matrix_ = (0.5 * (matrix_ + matrix_.adjoint())).eval();
}

DensityOperator DensityOperator::from_ket(const FockVector &psi) {
    return DensityOperator(psi.cutoff(), psi.modes(), psi.amplitudes() * psi.amplitudes().adjoint());
}

double DensityOperator::trace() const {
    return matrix_.trace().real();
}

DensityOperator DensityOperator::normalized() const {
    double t = trace();
    if (!(t > 1e-300)) {
        fail(ErrorKind::DegenerateProjection, "cannot normalize a zero-trace operator");
    }
    return DensityOperator(cutoff_, modes_, matrix_ / t);
}

DenseOperator::DenseOperator(int cutoff, int modes, Mat matrix, bool unitary)
    : cutoff_(cutoff), modes_(modes), matrix_(std::move(matrix)), unitary_(unitary) {
    require_square(matrix_, space_dimension(cutoff, modes), "operator");
}

DenseOperator DenseOperator::identity(int cutoff, int modes) {
    auto d = static_cast<Eigen::Index>(space_dimension(cutoff, modes));
    return DenseOperator(cutoff, modes, Mat::Identity(d, d), true);
}

bool DenseOperator::is_hermitian(double tol) const {
    return (matrix_ - matrix_.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

DenseOperator DenseOperator::adjoint() const {
    return DenseOperator(cutoff_, modes_, matrix_.adjoint(), unitary_);
}

DenseOperator DenseOperator::operator*(const DenseOperator &other) const {
    require_same_space(cutoff_, modes_, other.cutoff_, other.modes_, "operator product");
    return DenseOperator(cutoff_, modes_, matrix_ * other.matrix_, unitary_ && other.unitary_);
}

DenseOperator DenseOperator::operator+(const DenseOperator &other) const {
    require_same_space(cutoff_, modes_, other.cutoff_, other.modes_, "operator sum");
    return DenseOperator(cutoff_, modes_, matrix_ + other.matrix_);
}

DenseOperator DenseOperator::operator-(const DenseOperator &other) const {
    require_same_space(cutoff_, modes_, other.cutoff_, other.modes_, "operator difference");
    return DenseOperator(cutoff_, modes_, matrix_ - other.matrix_);
}

DenseOperator DenseOperator::scaled(cplx factor) const {
    return DenseOperator(cutoff_, modes_, matrix_ * factor, unitary_ && std::abs(std::abs(factor) - 1) < 1e-15);
}

FockVector DenseOperator::apply(const FockVector &psi) const {
    require_same_space(cutoff_, modes_, psi.cutoff(), psi.modes(), "operator application");
    return FockVector(cutoff_, modes_, matrix_ * psi.amplitudes());
}

std::pair<DenseOperator, DenseOperator> build_ladder(int cutoff) {
    if (cutoff < 2) {
        fail(ErrorKind::InvalidDimension, "ladder operators need cutoff >= 2");
    }
    Mat a = Mat::Zero(cutoff, cutoff);
    for (int n = 1; n < cutoff; n++) {
        a(n - 1, n) = std::sqrt(static_cast<double>(n));
    }
    Mat ad = a.adjoint();
    return {DenseOperator(cutoff, 1, std::move(a)), DenseOperator(cutoff, 1, std::move(ad))};
}

std::pair<DenseOperator, DenseOperator> quadratures(int cutoff) {
    auto [a, ad] = build_ladder(cutoff);
    const double s = 1 / std::sqrt(2.0);
    Mat x = (a.matrix() + ad.matrix()) * s;
    Mat p = (a.matrix() - ad.matrix()) * cplx(0, -s);
    return {DenseOperator(cutoff, 1, std::move(x)), DenseOperator(cutoff, 1, std::move(p))};
}

DenseOperator number_operator(int cutoff) {
    Mat n = Mat::Zero(cutoff, cutoff);
    for (int k = 0; k < cutoff; k++) {
        n(k, k) = k;
    }
    return DenseOperator(cutoff, 1, std::move(n));
}

Mat matrix_exponential(const Mat &a, bool *unitary) {
    if (a.rows() != a.cols()) {
        fail(ErrorKind::DimensionMismatch, "matrix exponential needs a square matrix");
    }
    if (!all_finite(a)) {
        fail(ErrorKind::Numeric, "matrix exponential input has non-finite entries");
    }
    if (unitary) {
        *unitary = false;
    }
    if (a.size() == 0) {
        return a;
    }
    double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
    double anti = (a + a.adjoint()).cwiseAbs().maxCoeff();
    if (anti <= 1e-14 * scale) {
        // exp(A) with A = -iH.
        Mat h = cplx(0, 1) * a;
        h = (0.5 * (h + h.adjoint())).eval();
        HermitianSpectrum spec(h);
        if (unitary) {
            *unitary = true;
        }
        return spec.exp_i(-1.0);
    }
    double herm = (a - a.adjoint()).cwiseAbs().maxCoeff();
    if (herm <= 1e-14 * scale) {
        HermitianSpectrum spec(0.5 * (a + a.adjoint()));
        return spec.function([](double v) {
            return cplx(std::exp(v), 0);
        });
    }
    return a.exp();
}

DenseOperator matrix_exponential(const DenseOperator &a) {
    bool unitary = false;
    Mat e = matrix_exponential(a.matrix(), &unitary);
    return DenseOperator(a.cutoff(), a.modes(), std::move(e), unitary);
}

cplx expectation(const FockVector &psi, const DenseOperator &m) {
    require_same_space(psi.cutoff(), psi.modes(), m.cutoff(), m.modes(), "expectation");
    return psi.amplitudes().dot(m.matrix() * psi.amplitudes());
}

cplx expectation(const DensityOperator &rho, const DenseOperator &m) {
    require_same_space(rho.cutoff(), rho.modes(), m.cutoff(), m.modes(), "expectation");
    return (m.matrix().transpose().cwiseProduct(rho.matrix())).sum();
}

namespace {

void require_hermitian_observable(const DenseOperator &m) {
    double scale = std::max(1.0, m.matrix().cwiseAbs().maxCoeff());
    if (!m.is_hermitian(1e-10 * scale)) {
        fail(ErrorKind::InvalidArgument, "variance requires a Hermitian observable");
    }
}

}  // namespace

double variance(const FockVector &psi, const DenseOperator &m) {
    require_same_space(psi.cutoff(), psi.modes(), m.cutoff(), m.modes(), "variance");
    require_hermitian_observable(m);
    Vec mv = m.matrix() * psi.amplitudes();
    double mean = psi.amplitudes().dot(mv).real();
    return mv.squaredNorm() - mean * mean;
}

double variance(const DensityOperator &rho, const DenseOperator &m) {
    require_same_space(rho.cutoff(), rho.modes(), m.cutoff(), m.modes(), "variance");
    require_hermitian_observable(m);
    Mat mr = m.matrix() * rho.matrix();
    double mean = mr.trace().real();
    double second = (m.matrix().transpose().cwiseProduct(mr)).sum().real();
    return second - mean * mean;
}

double fidelity(const FockVector &a, const FockVector &b) {
    require_same_space(a.cutoff(), a.modes(), b.cutoff(), b.modes(), "fidelity");
    if (!a.is_normalized(1e-6) || !b.is_normalized(1e-6)) {
        fail(ErrorKind::InvalidArgument, "fidelity expects normalized states");
    }
    return std::min(1.0, std::norm(a.amplitudes().dot(b.amplitudes())));
}

double fidelity(const DensityOperator &rho, const FockVector &psi) {
    require_same_space(rho.cutoff(), rho.modes(), psi.cutoff(), psi.modes(), "fidelity");
    return std::min(1.0, psi.amplitudes().dot(rho.matrix() * psi.amplitudes()).real());
}

double fidelity(const DensityOperator &rho, const DensityOperator &sigma) {
    require_same_space(rho.cutoff(), rho.modes(), sigma.cutoff(), sigma.modes(), "fidelity");
    HermitianSpectrum s(rho.matrix());
    Mat root = s.function([](double v) { return cplx(std::sqrt(std::max(v, 0.0)), 0); });
    Mat inner = root * sigma.matrix() * root;
    inner = 0.5 * (inner + inner.adjoint());
    Eigen::SelfAdjointEigenSolver<Mat> es(inner, Eigen::EigenvaluesOnly);
    double t = 0;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); i++) {
        t += std::sqrt(std::max(es.eigenvalues()[i], 0.0));
    }
    return std::min(1.0, t * t);
}

Mat displacement_elements(cplx alpha, int rows, int cols) {
    Mat d = Mat::Zero(rows, cols);
    const double x = std::norm(alpha);
    if (x == 0) {
        for (int k = 0; k < std::min(rows, cols); k++) {
            d(k, k) = 1;
        }
        return d;
    }
    const double theta = std::arg(alpha);
    const double log_x = std::log(x);
    const double big = 1e120;
    const double log_big = std::log(big);
    int kmax = std::max(rows, cols);
    for (int k = 0; k < kmax; k++) {
        // Normalized associated-Laguerre recurrence along the k-th diagonal. Values are carried
        // as (scaled value, log scale) so neither end of the diagonal under- or overflows.
        int len_lower = std::min(cols, rows - k);
        int len_upper = std::min(rows, cols - k);
        int len = std::max(len_lower, len_upper);
        if (len <= 0) {
            continue;
        }
        cplx ph_lower = std::polar(1.0, k * theta);
        cplx ph_upper = std::polar(1.0, -k * theta) * ((k % 2) ? -1.0 : 1.0);
        double log_scale = -x / 2 + 0.5 * k * log_x - 0.5 * std::lgamma(k + 1.0);
        double prev = 0;
        double cur = 1;
        for (int n = 0; n < len; n++) {
            if (n == 1) {
                prev = cur;
                cur = (1 + k - x) / std::sqrt(1.0 + k) * prev;
            } else if (n > 1) {
                double next = ((2.0 * (n - 1) + 1 + k - x) * cur - std::sqrt((n - 1.0) * (n - 1.0 + k)) * prev) /
                              std::sqrt(static_cast<double>(n) * (n + k));
                prev = cur;
                cur = next;
            }
            double mag = std::abs(cur);
            if (mag > big) {
                cur /= big;
                prev /= big;
                log_scale += log_big;
            } else if (mag < 1 / big && std::abs(prev) < 1 / big && mag > 0) {
                cur *= big;
                prev *= big;
                log_scale -= log_big;
            }
            double g = cur == 0 ? 0.0 : std::copysign(std::exp(std::log(std::abs(cur)) + log_scale), cur);
            if (n < len_lower) {
                d(n + k, n) = g * ph_lower;
            }
            if (k > 0 && n < len_upper) {
                d(n, n + k) = g * ph_upper;
            }
        }
    }
    return d;
}

HermitianSpectrum::HermitianSpectrum(const Mat &hermitian) {
    if (!all_finite(hermitian)) {
        fail(ErrorKind::Numeric, "spectral decomposition input has non-finite entries");
    }
    Eigen::SelfAdjointEigenSolver<Mat> es(hermitian);
    if (es.info() != Eigen::Success) {
        fail(ErrorKind::Numeric, "Hermitian eigendecomposition failed");
    }
    values_ = es.eigenvalues();
    vectors_ = es.eigenvectors();
}

Mat HermitianSpectrum::function(const std::function<cplx(double)> &f) const {
    Vec diag(values_.size());
    for (Eigen::Index k = 0; k < values_.size(); k++) {
        diag[k] = f(values_[k]);
    }
    return vectors_ * diag.asDiagonal() * vectors_.adjoint();
}

Mat HermitianSpectrum::exp_i(double t) const {
    return function([t](double v) {
        return std::polar(1.0, t * v);
    });
}

Vec HermitianSpectrum::apply_exp_i(double t, const Vec &v) const {
    Vec c = vectors_.adjoint() * v;
    for (Eigen::Index k = 0; k < c.size(); k++) {
        c[k] *= std::polar(1.0, t * values_[k]);
    }
    return vectors_ * c;
}

Mat kron(const Mat &a, const Mat &b) {
    Mat r(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); i++) {
        for (Eigen::Index j = 0; j < a.cols(); j++) {
            r.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return r;
}

DenseOperator kron(const DenseOperator &a, const DenseOperator &b) {
    if (a.cutoff() != b.cutoff()) {
        fail(ErrorKind::DimensionMismatch, "tensor product of operators with different cutoffs");
    }
    return DenseOperator(a.cutoff(), a.modes() + b.modes(), kron(a.matrix(), b.matrix()),
                         a.is_unitary() && b.is_unitary());
}

DenseOperator embed(const DenseOperator &single, int mode, int modes) {
    if (single.modes() != 1) {
        fail(ErrorKind::DimensionMismatch, "embed expects a single-mode operator");
    }
    if (mode < 0 || mode >= modes) {
        fail(ErrorKind::InvalidArgument, "mode index out of range");
    }
    int c = single.cutoff();
    auto left = static_cast<Eigen::Index>(int_pow(c, mode));
    auto right = static_cast<Eigen::Index>(int_pow(c, modes - mode - 1));
    Mat m = kron(kron(Mat::Identity(left, left), single.matrix()), Mat::Identity(right, right));
    return DenseOperator(c, modes, std::move(m), single.is_unitary());
}

void apply_to_mode(const Mat &op, int mode, int cutoff, int modes, Vec &v) {
    if (op.rows() != cutoff || op.cols() != cutoff || mode < 0 || mode >= modes ||
        static_cast<size_t>(v.size()) != space_dimension(cutoff, modes)) {
        fail(ErrorKind::DimensionMismatch, "apply_to_mode: inconsistent dimensions");
    }
    apply_blocks(op, v.data(), int_pow(cutoff, mode), cutoff, int_pow(cutoff, modes - mode - 1));
}

void conjugate_mode(const Mat &op, int mode, int cutoff, int modes, Mat &rho) {
    size_t d = space_dimension(cutoff, modes);
    if (op.rows() != cutoff || op.cols() != cutoff || mode < 0 || mode >= modes ||
        static_cast<size_t>(rho.rows()) != d || static_cast<size_t>(rho.cols()) != d) {
        fail(ErrorKind::DimensionMismatch, "conjugate_mode: inconsistent dimensions");
    }
    // Column-major storage: columns are kets, so one pass applies op from the left; after taking
    // the adjoint the same pass applies it from the other side.
    size_t left = d * int_pow(cutoff, mode);
    size_t right = int_pow(cutoff, modes - mode - 1);
    apply_blocks(op, rho.data(), left, cutoff, right);
    rho.adjointInPlace();
    apply_blocks(op, rho.data(), left, cutoff, right);
    rho.adjointInPlace();
}

Vec truncate_levels(const Vec &v, int cutoff, int modes, int levels) {
    if (levels > cutoff || levels < 1) {
        fail(ErrorKind::InvalidArgument, "truncate_levels: bad level count");
    }
    size_t d = space_dimension(levels, modes);
    Vec out(static_cast<Eigen::Index>(d));
    std::vector<int> occ(modes, 0);
    for (size_t k = 0; k < d; k++) {
        size_t rem = k;
        size_t src = 0;
        for (int m = modes - 1; m >= 0; m--) {
            occ[m] = static_cast<int>(rem % levels);
            rem /= levels;
        }
        for (int m = 0; m < modes; m++) {
            src = src * cutoff + occ[m];
        }
        out[static_cast<Eigen::Index>(k)] = v[static_cast<Eigen::Index>(src)];
    }
    return out;
}

namespace {

std::vector<Eigen::Index> level_map(int cutoff, int modes, int levels) {
    size_t d = space_dimension(levels, modes);
    std::vector<Eigen::Index> map(d);
    for (size_t k = 0; k < d; k++) {
        size_t rem = k;
        std::vector<int> occ(modes);
        for (int m = modes - 1; m >= 0; m--) {
            occ[m] = static_cast<int>(rem % levels);
            rem /= levels;
        }
        size_t src = 0;
        for (int m = 0; m < modes; m++) {
            src = src * cutoff + occ[m];
        }
        map[k] = static_cast<Eigen::Index>(src);
    }
    return map;
}

}  // namespace

Mat truncate_levels(const Mat &m, int cutoff, int modes, int levels) {
    if (levels > cutoff || levels < 1) {
        fail(ErrorKind::InvalidArgument, "truncate_levels: bad level count");
    }
    auto map = level_map(cutoff, modes, levels);
    auto d = static_cast<Eigen::Index>(map.size());
    Mat out(d, d);
    for (Eigen::Index j = 0; j < d; j++) {
        for (Eigen::Index i = 0; i < d; i++) {
            out(i, j) = m(map[i], map[j]);
        }
    }
    return out;
}

Vec pad_levels(const Vec &v, int cutoff, int modes, int levels) {
    if (levels < cutoff) {
        fail(ErrorKind::InvalidArgument, "pad_levels: target smaller than source");
    }
    auto map = level_map(levels, modes, cutoff);
    Vec out = Vec::Zero(static_cast<Eigen::Index>(space_dimension(levels, modes)));
    for (size_t k = 0; k < map.size(); k++) {
        out[map[k]] = v[static_cast<Eigen::Index>(k)];
    }
    return out;
}

double low_block_max_error(const Mat &a, const Mat &b, int cutoff, int modes, int levels) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        fail(ErrorKind::DimensionMismatch, "low_block_max_error: shape mismatch");
    }
    auto map = level_map(cutoff, modes, std::min(levels, cutoff));
    double err = 0;
    for (auto j : map) {
        for (auto i : map) {
            err = std::max(err, std::abs(a(i, j) - b(i, j)));
        }
    }
    return err;
}

Mat reduced_density(const Vec &psi, int cutoff, int keep_mode) {
    if (static_cast<size_t>(psi.size()) != space_dimension(cutoff, 2) || keep_mode < 0 || keep_mode > 1) {
        fail(ErrorKind::DimensionMismatch, "reduced_density expects a two-mode ket");
    }
    Eigen::Map<const Mat> x(psi.data(), cutoff, cutoff);  // x(n2, n1)
    if (keep_mode == 0) {
        return (x.adjoint() * x).transpose();
    }
    return x * x.adjoint();
}

Mat reduced_density(const Mat &rho, int cutoff, int keep_mode) {
    if (static_cast<size_t>(rho.rows()) != space_dimension(cutoff, 2) || keep_mode < 0 || keep_mode > 1) {
        fail(ErrorKind::DimensionMismatch, "reduced_density expects a two-mode operator");
    }
    Mat out = Mat::Zero(cutoff, cutoff);
    for (int a = 0; a < cutoff; a++) {
        for (int b = 0; b < cutoff; b++) {
            cplx s = 0;
            for (int t = 0; t < cutoff; t++) {
                if (keep_mode == 0) {
                    s += rho(a * cutoff + t, b * cutoff + t);
                } else {
                    s += rho(t * cutoff + a, t * cutoff + b);
                }
            }
            out(a, b) = s;
        }
    }
    return out;
}

namespace {

int wigner_rows(int cutoff, double beta_abs) {
    double s = std::sqrt(static_cast<double>(cutoff)) + beta_abs;
    return cutoff + static_cast<int>(std::ceil(s * s + 8 * s + 20));
}

double parity_sum(const Vec &v) {
    double w = 0;
    for (Eigen::Index n = 0; n < v.size(); n++) {
        w += ((n % 2) ? -1.0 : 1.0) * std::norm(v[n]);
    }
    return w;
}

PhaseSpaceGrid empty_grid(const WignerGridSpec &spec) {
    if (spec.resolution < 1 || !(spec.x_max >= spec.x_min) || !(spec.p_max >= spec.p_min)) {
        fail(ErrorKind::InvalidArgument, "invalid Wigner grid");
    }
    PhaseSpaceGrid g;
    g.x_min = spec.x_min;
    g.x_max = spec.x_max;
    g.p_min = spec.p_min;
    g.p_max = spec.p_max;
    g.resolution = spec.resolution;
    g.values.assign(static_cast<size_t>(spec.resolution) * spec.resolution, 0.0);
    return g;
}

PhaseSpaceGrid wigner_of_ensemble(int cutoff, const std::vector<std::pair<double, Vec>> &ensemble,
                                  const WignerGridSpec &spec) {
    PhaseSpaceGrid g = empty_grid(spec);
    for (int i = 0; i < g.resolution; i++) {
        for (int j = 0; j < g.resolution; j++) {
            cplx beta(g.x(i) / std::sqrt(2.0), g.p(j) / std::sqrt(2.0));
            int rows = wigner_rows(cutoff, std::abs(beta));
            Mat d = displacement_elements(-beta, rows, cutoff);
            double w = 0;
            for (const auto &[weight, v] : ensemble) {
                w += weight * parity_sum(d * v);
            }
            g.values[static_cast<size_t>(i) * g.resolution + j] = w / M_PI;
        }
    }
    return g;
}

}  // namespace

PhaseSpaceGrid wigner(const FockVector &psi, const WignerGridSpec &spec) {
    if (psi.modes() != 1) {
        fail(ErrorKind::Unsupported, "Wigner grids are defined for single-mode states only");
    }
    return wigner_of_ensemble(psi.cutoff(), {{1.0, psi.amplitudes()}}, spec);
}

PhaseSpaceGrid wigner(const DensityOperator &rho, const WignerGridSpec &spec) {
    if (rho.modes() != 1) {
        fail(ErrorKind::Unsupported, "Wigner grids are defined for single-mode states only");
    }
    HermitianSpectrum s(rho.matrix());
    std::vector<std::pair<double, Vec>> ensemble;
    double scale = std::max(1e-300, s.values().cwiseAbs().maxCoeff());
    for (Eigen::Index k = 0; k < s.values().size(); k++) {
        if (std::abs(s.values()[k]) > 1e-15 * scale) {
            ensemble.emplace_back(s.values()[k], s.vectors().col(k));
        }
    }
    return wigner_of_ensemble(rho.cutoff(), ensemble, spec);
}

}  // namespace cvsq
