#include "esr/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace esr {

CVector CVector::basis(std::size_t dim, std::size_t index) {
    if (index >= dim) throw std::invalid_argument("basis index out of range");
    CVector v(dim);
    v[index] = 1.0;
    return v;
}

double CVector::norm() const {
    double s = 0.0;
    for (const cplx& e : entries_) s += std::norm(e);
    return std::sqrt(s);
}

CVector CVector::normalized() const {
    const double n = norm();
    if (n <= 1e-300) throw std::domain_error("cannot normalize a zero vector");
    CVector v = *this;
    for (cplx& e : v.entries_) e /= n;
    return v;
}

cplx CVector::inner(const CVector& other) const {
    if (dim() != other.dim()) throw std::invalid_argument("inner: dimension mismatch");
    cplx s = 0.0;
    for (std::size_t i = 0; i < dim(); ++i) s += std::conj(entries_[i]) * other.entries_[i];
    return s;
}

CVector& CVector::operator+=(const CVector& o) {
    if (dim() != o.dim()) throw std::invalid_argument("vector add: dimension mismatch");
    for (std::size_t i = 0; i < dim(); ++i) entries_[i] += o.entries_[i];
    return *this;
}

CVector& CVector::operator-=(const CVector& o) {
    if (dim() != o.dim()) throw std::invalid_argument("vector sub: dimension mismatch");
    for (std::size_t i = 0; i < dim(); ++i) entries_[i] -= o.entries_[i];
    return *this;
}

CVector& CVector::operator*=(cplx s) {
    for (cplx& e : entries_) e *= s;
    return *this;
}

CMatrix::CMatrix(std::size_t rows, std::size_t cols, std::vector<cplx> entries)
    : rows_(rows), cols_(cols), entries_(std::move(entries)) {
    if (rows_ * cols_ != entries_.size())
        throw std::invalid_argument("matrix: rows*cols != number of entries");
}

CMatrix CMatrix::identity(std::size_t n) {
    CMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

CMatrix CMatrix::zero(std::size_t rows, std::size_t cols) { return CMatrix(rows, cols); }

CMatrix CMatrix::adjoint() const {
    CMatrix m(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) m(j, i) = std::conj((*this)(i, j));
    return m;
}

cplx CMatrix::trace() const {
    if (rows_ != cols_) throw std::invalid_argument("trace: matrix not square");
    cplx t = 0.0;
    for (std::size_t i = 0; i < rows_; ++i) t += (*this)(i, i);
    return t;
}

double CMatrix::max_abs() const {
    double m = 0.0;
    for (const cplx& e : entries_) m = std::max(m, std::abs(e));
    return m;
}

bool CMatrix::is_hermitian(double tol) const {
    if (rows_ != cols_) return false;
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = i; j < cols_; ++j)
            if (std::abs((*this)(i, j) - std::conj((*this)(j, i))) > tol) return false;
    return true;
}

CMatrix& CMatrix::operator+=(const CMatrix& o) {
    if (rows_ != o.rows_ || cols_ != o.cols_)
        throw std::invalid_argument("matrix add: shape mismatch");
    for (std::size_t i = 0; i < entries_.size(); ++i) entries_[i] += o.entries_[i];
    return *this;
}

CMatrix& CMatrix::operator-=(const CMatrix& o) {
    if (rows_ != o.rows_ || cols_ != o.cols_)
        throw std::invalid_argument("matrix sub: shape mismatch");
    for (std::size_t i = 0; i < entries_.size(); ++i) entries_[i] -= o.entries_[i];
    return *this;
}

CMatrix& CMatrix::operator*=(cplx s) {
    for (cplx& e : entries_) e *= s;
    return *this;
}

CMatrix operator*(const CMatrix& a, const CMatrix& b) {
    if (a.cols_ != b.rows_) throw std::invalid_argument("matmul: shape mismatch");
    CMatrix c(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i)
        for (std::size_t k = 0; k < a.cols_; ++k) {
            const cplx aik = a(i, k);
            if (aik == cplx{}) continue;
            for (std::size_t j = 0; j < b.cols_; ++j) c(i, j) += aik * b(k, j);
        }
    return c;
}

CVector operator*(const CMatrix& m, const CVector& v) {
    if (m.cols_ != v.dim()) throw std::invalid_argument("matvec: shape mismatch");
    CVector r(m.rows_);
    for (std::size_t i = 0; i < m.rows_; ++i) {
        cplx s = 0.0;
        for (std::size_t j = 0; j < m.cols_; ++j) s += m(i, j) * v[j];
        r[i] = s;
    }
    return r;
}

CMatrix outer(const CVector& a, const CVector& b) {
    CMatrix m(a.dim(), b.dim());
    for (std::size_t i = 0; i < a.dim(); ++i)
        for (std::size_t j = 0; j < b.dim(); ++j) m(i, j) = a[i] * std::conj(b[j]);
    return m;
}

cplx quadratic_form(const CMatrix& m, const CVector& psi) {
    return psi.inner(m * psi);
}

CMatrix tensor_product(const CMatrix& a, const CMatrix& b) {
    CMatrix m(a.rows() * b.rows(), a.cols() * b.cols());
    for (std::size_t i1 = 0; i1 < a.rows(); ++i1)
        for (std::size_t j1 = 0; j1 < a.cols(); ++j1) {
            const cplx aij = a(i1, j1);
            if (aij == cplx{}) continue;
            for (std::size_t i2 = 0; i2 < b.rows(); ++i2)
                for (std::size_t j2 = 0; j2 < b.cols(); ++j2)
                    m(i1 * b.rows() + i2, j1 * b.cols() + j2) = aij * b(i2, j2);
        }
    return m;
}

CVector tensor_product(const CVector& a, const CVector& b) {
    CVector v(a.dim() * b.dim());
    for (std::size_t i = 0; i < a.dim(); ++i)
        for (std::size_t j = 0; j < b.dim(); ++j) v[i * b.dim() + j] = a[i] * b[j];
    return v;
}

CMatrix partial_trace(const CMatrix& rho, std::size_t d1, std::size_t d2, std::size_t keep) {
    if (keep > 1) throw std::invalid_argument("partial_trace: keep must be 0 or 1");
    if (rho.rows() != rho.cols() || rho.rows() != d1 * d2)
        throw std::invalid_argument("partial_trace: dimension mismatch");
    if (keep == 0) {
        CMatrix r(d1, d1);
        for (std::size_t i = 0; i < d1; ++i)
            for (std::size_t j = 0; j < d1; ++j) {
                cplx s = 0.0;
                for (std::size_t k = 0; k < d2; ++k) s += rho(i * d2 + k, j * d2 + k);
                r(i, j) = s;
            }
        return r;
    }
    CMatrix r(d2, d2);
    for (std::size_t k = 0; k < d2; ++k)
        for (std::size_t l = 0; l < d2; ++l) {
            cplx s = 0.0;
            for (std::size_t i = 0; i < d1; ++i) s += rho(i * d2 + k, i * d2 + l);
            r(k, l) = s;
        }
    return r;
}

namespace {

// Cyclic Jacobi for Hermitian matrices. Returns eigenvalues (unsorted) in
// `eval` and the unitary of column eigenvectors in `vecs`.
void jacobi_hermitian(CMatrix a, std::vector<double>& eval, CMatrix& vecs) {
    const std::size_t n = a.rows();
    vecs = CMatrix::identity(n);
    const double scale = std::max(1.0, a.max_abs());
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) off = std::max(off, std::abs(a(p, q)));
        if (off <= 1e-15 * scale) break;
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const cplx g = a(p, q);
                const double ag = std::abs(g);
                if (ag <= 1e-300) continue;
                const cplx phase = g / ag;  // e^{i phi}
                const double alpha = a(p, p).real();
                const double beta = a(q, q).real();
                const double tau = (beta - alpha) / (2.0 * ag);
                const double t = (tau >= 0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                // columns: col_p' = c*col_p - s*conj(phase)*col_q,
                //          col_q' = s*phase*col_p + c*col_q; rows by Hermiticity
                for (std::size_t i = 0; i < n; ++i) {
                    const cplx aip = a(i, p);
                    const cplx aiq = a(i, q);
                    a(i, p) = c * aip - s * std::conj(phase) * aiq;
                    a(i, q) = s * phase * aip + c * aiq;
                    const cplx vip = vecs(i, p);
                    const cplx viq = vecs(i, q);
                    vecs(i, p) = c * vip - s * std::conj(phase) * viq;
                    vecs(i, q) = s * phase * vip + c * viq;
                }
                for (std::size_t j = 0; j < n; ++j) {
                    const cplx apj = a(p, j);
                    const cplx aqj = a(q, j);
                    a(p, j) = c * apj - s * phase * aqj;
                    a(q, j) = s * std::conj(phase) * apj + c * aqj;
                }
                a(p, q) = 0.0;
                a(q, p) = 0.0;
                a(p, p) = cplx(a(p, p).real(), 0.0);
                a(q, q) = cplx(a(q, q).real(), 0.0);
            }
        }
    }
    eval.resize(n);
    for (std::size_t i = 0; i < n; ++i) eval[i] = a(i, i).real();
}

} // namespace

std::vector<double> hermitian_eigenvalues(const CMatrix& h, double tol) {
    if (!h.is_hermitian(tol)) throw std::invalid_argument("hermitian_eigenvalues: input not Hermitian");
    std::vector<double> eval;
    CMatrix vecs;
    jacobi_hermitian(h, eval, vecs);
    std::sort(eval.begin(), eval.end());
    return eval;
}

SpectralDecomposition spectral_decompose(const CMatrix& h, double tol) {
    if (!h.is_hermitian(tol)) throw std::invalid_argument("spectral_decompose: input not Hermitian");
    const std::size_t n = h.rows();
    std::vector<double> eval;
    CMatrix vecs;
    jacobi_hermitian(h, eval, vecs);

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return eval[a] < eval[b]; });

    SpectralDecomposition sd;
    std::size_t i = 0;
    while (i < n) {
        // chain-merge eigenvalues with consecutive gaps <= tol
        std::size_t j = i + 1;
        while (j < n && eval[order[j]] - eval[order[j - 1]] <= tol) ++j;
        double mean = 0.0;
        CMatrix proj = CMatrix::zero(n, n);
        for (std::size_t k = i; k < j; ++k) {
            mean += eval[order[k]];
            CVector v(n);
            for (std::size_t r = 0; r < n; ++r) v[r] = vecs(r, order[k]);
            proj += outer(v, v);
        }
        sd.eigenvalues.push_back(mean / static_cast<double>(j - i));
        sd.projectors.push_back(std::move(proj));
        i = j;
    }
    return sd;
}

bool is_psd(const CMatrix& m, double tol) {
    const auto eval = hermitian_eigenvalues(m, std::max(tol, 1e-12));
    return eval.empty() || eval.front() >= -tol;
}

} // namespace esr
