#pragma once

#include <complex>
#include <cstddef>
#include <vector>

// Dense complex linear algebra over small Hilbert spaces (dim <= ~32).
// Everything is a plain value type; operations are pure functions.

namespace esr {

using cplx = std::complex<double>;

class CMatrix;

class CVector {
public:
    CVector() = default;
    explicit CVector(std::size_t dim) : entries_(dim) {}
    explicit CVector(std::vector<cplx> entries) : entries_(std::move(entries)) {}

    static CVector basis(std::size_t dim, std::size_t index);

    std::size_t dim() const { return entries_.size(); }
    cplx& operator[](std::size_t i) { return entries_[i]; }
    const cplx& operator[](std::size_t i) const { return entries_[i]; }
    const std::vector<cplx>& entries() const { return entries_; }

    double norm() const;
    // Throws std::domain_error if the norm is numerically zero.
    CVector normalized() const;

    // <this|other>, conjugate-linear in the first argument.
    cplx inner(const CVector& other) const;

    CVector& operator+=(const CVector& o);
    CVector& operator-=(const CVector& o);
    CVector& operator*=(cplx s);

    friend CVector operator+(CVector a, const CVector& b) { return a += b; }
    friend CVector operator-(CVector a, const CVector& b) { return a -= b; }
    friend CVector operator*(cplx s, CVector v) { return v *= s; }

private:
    std::vector<cplx> entries_;
};

class CMatrix {
public:
    CMatrix() = default;
    CMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), entries_(rows * cols) {}
    CMatrix(std::size_t rows, std::size_t cols, std::vector<cplx> entries);

    static CMatrix identity(std::size_t n);
    static CMatrix zero(std::size_t rows, std::size_t cols);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    cplx& operator()(std::size_t i, std::size_t j) { return entries_[i * cols_ + j]; }
    const cplx& operator()(std::size_t i, std::size_t j) const { return entries_[i * cols_ + j]; }

    CMatrix adjoint() const;
    cplx trace() const;
    double max_abs() const;
    bool is_hermitian(double tol) const;

    CMatrix& operator+=(const CMatrix& o);
    CMatrix& operator-=(const CMatrix& o);
    CMatrix& operator*=(cplx s);

    friend CMatrix operator+(CMatrix a, const CMatrix& b) { return a += b; }
    friend CMatrix operator-(CMatrix a, const CMatrix& b) { return a -= b; }
    friend CMatrix operator*(cplx s, CMatrix m) { return m *= s; }
    friend CMatrix operator*(const CMatrix& a, const CMatrix& b);
    friend CVector operator*(const CMatrix& m, const CVector& v);

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<cplx> entries_;
};

// |a><b|
CMatrix outer(const CVector& a, const CVector& b);

// <psi|M|psi>
cplx quadratic_form(const CMatrix& m, const CVector& psi);

// Kronecker products; entry (i1*i2, j1*j2) = a[i1,j1]*b[i2,j2].
CMatrix tensor_product(const CMatrix& a, const CMatrix& b);
CVector tensor_product(const CVector& a, const CVector& b);

// Reduced operator on the kept factor (keep = 0 keeps the first factor,
// keep = 1 the second). rho must be (d1*d2) x (d1*d2).
CMatrix partial_trace(const CMatrix& rho, std::size_t d1, std::size_t d2, std::size_t keep);

struct SpectralDecomposition {
    std::vector<double> eigenvalues;   // ascending, deduplicated within tol
    std::vector<CMatrix> projectors;   // orthogonal, idempotent, complete
};

// Eigenvalues of a Hermitian matrix, ascending. Rejects non-Hermitian input.
std::vector<double> hermitian_eigenvalues(const CMatrix& h, double tol = 1e-9);

// Cyclic Jacobi diagonalization; eigenvalues closer than tol are merged into
// one degenerate projector.
SpectralDecomposition spectral_decompose(const CMatrix& h, double tol = 1e-9);

// True iff the smallest eigenvalue is >= -tol. Rejects non-Hermitian input.
bool is_psd(const CMatrix& m, double tol = 1e-12);

} // namespace esr
