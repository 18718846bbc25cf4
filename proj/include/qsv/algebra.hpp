#pragma once

#include <array>
#include <complex>

#include "qsv/errors.hpp"

namespace qsv {

using cplx = std::complex<double>;

// Dense two-qubit linear algebra over the fixed product basis
// |00>, |01>, |10>, |11>  (first factor = Alice, second = Bob; index = 2a + b).
// Everything is value-semantic and row-major.

struct Ket2 {
    std::array<cplx, 2> a{};
    cplx& operator[](int i) { return a[i]; }
    const cplx& operator[](int i) const { return a[i]; }
};

struct Ket4 {
    std::array<cplx, 4> a{};
    cplx& operator[](int i) { return a[i]; }
    const cplx& operator[](int i) const { return a[i]; }
};

struct Mat2 {
    std::array<std::array<cplx, 2>, 2> m{};
    cplx& operator()(int i, int j) { return m[i][j]; }
    const cplx& operator()(int i, int j) const { return m[i][j]; }
};

struct Mat4 {
    std::array<std::array<cplx, 4>, 4> m{};
    cplx& operator()(int i, int j) { return m[i][j]; }
    const cplx& operator()(int i, int j) const { return m[i][j]; }
};

// Eigendecomposition of a Hermitian 4x4 operator.
// values are sorted in descending order; vectors[k] is the unit eigenvector
// for values[k], and the four vectors are mutually orthonormal.
struct Spectrum4 {
    std::array<double, 4> values{};
    std::array<Ket4, 4> vectors{};
};

// --- vector operations -------------------------------------------------

cplx dot(const Ket2& x, const Ket2& y); // <x|y>, conjugate-linear in x
cplx dot(const Ket4& x, const Ket4& y);
double norm(const Ket2& x);
double norm(const Ket4& x);
Ket2 normalized(const Ket2& x);
Ket4 normalized(const Ket4& x);
Ket4 operator+(const Ket4& x, const Ket4& y);
Ket4 operator-(const Ket4& x, const Ket4& y);
Ket4 operator*(cplx c, const Ket4& x);
Ket2 operator+(const Ket2& x, const Ket2& y);
Ket2 operator-(const Ket2& x, const Ket2& y);
Ket2 operator*(cplx c, const Ket2& x);

// --- matrix operations -------------------------------------------------

Mat2 identity2();
Mat4 identity4();
Mat4 operator+(const Mat4& x, const Mat4& y);
Mat4 operator-(const Mat4& x, const Mat4& y);
Mat4 operator*(double c, const Mat4& x);
Mat4 operator*(const Mat4& x, const Mat4& y);
Ket4 operator*(const Mat4& x, const Ket4& v);
Ket2 operator*(const Mat2& x, const Ket2& v);
Mat2 adjoint(const Mat2& x);
Mat4 adjoint(const Mat4& x);
cplx trace(const Mat4& x);

Mat2 outer(const Ket2& x);          // |x><x|
Mat4 outer(const Ket4& x);
Mat4 outer(const Ket4& x, const Ket4& y); // |x><y|

// Kronecker products in the fixed basis order (Alice factor first).
Mat4 tensor(const Mat2& a, const Mat2& b);
Ket4 tensor(const Ket2& a, const Ket2& b);

// Embed a single-qubit operator on one side of the pair.
Mat4 on_alice(const Mat2& a);
Mat4 on_bob(const Mat2& b);

// Conjugate by the qubit-exchange permutation |ab> -> |ba|.
Mat4 exchange_qubits(const Mat4& x);
Ket4 exchange_qubits(const Ket4& x);

// <v|X|v> (real part; the imaginary part vanishes for Hermitian X).
double expectation(const Mat4& x, const Ket4& v);

double max_abs(const Mat4& x);
double max_abs_diff(const Mat4& x, const Mat4& y);
double frobenius(const Mat4& x);

// Largest |X(i,j) - conj(X(j,i))| over all entries.
double hermiticity_defect(const Mat4& x);
bool is_hermitian(const Mat4& x, double tol = 1e-9);

// --- spectral and transpose operations ----------------------------------

// Cyclic complex Jacobi eigensolver for Hermitian 4x4 operators.
// Sweeps until the off-diagonal Frobenius norm drops below 1e-14
// (at most 100 sweeps). Throws NonHermitianInput when the asymmetry
// defect exceeds 1e-9.
Spectrum4 eig_hermitian(const Mat4& x);

// Partial transpose on the second (Bob) factor:
// out[2a+b][2a'+b'] = in[2a+b'][2a'+b]. Exact entry permutation.
Mat4 partial_transpose_b(const Mat4& x);

// <psi| sigma |psi> for a pure reference state and a density operator.
// Throws NonHermitianInput when sigma is not Hermitian (defect > 1e-9) and
// InvalidDensityOperator when |tr(sigma) - 1| > 1e-10 or an eigenvalue
// drops below -1e-10. The result is clamped to [0, 1].
double fidelity_with_pure(const Ket4& psi, const Mat4& sigma);

// Validates the density-operator requirements used by fidelity_with_pure.
void require_density_operator(const Mat4& sigma);

} // namespace qsv
