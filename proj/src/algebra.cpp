#include "qsv/algebra.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace qsv {

cplx dot(const Ket2& x, const Ket2& y) {
    return std::conj(x[0]) * y[0] + std::conj(x[1]) * y[1];
}

cplx dot(const Ket4& x, const Ket4& y) {
    cplx s = 0;
    for (int i = 0; i < 4; ++i) s += std::conj(x[i]) * y[i];
    return s;
}

double norm(const Ket2& x) { return std::sqrt(std::real(dot(x, x))); }
double norm(const Ket4& x) { return std::sqrt(std::real(dot(x, x))); }

Ket2 normalized(const Ket2& x) {
    Ket2 r = x;
    const double n = norm(x);
    for (auto& c : r.a) c /= n;
    return r;
}

Ket4 normalized(const Ket4& x) {
    Ket4 r = x;
    const double n = norm(x);
    for (auto& c : r.a) c /= n;
    return r;
}

Ket4 operator+(const Ket4& x, const Ket4& y) {
    Ket4 r;
    for (int i = 0; i < 4; ++i) r[i] = x[i] + y[i];
    return r;
}

Ket4 operator-(const Ket4& x, const Ket4& y) {
    Ket4 r;
    for (int i = 0; i < 4; ++i) r[i] = x[i] - y[i];
    return r;
}

Ket4 operator*(cplx c, const Ket4& x) {
    Ket4 r;
    for (int i = 0; i < 4; ++i) r[i] = c * x[i];
    return r;
}

Ket2 operator+(const Ket2& x, const Ket2& y) {
    Ket2 r;
    for (int i = 0; i < 2; ++i) r[i] = x[i] + y[i];
    return r;
}

Ket2 operator-(const Ket2& x, const Ket2& y) {
    Ket2 r;
    for (int i = 0; i < 2; ++i) r[i] = x[i] - y[i];
    return r;
}

Ket2 operator*(cplx c, const Ket2& x) {
    Ket2 r;
    for (int i = 0; i < 2; ++i) r[i] = c * x[i];
    return r;
}

Mat2 identity2() {
    Mat2 r;
    r(0, 0) = r(1, 1) = 1;
    return r;
}

Mat4 identity4() {
    Mat4 r;
    for (int i = 0; i < 4; ++i) r(i, i) = 1;
    return r;
}

Mat4 operator+(const Mat4& x, const Mat4& y) {
    Mat4 r;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) r(i, j) = x(i, j) + y(i, j);
    return r;
}

Mat4 operator-(const Mat4& x, const Mat4& y) {
    Mat4 r;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) r(i, j) = x(i, j) - y(i, j);
    return r;
}

Mat4 operator*(double c, const Mat4& x) {
    Mat4 r;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) r(i, j) = c * x(i, j);
    return r;
}

Mat4 operator*(const Mat4& x, const Mat4& y) {
    Mat4 r;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            cplx s = 0;
            for (int k = 0; k < 4; ++k) s += x(i, k) * y(k, j);
            r(i, j) = s;
        }
    return r;
}

Ket4 operator*(const Mat4& x, const Ket4& v) {
    Ket4 r;
    for (int i = 0; i < 4; ++i) {
        cplx s = 0;
        for (int k = 0; k < 4; ++k) s += x(i, k) * v[k];
        r[i] = s;
    }
    return r;
}

Ket2 operator*(const Mat2& x, const Ket2& v) {
    Ket2 r;
    r[0] = x(0, 0) * v[0] + x(0, 1) * v[1];
    r[1] = x(1, 0) * v[0] + x(1, 1) * v[1];
    return r;
}

Mat2 adjoint(const Mat2& x) {
    Mat2 r;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) r(i, j) = std::conj(x(j, i));
    return r;
}

Mat4 adjoint(const Mat4& x) {
    Mat4 r;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) r(i, j) = std::conj(x(j, i));
    return r;
}

cplx trace(const Mat4& x) { return x(0, 0) + x(1, 1) + x(2, 2) + x(3, 3); }

Mat2 outer(const Ket2& x) {
    Mat2 r;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) r(i, j) = x[i] * std::conj(x[j]);
    return r;
}

Mat4 outer(const Ket4& x) { return outer(x, x); }

Mat4 outer(const Ket4& x, const Ket4& y) {
    Mat4 r;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) r(i, j) = x[i] * std::conj(y[j]);
    return r;
}

Mat4 tensor(const Mat2& a, const Mat2& b) {
    Mat4 r;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            for (int k = 0; k < 2; ++k)
                for (int l = 0; l < 2; ++l)
                    r(2 * i + k, 2 * j + l) = a(i, j) * b(k, l);
    return r;
}

Ket4 tensor(const Ket2& a, const Ket2& b) {
    Ket4 r;
    for (int i = 0; i < 2; ++i)
        for (int k = 0; k < 2; ++k) r[2 * i + k] = a[i] * b[k];
    return r;
}

Mat4 on_alice(const Mat2& a) { return tensor(a, identity2()); }
Mat4 on_bob(const Mat2& b) { return tensor(identity2(), b); }

Mat4 exchange_qubits(const Mat4& x) {
    // conjugation by the permutation |ab> -> |ba>: indices 1 and 2 swap
    static const int perm[4] = {0, 2, 1, 3};
    Mat4 r;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) r(i, j) = x(perm[i], perm[j]);
    return r;
}

Ket4 exchange_qubits(const Ket4& x) {
    static const int perm[4] = {0, 2, 1, 3};
    Ket4 r;
    for (int i = 0; i < 4; ++i) r[i] = x[perm[i]];
    return r;
}

double expectation(const Mat4& x, const Ket4& v) {
    return std::real(dot(v, x * v));
}

double max_abs(const Mat4& x) {
    double m = 0;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) m = std::max(m, std::abs(x(i, j)));
    return m;
}

double max_abs_diff(const Mat4& x, const Mat4& y) { return max_abs(x - y); }

double frobenius(const Mat4& x) {
    double s = 0;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) s += std::norm(x(i, j));
    return std::sqrt(s);
}

double hermiticity_defect(const Mat4& x) {
    double m = 0;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            m = std::max(m, std::abs(x(i, j) - std::conj(x(j, i))));
    return m;
}

bool is_hermitian(const Mat4& x, double tol) {
    return hermiticity_defect(x) <= tol;
}

namespace {

double off_diagonal_frobenius(const Mat4& x) {
    double s = 0;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            if (i != j) s += std::norm(x(i, j));
    return std::sqrt(s);
}

} // namespace

Spectrum4 eig_hermitian(const Mat4& x) {
    if (hermiticity_defect(x) > 1e-9)
        throw NonHermitianInput("eig_hermitian: asymmetry defect exceeds 1e-9");

    // Work on the exactly Hermitian average to keep rotations clean.
    Mat4 a;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            a(i, j) = 0.5 * (x(i, j) + std::conj(x(j, i)));

    Mat4 v = identity4();
    constexpr int max_sweeps = 100;
    constexpr double off_tol = 1e-14;

    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        if (off_diagonal_frobenius(a) < off_tol) break;
        for (int p = 0; p < 4; ++p) {
            for (int q = p + 1; q < 4; ++q) {
                const cplx b = a(p, q);
                const double r = std::abs(b);
                if (r < 1e-300) continue;
                // Unitary plane rotation R with block [[c, s], [-conj(s), c]]
                // on coordinates (p, q) that zeroes the (p, q) entry of R^dag A R.
                const double app = std::real(a(p, p));
                const double aqq = std::real(a(q, q));
                const double tau = (app - aqq) / (2.0 * r);
                // minimal-magnitude root of t^2 - 2*tau*t - 1 = 0
                const double t = (tau >= 0) ? -1.0 / (tau + std::hypot(1.0, tau))
                                            : 1.0 / (-tau + std::hypot(1.0, tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const cplx s = (t * c) * (b / r);

                Mat4 rot = identity4();
                rot(p, p) = c;
                rot(p, q) = s;
                rot(q, p) = -std::conj(s);
                rot(q, q) = c;

                a = adjoint(rot) * a * rot;
                v = v * rot;
            }
        }
    }

    // Sort eigenpairs by descending eigenvalue (stable for exact ties).
    std::array<int, 4> idx{0, 1, 2, 3};
    std::stable_sort(idx.begin(), idx.end(), [&](int i, int j) {
        return std::real(a(i, i)) > std::real(a(j, j));
    });

    Spectrum4 out;
    for (int k = 0; k < 4; ++k) {
        out.values[k] = std::real(a(idx[k], idx[k]));
        for (int i = 0; i < 4; ++i) out.vectors[k][i] = v(i, idx[k]);
    }
    return out;
}

Mat4 partial_transpose_b(const Mat4& x) {
    Mat4 r;
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            for (int a2 = 0; a2 < 2; ++a2)
                for (int b2 = 0; b2 < 2; ++b2)
                    r(2 * a + b, 2 * a2 + b2) = x(2 * a + b2, 2 * a2 + b);
    return r;
}

void require_density_operator(const Mat4& sigma) {
    if (hermiticity_defect(sigma) > 1e-9)
        throw NonHermitianInput("density operator: asymmetry defect exceeds 1e-9");
    if (std::abs(std::real(trace(sigma)) - 1.0) > 1e-10 ||
        std::abs(std::imag(trace(sigma))) > 1e-10)
        throw InvalidDensityOperator("density operator: trace differs from 1");
    const Spectrum4 sp = eig_hermitian(sigma);
    if (sp.values[3] < -1e-10)
        throw InvalidDensityOperator("density operator: negative eigenvalue");
}

double fidelity_with_pure(const Ket4& psi, const Mat4& sigma) {
    require_density_operator(sigma);
    const double f = std::real(dot(psi, sigma * psi));
    return std::min(1.0, std::max(0.0, f));
}

} // namespace qsv
