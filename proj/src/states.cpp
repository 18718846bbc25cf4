#include "qsv/states.hpp"

#include <cmath>

namespace qsv {

namespace {
constexpr double inv_sqrt2 = 0.70710678118654752440;
}

Ket2 ket0() { return Ket2{{cplx(1), cplx(0)}}; }
Ket2 ket1() { return Ket2{{cplx(0), cplx(1)}}; }
Ket2 ket_plus() { return Ket2{{cplx(inv_sqrt2), cplx(inv_sqrt2)}}; }
Ket2 ket_minus() { return Ket2{{cplx(inv_sqrt2), cplx(-inv_sqrt2)}}; }
Ket2 ket_plus_i() { return Ket2{{cplx(inv_sqrt2), cplx(0, inv_sqrt2)}}; }
Ket2 ket_minus_i() { return Ket2{{cplx(inv_sqrt2), cplx(0, -inv_sqrt2)}}; }

TargetState make_target(double lambda) {
    if (!(lambda >= 0.0 && lambda <= 0.5))
        throw OutOfRangeLambda("make_target: lambda must lie in [0, 1/2]");
    TargetState t;
    t.lambda = lambda;
    t.psi[0] = std::sqrt(1.0 - lambda);
    t.psi[3] = std::sqrt(lambda);
    t.psi_perp[0] = std::sqrt(lambda);
    t.psi_perp[3] = -std::sqrt(1.0 - lambda);
    return t;
}

std::pair<Mat2, Mat2> local_phase_unitary(double theta) {
    Mat2 u, v;
    u(0, 0) = 1;
    u(1, 1) = std::exp(cplx(0, theta));
    v(0, 0) = 1;
    v(1, 1) = std::exp(cplx(0, -theta));
    return {u, v};
}

OneWayVectors make_one_way_vectors(double lambda) {
    if (!(lambda >= 0.0 && lambda <= 0.5))
        throw OutOfRangeLambda("make_one_way_vectors: lambda must lie in [0, 1/2]");
    const double c0 = std::sqrt(1.0 - lambda);
    const double c1 = std::sqrt(lambda);
    OneWayVectors v;
    v.v_plus = Ket2{{cplx(c0), cplx(c1)}};
    v.v_minus = Ket2{{cplx(c0), cplx(-c1)}};
    v.w_plus = Ket2{{cplx(c0), cplx(0, c1)}};
    v.w_minus = Ket2{{cplx(c0), cplx(0, -c1)}};
    return v;
}

TwoWayVectors make_two_way_vectors(double lambda, double delta) {
    if (!(lambda >= 0.0 && lambda <= 0.5))
        throw OutOfRangeLambda("make_two_way_vectors: lambda must lie in [0, 1/2]");
    if (!(delta >= 0.0 && delta <= 1.0))
        throw OutOfRangeDelta("make_two_way_vectors: delta must lie in [0, 1]");
    const double den = 1.0 - delta + lambda * delta;
    if (den <= 1e-15)
        throw SingularDenominator(
            "make_two_way_vectors: 1 - delta + lambda*delta vanishes");
    TwoWayVectors v;
    v.a_coeff = (1.0 - lambda) * (1.0 - delta) / den;
    v.b_coeff = lambda / den;
    const double c0 = std::sqrt((1.0 - delta) * v.a_coeff);
    const double c1 = std::sqrt(v.b_coeff);
    v.v_plus = Ket2{{cplx(c0), cplx(c1)}};
    v.v_minus = Ket2{{cplx(c0), cplx(-c1)}};
    v.w_plus = Ket2{{cplx(c0), cplx(0, c1)}};
    v.w_minus = Ket2{{cplx(c0), cplx(0, -c1)}};
    return v;
}

AliceDirectionState make_direction_state(double t, double s, double lambda) {
    if (!(lambda >= 0.0 && lambda <= 0.5))
        throw OutOfRangeLambda("make_direction_state: lambda must lie in [0, 1/2]");
    if (!(t >= 0.0 && t <= 1.0))
        throw InvalidRange("make_direction_state: t must lie in [0, 1]");
    AliceDirectionState d;
    d.t = t;
    d.s = s;
    const cplx phase = std::exp(cplx(0, s));
    d.ket = Ket2{{cplx(std::sqrt(t)), phase * std::sqrt(1.0 - t)}};
    const double p0 = t * (1.0 - lambda);
    const double p1 = (1.0 - t) * lambda;
    if (p0 + p1 <= 1e-30) {
        d.partner = ket1(); // degenerate corner t = 0, lambda = 0
    } else {
        Ket2 raw{{cplx(std::sqrt(p0)), std::conj(phase) * std::sqrt(p1)}};
        d.partner = normalized(raw);
    }
    return d;
}

} // namespace qsv
