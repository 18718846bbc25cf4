#include "qsv/strategies.hpp"

#include <cmath>

namespace qsv {

namespace {

void require_lambda(double lambda, const char* who) {
    if (!(lambda >= 0.0 && lambda <= 0.5))
        throw OutOfRangeLambda(std::string(who) + ": lambda must lie in [0, 1/2]");
}

void require_p(double p, const char* who) {
    if (!(p >= 0.0 && p <= 1.0))
        throw OutOfRangeP(std::string(who) + ": p must lie in [0, 1]");
}

std::string dir_suffix(Direction dir) {
    return dir == Direction::AtoB ? "[A->B]" : "[B->A]";
}

PovmElement matched_z_test(std::vector<std::pair<int, int>> accept,
                           std::string label, Direction dir) {
    PovmElement e;
    e.label = std::move(label);
    e.comm_steps = 1;
    e.protocol.kind = ElementProtocol::Kind::MatchedZTest;
    e.protocol.basis = Basis::Z;
    e.protocol.dir = dir;
    e.protocol.accept_pairs = accept;
    for (auto [a, b] : accept) e.op(2 * a + b, 2 * a + b) = 1.0;
    return e;
}

} // namespace

PovmElement t_one_way(Basis which, double lambda, Direction dir) {
    require_lambda(lambda, "t_one_way");
    if (which == Basis::Z)
        return matched_z_test({{0, 0}, {1, 1}}, "T3" + dir_suffix(dir), dir);

    const OneWayVectors v = make_one_way_vectors(lambda);
    PovmElement e;
    e.comm_steps = 1;
    e.protocol.kind = ElementProtocol::Kind::LocalBasisTest;
    e.protocol.basis = which;
    e.protocol.dir = dir;
    if (which == Basis::X) {
        e.op = tensor(outer(ket_plus()), outer(v.v_plus)) +
               tensor(outer(ket_minus()), outer(v.v_minus));
        e.label = "T1" + dir_suffix(dir);
    } else {
        e.op = tensor(outer(ket_plus_i()), outer(v.w_minus)) +
               tensor(outer(ket_minus_i()), outer(v.w_plus));
        e.label = "T2" + dir_suffix(dir);
    }
    if (dir == Direction::BtoA) e.op = exchange_qubits(e.op);
    return e;
}

Strategy omega_one_way(double lambda, double p, Direction dir) {
    require_lambda(lambda, "omega_one_way");
    require_p(p, "omega_one_way");
    Strategy s;
    s.cls = dir == Direction::AtoB ? StrategyClass::OneWayAB : StrategyClass::OneWayBA;
    s.params = {{"lambda", lambda}, {"p", p}};
    s.mixture = {
        {(1.0 - p) / 2.0, t_one_way(Basis::X, lambda, dir)},
        {(1.0 - p) / 2.0, t_one_way(Basis::Y, lambda, dir)},
        {p, t_one_way(Basis::Z, lambda, dir)},
    };
    for (const auto& [w, e] : s.mixture) s.op = s.op + w * e.op;
    return s;
}

double optimal_p_one_way(double lambda) {
    require_lambda(lambda, "optimal_p_one_way");
    return (1.0 - lambda) / (2.0 - lambda);
}

Strategy omega_hat_two_step(double lambda) {
    require_lambda(lambda, "omega_hat_two_step");
    Strategy s;
    s.cls = StrategyClass::TwoStepTwoWay;
    s.params = {{"lambda", lambda}, {"p", 1.0 / 3.0}};
    for (Direction dir : {Direction::AtoB, Direction::BtoA}) {
        for (Basis b : {Basis::X, Basis::Y, Basis::Z}) {
            PovmElement e = t_one_way(b, lambda, dir);
            e.comm_steps = 2; // one extra round to agree on the direction coin
            s.mixture.emplace_back(1.0 / 6.0, std::move(e));
        }
    }
    for (const auto& [w, e] : s.mixture) s.op = s.op + w * e.op;
    return s;
}

PovmElement t_two_way(Basis which, double lambda, double delta, Direction dir) {
    require_lambda(lambda, "t_two_way");
    if (which == Basis::Z)
        throw InvalidRange("t_two_way: only the X and Y variants exist");
    const TwoWayVectors v = make_two_way_vectors(lambda, delta);

    PovmElement e;
    e.comm_steps = 3;
    e.protocol.kind = ElementProtocol::Kind::ThreeStepTest;
    e.protocol.basis = which;
    e.protocol.dir = dir;
    e.protocol.delta = delta;
    const Mat4 damp = delta * tensor(outer(ket0()), outer(ket0()));
    if (which == Basis::X) {
        e.op = damp + tensor(outer(v.v_plus), outer(ket_plus())) +
               tensor(outer(v.v_minus), outer(ket_minus()));
        e.label = "T1'" + dir_suffix(dir);
    } else {
        e.op = damp + tensor(outer(v.w_minus), outer(ket_plus_i())) +
               tensor(outer(v.w_plus), outer(ket_minus_i()));
        e.label = "T2'" + dir_suffix(dir);
    }
    if (dir == Direction::BtoA) e.op = exchange_qubits(e.op);
    return e;
}

Strategy omega_two_way(double lambda, double delta, double p) {
    require_lambda(lambda, "omega_two_way");
    require_p(p, "omega_two_way");
    if (!(delta >= 0.0 && delta <= 1.0))
        throw OutOfRangeDelta("omega_two_way: delta must lie in [0, 1]");

    if (lambda == 0.0 && delta == 1.0 && p == 0.0) {
        // Degenerate optimum: the strategy collapses to the |00><00| test.
        Strategy s;
        s.cls = StrategyClass::ThreeStepTwoWay;
        s.params = {{"lambda", lambda}, {"delta", delta}, {"p", p}};
        PovmElement e = matched_z_test({{0, 0}}, "P00", Direction::AtoB);
        s.mixture = {{1.0, std::move(e)}};
        s.op = s.mixture[0].second.op;
        return s;
    }

    Strategy s;
    s.cls = StrategyClass::ThreeStepTwoWay;
    s.params = {{"lambda", lambda}, {"delta", delta}, {"p", p}};
    const double w = (1.0 - p) / 4.0;
    s.mixture = {
        {w, t_two_way(Basis::X, lambda, delta, Direction::AtoB)},
        {w, t_two_way(Basis::Y, lambda, delta, Direction::AtoB)},
        {w, t_two_way(Basis::X, lambda, delta, Direction::BtoA)},
        {w, t_two_way(Basis::Y, lambda, delta, Direction::BtoA)},
        {p, t_one_way(Basis::Z, lambda, Direction::AtoB)},
    };
    for (const auto& [wt, e] : s.mixture) s.op = s.op + wt * e.op;
    return s;
}

TwoWayParams optimal_two_way_params(double lambda) {
    require_lambda(lambda, "optimal_two_way_params");
    const double root = std::sqrt(lambda * (1.0 - lambda));
    TwoWayParams o;
    o.delta = 1.0 - std::sqrt(lambda / (1.0 - lambda));
    o.p = lambda / (1.0 + root);
    return o;
}

PovmElement t4_separable(double lambda) {
    require_lambda(lambda, "t4_separable");
    const TargetState t = make_target(lambda);
    PovmElement e;
    e.label = "T4";
    e.comm_steps = 0;
    e.protocol.kind = ElementProtocol::Kind::BornSample;
    e.op = outer(t.psi);
    const double root = std::sqrt(lambda * (1.0 - lambda));
    e.op(1, 1) += root;
    e.op(2, 2) += root;
    return e;
}

Strategy omega_sep(double lambda, double delta) {
    require_lambda(lambda, "omega_sep");
    if (!(delta >= 0.0 && delta < 1.0))
        throw OutOfRangeDelta("omega_sep: delta must lie in [0, 1)");
    const TargetState t = make_target(lambda);
    Strategy s;
    s.cls = StrategyClass::SeparableHomogeneous;
    s.params = {{"lambda", lambda}, {"delta", delta}};
    PovmElement e;
    e.label = "HOM";
    e.comm_steps = 0;
    e.protocol.kind = ElementProtocol::Kind::BornSample;
    e.op = outer(t.psi) + delta * (identity4() - outer(t.psi));
    s.mixture = {{1.0, std::move(e)}};
    s.op = s.mixture[0].second.op;
    return s;
}

Strategy nonlocal_projector(double lambda) {
    require_lambda(lambda, "nonlocal_projector");
    const TargetState t = make_target(lambda);
    Strategy s;
    s.cls = StrategyClass::Nonlocal;
    s.params = {{"lambda", lambda}};
    PovmElement e;
    e.label = "PSI";
    e.comm_steps = 0;
    e.protocol.kind = ElementProtocol::Kind::BornSample;
    e.op = outer(t.psi);
    s.mixture = {{1.0, std::move(e)}};
    s.op = s.mixture[0].second.op;
    return s;
}

double plm_second_eigenvalue(double lambda) {
    require_lambda(lambda, "plm_second_eigenvalue");
    const double root = std::sqrt(lambda * (1.0 - lambda));
    return (2.0 + 2.0 * root) / (4.0 + 2.0 * root);
}

Strategy one_way_general(double lambda, const std::vector<DirectionAtom>& atoms) {
    require_lambda(lambda, "one_way_general");
    if (atoms.empty())
        throw InvalidRange("one_way_general: empty distribution");
    double wsum = 0, mean = 0;
    for (const auto& a : atoms) {
        if (a.weight < -1e-15)
            throw InvalidRange("one_way_general: negative weight");
        if (!(a.t >= 0.0 && a.t <= 1.0))
            throw InvalidRange("one_way_general: t outside [0, 1]");
        wsum += a.weight;
        mean += a.weight * a.t;
    }
    if (std::abs(wsum - 1.0) > 1e-12)
        throw InvalidRange("one_way_general: weights must sum to 1");
    if (std::abs(mean - 0.5) > 1e-10)
        throw MeanConstraintViolated("one_way_general: E[T] must equal 1/2");

    Strategy s;
    s.cls = StrategyClass::OneWayAB;
    s.params = {{"lambda", lambda}};
    for (const auto& a : atoms) {
        const AliceDirectionState d = make_direction_state(a.t, a.s, lambda);
        PovmElement e;
        e.label = "atom(t=" + std::to_string(a.t) + ",s=" + std::to_string(a.s) + ")";
        e.comm_steps = 1;
        e.psi_passing = false; // the atom has operator norm 2
        e.protocol.kind = ElementProtocol::Kind::BornSample;
        e.op = 2.0 * tensor(outer(d.ket), outer(d.partner));
        s.mixture.emplace_back(a.weight, std::move(e));
    }
    for (const auto& [w, e] : s.mixture) s.op = s.op + w * e.op;
    return s;
}

double povm_bounds_defect(const Mat4& op) {
    const Spectrum4 sp = eig_hermitian(op);
    double d = 0.0;
    d = std::max(d, -sp.values[3]);
    d = std::max(d, sp.values[0] - 1.0);
    return d;
}

double psi_passing_defect(const Mat4& op, const TargetState& target) {
    return norm(op * target.psi - target.psi);
}

double mixture_defect(const Strategy& s) {
    Mat4 sum;
    for (const auto& [w, e] : s.mixture) sum = sum + w * e.op;
    return max_abs_diff(s.op, sum);
}

double mixture_weight_sum(const Strategy& s) {
    double w = 0;
    for (const auto& [wt, e] : s.mixture) w += wt;
    return w;
}

double mixture_weight_min(const Strategy& s) {
    double w = 1e300;
    for (const auto& [wt, e] : s.mixture) w = std::min(w, wt);
    return w;
}

} // namespace qsv
