#include "qbnet/dynamics.hpp"

#include "qbnet/errors.hpp"

#include <boost/numeric/odeint.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <sstream>
#include <stdexcept>

namespace qbnet {

namespace {

constexpr complex I{0.0, 1.0};

// Pade approximant orders and the 1-norm bounds below which each meets unit
// roundoff in backward error (Higham 2005).
constexpr std::array<double, 5> kThetas = {1.495585217958292e-2, 2.539398330063230e-1, 9.504178996162932e-1,
                                           2.097847961257068e0, 5.371920351148152e0};

cmat pade_low(const cmat& a, int degree) {
    static constexpr std::array<double, 4> b3 = {120., 60., 12., 1.};
    static constexpr std::array<double, 6> b5 = {30240., 15120., 3360., 420., 30., 1.};
    static constexpr std::array<double, 8> b7 = {17297280., 8648640., 1995840., 277200., 25200., 1512., 56., 1.};
    static constexpr std::array<double, 10> b9 = {17643225600., 8821612800., 2075673600., 302702400., 30270240.,
                                                  2162160.,     110880.,      3960.,        90.,        1.};
    const double* b = degree == 3 ? b3.data() : degree == 5 ? b5.data() : degree == 7 ? b7.data() : b9.data();

    const auto n = a.rows();
    const cmat id = cmat::Identity(n, n);
    const cmat a2 = a * a;
    cmat power = id;
    cmat u_even = b[1] * id;
    cmat v = b[0] * id;
    for (int k = 2; k <= degree; k += 2) {
        power = power * a2;
        v += b[k] * power;
        u_even += b[k + 1] * power;
    }
    const cmat u = a * u_even;
    return (v - u).partialPivLu().solve(v + u);
}

cmat pade13(const cmat& a) {
    static constexpr std::array<double, 14> b = {64764752532480000., 32382376266240000., 7771770303897600.,
                                                 1187353796428800.,  129060195264000.,   10559470521600.,
                                                 670442572800.,      33522128640.,       1323241920.,
                                                 40840800.,          960960.,            16380.,
                                                 182.,               1.};
    const auto n = a.rows();
    const cmat id = cmat::Identity(n, n);
    const cmat a2 = a * a;
    const cmat a4 = a2 * a2;
    const cmat a6 = a4 * a2;
    const cmat u_inner = a6 * (b[13] * a6 + b[11] * a4 + b[9] * a2);
    const cmat u = a * (u_inner + b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * id);
    const cmat v_inner = a6 * (b[12] * a6 + b[10] * a4 + b[8] * a2);
    const cmat v = v_inner + b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * id;
    return (v - u).partialPivLu().solve(v + u);
}

double one_norm(const cmat& a) {
    return a.cwiseAbs().colwise().sum().maxCoeff();
}

void check_times(std::span<const double> times) {
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (!std::isfinite(times[i]) || times[i] < 0.0) {
            throw std::invalid_argument("evolve: times must be finite and >= 0");
        }
        if (i > 0 && !(times[i] > times[i - 1])) {
            throw std::invalid_argument("evolve: times must be strictly increasing");
        }
    }
}

using ode_state = std::vector<complex>;

Trajectory integrate(const LinearSystem& sys, const cvec& initial, std::span<const double> times,
                     const IntegratorOptions& options) {
    namespace odeint = boost::numeric::odeint;
    Trajectory traj;
    traj.times.assign(times.begin(), times.end());
    traj.amplitudes.reserve(times.size());
    if (times.empty()) {
        return traj;
    }

    const auto n = sys.size();
    auto rhs = [&sys, n](const ode_state& x, ode_state& dxdt, double /*t*/) {
        Eigen::Map<const cvec> xv(x.data(), n);
        Eigen::Map<cvec> dv(dxdt.data(), n);
        dv.noalias() = sys.matrix * xv;
        dv += sys.drive;
    };

    ode_state state(initial.data(), initial.data() + n);
    auto observer = [&traj, n](const ode_state& x, double /*t*/) {
        traj.amplitudes.emplace_back(Eigen::Map<const cvec>(x.data(), n));
    };

    // The initial state is given at t = 0; observe only the requested times.
    std::vector<double> grid;
    grid.reserve(times.size() + 1);
    const bool prepend_origin = times.front() > 0.0;
    if (prepend_origin) {
        grid.push_back(0.0);
    }
    grid.insert(grid.end(), times.begin(), times.end());
    if (grid.size() == 1) {
        traj.amplitudes.push_back(initial);
        return traj;
    }

    const double dt = (grid.back() - grid.front()) * 1e-6;
    auto stepper = odeint::make_controlled(options.abs_tol, options.rel_tol,
                                           odeint::runge_kutta_fehlberg78<ode_state>());
    odeint::integrate_times(stepper, rhs, state, grid.begin(), grid.end(), dt, observer);
    if (prepend_origin && !traj.amplitudes.empty()) {
        traj.amplitudes.erase(traj.amplitudes.begin());
    }
    if (traj.amplitudes.size() != times.size()) {
        throw NumericError("evolve: integrator returned an incomplete trajectory");
    }
    if (!prepend_origin) {
        traj.amplitudes.front() = initial;
    }
    return traj;
}

}  // namespace

Eigen::Index LinearSystem::index(std::string_view id) const {
    for (std::size_t i = 0; i < ids.size(); ++i) {
        if (ids[i] == id) {
            return static_cast<Eigen::Index>(i);
        }
    }
    throw std::out_of_range("unknown mode id '" + std::string(id) + "'");
}

LinearSystem assemble(const NetworkSpec& spec) {
    if (auto violations = validate(spec); !violations.empty()) {
        throw ValidationError(std::move(violations));
    }
    const auto n = static_cast<Eigen::Index>(spec.modes.size());
    LinearSystem sys;
    sys.matrix = cmat::Zero(n, n);
    sys.drive = cvec::Zero(n);
    sys.decay_rates.resize(n);
    sys.ids.reserve(spec.modes.size());
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& mode = spec.modes[static_cast<std::size_t>(i)];
        sys.ids.push_back(mode.id);
        sys.decay_rates[i] = mode.decay_rate;
        sys.matrix(i, i) = complex{-mode.decay_rate / 2.0, -mode.detuning};
    }
    for (const auto& c : spec.couplings) {
        const auto s = sys.index(c.source);
        const auto t = sys.index(c.target);
        const complex phasor = unit_phasor(c.phase);
        sys.matrix(t, s) += -I * c.strength * phasor;
        sys.matrix(s, t) += -I * c.strength * std::conj(phasor);
    }
    for (const auto& d : spec.drives) {
        sys.drive[sys.index(d.mode)] += -I * d.amplitude;
    }
    return sys;
}

SteadyState steady_state(const LinearSystem& sys) {
    const Eigen::PartialPivLU<cmat> lu(sys.matrix);
    const double rcond = lu.rcond();
    const double cond = rcond > 0.0 ? 1.0 / rcond : std::numeric_limits<double>::infinity();
    if (!(cond <= max_steady_condition) || !std::isfinite(cond)) {
        std::ostringstream msg;
        msg << "no unique steady state: dynamics matrix is singular or near-singular (condition estimate "
            << cond << ")";
        throw SingularSystemError(msg.str(), cond);
    }
    const cvec rhs = -sys.drive;
    SteadyState ss;
    ss.amplitudes = lu.solve(rhs);
    // One step of iterative refinement.
    const cvec r = rhs - sys.matrix * ss.amplitudes;
    ss.amplitudes += lu.solve(r);
    ss.residual = (sys.matrix * ss.amplitudes + sys.drive).norm();
    ss.condition_estimate = cond;
    return ss;
}

Stability is_stable(const LinearSystem& sys) {
    if (sys.size() == 0) {
        throw NumericError("is_stable: empty system");
    }
    const Eigen::ComplexEigenSolver<cmat> solver(sys.matrix, /*computeEigenvectors=*/false);
    if (solver.info() != Eigen::Success) {
        throw NumericError("is_stable: eigenvalue computation did not converge");
    }
    const double abscissa = solver.eigenvalues().real().maxCoeff();
    return {abscissa < 0.0, abscissa};
}

cmat expm(const cmat& a) {
    if (a.rows() != a.cols()) {
        throw std::invalid_argument("expm: matrix must be square");
    }
    if (a.size() == 0) {
        return a;
    }
    const double norm = one_norm(a);
    if (!std::isfinite(norm)) {
        throw std::invalid_argument("expm: non-finite matrix");
    }
    constexpr std::array<int, 4> low_degrees = {3, 5, 7, 9};
    for (std::size_t i = 0; i < low_degrees.size(); ++i) {
        if (norm <= kThetas[i]) {
            return pade_low(a, low_degrees[i]);
        }
    }
    int squarings = 0;
    if (norm > kThetas[4]) {
        squarings = std::max(0, static_cast<int>(std::ceil(std::log2(norm / kThetas[4]))));
    }
    cmat result = pade13(a / std::ldexp(1.0, squarings));
    for (int i = 0; i < squarings; ++i) {
        result = result * result;
    }
    return result;
}

Trajectory evolve(const LinearSystem& sys, const cvec& initial, std::span<const double> times, Propagator method,
                  const IntegratorOptions& options) {
    check_times(times);
    if (initial.size() != sys.size()) {
        throw std::invalid_argument("evolve: initial state has wrong dimension");
    }
    if (!initial.allFinite()) {
        throw std::invalid_argument("evolve: initial state must be finite");
    }

    if (method == Propagator::adaptive_integrator) {
        return integrate(sys, initial, times, options);
    }

    cvec steady;
    try {
        steady = steady_state(sys).amplitudes;
    } catch (const SingularSystemError&) {
        if (method == Propagator::matrix_exponential) {
            throw;
        }
        return integrate(sys, initial, times, options);
    }

    Trajectory traj;
    traj.times.assign(times.begin(), times.end());
    traj.amplitudes.reserve(times.size());
    const cvec offset = initial - steady;
    for (const double t : times) {
        if (t == 0.0) {
            traj.amplitudes.push_back(initial);
            continue;
        }
        traj.amplitudes.push_back(steady + expm(sys.matrix * t) * offset);
    }
    return traj;
}

}  // namespace qbnet
