#include "strain_cascade/simulate.hpp"
#include "strain_cascade/equilibrium.hpp"
#include "strain_cascade/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <deque>
#include <limits>
#include <ostream>
#include <sstream>

namespace strain_cascade
{

StateVector EquilibriumPoint::to_state() const
{
    const std::size_t p = susceptible.size();
    const std::size_t n = p == 0 ? 0 : infected.front().size();
    StateVector x(p, n);
    for (std::size_t l = 0; l < p; ++l) {
        x.susceptible(l) = susceptible[l];
        for (std::size_t k = 0; k < n; ++k) {
            x.infected(l, k) = infected[l][k];
        }
    }
    return x;
}

double EquilibriumPoint::norm_inf() const
{
    double m = 0.0;
    for (std::size_t l = 0; l < susceptible.size(); ++l) {
        m = std::max(m, std::abs(susceptible[l]));
        for (double t : infected[l]) {
            m = std::max(m, std::abs(t));
        }
    }
    return m;
}

std::vector<std::string> check_config(const IntegratorConfig& c)
{
    std::vector<std::string> errors;
    auto positive = [&](const char* name, double v) {
        if (!(v > 0.0) || !std::isfinite(v)) {
            errors.push_back(std::string(name) + " must be positive and finite");
        }
    };
    positive("rel_tol", c.rel_tol);
    positive("abs_tol", c.abs_tol);
    positive("max_time", c.max_time);
    positive("convergence_eps", c.convergence_eps);
    positive("convergence_window", c.convergence_window);
    positive("sample_interval", c.sample_interval);
    if (c.max_steps == 0) {
        errors.push_back("max_steps must be positive");
    }
    if (c.rel_tol < 1e-13) {
        errors.push_back("rel_tol must be >= 1e-13");
    }
    return errors;
}

const char* to_string(TrajectoryStatus status)
{
    switch (status) {
    case TrajectoryStatus::converged:
        return "converged";
    case TrajectoryStatus::max_time:
        return "max_time";
    case TrajectoryStatus::failed:
        return "failed";
    }
    return "unknown";
}

namespace
{

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0, c5 = 8.0 / 9.0;
constexpr double a21 = 1.0 / 5.0;
constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0, a54 = -212.0 / 729.0;
constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0, a64 = 49.0 / 176.0,
                 a65 = -5103.0 / 18656.0;
constexpr double a71 = 35.0 / 384.0, a73 = 500.0 / 1113.0, a74 = 125.0 / 192.0, a75 = -2187.0 / 6784.0,
                 a76 = 11.0 / 84.0;
constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0, e5 = -17253.0 / 339200.0,
                 e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;
// Continuous extension.
constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                 d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                 d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

double norm_inf(std::span<const double> v)
{
    double m = 0.0;
    for (double x : v) {
        m = std::max(m, std::abs(x));
    }
    return m;
}

class WindowMonitor
{
public:
    WindowMonitor(double window, double eps)
        : m_window(window)
        , m_eps(eps)
    {
    }

    // Returns true if the samples covering [t - window, t] have small diameter.
    bool push(double t, const std::vector<double>& y)
    {
        m_samples.emplace_back(t, y);
        while (m_samples.size() > 1 && m_samples[1].first <= t - m_window) {
            m_samples.pop_front();
        }
        if (m_samples.front().first > t - m_window) {
            return false;
        }
        const double limit = m_eps * std::max(1.0, norm_inf(y));
        for (std::size_t i = 0; i < y.size(); ++i) {
            double lo = y[i];
            double hi = y[i];
            for (const auto& s : m_samples) {
                lo = std::min(lo, s.second[i]);
                hi = std::max(hi, s.second[i]);
            }
            if (hi - lo > limit) {
                return false;
            }
        }
        return true;
    }

private:
    double m_window;
    double m_eps;
    std::deque<std::pair<double, std::vector<double>>> m_samples;
};

bool all_finite(std::span<const double> v)
{
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

} // namespace

OdeSolution integrate_nonnegative(const OdeRhs& f, std::vector<double> y, const IntegratorConfig& config)
{
    if (auto errors = check_config(config); !errors.empty()) {
        throw PreconditionError("integrator config: " + errors.front());
    }
    const std::size_t dim = y.size();
    for (double v : y) {
        if (!(v >= 0.0) || !std::isfinite(v)) {
            throw PreconditionError("integrate: initial state must be finite and nonnegative");
        }
    }

    OdeSolution sol;
    const double rtol = config.rel_tol;
    const double atol = config.abs_tol;
    const double t_end = config.max_time;

    std::array<std::vector<double>, 7> k;
    for (auto& stage : k) {
        stage.assign(dim, 0.0);
    }
    std::vector<double> ytmp(dim), ynew(dim), yerr(dim);
    std::array<std::vector<double>, 5> cont;
    for (auto& c : cont) {
        c.assign(dim, 0.0);
    }

    auto eval = [&](double t, const std::vector<double>& x, std::vector<double>& dx) {
        f(t, x, dx);
        ++sol.rhs_evaluations;
    };

    double t = 0.0;
    eval(t, y, k[0]);

    WindowMonitor monitor(config.convergence_window, config.convergence_eps);
    bool window_holds = false;
    auto record = [&](double ts, std::vector<double> ys) {
        for (double& v : ys) {
            if (v < 0.0) {
                v = 0.0;
                ++sol.clamped_components;
            }
        }
        window_holds = monitor.push(ts, ys);
        if (window_holds && sol.converged_at < 0.0) {
            sol.converged_at = ts;
        }
        sol.times.push_back(ts);
        sol.states.push_back(std::move(ys));
    };
    record(t, y);
    std::size_t next_sample_index = 1;
    auto next_sample = [&] { return static_cast<double>(next_sample_index) * config.sample_interval; };

    // Initial step size (Hairer, Norsett, Wanner).
    double h;
    {
        double dnf = 0.0, dny = 0.0;
        for (std::size_t i = 0; i < dim; ++i) {
            const double sk = atol + rtol * std::abs(y[i]);
            dnf += (k[0][i] / sk) * (k[0][i] / sk);
            dny += (y[i] / sk) * (y[i] / sk);
        }
        double h0 = (dnf <= 1e-10 || dny <= 1e-10) ? 1e-6 : std::sqrt(dny / dnf) * 0.01;
        h0 = std::min(h0, t_end);
        for (std::size_t i = 0; i < dim; ++i) {
            ytmp[i] = y[i] + h0 * k[0][i];
        }
        eval(t + h0, ytmp, k[1]);
        double der2 = 0.0;
        for (std::size_t i = 0; i < dim; ++i) {
            const double sk = atol + rtol * std::abs(y[i]);
            const double d = (k[1][i] - k[0][i]) / sk;
            der2 += d * d;
        }
        der2 = std::sqrt(der2) / h0;
        const double der12 = std::max(std::abs(der2), std::sqrt(dnf));
        const double h1 = der12 <= 1e-15 ? std::max(1e-6, std::abs(h0) * 1e-3) : std::pow(0.01 / der12, 0.2);
        h = std::min({100.0 * h0, h1, t_end});
    }

    bool last_rejected = false;
    while (true) {
        if (sol.accepted_steps + sol.rejected_steps >= config.max_steps) {
            sol.status = TrajectoryStatus::failed;
            sol.failure = "max_steps exceeded at t = " + std::to_string(t);
            break;
        }
        bool final_step = false;
        if (t + h >= t_end * (1.0 - 1e-15)) {
            h = t_end - t;
            final_step = true;
        }

        for (std::size_t i = 0; i < dim; ++i) {
            ytmp[i] = y[i] + h * a21 * k[0][i];
        }
        eval(t + c2 * h, ytmp, k[1]);
        for (std::size_t i = 0; i < dim; ++i) {
            ytmp[i] = y[i] + h * (a31 * k[0][i] + a32 * k[1][i]);
        }
        eval(t + c3 * h, ytmp, k[2]);
        for (std::size_t i = 0; i < dim; ++i) {
            ytmp[i] = y[i] + h * (a41 * k[0][i] + a42 * k[1][i] + a43 * k[2][i]);
        }
        eval(t + c4 * h, ytmp, k[3]);
        for (std::size_t i = 0; i < dim; ++i) {
            ytmp[i] = y[i] + h * (a51 * k[0][i] + a52 * k[1][i] + a53 * k[2][i] + a54 * k[3][i]);
        }
        eval(t + c5 * h, ytmp, k[4]);
        for (std::size_t i = 0; i < dim; ++i) {
            ytmp[i] = y[i] + h * (a61 * k[0][i] + a62 * k[1][i] + a63 * k[2][i] + a64 * k[3][i] + a65 * k[4][i]);
        }
        eval(t + h, ytmp, k[5]);
        for (std::size_t i = 0; i < dim; ++i) {
            ynew[i] = y[i] + h * (a71 * k[0][i] + a73 * k[2][i] + a74 * k[3][i] + a75 * k[4][i] + a76 * k[5][i]);
        }
        eval(t + h, ynew, k[6]);

        double err = 0.0;
        for (std::size_t i = 0; i < dim; ++i) {
            yerr[i] = h * (e1 * k[0][i] + e3 * k[2][i] + e4 * k[3][i] + e5 * k[4][i] + e6 * k[5][i] + e7 * k[6][i]);
            const double sk = atol + rtol * std::max(std::abs(y[i]), std::abs(ynew[i]));
            err += (yerr[i] / sk) * (yerr[i] / sk);
        }
        err = std::sqrt(err / static_cast<double>(std::max<std::size_t>(dim, 1)));

        if (!std::isfinite(err) || !all_finite(ynew)) {
            std::ostringstream msg;
            msg << "non-finite state produced after t = " << t;
            sol.status = TrajectoryStatus::failed;
            sol.failure = msg.str();
            break;
        }

        // An overshoot below the round-off floor is treated like an error-test
        // failure: the step is retried shorter. Only when the step size cannot
        // shrink any further does it become a hard failure (see below).
        const double floor = -1e-12 * std::max(1.0, norm_inf(ynew));
        std::size_t negative_at = dim;
        if (err <= 1.0) {
            for (std::size_t i = 0; i < dim; ++i) {
                if (ynew[i] < floor) {
                    negative_at = i;
                    break;
                }
            }
        }

        if (negative_at < dim) {
            std::ostringstream msg;
            msg << "component " << negative_at << " became negative (" << ynew[negative_at] << ") after t = " << t;
            sol.failure = msg.str();
            ++sol.rejected_steps;
            h *= 0.25;
            last_rejected = true;
        } else if (err <= 1.0) {
            bool clamped = false;
            sol.failure.clear();
            ++sol.accepted_steps;
            for (std::size_t i = 0; i < dim; ++i) {
                const double ydiff = ynew[i] - y[i];
                const double bspl = h * k[0][i] - ydiff;
                cont[0][i] = y[i];
                cont[1][i] = ydiff;
                cont[2][i] = bspl;
                cont[3][i] = ydiff - h * k[6][i] - bspl;
                cont[4][i] = h * (d1 * k[0][i] + d3 * k[2][i] + d4 * k[3][i] + d5 * k[4][i] + d6 * k[5][i] +
                                  d7 * k[6][i]);
            }
            const double t_new = final_step ? t_end : t + h;

            // Dense output on the sample grid.
            bool stop = false;
            while (next_sample() <= t_new && next_sample() < t_end) {
                const double ts = next_sample();
                const double s = (ts - t) / h;
                const double s1 = 1.0 - s;
                std::vector<double> ys(dim);
                for (std::size_t i = 0; i < dim; ++i) {
                    ys[i] = cont[0][i] +
                            s * (cont[1][i] + s1 * (cont[2][i] + s * (cont[3][i] + s1 * cont[4][i])));
                }
                record(ts, std::move(ys));
                ++next_sample_index;
                if (window_holds && config.stop_on_convergence) {
                    stop = true;
                    break;
                }
            }
            if (stop) {
                sol.status = TrajectoryStatus::converged;
                break;
            }

            t = t_new;
            std::swap(y, ynew);
            for (std::size_t i = 0; i < dim; ++i) {
                if (y[i] < 0.0) {
                    y[i] = 0.0;
                    clamped = true;
                    ++sol.clamped_components;
                }
            }
            if (clamped) {
                eval(t, y, k[0]);
                // On the boundary the vector field must not point outward.
                std::size_t outward = dim;
                for (std::size_t i = 0; i < dim && outward == dim; ++i) {
                    if (y[i] == 0.0 && k[0][i] < 0.0) {
                        outward = i;
                    }
                }
                if (outward < dim) {
                    std::ostringstream msg;
                    msg << "component " << outward << " became negative (derivative " << k[0][outward]
                        << " at zero) at t = " << t;
                    sol.failure = msg.str();
                    sol.status = TrajectoryStatus::failed;
                    record(t, y);
                    break;
                }
            } else {
                std::swap(k[0], k[6]);
            }

            if (final_step) {
                record(t_end, y);
                sol.status = window_holds ? TrajectoryStatus::converged : TrajectoryStatus::max_time;
                break;
            }

            double factor = std::min(5.0, std::max(0.2, 0.9 * std::pow(std::max(err, 1e-30), -0.2)));
            if (last_rejected) {
                factor = std::min(factor, 1.0);
            }
            h *= factor;
            last_rejected = false;
        } else {
            ++sol.rejected_steps;
            h *= std::max(0.2, 0.9 * std::pow(err, -0.2));
            last_rejected = true;
        }

        if (h < 1e-14 * std::max(1.0, std::abs(t))) {
            std::ostringstream msg;
            msg << "step size underflow at t = " << t;
            sol.status = TrajectoryStatus::failed;
            sol.failure = negative_at < dim ? sol.failure : msg.str();
            break;
        }
    }

    if (sol.status == TrajectoryStatus::failed && (sol.times.empty() || sol.times.back() < t)) {
        // Last good state.
        record(t, y);
    }
    return sol;
}

Trajectory integrate(const ModelParameters& params, const StateVector& initial, const IntegratorConfig& config)
{
    if (initial.patches() != params.patches || initial.strains() != params.strains) {
        throw DimensionError("integrate: initial state shape does not match parameters");
    }
    const OdeRhs f = [&params](double, std::span<const double> y, std::span<double> dy) { rhs_into(params, y, dy); };
    OdeSolution sol = integrate_nonnegative(f, std::vector<double>(initial.values().begin(), initial.values().end()),
                                            config);

    Trajectory traj;
    traj.patches = params.patches;
    traj.strains = params.strains;
    traj.times = std::move(sol.times);
    traj.states.reserve(sol.states.size());
    for (auto& s : sol.states) {
        traj.states.emplace_back(params.patches, params.strains, std::move(s));
    }
    traj.status = sol.status;
    traj.failure = std::move(sol.failure);
    traj.convergence_window = config.convergence_window;
    traj.converged_at = sol.converged_at;
    traj.accepted_steps = sol.accepted_steps;
    traj.rejected_steps = sol.rejected_steps;
    traj.rhs_evaluations = sol.rhs_evaluations;
    traj.clamped_components = sol.clamped_components;
    return traj;
}

double relative_distance(const StateVector& x, const EquilibriumPoint& target)
{
    if (x.patches() != target.susceptible.size()) {
        throw DimensionError("relative_distance: patch count mismatch");
    }
    const double scale = std::max(1.0, target.norm_inf());
    double d = 0.0;
    for (std::size_t l = 0; l < x.patches(); ++l) {
        d = std::max(d, std::abs(x.susceptible(l) - target.susceptible[l]));
        for (std::size_t k = 0; k < x.strains(); ++k) {
            d = std::max(d, std::abs(x.infected(l, k) - target.infected[l][k]));
        }
    }
    return d / scale;
}

bool converged_to(const Trajectory& trajectory, const EquilibriumPoint& target, double eps)
{
    if (trajectory.states.empty() || trajectory.status == TrajectoryStatus::failed) {
        return false;
    }
    const double t_end = trajectory.times.back();
    for (std::size_t i = trajectory.states.size(); i-- > 0;) {
        if (trajectory.times[i] < t_end - trajectory.convergence_window) {
            break;
        }
        if (!(relative_distance(trajectory.states[i], target) <= eps)) {
            return false;
        }
    }
    return true;
}

LvIntegration lv_integrate(std::span<const double> c, std::span<const double> beta, const SquareMatrix& connectivity,
                           std::span<const double> initial, const IntegratorConfig& config)
{
    const std::size_t p = connectivity.order();
    if (c.size() != p || beta.size() != p || initial.size() != p) {
        throw DimensionError("lv_integrate: vector lengths must match the connectivity matrix order");
    }
    const std::vector<double> cc(c.begin(), c.end());
    const std::vector<double> bb(beta.begin(), beta.end());
    const OdeRhs f = [&](double, std::span<const double> T, std::span<double> dT) {
        for (std::size_t l = 0; l < p; ++l) {
            double acc = T[l] * (cc[l] - bb[l] * T[l]);
            for (std::size_t i = 0; i < p; ++i) {
                acc += connectivity(l, i) * T[i];
            }
            dT[l] = acc;
        }
    };
    OdeSolution sol = integrate_nonnegative(f, std::vector<double>(initial.begin(), initial.end()), config);
    if (sol.status == TrajectoryStatus::failed) {
        throw NumericError("lv_integrate: " + sol.failure);
    }
    return {std::move(sol.states.back()), sol.status, sol.times.back()};
}

void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory)
{
    out << 't';
    for (std::size_t l = 1; l <= trajectory.patches; ++l) {
        out << ",S_" << l;
        for (std::size_t k = 1; k <= trajectory.strains; ++k) {
            out << ",T_" << l << '_' << k;
        }
    }
    out << '\n';
    char buf[32];
    for (std::size_t r = 0; r < trajectory.times.size(); ++r) {
        std::snprintf(buf, sizeof buf, "%.17g", trajectory.times[r]);
        out << buf;
        for (double v : trajectory.states[r].values()) {
            std::snprintf(buf, sizeof buf, "%.17g", v);
            out << ',' << buf;
        }
        out << '\n';
    }
}

} // namespace strain_cascade
