// SPDX-License-Identifier: Apache-2.0
#include "ramec/resource.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

namespace ramec {

namespace {

constexpr double kLn2 = 0.69314718055994530941723212145818;

void validate_inputs(const std::vector<double>& gains, const std::vector<UserTaskParams>& params) {
    if (gains.size() != params.size() || params.empty()) {
        throw std::invalid_argument("resource solver: gains/params size mismatch or empty");
    }
    const double frame = params.front().frame;
    for (std::size_t m = 0; m < params.size(); ++m) {
        const UserTaskParams& p = params[m];
        if (!(gains[m] >= 0.0) || !std::isfinite(gains[m])) {
            throw std::invalid_argument("resource solver: gains must be finite and >= 0");
        }
        if (!(p.bandwidth > 0) || !(p.overhead > 1.0) || !(p.cycles_per_bit > 0) ||
            !(p.frame > 0) || !(p.capacitance > 0) || !(p.circuit_power >= 0) ||
            !(p.e_max >= 0) || !(p.r_min >= 0) || !(p.weight > 0)) {
            throw std::invalid_argument("resource solver: invalid task parameters");
        }
        if (std::abs(p.frame - frame) > 1e-12 * frame) {
            throw std::invalid_argument("resource solver: all users must share one frame length");
        }
    }
}

// Spectral efficiency helper: value and partials of
// r(y, tau) = A * tau * ln(1 + gain * y / tau) with A = B / (v ln 2) [bits].
struct RateEval {
    double value = 0;
    double dy = 0, dtau = 0;
    double dyy = 0, dytau = 0, dtautau = 0;
};

RateEval eval_rate(double y, double tau, double gain, double bandwidth, double overhead,
                   double tau_floor) {
    RateEval r;
    if (gain <= 0.0) {
        return r; // rate identically 0
    }
    const double te = std::max(tau, tau_floor);
    const double a = bandwidth / (overhead * kLn2);
    const double u = gain * std::max(y, 0.0) / te;
    const double onePu = 1.0 + u;
    r.value = a * te * std::log1p(u);
    r.dy = a * gain / onePu;
    r.dtau = a * (std::log1p(u) - u / onePu);
    const double common = a / (te * onePu * onePu);
    r.dyy = -common * gain * gain;
    r.dytau = common * gain * u;
    r.dtautau = -common * u * u;
    return r;
}

// Barrier problem over the active users. Variables are scaled to O(1):
// x = [y/ys, tau/T, f/fs] per user, plus one slack variable in phase one.
class BarrierProblem {
  public:
    BarrierProblem(const std::vector<double>& gains, const std::vector<UserTaskParams>& params,
                   std::vector<int> active, bool phase_one)
        : gains_(gains), params_(params), active_(std::move(active)), phase_one_(phase_one) {
        frame_ = params_.front().frame;
        tau_floor_ = 1e-12 * frame_;
        y_scale_.resize(active_.size());
        f_scale_.resize(active_.size());
        double ref = 1.0;
        r_scale_ = 1.0;
        for (std::size_t a = 0; a < active_.size(); ++a) {
            const UserTaskParams& p = params_[active_[a]];
            y_scale_[a] = p.e_max;
            f_scale_[a] = std::cbrt(p.e_max / (frame_ * p.capacitance));
            // crude upper bound on the user's weighted bits, for objective scaling
            const double r_loc = frame_ * f_scale_[a] / p.cycles_per_bit;
            const double r_off = frame_ * (p.bandwidth / p.overhead) *
                                 std::log2(1.0 + gains_[active_[a]] * p.e_max / frame_);
            ref += p.weight * (r_loc + std::max(r_off, 0.0));
            r_scale_ = std::max(r_scale_, p.r_min);
        }
        obj_scale_ = ref;
    }

    int users() const { return static_cast<int>(active_.size()); }
    int dim() const { return 3 * users() + (phase_one_ ? 1 : 0); }
    double frame() const { return frame_; }
    double rate_scale() const { return r_scale_; }
    double objective_scale() const { return obj_scale_; }

    double phys_y(const Eigen::VectorXd& x, int a) const { return x[3 * a] * y_scale_[a]; }
    double phys_tau(const Eigen::VectorXd& x, int a) const { return x[3 * a + 1] * frame_; }
    double phys_f(const Eigen::VectorXd& x, int a) const { return x[3 * a + 2] * f_scale_[a]; }
    double phys_sigma(const Eigen::VectorXd& x) const { return x[3 * users()] * r_scale_; }

    // Unweighted computed bits of active user a.
    double user_bits(const Eigen::VectorXd& x, int a) const {
        const UserTaskParams& p = params_[active_[a]];
        const double r_loc = frame_ * phys_f(x, a) / p.cycles_per_bit;
        const RateEval r = eval_rate(phys_y(x, a), phys_tau(x, a), gains_[active_[a]],
                                     p.bandwidth, p.overhead, tau_floor_);
        return r_loc + r.value;
    }

    // True (unscaled) weighted objective in bits; phase one has none.
    double objective_bits(const Eigen::VectorXd& x) const {
        double total = 0;
        for (int a = 0; a < users(); ++a) {
            const UserTaskParams& p = params_[active_[a]];
            const double r_loc = frame_ * phys_f(x, a) / p.cycles_per_bit;
            const RateEval r = eval_rate(phys_y(x, a), phys_tau(x, a), gains_[active_[a]],
                                         p.bandwidth, p.overhead, tau_floor_);
            total += p.weight * (r_loc + r.value);
        }
        return total;
    }

    // All physical slacks; false if any is non-positive.
    bool slacks(const Eigen::VectorXd& x, std::vector<double>* out = nullptr) const {
        bool ok = true;
        if (out) out->clear();
        auto push = [&](double s) {
            ok = ok && s > 0.0;
            if (out) out->push_back(s);
        };
        double tau_sum = 0;
        for (int a = 0; a < users(); ++a) {
            const UserTaskParams& p = params_[active_[a]];
            const double y = phys_y(x, a), tau = phys_tau(x, a), f = phys_f(x, a);
            tau_sum += tau;
            push(p.e_max - y - tau * p.circuit_power - frame_ * p.capacitance * f * f * f);
            push(y);
            push(tau);
            push(f);
            if (p.r_min > 0) {
                double s = user_bits(x, a) - p.r_min;
                if (phase_one_) s += phys_sigma(x);
                push(s);
            }
        }
        push(frame_ - tau_sum);
        if (phase_one_) push(phys_sigma(x) + 0.05 * r_scale_);
        return ok;
    }

    int num_constraints() const {
        int n = 0;
        for (int a = 0; a < users(); ++a) {
            n += 4 + (params_[active_[a]].r_min > 0 ? 1 : 0);
        }
        return n + 1 + (phase_one_ ? 1 : 0);
    }

    // Scaled barrier value phi = F_hat + mu * sum log(slack). Requires a
    // strictly feasible x; returns -inf otherwise.
    double barrier_value(const Eigen::VectorXd& x, double mu) const {
        std::vector<double> s;
        if (!slacks(x, &s)) return -std::numeric_limits<double>::infinity();
        double phi = scaled_objective(x);
        for (double v : s) phi += mu * std::log(v);
        return phi;
    }

    double scaled_objective(const Eigen::VectorXd& x) const {
        if (phase_one_) return -x[3 * users()];
        return objective_bits(x) / obj_scale_;
    }

    // Gradient and Hessian of the scaled barrier at a strictly feasible x.
    void derivatives(const Eigen::VectorXd& x, double mu, Eigen::VectorXd& grad,
                     Eigen::MatrixXd& hess) const {
        const int n = dim();
        grad.setZero(n);
        hess.setZero(n, n);

        // objective part
        if (phase_one_) {
            grad[3 * users()] -= 1.0;
        }

        double tau_sum = 0;
        std::vector<int> tau_idx;
        tau_idx.reserve(users());

        for (int a = 0; a < users(); ++a) {
            const UserTaskParams& p = params_[active_[a]];
            const double gain = gains_[active_[a]];
            const int iy = 3 * a, it = 3 * a + 1, iff = 3 * a + 2;
            const double ys = y_scale_[a], fs = f_scale_[a];
            const double y = phys_y(x, a), tau = phys_tau(x, a), f = phys_f(x, a);
            tau_sum += tau;
            tau_idx.push_back(it);

            const RateEval r = eval_rate(y, tau, gain, p.bandwidth, p.overhead, tau_floor_);

            if (!phase_one_) {
                const double w = p.weight / obj_scale_;
                grad[iy] += w * r.dy * ys;
                grad[it] += w * r.dtau * frame_;
                grad[iff] += w * (frame_ / p.cycles_per_bit) * fs;
                hess(iy, iy) += w * r.dyy * ys * ys;
                hess(iy, it) += w * r.dytau * ys * frame_;
                hess(it, iy) += w * r.dytau * ys * frame_;
                hess(it, it) += w * r.dtautau * frame_ * frame_;
            }

            // energy: s = e_max - y - tau p_c - T r_c f^3
            {
                const double s = p.e_max - y - tau * p.circuit_power -
                                 frame_ * p.capacitance * f * f * f;
                const double gy = -ys, gt = -p.circuit_power * frame_;
                const double gf = -3.0 * frame_ * p.capacitance * f * f * fs;
                const double hff = -6.0 * frame_ * p.capacitance * f * fs * fs;
                grad[iy] += mu * gy / s;
                grad[it] += mu * gt / s;
                grad[iff] += mu * gf / s;
                hess(iy, iy) -= mu * gy * gy / (s * s);
                hess(iy, it) -= mu * gy * gt / (s * s);
                hess(it, iy) -= mu * gy * gt / (s * s);
                hess(it, it) -= mu * gt * gt / (s * s);
                hess(iy, iff) -= mu * gy * gf / (s * s);
                hess(iff, iy) -= mu * gy * gf / (s * s);
                hess(it, iff) -= mu * gt * gf / (s * s);
                hess(iff, it) -= mu * gt * gf / (s * s);
                hess(iff, iff) += mu * (hff / s - gf * gf / (s * s));
            }

            // variable bounds y, tau, f >= 0 (scaled slacks are x themselves)
            grad[iy] += mu / x[iy];
            grad[it] += mu / x[it];
            grad[iff] += mu / x[iff];
            hess(iy, iy) -= mu / (x[iy] * x[iy]);
            hess(it, it) -= mu / (x[it] * x[it]);
            hess(iff, iff) -= mu / (x[iff] * x[iff]);

            if (p.r_min > 0) {
                // rate: s = [sigma +] r_loc + r_off - r_min  (unweighted bits)
                double s = frame_ * f / p.cycles_per_bit + r.value - p.r_min;
                if (phase_one_) s += phys_sigma(x);
                Eigen::VectorXd gs = Eigen::VectorXd::Zero(n);
                gs[iy] = r.dy * ys;
                gs[it] = r.dtau * frame_;
                gs[iff] = (frame_ / p.cycles_per_bit) * fs;
                if (phase_one_) gs[3 * users()] = r_scale_;
                grad += (mu / s) * gs;
                hess -= (mu / (s * s)) * (gs * gs.transpose());
                hess(iy, iy) += mu * r.dyy * ys * ys / s;
                hess(iy, it) += mu * r.dytau * ys * frame_ / s;
                hess(it, iy) += mu * r.dytau * ys * frame_ / s;
                hess(it, it) += mu * r.dtautau * frame_ * frame_ / s;
            }
        }

        // total airtime: s = T - sum tau
        {
            const double s = frame_ - tau_sum;
            for (int i : tau_idx) grad[i] -= mu * frame_ / s;
            for (int i : tau_idx) {
                for (int j : tau_idx) {
                    hess(i, j) -= mu * frame_ * frame_ / (s * s);
                }
            }
        }

        if (phase_one_) {
            const int is = 3 * users();
            const double s = phys_sigma(x) + 0.05 * r_scale_;
            grad[is] += mu * r_scale_ / s;
            hess(is, is) -= mu * r_scale_ * r_scale_ / (s * s);
        }
    }

  private:
    const std::vector<double>& gains_;
    const std::vector<UserTaskParams>& params_;
    std::vector<int> active_;
    bool phase_one_;
    double frame_ = 1.0;
    double tau_floor_ = 1e-12;
    double obj_scale_ = 1.0;
    double r_scale_ = 1.0;
    std::vector<double> y_scale_, f_scale_;
};

struct NewtonOutcome {
    bool converged = false;
    int iterations = 0;
    double grad_norm = 0;
};

// Damped Newton ascent on the barrier subproblem at fixed mu.
NewtonOutcome newton_solve(const BarrierProblem& prob, Eigen::VectorXd& x, double mu,
                           double grad_tol, int max_iters,
                           const std::function<bool(const Eigen::VectorXd&)>& early_stop = {}) {
    NewtonOutcome out;
    Eigen::VectorXd grad;
    Eigen::MatrixXd hess;
    double prev_grad_norm = std::numeric_limits<double>::infinity();
    int no_progress = 0;
    for (int it = 0; it < max_iters; ++it) {
        prob.derivatives(x, mu, grad, hess);
        out.grad_norm = grad.lpNorm<Eigen::Infinity>();
        if (out.grad_norm <= grad_tol) {
            out.converged = true;
            return out;
        }
        // numeric floor reached: several iterations without gradient decay
        if (out.grad_norm >= 0.9 * prev_grad_norm) {
            if (++no_progress >= 4) return out;
        } else {
            no_progress = 0;
        }
        prev_grad_norm = std::min(prev_grad_norm, out.grad_norm);
        Eigen::MatrixXd neg = -hess;
        Eigen::LDLT<Eigen::MatrixXd> ldlt(neg);
        Eigen::VectorXd step;
        if (ldlt.info() == Eigen::Success) {
            step = ldlt.solve(grad);
        }
        if (ldlt.info() != Eigen::Success || !step.allFinite()) {
            neg += 1e-10 * Eigen::MatrixXd::Identity(neg.rows(), neg.cols());
            step = neg.ldlt().solve(grad);
            if (!step.allFinite()) return out;
        }
        const double slope = grad.dot(step);
        if (!(slope > 0)) return out; // not an ascent direction; give up

        const double phi0 = prob.barrier_value(x, mu);
        // rounding allowance keeps the search alive once phi changes fall
        // below double precision
        const double phi_eps = 1e-14 * std::max(std::abs(phi0), 1.0);
        double alpha = 1.0;
        bool accepted = false;
        for (int ls = 0; ls < 70; ++ls) {
            Eigen::VectorXd cand = x + alpha * step;
            const double phi = prob.barrier_value(cand, mu);
            if (std::isfinite(phi) && phi >= phi0 + 1e-4 * alpha * slope - phi_eps) {
                x = std::move(cand);
                accepted = true;
                break;
            }
            alpha *= 0.5;
        }
        out.iterations = it + 1;
        if (!accepted) return out; // line search stalled
        if (early_stop && early_stop(x)) {
            out.converged = true;
            return out;
        }
    }
    prob.derivatives(x, mu, grad, hess);
    out.grad_norm = grad.lpNorm<Eigen::Infinity>();
    out.converged = out.grad_norm <= grad_tol;
    return out;
}

// Strictly interior starting point: small equal shares of energy and airtime.
Eigen::VectorXd interior_start(const std::vector<double>& gains,
                               const std::vector<UserTaskParams>& params,
                               const std::vector<int>& active) {
    (void)gains;
    const int a_count = static_cast<int>(active.size());
    const double frame = params.front().frame;
    Eigen::VectorXd x(3 * a_count);
    for (int a = 0; a < a_count; ++a) {
        const UserTaskParams& p = params[active[a]];
        double share = 1.0;
        for (int tries = 0; tries < 200; ++tries) {
            const double used = 0.5 * share * p.e_max +
                                share * frame / (2.0 * a_count) * p.circuit_power;
            if (used <= 0.8 * p.e_max) break;
            share *= 0.5;
        }
        x[3 * a] = 0.25 * share;                  // y / e_max
        x[3 * a + 1] = share / (2.0 * a_count);   // tau / T
        x[3 * a + 2] = std::cbrt(0.25 * share);   // f / f_scale
    }
    return x;
}

} // namespace

double ResidualReport::max_violation() const {
    return std::max({energy, time, slot_range, rate_min, nonneg});
}

std::pair<double, double> local_rate_energy(double cpu_freq, const UserTaskParams& params) {
    if (!(cpu_freq >= 0.0)) {
        throw std::invalid_argument("local_rate_energy: cpu_freq must be >= 0");
    }
    const double bits = params.frame * cpu_freq / params.cycles_per_bit;
    const double energy = params.frame * params.capacitance * cpu_freq * cpu_freq * cpu_freq;
    return {bits, energy};
}

double offload_rate(double offload_energy, double slot, double gain, double bandwidth,
                    double overhead) {
    if (!(offload_energy >= 0.0) || !(slot >= 0.0)) {
        throw std::invalid_argument("offload_rate: energy and slot must be >= 0");
    }
    if (slot == 0.0 || offload_energy == 0.0 || gain <= 0.0) {
        return 0.0; // perspective limit at tau = 0; no rate without energy
    }
    return slot * (bandwidth / overhead) * std::log2(1.0 + offload_energy * gain / slot);
}

void fill_derived(Allocation& alloc, const std::vector<double>& gains,
                  const std::vector<UserTaskParams>& params) {
    const int m_count = alloc.num_users();
    alloc.transmit_power.assign(m_count, 0.0);
    alloc.r_loc.assign(m_count, 0.0);
    alloc.r_off.assign(m_count, 0.0);
    alloc.e_loc.assign(m_count, 0.0);
    alloc.e_off.assign(m_count, 0.0);
    for (int m = 0; m < m_count; ++m) {
        const UserTaskParams& p = params[m];
        alloc.transmit_power[m] =
            alloc.slot[m] > 0.0 ? alloc.offload_energy[m] / alloc.slot[m] : 0.0;
        const auto [bits, energy] = local_rate_energy(alloc.cpu_freq[m], p);
        alloc.r_loc[m] = bits;
        alloc.e_loc[m] = energy;
        alloc.r_off[m] =
            offload_rate(alloc.offload_energy[m], alloc.slot[m], gains[m], p.bandwidth, p.overhead);
        alloc.e_off[m] = alloc.offload_energy[m] + alloc.slot[m] * p.circuit_power;
    }
}

ResidualReport validate_allocation(const Allocation& alloc, const std::vector<double>& gains,
                                   const std::vector<UserTaskParams>& params) {
    const int m_count = alloc.num_users();
    if (static_cast<int>(gains.size()) != m_count || static_cast<int>(params.size()) != m_count) {
        throw std::invalid_argument("validate_allocation: size mismatch");
    }
    ResidualReport report;
    double tau_sum = 0;
    for (int m = 0; m < m_count; ++m) {
        const UserTaskParams& p = params[m];
        const double y = alloc.offload_energy[m], tau = alloc.slot[m], f = alloc.cpu_freq[m];
        tau_sum += tau;
        const double r_loc = p.frame * std::max(f, 0.0) / p.cycles_per_bit;
        const double r_off =
            (y > 0 && tau > 0) ? offload_rate(y, tau, gains[m], p.bandwidth, p.overhead) : 0.0;
        const double e_used = std::max(y, 0.0) + std::max(tau, 0.0) * p.circuit_power +
                              p.frame * p.capacitance * std::max(f, 0.0) * std::max(f, 0.0) *
                                  std::max(f, 0.0);
        report.energy = std::max(report.energy, e_used - p.e_max);
        report.slot_range = std::max({report.slot_range, -tau, tau - p.frame});
        report.rate_min = std::max(report.rate_min, p.r_min - (r_loc + r_off));
        report.nonneg = std::max({report.nonneg, -y, -f});
        if (tau == 0.0 && y > 0.0) {
            report.nonneg = std::max(report.nonneg, y); // energy spent with no airtime
        }
        report.objective += p.weight * (r_loc + r_off);
    }
    report.time = std::max(0.0, tau_sum - params.front().frame);
    report.energy = std::max(report.energy, 0.0);
    report.slot_range = std::max(report.slot_range, 0.0);
    report.rate_min = std::max(report.rate_min, 0.0);
    report.nonneg = std::max(report.nonneg, 0.0);
    return report;
}

std::pair<Allocation, ResourceReport> solve_resource_allocation(
    const std::vector<double>& gains, const std::vector<UserTaskParams>& params,
    const SolverSettings& settings) {
    validate_inputs(gains, params);
    if (!(settings.kkt_tol > 0) || !(settings.barrier_mu > 0) || !(settings.barrier_mu < 1)) {
        throw std::invalid_argument("resource solver: invalid settings");
    }
    const int m_count = static_cast<int>(params.size());
    const double frame = params.front().frame;

    Allocation alloc;
    alloc.offload_energy.assign(m_count, 0.0);
    alloc.slot.assign(m_count, 0.0);
    alloc.cpu_freq.assign(m_count, 0.0);
    ResourceReport report;

    // Users with no energy budget stay all-zero; they are infeasible only if
    // they still owe minimum bits.
    std::vector<int> active;
    for (int m = 0; m < m_count; ++m) {
        if (params[m].e_max > 0) {
            active.push_back(m);
        } else if (params[m].r_min > 0) {
            report.feasible = false;
            report.infeasible_user = m;
            report.message = "user cannot reach r_min with zero energy budget";
        }
    }

    // Per-user reachability of r_min: full frame and full budget, alone.
    if (report.feasible) {
        for (int m : active) {
            if (params[m].r_min <= 0) continue;
            std::vector<UserTaskParams> solo_params{params[m]};
            solo_params[0].r_min = 0.0;
            solo_params[0].weight = 1.0;
            const auto [solo_alloc, solo_rep] =
                solve_resource_allocation({gains[m]}, solo_params, settings);
            const double best_bits = solo_alloc.r_loc[0] + solo_alloc.r_off[0];
            (void)solo_rep;
            if (best_bits < params[m].r_min) {
                report.feasible = false;
                report.infeasible_user = m;
                report.message = "user cannot reach r_min even with the full frame and budget";
                break;
            }
        }
    }

    if (active.empty() || !report.feasible) {
        fill_derived(alloc, gains, params);
        report.residuals = validate_allocation(alloc, gains, params);
        report.converged = report.feasible;
        return {alloc, report};
    }

    bool need_phase_one = false;
    for (int m : active) need_phase_one = need_phase_one || params[m].r_min > 0;

    Eigen::VectorXd x = interior_start(gains, params, active);

    if (need_phase_one) {
        BarrierProblem p1(gains, params, active, /*phase_one=*/true);
        // start sigma above the worst deficit
        double deficit = 0;
        Eigen::VectorXd x1(p1.dim());
        x1.head(3 * p1.users()) = x;
        x1[3 * p1.users()] = 0;
        for (int a = 0; a < p1.users(); ++a) {
            const int m = active[a];
            if (params[m].r_min > 0) {
                deficit = std::max(deficit, params[m].r_min - p1.user_bits(x1, a));
            }
        }
        x1[3 * p1.users()] = (deficit + 0.1 * p1.rate_scale()) / p1.rate_scale();

        const auto feasible_enough = [&](const Eigen::VectorXd& z) {
            return z[3 * p1.users()] < -0.02;
        };
        double mu = 1.0;
        bool found = feasible_enough(x1);
        for (int outer = 0; outer < settings.max_outer_iters && !found; ++outer) {
            newton_solve(p1, x1, mu, 0.1 * mu, settings.max_newton_iters, feasible_enough);
            found = feasible_enough(x1);
            mu *= settings.barrier_mu;
            if (mu < 1e-9) break;
        }
        if (!found) {
            // jointly infeasible: name the worst-deficit user
            int worst = active[0];
            double worst_gap = -std::numeric_limits<double>::infinity();
            for (int a = 0; a < p1.users(); ++a) {
                const int m = active[a];
                if (params[m].r_min <= 0) continue;
                const double gap = params[m].r_min - p1.user_bits(x1, a);
                if (gap > worst_gap) {
                    worst_gap = gap;
                    worst = m;
                }
            }
            report.feasible = false;
            report.infeasible_user = worst;
            report.message = "r_min targets are jointly unreachable within the frame";
            fill_derived(alloc, gains, params);
            report.residuals = validate_allocation(alloc, gains, params);
            return {alloc, report};
        }
        x = x1.head(3 * p1.users());
    }

    BarrierProblem prob(gains, params, active, /*phase_one=*/false);
    const int n_con = prob.num_constraints();
    const double mu_final = std::max(0.25 * settings.kkt_tol, 1e-12);
    double mu = std::max(0.1, std::abs(prob.scaled_objective(x)) / n_con);

    int total_newton = 0;
    int outer = 0;
    double grad_norm = std::numeric_limits<double>::infinity();
    while (true) {
        const double gtol = std::max(0.1 * mu, 1e-11);
        const NewtonOutcome nout = newton_solve(prob, x, mu, gtol, settings.max_newton_iters);
        total_newton += nout.iterations;
        grad_norm = nout.grad_norm;
        ++outer;
        if (mu <= mu_final || outer >= settings.max_outer_iters) break;
        mu = std::max(mu * settings.barrier_mu, mu_final);
    }

    report.outer_iterations = outer;
    report.newton_iterations = total_newton;
    report.kkt_stationarity = grad_norm;
    report.kkt_complementarity = mu;
    report.converged = mu <= mu_final && grad_norm <= settings.kkt_tol;

    for (std::size_t a = 0; a < active.size(); ++a) {
        const int m = active[a];
        alloc.offload_energy[m] = prob.phys_y(x, static_cast<int>(a));
        alloc.slot[m] = prob.phys_tau(x, static_cast<int>(a));
        alloc.cpu_freq[m] = prob.phys_f(x, static_cast<int>(a));
    }

    // Snap vanishing offload allocations to exact zero when this costs nothing:
    // users whose offload contribution is negligible and whose r_min (if any)
    // is already covered locally.
    fill_derived(alloc, gains, params);
    double obj = 0;
    for (int m = 0; m < m_count; ++m) obj += params[m].weight * (alloc.r_loc[m] + alloc.r_off[m]);
    for (int m = 0; m < m_count; ++m) {
        const bool negligible = params[m].weight * alloc.r_off[m] <= 1e-12 * std::max(obj, 1.0) ||
                                alloc.slot[m] < 1e-9 * frame;
        const bool r_min_safe = params[m].r_min <= 0 || alloc.r_loc[m] >= params[m].r_min;
        if (negligible && r_min_safe) {
            alloc.offload_energy[m] = 0.0;
            alloc.slot[m] = 0.0;
        }
    }
    fill_derived(alloc, gains, params);
    report.residuals = validate_allocation(alloc, gains, params);
    return {alloc, report};
}

} // namespace ramec
