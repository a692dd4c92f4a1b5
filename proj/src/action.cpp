#include "flockring/action.hpp"

#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "flockring/errors.hpp"

namespace flockring {

namespace {

void require(bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(what);
}

double sigma_1(double z) { return z / std::sqrt(1.0 + z * z); }

// Shared sigmoid core: 0.5*[(a+b)*sigma_1(arg) + (a-b)] with the offset
// c = |a-b|/sqrt(4ab) baked into arg by the callers.
double sigmoid_c(double a, double b) { return std::abs(a - b) / std::sqrt(4.0 * a * b); }

double adaptive_simpson(const std::function<double(double)>& f, double lo, double hi,
                        double flo, double fmid, double fhi, double whole, double tol,
                        int depth) {
    const double mid = 0.5 * (lo + hi);
    const double lmid = 0.5 * (lo + mid);
    const double rmid = 0.5 * (mid + hi);
    const double flmid = f(lmid);
    const double frmid = f(rmid);
    const double left = (mid - lo) / 6.0 * (flo + 4.0 * flmid + fmid);
    const double right = (hi - mid) / 6.0 * (fmid + 4.0 * frmid + fhi);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol) {
        return left + right + delta / 15.0;
    }
    return adaptive_simpson(f, lo, mid, flo, flmid, fmid, left, tol / 2.0, depth - 1) +
           adaptive_simpson(f, mid, hi, fmid, frmid, fhi, right, tol / 2.0, depth - 1);
}

} // namespace

double integrate(const std::function<double(double)>& f, double lo, double hi,
                 double abs_tol) {
    if (lo == hi) return 0.0;
    const double flo = f(lo);
    const double fhi = f(hi);
    const double fmid = f(0.5 * (lo + hi));
    const double whole = (hi - lo) / 6.0 * (flo + 4.0 * fmid + fhi);
    return adaptive_simpson(f, lo, hi, flo, fmid, fhi, whole, abs_tol, 48);
}

double sigma_norm(double z, double eps) {
    require(eps > 0.0 && eps < 1.0, "sigma_norm: eps must be in (0,1)");
    require(std::isfinite(z), "sigma_norm: non-finite input");
    return (std::sqrt(1.0 + eps * z * z) - 1.0) / eps;
}

double sigma_norm(const Vec2& z, double eps) {
    require(z.allFinite(), "sigma_norm: non-finite input");
    return sigma_norm(z.norm(), eps);
}

Vec2 n_vector(const Vec2& q_from, const Vec2& q_to, double eps) {
    const Vec2 diff = q_to - q_from;
    return diff / std::sqrt(1.0 + eps * diff.squaredNorm());
}

double bump(double z, double h) {
    require(h > 0.0 && h < 1.0, "bump: h must be in (0,1)");
    if (z >= 0.0 && z < h) return 1.0;
    if (z >= h && z <= 1.0) {
        return 0.5 * (1.0 + std::cos(std::numbers::pi * (z - h) / (1.0 - h)));
    }
    return 0.0;
}

double phi(double z, double a, double b) {
    require(a > 0.0 && a <= b, "phi: requires 0 < a <= b");
    const double c = sigmoid_c(a, b);
    return 0.5 * ((a + b) * sigma_1(z + c) + (a - b));
}

double ActionParams::d_alpha() const { return sigma_norm(d, eps); }
double ActionParams::r_alpha() const { return sigma_norm(r(), eps); }
double ActionParams::d_beta() const { return sigma_norm(d_obs, eps); }
double ActionParams::r_beta() const { return sigma_norm(r_obs, eps); }
double ActionParams::d_alpha_l() const { return sigma_norm(d_l, eps_l); }

void ActionParams::validate() const {
    require(a > 0.0 && a <= b, "ActionParams: requires 0 < a <= b");
    require(a_l > 0.0 && a_l <= b_l, "ActionParams: requires 0 < a_l <= b_l");
    require(eps > 0.0 && eps < 1.0, "ActionParams: eps must be in (0,1)");
    require(eps_l > 0.0 && eps_l < 1.0, "ActionParams: eps_l must be in (0,1)");
    require(h > 0.0 && h < 1.0, "ActionParams: h must be in (0,1)");
    require(h_l > 0.0 && h_l < 1.0, "ActionParams: h_l must be in (0,1)");
    require(a_sigma_l > 0.0, "ActionParams: a_sigma_l must be positive");
    require(d > 0.0, "ActionParams: d must be positive");
    require(d_obs > 0.0, "ActionParams: d_obs must be positive");
    require(d_l > 0.0, "ActionParams: d_l must be positive");
    require(kappa > 1.0 && kappa < 2.0, "ActionParams: kappa must satisfy 1 < kappa < 2");
    require(r_obs > 0.0, "ActionParams: r_obs must be positive");
}

double phi_alpha(double z, const ActionParams& p) {
    const double r_a = p.r_alpha();
    if (z >= r_a) return 0.0;
    return bump(z / r_a, p.h) * phi(z - p.d_alpha(), p.a, p.b);
}

double phi_beta(double z, const ActionParams& p) {
    const double d_b = p.d_beta();
    if (z >= d_b) return 0.0;
    return bump(z / d_b, p.h) * (sigma_1(z - d_b) - 1.0);
}

double phi_alpha_l(double z, const ActionParams& p) {
    const double d_al = p.d_alpha_l();
    const double c = sigmoid_c(p.a_l, p.b_l);
    const double arg = (z - d_al) / (p.a_sigma_l * d_al) + c;
    return 0.5 * ((p.a_l + p.b_l) * sigma_1(arg) + (p.a_l - p.b_l));
}

int CirclePlan::total_agents() const {
    return std::accumulate(counts.begin(), counts.end(), 0);
}

void CirclePlan::validate(double kappa) const {
    const auto fail = [](const std::string& msg) { throw PlanError(msg); };
    const int nc = n();
    if (nc < 1) fail("plan has no circles");
    if (static_cast<int>(counts.size()) != nc) fail("counts/radii size mismatch");
    if (static_cast<int>(cutoffs.size()) != nc - 1) fail("expected one cut-off per inner circle");
    if (static_cast<int>(amplitudes.size()) != nc - 1) fail("expected one amplitude per inner circle");
    if (counts[0] < 3) fail("first circle needs at least 3 agents");
    if (d_eps <= 0.0) fail("d_eps must be positive");
    if (d < 1.0) fail("agent spacing below feasibility bound d >= 1");
    for (int i = 0; i < nc; ++i) {
        if (counts[i] < 1) fail("circle " + std::to_string(i + 1) + " has no agents");
    }
    const double r = kappa * d;
    for (int i = 1; i < nc; ++i) {
        if (radii[i] <= radii[i - 1]) fail("radii must be strictly increasing");
        const double gap = radii[i] - radii[i - 1];
        if (r >= gap) {
            std::ostringstream os;
            os << "interaction range r=" << r << " must be below the circle gap "
               << radii[i] << " - " << radii[i - 1] << " = " << gap
               << " (circles " << i << " and " << i + 1 << ")";
            fail(os.str());
        }
    }
    for (int i = 0; i + 1 < nc; ++i) {
        if (!(cutoffs[i] > radii[i] && cutoffs[i] < radii[i + 1])) {
            std::ostringstream os;
            os << "cut-off " << cutoffs[i] << " of circle " << i + 1
               << " must lie strictly between radii " << radii[i] << " and " << radii[i + 1];
            fail(os.str());
        }
    }
}

namespace {

// Branches 1..k of the piecewise leader action function, where branch k runs
// without cut-off or amplitude. Conditions compare z against the sigma-images
// of the cut-offs so both sides of each inequality live in sigma-space.
double piecewise_leader(double z, int k, const CirclePlan& plan, const ActionParams& p) {
    for (int i = 0; i + 1 < k; ++i) {
        const double cut = sigma_norm(plan.cutoffs[i], p.eps_l);
        if (z <= cut) {
            return plan.amplitudes[i] * bump(z / cut, p.h_l) *
                   phi(z - sigma_norm(plan.radii[i], p.eps_l), p.a_l, p.b_l);
        }
    }
    return phi(z - sigma_norm(plan.radii[k - 1], p.eps_l), p.a_l, p.b_l);
}

} // namespace

double phi_alpha_l_multi(double z, const CirclePlan& plan, const ActionParams& p) {
    plan.validate(p.kappa);
    return piecewise_leader(z, plan.n(), plan, p);
}

double phi_alpha_l_switched(double z, double t, const CirclePlan& plan, const ActionParams& p) {
    plan.validate(p.kappa);
    require(t >= 0.0, "phi_alpha_l_switched: t must be nonnegative");
    int k = plan.n();
    if (plan.ts > 0.0) {
        k = std::min(static_cast<int>(std::floor(t / plan.ts)) + 1, plan.n());
    }
    return piecewise_leader(z, k, plan, p);
}

double psi_alpha(double z, const ActionParams& p) {
    return integrate([&p](double s) { return phi_alpha(s, p); }, p.d_alpha(), z);
}

} // namespace flockring
