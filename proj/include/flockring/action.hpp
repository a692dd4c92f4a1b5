#pragma once

#include <functional>
#include <vector>

#include "flockring/geometry.hpp"

namespace flockring {

/// Scalar parameters of the sigma-norm / sigmoid / bump function stack.
/// All sigma-mapped quantities (d_alpha, r_alpha, ...) are derived on demand
/// from the raw distances stored here; they are never cached.
struct ActionParams {
    double a = 5.0;         ///< agent-agent sigmoid lower bound, 0 < a <= b
    double b = 5.0;         ///< agent-agent sigmoid upper bound
    double a_l = 3.0;       ///< agent-leader sigmoid lower bound, 0 < a_l <= b_l
    double b_l = 3.0;       ///< agent-leader sigmoid upper bound
    double eps = 0.1;       ///< sigma-norm parameter for agent/obstacle terms, (0,1)
    double eps_l = 0.1;     ///< sigma-norm parameter for leader terms, (0,1)
    double h = 0.2;         ///< bump plateau fraction for agent terms, (0,1)
    double h_l = 0.2;       ///< bump plateau fraction for leader cut-offs, (0,1)
    double a_sigma_l = 1.0; ///< leader-sigmoid slope scale, > 0
    double d = 1.0;         ///< desired agent-agent distance
    double d_obs = 2.0;     ///< desired agent-obstacle distance d'
    double d_l = 5.0;       ///< desired agent-leader distance (single-circle radius)
    double kappa = 1.2;     ///< interaction-range ratio, r = kappa*d, 1 < kappa << 2
    double r_obs = 3.0;     ///< agent-obstacle sensing range r'

    double r() const { return kappa * d; }

    // Sigma-space images of the distances above.
    double d_alpha() const;
    double r_alpha() const;
    double d_beta() const;
    double r_beta() const;
    double d_alpha_l() const;

    /// Throws std::invalid_argument naming the first violated constraint.
    void validate() const;
};

/// Geometry of a concentric multi-circle formation: per-circle radii and
/// agent counts sharing one inter-agent spacing, plus the cut-off radii that
/// expel each circle's surplus agents outward.
struct CirclePlan {
    std::vector<double> radii;      ///< strictly increasing leader distances
    std::vector<int> counts;        ///< agents per circle
    std::vector<double> amplitudes; ///< action gains of circles 1..n-1
    std::vector<double> cutoffs;    ///< cut-off radii r_L of circles 1..n-1
    double d = 0.0;                 ///< shared agent spacing
    double d_eps = 0.0;             ///< cut-off margin
    double ts = 0.0;                ///< switch interval, seconds

    int n() const { return static_cast<int>(radii.size()); }
    int total_agents() const;

    /// Re-checks every plan invariant; throws PlanError naming the first
    /// violated inequality. plan_circles() returns validated plans only.
    void validate(double kappa) const;
};

/// Smoothed norm (1/eps)(sqrt(1+eps*|z|^2)-1); differentiable at zero.
double sigma_norm(double z, double eps);
double sigma_norm(const Vec2& z, double eps);

/// Gradient of the sigma-norm: (q_to - q_from)/sqrt(1+eps*|q_to - q_from|^2).
Vec2 n_vector(const Vec2& q_from, const Vec2& q_to, double eps);

/// Smooth cut-off: 1 on [0,h), half-cosine blend on [h,1], 0 elsewhere.
double bump(double z, double h);

/// Uneven sigmoid with phi(0)=0 and range (-b, a); requires 0 < a <= b.
double phi(double z, double a, double b);

/// Agent-agent action function: bump(z/r_alpha) * phi(z - d_alpha).
/// Zero at z = d_alpha and identically zero for z >= r_alpha.
double phi_alpha(double z, const ActionParams& p);

/// Agent-obstacle action function; non-positive everywhere, zero beyond d_beta.
double phi_beta(double z, const ActionParams& p);

/// Single-circle agent-leader action function. No cut-off: attraction persists
/// at any distance beyond d_l. The sigmoid argument is scaled by
/// 1/(a_sigma_l * d_alpha_l) so larger a_sigma_l flattens the slope, and the
/// zero crossing sits at z = d_alpha_l.
double phi_alpha_l(double z, const ActionParams& p);

/// Piecewise multi-circle leader action function: branch i applies the i-th
/// circle's cut-off bump and amplitude; the last branch has neither.
/// Branch boundaries compare z against the sigma-images of plan.cutoffs.
double phi_alpha_l_multi(double z, const CirclePlan& plan, const ActionParams& p);

/// Time-switched variant: only the first min(floor(t/ts)+1, n) circles are
/// active and the outermost active branch runs without cut-off or amplitude.
/// Equals phi_alpha_l_multi for t beyond the last switch.
double phi_alpha_l_switched(double z, double t, const CirclePlan& plan, const ActionParams& p);

/// Pairwise potential: integral of phi_alpha from d_alpha to z (adaptive
/// Simpson, abs tol 1e-8). Diagnostic only; not used in the control loop.
double psi_alpha(double z, const ActionParams& p);

/// Adaptive Simpson quadrature of f over [lo, hi].
double integrate(const std::function<double(double)>& f, double lo, double hi,
                 double abs_tol = 1e-8);

} // namespace flockring
