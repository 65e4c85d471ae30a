#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "triflex/analysis.hpp"
#include "triflex/dynamics.hpp"

namespace triflex {

/// Per-sample signals derived from a recorded state. For error-space runs
/// the position-only columns (cross, speeds) are NaN.
struct DerivedSample {
    double e1{0.0}, e2{0.0}, e3{0.0};
    double gamma{0.0};  ///< signed inter-link angle
    double cross{0.0};  ///< cross2(z1_hat, z2_hat), collinearity residual
    double speed1{0.0}, speed2{0.0}, speed3{0.0};
};

/// Fixed-step trajectory record. times are strictly increasing; samples and
/// derived have matching lengths. aborted marks a degeneracy stop, with the
/// partial trajectory retained up to abort_time.
struct Trajectory {
    std::vector<double> times;
    std::vector<std::vector<double>> samples;
    std::vector<DerivedSample> derived;
    bool aborted{false};
    double abort_time{0.0};
    std::string abort_reason;
};

/// Asymptotics extracted from the trailing window of a completed run.
struct ConvergenceReport {
    ErrorVec final_errors;
    double final_gamma{0.0};
    Vec2 steady_velocity;               ///< mean of the agent velocities
    double steady_speed{0.0};           ///< ||steady_velocity||
    std::array<Vec2, 3> agent_velocities{};  ///< per-agent window averages
    double collinearity_residual{0.0};
    double min_link_distance{0.0};      ///< min over every step of ||z1||, ||z2||
    EquilibriumReport classified;
};

/// One deterministic run: parameters, initial condition, step size,
/// duration and recording cadence. If no explicit initial state or error
/// vector is given, the position start is drawn by random_initial(seed).
struct Scenario {
    FormationSpec spec;
    std::optional<FormationState> initial;
    std::optional<ErrorVec> initial_errors;
    double dt{0.01};
    double horizon{120.0};
    int record_every{10};
    std::uint64_t seed{1};
    double spread{20.0};        ///< side of the sampling box for random starts
    double classify_tol{1e-4};  ///< tolerance for the end-state classification

    void validate() const;  // throws ConfigError
};

using StateVec = std::vector<double>;
using Field = std::function<void(const StateVec&, StateVec&)>;
using StepObserver = std::function<void(double, const StateVec&)>;

/// Classical 4th-order Runge-Kutta with fixed step dt over ceil(horizon/dt)
/// steps. Records every record_every-th step, always including t = 0 and
/// the final time. A DegenerateVector or InvalidErrorVec thrown by the
/// field aborts the run, returning the partial trajectory with the abort
/// time stamped. The observer, when set, sees every accepted step.
Trajectory integrate(const Field& field, StateVec x0, double dt, double horizon,
                     int record_every, const StepObserver& observer = {});

struct SimResult {
    Trajectory trajectory;
    std::optional<ConvergenceReport> report;  ///< empty when the run aborted
};

/// Integrates the scenario's position-space closed loop, fills per-sample
/// derived signals, and summarizes the trailing 10% of the horizon.
SimResult simulate(const Scenario& sc);

/// Integrates the matching self-contained error system from
/// sc.initial_errors (or from the errors of sc.initial when unset).
Trajectory simulate_errors(const Scenario& sc);

/// Applies a rigid motion to every agent: p_i -> R p_i + t.
FormationState se2_apply(const FormationState& s, const SE2Transform& g);

/// Deterministic random start in a box of side spread centered at the
/// origin. Resamples until all pairwise distances exceed max(1, 1e-3 spread)
/// and the links are not collinear within residual 1e-3. Throws
/// SamplingFailed after 1000 attempts.
FormationState random_initial(std::uint64_t seed, const FormationSpec& spec, double spread);

/// Forced-collinear start: three distinct points on a random line through
/// the origin-centered box. Pairwise separations exceed max(1, 1e-3 spread).
FormationState collinear_initial(std::uint64_t seed, const FormationSpec& spec, double spread);

/// Packs a state as [p1x, p1y, p2x, p2y, p3x, p3y].
StateVec pack_state(const FormationState& s);
FormationState unpack_state(const StateVec& x);

}  // namespace triflex
