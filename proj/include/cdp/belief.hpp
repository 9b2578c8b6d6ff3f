#pragma once

#include <array>
#include <string>
#include <vector>

#include "cdp/cyber_env.hpp"

namespace cdp {

// Multiset of sampled states approximating the posterior over the latent
// components of the step state.
struct ParticleBelief {
    std::vector<WorldState> particles;

    std::size_t size() const { return particles.size(); }
    // Fraction of particles with the node at Compromised or Root.
    double marginal_compromised(int node) const;
    std::array<double, 5> intrusion_marginal(int node) const;
    double marginal_bline() const;
    std::string to_json() const;  // per-node marginal snapshot for debugging
};

// M independent draws from the episode-start distribution.
ParticleBelief initial_belief(const CyberEnv& env, int particle_count, Rng& rng);

// Prediction step: every particle advanced one transition under the
// intervention. Per-particle streams are derived by splitting `rng`, so pass
// a stream that is unique to this step.
std::vector<WorldState> predict(const ParticleBelief& belief, const Intervention& iv,
                                const CyberEnv& env, Rng& rng);

// Correction step: systematic resampling with weights proportional to the
// observation likelihood. When every weight is zero the predicted set is kept
// and the latent intrusion of a random tenth of the particles is overwritten
// to match the alert pattern. Every returned particle has its observable
// components set to the observation.
ParticleBelief reweight_resample(std::vector<WorldState> predicted, const Observation& obs,
                                 const Intervention& iv, const CyberEnv& env, Rng& rng);

// Exact posterior over an enumerable state space; usable only on micro
// instances (the update cost is quadratic in the support).
struct ExactBelief {
    std::vector<std::pair<WorldState, double>> support;

    double mass_sum() const;
    void normalize();
};

ExactBelief exact_initial(const CyberEnv& env);

ExactBelief exact_update(const ExactBelief& belief, const Intervention& iv, const Observation& obs,
                         const CyberEnv& env);

// Total-variation distance between the particle approximation (as an
// empirical distribution) and an exact belief.
double total_variation(const ParticleBelief& approx, const ExactBelief& exact);

}  // namespace cdp
