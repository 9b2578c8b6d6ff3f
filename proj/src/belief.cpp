#include "cdp/belief.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include <json.hpp>

namespace cdp {

double ParticleBelief::marginal_compromised(int node) const {
    if (particles.empty()) return 0.0;
    std::size_t hits = 0;
    for (const auto& p : particles) {
        auto lvl = p.nodes[node].intrusion;
        if (lvl == IntrusionLevel::Compromised || lvl == IntrusionLevel::Root) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(particles.size());
}

std::array<double, 5> ParticleBelief::intrusion_marginal(int node) const {
    std::array<double, 5> out{};
    if (particles.empty()) return out;
    for (const auto& p : particles) out[static_cast<int>(p.nodes[node].intrusion)] += 1.0;
    for (auto& v : out) v /= static_cast<double>(particles.size());
    return out;
}

double ParticleBelief::marginal_bline() const {
    if (particles.empty()) return 0.0;
    std::size_t hits = 0;
    for (const auto& p : particles)
        if (p.attacker_tag == AttackerTag::BLine) ++hits;
    return static_cast<double>(hits) / static_cast<double>(particles.size());
}

std::string ParticleBelief::to_json() const {
    nlohmann::json j;
    j["particles"] = particles.size();
    j["p_bline"] = marginal_bline();
    nlohmann::json nodes = nlohmann::json::array();
    if (!particles.empty()) {
        static const char* kLevels[5] = {"U", "K", "S", "C", "R"};
        for (std::size_t i = 0; i < particles.front().nodes.size(); ++i) {
            auto m = intrusion_marginal(static_cast<int>(i));
            nlohmann::json jm;
            for (int l = 0; l < 5; ++l) jm[kLevels[l]] = m[l];
            nodes.push_back(jm);
        }
    }
    j["intrusion_marginals"] = nodes;
    return j.dump();
}

ParticleBelief initial_belief(const CyberEnv& env, int particle_count, Rng& rng) {
    ParticleBelief b;
    b.particles.reserve(particle_count);
    Rng base = rng.split("initial-belief");
    for (int i = 0; i < particle_count; ++i) {
        Rng pr = base.split(static_cast<std::uint64_t>(i));
        b.particles.push_back(env.initial_state(pr));
    }
    return b;
}

std::vector<WorldState> predict(const ParticleBelief& belief, const Intervention& iv,
                                const CyberEnv& env, Rng& rng) {
    std::vector<WorldState> out;
    out.reserve(belief.particles.size());
    Rng base = rng.split("predict");
    for (std::size_t i = 0; i < belief.particles.size(); ++i) {
        Rng pr = base.split(i);
        out.push_back(env.transition(belief.particles[i], iv, pr));
    }
    return out;
}

namespace {

void sync_observables(WorldState& p, const Observation& obs) {
    for (std::size_t i = 0; i < p.nodes.size(); ++i) {
        p.nodes[i].decoys = obs.decoys[i];
        p.nodes[i].service = obs.service[i];
    }
    p.client_count = obs.client_count;
    p.last_activity = obs.activity;
}

// Overwrites the latent intrusion of one particle so that it is consistent
// with the alert pattern: a scan alert forces at least Scanned, a compromise
// alert at least Compromised, an exact root report forces Root.
void force_alert_consistency(WorldState& p, const Observation& obs, Rng& rng) {
    for (std::size_t i = 0; i < p.nodes.size(); ++i) {
        if (obs.activity[i] == IntrusionLevel::Scanned &&
            p.nodes[i].intrusion < IntrusionLevel::Scanned)
            p.nodes[i].intrusion = IntrusionLevel::Scanned;
        else if (obs.activity[i] == IntrusionLevel::Compromised &&
                 p.nodes[i].intrusion < IntrusionLevel::Compromised)
            p.nodes[i].intrusion =
                rng.bernoulli(0.5) ? IntrusionLevel::Root : IntrusionLevel::Compromised;
        else if (obs.activity[i] == IntrusionLevel::Root &&
                 p.nodes[i].intrusion < IntrusionLevel::Root)
            p.nodes[i].intrusion = IntrusionLevel::Root;
    }
}

// A service observed down that the defender did not just restore can only
// have been disrupted by the attacker, which requires root on that node.
// This is an implication of the observation, so it applies to every particle.
void force_service_consistency(WorldState& p, const Observation& obs, const Intervention& iv) {
    for (std::size_t i = 0; i < p.nodes.size(); ++i) {
        bool restored_here =
            iv.kind == Intervention::Kind::Restore && iv.node == static_cast<int>(i);
        if (obs.service[i] == 0 && !restored_here) p.nodes[i].intrusion = IntrusionLevel::Root;
    }
}

}  // namespace

ParticleBelief reweight_resample(std::vector<WorldState> predicted, const Observation& obs,
                                 const Intervention& iv, const CyberEnv& env, Rng& rng) {
    const std::size_t m = predicted.size();
    if (m == 0) throw PreconditionError("reweight_resample needs a non-empty predicted set");
    std::vector<double> weights(m, 0.0);
    double total = 0.0;
    double best_ll = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < m; ++i) {
        double ll = env.observation_loglik(predicted[i], iv, obs);
        weights[i] = std::isfinite(ll) ? std::exp(ll) : 0.0;
        best_ll = std::max(best_ll, ll);
        total += weights[i];
    }
    // The set is deprived when a fresh alert appears that no particle
    // explains better than the pure-noise channel: the signal would have to
    // be a coincidence under every hypothesis in the set.
    bool deprived = total <= 0.0;
    if (!deprived) {
        const auto& prev = predicted.front().last_activity;
        bool changed = false;
        for (std::size_t i = 0; i < prev.size(); ++i) changed = changed || obs.activity[i] != prev[i];
        if (changed) {
            double coincidence = env.coincidence_loglik(prev, obs);
            if (std::isfinite(coincidence) && best_ll <= coincidence + 1e-9) deprived = true;
        }
    }
    Rng r = rng.split("resample");
    ParticleBelief out;
    out.particles.reserve(m);
    if (deprived) {
        // Particle deprivation: keep the predicted set with uniform weights
        // and rewrite a random tenth to agree with the alerts.
        out.particles = std::move(predicted);
        for (auto& p : out.particles) force_service_consistency(p, obs, iv);
        std::size_t k = std::max<std::size_t>(1, m / 10);
        for (std::size_t j = 0; j < k; ++j) {
            std::size_t idx = r.integer(m);
            force_alert_consistency(out.particles[idx], obs, r);
        }
    } else {
        // Systematic resampling.
        double step = total / static_cast<double>(m);
        double u = r.uniform() * step;
        double cum = weights[0];
        std::size_t idx = 0;
        for (std::size_t j = 0; j < m; ++j) {
            double target = u + static_cast<double>(j) * step;
            while (cum < target && idx + 1 < m) cum += weights[++idx];
            out.particles.push_back(predicted[idx]);
        }
    }
    for (auto& p : out.particles) sync_observables(p, obs);
    return out;
}

double ExactBelief::mass_sum() const {
    double s = 0.0;
    for (const auto& [state, mass] : support) s += mass;
    return s;
}

void ExactBelief::normalize() {
    double s = mass_sum();
    if (s <= 0.0) throw ImpossibleObservationError("exact belief has zero total mass");
    for (auto& [state, mass] : support) mass /= s;
}

ExactBelief exact_initial(const CyberEnv& env) {
    ExactBelief b;
    double p = env.scenario().attacker.p_bline;
    if (p > 0.0) b.support.emplace_back(env.initial_state(AttackerTag::BLine), p);
    if (p < 1.0) b.support.emplace_back(env.initial_state(AttackerTag::Meander), 1.0 - p);
    return b;
}

ExactBelief exact_update(const ExactBelief& belief, const Intervention& iv, const Observation& obs,
                         const CyberEnv& env) {
    std::unordered_map<std::string, std::size_t> index;
    ExactBelief out;
    for (const auto& [state, mass] : belief.support) {
        if (mass <= 0.0) continue;
        for (auto& [next, p] : env.transition_support(state, iv)) {
            double ll = env.observation_loglik(next, iv, obs);
            if (!std::isfinite(ll)) continue;
            double w = mass * p * std::exp(ll);
            if (w <= 0.0) continue;
            WorldState synced = next;
            synced.last_activity = obs.activity;
            std::string k = synced.key();
            auto [it, inserted] = index.try_emplace(k, out.support.size());
            if (inserted)
                out.support.emplace_back(std::move(synced), w);
            else
                out.support[it->second].second += w;
        }
    }
    if (out.support.empty() || out.mass_sum() <= 0.0)
        throw ImpossibleObservationError(
            "observation has zero probability under every state in the support");
    out.normalize();
    return out;
}

double total_variation(const ParticleBelief& approx, const ExactBelief& exact) {
    std::unordered_map<std::string, double> emp;
    const double w = 1.0 / static_cast<double>(approx.particles.size());
    for (const auto& p : approx.particles) emp[p.key()] += w;
    double tv = 0.0;
    std::unordered_map<std::string, double> ex;
    for (const auto& [state, mass] : exact.support) ex[state.key()] += mass;
    for (const auto& [k, q] : ex) {
        auto it = emp.find(k);
        double pe = it == emp.end() ? 0.0 : it->second;
        tv += std::abs(pe - q);
        if (it != emp.end()) emp.erase(it);
    }
    for (const auto& [k, pe] : emp) tv += pe;
    return 0.5 * tv;
}

}  // namespace cdp
