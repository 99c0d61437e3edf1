#include "osim/config.hpp"

#include <cmath>

#include "osim/errors.hpp"
#include "osim/format.hpp"

namespace osim {

DistConfig DistConfig::constant(double v) {
    DistConfig d;
    d.kind = DistKind::Constant;
    d.value = v;
    return d;
}

DistConfig DistConfig::uniform(double lo, double hi) {
    DistConfig d;
    d.kind = DistKind::Uniform;
    d.lo = lo;
    d.hi = hi;
    return d;
}

DistConfig DistConfig::bimodal(double lo, double hi, double fraction) {
    DistConfig d;
    d.kind = DistKind::Bimodal;
    d.lo = lo;
    d.hi = hi;
    d.fraction = fraction;
    return d;
}

DistConfig DistConfig::beta_dist(double alpha, double beta) {
    DistConfig d;
    d.kind = DistKind::Beta;
    d.alpha = alpha;
    d.beta = beta;
    return d;
}

double DistConfig::sample(rng::Rng& rng) const {
    switch (kind) {
        case DistKind::Constant: return value;
        case DistKind::Uniform: return rng.uniform(lo, hi);
        case DistKind::Bimodal: return rng.bernoulli(fraction) ? lo : hi;
        default: return rng.beta(alpha, beta);
    }
}

namespace {

void check_range(const std::string& field, const char* name, double v, double min_allowed,
                 double max_allowed, bool min_exclusive) {
    bool below = min_exclusive ? v <= min_allowed : v < min_allowed;
    if (!std::isfinite(v) || below || v > max_allowed) {
        throw ValidationError(field, strprintf("%s must be in %s%g, %g]", name,
                                               min_exclusive ? "(" : "[", min_allowed,
                                               max_allowed));
    }
}

}  // namespace

void DistConfig::validate(const std::string& field, double min_allowed, double max_allowed,
                          bool min_exclusive) const {
    switch (kind) {
        case DistKind::Constant:
            check_range(field + ".value", "value", value, min_allowed, max_allowed,
                        min_exclusive);
            break;
        case DistKind::Uniform:
            check_range(field + ".lo", "lo", lo, min_allowed, max_allowed, min_exclusive);
            check_range(field + ".hi", "hi", hi, min_allowed, max_allowed, min_exclusive);
            if (lo > hi) throw ValidationError(field, "lo must not exceed hi");
            break;
        case DistKind::Bimodal:
            check_range(field + ".lo", "lo", lo, min_allowed, max_allowed, min_exclusive);
            check_range(field + ".hi", "hi", hi, min_allowed, max_allowed, min_exclusive);
            if (!(fraction >= 0.0 && fraction <= 1.0)) {
                throw ValidationError(field + ".fraction", "fraction must be in [0, 1]");
            }
            break;
        case DistKind::Beta:
            // Samples land in (0, 1), inside every range this config uses.
            if (!(alpha > 0.0) || !std::isfinite(alpha)) {
                throw ValidationError(field + ".alpha", "alpha must be positive");
            }
            if (!(beta > 0.0) || !std::isfinite(beta)) {
                throw ValidationError(field + ".beta", "beta must be positive");
            }
            if (min_allowed > 0.0 || max_allowed < 1.0) {
                throw ValidationError(field, "beta distribution spans (0, 1)");
            }
            break;
    }
}

namespace {

bool is_cent_multiple(double v) {
    double scaled = v * 100.0;
    return std::abs(scaled - std::llround(scaled)) < 1e-6;
}

}  // namespace

void SimConfig::validate() const {
    if (!(dynamics.mu > 0.0 && dynamics.mu <= 0.5)) {
        throw ValidationError("dynamics.mu", "must be in (0, 0.5]");
    }
    if (dynamics.p_max < 1) {
        throw ValidationError("dynamics.p_max", "must be at least 1");
    }
    if (dynamics.backfire_threshold < 1 || dynamics.backfire_threshold > dynamics.p_max) {
        throw ValidationError("dynamics.backfire_threshold", "must be in [1, p_max]");
    }
    if (!(dynamics.backfire_strength >= 0.0 && dynamics.backfire_strength <= 0.5)) {
        throw ValidationError("dynamics.backfire_strength", "must be in [0, 0.5]");
    }
    if (!(economics.initial_energy >= 0.0) || !std::isfinite(economics.initial_energy)) {
        throw ValidationError("economics.initial_energy", "must be non-negative");
    }
    if (!is_cent_multiple(economics.initial_energy)) {
        throw ValidationError("economics.initial_energy", "must be a multiple of 0.01");
    }
    if (!(economics.cost_coefficient > 0.0) || !std::isfinite(economics.cost_coefficient)) {
        throw ValidationError("economics.cost_coefficient", "must be positive");
    }
    if (!is_cent_multiple(economics.cost_coefficient) || economics.cost_coefficient < 0.01) {
        throw ValidationError("economics.cost_coefficient",
                              "must be a multiple of 0.01, at least 0.01");
    }
    if (termination.max_rounds < 1) {
        throw ValidationError("termination.max_rounds", "must be at least 1");
    }
    if (!(termination.majority_fraction >= 0.5 && termination.majority_fraction <= 1.0)) {
        throw ValidationError("termination.majority_fraction", "must be in [0.5, 1]");
    }
    if (!(termination.neutral_band >= 0.0 && termination.neutral_band < 0.5)) {
        throw ValidationError("termination.neutral_band", "must be in [0, 0.5)");
    }
    if (interaction.scheme == InteractionScheme::SampledEdges && interaction.sample_count < 1) {
        throw ValidationError("interaction.sample_count", "must be at least 1");
    }
    init.opinion.validate("init.opinion", 0.0, 1.0, false);
    init.susceptibility.validate("init.susceptibility", 0.0, 1.0, false);
    init.epsilon.validate("init.epsilon", 0.0, 1.0, true);
    if (snapshot_stride < 1) {
        throw ValidationError("snapshot_stride", "must be at least 1");
    }
    if (both_per_round) {
        throw ValidationError("both_per_round", "reserved flag, not implemented");
    }
}

std::string_view to_string(PeerMode mode) {
    return mode == PeerMode::Directed ? "directed" : "symmetric";
}

std::string_view to_string(InteractionScheme scheme) {
    return scheme == InteractionScheme::AllEdgesShuffled ? "all_edges_shuffled"
                                                         : "sampled_edges";
}

std::string_view to_string(DistKind kind) {
    switch (kind) {
        case DistKind::Constant: return "constant";
        case DistKind::Uniform: return "uniform";
        case DistKind::Bimodal: return "bimodal";
        default: return "beta";
    }
}

}  // namespace osim
