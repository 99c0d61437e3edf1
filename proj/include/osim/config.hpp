#pragma once

#include <cstdint>
#include <string>

#include "osim/dynamics.hpp"
#include "osim/rng.hpp"

namespace osim {

enum class DistKind { Constant, Uniform, Bimodal, Beta };

/// A scalar sampling recipe for per-node initialization. Bimodal returns lo
/// with probability `fraction`, otherwise hi (both exact point masses).
struct DistConfig {
    DistKind kind = DistKind::Uniform;
    double value = 0.5;  // constant
    double lo = 0.0;     // uniform / bimodal
    double hi = 1.0;
    double fraction = 0.5;  // bimodal: P(lo)
    double alpha = 2.0;     // beta
    double beta = 2.0;

    static DistConfig constant(double v);
    static DistConfig uniform(double lo, double hi);
    static DistConfig bimodal(double lo, double hi, double fraction);
    static DistConfig beta_dist(double alpha, double beta);

    double sample(rng::Rng& rng) const;

    /// Throws ValidationError(field, ...) unless every possible sample lies
    /// in [min_allowed, max_allowed] (min exclusive when min_exclusive).
    void validate(const std::string& field, double min_allowed, double max_allowed,
                  bool min_exclusive) const;

    friend bool operator==(const DistConfig&, const DistConfig&) = default;
};

struct EconomicsConfig {
    double initial_energy = 100.0;   // Blue's E0; Red is unlimited
    double cost_coefficient = 1.0;   // cost per unit potency
    friend bool operator==(const EconomicsConfig&, const EconomicsConfig&) = default;
};

struct TerminationConfig {
    int max_rounds = 100;
    double majority_fraction = 0.5;  // strict: count > fraction * n
    double neutral_band = 0.05;      // delta around 0.5
    friend bool operator==(const TerminationConfig&, const TerminationConfig&) = default;
};

enum class PeerMode { Directed, Symmetric };

enum class InteractionScheme { AllEdgesShuffled, SampledEdges };

struct InteractionConfig {
    InteractionScheme scheme = InteractionScheme::AllEdgesShuffled;
    int sample_count = 0;  // sampled_edges only
    friend bool operator==(const InteractionConfig&, const InteractionConfig&) = default;
};

struct InitConfig {
    DistConfig opinion = DistConfig::uniform(0.0, 1.0);
    DistConfig susceptibility = DistConfig::uniform(0.5, 1.0);
    DistConfig epsilon = DistConfig::constant(0.25);
    friend bool operator==(const InitConfig&, const InitConfig&) = default;
};

/// Full run parameterization. One 64-bit master seed drives everything;
/// every random decision draws from a named substream of it.
struct SimConfig {
    std::uint64_t seed = 0;
    std::string topic;
    DynamicsParams dynamics;
    EconomicsConfig economics;
    TerminationConfig termination;
    PeerMode peer_mode = PeerMode::Directed;
    InteractionConfig interaction;
    InitConfig init;
    int snapshot_stride = 1;      // states.csv keeps rounds where r % stride == 0 (plus 0 and final)
    bool both_per_round = false;  // reserved; must stay false

    /// Throws ValidationError with a dotted field path on the first violation.
    void validate() const;

    friend bool operator==(const SimConfig&, const SimConfig&) = default;
};

std::string_view to_string(PeerMode mode);
std::string_view to_string(InteractionScheme scheme);
std::string_view to_string(DistKind kind);

}  // namespace osim
