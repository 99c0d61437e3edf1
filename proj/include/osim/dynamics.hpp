#pragma once

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <string_view>
#include <utility>

#include "osim/errors.hpp"

namespace osim {

/// The two broadcasting agents. Pole convention is fixed everywhere:
/// Red pulls opinions toward 0.0, Blue toward 1.0.
enum class Side { Red, Blue };

constexpr double pole(Side s) { return s == Side::Red ? 0.0 : 1.0; }
constexpr Side opponent(Side s) { return s == Side::Red ? Side::Blue : Side::Red; }
constexpr std::string_view to_string(Side s) { return s == Side::Red ? "red" : "blue"; }

/// Per-node dynamic state: opinion in [0,1], susceptibility in [0,1], and
/// the bounded-confidence gate width (confidence bound) in (0,1].
struct GreenNodeState {
    double opinion = 0.5;
    double susceptibility = 1.0;
    double confidence_bound = 0.25;
};

struct DynamicsParams {
    double mu = 0.3;                     // convergence step fraction, (0, 0.5]
    int p_max = 10;                      // max broadcast potency
    int backfire_threshold = 8;          // potency at/above which backfire can fire
    double backfire_strength = 0.1;      // step fraction of the away-move, [0, 0.5]
    bool backfire_applies_to_blue = false;

    friend bool operator==(const DynamicsParams&, const DynamicsParams&) = default;
};

/// min(1, max(0, x)); rejects non-finite input.
inline double clamp01(double x) {
    if (!std::isfinite(x)) throw NonFiniteError();
    return std::clamp(x, 0.0, 1.0);
}

/// Classic symmetric Deffuant step. If |xi - xj| < eps (strict), both move
/// toward each other by mu times the gap; otherwise both are unchanged.
/// Susceptibility is deliberately not applied here: the symmetric rule stays
/// pure so that xi + xj is conserved whenever the gate opens.
inline std::pair<double, double> peer_update_symmetric(double xi, double xj, double eps,
                                                       double mu) {
    if (std::abs(xi - xj) < eps) {
        double di = mu * (xj - xi);
        double dj = mu * (xi - xj);
        return {xi + di, xj + dj};
    }
    return {xi, xj};
}

/// Directed variant: only the receiver moves, scaled by its susceptibility,
/// gated by the receiver's own confidence bound (strict <).
inline double peer_update_directed(const GreenNodeState& receiver, double sender_opinion,
                                   double mu) {
    if (std::abs(sender_opinion - receiver.opinion) < receiver.confidence_bound) {
        return clamp01(receiver.opinion + mu * receiver.susceptibility *
                                              (sender_opinion - receiver.opinion));
    }
    return receiver.opinion;
}

enum class BroadcastEffect { Accepted, Rejected, Backfired };

constexpr std::string_view to_string(BroadcastEffect e) {
    switch (e) {
        case BroadcastEffect::Accepted: return "accepted";
        case BroadcastEffect::Rejected: return "rejected";
        default: return "backfired";
    }
}

struct BroadcastResult {
    double opinion = 0.0;
    BroadcastEffect effect = BroadcastEffect::Rejected;
};

/// Broadcast influence on one node. With t the broadcaster's pole and
/// d = |x - t|:
///   - Accepted when d <= eps (note: <=, unlike the strict peer gate):
///     the node moves toward t by mu * s * (p / p_max) of the gap.
///   - Backfired when the gate is closed, p >= backfire_threshold, and the
///     side is subject to backfire (Red always, Blue only when configured):
///     the node moves away from t by backfire_strength * s * (p / p_max).
///   - Rejected otherwise: unchanged.
/// Potency scales the step size only; it never widens the gate.
inline BroadcastResult broadcast_update(const GreenNodeState& node, Side side, int potency,
                                        const DynamicsParams& params) {
    if (potency < 1 || potency > params.p_max) throw PotencyOutOfRange(potency, params.p_max);
    double t = pole(side);
    double x = node.opinion;
    double d = std::abs(x - t);
    double scale = node.susceptibility * (static_cast<double>(potency) / params.p_max);
    if (d <= node.confidence_bound) {
        return {clamp01(x + params.mu * scale * (t - x)), BroadcastEffect::Accepted};
    }
    bool side_backfires = side == Side::Red || params.backfire_applies_to_blue;
    if (potency >= params.backfire_threshold && side_backfires) {
        return {clamp01(x - params.backfire_strength * scale * (t - x)),
                BroadcastEffect::Backfired};
    }
    return {x, BroadcastEffect::Rejected};
}

}  // namespace osim
