#include "hipmdp/domains/toy.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hipmdp::domains {

namespace {

// Intersection parameter t in [0,1] of segment a->b with the horizontal
// segment y = yc, x in [x_lo, x_hi]; nullopt if they do not cross.
std::optional<double> cross_horizontal(const Eigen::Vector2d& a, const Eigen::Vector2d& b,
                                       double yc, double x_lo, double x_hi) {
    const double dy = b.y() - a.y();
    if (dy == 0.0) return std::nullopt;
    const double t = (yc - a.y()) / dy;
    if (t < 0.0 || t > 1.0) return std::nullopt;
    const double x = a.x() + t * (b.x() - a.x());
    if (x < x_lo || x > x_hi) return std::nullopt;
    return t;
}

std::optional<double> cross_vertical(const Eigen::Vector2d& a, const Eigen::Vector2d& b,
                                     double xc, double y_lo, double y_hi) {
    const double dx = b.x() - a.x();
    if (dx == 0.0) return std::nullopt;
    const double t = (xc - a.x()) / dx;
    if (t < 0.0 || t > 1.0) return std::nullopt;
    const double y = a.y() + t * (b.y() - a.y());
    if (y < y_lo || y > y_hi) return std::nullopt;
    return t;
}

enum class Edge { BlueGate, RedGate, Top, Left, Right };

struct Crossing {
    Edge edge;
    double t;
};

// First goal-box edge crossed on the way from a to b, if any.
std::optional<Crossing> first_crossing(const Eigen::Vector2d& a, const Eigen::Vector2d& b,
                                       const ToyConfig& cfg) {
    std::optional<Crossing> best;
    const auto consider = [&](Edge edge, std::optional<double> t) {
        if (t && (!best || *t < best->t)) best = Crossing{edge, *t};
    };
    consider(Edge::BlueGate, cross_horizontal(a, b, cfg.goal_y_lo, cfg.goal_x_lo, cfg.gate_split_x()));
    consider(Edge::RedGate, cross_horizontal(a, b, cfg.goal_y_lo, cfg.gate_split_x(), cfg.goal_x_hi));
    consider(Edge::Top, cross_horizontal(a, b, cfg.goal_y_hi, cfg.goal_x_lo, cfg.goal_x_hi));
    consider(Edge::Left, cross_vertical(a, b, cfg.goal_x_lo, cfg.goal_y_lo, cfg.goal_y_hi));
    consider(Edge::Right, cross_vertical(a, b, cfg.goal_x_hi, cfg.goal_y_lo, cfg.goal_y_hi));
    return best;
}

}  // namespace

bool toy_in_goal(const Eigen::Vector2d& s, const ToyConfig& cfg) {
    return s.x() >= cfg.goal_x_lo && s.x() <= cfg.goal_x_hi && s.y() >= cfg.goal_y_lo &&
           s.y() <= cfg.goal_y_hi;
}

ToyStepResult toy_step(const Eigen::Vector2d& state, ToyAction action, const ToyParams& params,
                       const ToyConfig& cfg, Rng& rng) {
    if (state.x() < 0.0 || state.x() > 1.0 || state.y() < 0.0 || state.y() > 1.0) {
        throw std::invalid_argument("toy_step: state outside the unit square");
    }

    Eigen::Vector2d dir(0.0, 0.0);
    switch (action) {
        case ToyAction::Up: dir.y() = 1.0; break;
        case ToyAction::Down: dir.y() = -1.0; break;
        case ToyAction::Left: dir.x() = -1.0; break;
        case ToyAction::Right: dir.x() = 1.0; break;
    }
    Eigen::Vector2d proposal = state + cfg.step_size * dir;
    proposal.x() += rng.normal(0.0, params.noise_scale);
    proposal.y() += rng.normal(0.0, params.noise_scale);
    // Unit-square walls stop movement at the boundary.
    proposal.x() = std::clamp(proposal.x(), 0.0, 1.0);
    proposal.y() = std::clamp(proposal.y(), 0.0, 1.0);

    ToyStepResult out;
    const auto crossing = first_crossing(state, proposal, cfg);
    if (!crossing) {
        out.next = proposal;
        out.reward = cfg.step_reward;
        out.done = false;
        return out;
    }

    const bool is_gate = crossing->edge == Edge::BlueGate || crossing->edge == Edge::RedGate;
    const GateColor color = crossing->edge == Edge::BlueGate ? GateColor::Blue : GateColor::Red;
    const bool allowed =
        is_gate && ((color == GateColor::Blue && params.latent_class == ToyClass::Blue) ||
                    (color == GateColor::Red && params.latent_class == ToyClass::Red));
    if (allowed) {
        out.crossed_gate = color;
        // Entry into the goal region ends the episode.
        out.next = toy_in_goal(proposal, cfg)
                       ? proposal
                       : state + crossing->t * (proposal - state);
        out.reward = cfg.goal_reward;
        out.done = true;
        return out;
    }

    out.next = state;  // blocked: exact pre-step position
    out.reward = cfg.step_reward;
    out.done = false;
    out.blocked = true;
    return out;
}

Eigen::Vector2d toy_initial_state(const ToyConfig& cfg, Rng& rng) {
    return {rng.uniform(0.0, 1.0), rng.uniform(0.0, cfg.start_y_hi)};
}

std::pair<double, bool> toy_synthetic_reward(const Eigen::VectorXd& next_state,
                                             const ToyConfig& cfg) {
    const Eigen::Vector2d s(next_state(0), next_state(1));
    if (toy_in_goal(s, cfg)) return {cfg.goal_reward, true};
    return {cfg.step_reward, false};
}

}  // namespace hipmdp::domains
