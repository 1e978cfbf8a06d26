#pragma once
// Reference detectors: the clairvoyant oracle, the oblivious fusion center and
// a reputation scheme that drops robots which keep disagreeing with it.

#include <cstddef>
#include <deque>
#include <utility>
#include <vector>

#include "trustfuse/model.hpp"
#include "trustfuse/two_stage.hpp"

namespace trustfuse {

// Uses the true trust vector; only meaningful inside the simulator.
inline Decision oracle_decide(const NetworkObservation& obs, const SensorModel& sensor) {
    return fuse_trusted(obs.y, obs.truth_t, sensor);
}

inline Decision oblivious_decide(const NetworkObservation& obs, const SensorModel& sensor) {
    return fuse_trusted(obs.y, BitVector(obs.size(), 1), sensor);
}

class ReputationState {
public:
    ReputationState(std::size_t n, std::size_t window, double eta) : window_(window), eta_(eta), history_(n) {
        if (window == 0) throw DomainError("reputation window must be positive");
        if (!(eta > 0.0 && eta < static_cast<double>(window)))
            throw DomainError("reputation threshold eta must lie in (0, T)");
    }

    std::size_t size() const noexcept { return history_.size(); }
    std::size_t window() const noexcept { return window_; }
    double eta() const noexcept { return eta_; }

    std::size_t disagreements(std::size_t robot) const {
        std::size_t count = 0;
        for (bool agreed : history_.at(robot)) count += agreed ? 0 : 1;
        return count;
    }
    std::size_t recorded(std::size_t robot) const { return history_.at(robot).size(); }

    // Judged on whatever history exists, so a fresh robot is always included.
    bool excluded(std::size_t robot) const { return static_cast<double>(disagreements(robot)) >= eta_; }

    void record(std::size_t robot, bool agreed) {
        auto& h = history_.at(robot);
        h.push_back(agreed);
        if (h.size() > window_) h.pop_front();
    }

private:
    std::size_t window_;
    double eta_;
    std::vector<std::deque<bool>> history_;
};

// Excludes robots with at least eta disagreements in their last T tests, fuses
// the rest, then records every robot's agreement with this decision.
inline std::pair<Decision, ReputationState> reputation_update_and_decide(const NetworkObservation& obs,
                                                                          ReputationState state,
                                                                          const SensorModel& sensor) {
    if (state.size() != obs.size()) throw DomainError("reputation state size does not match the network");
    BitVector t_hat(obs.size());
    for (std::size_t i = 0; i < obs.size(); ++i) t_hat[i] = state.excluded(i) ? 0 : 1;
    Decision d = fuse_trusted(obs.y, t_hat, sensor);
    const std::uint8_t decided = d.hypothesis == Hypothesis::H1 ? 1 : 0;
    for (std::size_t i = 0; i < obs.size(); ++i) state.record(i, obs.y[i] == decided);
    return {std::move(d), std::move(state)};
}

}  // namespace trustfuse
