#pragma once

// Toy calendar-scheduling environment: deterministic slot-proposing generator
// plus a feasibility verifier, standing in for an LLM. The independent oracle
// is a brute-force scan over every one-hour window on the 30-minute grid
// inside 9:00-17:00.

#include <atomic>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "planforge/core.hpp"
#include "planforge/gateway.hpp"

namespace planforge::testing {

struct TimeInterval {
    int start_min = 0;
    int end_min = 0;
};

struct CalendarInstance {
    std::vector<std::string> names;
    std::map<std::string, std::vector<TimeInterval>> busy;

    PlanningProblem to_problem(const std::string& id) const;

    /// The worked calendar example: Michelle/Steven/Jerry, unique answer
    /// Monday 14:30-15:30.
    static CalendarInstance michelle_steven_jerry();

    /// Random instance with at least one feasible window (rejection sampled).
    static CalendarInstance random_feasible(std::mt19937_64& rng);
};

inline constexpr int kWorkStartMin = 9 * 60;
inline constexpr int kWorkEndMin = 17 * 60;
inline constexpr int kSlotStepMin = 30;
inline constexpr int kMeetingMin = 60;
inline constexpr int kSlotCount = (kWorkEndMin - kWorkStartMin - kMeetingMin) / kSlotStepMin + 1;

std::string format_time(int minutes);
std::string slot_solution_string(int start_min);

/// Independent oracle: earliest feasible one-hour window, if any.
std::optional<int> brute_force_earliest_slot(const CalendarInstance& instance);
std::vector<int> brute_force_all_slots(const CalendarInstance& instance);

/// Backend that answers every agent prompt for calendar problems: plan
/// generations walk the slot grid in ascending rotation, verifications score
/// 100 for a feasible proposal and -100 otherwise, completion checks accept
/// exactly the feasible proposals, and priors steer selection toward
/// Best-of-N. All schedule knowledge is parsed back out of the prompt text.
class CalendarOracleBackend : public gateway::Backend {
public:
    CalendarOracleBackend() = default;
    std::string complete(const gateway::GenerationRequest& req) override;

private:
    std::string next_proposal();
    std::atomic<int> proposal_counter_{0};
};

}  // namespace planforge::testing
