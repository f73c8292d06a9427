#include <doctest.h>

#include <random>

#include "planforge/prompts.hpp"
#include "support/calendar_oracle.hpp"

using namespace planforge;
using namespace planforge::testing;

TEST_CASE("worked calendar instance has the unique answer 14:30-15:30") {
    const auto inst = CalendarInstance::michelle_steven_jerry();
    const auto slots = brute_force_all_slots(inst);
    REQUIRE(slots.size() == 1);
    CHECK(slots[0] == 14 * 60 + 30);
    CHECK(slot_solution_string(slots[0]) ==
          "SOLUTION: Here is the proposed time: Monday, 14:30 - 15:30");
    const auto problem = inst.to_problem("msj");
    REQUIRE(problem.gold_answer.has_value());
    CHECK(*problem.gold_answer == "SOLUTION: Here is the proposed time: Monday, 14:30 - 15:30");
}

TEST_CASE("oracle backend verifies feasibility straight from the prompt text") {
    const auto inst = CalendarInstance::michelle_steven_jerry();
    const auto problem = inst.to_problem("msj");
    CalendarOracleBackend backend;

    prompts::PromptLibrary lib;
    const auto& verification = lib.get(prompts::TemplateNames::kVerification);

    const std::string good = verification.render(
        {{"problem", problem.statement},
         {"plan", slot_solution_string(14 * 60 + 30)},
         {"constraints", "- c"}});
    CHECK(backend.complete({good, 0, 64, "verify.plan"}).find("Score: 100") != std::string::npos);

    const std::string bad = verification.render({{"problem", problem.statement},
                                                 {"plan", slot_solution_string(9 * 60)},
                                                 {"constraints", "- c"}});
    CHECK(backend.complete({bad, 0, 64, "verify.plan"}).find("Score: -100") != std::string::npos);
}

TEST_CASE("random feasible instances always verify against their own gold slot") {
    std::mt19937_64 rng(2024);
    for (int i = 0; i < 25; ++i) {
        const auto inst = CalendarInstance::random_feasible(rng);
        const auto earliest = brute_force_earliest_slot(inst);
        REQUIRE(earliest.has_value());
        // Hand-check the oracle definition: no busy interval may overlap the window.
        for (const auto& [name, intervals] : inst.busy) {
            for (const auto& iv : intervals) {
                const bool overlaps =
                    iv.start_min < *earliest + kMeetingMin && *earliest < iv.end_min;
                CHECK_FALSE(overlaps);
            }
        }
    }
}
