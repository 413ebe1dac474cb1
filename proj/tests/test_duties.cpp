#include <random>

#include "crew/duties.hpp"
#include "crew/feasibility.hpp"
#include "doctest.h"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace crew;

namespace {

Instance random_network(std::mt19937_64& rng, int n_tasks) {
  std::uniform_int_distribution<int> depot(0, 2), dur(30, 120), lic(1, 3);
  std::vector<Task> tasks;
  for (int id = 0; id < n_tasks; ++id) {
    int start = 300 + static_cast<int>(rng() % 600);
    tasks.push_back(fix::task(id, depot(rng), depot(rng), start, start + dur(rng), lic(rng)));
  }
  std::vector<Driver> drivers;
  drivers.push_back(fix::driver(0, DriverKind::Operating, depot(rng), 240, 1200, {}, lic(rng), 3));
  drivers.push_back(fix::driver(1, DriverKind::Standby, depot(rng), 300, 900, {}, 3, 3));
  return fix::instance(3, std::move(tasks), std::move(drivers));
}

}  // namespace

TEST_SUITE("duties") {
  TEST_CASE("single task yields a single duty") {
    auto ins = fix::instance(2, {fix::task(0, 0, 1, 480, 540)}, {});
    auto pool = enumerate_duties(ins.tasks, ins.rules, 9);
    REQUIRE(pool.size() == 1);
    CHECK(pool.duties[0] == std::vector<int>{0});
    CHECK(pool.stats[0].working_min == 60);
    CHECK(pool.stats[0].start_depot == 0);
    CHECK(pool.stats[0].end_depot == 1);
  }

  TEST_CASE("mutually conflicting tasks yield only singletons") {
    auto ins = fix::instance(1,
                             {fix::task(0, 0, 0, 480, 540), fix::task(1, 0, 0, 500, 560),
                              fix::task(2, 0, 0, 520, 580)},
                             {});
    auto pool = enumerate_duties(ins.tasks, ins.rules, 9);
    REQUIRE(pool.size() == 3);
    for (int j = 0; j < 3; ++j) CHECK(pool.duties[j] == std::vector<int>{j});
  }

  TEST_CASE("two chainable tasks yield three duties") {
    auto ins = fix::instance(2, {fix::task(0, 0, 1, 480, 540), fix::task(1, 1, 0, 560, 620)}, {});
    auto pool = enumerate_duties(ins.tasks, ins.rules, 9);
    REQUIRE(pool.size() == 3);
    CHECK(pool.duties[0] == std::vector<int>{0});
    CHECK(pool.duties[1] == std::vector<int>{0, 1});
    CHECK(pool.duties[2] == std::vector<int>{1});
  }

  TEST_CASE("enumeration matches the exhaustive filter oracle") {
    std::mt19937_64 rng(424242);
    for (int round = 0; round < 30; ++round) {
      auto ins = random_network(rng, 6);
      for (int M : {1, 2, 3, 6}) {
        auto pool = enumerate_duties(ins.tasks, ins.rules, M);
        std::set<std::vector<int>> got(pool.duties.begin(), pool.duties.end());
        CHECK(got.size() == pool.duties.size());  // no duplicates
        CHECK(got == oracle::all_duties(ins, ins.rules, M));
        CHECK(std::is_sorted(pool.duties.begin(), pool.duties.end()));
      }
    }
  }

  TEST_CASE("break rule rejects at emission without pruning extensions") {
    // [0,1] works 320 minutes with only a 20-minute transit gap: rejected.
    // Extending it with task 2 adds a 70-minute break, so [0,1,2] is feasible
    // again. A recursion that pruned on the break failure would lose it.
    auto ins = fix::instance(
        1,
        {fix::task(0, 0, 0, 480, 640), fix::task(1, 0, 0, 660, 800), fix::task(2, 0, 0, 870, 950)},
        {});
    auto pool = enumerate_duties(ins.tasks, ins.rules, 9);
    std::set<std::vector<int>> got(pool.duties.begin(), pool.duties.end());
    CHECK(got.count({0, 1}) == 0);
    CHECK(got.count({0, 1, 2}) == 1);
    CHECK(got == oracle::all_duties(ins, ins.rules, 9));
  }

  TEST_CASE("per-driver index equals the full duty check, both directions") {
    std::mt19937_64 rng(77);
    for (int round = 0; round < 25; ++round) {
      auto ins = random_network(rng, 6);
      auto pool = enumerate_duties(ins.tasks, ins.rules, 4);
      build_driver_index(pool, ins, ins.rules);
      for (const Driver& d : ins.drivers) {
        std::set<int> indexed(pool.per_driver_index[d.id].begin(),
                              pool.per_driver_index[d.id].end());
        for (int j = 0; j < pool.size(); ++j) {
          bool ok = check_duty(pool.entries(j), d, ins, ins.rules).feasible;
          CHECK(indexed.count(j) == static_cast<std::size_t>(ok ? 1 : 0));
        }
      }
    }
  }

  TEST_CASE("drivers sharing an envelope share an index") {
    auto ins = fix::instance(2, {fix::task(0, 0, 1, 480, 540), fix::task(1, 1, 0, 560, 620)},
                             {fix::driver(0, DriverKind::Operating, 0, 420, 720, {0, 1}),
                              fix::driver(1, DriverKind::Operating, 0, 420, 720, {})});
    // same license, home, shift; different original duties -> different
    // overtime budgets, so the envelopes differ and index may differ
    auto pool = enumerate_duties(ins.tasks, ins.rules, 9);
    build_driver_index(pool, ins, ins.rules);
    // driver 0 originally works 140 minutes; driver 1 has a zero baseline,
    // so the 140-minute round trip costs 140 overtime: still within 240
    CHECK(pool.per_driver_index[0] == pool.per_driver_index[1]);
  }

  TEST_CASE("counting matches materialization and respects the budget") {
    auto ins = fix::instance(2, {fix::task(0, 0, 1, 480, 540), fix::task(1, 1, 0, 560, 620)}, {});
    auto pool = enumerate_duties(ins.tasks, ins.rules, 9);
    auto count = count_duties(ins.tasks, ins.rules, 9, 1 << 20);
    CHECK(count.count == static_cast<std::uint64_t>(pool.size()));
    CHECK(count.projected_bytes > 0);
    CHECK_THROWS_AS(count_duties(ins.tasks, ins.rules, 9, 8), BudgetError);
    CHECK_THROWS_AS(count_duties(ins.tasks, ins.rules, 9, 0), InputError);
    CHECK_THROWS_AS(enumerate_duties(ins.tasks, ins.rules, 0), InputError);
  }

  TEST_CASE("counting an empty task set") {
    std::vector<Task> none;
    FeasibilityRules rules;
    auto count = count_duties(none, rules, 9, 1 << 20);
    CHECK(count.count == 0);
    CHECK(count.projected_bytes == 0);
  }

  TEST_CASE("count equals pool size on a larger random instance") {
    std::mt19937_64 rng(31337);
    auto ins = random_network(rng, 9);
    auto pool = enumerate_duties(ins.tasks, ins.rules, 9);
    auto count = count_duties(ins.tasks, ins.rules, 9, 1ull << 30);
    CHECK(count.count == static_cast<std::uint64_t>(pool.size()));
  }

  TEST_CASE("pool stats agree with the feasibility module") {
    std::mt19937_64 rng(8);
    auto ins = random_network(rng, 7);
    auto pool = enumerate_duties(ins.tasks, ins.rules, 4);
    for (int j = 0; j < pool.size(); ++j) {
      auto entries = pool.entries(j);
      CHECK(pool.stats[j].working_min == working_minutes(entries, ins, ins.rules));
      CHECK(pool.stats[j].first_start == ins.task(pool.duties[j].front()).start_time);
      CHECK(pool.stats[j].last_end == ins.task(pool.duties[j].back()).end_time);
      CHECK(pool.stats[j].start_depot == ins.task(pool.duties[j].front()).start_depot);
      CHECK(pool.stats[j].end_depot == ins.task(pool.duties[j].back()).end_depot);
    }
  }

  TEST_CASE("compatibility hash pins rules, cap and task data") {
    auto ins = fix::instance(2, {fix::task(0, 0, 1, 480, 540), fix::task(1, 1, 0, 560, 620)}, {});
    auto base = pool_compatibility_hash(ins.tasks, ins.rules, 9);
    CHECK(base == pool_compatibility_hash(ins.tasks, ins.rules, 9));
    auto rules2 = ins.rules;
    rules2.min_transfer_minutes = 11;
    CHECK(base != pool_compatibility_hash(ins.tasks, rules2, 9));
    CHECK(base != pool_compatibility_hash(ins.tasks, ins.rules, 8));
    auto tasks2 = ins.tasks;
    tasks2[1].end_time += 1;
    CHECK(base != pool_compatibility_hash(tasks2, ins.rules, 9));
  }
}
