#include <doctest.h>

#include "support.hpp"

using namespace revchain;

TEST_CASE("digest outputs are deterministic and argument-order independent") {
  MockEnv env;
  register_behavior(env, "F", digest_behavior("result"));
  auto a = parse_call_expr("F(x='1', y='2')");
  auto b = parse_call_expr("F(y='2', x='1')");
  ExecResult ra = execute(a[0], env);
  ExecResult rb = execute(b[0], env);
  CHECK(ra.final_value == rb.final_value);
  CHECK(ra.final_value.rfind("result:", 0) == 0);
  CHECK(ra.final_value.size() == 7 + 8);  // prefix + 8 hex digits
  for (std::size_t i = 7; i < ra.final_value.size(); ++i)
    CHECK(std::isxdigit(static_cast<unsigned char>(ra.final_value[i])));

  auto c = parse_call_expr("F(x='1', y='3')");
  CHECK(execute(c[0], env).final_value != ra.final_value);  // args matter
  register_behavior(env, "G", digest_behavior("result"));
  auto d = parse_call_expr("G(x='1', y='2')");
  CHECK(execute(d[0], env).final_value != ra.final_value);  // api name matters
}

TEST_CASE("table behaviors look up hand-authored rows") {
  MockEnv env;
  register_behavior(env, "Name2ID",
                    table_behavior({{{{"person_name", "Jack"}}, "P042"},
                                    {{{"person_name", "Alice"}}, "P007"}}));
  auto plan = parse_call_expr("Name2ID(person_name='Jack')");
  CHECK(execute(plan[0], env).final_value == "P042");
  auto miss = parse_call_expr("Name2ID(person_name='Bob')");
  CHECK_THROWS_WITH_AS((void)execute(miss[0], env),
                       doctest::Contains("no table row"), ExecError);
}

TEST_CASE("nested plans execute bottom-up with outputs substituted") {
  MockEnv env;
  register_behavior(env, "GetUserDestination",
                    table_behavior({{{{"userName", "Lucas"}}, "Tokyo"}}));
  register_behavior(env, "FindFlight", table_behavior({{{{"destination", "Tokyo"}}, "FL88"}}));
  register_behavior(env, "BookFlight", table_behavior({{{{"flight_ID", "FL88"}}, "BK1"}}));
  auto plan = parse_call_expr(
      "BookFlight(flight_ID=FindFlight(destination=GetUserDestination(userName='Lucas')))");
  ExecResult result = execute(plan[0], env);
  CHECK(result.final_value == "BK1");
  REQUIRE(result.call_log.size() == 3);
  CHECK(result.call_log[0].api == "GetUserDestination");
  CHECK(result.call_log[1].args ==
        std::vector<std::pair<std::string, std::string>>{{"destination", "Tokyo"}});
  CHECK(result.call_log[2].args ==
        std::vector<std::pair<std::string, std::string>>{{"flight_ID", "FL88"}});
}

TEST_CASE("execution requires full behavior coverage upfront") {
  MockEnv env;
  register_behavior(env, "Outer", digest_behavior());
  auto plan = parse_call_expr("Outer(x=Inner(y='1'))");
  CHECK_THROWS_WITH_AS((void)execute(plan[0], env), doctest::Contains("Inner"), ExecError);
}

TEST_CASE("incomplete plans cannot execute") {
  MockEnv env;
  register_behavior(env, "F", digest_behavior());
  auto plan = parse_call_expr("F(x=ASK_USER)");
  CHECK_THROWS_AS((void)execute(plan[0], env), std::invalid_argument);
}

TEST_CASE("behavior registration upserts") {
  MockEnv env;
  register_behavior(env, "F", digest_behavior("first"));
  register_behavior(env, "F", digest_behavior("second"));
  auto plan = parse_call_expr("F(x='1')");
  CHECK(execute(plan[0], env).final_value.rfind("second:", 0) == 0);
}

TEST_CASE("env fixtures round trip through JSON") {
  MockEnv env;
  register_behavior(env, "Digesty", digest_behavior("out"));
  register_behavior(env, "Tably",
                    table_behavior({{{{"a", "1"}, {"b", "2"}}, "row1"},
                                    {{{"a", "3"}}, "row2"}}));
  std::string path = support::temp_path("env.json");
  save_env(env, path);
  MockEnv back = load_env(path);
  auto p1 = parse_call_expr("Digesty(k='v')");
  CHECK(execute(p1[0], back).final_value == execute(p1[0], env).final_value);
  auto p2 = parse_call_expr("Tably(b='2', a='1')");
  CHECK(execute(p2[0], back).final_value == "row1");
  auto p3 = parse_call_expr("Tably(a='3')");
  CHECK(execute(p3[0], back).final_value == "row2");

  CHECK_THROWS_AS((void)load_env("/nonexistent/env.json"), ExecError);
  std::string bad = support::temp_path("bad_env.json");
  std::ofstream(bad) << "[]";
  CHECK_THROWS_AS((void)load_env(bad), ExecError);
}

TEST_CASE("digest execution of oracle-planned output matches gold execution") {
  TaskInstance inst = support::meeting_room_instance();
  MockEnv env;
  for (const auto& api : inst.pool.apis)
    register_behavior(env, api.name, digest_behavior(api.output.name));
  OracleResolver oracle(inst.gold_plans);
  auto outcome = plan_query(inst.query, inst.context, inst.pool, oracle, {});
  REQUIRE(outcome.status == PlanStatus::Complete);
  CHECK(execute(outcome.plan, env).final_value ==
        execute(inst.gold_plans[0], env).final_value);
  CHECK(execute(inst.gold_plans[0], env).final_value.rfind("booking_ID:", 0) == 0);
}
