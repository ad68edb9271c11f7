#include <doctest.h>

#include "support.hpp"

using namespace revchain;

TEST_CASE("oracle answers selections by gold tree position") {
  TaskInstance inst = support::meeting_room_instance();
  OracleResolver oracle(inst.gold_plans);

  SelectionRequest final_req{inst.query, inst.pool.apis, SelectionScenario::FinalApi, {}};
  CHECK(oracle.select_api(final_req) == "BookRoom");

  SelectionRequest arg_req{"the person_ID",
                           filter_by_type(inst.pool, ValueType::Identifier),
                           SelectionScenario::ArgumentFill,
                           {{"BookRoom", "person_ID"}}};
  CHECK(oracle.select_api(arg_req) == "Name2ID");

  SelectionRequest literal_req{"the start_time",
                               filter_by_type(inst.pool, ValueType::Time),
                               SelectionScenario::ArgumentFill,
                               {{"BookRoom", "start_time"}}};
  CHECK_FALSE(oracle.select_api(literal_req).has_value());  // gold binds a literal

  SelectionRequest outside{"x",
                           inst.pool.apis,
                           SelectionScenario::ArgumentFill,
                           {{"BookRoom", "start_time"}, {"Nope", "arg"}}};
  CHECK_THROWS_AS((void)oracle.select_api(outside), ResolverError);
}

TEST_CASE("oracle completion distinguishes repeated argument names by position") {
  // start_time appears on BookRoom and on the nested RecommendRoom with the
  // same text here, but position keying must hold even when they differ.
  auto gold = parse_call_expr(
      "BookRoom(room_ID=RecommendRoom(start_time='8:00 am', end_time='9:00 am'), "
      "start_time='9:00 am', end_time='10:00 am')");
  TaskInstance inst = support::meeting_room_instance();
  OracleResolver oracle(gold);

  const ApiSpec* book = lookup(inst.pool, "BookRoom");
  const ApiSpec* rec = lookup(inst.pool, "RecommendRoom");
  REQUIRE(book != nullptr);
  REQUIRE(rec != nullptr);

  CompletionRequest root_req{inst.query, {}, *book, book->arguments, {}, {}};
  auto root_out = oracle.complete_arguments(root_req);
  CHECK(root_out.at("start_time") == ArgOutcome::value("9:00 am"));
  CHECK(root_out.at("room_ID") == ArgOutcome::use_api("RecommendRoom"));
  CHECK(root_out.at("person_ID") == ArgOutcome::none());  // absent in this gold

  CompletionRequest nested_req{inst.query, {}, *rec, rec->arguments, {},
                               {{"BookRoom", "room_ID"}}};
  auto nested_out = oracle.complete_arguments(nested_req);
  CHECK(nested_out.at("start_time") == ArgOutcome::value("8:00 am"));

  CompletionRequest mismatched{inst.query, {}, *book, book->arguments, {},
                               {{"BookRoom", "room_ID"}}};
  CHECK_THROWS_AS((void)oracle.complete_arguments(mismatched), ResolverError);
}

TEST_CASE("oracle extraction returns literals and declines sub-call positions") {
  TaskInstance inst = support::meeting_room_instance();
  OracleResolver oracle(inst.gold_plans);
  const ApiSpec* book = lookup(inst.pool, "BookRoom");
  CompletionRequest time_req{inst.query, {}, *book, {*book->find_argument("start_time")}, {}, {}};
  CHECK(oracle.extract_value(time_req) == ArgOutcome::value("9:00 am"));
  CompletionRequest id_req{inst.query, {}, *book, {*book->find_argument("person_ID")}, {}, {}};
  CHECK(oracle.extract_value(id_req) == ArgOutcome::none());
  OracleResolver greedy(inst.gold_plans, /*greedy_extract=*/true);
  CHECK(greedy.extract_value(id_req) == ArgOutcome::value("Jack"));
}

TEST_CASE("selection prompts carry the scenario, candidates and a cap") {
  TaskInstance inst = support::meeting_room_instance();
  SelectionRequest req{inst.query, inst.pool.apis, SelectionScenario::FinalApi, {}};
  std::string prompt = render_selection_prompt(req);
  CHECK(prompt.find(inst.query) != std::string::npos);
  for (const auto& api : inst.pool.apis) CHECK(prompt.find(api.name) != std::string::npos);
  CHECK(prompt.find("{\"api\"") != std::string::npos);

  std::vector<ApiSpec> many;
  for (int i = 0; i < 40; ++i)
    many.push_back(support::make_api("Api" + std::to_string(i), {}, "o", ValueType::String));
  SelectionRequest big{"task", many, SelectionScenario::ArgumentFill, {{"X", "y"}}};
  std::string capped = render_selection_prompt(big, 32);
  CHECK(capped.find("Api31") != std::string::npos);
  CHECK(capped.find("Api32") == std::string::npos);
  CHECK(capped.find("8 more candidates omitted") != std::string::npos);
}

TEST_CASE("completion prompts list arguments, context and per-arg candidates") {
  TaskInstance inst = support::meeting_room_instance();
  const ApiSpec* book = lookup(inst.pool, "BookRoom");
  std::map<std::string, std::vector<ApiSpec>> cands;
  for (const auto& arg : book->arguments)
    cands[arg.name] = filter_by_type(inst.pool, arg.value_type);
  CompletionRequest req{inst.query, {{"today", "2025-06-02"}}, *book, book->arguments, cands, {}};
  std::string prompt = render_completion_prompt(req);
  CHECK(prompt.find("person_ID") != std::string::npos);
  CHECK(prompt.find("Name2ID") != std::string::npos);
  CHECK(prompt.find("today: 2025-06-02") != std::string::npos);
  CHECK(prompt.find("\"kind\": \"value\"") != std::string::npos);

  CompletionRequest no_ctx{inst.query, {}, *book, book->arguments, {}, {}};
  CHECK(render_completion_prompt(no_ctx).find("Context:") == std::string::npos);
}

TEST_CASE("extraction prompts never show candidates") {
  TaskInstance inst = support::meeting_room_instance();
  const ApiSpec* book = lookup(inst.pool, "BookRoom");
  CompletionRequest req{inst.query, {}, *book, {*book->find_argument("person_ID")}, {}, {}};
  std::string prompt = render_extraction_prompt(req);
  CHECK(prompt.find("person_ID") != std::string::npos);
  CHECK(prompt.find("Name2ID") == std::string::npos);
  CHECK(prompt.find("{\"value\"") != std::string::npos);
}

TEST_CASE("prompt renders match the reviewed golden files") {
  TaskInstance inst = support::meeting_room_instance();
  const ApiSpec* book = lookup(inst.pool, "BookRoom");
  std::map<std::string, std::vector<ApiSpec>> cands;
  for (const auto& arg : book->arguments)
    cands[arg.name] = filter_by_type(inst.pool, arg.value_type);

  SelectionRequest sel{inst.query, inst.pool.apis, SelectionScenario::FinalApi, {}};
  CHECK(render_selection_prompt(sel) + "\n" ==
        support::read_file(support::asset_path("prompts/final_selection.txt")));

  CompletionRequest comp{inst.query, {}, *book, book->arguments, cands, {}};
  CHECK(render_completion_prompt(comp) + "\n" ==
        support::read_file(support::asset_path("prompts/bookroom_completion.txt")));

  CompletionRequest ext{inst.query, {}, *book, {*book->find_argument("person_ID")}, {}, {}};
  CHECK(render_extraction_prompt(ext) + "\n" ==
        support::read_file(support::asset_path("prompts/person_id_extraction.txt")));
}

TEST_CASE("json extraction tolerates prose, fences and nested braces") {
  auto j = extract_first_json_object("Sure! Here it is:\n```json\n{\"api\": \"BookRoom\"}\n```");
  REQUIRE(j.has_value());
  CHECK(j->at("api") == "BookRoom");
  j = extract_first_json_object(R"(note {not json} then {"a": {"b": "}"}})");
  REQUIRE(j.has_value());
  CHECK(j->at("a").at("b") == "}");
  CHECK_FALSE(extract_first_json_object("no objects here").has_value());
  CHECK_FALSE(extract_first_json_object("{broken").has_value());
}

TEST_CASE("selection replies parse with null and malformed cases") {
  CHECK(parse_selection_reply(R"({"api": "Name2ID"})").api == "Name2ID");
  auto null_reply = parse_selection_reply(R"({"api": null})");
  CHECK_FALSE(null_reply.malformed);
  CHECK_FALSE(null_reply.api.has_value());
  CHECK(parse_selection_reply("gibberish").malformed);
  CHECK(parse_selection_reply(R"({"tool": "X"})").malformed);
  CHECK(parse_selection_reply(R"({"api": 7})").malformed);
}

TEST_CASE("completion replies map outcomes per expected argument") {
  std::vector<std::string> expected{"person_ID", "start_time", "end_time"};
  auto reply = parse_completion_reply(
      R"({"person_ID": {"kind": "api", "api": "Name2ID"},
          "start_time": {"kind": "value", "value": "9:00 am"},
          "end_time": "10:00 am",
          "extra": {"kind": "none"}})",
      expected);
  CHECK_FALSE(reply.malformed);
  CHECK(reply.outcomes.at("person_ID") == ArgOutcome::use_api("Name2ID"));
  CHECK(reply.outcomes.at("start_time") == ArgOutcome::value("9:00 am"));
  CHECK(reply.outcomes.at("end_time") == ArgOutcome::value("10:00 am"));
  REQUIRE(reply.anomalies.size() == 1);
  CHECK(reply.anomalies[0].find("extra") != std::string::npos);

  auto missing = parse_completion_reply(R"({"person_ID": {"kind": "none"}})", expected);
  CHECK(missing.outcomes.at("start_time") == ArgOutcome::none());
  CHECK(missing.anomalies.size() == 2);

  auto bad = parse_completion_reply("not json at all", expected);
  CHECK(bad.malformed);
  CHECK(bad.outcomes.size() == expected.size());
}

TEST_CASE("extraction replies parse values and nulls") {
  CHECK(parse_extraction_reply(R"({"value": "Jack"})").outcome == ArgOutcome::value("Jack"));
  auto none = parse_extraction_reply(R"({"value": null})");
  CHECK_FALSE(none.malformed);
  CHECK(none.outcome == ArgOutcome::none());
  CHECK(parse_extraction_reply(R"({"value": 42})").outcome == ArgOutcome::value("42"));
  CHECK(parse_extraction_reply("???").malformed);
}

TEST_CASE("scripted resolver replays a prompt request log") {
  std::string path = support::temp_path("request_log.jsonl");
  std::ofstream(path) << R"({"seq": 0, "scenario": "selection", "request": {"model": "m", "temperature": 0.1, "prompt": "p"}, "reply": "{\"api\": \"BookFlight\"}", "latency_ms": 3})"
                      << "\n"
                      << R"({"seq": 1, "scenario": "completion", "request": {}, "reply": "{\"flight_ID\": {\"kind\": \"api\", \"api\": \"FindFlight\"}}", "latency_ms": 2})"
                      << "\n"
                      << R"({"seq": 2, "scenario": "completion", "request": {}, "reply": "{\"destination\": {\"kind\": \"value\", \"value\": \"Paris\"}}", "latency_ms": 2})"
                      << "\n";
  ScriptedResolver replay = ScriptedResolver::from_file(path);
  TaskInstance inst = support::flight_instance();
  auto outcome = plan_query(inst.query, inst.context, inst.pool, replay,
                            StrategyConfig{StrategyMode::AllAtOnce, 8, 64});
  REQUIRE(outcome.status == PlanStatus::Complete);
  CHECK(render_call_expr(outcome.plan) ==
        "BookFlight(flight_ID=FindFlight(destination='Paris'))");
}

TEST_CASE("scripted resolver rejects unreadable and malformed script files") {
  CHECK_THROWS_AS((void)ScriptedResolver::from_file("/nonexistent.jsonl"), ResolverError);
  std::string path = support::temp_path("bad_script.jsonl");
  std::ofstream(path) << "not json\n";
  CHECK_THROWS_AS((void)ScriptedResolver::from_file(path), ResolverError);
  std::ofstream(path) << R"({"neither": "trace nor log"})" << "\n";
  CHECK_THROWS_AS((void)ScriptedResolver::from_file(path), ResolverError);
}
