#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <string>

#include "vrtraffic/trace_io.hpp"

#include "helpers.hpp"

using namespace vrtraffic;
using test_helpers::pkt;

TEST_CASE("csv single row parses without header") {
  const PacketTrace t = parse_trace("0,D,9000,54321,1514", TraceFormat::Csv);
  REQUIRE(t.packets.size() == 1);
  CHECK(t.packets[0].ts_us == 0);
  CHECK(t.packets[0].dir == Direction::Downlink);
  CHECK(t.packets[0].src_port == 9000);
  CHECK(t.packets[0].dst_port == 54321);
  CHECK(t.packets[0].len == 1514);
}

TEST_CASE("csv header line is recognized and skipped") {
  const PacketTrace t = parse_trace(
      "ts_us,dir,src_port,dst_port,len\n5,U,1,2,60\n", TraceFormat::Csv);
  REQUIRE(t.packets.size() == 1);
  CHECK(t.packets[0].dir == Direction::Uplink);
}

TEST_CASE("equal timestamps keep file order, later ones sort") {
  const PacketTrace t = parse_trace(
      "5,D,1,2,100\n3,D,3,4,200\n3,D,5,6,300\n", TraceFormat::Csv);
  REQUIRE(t.packets.size() == 3);
  CHECK(t.packets[0].ts_us == 3);
  CHECK(t.packets[0].src_port == 3);  // first ts=3 row stays first
  CHECK(t.packets[1].src_port == 5);
  CHECK(t.packets[2].ts_us == 5);
}

TEST_CASE("malformed timestamp reports line and field") {
  try {
    parse_trace("x,D,9000,54321,1514", TraceFormat::Csv);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 1);
    CHECK(e.field() == "ts");
  }
}

TEST_CASE("field errors carry the right field name") {
  auto field_of = [](std::string_view row) {
    try {
      parse_trace(row, TraceFormat::Csv);
    } catch (const ParseError& e) {
      return e.field();
    }
    return std::string("no error");
  };
  CHECK(field_of("-1,D,1,2,3") == "ts");
  CHECK(field_of("0,X,1,2,3") == "dir");
  CHECK(field_of("0,D,99999,2,3") == "src_port");
  CHECK(field_of("0,D,1,65536,3") == "dst_port");
  CHECK(field_of("0,D,1,2,0") == "len");
  CHECK(field_of("0,D,1,2") == "row");
  CHECK(field_of("0,D,1,2,3,4") == "row");
}

TEST_CASE("empty input is an error, header-only is the empty trace") {
  CHECK_THROWS_AS(parse_trace("", TraceFormat::Csv), ParseError);
  CHECK_THROWS_AS(parse_trace("", TraceFormat::Jsonl), ParseError);
  const PacketTrace t =
      parse_trace("ts_us,dir,src_port,dst_port,len\n", TraceFormat::Csv);
  CHECK(t.packets.empty());
}

TEST_CASE("write emits header-only output for the empty trace") {
  PacketTrace empty;
  const std::string out = write_trace(empty, TraceFormat::Csv);
  CHECK(out == "ts_us,dir,src_port,dst_port,len\n");
  CHECK(parse_trace(out, TraceFormat::Csv) == empty);
}

TEST_CASE("single packet round-trips through both formats") {
  PacketTrace t;
  t.packets.push_back(pkt(7, Direction::Uplink, 54321, 9000, 60));
  for (auto fmt : {TraceFormat::Csv, TraceFormat::Jsonl}) {
    CHECK(parse_trace(write_trace(t, fmt), fmt) == t);
  }
}

TEST_CASE("jsonl rows carry the same keys as csv columns") {
  PacketTrace t;
  t.packets.push_back(pkt(0, Direction::Downlink, 9000, 54321, 1514));
  CHECK(write_trace(t, TraceFormat::Jsonl) ==
        "{\"ts_us\":0,\"dir\":\"D\",\"src_port\":9000,\"dst_port\":54321,"
        "\"len\":1514}\n");
}

TEST_CASE("jsonl rejects missing and extra keys") {
  CHECK_THROWS_AS(parse_trace(R"({"ts_us":0,"dir":"D"})", TraceFormat::Jsonl),
                  ParseError);
  CHECK_THROWS_AS(
      parse_trace(
          R"({"ts_us":0,"dir":"D","src_port":1,"dst_port":2,"len":3,"x":4})",
          TraceFormat::Jsonl),
      ParseError);
  CHECK_THROWS_AS(parse_trace("not json", TraceFormat::Jsonl), ParseError);
}

TEST_CASE("random traces are byte-identical after one round trip") {
  std::mt19937_64 rng(42);
  for (auto fmt : {TraceFormat::Csv, TraceFormat::Jsonl}) {
    PacketTrace t;
    std::int64_t ts = 0;
    for (int i = 0; i < 10000; ++i) {
      ts += static_cast<std::int64_t>(rng() % 500);
      t.packets.push_back(pkt(
          ts, rng() % 2 ? Direction::Downlink : Direction::Uplink,
          static_cast<std::uint16_t>(rng() % 65536),
          static_cast<std::uint16_t>(rng() % 65536),
          static_cast<std::uint32_t>(1 + rng() % 1514)));
    }
    const std::string once = write_trace(t, fmt);
    const std::string twice = write_trace(parse_trace(once, fmt), fmt);
    REQUIRE(once == twice);
  }
}

TEST_CASE("sorting is idempotent") {
  const std::string input = "9,D,1,2,3\n4,U,1,2,3\n4,D,9,9,9\n1,D,1,2,3\n";
  const PacketTrace a = parse_trace(input, TraceFormat::Csv);
  const PacketTrace b =
      parse_trace(write_trace(a, TraceFormat::Csv), TraceFormat::Csv);
  CHECK(a == b);
  CHECK(is_sorted_by_ts(a.packets));
}

TEST_CASE("format inference from file extension") {
  CHECK(trace_format_from_path("a/b/trace.csv") == TraceFormat::Csv);
  CHECK(trace_format_from_path("trace.jsonl") == TraceFormat::Jsonl);
  CHECK_THROWS_AS(trace_format_from_path("trace.pcap"), ParseError);
}
