#include <doctest.h>

#include "mock_rpc.hpp"
#include "seasoned/ingest.hpp"
#include "tempdir.hpp"

using namespace seasoned;
using seasoned::testing::MockRpc;
using seasoned::testing::TempDir;
using nlohmann::json;

namespace
{
IngestErrc error_of(const std::function<void()>& f)
{
    try
    {
        f();
    }
    catch (const IngestError& e)
    {
        return e.code();
    }
    FAIL("no IngestError thrown");
    return IngestErrc::ParseError;
}

Address addr(std::uint8_t fill)
{
    Address a;
    a.fill(fill);
    return a;
}

const std::string eoa = "0x00000000000000000000000000000000000000e0";
const std::string contract = "0xc0ee000000000000000000000000000000000001";
}  // namespace

TEST_CASE("hex_decode")
{
    CHECK(hex_decode("0x6080") == Bytes{0x60, 0x80});
    CHECK(hex_decode("6080") == Bytes{0x60, 0x80});
    CHECK(hex_decode("0XaBcD") == Bytes{0xab, 0xcd});
    CHECK(hex_decode("").empty());
    CHECK(hex_decode("0x").empty());
    CHECK(error_of([] { hex_decode("0x6g"); }) == IngestErrc::NonHexCharacter);
    CHECK(error_of([] { hex_decode("0x608"); }) == IngestErrc::OddLength);
}

TEST_CASE("detect_creation looks only at the recipient")
{
    TransactionStub tx;
    tx.input = hex_decode("0x6080604052");
    CHECK(detect_creation(tx));
    tx.to = addr(0);
    CHECK(detect_creation(tx));
    tx.to = parse_address("0xC0ee000000000000000000000000000000000000");
    CHECK_FALSE(detect_creation(tx));
    tx.input.clear();
    CHECK_FALSE(detect_creation(tx));
}

TEST_CASE("addresses")
{
    CHECK(is_address(contract));
    CHECK_FALSE(is_address("0x1234"));
    CHECK_FALSE(is_address("c0ee000000000000000000000000000000000001"));
    CHECK_FALSE(is_address("0xz0ee000000000000000000000000000000000001"));
    CHECK(parse_address(contract)[0] == 0xc0);
    CHECK(error_of([] { parse_address("0x12"); }) == IngestErrc::ParseError);
}

TEST_CASE("ISO-8601 timestamps")
{
    using namespace std::chrono;
    const auto t = parse_iso8601("2021-03-04T05:06:07Z");
    REQUIRE(t);
    CHECK(*t == sys_days{year{2021} / 3 / 4} + hours{5} + minutes{6} + seconds{7});
    CHECK(format_iso8601(*t) == "2021-03-04T05:06:07Z");
    CHECK(parse_iso8601("2021-03-04") == sys_seconds{sys_days{year{2021} / 3 / 4}});
    CHECK(parse_iso8601("2021-03-04T05:06:07+02:00") == *t - hours{2});
    CHECK(parse_iso8601("2021-03-04T05:06:07.250Z") == t);
    CHECK(parse_iso8601("1969-12-31T23:59:59Z") == sys_seconds{seconds{-1}});
    CHECK_FALSE(parse_iso8601("2021-13-01"));
    CHECK_FALSE(parse_iso8601("2021-02-30"));
    CHECK_FALSE(parse_iso8601("yesterday"));
}

TEST_CASE("manifest parsing and validation")
{
    TempDir dir;
    dir.write("a.hex", "0x6080\n");
    dir.write("b.hex", "6001");

    SUBCASE("two valid rows")
    {
        const auto p = dir.write("m.jsonl",
            R"({"id": "a", "bytecode_path": "a.hex", "label": 1, "deployed_at": "2020-01-02T03:04:05Z", "source": "rekt"})"
            "\n\n"
            R"({"id": "b", "address": "0xc0ee000000000000000000000000000000000001", "label": null})"
            "\n");
        const auto m = load_manifest(p);
        REQUIRE(m.records.size() == 2);
        CHECK(m.records[0].label == Label::aec);
        CHECK(m.records[0].source == "rekt");
        CHECK(m.records[1].address == contract);
        CHECK_FALSE(m.records[1].label);
        const auto r = load_record(m, m.records[0]);
        CHECK(r.bytecode == Bytes{0x60, 0x80});
        CHECK(r.deployed_at == m.records[0].deployed_at);
    }
    SUBCASE("duplicate id")
    {
        const auto p = dir.write("m.jsonl",
            "{\"id\": \"a\", \"bytecode_path\": \"a.hex\", \"label\": 0}\n"
            "{\"id\": \"a\", \"bytecode_path\": \"b.hex\", \"label\": 0}\n");
        CHECK(error_of([&] { load_manifest(p); }) == IngestErrc::DuplicateId);
    }
    SUBCASE("label outside the domain")
    {
        const auto p = dir.write("m.jsonl", "{\"id\": \"a\", \"bytecode_path\": \"a.hex\", \"label\": 2}\n");
        CHECK(error_of([&] { load_manifest(p); }) == IngestErrc::ParseError);
    }
    SUBCASE("schema violations")
    {
        for (const auto* line : {
                 R"({"id": "a", "label": 0})",
                 R"({"id": "a", "bytecode_path": "a.hex", "address": "0xc0ee000000000000000000000000000000000001", "label": 0})",
                 R"({"id": "a", "address": "0x1234", "label": 0})",
                 R"({"id": "a", "bytecode_path": "a.hex"})",
                 R"({"id": "", "bytecode_path": "a.hex", "label": 0})",
                 R"({"id": "a", "bytecode_path": "a.hex", "label": 0, "colour": "red"})",
                 R"({"id": "a", "bytecode_path": "a.hex", "label": 0, "deployed_at": "last week"})",
                 R"({"id": "a", "bytecode_path": "a.hex", "label": "1"})",
                 R"([1, 2])",
                 R"({"id": "a", )",
             })
        {
            CAPTURE(line);
            CHECK(error_of([&] { parse_manifest(line, dir.path()); }) == IngestErrc::ParseError);
        }
    }
    SUBCASE("missing bytecode file and missing manifest")
    {
        CHECK(error_of([&] { parse_manifest(R"({"id": "a", "bytecode_path": "nope.hex", "label": 0})", dir.path()); }) ==
              IngestErrc::MissingFile);
        CHECK(error_of([&] { load_manifest(dir / "absent.jsonl"); }) == IngestErrc::MissingFile);
    }
    SUBCASE("save/load round trip")
    {
        DatasetManifest m;
        m.base_dir = dir.path();
        m.records.push_back({"a", "a.hex", std::nullopt, Label::benign, parse_iso8601("2019-05-06T07:08:09Z"), "x"});
        m.records.push_back({"b", std::nullopt, contract, std::nullopt, std::nullopt, std::nullopt});
        m.records.push_back({"c \"q\"", "b.hex", std::nullopt, Label::aec, std::nullopt, "é"});
        save_manifest(m, dir / "out.jsonl");
        const auto back = load_manifest(dir / "out.jsonl");
        CHECK(back.records == m.records);
    }
}

TEST_CASE("CSV import")
{
    TempDir dir;
    dir.write("a.hex", "0x00");
    const auto m = manifest_from_csv(
        "label,id,bytecode_path,address,deployed_at,source\n"
        "1,a,a.hex,,2020-01-01,\"rekt, news\"\n"
        ",b,,0xc0ee000000000000000000000000000000000001,,\n",
        dir.path());
    REQUIRE(m.records.size() == 2);
    CHECK(m.records[0].label == Label::aec);
    CHECK(m.records[0].source == "rekt, news");
    CHECK(m.records[1].label == std::nullopt);
    CHECK(m.records[1].address == contract);
    CHECK(error_of([&] { manifest_from_csv("id,bytecode_path,label\na,a.hex,7\n", dir.path()); }) ==
          IngestErrc::ParseError);
}

TEST_CASE("bytecode files")
{
    TempDir dir;
    CHECK(read_bytecode_file(dir.write("a.hex", "0x6080\r\n")) == Bytes{0x60, 0x80});
    CHECK(read_bytecode_file(dir.write("b.hex", "6080")) == Bytes{0x60, 0x80});
    CHECK(error_of([&] { read_bytecode_file(dir.write("c.hex", "0x60zz")); }) == IngestErrc::NonHexCharacter);
    CHECK(error_of([&] { read_bytecode_file(dir / "none.hex"); }) == IngestErrc::MissingFile);
}

TEST_CASE("fetch_bytecode over JSON-RPC")
{
    MockRpc rpc([](const std::string& method, const json& params) -> json {
        if (method != "eth_getCode")
            return {{"error", {{"code", -32601}, {"message", "method not found"}}}};
        if (params.at(1) != "latest")
            return {{"error", {{"code", -32602}, {"message", "bad block"}}}};
        if (params.at(0) == eoa)
            return {{"result", "0x"}};
        if (params.at(0) == "0x00000000000000000000000000000000000000bb")
            return {{"error", {{"code", -32000}, {"message", "header not found"}}}};
        if (params.at(0) == "0x00000000000000000000000000000000000000cc")
            return json("{not json");
        return {{"result", "0x6080604052"}};
    });

    CHECK(fetch_bytecode(rpc.url(), parse_address(contract)) == hex_decode("0x6080604052"));
    CHECK(rpc.last_request().at("method") == "eth_getCode");
    CHECK(rpc.last_request().at("params").at(0) == contract);
    CHECK(fetch_bytecode(rpc.url("/rpc"), parse_address(contract)).size() == 5);
    CHECK(error_of([&] { fetch_bytecode(rpc.url(), parse_address(eoa)); }) == IngestErrc::EmptyCode);

    Address bb{};
    bb[19] = 0xbb;
    try
    {
        fetch_bytecode(rpc.url(), bb);
        FAIL("expected RpcError");
    }
    catch (const IngestError& e)
    {
        CHECK(e.code() == IngestErrc::RpcError);
        CHECK(e.rpc_code() == -32000);
    }
    Address cc{};
    cc[19] = 0xcc;
    CHECK(error_of([&] { fetch_bytecode(rpc.url(), cc); }) == IngestErrc::RpcError);
}

TEST_CASE("fetch_bytecode: unreachable endpoint")
{
    int port = 0;
    {
        // grab a free port, then release it so nothing listens there
        httplib::Server s;
        port = s.bind_to_any_port("127.0.0.1");
    }
    const auto url = "http://127.0.0.1:" + std::to_string(port);
    CHECK(error_of([&] { fetch_bytecode(url, parse_address(contract), std::chrono::seconds{2}); }) ==
          IngestErrc::NetworkError);
    CHECK(error_of([&] { fetch_bytecode("no-scheme", parse_address(contract)); }) == IngestErrc::NetworkError);
}

TEST_CASE("fetch_transaction")
{
    MockRpc rpc([](const std::string& method, const json& params) -> json {
        REQUIRE(method == "eth_getTransactionByHash");
        const auto h = params.at(0).get<std::string>();
        if (h.ends_with("01"))
            return {{"result", {{"hash", h}, {"to", nullptr}, {"input", "0x60806040"}}}};
        if (h.ends_with("02"))
            return {{"result", {{"hash", h}, {"to", contract}, {"input", "0xa9059cbb"}}}};
        return {{"result", nullptr}};
    });
    Hash32 h{};
    h[31] = 0x01;
    const auto creation = fetch_transaction(rpc.url(), h);
    REQUIRE(creation);
    CHECK(detect_creation(*creation));
    CHECK(creation->input == hex_decode("0x60806040"));
    h[31] = 0x02;
    const auto call = fetch_transaction(rpc.url(), h);
    REQUIRE(call);
    CHECK_FALSE(detect_creation(*call));
    h[31] = 0x03;
    CHECK_FALSE(fetch_transaction(rpc.url(), h));
}
