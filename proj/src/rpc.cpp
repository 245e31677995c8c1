#include <atomic>

#include <fmt/format.h>
#include <json.hpp>

#include <httplib.h>

#include "seasoned/ingest.hpp"

namespace seasoned
{
using nlohmann::json;

namespace
{
struct Endpoint
{
    std::string origin;  // scheme://host[:port]
    std::string path;
};

Endpoint split_url(const std::string& url)
{
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos)
        throw IngestError(IngestErrc::NetworkError, fmt::format("endpoint '{}' has no scheme", url));
    const auto path_start = url.find('/', scheme_end + 3);
    if (path_start == std::string::npos)
        return {url, "/"};
    return {url.substr(0, path_start), url.substr(path_start)};
}

json call(const std::string& url, const std::string& method, json params,
    std::chrono::seconds timeout)
{
    static std::atomic<std::uint64_t> next_id{1};
    const auto ep = split_url(url);
    httplib::Client client(ep.origin);
    client.set_connection_timeout(timeout);
    client.set_read_timeout(timeout);
    client.set_write_timeout(timeout);

    const json request = {
        {"jsonrpc", "2.0"}, {"id", next_id++}, {"method", method}, {"params", std::move(params)}};
    const auto res = client.Post(ep.path, request.dump(), "application/json");
    if (!res)
        throw IngestError(IngestErrc::NetworkError,
            fmt::format("{} {}: {}", method, url, httplib::to_string(res.error())));
    if (res->status != 200)
        throw IngestError(IngestErrc::NetworkError,
            fmt::format("{} {}: HTTP status {}", method, url, res->status));

    json body;
    try
    {
        body = json::parse(res->body);
    }
    catch (const json::parse_error& e)
    {
        throw IngestError(IngestErrc::RpcError, fmt::format("{}: malformed response: {}", method, e.what()));
    }
    if (body.contains("error") && !body["error"].is_null())
    {
        const auto& err = body["error"];
        const int code = err.value("code", 0);
        throw IngestError(IngestErrc::RpcError,
            fmt::format("{}: error {}: {}", method, code, err.value("message", std::string{})), code);
    }
    if (!body.contains("result"))
        throw IngestError(IngestErrc::RpcError, fmt::format("{}: response has no result", method));
    return body["result"];
}

Bytes decode_hex_field(const json& v, const char* what)
{
    if (!v.is_string())
        throw IngestError(IngestErrc::RpcError, fmt::format("{} is not a hex string", what));
    try
    {
        return hex_decode(v.get<std::string>());
    }
    catch (const IngestError& e)
    {
        throw IngestError(IngestErrc::RpcError, fmt::format("{}: {}", what, e.what()));
    }
}
}  // namespace

Bytes fetch_bytecode(const std::string& endpoint, const Address& address, std::chrono::seconds timeout)
{
    const auto result = call(endpoint, "eth_getCode", json::array({to_hex(address), "latest"}), timeout);
    auto code = decode_hex_field(result, "eth_getCode result");
    if (code.empty())
        throw IngestError(IngestErrc::EmptyCode,
            fmt::format("{} has no code (externally owned account)", to_hex(address)));
    return code;
}

std::optional<TransactionStub> fetch_transaction(
    const std::string& endpoint, const Hash32& hash, std::chrono::seconds timeout)
{
    const auto result = call(endpoint, "eth_getTransactionByHash", json::array({to_hex(hash)}), timeout);
    if (result.is_null())
        return std::nullopt;
    if (!result.is_object())
        throw IngestError(IngestErrc::RpcError, "transaction result is not an object");

    TransactionStub tx;
    tx.hash = hash;
    if (result.contains("to") && !result["to"].is_null())
    {
        const auto to = decode_hex_field(result["to"], "transaction 'to'");
        if (to.size() != 20)
            throw IngestError(IngestErrc::RpcError, "transaction 'to' is not 20 bytes");
        tx.to.emplace();
        std::copy(to.begin(), to.end(), tx.to->begin());
    }
    tx.input = decode_hex_field(result.value("input", json("0x")), "transaction 'input'");
    return tx;
}

}  // namespace seasoned
