#pragma once

#include <functional>
#include <string>
#include <thread>

#include <httplib.h>
#include <json.hpp>

namespace seasoned::testing
{
/// Local JSON-RPC endpoint. The handler maps (method, params) to the full response
/// object minus "jsonrpc"/"id", e.g. {"result": "0x60"} or {"error": {...}}.
class MockRpc
{
public:
    using Handler = std::function<nlohmann::json(const std::string&, const nlohmann::json&)>;

    explicit MockRpc(Handler h) : handler_(std::move(h))
    {
        server_.Post("/", [this](const httplib::Request& req, httplib::Response& res) { serve(req, res); });
        server_.Post("/rpc", [this](const httplib::Request& req, httplib::Response& res) { serve(req, res); });
        port_ = server_.bind_to_any_port("127.0.0.1");
        thread_ = std::thread([this] { server_.listen_after_bind(); });
        server_.wait_until_ready();
    }

    ~MockRpc()
    {
        server_.stop();
        thread_.join();
    }

    std::string url(const std::string& path = "") const
    {
        return "http://127.0.0.1:" + std::to_string(port_) + path;
    }

    int requests() const { return requests_; }
    const nlohmann::json& last_request() const { return last_; }

private:
    void serve(const httplib::Request& req, httplib::Response& res)
    {
        ++requests_;
        last_ = nlohmann::json::parse(req.body);
        auto body = handler_(last_.at("method").get<std::string>(), last_.value("params", nlohmann::json::array()));
        if (body.is_string())
        {
            // raw body, for malformed-response cases
            res.set_content(body.get<std::string>(), "application/json");
            return;
        }
        body["jsonrpc"] = "2.0";
        body["id"] = last_.value("id", nlohmann::json(1));
        res.set_content(body.dump(), "application/json");
    }

    Handler handler_;
    httplib::Server server_;
    std::thread thread_;
    int port_ = 0;
    int requests_ = 0;
    nlohmann::json last_;
};

}  // namespace seasoned::testing
