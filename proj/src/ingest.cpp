#include "seasoned/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_map>

#include <fmt/format.h>
#include <json.hpp>

namespace seasoned
{
using nlohmann::json;

std::string_view to_string(IngestErrc e) noexcept
{
    switch (e)
    {
    case IngestErrc::OddLength:
        return "OddLength";
    case IngestErrc::NonHexCharacter:
        return "NonHexCharacter";
    case IngestErrc::ParseError:
        return "ParseError";
    case IngestErrc::DuplicateId:
        return "DuplicateId";
    case IngestErrc::MissingFile:
        return "MissingFile";
    case IngestErrc::NetworkError:
        return "NetworkError";
    case IngestErrc::RpcError:
        return "RpcError";
    case IngestErrc::EmptyCode:
        return "EmptyCode";
    }
    return "Unknown";
}

namespace
{
int nibble(char c) noexcept
{
    if (c >= '0' && c <= '9')
        return c - '0';
    if (c >= 'a' && c <= 'f')
        return c - 'a' + 10;
    if (c >= 'A' && c <= 'F')
        return c - 'A' + 10;
    return -1;
}

std::string_view strip_prefix(std::string_view s) noexcept
{
    if (s.size() >= 2 && s[0] == '0' && (s[1] == 'x' || s[1] == 'X'))
        s.remove_prefix(2);
    return s;
}

[[noreturn]] void parse_error(std::size_t line, const std::string& msg)
{
    throw IngestError(IngestErrc::ParseError, fmt::format("manifest line {}: {}", line, msg));
}
}  // namespace

Bytes hex_decode(std::string_view text)
{
    const auto digits = strip_prefix(text);
    for (std::size_t i = 0; i < digits.size(); ++i)
        if (nibble(digits[i]) < 0)
            throw IngestError(IngestErrc::NonHexCharacter,
                fmt::format("non-hex character '{}' at offset {}", digits[i], i));
    if (digits.size() % 2 != 0)
        throw IngestError(IngestErrc::OddLength, "odd number of hex digits");
    Bytes out(digits.size() / 2);
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = static_cast<std::uint8_t>(nibble(digits[2 * i]) << 4 | nibble(digits[2 * i + 1]));
    return out;
}

bool is_address(std::string_view text) noexcept
{
    if (text.size() != 42 || text[0] != '0' || (text[1] != 'x' && text[1] != 'X'))
        return false;
    return std::all_of(text.begin() + 2, text.end(), [](char c) { return nibble(c) >= 0; });
}

Address parse_address(std::string_view text)
{
    if (!is_address(text))
        throw IngestError(IngestErrc::ParseError, fmt::format("invalid address '{}'", text));
    const auto bytes = hex_decode(text);
    Address a{};
    std::copy(bytes.begin(), bytes.end(), a.begin());
    return a;
}

bool detect_creation(const TransactionStub& tx) noexcept
{
    return !tx.to || std::all_of(tx.to->begin(), tx.to->end(), [](auto b) { return b == 0; });
}

namespace
{
bool read_int(std::string_view s, std::size_t pos, std::size_t len, int& out) noexcept
{
    if (pos + len > s.size())
        return false;
    const auto* first = s.data() + pos;
    const auto [ptr, ec] = std::from_chars(first, first + len, out);
    return ec == std::errc{} && ptr == first + len;
}
}  // namespace

std::optional<Timestamp> parse_iso8601(std::string_view s)
{
    int year = 0, month = 0, day = 0, hour = 0, minute = 0, second = 0;
    if (!read_int(s, 0, 4, year) || s.size() < 10 || s[4] != '-' || !read_int(s, 5, 2, month) ||
        s[7] != '-' || !read_int(s, 8, 2, day))
        return std::nullopt;
    if (month < 1 || month > 12 || day < 1 || day > 31)
        return std::nullopt;
    std::int64_t offset = 0;
    std::size_t pos = 10;
    if (pos < s.size())
    {
        if ((s[pos] != 'T' && s[pos] != ' ') || !read_int(s, pos + 1, 2, hour) ||
            s.size() < pos + 9 || s[pos + 3] != ':' || !read_int(s, pos + 4, 2, minute) ||
            s[pos + 6] != ':' || !read_int(s, pos + 7, 2, second))
            return std::nullopt;
        if (hour > 23 || minute > 59 || second > 60)
            return std::nullopt;
        pos += 9;
        if (pos < s.size() && s[pos] == '.')
        {
            ++pos;
            const auto start = pos;
            while (pos < s.size() && s[pos] >= '0' && s[pos] <= '9')
                ++pos;
            if (pos == start)
                return std::nullopt;
        }
        if (pos < s.size())
        {
            if (s[pos] == 'Z' && pos + 1 == s.size())
                pos += 1;
            else if ((s[pos] == '+' || s[pos] == '-') && s.size() == pos + 6 && s[pos + 3] == ':')
            {
                int oh = 0, om = 0;
                if (!read_int(s, pos + 1, 2, oh) || !read_int(s, pos + 4, 2, om))
                    return std::nullopt;
                offset = (s[pos] == '+' ? 1 : -1) * (oh * 3600 + om * 60);
                pos += 6;
            }
            else
                return std::nullopt;
        }
    }
    const std::chrono::year_month_day date{std::chrono::year{year},
        std::chrono::month{static_cast<unsigned>(month)}, std::chrono::day{static_cast<unsigned>(day)}};
    if (!date.ok())
        return std::nullopt;
    return std::chrono::sys_days{date} +
           std::chrono::seconds{hour * 3600 + minute * 60 + second - offset};
}

std::string format_iso8601(Timestamp t)
{
    const auto day = std::chrono::floor<std::chrono::days>(t);
    const std::chrono::year_month_day date{day};
    const std::chrono::hh_mm_ss time{t - day};
    return fmt::format("{:04}-{:02}-{:02}T{:02}:{:02}:{:02}Z", static_cast<int>(date.year()),
        static_cast<unsigned>(date.month()), static_cast<unsigned>(date.day()), time.hours().count(),
        time.minutes().count(), time.seconds().count());
}

std::filesystem::path DatasetManifest::resolve(const ManifestEntry& e) const
{
    const std::filesystem::path p = e.bytecode_path.value_or("");
    return p.is_absolute() ? p : base_dir / p;
}

namespace
{
ManifestEntry entry_from_json(const json& j, std::size_t line)
{
    if (!j.is_object())
        parse_error(line, "record is not an object");
    for (const auto& [key, _] : j.items())
        if (key != "id" && key != "bytecode_path" && key != "address" && key != "label" &&
            key != "deployed_at" && key != "source")
            parse_error(line, fmt::format("unknown field '{}'", key));

    ManifestEntry e;
    if (!j.contains("id") || !j["id"].is_string() || j["id"].get_ref<const std::string&>().empty())
        parse_error(line, "'id' must be a non-empty string");
    e.id = j["id"].get<std::string>();

    if (!j.contains("label"))
        parse_error(line, "'label' is required");
    const auto& label = j["label"];
    if (label.is_null())
        e.label = std::nullopt;
    else if (label.is_number_integer() && (label.get<int>() == 0 || label.get<int>() == 1))
        e.label = static_cast<Label>(label.get<int>());
    else
        parse_error(line, fmt::format("'label' must be 0, 1 or null, got {}", label.dump()));

    const auto opt_string = [&](const char* key) -> std::optional<std::string> {
        if (!j.contains(key))
            return std::nullopt;
        if (!j[key].is_string())
            parse_error(line, fmt::format("'{}' must be a string", key));
        return j[key].get<std::string>();
    };
    e.bytecode_path = opt_string("bytecode_path");
    e.address = opt_string("address");
    e.source = opt_string("source");
    if (e.bytecode_path.has_value() == e.address.has_value())
        parse_error(line, "exactly one of 'bytecode_path' and 'address' is required");
    if (e.address && !is_address(*e.address))
        parse_error(line, fmt::format("'address' must be 0x + 40 hex digits, got '{}'", *e.address));
    if (const auto ts = opt_string("deployed_at"))
    {
        e.deployed_at = parse_iso8601(*ts);
        if (!e.deployed_at)
            parse_error(line, fmt::format("'deployed_at' is not ISO-8601: '{}'", *ts));
    }
    return e;
}

json entry_to_json(const ManifestEntry& e)
{
    nlohmann::ordered_json j;
    j["id"] = e.id;
    if (e.bytecode_path)
        j["bytecode_path"] = *e.bytecode_path;
    if (e.address)
        j["address"] = *e.address;
    j["label"] = e.label ? json(static_cast<int>(*e.label)) : json(nullptr);
    if (e.deployed_at)
        j["deployed_at"] = format_iso8601(*e.deployed_at);
    if (e.source)
        j["source"] = *e.source;
    return j;
}

void validate(const DatasetManifest& m)
{
    std::set<std::string_view> ids;
    for (const auto& e : m.records)
    {
        if (!ids.insert(e.id).second)
            throw IngestError(IngestErrc::DuplicateId, fmt::format("duplicate id '{}'", e.id));
        if (e.bytecode_path && !std::filesystem::is_regular_file(m.resolve(e)))
            throw IngestError(IngestErrc::MissingFile,
                fmt::format("'{}': bytecode file not found: {}", e.id, m.resolve(e).string()));
    }
}
}  // namespace

DatasetManifest parse_manifest(std::string_view text, std::filesystem::path base_dir)
{
    DatasetManifest m;
    m.base_dir = std::move(base_dir);
    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start <= text.size())
    {
        const auto end = std::min(text.find('\n', start), text.size());
        auto line = text.substr(start, end - start);
        ++line_no;
        start = end + 1;
        if (line.find_first_not_of(" \t\r") == std::string_view::npos)
            continue;
        json j;
        try
        {
            j = json::parse(line);
        }
        catch (const json::parse_error& e)
        {
            parse_error(line_no, e.what());
        }
        m.records.push_back(entry_from_json(j, line_no));
    }
    validate(m);
    return m;
}

DatasetManifest load_manifest(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IngestError(IngestErrc::MissingFile, fmt::format("cannot open manifest {}", path.string()));
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_manifest(ss.str(), path.parent_path());
}

std::string manifest_to_jsonl(const DatasetManifest& m)
{
    std::string out;
    for (const auto& e : m.records)
        out += entry_to_json(e).dump() + '\n';
    return out;
}

void save_manifest(const DatasetManifest& m, const std::filesystem::path& path)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw IngestError(IngestErrc::MissingFile, fmt::format("cannot write {}", path.string()));
    out << manifest_to_jsonl(m);
}

namespace
{
std::vector<std::string> split_csv_row(std::string_view row)
{
    std::vector<std::string> cells(1);
    bool quoted = false;
    for (std::size_t i = 0; i < row.size(); ++i)
    {
        const char c = row[i];
        if (quoted)
        {
            if (c == '"' && i + 1 < row.size() && row[i + 1] == '"')
            {
                cells.back().push_back('"');
                ++i;
            }
            else if (c == '"')
                quoted = false;
            else
                cells.back().push_back(c);
        }
        else if (c == '"')
            quoted = true;
        else if (c == ',')
            cells.emplace_back();
        else if (c != '\r')
            cells.back().push_back(c);
    }
    return cells;
}
}  // namespace

DatasetManifest manifest_from_csv(std::string_view csv, std::filesystem::path base_dir)
{
    std::vector<std::string> header;
    std::string jsonl;
    std::size_t start = 0;
    while (start < csv.size())
    {
        const auto end = std::min(csv.find('\n', start), csv.size());
        const auto row = csv.substr(start, end - start);
        start = end + 1;
        if (row.find_first_not_of(" \t\r") == std::string_view::npos)
            continue;
        auto cells = split_csv_row(row);
        if (header.empty())
        {
            header = std::move(cells);
            continue;
        }
        json j = json::object();
        for (std::size_t c = 0; c < header.size() && c < cells.size(); ++c)
        {
            const auto& key = header[c];
            const auto& cell = cells[c];
            if (key == "label")
            {
                if (cell.empty() || cell == "null")
                    j["label"] = nullptr;
                else if (cell == "0" || cell == "1")
                    j["label"] = cell == "1" ? 1 : 0;
                else
                    j["label"] = cell;
            }
            else if (!cell.empty())
                j[key] = cell;
        }
        if (!j.contains("label"))
            j["label"] = nullptr;
        jsonl += j.dump() + '\n';
    }
    return parse_manifest(jsonl, std::move(base_dir));
}

Bytes read_bytecode_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IngestError(IngestErrc::MissingFile, fmt::format("cannot open {}", path.string()));
    std::stringstream ss;
    ss << in.rdbuf();
    auto text = ss.str();
    while (!text.empty() && (text.back() == '\n' || text.back() == '\r' || text.back() == ' ' ||
                                text.back() == '\t'))
        text.pop_back();
    return hex_decode(text);
}

ContractRecord load_record(const DatasetManifest& m, const ManifestEntry& e)
{
    if (!e.bytecode_path)
        throw IngestError(IngestErrc::MissingFile,
            fmt::format("'{}' is address-backed; fetch it over RPC first", e.id));
    ContractRecord r;
    r.id = e.id;
    r.bytecode = read_bytecode_file(m.resolve(e));
    r.label = e.label;
    r.deployed_at = e.deployed_at;
    r.source = e.source.value_or("");
    return r;
}

}  // namespace seasoned
