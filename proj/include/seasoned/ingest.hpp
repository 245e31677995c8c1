#pragma once

#include <array>
#include <chrono>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "seasoned/types.hpp"

namespace seasoned
{
using Address = std::array<std::uint8_t, 20>;
using Hash32 = std::array<std::uint8_t, 32>;
using Timestamp = std::chrono::sys_seconds;

enum class IngestErrc
{
    OddLength,
    NonHexCharacter,
    ParseError,
    DuplicateId,
    MissingFile,
    NetworkError,
    RpcError,
    EmptyCode,
};

std::string_view to_string(IngestErrc e) noexcept;

class IngestError : public std::runtime_error
{
public:
    IngestError(IngestErrc code, const std::string& what, int rpc_code = 0)
      : std::runtime_error(what), code_(code), rpc_code_(rpc_code)
    {}

    IngestErrc code() const noexcept { return code_; }
    /// JSON-RPC error code, for RpcError.
    int rpc_code() const noexcept { return rpc_code_; }

private:
    IngestErrc code_;
    int rpc_code_;
};

/// Hex with optional 0x prefix. Throws OddLength / NonHexCharacter.
Bytes hex_decode(std::string_view text);

/// "0x" + 40 hex digits. Throws ParseError.
Address parse_address(std::string_view text);
bool is_address(std::string_view text) noexcept;

struct TransactionStub
{
    Hash32 hash{};
    std::optional<Address> to;
    Bytes input;
};

/// A creation transaction has an empty or zero To field.
bool detect_creation(const TransactionStub& tx) noexcept;

struct ContractRecord
{
    std::string id;
    Bytes bytecode;
    OptLabel label;
    std::optional<Timestamp> deployed_at;
    std::string source;
};

/// One manifest line. Exactly one of bytecode_path / address is set.
struct ManifestEntry
{
    std::string id;
    std::optional<std::string> bytecode_path;
    std::optional<std::string> address;
    OptLabel label;
    std::optional<Timestamp> deployed_at;
    std::optional<std::string> source;

    bool operator==(const ManifestEntry&) const = default;
};

struct DatasetManifest
{
    std::vector<ManifestEntry> records;
    /// Relative bytecode paths resolve against this directory.
    std::filesystem::path base_dir;

    std::filesystem::path resolve(const ManifestEntry& e) const;
};

/// Line-delimited JSON. Blank lines are skipped.
DatasetManifest parse_manifest(std::string_view text, std::filesystem::path base_dir = {});
DatasetManifest load_manifest(const std::filesystem::path& path);

std::string manifest_to_jsonl(const DatasetManifest& m);
void save_manifest(const DatasetManifest& m, const std::filesystem::path& path);

/// CSV with header columns id,bytecode_path,address,label,deployed_at,source
/// (any order, missing columns allowed). Empty label or "null" means unlabeled.
DatasetManifest manifest_from_csv(std::string_view csv, std::filesystem::path base_dir = {});

/// Raw hex text file, optional 0x prefix and trailing whitespace.
Bytes read_bytecode_file(const std::filesystem::path& path);

/// Loads the bytecode of a path-backed entry. Address entries need fetch_bytecode.
ContractRecord load_record(const DatasetManifest& m, const ManifestEntry& e);

/// "YYYY-MM-DD", "YYYY-MM-DDTHH:MM:SS[.frac][Z|+HH:MM|-HH:MM]".
std::optional<Timestamp> parse_iso8601(std::string_view text);
std::string format_iso8601(Timestamp t);

/// eth_getCode(address, "latest") over JSON-RPC.
/// Throws NetworkError, RpcError, or EmptyCode (externally owned account).
Bytes fetch_bytecode(const std::string& endpoint, const Address& address,
    std::chrono::seconds timeout = std::chrono::seconds{30});

/// eth_getTransactionByHash; nullopt when the node does not know the hash.
std::optional<TransactionStub> fetch_transaction(const std::string& endpoint, const Hash32& hash,
    std::chrono::seconds timeout = std::chrono::seconds{30});

}  // namespace seasoned
