#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "seasoned/ingest.hpp"
#include "seasoned/srg.hpp"

namespace seasoned
{
/// Bumped whenever the opcode vocabulary changes.
inline constexpr int vocab_version = 1;

/// Retained semantic opcodes of the Shanghai table in byte order, then CONST.
const std::vector<std::string>& default_vocab();

class SchemaError : public std::runtime_error
{
public:
    SchemaError(std::string path, const std::string& what)
      : std::runtime_error(path + ": " + what), path_(std::move(path))
    {}
    /// JSON pointer of the offending field.
    const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

struct JsonOptions
{
    /// Emit dependency -> dependent instead of the native dependent -> dependency.
    bool reverse_edges = false;
    /// Pretty-print indent; negative for one line.
    int indent = -1;
};

std::string to_json(const Srg& g, const JsonOptions& options = {});
Srg from_json(std::string_view text);

Srg load_srg(const std::filesystem::path& path);

/// temp file + rename.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

// Explanation emitted by the detector; the factual edge set drives DOT highlighting.
struct Explanation
{
    std::string contract_id;
    double p_g = 0.0;
    double p_s = 0.0;
    double p_r = 0.0;
    std::vector<std::size_t> factual_edges;
    std::vector<std::size_t> counterfactual_edges;
};

Explanation explanation_from_json(std::string_view text);
std::string to_json(const Explanation& e);

/// SchemaError when the explanation names another contract or an absent edge id.
void check_against(const Explanation& e, const Srg& g);

struct DotOptions
{
    /// Edge ids drawn in orange, with their endpoints.
    std::optional<std::set<std::size_t>> highlight;
    /// Injected nodes: red when highlighted, green otherwise.
    std::set<NodeId> injected;
};

std::string to_dot(const Srg& g, const DotOptions& options = {});

enum class SplitStrategy
{
    KFold,
    RandPct,
    OldPct,
};

struct SplitSpec
{
    SplitStrategy strategy = SplitStrategy::KFold;
    /// Fold count for KFold, training percentage otherwise.
    double value = 10;
};

/// "kfold:K", "rand:P", "old:P".
SplitSpec parse_split_spec(std::string_view text);
std::string to_string(const SplitSpec& s);

enum class Partition
{
    Train,
    Val,
    Test,
};

std::string_view to_string(Partition p) noexcept;

struct SplitPlan
{
    SplitSpec spec;
    std::uint64_t seed = 0;
    /// Manifest order. KFold fills fold, the percentage strategies fill partition.
    struct Assignment
    {
        std::string id;
        std::optional<int> fold;
        std::optional<Partition> partition;

        bool operator==(const Assignment&) const = default;
    };
    std::vector<Assignment> assignments;
};

enum class SplitErrc
{
    MissingTimestamp,
    MissingLabel,
    InvalidSpec,
};

class SplitError : public std::runtime_error
{
public:
    SplitError(SplitErrc code, const std::string& what) : std::runtime_error(what), code_(code) {}
    SplitErrc code() const noexcept { return code_; }

private:
    SplitErrc code_;
};

/// KFold: seeded shuffle, fold = position mod k. RandPct: seeded shuffle, first
/// round(n*p/100) train. OldPct: ascending deployed_at, earliest round(n*p/100) train.
/// The remainder splits val/test in half (val gets the smaller half); OldPct keeps the
/// newest contracts in test.
SplitPlan make_splits(const DatasetManifest& manifest, const SplitSpec& spec, std::uint64_t seed);

std::string to_json(const SplitPlan& plan);
SplitPlan split_plan_from_json(std::string_view text);

}  // namespace seasoned
