#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "hqva/identity/evaluator.hpp"

namespace hqva::harness {

struct CacheKey {
    Family family = Family::C;
    int n = 1;
    int order = 3;
    int z_degree = 10;

    std::string file_name() const;  // "C1_L4_z10.hqc"
    friend auto operator<=>(const CacheKey&, const CacheKey&) = default;
};

// One line per inspected entry.
struct CacheEntryInfo {
    CacheKey key;
    std::string digest;  // sha256 of the entry body; empty when unreadable
    bool valid = false;
    std::string problem;
};

// Normalizer and constant operators on disk, one text file per key. Readers
// take a shared flock on <dir>/.lock, writers an exclusive one; entries are
// written to a temporary file and renamed into place. An entry whose digest,
// parse or constant operators do not check out is recomputed with a warning.
class DiskCache {
public:
    explicit DiskCache(std::filesystem::path dir);

    const std::filesystem::path& dir() const { return dir_; }

    // Loads a valid entry or solves and stores one. `warned` is set when an
    // existing entry was rejected.
    Normalizer load_or_solve(const CacheKey& key, bool* warned = nullptr);

    // Returns the entry digest; an existing valid entry is left untouched.
    std::string warm(const CacheKey& key);

    // Removes every entry, or only the matching one. Returns the count.
    int clear(const std::optional<CacheKey>& key = std::nullopt);

    std::vector<CacheEntryInfo> inspect() const;

private:
    std::optional<Normalizer> read(const CacheKey& key, std::string* digest, std::string* problem) const;
    std::string write(const CacheKey& key, const Normalizer& normalizer);

    std::filesystem::path dir_;
};

// HQVA_CACHE_DIR, else $XDG_CACHE_HOME/hqva, else $HOME/.cache/hqva.
std::filesystem::path default_cache_dir();

// Canonical text of a cache entry without the trailing digest line.
std::string serialize_entry(const CacheKey& key, const Normalizer& normalizer);
// Throws std::invalid_argument on malformed text or a key mismatch.
Normalizer parse_entry(const std::string& body, const CacheKey& key);

std::string sha256_hex(const std::string& data);

// RMatrixSource backed by a DiskCache (or memory only when no cache is given).
class CachedRMatrixSource : public RMatrixSource {
public:
    explicit CachedRMatrixSource(std::shared_ptr<DiskCache> cache = nullptr);
    std::shared_ptr<const RMatrix> get(Family family, int n, int order) override;

private:
    std::shared_ptr<DiskCache> cache_;
    std::mutex mutex_;
    std::map<std::tuple<Family, int, int>, std::shared_future<std::shared_ptr<const RMatrix>>> solved_;
};

}  // namespace hqva::harness
