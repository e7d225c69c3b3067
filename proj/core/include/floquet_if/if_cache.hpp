// if_cache.hpp — On-disk cache of semi-group influence functionals

#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "floquet_if/bath.hpp"
#include "floquet_if/embedding.hpp"

namespace floquet::cache {

/// Everything that determines q, v_l and v_r.
struct IfRequest {
    bath::BathSpec bath;
    bath::ExponentialBathFit fit;
    embedding::PseudomodeSpec pseudomodes;
    Matrix coupling;
    double dt = 0.0;
};

/// 64-bit FNV-1a over bytes.
std::uint64_t fnv1a(const std::string& bytes, std::uint64_t seed = 0xcbf29ce484222325ULL);
std::string to_hex(std::uint64_t value);

/// Canonical text serialization (hexfloat numbers) of the request.
std::string canonical_form(const IfRequest& request);
std::string cache_key(const IfRequest& request);
/// Hash of the fitted exponential terms alone.
std::string fit_hash(const bath::ExponentialBathFit& fit);

/// Directory of <key>.q.fift, <key>.vl.fift, <key>.vr.fift and a <key>.meta text sidecar.
class IfCache {
public:
    explicit IfCache(std::filesystem::path directory);

    const std::filesystem::path& directory() const noexcept { return dir_; }

    /// Cached IF, or nullopt on a miss. Corrupt or mismatching entries are removed and reported in warnings().
    std::optional<embedding::SemiGroupIF> lookup(const IfRequest& request);
    void store(const IfRequest& request, const embedding::SemiGroupIF& sg);

    /// Lookup, building and storing on a miss.
    std::shared_ptr<const embedding::SemiGroupIF> get_or_build(const IfRequest& request, bool* hit = nullptr);

    const std::vector<std::string>& warnings() const noexcept { return warnings_; }

private:
    std::filesystem::path path_for(const std::string& key, const std::string& suffix) const;
    void invalidate(const std::string& key, const std::string& reason);

    std::filesystem::path dir_;
    std::vector<std::string> warnings_;
};

/// Builds the IF without touching any cache.
std::shared_ptr<const embedding::SemiGroupIF> build_if(const IfRequest& request);

}  // namespace floquet::cache
