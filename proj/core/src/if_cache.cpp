// if_cache.cpp — Content-addressed storage of semi-group influence functionals

#include "floquet_if/if_cache.hpp"

#include <cstdio>
#include <functional>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

#include "floquet_if/errors.hpp"
#include "floquet_if/tensor.hpp"

namespace floquet::cache {

namespace fs = std::filesystem;

namespace {

void put(std::ostream& os, double x) { os << std::hexfloat << x << std::defaultfloat << ' '; }
void put(std::ostream& os, cd z) {
    put(os, z.real());
    put(os, z.imag());
}

std::string hexfloat(double x) {
    std::ostringstream os;
    os << std::hexfloat << x;
    return os.str();
}

std::map<std::string, std::string> read_meta(const fs::path& p) {
    std::ifstream in(p);
    if (!in) throw InputError("missing metadata sidecar " + p.string());
    std::map<std::string, std::string> kv;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw InputError("malformed metadata line: " + line);
        kv[line.substr(0, eq)] = line.substr(eq + 1);
    }
    return kv;
}

void write_atomically(const fs::path& target, const std::function<void(std::ostream&)>& writer, bool binary) {
    const fs::path tmp = target.string() + ".tmp";
    {
        std::ofstream out(tmp, binary ? std::ios::binary : std::ios::out);
        if (!out) throw Error("cannot write cache file " + tmp.string());
        writer(out);
        if (!out) throw Error("failed writing cache file " + tmp.string());
    }
    fs::rename(tmp, target);
}

num::ComplexTensor read_tensor_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw InputError("missing cache file " + p.string());
    auto t = num::read_tensor(in);
    if (in.peek() != std::char_traits<char>::eof()) throw InputError("trailing bytes in " + p.string());
    return t;
}

}  // namespace

std::uint64_t fnv1a(const std::string& bytes, std::uint64_t seed) {
    std::uint64_t h = seed;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string to_hex(std::uint64_t value) {
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << value;
    return os.str();
}

std::string canonical_form(const IfRequest& r) {
    std::ostringstream os;
    os << "bath ";
    if (const auto* o = std::get_if<bath::SpectralDensityOhmic>(&r.bath.density)) {
        os << "ohmic ";
        put(os, o->alpha);
        put(os, o->omega_c);
    } else {
        const auto& t = std::get<bath::TabulatedSpectralDensity>(r.bath.density);
        os << "tabulated " << t.omega.size() << ' ';
        for (std::size_t i = 0; i < t.omega.size(); ++i) {
            put(os, t.omega[i]);
            put(os, t.values[i]);
        }
    }
    put(os, r.bath.temperature);
    os << "\nfit " << r.fit.terms.size() << ' ';
    for (const auto& t : r.fit.terms) {
        put(os, t.amplitude);
        put(os, t.rate);
    }
    os << "\npm cap " << r.pseudomodes.excitation_cap << " cutoffs";
    for (std::size_t k = 0; k < r.fit.terms.size(); ++k) os << ' ' << r.pseudomodes.cutoff_for(k);
    os << "\ndt ";
    put(os, r.dt);
    os << "\ncoupling " << r.coupling.rows() << ' ';
    for (Eigen::Index i = 0; i < r.coupling.rows(); ++i)
        for (Eigen::Index j = 0; j < r.coupling.cols(); ++j) put(os, r.coupling(i, j));
    os << '\n';
    return os.str();
}

std::string cache_key(const IfRequest& request) { return to_hex(fnv1a(canonical_form(request))); }

std::string fit_hash(const bath::ExponentialBathFit& fit) {
    std::ostringstream os;
    for (const auto& t : fit.terms) {
        put(os, t.amplitude);
        put(os, t.rate);
    }
    return to_hex(fnv1a(os.str()));
}

std::shared_ptr<const embedding::SemiGroupIF> build_if(const IfRequest& request) {
    const auto gen = embedding::build_environment_generator(request.fit, request.pseudomodes, request.coupling);
    return std::make_shared<const embedding::SemiGroupIF>(embedding::build_semigroup_if(gen, request.dt));
}

IfCache::IfCache(fs::path directory) : dir_(std::move(directory)) { fs::create_directories(dir_); }

fs::path IfCache::path_for(const std::string& key, const std::string& suffix) const { return dir_ / (key + suffix); }

void IfCache::invalidate(const std::string& key, const std::string& reason) {
    warnings_.push_back("cache entry " + key + " invalidated: " + reason);
    std::error_code ec;
    for (const char* s : {".q.fift", ".vl.fift", ".vr.fift", ".meta"}) fs::remove(path_for(key, s), ec);
}

std::optional<embedding::SemiGroupIF> IfCache::lookup(const IfRequest& request) {
    const std::string key = cache_key(request);
    if (!fs::exists(path_for(key, ".meta"))) return std::nullopt;
    try {
        const auto meta = read_meta(path_for(key, ".meta"));
        auto field = [&](const std::string& k) {
            auto it = meta.find(k);
            if (it == meta.end()) throw InputError("metadata lacks '" + k + "'");
            return it->second;
        };
        if (field("key") != key) throw InputError("key mismatch");
        if (field("dt") != hexfloat(request.dt)) throw InputError("dt mismatch");
        if (field("fit_hash") != fit_hash(request.fit)) throw InputError("fit hash mismatch");
        const Eigen::Index d = std::stol(field("d"));
        const Eigen::Index chi = std::stol(field("chi"));
        if (d != request.coupling.rows()) throw InputError("system dimension mismatch");

        // The bond basis is cheap to rebuild and supplies the mirror map.
        std::vector<int> levels;
        for (std::size_t k = 0; k < request.fit.terms.size(); ++k) {
            levels.push_back(request.pseudomodes.cutoff_for(k));
            levels.push_back(request.pseudomodes.cutoff_for(k));
        }
        const embedding::BondBasis basis(levels, request.pseudomodes.excitation_cap);
        if (basis.size() != chi) throw InputError("bond dimension mismatch");

        const Eigen::Index n = d * d * chi;
        const auto q = read_tensor_file(path_for(key, ".q.fift"));
        const auto vl = read_tensor_file(path_for(key, ".vl.fift"));
        const auto vr = read_tensor_file(path_for(key, ".vr.fift"));
        if (q.shape() != num::ComplexTensor::Shape{static_cast<std::size_t>(n), static_cast<std::size_t>(n)})
            throw InputError("q has the wrong shape");
        if (vl.size() != static_cast<std::size_t>(chi) || vr.size() != static_cast<std::size_t>(chi))
            throw InputError("boundary vectors have the wrong size");

        embedding::SemiGroupIF sg;
        sg.d = d;
        sg.chi = chi;
        sg.dt = request.dt;
        sg.q = q.as_matrix();
        sg.v_l = vl.reshape({1, static_cast<std::size_t>(chi)}).as_matrix();
        sg.v_r = vr.reshape({static_cast<std::size_t>(chi), 1}).as_matrix();
        sg.mirror = basis.mirror();
        sg.coupling = request.coupling;
        return sg;
    } catch (const std::exception& e) {
        invalidate(key, e.what());
        return std::nullopt;
    }
}

void IfCache::store(const IfRequest& request, const embedding::SemiGroupIF& sg) {
    const std::string key = cache_key(request);
    write_atomically(path_for(key, ".q.fift"), [&](std::ostream& o) { num::write_tensor(o, num::ComplexTensor::from_matrix(sg.q)); }, true);
    write_atomically(path_for(key, ".vl.fift"), [&](std::ostream& o) { num::write_tensor(o, num::ComplexTensor::from_vector(sg.v_l.transpose())); }, true);
    write_atomically(path_for(key, ".vr.fift"), [&](std::ostream& o) { num::write_tensor(o, num::ComplexTensor::from_vector(sg.v_r)); }, true);
    // The sidecar is written last: its presence marks a complete entry.
    write_atomically(
        path_for(key, ".meta"),
        [&](std::ostream& o) {
            o << "# semi-group influence functional cache entry\n";
            o << "key=" << key << '\n';
            o << "dt=" << hexfloat(sg.dt) << '\n';
            o << "d=" << sg.d << '\n';
            o << "chi=" << sg.chi << '\n';
            o << "fit_hash=" << fit_hash(request.fit) << '\n';
            o << "terms=" << request.fit.terms.size() << '\n';
            o << "excitation_cap=" << request.pseudomodes.excitation_cap << '\n';
            o << "cutoffs=";
            for (std::size_t k = 0; k < request.fit.terms.size(); ++k) o << (k ? "," : "") << request.pseudomodes.cutoff_for(k);
            o << '\n';
        },
        false);
}

std::shared_ptr<const embedding::SemiGroupIF> IfCache::get_or_build(const IfRequest& request, bool* hit) {
    if (auto cached = lookup(request)) {
        if (hit) *hit = true;
        return std::make_shared<const embedding::SemiGroupIF>(std::move(*cached));
    }
    if (hit) *hit = false;
    auto sg = build_if(request);
    store(request, *sg);
    return sg;
}

}  // namespace floquet::cache
